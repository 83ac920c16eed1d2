#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "ozone/errors.hpp"

namespace ozone {

/// Single-hidden-layer, single-output layout.
struct Topology {
    int inputs = 1;
    int hidden = 12;

    /// N_h (N_i + 1) + (N_h + 1)
    int parameter_count() const { return hidden * (inputs + 1) + hidden + 1; }

    void validate() const {
        if (inputs < 1 || hidden < 1) {
            throw ConfigError("topology needs >= 1 input and >= 1 hidden neuron, got " + std::to_string(inputs) +
                              "x" + std::to_string(hidden));
        }
    }

    bool operator==(const Topology&) const = default;
};

/// Perceptron regressor y = sum_j v_j tanh(sum_i W_ji x_i + b_j) + c.
///
/// Flat parameter ordering (version 1), used by parameters(), jacobian()
/// and the model file: hidden weights W row-major (hidden neuron major),
/// hidden biases b, output weights v, output bias c.
template <typename Scalar>
class Mlp {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Mlp() : Mlp(Topology{}) {}

    explicit Mlp(const Topology& topology)
        : topology_(topology),
          hidden_weights_(Matrix::Zero(topology.hidden, topology.inputs)),
          hidden_biases_(Vector::Zero(topology.hidden)),
          output_weights_(Vector::Zero(topology.hidden)) {
        topology.validate();
    }

    const Topology& topology() const { return topology_; }

    Matrix& hidden_weights() { return hidden_weights_; }
    const Matrix& hidden_weights() const { return hidden_weights_; }
    Vector& hidden_biases() { return hidden_biases_; }
    const Vector& hidden_biases() const { return hidden_biases_; }
    Vector& output_weights() { return output_weights_; }
    const Vector& output_weights() const { return output_weights_; }
    Scalar& output_bias() { return output_bias_; }
    Scalar output_bias() const { return output_bias_; }

    static Scalar activation(Scalar a) {
        using std::tanh;
        return tanh(a);
    }

    /// Hidden-layer outputs for every row of `inputs` (R x N_h).
    template <typename Derived>
    Matrix hidden_outputs(const Eigen::MatrixBase<Derived>& inputs) const {
        Matrix pre = inputs * hidden_weights_.transpose();
        pre.rowwise() += hidden_biases_.transpose();
        return pre.unaryExpr([](Scalar a) { return activation(a); });
    }

    /// One prediction per row of `inputs` (R x N_i).
    template <typename Derived>
    Vector predict(const Eigen::MatrixBase<Derived>& inputs) const {
        check_columns(inputs.cols());
        return (hidden_outputs(inputs) * output_weights_).array() + output_bias_;
    }

    /// Prediction for a single input vector of length N_i.
    template <typename Derived>
    Scalar forward(const Eigen::MatrixBase<Derived>& input) const {
        if (input.size() != topology_.inputs) {
            throw ConfigError("forward: input length " + std::to_string(input.size()) + " != " +
                              std::to_string(topology_.inputs));
        }
        const Vector x = input;
        const Vector h = (hidden_weights_ * x + hidden_biases_).unaryExpr(
            [](Scalar a) { return activation(a); });
        return output_weights_.dot(h) + output_bias_;
    }

    Vector parameters() const {
        Vector p(topology_.parameter_count());
        Eigen::Index k = 0;
        for (Eigen::Index j = 0; j < hidden_weights_.rows(); ++j) {
            for (Eigen::Index i = 0; i < hidden_weights_.cols(); ++i) p[k++] = hidden_weights_(j, i);
        }
        p.segment(k, topology_.hidden) = hidden_biases_;
        k += topology_.hidden;
        p.segment(k, topology_.hidden) = output_weights_;
        k += topology_.hidden;
        p[k] = output_bias_;
        return p;
    }

    void set_parameters(const Eigen::Ref<const Vector>& p) {
        if (p.size() != topology_.parameter_count()) {
            throw ConfigError("expected " + std::to_string(topology_.parameter_count()) + " parameters, got " +
                              std::to_string(p.size()));
        }
        Eigen::Index k = 0;
        for (Eigen::Index j = 0; j < hidden_weights_.rows(); ++j) {
            for (Eigen::Index i = 0; i < hidden_weights_.cols(); ++i) hidden_weights_(j, i) = p[k++];
        }
        hidden_biases_ = p.segment(k, topology_.hidden);
        k += topology_.hidden;
        output_weights_ = p.segment(k, topology_.hidden);
        k += topology_.hidden;
        output_bias_ = p[k];
    }

    bool all_finite() const {
        return hidden_weights_.allFinite() && hidden_biases_.allFinite() && output_weights_.allFinite() &&
               std::isfinite(static_cast<double>(output_bias_));
    }

    bool operator==(const Mlp& other) const {
        return topology_ == other.topology_ && hidden_weights_ == other.hidden_weights_ &&
               hidden_biases_ == other.hidden_biases_ && output_weights_ == other.output_weights_ &&
               output_bias_ == other.output_bias_;
    }

    void check_columns(Eigen::Index cols) const {
        if (cols != topology_.inputs) {
            throw ConfigError("input matrix has " + std::to_string(cols) + " columns, network expects " +
                              std::to_string(topology_.inputs));
        }
    }

private:
    Topology topology_;
    Matrix hidden_weights_;
    Vector hidden_biases_;
    Vector output_weights_;
    Scalar output_bias_{0};
};

using MlpModel = Mlp<double>;

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, biases zero.
/// Draw order follows the flat parameter ordering.
template <typename Scalar = double>
Mlp<Scalar> init_model(const Topology& topology, std::uint64_t seed) {
    Mlp<Scalar> model(topology);
    std::mt19937_64 rng(seed);
    const double hidden_bound = 1.0 / std::sqrt(static_cast<double>(topology.inputs));
    const double output_bound = 1.0 / std::sqrt(static_cast<double>(topology.hidden));
    std::uniform_real_distribution<double> hidden_dist(-hidden_bound, hidden_bound);
    std::uniform_real_distribution<double> output_dist(-output_bound, output_bound);
    for (int j = 0; j < topology.hidden; ++j) {
        for (int i = 0; i < topology.inputs; ++i) model.hidden_weights()(j, i) = static_cast<Scalar>(hidden_dist(rng));
    }
    for (int j = 0; j < topology.hidden; ++j) model.output_weights()[j] = static_cast<Scalar>(output_dist(rng));
    return model;
}

/// d(prediction_r)/d(parameter_p) for each row r of `inputs`, columns in the
/// flat parameter ordering.
template <typename Scalar, typename Derived>
typename Mlp<Scalar>::Matrix jacobian(const Mlp<Scalar>& model, const Eigen::MatrixBase<Derived>& inputs) {
    using Matrix = typename Mlp<Scalar>::Matrix;
    model.check_columns(inputs.cols());
    const auto& topo = model.topology();
    const Eigen::Index rows = inputs.rows();
    const Eigen::Index ni = topo.inputs;
    const Eigen::Index nh = topo.hidden;

    const Matrix h = model.hidden_outputs(inputs);
    // d y / d pre-activation of hidden neuron j
    const Matrix g = ((Scalar(1) - h.array().square()).rowwise() * model.output_weights().transpose().array()).matrix();

    Matrix jac(rows, topo.parameter_count());
    for (Eigen::Index j = 0; j < nh; ++j) {
        for (Eigen::Index i = 0; i < ni; ++i) {
            jac.col(j * ni + i) = g.col(j).cwiseProduct(inputs.col(i));
        }
    }
    jac.middleCols(nh * ni, nh) = g;
    jac.middleCols(nh * ni + nh, nh) = h;
    jac.col(jac.cols() - 1).setOnes();
    return jac;
}

/// Mean of squared residuals.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar mse(const Eigen::MatrixBase<DerivedA>& predictions,
                              const Eigen::MatrixBase<DerivedB>& targets) {
    if (predictions.size() != targets.size() || predictions.size() == 0) {
        throw ConfigError("mse: length mismatch or empty input (" + std::to_string(predictions.size()) + " vs " +
                          std::to_string(targets.size()) + ")");
    }
    return (predictions - targets).squaredNorm() / static_cast<typename DerivedA::Scalar>(predictions.size());
}

}  // namespace ozone

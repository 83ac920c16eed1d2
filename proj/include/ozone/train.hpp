#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ozone/errors.hpp"
#include "ozone/mlp.hpp"

namespace ozone {

struct TrainConfig {
    int max_epochs = 1000;
    int patience = 6;
    double damping_init = 1e-3;
    double damping_up = 10.0;
    double damping_down = 0.1;
    double damping_max = 1e10;
    /// Weight-initialization seed used by callers that build the starting model.
    std::uint64_t seed = 0;

    void validate() const {
        if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
        if (patience < 1) throw ConfigError("patience must be >= 1");
        if (!(damping_init > 0.0) || !(damping_max > 0.0)) throw ConfigError("damping values must be positive");
        if (damping_init > damping_max) throw ConfigError("damping_init exceeds damping_max");
        if (!(damping_up > 1.0) || !(damping_down > 0.0) || !(damping_down < 1.0)) {
            throw ConfigError("damping factors must satisfy damping_up > 1 > damping_down > 0");
        }
    }
};

enum class StopReason { patience_exhausted, max_epochs, damping_overflow };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::patience_exhausted: return "patience_exhausted";
        case StopReason::max_epochs: return "max_epochs";
        case StopReason::damping_overflow: return "damping_overflow";
    }
    return "unknown";
}

struct EpochRecord {
    int epoch;
    double train_mse;
    double val_mse;
    double damping;  // lambda of the accepted step
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;  // 0: no epoch was accepted, the initial model is returned
    StopReason stop_reason = StopReason::max_epochs;
};

template <typename Scalar>
struct TrainResult {
    Mlp<Scalar> model;
    TrainHistory history;
};

/// Tracks the running best validation score and the streak of epochs that
/// failed to beat it (strict `<`).
class EarlyStopping {
public:
    explicit EarlyStopping(int patience) : patience_(patience) {}

    /// Returns true when `val_mse` improves on the best so far.
    bool update(int epoch, double val_mse) {
        if (val_mse < best_) {
            best_ = val_mse;
            best_epoch_ = epoch;
            streak_ = 0;
            return true;
        }
        ++streak_;
        return false;
    }

    bool exhausted() const { return streak_ >= patience_; }
    int best_epoch() const { return best_epoch_; }
    double best() const { return best_; }
    int streak() const { return streak_; }

private:
    int patience_;
    int streak_ = 0;
    int best_epoch_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Solves (A + damping I) x = rhs reading only the lower triangle of A.
/// Returns false if no finite solution could be produced.
template <typename Matrix, typename Vector>
bool solve_damped(const Matrix& normal, const Vector& rhs, double damping, Vector& step) {
    using Scalar = typename Matrix::Scalar;
    Matrix lhs = normal;
    lhs.diagonal().array() += static_cast<Scalar>(damping);
    Eigen::LDLT<Matrix, Eigen::Lower> ldlt(lhs);
    if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(rhs);
        if (step.allFinite()) return true;
    }
    // near-singular: retry with a trace-relative diagonal jitter
    const Scalar jitter = Scalar(1e-12) * normal.trace() / static_cast<Scalar>(normal.rows());
    lhs.diagonal().array() += jitter;
    ldlt.compute(lhs);
    if (ldlt.info() != Eigen::Success) return false;
    step = ldlt.solve(rhs);
    return step.allFinite();
}

}  // namespace detail

/// Levenberg-Marquardt training with validation-based early stopping.
///
/// Each epoch solves (J^T J + lambda I) delta = J^T e for the residual
/// e = target - prediction. A step is accepted when it does not raise the
/// training MSE (lambda shrinks by damping_down); otherwise lambda grows by
/// damping_up and the step is retried, until lambda exceeds damping_max.
/// `validation` scores each accepted model. Training stops after `patience`
/// consecutive epochs without a strict improvement of the best validation
/// score, at max_epochs, or on damping overflow. The returned model is the
/// best-validation snapshot.
///
/// Throws NumericError when the training or validation loss becomes non-finite.
template <typename Scalar>
TrainResult<Scalar> train_lm(const Mlp<Scalar>& initial, const typename Mlp<Scalar>::Matrix& inputs,
                             const typename Mlp<Scalar>::Vector& targets,
                             const std::function<double(const Mlp<Scalar>&)>& validation, const TrainConfig& config) {
    using Matrix = typename Mlp<Scalar>::Matrix;
    using Vector = typename Mlp<Scalar>::Vector;
    config.validate();
    initial.check_columns(inputs.cols());
    if (inputs.rows() == 0 || inputs.rows() != targets.size()) {
        throw ConfigError("training set is empty or inputs/targets differ in length");
    }
    const auto n = static_cast<Scalar>(inputs.rows());
    const Eigen::Index P = initial.topology().parameter_count();

    Mlp<Scalar> model = initial;
    Vector params = model.parameters();
    Vector residual = targets - model.predict(inputs);
    Scalar current = residual.squaredNorm() / n;
    if (!std::isfinite(static_cast<double>(current))) throw NumericError("non-finite training loss at epoch 0");

    TrainResult<Scalar> result{initial, {}};
    EarlyStopping stopper(config.patience);
    double damping = config.damping_init;
    Matrix normal(P, P);
    Vector gradient(P);
    Vector step(P);
    Mlp<Scalar> candidate = model;

    result.history.stop_reason = StopReason::max_epochs;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const Matrix jac = jacobian(model, inputs);
        normal.setZero();
        normal.template selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
        gradient.noalias() = jac.transpose() * residual;

        bool accepted = false;
        Vector candidate_residual;
        Scalar candidate_loss = 0;
        double used_damping = damping;
        while (damping <= config.damping_max) {
            if (detail::solve_damped(normal, gradient, damping, step)) {
                candidate.set_parameters(params + step);
                candidate_residual = targets - candidate.predict(inputs);
                candidate_loss = candidate_residual.squaredNorm() / n;
                if (std::isfinite(static_cast<double>(candidate_loss)) && candidate_loss <= current) {
                    accepted = true;
                    used_damping = damping;
                    damping *= config.damping_down;
                    break;
                }
            }
            damping *= config.damping_up;
        }
        if (!accepted) {
            result.history.stop_reason = StopReason::damping_overflow;
            break;
        }

        model = candidate;
        params = model.parameters();
        residual = std::move(candidate_residual);
        current = candidate_loss;

        const double val = validation(model);
        if (!std::isfinite(val)) throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
        result.history.epochs.push_back({epoch, static_cast<double>(current), val, used_damping});
        if (stopper.update(epoch, val)) {
            result.model = model;
            result.history.best_epoch = epoch;
        }
        if (stopper.exhausted()) {
            result.history.stop_reason = StopReason::patience_exhausted;
            break;
        }
    }
    return result;
}

/// Convenience overload scoring each epoch by MSE on a held-out set.
template <typename Scalar>
TrainResult<Scalar> train_lm(const Mlp<Scalar>& initial, const typename Mlp<Scalar>::Matrix& train_inputs,
                             const typename Mlp<Scalar>::Vector& train_targets,
                             const typename Mlp<Scalar>::Matrix& val_inputs,
                             const typename Mlp<Scalar>::Vector& val_targets, const TrainConfig& config) {
    initial.check_columns(val_inputs.cols());
    if (val_inputs.rows() == 0 || val_inputs.rows() != val_targets.size()) {
        throw ConfigError("validation set is empty or inputs/targets differ in length");
    }
    const std::function<double(const Mlp<Scalar>&)> score = [&](const Mlp<Scalar>& m) {
        return static_cast<double>(mse(m.predict(val_inputs), val_targets));
    };
    return train_lm(initial, train_inputs, train_targets, score, config);
}

}  // namespace ozone

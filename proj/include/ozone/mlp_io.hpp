#pragma once

#include <filesystem>
#include <iosfwd>

#include "ozone/mlp.hpp"
#include "ozone/train.hpp"

namespace ozone {

/// Tag written on the second line of every model file.
inline constexpr const char* kParameterOrderV1 = "hidden_weights_row_major,hidden_biases,output_weights,output_bias";

/// Text model file: a format line, the parameter-order tag, topology, then
/// one parameter per line with 17 significant digits (exact round trip).
void write_model(const MlpModel& model, std::ostream& out);
void write_model(const MlpModel& model, const std::filesystem::path& path);

/// Throws ParseError on a malformed or unsupported file.
MlpModel read_model(std::istream& in);
MlpModel read_model(const std::filesystem::path& path);

/// CSV with columns epoch,train_mse,val_mse,damping.
void write_history(const TrainHistory& history, std::ostream& out);

}  // namespace ozone

#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "rbon/operator_model.hpp"

namespace rbon {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

/// JSON document holding every parameter needed to reproduce predictions.
/// Doubles are written with round-trip precision, so load(save(m)) predicts
/// bit-identically.
nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const TrainedModel& model, std::ostream& out);
void save_model(const TrainedModel& model, const std::filesystem::path& destination);

/// Throws CorruptFileError on unparsable or incomplete input and
/// VersionMismatchError for an unknown format_version.
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& source);

} // namespace rbon

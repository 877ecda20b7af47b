#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbon/climate.hpp"
#include "rbon/dataset.hpp"
#include "rbon/metrics.hpp"
#include "rbon/operator_model.hpp"

namespace rbon {

/// Per-function L2 relative errors of a model on a split.
std::vector<double> field_errors(const TrainedModel& model, const TrainingSet& split);
/// mean_and_moe of field_errors, or just the mean when the split has one function.
ErrorSummary evaluate(const TrainedModel& model, const TrainingSet& split);

struct SweepGrid {
    std::vector<int> branch_units{5, 10, 15};
    std::vector<int> trunk_units{5, 10, 15};
    std::vector<double> branch_overlaps{1.0, 2.0, 3.0, 5.0};
    std::vector<double> trunk_overlaps{1.0, 2.0, 3.0, 5.0};
};

nlohmann::json sweep_grid_to_json(const SweepGrid& g);
SweepGrid sweep_grid_from_json(const nlohmann::json& j);

struct SweepPoint {
    int branch_units;
    int trunk_units;
    double branch_overlap;
    double trunk_overlap;
    double validation_error; ///< NaN when training failed
    std::string failure;
};

struct Selection {
    ModelConfig config;  ///< chosen sizes, no manual centers
    TrainedModel model;
    double validation_error;
    std::vector<SweepPoint> sweep;
};

/// Train every grid point (honouring the size cap of `base`) and keep the one
/// with the lowest mean validation error. Points within a relative 1e-6 of
/// the best count as tied and the smallest network wins (M*N, then M, then
/// overlaps). Clustering runs once per width and is reused across overlaps;
/// the returned model is retrained from scratch with the chosen config and is
/// identical to train(train_set, config).
Selection select_model(const TrainingSet& train_set, const TrainingSet& validation, const ModelConfig& base,
                       const SweepGrid& grid);

// ---- benchmark -------------------------------------------------------------

struct BenchmarkRun {
    std::vector<Family> families{Family::Wave, Family::Burgers, Family::Beam};
    std::vector<Variant> variants{Variant::RBON, Variant::NRBON, Variant::F_RBON};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    SweepGrid grid;
    ModelConfig base;
    /// Dataset settings per family; missing entries use BenchmarkConfig::defaults.
    std::vector<BenchmarkConfig> datasets;

    [[nodiscard]] BenchmarkConfig dataset_for(Family f) const;
};

nlohmann::json benchmark_run_to_json(const BenchmarkRun& r);
BenchmarkRun benchmark_run_from_json(const nlohmann::json& j);

struct SeedOutcome {
    std::uint64_t seed;
    ModelConfig chosen;
    double validation_error;
    ErrorSummary id;
    ErrorSummary ood;
};

struct CellResult {
    Family family = Family::Wave;
    Variant variant = Variant::RBON;
    bool ok = false;
    std::string failure;
    std::vector<SeedOutcome> seeds;
    ErrorSummary id;  ///< per-function errors pooled over seeds
    ErrorSummary ood;
    double id_median = 0.0;  ///< median over seeds of the per-seed mean
    double ood_median = 0.0;
    double runtime_seconds = 0.0;
};

/// Runs every (family, variant) cell. Datasets are generated once per
/// (family, seed) and shared by the variants. A failing cell is recorded
/// and the remaining cells still run.
std::vector<CellResult> run_benchmark(const BenchmarkRun& run, bool verbose = false);

std::string benchmark_csv(const std::vector<CellResult>& cells);
std::string benchmark_table(const std::vector<CellResult>& cells);
nlohmann::json benchmark_results_json(const std::vector<CellResult>& cells);

// ---- forecasting -----------------------------------------------------------

struct ForecastTarget {
    std::string name;
    std::filesystem::path file;
    CsvSchema schema = CsvSchema::climate_at_a_glance();
};

struct ForecastRun {
    std::filesystem::path co2_file;
    CsvSchema co2_schema = CsvSchema::mauna_loa();
    std::vector<ForecastTarget> targets;
    std::vector<int> holdouts{2, 5};
    /// Widths may exceed the benchmark cap here.
    ModelConfig base;
    SweepGrid grid;
    bool surrogate = false;

    ForecastRun();
};

nlohmann::json forecast_run_to_json(const ForecastRun& r);
ForecastRun forecast_run_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

struct ForecastResult {
    std::string target;
    int holdout = 0;
    int train_years = 0;
    std::vector<int> test_years;
    ModelConfig chosen;
    double test_error = 0.0;  ///< mean over test years of the 12-month L2 relative error
    std::vector<ForecastRow> rows;
};

/// Sizes are chosen on the last `holdout` training years, then the model is
/// refit on every training year and scored on the held-out years.
ForecastResult run_forecast(const ForecastRun& run, const std::vector<YearFunction>& co2,
                            const std::vector<YearFunction>& target, const std::string& target_name, int holdout);
std::vector<ForecastResult> run_forecasts(const ForecastRun& run);

std::string forecast_csv(const std::vector<ForecastResult>& results, bool surrogate);
std::string forecast_table(const std::vector<ForecastResult>& results, bool surrogate);

/// Writes `text` to dir/name and returns its SHA-256.
std::string write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& text);

} // namespace rbon

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rbon/operator_model.hpp"
#include "rbon/pde.hpp"

namespace rbon {

enum class Family { Wave, Burgers, Beam };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

struct BenchmarkConfig {
    Family family = Family::Wave;

    double wave_speed = 1.0;
    double viscosity = 0.1;
    double t_final = 1.0;
    double length = 1.0;
    /// Beam decay rates k for the ID and OOD forcing; EI = k^-4, rho A = 1.
    double id_decay = 0.05;
    double ood_decay = 1.0;

    double id_lo = 1.0;
    double id_hi = 4.0;
    double id_step = 0.01;
    double ood_lo = 5.0;
    double ood_hi = 5.5;
    int ood_count = 100;

    int sensors = 128;        ///< 1-D initial conditions
    int beam_sensor_nt = 16;  ///< beam forcing sensor grid
    int beam_sensor_nx = 16;
    int query_nt = 64;
    int query_nx = 64;
    /// Wave solver grid is the query grid refined by these strides.
    int wave_stride_t = 8;
    int wave_stride_x = 4;

    double validation_fraction = 0.1;
    double test_fraction = 0.1;

    static BenchmarkConfig defaults(Family family);
    void validate() const;

    [[nodiscard]] std::vector<double> id_parameters() const;
    [[nodiscard]] std::vector<double> ood_parameters() const;
    [[nodiscard]] GridSpec query_grid() const;
    /// Sensor coordinates: m x 1 for wave/Burgers, m x 2 (t, x) for the beam.
    [[nodiscard]] Eigen::MatrixXd sensor_locations() const;
};

nlohmann::json benchmark_config_to_json(const BenchmarkConfig& c);
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j);

struct DatasetSplit {
    std::string name;
    TrainingSet data;
    std::vector<double> parameters;
};

struct BenchmarkDataset {
    BenchmarkConfig config;
    std::uint64_t seed = 0;
    Eigen::MatrixXd sensor_locations;
    DatasetSplit train;
    DatasetSplit validation;
    DatasetSplit id_test;
    DatasetSplit ood_test;
};

/// Split sizes for n ID functions: validation and test get floor(fraction * n),
/// train keeps the rest.
struct SplitSizes {
    int train, validation, test;
};
SplitSizes split_sizes(int n, double validation_fraction, double test_fraction);

/// Input samples and target field for one parameter value.
struct Sample {
    Eigen::VectorXd input;
    Eigen::VectorXd target;
};
Sample generate_sample(const BenchmarkConfig& cfg, double parameter, bool out_of_distribution);

/// Enumerates the ID grid, shuffles it with `seed`, splits train/validation/
/// id-test, and samples the OOD range evenly. Each split's parameters are
/// stored in ascending order.
BenchmarkDataset build_benchmark_dataset(const BenchmarkConfig& cfg, std::uint64_t seed);

// ---- files -----------------------------------------------------------------

inline constexpr int kDatasetFormatVersion = 1;

/// Self-describing binary container: "RBDS" magic, u32 version, u64 header
/// length, JSON header, then little-endian doubles for sensor locations,
/// inputs, queries and targets (row-major).
void write_split(const std::filesystem::path& file, const DatasetSplit& split, const BenchmarkConfig& cfg,
                 std::uint64_t seed, const Eigen::MatrixXd& sensor_locations);

struct LoadedSplit {
    DatasetSplit split;
    BenchmarkConfig config;
    std::uint64_t seed = 0;
    Eigen::MatrixXd sensor_locations;
};
LoadedSplit read_split(const std::filesystem::path& file);

/// Writes train/validation/id_test/ood_test containers plus manifest.json.
/// Returns the manifest.
nlohmann::json write_dataset(const std::filesystem::path& dir, const BenchmarkDataset& ds);
BenchmarkDataset read_dataset(const std::filesystem::path& dir);

} // namespace rbon

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "rbon/lstsq.hpp"
#include "rbon/rbf.hpp"

namespace rbon {

enum class Variant {
    RBON,   ///< plain branch/trunk Gaussian network
    NRBON,  ///< feature products normalized to unit sum
    F_RBON, ///< branch consumes the DFT of the sensor samples
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

/// How the per-query systems xi_l^T Phi_l = v_l are combined into one weight vector.
enum class WeightSolver {
    Pooled,          ///< one minimum-norm solve over every (function, query) pair
    PerQueryAverage, ///< solve each query separately, then average element-wise
};

std::string_view to_string(WeightSolver s);
WeightSolver parse_weight_solver(std::string_view name);

/// Sampled input functions, query locations and target values.
///
/// Row j of `inputs` is function j at the m shared sensor locations, row l of
/// `queries` is the query point y_l, and targets(j, l) = v_j(y_l).
struct TrainingSet {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd queries;
    Eigen::MatrixXd targets;

    [[nodiscard]] Eigen::Index functions() const { return inputs.rows(); }
    [[nodiscard]] Eigen::Index sensors() const { return inputs.cols(); }
    [[nodiscard]] Eigen::Index query_count() const { return queries.rows(); }
    [[nodiscard]] Eigen::Index query_dim() const { return queries.cols(); }

    /// Throws on inconsistent shapes or non-finite values; `min_functions`
    /// is 2 for training (clustering needs two inputs) and 1 for evaluation.
    void validate(Eigen::Index min_functions = 1) const;
};

inline constexpr int kMaxUnitsPerLayer = 15;
inline constexpr int kMaxHiddenProducts = 225;

struct ModelConfig {
    Variant variant = Variant::RBON;
    int branch_units = 10;
    int trunk_units = 10;
    double branch_overlap = 1.0;
    double trunk_overlap = 1.0;
    int restarts = 10;
    int max_iterations = 300;
    double convergence_tol = 1e-9;
    std::uint64_t seed = 0;
    WeightSolver solver = WeightSolver::Pooled;
    /// Reject layers wider than 15 units or more than 225 products.
    bool enforce_size_cap = true;
    /// Skip clustering and use these centers (rows). For F_RBON the rows are
    /// interleaved (re, im) pairs of the frequency-domain center.
    std::optional<Eigen::MatrixXd> manual_branch_centers;
    std::optional<Eigen::MatrixXd> manual_trunk_centers;
};

struct TrainingReport {
    double max_abs_residual = 0.0;
    double mean_relative_l2 = 0.0;
    double branch_wcss = 0.0;
    double trunk_wcss = 0.0;
};

using BranchLayer = std::variant<RbfLayer<double>, RbfLayer<cdouble>>;

/// Frozen network: G(u)(y) = cal(xi^T [b(u) (x) t(y)]), optionally normalized.
class TrainedModel {
public:
    TrainedModel(Variant variant, BranchLayer branch, RbfLayer<double> trunk, Eigen::VectorXd weights,
                 Calibration calibration, Eigen::Index sensor_count, std::uint64_t seed = 0,
                 std::string config_hash = {}, TrainingReport report = {});

    [[nodiscard]] Variant variant() const { return variant_; }
    [[nodiscard]] const BranchLayer& branch() const { return branch_; }
    [[nodiscard]] const RbfLayer<double>& trunk() const { return trunk_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }
    [[nodiscard]] const Calibration& calibration() const { return calibration_; }
    [[nodiscard]] Eigen::Index sensor_count() const { return sensor_count_; }
    [[nodiscard]] Eigen::Index query_dim() const { return trunk_.input_dim(); }
    [[nodiscard]] Eigen::Index branch_units() const;
    [[nodiscard]] Eigen::Index trunk_units() const { return trunk_.units(); }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const std::string& config_hash() const { return config_hash_; }
    [[nodiscard]] const TrainingReport& report() const { return report_; }

    /// Weights viewed as the M x N matrix Xi with Xi(i, k) = xi[i*N + k].
    [[nodiscard]] Eigen::Map<const MatrixX<double>> weight_matrix() const;

private:
    Variant variant_;
    BranchLayer branch_;
    RbfLayer<double> trunk_;
    Eigen::VectorXd weights_;
    Calibration calibration_;
    Eigen::Index sensor_count_;
    std::uint64_t seed_;
    std::string config_hash_;
    TrainingReport report_;
};

/// Fit the network: cluster branch inputs (after a DFT for F_RBON) and query
/// points, set spreads from inter-center distances, solve the weights by
/// minimum-norm least squares, then fit the affine output calibration.
TrainedModel train(const TrainingSet& data, const ModelConfig& config);

/// The centers train() would place, without fitting anything else. Branch
/// centers of an F_RBON model come back as interleaved (re, im) rows, the
/// layout manual_branch_centers expects.
Eigen::MatrixXd fit_branch_centers(const TrainingSet& data, const ModelConfig& config);
Eigen::MatrixXd fit_trunk_centers(const TrainingSet& data, const ModelConfig& config);

/// Branch feature vector b(u); applies the DFT for F_RBON models.
Eigen::VectorXd branch_features(const TrainedModel& model, const Eigen::VectorXd& u);

/// xi^T f before calibration, where f = b(u) (x) t(y), normalized for NRBON.
double predict_raw(const TrainedModel& model, const Eigen::VectorXd& u, const Eigen::VectorXd& y);

double predict(const TrainedModel& model, const Eigen::VectorXd& u, const Eigen::VectorXd& y);

/// predict at every row of `queries`, computing b(u) once. Element l is
/// bit-identical to predict(model, u, queries.row(l)).
Eigen::VectorXd predict_field(const TrainedModel& model, const Eigen::VectorXd& u, const Eigen::MatrixXd& queries);

/// Predictions for every (function, query) pair as one J x L matrix, via
/// B Xi T^T. Agrees with predict to rounding, not bit-for-bit.
Eigen::MatrixXd predict_batch(const TrainedModel& model, const Eigen::MatrixXd& inputs,
                              const Eigen::MatrixXd& queries);

} // namespace rbon

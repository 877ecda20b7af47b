#include "rbon/operator_model.hpp"

#include <cmath>
#include <string>

#include "rbon/digest.hpp"
#include "rbon/errors.hpp"
#include "rbon/fourier.hpp"
#include "rbon/kmeans.hpp"
#include "rbon/model_io.hpp"

namespace rbon {

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::RBON: return "rbon";
    case Variant::NRBON: return "nrbon";
    case Variant::F_RBON: return "f-rbon";
    }
    return "?";
}

Variant parse_variant(std::string_view name)
{
    if (name == "rbon" || name == "RBON")
        return Variant::RBON;
    if (name == "nrbon" || name == "NRBON")
        return Variant::NRBON;
    if (name == "f-rbon" || name == "F-RBON" || name == "frbon" || name == "f_rbon")
        return Variant::F_RBON;
    throw PreconditionError("unknown variant '" + std::string(name) + "' (expected rbon, nrbon or f-rbon)");
}

std::string_view to_string(WeightSolver s)
{
    return s == WeightSolver::Pooled ? "pooled" : "per-query-average";
}

WeightSolver parse_weight_solver(std::string_view name)
{
    if (name == "pooled")
        return WeightSolver::Pooled;
    if (name == "per-query-average")
        return WeightSolver::PerQueryAverage;
    throw PreconditionError("unknown weight solver '" + std::string(name) + "'");
}

void TrainingSet::validate(Eigen::Index min_functions) const
{
    if (inputs.rows() < min_functions)
        throw PreconditionError("training set needs at least " + std::to_string(min_functions) +
                                " input functions, got " + std::to_string(inputs.rows()));
    if (inputs.cols() < 1)
        throw DimensionError("training set has no sensor samples");
    if (queries.rows() < 1 || queries.cols() < 1)
        throw DimensionError("training set has no query points");
    if (targets.rows() != inputs.rows() || targets.cols() != queries.rows())
        throw DimensionError("targets must be " + std::to_string(inputs.rows()) + " x " +
                             std::to_string(queries.rows()) + ", got " + std::to_string(targets.rows()) + " x " +
                             std::to_string(targets.cols()));
    if (!inputs.allFinite() || !queries.allFinite())
        throw NonFiniteError("training set inputs or queries contain non-finite values");
    if (!targets.allFinite())
        throw NonFiniteError("training set targets contain non-finite values");
}

TrainedModel::TrainedModel(Variant variant, BranchLayer branch, RbfLayer<double> trunk, Eigen::VectorXd weights,
                           Calibration calibration, Eigen::Index sensor_count, std::uint64_t seed,
                           std::string config_hash, TrainingReport report)
    : variant_(variant), branch_(std::move(branch)), trunk_(std::move(trunk)), weights_(std::move(weights)),
      calibration_(calibration), sensor_count_(sensor_count), seed_(seed), config_hash_(std::move(config_hash)),
      report_(report)
{
    const bool complex_branch = std::holds_alternative<RbfLayer<cdouble>>(branch_);
    if (complex_branch != (variant_ == Variant::F_RBON))
        throw PreconditionError("TrainedModel: F-RBON needs a complex branch, other variants a real one");
    const Eigen::Index bdim = std::visit([](const auto& l) { return l.input_dim(); }, branch_);
    if (bdim != sensor_count_)
        throw DimensionError("TrainedModel: branch input dimension differs from the sensor count");
    if (weights_.size() != branch_units() * trunk_units())
        throw DimensionError("TrainedModel: weight vector length must equal M*N");
    if (!weights_.allFinite() || !std::isfinite(calibration_.scale) || !std::isfinite(calibration_.offset))
        throw NonFiniteError("TrainedModel: non-finite parameters");
}

Eigen::Index TrainedModel::branch_units() const
{
    return std::visit([](const auto& l) { return l.units(); }, branch_);
}

Eigen::Map<const MatrixX<double>> TrainedModel::weight_matrix() const
{
    return {weights_.data(), branch_units(), trunk_units()};
}

namespace {

struct FittedLayer {
    Eigen::MatrixXd centers;
    Eigen::VectorXd spreads;
    double wcss = 0.0;
};

Eigen::MatrixXd branch_points_of(const TrainingSet& data, Variant variant)
{
    if (variant == Variant::F_RBON)
        return embed_complex_rows(to_frequency_domain_rows(data.inputs));
    return data.inputs;
}

FittedLayer fit_centers(const Eigen::MatrixXd& points, int units, const std::optional<Eigen::MatrixXd>& manual,
                        const ModelConfig& config, std::uint64_t seed)
{
    FittedLayer out;
    if (manual) {
        if (manual->cols() != points.cols())
            throw DimensionError("manual centers have dimension " + std::to_string(manual->cols()) +
                                 ", inputs have " + std::to_string(points.cols()));
        out.centers = *manual;
    } else if (points.rows() < 2) {
        out.centers = points;
    } else {
        ClusterConfig cc;
        cc.k = units;
        cc.restarts = config.restarts;
        cc.max_iterations = config.max_iterations;
        cc.convergence_tol = config.convergence_tol;
        cc.seed = seed;
        ClusterResult res = kmeans(points, cc);
        out.centers = std::move(res.centers);
        out.wcss = res.wcss;
    }
    return out;
}

FittedLayer fit_layer(const Eigen::MatrixXd& points, int units, double overlap,
                      const std::optional<Eigen::MatrixXd>& manual, const ModelConfig& config,
                      std::uint64_t seed)
{
    FittedLayer out = fit_centers(points, units, manual, config, seed);
    if (points.rows() < 2 && !manual)
        out.spreads = Eigen::VectorXd::Ones(out.centers.rows());
    else
        out.spreads = compute_spreads(out.centers, overlap, points);
    return out;
}

constexpr std::uint64_t kTrunkSeedMix = 0x9e3779b97f4a7c15ULL;

void check_size(const ModelConfig& c)
{
    if (c.branch_units < 1 || c.trunk_units < 1)
        throw PreconditionError("layer widths must be at least 1");
    if (c.enforce_size_cap &&
        (c.branch_units > kMaxUnitsPerLayer || c.trunk_units > kMaxUnitsPerLayer ||
         c.branch_units * c.trunk_units > kMaxHiddenProducts))
        throw PreconditionError("layer widths " + std::to_string(c.branch_units) + " x " +
                                std::to_string(c.trunk_units) + " exceed the 15-unit / 225-product cap");
}

void require_nondegenerate(const Eigen::MatrixXd& F, const char* layer)
{
    if (!(F.maxCoeff() > kDegenerateFeatureSum))
        throw DegenerateFeatureError(std::string("every ") + layer + " feature vanished on the training data");
}

// Dot product of the weights with the (optionally normalized) feature product.
double evaluate_raw(const TrainedModel& model, const Eigen::VectorXd& b, const Eigen::VectorXd& t)
{
    Eigen::VectorXd f = feature_product(b, t);
    if (model.variant() == Variant::NRBON)
        f = normalize_features(f);
    return model.weights().dot(f);
}

} // namespace

TrainedModel train(const TrainingSet& data, const ModelConfig& config)
{
    data.validate(2);
    check_size(config);

    const std::uint64_t branch_seed = config.seed;
    const std::uint64_t trunk_seed = config.seed ^ kTrunkSeedMix;

    // Branch points live in R^m, or R^{2m} (interleaved re/im) for F-RBON.
    MatrixX<cdouble> spectra;
    Eigen::MatrixXd branch_points;
    if (config.variant == Variant::F_RBON) {
        spectra = to_frequency_domain_rows(data.inputs);
        branch_points = embed_complex_rows(spectra);
    } else {
        branch_points = data.inputs;
    }

    FittedLayer fb = fit_layer(branch_points, config.branch_units, config.branch_overlap,
                               config.manual_branch_centers, config, branch_seed);
    FittedLayer ft = fit_layer(data.queries, config.trunk_units, config.trunk_overlap, config.manual_trunk_centers,
                               config, trunk_seed);

    RbfLayer<double> trunk(ft.centers, ft.spreads);
    Eigen::MatrixXd T = layer_features_rows(trunk, data.queries);

    BranchLayer branch;
    Eigen::MatrixXd B;
    if (config.variant == Variant::F_RBON) {
        RbfLayer<cdouble> layer(unembed_complex_rows(fb.centers), fb.spreads);
        B = layer_features_rows(layer, spectra);
        branch = std::move(layer);
    } else {
        RbfLayer<double> layer(fb.centers, fb.spreads);
        B = layer_features_rows(layer, data.inputs);
        branch = std::move(layer);
    }

    if (config.variant == Variant::NRBON) {
        // sum(b (x) t) = sum(b) sum(t), so normalizing each factor normalizes the product.
        B = normalize_feature_rows(B);
        T = normalize_feature_rows(T);
    } else {
        require_nondegenerate(B, "branch");
        require_nondegenerate(T, "trunk");
    }

    const Eigen::MatrixXd Xi = config.solver == WeightSolver::Pooled
                                   ? min_norm_separable_lstsq(B, T, data.targets)
                                   : per_query_averaged_lstsq(B, T, data.targets);

    const Eigen::MatrixXd raw = B * Xi * T.transpose();
    const Calibration cal = fit_calibration(raw.reshaped(), data.targets.reshaped());

    TrainingReport report;
    report.branch_wcss = fb.wcss;
    report.trunk_wcss = ft.wcss;
    const Eigen::MatrixXd fitted = (cal.scale * raw.array() + cal.offset).matrix();
    report.max_abs_residual = (fitted - data.targets).cwiseAbs().maxCoeff();
    double rel = 0.0;
    Eigen::Index counted = 0;
    for (Eigen::Index j = 0; j < data.targets.rows(); ++j) {
        const double denom = data.targets.row(j).norm();
        if (denom > 0.0) {
            rel += (fitted.row(j) - data.targets.row(j)).norm() / denom;
            ++counted;
        }
    }
    report.mean_relative_l2 = counted ? rel / static_cast<double>(counted) : 0.0;

    Eigen::VectorXd weights(Xi.size());
    Eigen::Map<MatrixX<double>>(weights.data(), Xi.rows(), Xi.cols()) = Xi;

    return TrainedModel(config.variant, std::move(branch), std::move(trunk), std::move(weights), cal,
                        data.sensors(), config.seed, sha256_hex(config_to_json(config).dump()).substr(0, 16),
                        report);
}

Eigen::MatrixXd fit_branch_centers(const TrainingSet& data, const ModelConfig& config)
{
    data.validate(2);
    check_size(config);
    return fit_centers(branch_points_of(data, config.variant), config.branch_units, config.manual_branch_centers,
                       config, config.seed)
        .centers;
}

Eigen::MatrixXd fit_trunk_centers(const TrainingSet& data, const ModelConfig& config)
{
    data.validate(2);
    check_size(config);
    return fit_centers(data.queries, config.trunk_units, config.manual_trunk_centers, config,
                       config.seed ^ kTrunkSeedMix)
        .centers;
}

Eigen::VectorXd branch_features(const TrainedModel& model, const Eigen::VectorXd& u)
{
    if (u.size() != model.sensor_count())
        throw DimensionError("input function has " + std::to_string(u.size()) + " samples, model expects " +
                             std::to_string(model.sensor_count()));
    if (const auto* complex_layer = std::get_if<RbfLayer<cdouble>>(&model.branch()))
        return layer_features(*complex_layer, to_frequency_domain(u));
    return layer_features(std::get<RbfLayer<double>>(model.branch()), u);
}

double predict_raw(const TrainedModel& model, const Eigen::VectorXd& u, const Eigen::VectorXd& y)
{
    const Eigen::VectorXd b = branch_features(model, u);
    return evaluate_raw(model, b, layer_features(model.trunk(), y));
}

double predict(const TrainedModel& model, const Eigen::VectorXd& u, const Eigen::VectorXd& y)
{
    return model.calibration()(predict_raw(model, u, y));
}

Eigen::VectorXd predict_field(const TrainedModel& model, const Eigen::VectorXd& u, const Eigen::MatrixXd& queries)
{
    if (queries.cols() != model.query_dim())
        throw DimensionError("queries have dimension " + std::to_string(queries.cols()) + ", model expects " +
                             std::to_string(model.query_dim()));
    const Eigen::VectorXd b = branch_features(model, u);
    Eigen::VectorXd out(queries.rows());
    for (Eigen::Index l = 0; l < queries.rows(); ++l) {
        const Eigen::VectorXd y = queries.row(l).transpose();
        out(l) = model.calibration()(evaluate_raw(model, b, layer_features(model.trunk(), y)));
    }
    return out;
}

Eigen::MatrixXd predict_batch(const TrainedModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& queries)
{
    if (inputs.cols() != model.sensor_count())
        throw DimensionError("inputs have " + std::to_string(inputs.cols()) + " samples, model expects " +
                             std::to_string(model.sensor_count()));
    if (queries.cols() != model.query_dim())
        throw DimensionError("queries have dimension " + std::to_string(queries.cols()) + ", model expects " +
                             std::to_string(model.query_dim()));
    Eigen::MatrixXd B;
    if (const auto* complex_layer = std::get_if<RbfLayer<cdouble>>(&model.branch()))
        B = layer_features_rows(*complex_layer, to_frequency_domain_rows(inputs));
    else
        B = layer_features_rows(std::get<RbfLayer<double>>(model.branch()), inputs);
    Eigen::MatrixXd T = layer_features_rows(model.trunk(), queries);
    if (model.variant() == Variant::NRBON) {
        B = normalize_feature_rows(B);
        T = normalize_feature_rows(T);
    }
    const Eigen::MatrixXd raw = B * model.weight_matrix() * T.transpose();
    return (model.calibration().scale * raw.array() + model.calibration().offset).matrix();
}

} // namespace rbon

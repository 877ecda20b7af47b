#include "rbon/model_io.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "rbon/errors.hpp"

namespace rbon {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = j.at(r).get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw CorruptFileError("model file: ragged matrix row");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

json config_to_json(const ModelConfig& c)
{
    json j = {
        {"variant", to_string(c.variant)},
        {"branch_units", c.branch_units},
        {"trunk_units", c.trunk_units},
        {"branch_overlap", c.branch_overlap},
        {"trunk_overlap", c.trunk_overlap},
        {"restarts", c.restarts},
        {"max_iterations", c.max_iterations},
        {"convergence_tol", c.convergence_tol},
        {"seed", c.seed},
        {"solver", to_string(c.solver)},
        {"enforce_size_cap", c.enforce_size_cap},
    };
    if (c.manual_branch_centers)
        j["manual_branch_centers"] = matrix_to_json(*c.manual_branch_centers);
    if (c.manual_trunk_centers)
        j["manual_trunk_centers"] = matrix_to_json(*c.manual_trunk_centers);
    return j;
}

ModelConfig config_from_json(const json& j)
{
    ModelConfig c;
    if (j.contains("variant"))
        c.variant = parse_variant(j.at("variant").get<std::string>());
    c.branch_units = j.value("branch_units", c.branch_units);
    c.trunk_units = j.value("trunk_units", c.trunk_units);
    c.branch_overlap = j.value("branch_overlap", c.branch_overlap);
    c.trunk_overlap = j.value("trunk_overlap", c.trunk_overlap);
    c.restarts = j.value("restarts", c.restarts);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
    c.seed = j.value("seed", c.seed);
    if (j.contains("solver"))
        c.solver = parse_weight_solver(j.at("solver").get<std::string>());
    c.enforce_size_cap = j.value("enforce_size_cap", c.enforce_size_cap);
    auto centers = [&](const char* key) -> std::optional<Eigen::MatrixXd> {
        if (!j.contains(key) || j.at(key).empty())
            return std::nullopt;
        return matrix_from_json(j.at(key), static_cast<Eigen::Index>(j.at(key).at(0).size()));
    };
    c.manual_branch_centers = centers("manual_branch_centers");
    c.manual_trunk_centers = centers("manual_trunk_centers");
    return c;
}

json model_to_json(const TrainedModel& model)
{
    json branch;
    if (const auto* cl = std::get_if<RbfLayer<cdouble>>(&model.branch())) {
        branch["centers_re"] = matrix_to_json(cl->centers.real());
        branch["centers_im"] = matrix_to_json(cl->centers.imag());
        branch["spreads"] = vector_to_json(cl->spreads);
    } else {
        const auto& rl = std::get<RbfLayer<double>>(model.branch());
        branch["centers"] = matrix_to_json(rl.centers);
        branch["spreads"] = vector_to_json(rl.spreads);
    }
    const auto& rep = model.report();
    return {
        {"format", "rbon-model"},
        {"format_version", kModelFormatVersion},
        {"variant", to_string(model.variant())},
        {"m", model.sensor_count()},
        {"d", model.query_dim()},
        {"M", model.branch_units()},
        {"N", model.trunk_units()},
        {"branch", branch},
        {"trunk", {{"centers", matrix_to_json(model.trunk().centers)}, {"spreads", vector_to_json(model.trunk().spreads)}}},
        {"weights", vector_to_json(model.weights())},
        {"calibration", {{"scale", model.calibration().scale}, {"offset", model.calibration().offset}}},
        {"seed", model.seed()},
        {"config_hash", model.config_hash()},
        {"report",
         {{"max_abs_residual", rep.max_abs_residual},
          {"mean_relative_l2", rep.mean_relative_l2},
          {"branch_wcss", rep.branch_wcss},
          {"trunk_wcss", rep.trunk_wcss}}},
    };
}

TrainedModel model_from_json(const json& j)
{
    try {
        if (j.value("format", std::string{}) != "rbon-model")
            throw CorruptFileError("not an rbon model file");
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw VersionMismatchError("model format version " + std::to_string(version) +
                                       " is not supported (this build reads version " +
                                       std::to_string(kModelFormatVersion) + ")");
        const Variant variant = parse_variant(j.at("variant").get<std::string>());
        const auto m = j.at("m").get<Eigen::Index>();
        const auto d = j.at("d").get<Eigen::Index>();
        const json& jb = j.at("branch");

        BranchLayer branch;
        if (variant == Variant::F_RBON) {
            const Eigen::MatrixXd re = matrix_from_json(jb.at("centers_re"), m);
            const Eigen::MatrixXd im = matrix_from_json(jb.at("centers_im"), m);
            if (re.rows() != im.rows())
                throw CorruptFileError("model file: real and imaginary center counts differ");
            MatrixX<cdouble> c(re.rows(), m);
            c.real() = re;
            c.imag() = im;
            branch = RbfLayer<cdouble>(std::move(c), vector_from_json(jb.at("spreads")));
        } else {
            branch = RbfLayer<double>(matrix_from_json(jb.at("centers"), m), vector_from_json(jb.at("spreads")));
        }
        RbfLayer<double> trunk(matrix_from_json(j.at("trunk").at("centers"), d),
                               vector_from_json(j.at("trunk").at("spreads")));
        const json& jc = j.at("calibration");
        TrainingReport rep;
        if (j.contains("report")) {
            const json& jr = j.at("report");
            rep.max_abs_residual = jr.value("max_abs_residual", 0.0);
            rep.mean_relative_l2 = jr.value("mean_relative_l2", 0.0);
            rep.branch_wcss = jr.value("branch_wcss", 0.0);
            rep.trunk_wcss = jr.value("trunk_wcss", 0.0);
        }
        return TrainedModel(variant, std::move(branch), std::move(trunk), vector_from_json(j.at("weights")),
                            Calibration{jc.at("scale").get<double>(), jc.at("offset").get<double>()}, m,
                            j.value("seed", std::uint64_t{0}), j.value("config_hash", std::string{}), rep);
    } catch (const json::exception& e) {
        throw CorruptFileError(std::string("model file: ") + e.what());
    } catch (const DimensionError& e) {
        throw CorruptFileError(std::string("model file: ") + e.what());
    } catch (const PreconditionError& e) {
        throw CorruptFileError(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, std::ostream& out)
{
    out << model_to_json(model).dump(1) << '\n';
    if (!out)
        throw Error("save_model: write failed");
}

void save_model(const TrainedModel& model, const std::filesystem::path& destination)
{
    std::ofstream out(destination);
    if (!out)
        throw Error("save_model: cannot open " + destination.string());
    save_model(model, out);
}

TrainedModel load_model(std::istream& in)
{
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw CorruptFileError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
}

TrainedModel load_model(const std::filesystem::path& source)
{
    std::ifstream in(source);
    if (!in)
        throw Error("load_model: cannot open " + source.string());
    return load_model(in);
}

} // namespace rbon

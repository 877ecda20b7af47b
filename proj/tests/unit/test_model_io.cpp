#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "rbon/errors.hpp"
#include "rbon/model_io.hpp"

using namespace rbon;

namespace {

TrainingSet small_family()
{
    TrainingSet d;
    const int J = 16, m = 9, L = 12;
    d.inputs.resize(J, m);
    d.queries.resize(L, 2);
    d.targets.resize(J, L);
    for (int l = 0; l < L; ++l)
        d.queries.row(l) << (l % 4) / 3.0, (l / 4) / 2.0;
    for (int j = 0; j < J; ++j) {
        const double a = 0.5 + 0.3 * j;
        for (int s = 0; s < m; ++s)
            d.inputs(j, s) = std::sin(a * std::numbers::pi * s / (m - 1));
        for (int l = 0; l < L; ++l)
            d.targets(j, l) = std::cos(a * d.queries(l, 0)) * (1.0 + d.queries(l, 1));
    }
    return d;
}

TrainedModel trained(Variant v)
{
    ModelConfig cfg;
    cfg.variant = v;
    cfg.branch_units = 5;
    cfg.trunk_units = 4;
    cfg.branch_overlap = 1.7;
    cfg.seed = 12;
    return train(small_family(), cfg);
}

} // namespace

TEST(ModelIo, RoundTripPredictsBitIdentically)
{
    const TrainingSet d = small_family();
    for (Variant v : {Variant::RBON, Variant::NRBON, Variant::F_RBON}) {
        const TrainedModel model = trained(v);
        std::stringstream buf;
        save_model(model, buf);
        const TrainedModel back = load_model(buf);
        EXPECT_EQ(back.variant(), v);
        EXPECT_EQ(back.weights(), model.weights());
        EXPECT_EQ(back.seed(), model.seed());
        EXPECT_EQ(back.config_hash(), model.config_hash());
        for (Eigen::Index j = 0; j < d.functions(); ++j)
            for (Eigen::Index l = 0; l < d.query_count(); ++l) {
                const Eigen::VectorXd u = d.inputs.row(j).transpose() * 1.1;
                const Eigen::VectorXd y = d.queries.row(l).transpose();
                EXPECT_EQ(predict(back, u, y), predict(model, u, y));
            }
    }
}

TEST(ModelIo, FileRoundTrip)
{
    const auto path = std::filesystem::temp_directory_path() / "rbon_model_io_test.json";
    const TrainedModel model = trained(Variant::F_RBON);
    save_model(model, path);
    const TrainedModel back = load_model(path);
    const TrainingSet d = small_family();
    EXPECT_EQ(predict_batch(back, d.inputs, d.queries), predict_batch(model, d.inputs, d.queries));
    std::filesystem::remove(path);
}

TEST(ModelIo, FrbonRecordsComplexCenters)
{
    const nlohmann::json j = model_to_json(trained(Variant::F_RBON));
    EXPECT_TRUE(j.at("branch").contains("centers_re"));
    EXPECT_TRUE(j.at("branch").contains("centers_im"));
    EXPECT_EQ(j.at("variant"), "f-rbon");
}

TEST(ModelIo, CorruptInputRejected)
{
    std::stringstream garbage("{ not json");
    EXPECT_THROW(load_model(garbage), CorruptFileError);

    nlohmann::json j = model_to_json(trained(Variant::RBON));
    j.erase("weights");
    std::stringstream missing(j.dump());
    EXPECT_THROW(load_model(missing), CorruptFileError);

    j = model_to_json(trained(Variant::RBON));
    j["weights"] = nlohmann::json::array({1.0, 2.0});
    std::stringstream short_weights(j.dump());
    EXPECT_ANY_THROW(load_model(short_weights));

    j = model_to_json(trained(Variant::RBON));
    j["format"] = "something-else";
    std::stringstream wrong_format(j.dump());
    EXPECT_THROW(load_model(wrong_format), CorruptFileError);

    EXPECT_ANY_THROW(load_model(std::filesystem::path("/nonexistent/model.json")));
}

TEST(ModelIo, UnknownVersionRejected)
{
    nlohmann::json j = model_to_json(trained(Variant::NRBON));
    j["format_version"] = kModelFormatVersion + 1;
    std::stringstream buf(j.dump());
    EXPECT_THROW(load_model(buf), VersionMismatchError);
}

TEST(ModelIo, ConfigRoundTrip)
{
    ModelConfig c;
    c.variant = Variant::NRBON;
    c.branch_units = 7;
    c.trunk_overlap = 2.5;
    c.solver = WeightSolver::PerQueryAverage;
    c.seed = 99;
    Eigen::MatrixXd tc(2, 1);
    tc << 0.25, 0.75;
    c.manual_trunk_centers = tc;
    const ModelConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(back.variant, c.variant);
    EXPECT_EQ(back.branch_units, 7);
    EXPECT_EQ(back.trunk_overlap, 2.5);
    EXPECT_EQ(back.solver, WeightSolver::PerQueryAverage);
    EXPECT_EQ(back.seed, 99u);
    ASSERT_TRUE(back.manual_trunk_centers.has_value());
    EXPECT_EQ(*back.manual_trunk_centers, tc);
    EXPECT_FALSE(back.manual_branch_centers.has_value());
}

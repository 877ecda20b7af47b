#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rbon/dataset.hpp"
#include "rbon/digest.hpp"
#include "rbon/errors.hpp"
#include "rbon/harness.hpp"
#include "rbon/model_io.hpp"

#ifndef RBON_DATA_DIR
#define RBON_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rbon;

namespace {

constexpr const char* kConfigEnv = "RBON_CONFIG";
constexpr const char* kToolVersion = "1.0.0";

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "rbon_out";
    std::string format = "table";
    json config = json::object();

    [[nodiscard]] json section(const char* name) const
    {
        return config.contains(name) ? config.at(name) : json::object();
    }
    [[nodiscard]] std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
};

void load_config(Globals& g, bool out_given, bool format_given)
{
    if (g.config_path.empty())
        if (const char* env = std::getenv(kConfigEnv); env && *env)
            g.config_path = env;
    if (g.config_path.empty())
        return;
    std::ifstream in(g.config_path);
    if (!in)
        throw Error("cannot open config file " + g.config_path);
    try {
        g.config = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("config file " + g.config_path + " is not valid JSON: " + e.what());
    }
    if (!g.seed && g.config.contains("seed"))
        g.seed = g.config.at("seed").get<std::uint64_t>();
    if (!out_given && g.config.contains("out"))
        g.out = g.config.at("out").get<std::string>();
    if (!format_given && g.config.contains("format"))
        g.format = g.config.at("format").get<std::string>();
}

BenchmarkConfig dataset_config(Family family, const json& overrides, bool fine_step)
{
    json j = benchmark_config_to_json(BenchmarkConfig::defaults(family));
    if (overrides.is_object())
        j.update(overrides);
    j["family"] = std::string(to_string(family));
    BenchmarkConfig c = benchmark_config_from_json(j);
    if (fine_step && family == Family::Wave)
        c.id_step = 0.001;
    c.validate();
    return c;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& settings, std::uint64_t seed,
                    const json& inputs, const json& artifacts)
{
    const json m = {{"tool", "rbon"},
                    {"tool_version", kToolVersion},
                    {"command", command},
                    {"seed", seed},
                    {"settings", settings},
                    {"inputs", inputs},
                    {"artifacts", artifacts}};
    fs::create_directories(dir);
    std::ofstream out(dir / (command + "_manifest.json"));
    out << m.dump(2) << '\n';
    if (!out)
        throw Error("cannot write manifest in " + dir.string());
}

std::string table_or_csv(const Globals& g, const std::vector<std::vector<std::string>>& rows)
{
    std::ostringstream out;
    if (g.format == "csv") {
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << (i ? "," : "") << r[i];
            out << '\n';
        }
        return out.str();
    }
    std::vector<std::size_t> w(rows.front().size(), 0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i)
            w[i] = std::max(w[i], r[i].size());
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << r[i] << (i + 1 < r.size() ? std::string(w[i] - r[i].size() + 2, ' ') : "");
        out << '\n';
    }
    return out.str();
}

std::string fmt(double v)
{
    return format_sci(v);
}

// ---- generate --------------------------------------------------------------

struct GenerateOpts {
    std::string family;
    bool fine_step = false;
};

int cmd_generate(const Globals& g, const GenerateOpts& o)
{
    const json sec = g.section("generate");
    std::string family = o.family;
    if (family.empty())
        family = sec.value("family", std::string{});
    if (family.empty())
        throw PreconditionError("generate: --family is required");
    const Family fam = parse_family(family);
    const BenchmarkConfig cfg =
        dataset_config(fam, sec.value("dataset", json::object()), o.fine_step || sec.value("fine_step", false));
    const std::uint64_t seed = g.seed_or(1);
    const BenchmarkDataset ds = build_benchmark_dataset(cfg, seed);
    const json manifest = write_dataset(g.out, ds);

    json artifacts = json::object();
    std::vector<std::vector<std::string>> rows{{"split", "functions", "file"}};
    for (const auto& [name, info] : manifest.at("splits").items()) {
        artifacts[info.at("file").get<std::string>()] = info.at("sha256");
        rows.push_back({name, std::to_string(info.at("functions").get<std::size_t>()),
                        (fs::path(g.out) / info.at("file").get<std::string>()).string()});
    }
    write_manifest(g.out, "generate", {{"family", family}, {"dataset", benchmark_config_to_json(cfg)}}, seed,
                   json::object(), artifacts);
    std::cout << table_or_csv(g, rows);
    return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainOpts {
    std::string data;
    std::string variant;
    std::optional<int> branch_units, trunk_units;
    std::optional<double> branch_overlap, trunk_overlap;
    std::string solver;
    std::optional<int> restarts;
};

int cmd_train(const Globals& g, const TrainOpts& o)
{
    const json sec = g.section("train");
    const std::string data_dir = !o.data.empty() ? o.data : sec.value("data", std::string{});
    if (data_dir.empty())
        throw PreconditionError("train: --data is required");
    const BenchmarkDataset ds = read_dataset(data_dir);

    ModelConfig base = sec.contains("model") ? config_from_json(sec.at("model")) : ModelConfig{};
    if (!o.variant.empty())
        base.variant = parse_variant(o.variant);
    base.seed = g.seed_or(base.seed ? base.seed : 1);
    if (!o.solver.empty())
        base.solver = parse_weight_solver(o.solver);
    if (o.restarts)
        base.restarts = *o.restarts;
    SweepGrid grid = sec.contains("sweep") ? sweep_grid_from_json(sec.at("sweep")) : SweepGrid{};
    const bool fixed = o.branch_units && o.trunk_units;
    if (o.branch_units)
        grid.branch_units = {*o.branch_units};
    if (o.trunk_units)
        grid.trunk_units = {*o.trunk_units};
    if (o.branch_overlap)
        grid.branch_overlaps = {*o.branch_overlap};
    if (o.trunk_overlap)
        grid.trunk_overlaps = {*o.trunk_overlap};

    const Selection sel = select_model(ds.train.data, ds.validation.data, base, grid);
    const ErrorSummary tr = evaluate(sel.model, ds.train.data);
    const ErrorSummary va = evaluate(sel.model, ds.validation.data);

    json sweep = json::array();
    for (const auto& p : sel.sweep) {
        json e = {{"branch_units", p.branch_units},
                  {"trunk_units", p.trunk_units},
                  {"branch_overlap", p.branch_overlap},
                  {"trunk_overlap", p.trunk_overlap}};
        if (p.failure.empty())
            e["validation_error"] = p.validation_error;
        else
            e["failure"] = p.failure;
        sweep.push_back(e);
    }
    const json report = {{"variant", to_string(sel.config.variant)},
                         {"family", to_string(ds.config.family)},
                         {"branch_units", sel.model.branch_units()},
                         {"trunk_units", sel.model.trunk_units()},
                         {"branch_overlap", sel.config.branch_overlap},
                         {"trunk_overlap", sel.config.trunk_overlap},
                         {"train_error", tr.mean_error},
                         {"validation_error", va.mean_error},
                         {"validation_moe", va.margin_of_error},
                         {"sizes_from_sweep", !fixed},
                         {"sweep", sweep}};

    const fs::path out(g.out);
    fs::create_directories(out);
    std::ostringstream model_text;
    save_model(sel.model, model_text);
    const std::string model_sha = write_artifact(out, "model.json", model_text.str());
    const std::string report_sha = write_artifact(out, "train_report.json", report.dump(2) + "\n");
    json inputs = json::object();
    if (fs::exists(fs::path(data_dir) / "manifest.json"))
        inputs["dataset_manifest"] = {{"path", (fs::path(data_dir) / "manifest.json").string()},
                                      {"sha256", sha256_file_hex(fs::path(data_dir) / "manifest.json")}};
    write_manifest(out, "train",
                   {{"data", data_dir}, {"model", config_to_json(sel.config)}, {"sweep", sweep_grid_to_json(grid)}},
                   base.seed, inputs, {{"model.json", model_sha}, {"train_report.json", report_sha}});

    std::cout << table_or_csv(g, {{"variant", "M", "N", "overlap", "train_error", "validation_error"},
                                  {std::string(to_string(sel.config.variant)),
                                   std::to_string(sel.model.branch_units()), std::to_string(sel.model.trunk_units()),
                                   fmt(sel.config.branch_overlap) + "/" + fmt(sel.config.trunk_overlap),
                                   fmt(tr.mean_error), format_mean_moe(va)}});
    return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOpts {
    std::string model;
    std::string data;
    std::string split = "all";
};

int cmd_evaluate(const Globals& g, const EvaluateOpts& o)
{
    const json sec = g.section("evaluate");
    const std::string model_path = !o.model.empty() ? o.model : sec.value("model", std::string{});
    const std::string data_dir = !o.data.empty() ? o.data : sec.value("data", std::string{});
    if (model_path.empty() || data_dir.empty())
        throw PreconditionError("evaluate: --model and --data are required");
    const TrainedModel model = load_model(fs::path(model_path));
    const BenchmarkDataset ds = read_dataset(data_dir);

    const std::vector<std::pair<std::string, const DatasetSplit*>> all{
        {"train", &ds.train}, {"validation", &ds.validation}, {"id_test", &ds.id_test}, {"ood_test", &ds.ood_test}};
    std::vector<std::vector<std::string>> rows{{"split", "functions", "mean_error", "moe", "cell"}};
    bool matched = false;
    for (const auto& [name, split] : all) {
        if (o.split != "all" && o.split != name)
            continue;
        matched = true;
        const ErrorSummary s = evaluate(model, split->data);
        rows.push_back({name, std::to_string(s.n), fmt(s.mean_error), fmt(s.margin_of_error),
                        s.n ? format_mean_moe(s) : "-"});
    }
    if (!matched)
        throw PreconditionError("evaluate: unknown split '" + o.split + "'");

    Globals csv = g;
    csv.format = "csv";
    const std::string sha = write_artifact(g.out, "evaluation.csv", table_or_csv(csv, rows));
    write_manifest(g.out, "evaluate", {{"model", model_path}, {"data", data_dir}, {"split", o.split}}, model.seed(),
                   {{"model", {{"path", model_path}, {"sha256", sha256_file_hex(model_path)}}}},
                   {{"evaluation.csv", sha}});
    std::cout << table_or_csv(g, rows);
    return 0;
}

// ---- benchmark -------------------------------------------------------------

struct BenchmarkOpts {
    std::string families;
    std::string variants;
    std::string seeds;
    bool fine_step = false;
    bool quiet = false;
};

int cmd_benchmark(const Globals& g, const BenchmarkOpts& o)
{
    const json sec = g.section("benchmark");
    BenchmarkRun run = benchmark_run_from_json(sec);
    if (!o.families.empty()) {
        run.families.clear();
        for (const auto& f : split_list(o.families))
            run.families.push_back(parse_family(f));
    }
    if (!o.variants.empty()) {
        run.variants.clear();
        for (const auto& v : split_list(o.variants))
            run.variants.push_back(parse_variant(v));
    }
    if (!o.seeds.empty()) {
        run.seeds.clear();
        for (const auto& s : split_list(o.seeds))
            run.seeds.push_back(std::stoull(s));
    } else if (g.seed && !sec.contains("seeds")) {
        const std::size_t n = run.seeds.size();
        run.seeds.clear();
        for (std::size_t i = 0; i < n; ++i)
            run.seeds.push_back(*g.seed + i);
    }
    std::vector<BenchmarkConfig> datasets;
    for (Family f : run.families) {
        json overrides = json::object();
        for (const auto& d : sec.value("datasets", json::array()))
            if (d.value("family", std::string{}) == to_string(f))
                overrides = d;
        datasets.push_back(dataset_config(f, overrides, o.fine_step || sec.value("fine_step", false)));
    }
    run.datasets = datasets;

    const std::vector<CellResult> cells = run_benchmark(run, !o.quiet);
    const std::string csv = benchmark_csv(cells);
    const std::string table = benchmark_table(cells);
    const json artifacts = {{"benchmark.csv", write_artifact(g.out, "benchmark.csv", csv)},
                            {"benchmark.txt", write_artifact(g.out, "benchmark.txt", table)},
                            {"benchmark.json", write_artifact(g.out, "benchmark.json",
                                                              benchmark_results_json(cells).dump(2) + "\n")}};
    write_manifest(g.out, "benchmark", benchmark_run_to_json(run), run.seeds.front(), json::object(), artifacts);
    std::cout << (g.format == "csv" ? csv : table);

    int failed = 0;
    for (const auto& c : cells)
        if (!c.ok) {
            ++failed;
            std::cerr << "failed cell " << to_string(c.family) << '/' << to_string(c.variant) << ": " << c.failure
                      << '\n';
        }
    return failed ? 1 : 0;
}

// ---- forecast --------------------------------------------------------------

struct ForecastOpts {
    std::string co2;
    std::string global;
    std::string local;
    std::string holdouts;
};

int cmd_forecast(const Globals& g, const ForecastOpts& o)
{
    const json sec = g.section("forecast");
    const fs::path base_dir = g.config_path.empty() ? fs::path{} : fs::path(g.config_path).parent_path();
    ForecastRun run = forecast_run_from_json(sec, base_dir);
    const fs::path fixtures = fs::path(RBON_DATA_DIR) / "fixtures";
    bool defaults_used = false;
    if (!o.co2.empty())
        run.co2_file = o.co2;
    else if (run.co2_file.empty()) {
        run.co2_file = fixtures / "co2_mm_mlo_surrogate.csv";
        defaults_used = true;
    }
    auto set_target = [&](const std::string& name, const std::string& path, const char* fixture) {
        auto it = std::find_if(run.targets.begin(), run.targets.end(),
                               [&](const ForecastTarget& t) { return t.name == name; });
        if (!path.empty()) {
            if (it == run.targets.end())
                run.targets.push_back({name, path});
            else
                it->file = path;
        } else if (!sec.contains("targets")) {
            run.targets.push_back({name, fixtures / fixture});
            defaults_used = true;
        }
    };
    set_target("global", o.global, "global_temperature_surrogate.csv");
    set_target("local", o.local, "local_temperature_surrogate.csv");
    if (!o.holdouts.empty()) {
        run.holdouts.clear();
        for (const auto& h : split_list(o.holdouts))
            run.holdouts.push_back(std::stoi(h));
    }
    run.base.seed = g.seed_or(run.base.seed ? run.base.seed : 1);
    run.surrogate = run.surrogate || defaults_used;

    const std::vector<ForecastResult> results = run_forecasts(run);
    json artifacts = json::object();
    for (const auto& r : results) {
        std::ostringstream rows;
        write_forecast_csv(rows, r.rows);
        const std::string name = "forecast_" + r.target + "_" + std::to_string(r.holdout) + "y.csv";
        artifacts[name] = write_artifact(g.out, name, rows.str());
    }
    const std::string csv = forecast_csv(results, run.surrogate);
    const std::string table = forecast_table(results, run.surrogate);
    artifacts["forecast.csv"] = write_artifact(g.out, "forecast.csv", csv);
    artifacts["forecast.txt"] = write_artifact(g.out, "forecast.txt", table);
    json inputs = {{"co2", {{"path", run.co2_file.string()}, {"sha256", sha256_file_hex(run.co2_file)}}}};
    for (const auto& t : run.targets)
        inputs[t.name] = {{"path", t.file.string()}, {"sha256", sha256_file_hex(t.file)}};
    write_manifest(g.out, "forecast", forecast_run_to_json(run), run.base.seed, inputs, artifacts);
    std::cout << (g.format == "csv" ? csv : table);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Radial basis operator networks: data generation, training, evaluation, benchmarks and forecasts"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config_path, std::string("JSON run configuration (default: $") + kConfigEnv + ")");
    auto* seed_opt = app.add_option("--seed", seed, "Random seed");
    auto* out_opt = app.add_option("--out", g.out, "Output directory");
    auto* format_opt =
        app.add_option("--format", g.format, "Report format on stdout")->check(CLI::IsMember({"csv", "table"}));

    GenerateOpts gen;
    auto* c_gen = app.add_subcommand("generate", "Generate a benchmark dataset");
    c_gen->add_option("--family", gen.family, "wave, burgers or beam")
        ->check(CLI::IsMember({"wave", "burgers", "beam"}));
    c_gen->add_flag("--fine-step", gen.fine_step, "Wave ID step 0.001 instead of 0.01");

    TrainOpts tr;
    auto* c_train = app.add_subcommand("train", "Train a model on a generated dataset");
    c_train->add_option("--data", tr.data, "Dataset directory");
    c_train->add_option("--variant", tr.variant, "rbon, nrbon or f-rbon")
        ->check(CLI::IsMember({"rbon", "nrbon", "f-rbon"}));
    c_train->add_option("--branch-units", tr.branch_units, "Branch width M (default: validation sweep)");
    c_train->add_option("--trunk-units", tr.trunk_units, "Trunk width N (default: validation sweep)");
    c_train->add_option("--branch-overlap", tr.branch_overlap, "Branch spread factor");
    c_train->add_option("--trunk-overlap", tr.trunk_overlap, "Trunk spread factor");
    c_train->add_option("--solver", tr.solver, "pooled or per-query-average")
        ->check(CLI::IsMember({"pooled", "per-query-average"}));
    c_train->add_option("--restarts", tr.restarts, "K-means restarts");

    EvaluateOpts ev;
    auto* c_eval = app.add_subcommand("evaluate", "Score a saved model on dataset splits");
    c_eval->add_option("--model", ev.model, "Model file");
    c_eval->add_option("--data", ev.data, "Dataset directory");
    c_eval->add_option("--split", ev.split, "all, train, validation, id_test or ood_test");

    BenchmarkOpts bm;
    auto* c_bench = app.add_subcommand("benchmark", "Run the family x variant benchmark table");
    c_bench->add_option("--families", bm.families, "Comma-separated families");
    c_bench->add_option("--variants", bm.variants, "Comma-separated variants");
    c_bench->add_option("--seeds", bm.seeds, "Comma-separated seeds (default: 5 seeds from --seed)");
    c_bench->add_flag("--fine-step", bm.fine_step, "Wave ID step 0.001 instead of 0.01");
    c_bench->add_flag("--quiet", bm.quiet, "No per-seed progress on stderr");

    ForecastOpts fc;
    auto* c_fc = app.add_subcommand("forecast", "CO2 to temperature holdout forecasts");
    c_fc->add_option("--co2", fc.co2, "Monthly CO2 CSV (Mauna Loa layout)");
    c_fc->add_option("--global", fc.global, "Global temperature CSV");
    c_fc->add_option("--local", fc.local, "Local temperature CSV");
    c_fc->add_option("--holdouts", fc.holdouts, "Comma-separated holdout years (default 2,5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (seed_opt->count())
            g.seed = seed;
        load_config(g, out_opt->count() > 0, format_opt->count() > 0);
        if (g.format != "csv" && g.format != "table")
            throw PreconditionError("format must be csv or table");
        if (c_gen->parsed())
            return cmd_generate(g, gen);
        if (c_train->parsed())
            return cmd_train(g, tr);
        if (c_eval->parsed())
            return cmd_evaluate(g, ev);
        if (c_bench->parsed())
            return cmd_benchmark(g, bm);
        if (c_fc->parsed())
            return cmd_forecast(g, fc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

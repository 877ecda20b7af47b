#include "rbon/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "rbon/digest.hpp"
#include "rbon/errors.hpp"
#include "rbon/model_io.hpp"

namespace rbon {

using nlohmann::json;

std::vector<double> field_errors(const TrainedModel& model, const TrainingSet& split)
{
    if (split.functions() == 0)
        return {};
    const Eigen::MatrixXd pred = predict_batch(model, split.inputs, split.queries);
    std::vector<double> out(static_cast<std::size_t>(split.functions()));
    for (Eigen::Index j = 0; j < split.functions(); ++j)
        out[static_cast<std::size_t>(j)] =
            l2_relative_error(split.targets.row(j).transpose(), pred.row(j).transpose());
    return out;
}

namespace {

ErrorSummary summarize(const std::vector<double>& errors)
{
    if (errors.size() >= 2)
        return mean_and_moe(errors);
    ErrorSummary s;
    s.n = static_cast<int>(errors.size());
    s.per_function_errors = errors;
    s.mean_error = errors.empty() ? std::numeric_limits<double>::quiet_NaN() : errors.front();
    s.margin_of_error = std::numeric_limits<double>::quiet_NaN();
    return s;
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool exceeds_cap(const ModelConfig& c, int m, int n)
{
    return c.enforce_size_cap && (m > kMaxUnitsPerLayer || n > kMaxUnitsPerLayer || m * n > kMaxHiddenProducts);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

ErrorSummary evaluate(const TrainedModel& model, const TrainingSet& split)
{
    return summarize(field_errors(model, split));
}

json sweep_grid_to_json(const SweepGrid& g)
{
    return {{"branch_units", g.branch_units},
            {"trunk_units", g.trunk_units},
            {"branch_overlaps", g.branch_overlaps},
            {"trunk_overlaps", g.trunk_overlaps}};
}

SweepGrid sweep_grid_from_json(const json& j)
{
    SweepGrid g;
    g.branch_units = j.value("branch_units", g.branch_units);
    g.trunk_units = j.value("trunk_units", g.trunk_units);
    g.branch_overlaps = j.value("branch_overlaps", g.branch_overlaps);
    g.trunk_overlaps = j.value("trunk_overlaps", g.trunk_overlaps);
    if (g.branch_units.empty() || g.trunk_units.empty() || g.branch_overlaps.empty() || g.trunk_overlaps.empty())
        throw PreconditionError("sweep grid lists must be non-empty");
    return g;
}

Selection select_model(const TrainingSet& train_set, const TrainingSet& validation, const ModelConfig& base,
                       const SweepGrid& grid)
{
    train_set.validate(2);
    validation.validate(1);

    std::map<int, Eigen::MatrixXd> branch_centers, trunk_centers;
    std::map<int, std::string> branch_fail, trunk_fail;
    auto centers = [&](bool branch, int units) -> const Eigen::MatrixXd* {
        auto& cache = branch ? branch_centers : trunk_centers;
        auto& fails = branch ? branch_fail : trunk_fail;
        if (auto it = cache.find(units); it != cache.end())
            return &it->second;
        if (fails.count(units))
            return nullptr;
        ModelConfig c = base;
        c.enforce_size_cap = false;
        c.branch_units = c.trunk_units = units;
        try {
            return &(cache[units] = branch ? fit_branch_centers(train_set, c) : fit_trunk_centers(train_set, c));
        } catch (const Error& e) {
            fails[units] = e.what();
            return nullptr;
        }
    };

    std::vector<SweepPoint> sweep;
    for (int m : grid.branch_units)
        for (int n : grid.trunk_units)
            for (double ob : grid.branch_overlaps)
                for (double ot : grid.trunk_overlaps) {
                    SweepPoint p{m, n, ob, ot, std::numeric_limits<double>::quiet_NaN(), {}};
                    if (exceeds_cap(base, m, n)) {
                        p.failure = "exceeds the size cap";
                        sweep.push_back(p);
                        continue;
                    }
                    const Eigen::MatrixXd* bc = centers(true, m);
                    const Eigen::MatrixXd* tc = centers(false, n);
                    if (!bc || !tc) {
                        p.failure = !bc ? branch_fail[m] : trunk_fail[n];
                        sweep.push_back(p);
                        continue;
                    }
                    ModelConfig c = base;
                    c.branch_units = m;
                    c.trunk_units = n;
                    c.branch_overlap = ob;
                    c.trunk_overlap = ot;
                    c.manual_branch_centers = *bc;
                    c.manual_trunk_centers = *tc;
                    try {
                        const TrainedModel model = train(train_set, c);
                        const double v = mean_of(field_errors(model, validation));
                        if (std::isfinite(v))
                            p.validation_error = v;
                        else
                            p.failure = "non-finite validation error";
                    } catch (const Error& e) {
                        p.failure = e.what();
                    }
                    sweep.push_back(p);
                }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : sweep)
        if (std::isfinite(p.validation_error))
            best = std::min(best, p.validation_error);
    if (!std::isfinite(best)) {
        std::string why = "no sweep configuration trained successfully";
        for (const auto& p : sweep)
            if (!p.failure.empty()) {
                why += " (first failure: " + p.failure + ")";
                break;
            }
        throw Error(why);
    }

    std::vector<const SweepPoint*> order;
    for (const auto& p : sweep)
        if (std::isfinite(p.validation_error))
            order.push_back(&p);
    std::stable_sort(order.begin(), order.end(), [](const SweepPoint* a, const SweepPoint* b) {
        const auto key = [](const SweepPoint* p) {
            return std::make_tuple(p->branch_units * p->trunk_units, p->branch_units, p->branch_overlap,
                                   p->trunk_overlap);
        };
        return key(a) < key(b);
    });
    const SweepPoint* chosen = nullptr;
    for (const SweepPoint* p : order)
        if (p->validation_error <= best * (1.0 + 1e-6)) {
            chosen = p;
            break;
        }

    ModelConfig cfg = base;
    cfg.branch_units = chosen->branch_units;
    cfg.trunk_units = chosen->trunk_units;
    cfg.branch_overlap = chosen->branch_overlap;
    cfg.trunk_overlap = chosen->trunk_overlap;
    cfg.manual_branch_centers.reset();
    cfg.manual_trunk_centers.reset();
    TrainedModel model = train(train_set, cfg);
    return Selection{cfg, std::move(model), chosen->validation_error, std::move(sweep)};
}

// ---- benchmark -------------------------------------------------------------

BenchmarkConfig BenchmarkRun::dataset_for(Family f) const
{
    for (const auto& d : datasets)
        if (d.family == f)
            return d;
    return BenchmarkConfig::defaults(f);
}

json benchmark_run_to_json(const BenchmarkRun& r)
{
    json fam = json::array(), var = json::array(), ds = json::array();
    for (Family f : r.families) {
        fam.push_back(to_string(f));
        ds.push_back(benchmark_config_to_json(r.dataset_for(f)));
    }
    for (Variant v : r.variants)
        var.push_back(to_string(v));
    return {{"families", fam},
            {"variants", var},
            {"seeds", r.seeds},
            {"sweep", sweep_grid_to_json(r.grid)},
            {"model", config_to_json(r.base)},
            {"datasets", ds}};
}

BenchmarkRun benchmark_run_from_json(const json& j)
{
    BenchmarkRun r;
    if (j.contains("families")) {
        r.families.clear();
        for (const auto& f : j.at("families"))
            r.families.push_back(parse_family(f.get<std::string>()));
    }
    if (j.contains("variants")) {
        r.variants.clear();
        for (const auto& v : j.at("variants"))
            r.variants.push_back(parse_variant(v.get<std::string>()));
    }
    r.seeds = j.value("seeds", r.seeds);
    if (j.contains("sweep"))
        r.grid = sweep_grid_from_json(j.at("sweep"));
    if (j.contains("model"))
        r.base = config_from_json(j.at("model"));
    if (j.contains("datasets"))
        for (const auto& d : j.at("datasets"))
            r.datasets.push_back(benchmark_config_from_json(d));
    if (r.families.empty() || r.variants.empty() || r.seeds.empty())
        throw PreconditionError("benchmark run needs at least one family, variant and seed");
    return r;
}

std::vector<CellResult> run_benchmark(const BenchmarkRun& run, bool verbose)
{
    std::vector<CellResult> cells;
    for (Family fam : run.families) {
        const BenchmarkConfig dcfg = run.dataset_for(fam);
        std::map<std::uint64_t, BenchmarkDataset> data;
        std::map<std::uint64_t, std::string> data_fail;
        for (std::uint64_t seed : run.seeds) {
            try {
                data.emplace(seed, build_benchmark_dataset(dcfg, seed));
            } catch (const Error& e) {
                data_fail[seed] = e.what();
            }
        }
        for (Variant var : run.variants) {
            CellResult cell;
            cell.family = fam;
            cell.variant = var;
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<double> id_all, ood_all, id_means, ood_means;
            try {
                for (std::uint64_t seed : run.seeds) {
                    if (data_fail.count(seed))
                        throw Error("seed " + std::to_string(seed) + ": dataset generation failed: " + data_fail[seed]);
                    const BenchmarkDataset& ds = data.at(seed);
                    ModelConfig base = run.base;
                    base.variant = var;
                    base.seed = seed;
                    try {
                        Selection sel = select_model(ds.train.data, ds.validation.data, base, run.grid);
                        SeedOutcome o{seed, sel.config, sel.validation_error, evaluate(sel.model, ds.id_test.data),
                                      evaluate(sel.model, ds.ood_test.data)};
                        id_all.insert(id_all.end(), o.id.per_function_errors.begin(), o.id.per_function_errors.end());
                        ood_all.insert(ood_all.end(), o.ood.per_function_errors.begin(),
                                       o.ood.per_function_errors.end());
                        id_means.push_back(o.id.mean_error);
                        ood_means.push_back(o.ood.mean_error);
                        if (verbose)
                            std::cerr << to_string(fam) << '/' << to_string(var) << " seed " << seed << ": M="
                                      << sel.config.branch_units << " N=" << sel.config.trunk_units
                                      << " overlap=" << sel.config.branch_overlap << '/' << sel.config.trunk_overlap
                                      << " val=" << format_sci(sel.validation_error)
                                      << " id=" << format_sci(o.id.mean_error)
                                      << " ood=" << format_sci(o.ood.mean_error) << '\n';
                        cell.seeds.push_back(std::move(o));
                    } catch (const Error& e) {
                        throw Error("seed " + std::to_string(seed) + ": " + e.what());
                    }
                }
                cell.id = summarize(id_all);
                cell.ood = summarize(ood_all);
                cell.id_median = median_of(id_means);
                cell.ood_median = median_of(ood_means);
                cell.ok = true;
            } catch (const Error& e) {
                cell.failure = e.what();
                if (verbose)
                    std::cerr << to_string(fam) << '/' << to_string(var) << " FAILED: " << cell.failure << '\n';
            }
            cell.runtime_seconds = seconds_since(t0);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

namespace {

std::string sizes_of(const CellResult& c)
{
    std::string s;
    for (const auto& o : c.seeds) {
        if (!s.empty())
            s += ';';
        char buf[64];
        std::snprintf(buf, sizeof buf, "%dx%d/%g/%g", o.chosen.branch_units, o.chosen.trunk_units,
                      o.chosen.branch_overlap, o.chosen.trunk_overlap);
        s += buf;
    }
    return s;
}

std::string seeds_of(const CellResult& c)
{
    std::string s;
    for (const auto& o : c.seeds)
        s += (s.empty() ? "" : ";") + std::to_string(o.seed);
    return s;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string aligned(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> w;
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (w.size() <= i)
                w.push_back(0);
            w[i] = std::max(w[i], r[i].size());
        }
    std::ostringstream out;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t i = 0; i < rows[k].size(); ++i) {
            out << rows[k][i];
            if (i + 1 < rows[k].size())
                out << std::string(w[i] - rows[k][i].size() + 2, ' ');
        }
        out << '\n';
        if (k == 0) {
            std::size_t total = 0;
            for (std::size_t i = 0; i < w.size(); ++i)
                total += w[i] + (i + 1 < w.size() ? 2 : 0);
            out << std::string(total, '-') << '\n';
        }
    }
    return out.str();
}

} // namespace

std::string benchmark_csv(const std::vector<CellResult>& cells)
{
    std::ostringstream out;
    out << "family,variant,id_mean,id_moe,ood_mean,ood_moe,id_cell,ood_cell,id_median,ood_median,seeds,sizes,"
           "runtime_s,status\n";
    for (const auto& c : cells) {
        out << to_string(c.family) << ',' << to_string(c.variant) << ',';
        if (c.ok)
            out << num(c.id.mean_error) << ',' << num(c.id.margin_of_error) << ',' << num(c.ood.mean_error) << ','
                << num(c.ood.margin_of_error) << ',' << format_mean_moe(c.id) << ',' << format_mean_moe(c.ood) << ','
                << num(c.id_median) << ',' << num(c.ood_median) << ',';
        else
            out << ",,,,,,,,";
        char rt[32];
        std::snprintf(rt, sizeof rt, "%.2f", c.runtime_seconds);
        out << seeds_of(c) << ',' << sizes_of(c) << ',' << rt << ','
            << csv_field(c.ok ? std::string("ok") : "failed: " + c.failure) << '\n';
    }
    return out.str();
}

std::string benchmark_table(const std::vector<CellResult>& cells)
{
    std::vector<std::vector<std::string>> rows{{"Family", "Variant", "ID", "OOD", "Runtime", "Status"}};
    for (const auto& c : cells) {
        char rt[32];
        std::snprintf(rt, sizeof rt, "%.1fs", c.runtime_seconds);
        rows.push_back({std::string(to_string(c.family)), std::string(to_string(c.variant)),
                        c.ok ? format_mean_moe(c.id) : "-", c.ok ? format_mean_moe(c.ood) : "-", rt,
                        c.ok ? "ok" : "FAILED"});
    }
    std::string s = aligned(rows);
    for (const auto& c : cells)
        if (!c.ok)
            s += "failed cell " + std::string(to_string(c.family)) + '/' + std::string(to_string(c.variant)) +
                 ": " + c.failure + '\n';
    return s;
}

json benchmark_results_json(const std::vector<CellResult>& cells)
{
    json arr = json::array();
    for (const auto& c : cells) {
        json seeds = json::array();
        for (const auto& o : c.seeds)
            seeds.push_back({{"seed", o.seed},
                             {"chosen", config_to_json(o.chosen)},
                             {"validation_error", o.validation_error},
                             {"id_mean", o.id.mean_error},
                             {"ood_mean", o.ood.mean_error}});
        json cell = {{"family", to_string(c.family)},
                     {"variant", to_string(c.variant)},
                     {"ok", c.ok},
                     {"runtime_s", c.runtime_seconds},
                     {"seeds", seeds}};
        if (c.ok) {
            cell["id"] = {{"mean", c.id.mean_error}, {"moe", c.id.margin_of_error}, {"n", c.id.n},
                          {"median_over_seeds", c.id_median}};
            cell["ood"] = {{"mean", c.ood.mean_error}, {"moe", c.ood.margin_of_error}, {"n", c.ood.n},
                           {"median_over_seeds", c.ood_median}};
        } else {
            cell["failure"] = c.failure;
        }
        arr.push_back(cell);
    }
    return arr;
}

// ---- forecasting -----------------------------------------------------------

ForecastRun::ForecastRun()
{
    base.variant = Variant::RBON;
    base.enforce_size_cap = false;
    base.branch_units = 15;
    base.trunk_units = 12;
    grid.branch_units = {5, 10, 15, 20};
    grid.trunk_units = {6, 12};
    grid.branch_overlaps = {1.0, 2.0, 3.0};
    grid.trunk_overlaps = {1.0, 2.0, 3.0};
}

json forecast_run_to_json(const ForecastRun& r)
{
    json targets = json::array();
    for (const auto& t : r.targets)
        targets.push_back({{"name", t.name}, {"file", t.file.string()}});
    return {{"co2_file", r.co2_file.string()},
            {"targets", targets},
            {"holdouts", r.holdouts},
            {"model", config_to_json(r.base)},
            {"sweep", sweep_grid_to_json(r.grid)},
            {"surrogate", r.surrogate}};
}

ForecastRun forecast_run_from_json(const json& j, const std::filesystem::path& base_dir)
{
    ForecastRun r;
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    if (j.contains("co2_file"))
        r.co2_file = resolve(j.at("co2_file").get<std::string>());
    if (j.contains("co2_schema"))
        r.co2_schema = CsvSchema::preset(j.at("co2_schema").get<std::string>());
    if (j.contains("targets")) {
        r.targets.clear();
        for (const auto& t : j.at("targets")) {
            ForecastTarget ft;
            ft.name = t.at("name").get<std::string>();
            ft.file = resolve(t.at("file").get<std::string>());
            if (t.contains("schema"))
                ft.schema = CsvSchema::preset(t.at("schema").get<std::string>());
            r.targets.push_back(ft);
        }
    }
    r.holdouts = j.value("holdouts", r.holdouts);
    if (j.contains("model")) {
        r.base = config_from_json(j.at("model"));
        if (!j.at("model").contains("enforce_size_cap"))
            r.base.enforce_size_cap = false;
    }
    if (j.contains("sweep"))
        r.grid = sweep_grid_from_json(j.at("sweep"));
    r.surrogate = j.value("surrogate", r.surrogate);
    return r;
}

ForecastResult run_forecast(const ForecastRun& run, const std::vector<YearFunction>& co2,
                            const std::vector<YearFunction>& target, const std::string& target_name, int holdout)
{
    const ForecastDataset ds = build_forecast_dataset(co2, target, holdout);
    const Eigen::Index n_train = ds.train.functions();
    if (n_train < holdout + 2)
        throw PreconditionError("forecast " + target_name + ": too few training years to hold out " +
                                std::to_string(holdout) + " for size selection");
    TrainingSet inner, val;
    inner.queries = val.queries = ds.train.queries;
    inner.inputs = ds.train.inputs.topRows(n_train - holdout);
    inner.targets = ds.train.targets.topRows(n_train - holdout);
    val.inputs = ds.train.inputs.bottomRows(holdout);
    val.targets = ds.train.targets.bottomRows(holdout);

    const Selection sel = select_model(inner, val, run.base, run.grid);
    const TrainedModel model = train(ds.train, sel.config);

    ForecastResult res;
    res.target = target_name;
    res.holdout = holdout;
    res.train_years = static_cast<int>(n_train);
    res.test_years = ds.test_years;
    res.chosen = sel.config;
    res.test_error = mean_of(field_errors(model, ds.test));
    auto emit = [&](const TrainingSet& set, const std::vector<int>& years, const char* tag) {
        const Eigen::MatrixXd pred = predict_batch(model, set.inputs, set.queries);
        for (Eigen::Index j = 0; j < set.functions(); ++j)
            for (int m = 0; m < 12; ++m)
                res.rows.push_back({years[static_cast<std::size_t>(j)], m + 1, set.targets(j, m), pred(j, m), tag});
    };
    emit(ds.train, ds.train_years, "train");
    emit(ds.test, ds.test_years, "test");
    return res;
}

std::vector<ForecastResult> run_forecasts(const ForecastRun& run)
{
    if (run.targets.empty())
        throw PreconditionError("forecast: no temperature targets configured");
    const auto co2 = to_year_functions(parse_monthly_csv(run.co2_file, run.co2_schema));
    std::vector<ForecastResult> out;
    for (const auto& t : run.targets) {
        const auto temp = to_year_functions(parse_monthly_csv(t.file, t.schema));
        for (int h : run.holdouts)
            out.push_back(run_forecast(run, co2, temp, t.name, h));
    }
    return out;
}

std::string forecast_csv(const std::vector<ForecastResult>& results, bool surrogate)
{
    std::ostringstream out;
    out << "target,holdout_years,train_years,test_years,branch_units,trunk_units,branch_overlap,trunk_overlap,"
           "test_error,data\n";
    for (const auto& r : results) {
        std::string years;
        for (int y : r.test_years)
            years += (years.empty() ? "" : ";") + std::to_string(y);
        out << r.target << ',' << r.holdout << ',' << r.train_years << ',' << years << ','
            << r.chosen.branch_units << ',' << r.chosen.trunk_units << ',' << r.chosen.branch_overlap << ','
            << r.chosen.trunk_overlap << ',' << num(r.test_error) << ',' << (surrogate ? "surrogate" : "measured")
            << '\n';
    }
    return out.str();
}

std::string forecast_table(const std::vector<ForecastResult>& results, bool surrogate)
{
    std::vector<std::vector<std::string>> rows{{"Target", "Holdout", "Train years", "M x N", "Test L2 error"}};
    for (const auto& r : results)
        rows.push_back({r.target, std::to_string(r.holdout) + "y", std::to_string(r.train_years),
                        std::to_string(r.chosen.branch_units) + "x" + std::to_string(r.chosen.trunk_units),
                        format_sci(r.test_error)});
    std::string s = aligned(rows);
    if (surrogate)
        s += "data: synthetic surrogate fixtures\n";
    return s;
}

std::string write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& text)
{
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    out << text;
    if (!out)
        throw Error("cannot write " + (dir / name).string());
    return sha256_hex(text);
}

} // namespace rbon

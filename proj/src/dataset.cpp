#include "rbon/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "rbon/errors.hpp"

namespace rbon {

std::string_view to_string(Family f)
{
    switch (f) {
    case Family::Wave: return "wave";
    case Family::Burgers: return "burgers";
    case Family::Beam: return "beam";
    }
    return "?";
}

Family parse_family(std::string_view name)
{
    if (name == "wave")
        return Family::Wave;
    if (name == "burgers")
        return Family::Burgers;
    if (name == "beam")
        return Family::Beam;
    throw PreconditionError("unknown family '" + std::string(name) + "' (expected wave, burgers or beam)");
}

BenchmarkConfig BenchmarkConfig::defaults(Family family)
{
    BenchmarkConfig c;
    c.family = family;
    switch (family) {
    case Family::Wave:
        c.id_lo = 1.0, c.id_hi = 4.0, c.id_step = 0.01;
        c.ood_lo = 5.0, c.ood_hi = 5.5;
        break;
    case Family::Burgers:
        c.id_lo = 0.1, c.id_hi = 5.0, c.id_step = 0.01;
        c.ood_lo = 3.5, c.ood_hi = 4.5;
        break;
    case Family::Beam:
        c.id_lo = 0.05, c.id_hi = 10.0, c.id_step = 0.05;
        c.ood_lo = 1.24, c.ood_hi = 10.19;
        c.sensors = c.beam_sensor_nt * c.beam_sensor_nx;
        break;
    }
    return c;
}

void BenchmarkConfig::validate() const
{
    if (!(t_final > 0.0) || !(length > 0.0))
        throw PreconditionError("benchmark: t_final and length must be positive");
    if (!(id_step > 0.0) || !(id_hi >= id_lo))
        throw PreconditionError("benchmark: need id_step > 0 and id_hi >= id_lo");
    if (!(ood_hi >= ood_lo) || ood_count < 1)
        throw PreconditionError("benchmark: need ood_hi >= ood_lo and ood_count >= 1");
    if (query_nt < 3 || query_nx < 3)
        throw PreconditionError("benchmark: query grid needs at least 3 points per axis");
    if (!(validation_fraction >= 0.0) || !(test_fraction >= 0.0) || validation_fraction + test_fraction >= 1.0)
        throw PreconditionError("benchmark: split fractions must be non-negative and sum below 1");
    switch (family) {
    case Family::Wave:
        if (!(wave_speed > 0.0))
            throw PreconditionError("benchmark: wave_speed must be positive");
        if (wave_stride_t < 1 || wave_stride_x < 1)
            throw PreconditionError("benchmark: wave strides must be at least 1");
        if (sensors < 1)
            throw PreconditionError("benchmark: sensors must be at least 1");
        break;
    case Family::Burgers:
        if (!(viscosity > 0.0))
            throw PreconditionError("benchmark: viscosity must be positive");
        if (length != 1.0)
            throw PreconditionError("benchmark: the Burgers family is defined on [0, 1]");
        if (sensors < 1)
            throw PreconditionError("benchmark: sensors must be at least 1");
        break;
    case Family::Beam:
        if (!(id_decay > 0.0) || !(ood_decay > 0.0))
            throw PreconditionError("benchmark: beam decay rates must be positive");
        if (beam_sensor_nt < 1 || beam_sensor_nx < 1)
            throw PreconditionError("benchmark: beam sensor grid must be non-empty");
        if (sensors != beam_sensor_nt * beam_sensor_nx)
            throw PreconditionError("benchmark: beam sensors must equal beam_sensor_nt * beam_sensor_nx");
        break;
    }
}

std::vector<double> BenchmarkConfig::id_parameters() const
{
    const auto count = static_cast<long>(std::floor((id_hi - id_lo) / id_step + 1e-9)) + 1;
    std::vector<double> p(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
        p[static_cast<std::size_t>(i)] = id_lo + static_cast<double>(i) * id_step;
    return p;
}

std::vector<double> BenchmarkConfig::ood_parameters() const
{
    std::vector<double> p(static_cast<std::size_t>(ood_count));
    for (int i = 0; i < ood_count; ++i)
        p[static_cast<std::size_t>(i)] = ood_count == 1 ? ood_lo : ood_lo + (ood_hi - ood_lo) * i / (ood_count - 1);
    return p;
}

GridSpec BenchmarkConfig::query_grid() const
{
    return GridSpec{t_final, length, query_nt, query_nx};
}

namespace {

double spaced(double lo, double hi, int i, int n)
{
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
}

} // namespace

Eigen::MatrixXd BenchmarkConfig::sensor_locations() const
{
    if (family == Family::Beam) {
        Eigen::MatrixXd s(static_cast<Eigen::Index>(beam_sensor_nt) * beam_sensor_nx, 2);
        for (int i = 0; i < beam_sensor_nt; ++i)
            for (int j = 0; j < beam_sensor_nx; ++j) {
                s(i * beam_sensor_nx + j, 0) = spaced(0.0, t_final, i, beam_sensor_nt);
                s(i * beam_sensor_nx + j, 1) = spaced(0.0, length, j, beam_sensor_nx);
            }
        return s;
    }
    Eigen::MatrixXd s(sensors, 1);
    for (int i = 0; i < sensors; ++i)
        s(i, 0) = spaced(0.0, length, i, sensors);
    return s;
}

nlohmann::json benchmark_config_to_json(const BenchmarkConfig& c)
{
    return {
        {"family", to_string(c.family)},
        {"wave_speed", c.wave_speed},
        {"viscosity", c.viscosity},
        {"t_final", c.t_final},
        {"length", c.length},
        {"id_decay", c.id_decay},
        {"ood_decay", c.ood_decay},
        {"id_lo", c.id_lo},
        {"id_hi", c.id_hi},
        {"id_step", c.id_step},
        {"ood_lo", c.ood_lo},
        {"ood_hi", c.ood_hi},
        {"ood_count", c.ood_count},
        {"sensors", c.sensors},
        {"beam_sensor_nt", c.beam_sensor_nt},
        {"beam_sensor_nx", c.beam_sensor_nx},
        {"query_nt", c.query_nt},
        {"query_nx", c.query_nx},
        {"wave_stride_t", c.wave_stride_t},
        {"wave_stride_x", c.wave_stride_x},
        {"validation_fraction", c.validation_fraction},
        {"test_fraction", c.test_fraction},
    };
}

BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j)
{
    BenchmarkConfig c = BenchmarkConfig::defaults(parse_family(j.at("family").get<std::string>()));
    c.wave_speed = j.value("wave_speed", c.wave_speed);
    c.viscosity = j.value("viscosity", c.viscosity);
    c.t_final = j.value("t_final", c.t_final);
    c.length = j.value("length", c.length);
    c.id_decay = j.value("id_decay", c.id_decay);
    c.ood_decay = j.value("ood_decay", c.ood_decay);
    c.id_lo = j.value("id_lo", c.id_lo);
    c.id_hi = j.value("id_hi", c.id_hi);
    c.id_step = j.value("id_step", c.id_step);
    c.ood_lo = j.value("ood_lo", c.ood_lo);
    c.ood_hi = j.value("ood_hi", c.ood_hi);
    c.ood_count = j.value("ood_count", c.ood_count);
    c.beam_sensor_nt = j.value("beam_sensor_nt", c.beam_sensor_nt);
    c.beam_sensor_nx = j.value("beam_sensor_nx", c.beam_sensor_nx);
    c.sensors = c.family == Family::Beam ? c.beam_sensor_nt * c.beam_sensor_nx : j.value("sensors", c.sensors);
    c.query_nt = j.value("query_nt", c.query_nt);
    c.query_nx = j.value("query_nx", c.query_nx);
    c.wave_stride_t = j.value("wave_stride_t", c.wave_stride_t);
    c.wave_stride_x = j.value("wave_stride_x", c.wave_stride_x);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    return c;
}

SplitSizes split_sizes(int n, double validation_fraction, double test_fraction)
{
    if (n < 1 || validation_fraction < 0.0 || test_fraction < 0.0 || validation_fraction + test_fraction >= 1.0)
        throw PreconditionError("split_sizes: fractions must be non-negative and sum to less than 1");
    const int v = static_cast<int>(std::floor(validation_fraction * n));
    const int t = static_cast<int>(std::floor(test_fraction * n));
    return {n - v - t, v, t};
}

Sample generate_sample(const BenchmarkConfig& cfg, double p, bool ood)
{
    const Eigen::MatrixXd sensors = cfg.sensor_locations();
    const GridSpec q = cfg.query_grid();
    Sample s;
    s.input.resize(sensors.rows());
    switch (cfg.family) {
    case Family::Wave: {
        for (Eigen::Index i = 0; i < sensors.rows(); ++i)
            s.input(i) = wave_initial(p, sensors(i, 0), cfg.length);
        WaveConfig wc;
        wc.speed = cfg.wave_speed;
        wc.grid = GridSpec{cfg.t_final, cfg.length, (q.nt - 1) * cfg.wave_stride_t + 1,
                           (q.nx - 1) * cfg.wave_stride_x + 1};
        const SolutionField f = solve_wave(p, wc);
        s.target.resize(static_cast<Eigen::Index>(q.nt) * q.nx);
        for (int i = 0; i < q.nt; ++i)
            for (int j = 0; j < q.nx; ++j)
                s.target(static_cast<Eigen::Index>(i) * q.nx + j) =
                    f.values(i * cfg.wave_stride_t, j * cfg.wave_stride_x);
        break;
    }
    case Family::Burgers: {
        ScalarFunction u0;
        if (ood)
            u0 = [p](double x) { return p * x * (x - 1.0); };
        else
            u0 = [p](double x) { return p * std::sin(std::numbers::pi * x); };
        for (Eigen::Index i = 0; i < sensors.rows(); ++i)
            s.input(i) = u0(sensors(i, 0));
        BurgersConfig bc;
        bc.viscosity = cfg.viscosity;
        bc.grid = q;
        SolutionField f = solve_burgers(u0, bc);
        s.target = f.flattened();
        break;
    }
    case Family::Beam: {
        const double k = ood ? cfg.ood_decay : cfg.id_decay;
        for (Eigen::Index i = 0; i < sensors.rows(); ++i)
            s.input(i) = beam_forcing(p, k, sensors(i, 0), sensors(i, 1));
        s.target = solve_beam(p, k, q).flattened();
        break;
    }
    }
    return s;
}

namespace {

// Fisher-Yates with an unbiased bounded draw, so the permutation depends only
// on the seed and not on the standard library's distribution code.
void shuffle(std::vector<double>& v, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do
            r = rng();
        while (r >= limit);
        std::swap(v[i - 1], v[r % bound]);
    }
}

DatasetSplit make_split(const BenchmarkConfig& cfg, std::string name, std::vector<double> params, bool ood)
{
    std::sort(params.begin(), params.end());
    DatasetSplit s;
    s.name = std::move(name);
    s.data.queries = cfg.query_grid().points();
    s.data.inputs.resize(static_cast<Eigen::Index>(params.size()), cfg.sensors);
    s.data.targets.resize(static_cast<Eigen::Index>(params.size()), s.data.queries.rows());
    for (std::size_t r = 0; r < params.size(); ++r) {
        Sample smp = generate_sample(cfg, params[r], ood);
        s.data.inputs.row(static_cast<Eigen::Index>(r)) = smp.input.transpose();
        s.data.targets.row(static_cast<Eigen::Index>(r)) = smp.target.transpose();
    }
    if (!s.data.targets.allFinite())
        throw NonFiniteError("benchmark: generated targets contain non-finite values");
    s.parameters = std::move(params);
    return s;
}

} // namespace

BenchmarkDataset build_benchmark_dataset(const BenchmarkConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    std::vector<double> id = cfg.id_parameters();
    const SplitSizes sz = split_sizes(static_cast<int>(id.size()), cfg.validation_fraction, cfg.test_fraction);
    if (sz.train < 2)
        throw PreconditionError("benchmark: fewer than 2 ID functions remain for training after splitting");
    shuffle(id, seed);

    const auto at = [&](int lo, int n) {
        return std::vector<double>(id.begin() + lo, id.begin() + lo + n);
    };
    BenchmarkDataset ds;
    ds.config = cfg;
    ds.seed = seed;
    ds.sensor_locations = cfg.sensor_locations();
    ds.train = make_split(cfg, "train", at(0, sz.train), false);
    ds.validation = make_split(cfg, "validation", at(sz.train, sz.validation), false);
    ds.id_test = make_split(cfg, "id_test", at(sz.train + sz.validation, sz.test), false);
    ds.ood_test = make_split(cfg, "ood_test", cfg.ood_parameters(), true);
    return ds;
}

} // namespace rbon

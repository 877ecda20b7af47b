#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "rbon/dataset.hpp"
#include "rbon/digest.hpp"
#include "rbon/errors.hpp"

namespace rbon {

using nlohmann::json;

namespace {

constexpr std::array<char, 4> kMagic{'R', 'B', 'D', 'S'};

template <typename T>
void put_le(std::ostream& out, T v)
{
    std::array<char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b.begin(), b.end());
    out.write(b.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& what)
{
    std::array<char, sizeof(T)> b;
    if (!in.read(b.data(), sizeof(T)))
        throw CorruptFileError("dataset file truncated while reading " + what);
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            put_le(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in, const json& shape, const std::string& what)
{
    const auto rows = shape.at(0).get<Eigen::Index>();
    const auto cols = shape.at(1).get<Eigen::Index>();
    if (rows < 0 || cols < 0)
        throw CorruptFileError("dataset file: negative shape for " + what);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = get_le<double>(in, what);
    return m;
}

json shape(const Eigen::MatrixXd& m)
{
    return json::array({m.rows(), m.cols()});
}

const std::array<const char*, 4> kSplitNames{"train", "validation", "id_test", "ood_test"};

} // namespace

void write_split(const std::filesystem::path& file, const DatasetSplit& split, const BenchmarkConfig& cfg,
                 std::uint64_t seed, const Eigen::MatrixXd& sensor_locations)
{
    const json header = {
        {"format", "rbon-dataset"},
        {"split", split.name},
        {"family", to_string(cfg.family)},
        {"seed", seed},
        {"config", benchmark_config_to_json(cfg)},
        {"parameters", split.parameters},
        {"shapes",
         {{"sensor_locations", shape(sensor_locations)},
          {"inputs", shape(split.data.inputs)},
          {"queries", shape(split.data.queries)},
          {"targets", shape(split.data.targets)}}},
    };
    const std::string text = header.dump();
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw Error("cannot open " + file.string() + " for writing");
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kDatasetFormatVersion);
    put_le<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_matrix(out, sensor_locations);
    put_matrix(out, split.data.inputs);
    put_matrix(out, split.data.queries);
    put_matrix(out, split.data.targets);
    if (!out)
        throw Error("write failed for " + file.string());
}

LoadedSplit read_split(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error("cannot open dataset file " + file.string());
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw CorruptFileError(file.string() + " is not an rbon dataset file");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kDatasetFormatVersion)
        throw VersionMismatchError("dataset format version " + std::to_string(version) +
                                   " is not supported (this build reads version " +
                                   std::to_string(kDatasetFormatVersion) + ")");
    const auto len = get_le<std::uint64_t>(in, "header length");
    if (len > (1u << 30))
        throw CorruptFileError(file.string() + ": implausible header length");
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len)))
        throw CorruptFileError(file.string() + ": truncated header");

    LoadedSplit out;
    try {
        const json h = json::parse(text);
        out.config = benchmark_config_from_json(h.at("config"));
        out.seed = h.at("seed").get<std::uint64_t>();
        out.split.name = h.at("split").get<std::string>();
        out.split.parameters = h.at("parameters").get<std::vector<double>>();
        const json& s = h.at("shapes");
        out.sensor_locations = get_matrix(in, s.at("sensor_locations"), "sensor locations");
        out.split.data.inputs = get_matrix(in, s.at("inputs"), "inputs");
        out.split.data.queries = get_matrix(in, s.at("queries"), "queries");
        out.split.data.targets = get_matrix(in, s.at("targets"), "targets");
    } catch (const json::exception& e) {
        throw CorruptFileError(file.string() + ": bad header: " + e.what());
    } catch (const PreconditionError& e) {
        throw CorruptFileError(file.string() + ": bad header: " + e.what());
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw CorruptFileError(file.string() + ": trailing bytes after payload");
    if (static_cast<std::size_t>(out.split.data.inputs.rows()) != out.split.parameters.size())
        throw CorruptFileError(file.string() + ": parameter count does not match input rows");
    return out;
}

json write_dataset(const std::filesystem::path& dir, const BenchmarkDataset& ds)
{
    std::filesystem::create_directories(dir);
    const std::array<const DatasetSplit*, 4> splits{&ds.train, &ds.validation, &ds.id_test, &ds.ood_test};
    const std::vector<double> id = ds.config.id_parameters();
    json manifest = {
        {"format", "rbon-dataset-manifest"},
        {"format_version", kDatasetFormatVersion},
        {"family", to_string(ds.config.family)},
        {"seed", ds.seed},
        {"config", benchmark_config_to_json(ds.config)},
        {"id_parameter_grid",
         {{"lo", ds.config.id_lo}, {"hi", ds.config.id_hi}, {"step", ds.config.id_step}, {"count", id.size()}}},
        {"ood_parameter_grid", {{"lo", ds.config.ood_lo}, {"hi", ds.config.ood_hi}, {"count", ds.config.ood_count}}},
    };
    switch (ds.config.family) {
    case Family::Wave: manifest["physics"] = {{"c", ds.config.wave_speed}}; break;
    case Family::Burgers: manifest["physics"] = {{"nu", ds.config.viscosity}}; break;
    case Family::Beam: {
        const BeamConstants id_c = beam_constants(ds.config.id_decay);
        const BeamConstants ood_c = beam_constants(ds.config.ood_decay);
        manifest["physics"] = {{"id", {{"k", ds.config.id_decay}, {"EI", id_c.flexural_rigidity}, {"rhoA", id_c.mass_per_length}}},
                               {"ood", {{"k", ds.config.ood_decay}, {"EI", ood_c.flexural_rigidity}, {"rhoA", ood_c.mass_per_length}}}};
        break;
    }
    }
    json files = json::object();
    for (std::size_t i = 0; i < splits.size(); ++i) {
        const std::string name = kSplitNames[i];
        const std::string file = name + ".rbds";
        write_split(dir / file, *splits[i], ds.config, ds.seed, ds.sensor_locations);
        files[name] = {{"file", file},
                       {"functions", splits[i]->parameters.size()},
                       {"parameters", splits[i]->parameters},
                       {"sha256", sha256_file_hex(dir / file)}};
    }
    manifest["splits"] = files;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out)
        throw Error("cannot write " + (dir / "manifest.json").string());
    return manifest;
}

BenchmarkDataset read_dataset(const std::filesystem::path& dir)
{
    BenchmarkDataset ds;
    const std::array<DatasetSplit*, 4> splits{&ds.train, &ds.validation, &ds.id_test, &ds.ood_test};
    for (std::size_t i = 0; i < splits.size(); ++i) {
        LoadedSplit l = read_split(dir / (std::string(kSplitNames[i]) + ".rbds"));
        *splits[i] = std::move(l.split);
        ds.config = l.config;
        ds.seed = l.seed;
        ds.sensor_locations = std::move(l.sensor_locations);
    }
    return ds;
}

} // namespace rbon

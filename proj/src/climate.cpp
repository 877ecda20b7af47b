#include "rbon/climate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rbon/errors.hpp"

namespace rbon {

std::size_t MonthlySeries::missing_count() const
{
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const MonthlyRecord& r) { return !r.value; }));
}

CsvSchema CsvSchema::mauna_loa()
{
    CsvSchema s;
    s.value_column = "average";
    s.missing_markers = {-99.99};
    return s;
}

CsvSchema CsvSchema::climate_at_a_glance()
{
    CsvSchema s;
    s.skip_until_header = true;
    s.year_column.clear();
    s.month_column.clear();
    s.date_column = "Date";
    s.value_column = "Value";
    s.missing_markers = {-99.0, -999.0, -9999.0};
    return s;
}

CsvSchema CsvSchema::preset(const std::string& name)
{
    if (name == "mauna_loa")
        return mauna_loa();
    if (name == "climate_at_a_glance")
        return climate_at_a_glance();
    if (name == "plain")
        return CsvSchema{};
    throw PreconditionError("unknown CSV preset '" + name + "' (expected mauna_loa, climate_at_a_glance or plain)");
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n\"");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n\"");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim))
        out.push_back(trim(field));
    if (!line.empty() && line.back() == delim)
        out.emplace_back();
    return out;
}

template <typename T>
std::optional<T> parse_number(const std::string& s)
{
    T v{};
    const char* first = s.data();
    if (!s.empty() && s[0] == '+')
        ++first;
    const auto [p, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

std::ptrdiff_t column(const std::vector<std::string>& header, const std::string& name)
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw ParseError("CSV header has no column '" + name + "'");
    return it - header.begin();
}

} // namespace

MonthlySeries parse_monthly_csv(std::istream& in, const CsvSchema& schema, std::string source_label)
{
    const bool by_date = !schema.date_column.empty();
    if (!by_date && (schema.year_column.empty() || schema.month_column.empty()))
        throw PreconditionError("CSV schema needs a date column or both year and month columns");
    const std::string& key_column = by_date ? schema.date_column : schema.year_column;

    MonthlySeries series;
    series.source_label = std::move(source_label);
    std::vector<std::string> header;
    std::ptrdiff_t c_year = -1, c_month = -1, c_date = -1, c_value = -1;
    std::set<std::pair<int, int>> seen;
    int malformed = 0;
    std::string first_malformed;
    std::string line;
    long line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || (!schema.comment_prefix.empty() && t.rfind(schema.comment_prefix, 0) == 0))
            continue;
        std::vector<std::string> fields = split(line, schema.delimiter);
        if (header.empty()) {
            if (schema.skip_until_header && std::find(fields.begin(), fields.end(), key_column) == fields.end())
                continue;
            header = std::move(fields);
            if (by_date)
                c_date = column(header, schema.date_column);
            else {
                c_year = column(header, schema.year_column);
                c_month = column(header, schema.month_column);
            }
            c_value = column(header, schema.value_column);
            continue;
        }

        auto reject = [&](const std::string& why) {
            if (++malformed == 1)
                first_malformed = "line " + std::to_string(line_no) + ": " + why;
        };
        if (fields.size() < header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
            continue;
        }
        std::optional<int> year, month;
        if (by_date) {
            const auto d = parse_number<long>(fields[static_cast<std::size_t>(c_date)]);
            if (d) {
                year = static_cast<int>(*d / 100);
                month = static_cast<int>(*d % 100);
            }
        } else {
            year = parse_number<int>(fields[static_cast<std::size_t>(c_year)]);
            month = parse_number<int>(fields[static_cast<std::size_t>(c_month)]);
        }
        if (!year || !month || *month < 1 || *month > 12) {
            reject("unreadable year/month");
            continue;
        }
        if (!seen.insert({*year, *month}).second)
            throw ParseError("duplicate record for " + std::to_string(*year) + "-" + std::to_string(*month) +
                             " at line " + std::to_string(line_no));

        MonthlyRecord rec{*year, *month, std::nullopt};
        const auto v = parse_number<double>(fields[static_cast<std::size_t>(c_value)]);
        if (v && std::isfinite(*v) &&
            std::none_of(schema.missing_markers.begin(), schema.missing_markers.end(),
                         [&](double m) { return std::abs(*v - m) <= 1e-9 * std::max(1.0, std::abs(m)); }))
            rec.value = *v;
        series.records.push_back(rec);
    }
    if (header.empty())
        throw ParseError("CSV input has no header row containing '" + key_column + "'");
    if (malformed > schema.max_malformed_rows)
        throw ParseError(std::to_string(malformed) + " malformed rows (tolerance " +
                         std::to_string(schema.max_malformed_rows) + "); first at " + first_malformed);
    return series;
}

MonthlySeries parse_monthly_csv(const std::filesystem::path& file, const CsvSchema& schema)
{
    std::ifstream in(file);
    if (!in)
        throw Error("cannot open CSV file " + file.string());
    try {
        return parse_monthly_csv(in, schema, file.filename().string());
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

void write_monthly_csv(std::ostream& out, const MonthlySeries& series, double missing_marker)
{
    char buf[64];
    out << "year,month,value\n";
    for (const auto& r : series.records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.value ? *r.value : missing_marker);
        out << r.year << ',' << r.month << ',' << buf << '\n';
    }
}

std::vector<YearFunction> to_year_functions(const MonthlySeries& series)
{
    std::map<int, std::map<int, double>> by_year;
    std::set<int> broken;
    for (const auto& r : series.records) {
        if (!r.value)
            broken.insert(r.year);
        else
            by_year[r.year][r.month] = *r.value;
    }
    std::vector<YearFunction> out;
    for (const auto& [year, months] : by_year) {
        if (broken.count(year) || months.size() != 12)
            continue;
        YearFunction f;
        f.year = year;
        for (const auto& [m, v] : months)
            f.samples[static_cast<std::size_t>(m - 1)] = v;
        out.push_back(f);
    }
    return out;
}

ForecastDataset build_forecast_dataset(const std::vector<YearFunction>& inputs,
                                       const std::vector<YearFunction>& targets, int holdout_years)
{
    if (holdout_years < 1)
        throw PreconditionError("holdout_years must be positive");
    std::map<int, const YearFunction*> tmap;
    for (const auto& f : targets)
        tmap[f.year] = &f;
    std::vector<std::pair<const YearFunction*, const YearFunction*>> common;
    std::map<int, const YearFunction*> imap;
    for (const auto& f : inputs)
        imap[f.year] = &f;
    for (const auto& [year, f] : imap)
        if (const auto it = tmap.find(year); it != tmap.end())
            common.emplace_back(f, it->second);
    if (static_cast<int>(common.size()) < holdout_years + 2)
        throw PreconditionError("only " + std::to_string(common.size()) + " common complete years; need at least " +
                                std::to_string(holdout_years + 2) + " for a " + std::to_string(holdout_years) +
                                "-year holdout");

    Eigen::MatrixXd queries(12, 1);
    for (int m = 0; m < 12; ++m)
        queries(m, 0) = m + 1;
    const auto n_test = static_cast<std::size_t>(holdout_years);
    const std::size_t n_train = common.size() - n_test;

    auto fill = [&](TrainingSet& set, std::vector<int>& years, std::size_t from, std::size_t count) {
        set.queries = queries;
        set.inputs.resize(static_cast<Eigen::Index>(count), 12);
        set.targets.resize(static_cast<Eigen::Index>(count), 12);
        for (std::size_t r = 0; r < count; ++r) {
            const auto& [in, tg] = common[from + r];
            years.push_back(in->year);
            for (int m = 0; m < 12; ++m) {
                set.inputs(static_cast<Eigen::Index>(r), m) = in->samples[static_cast<std::size_t>(m)];
                set.targets(static_cast<Eigen::Index>(r), m) = tg->samples[static_cast<std::size_t>(m)];
            }
        }
    };
    ForecastDataset ds;
    fill(ds.train, ds.train_years, 0, n_train);
    fill(ds.test, ds.test_years, n_train, n_test);
    return ds;
}

void write_forecast_csv(std::ostream& out, const std::vector<ForecastRow>& rows)
{
    char a[64], p[64];
    out << "year,month,actual,predicted,split\n";
    for (const auto& r : rows) {
        std::snprintf(a, sizeof a, "%.10g", r.actual);
        std::snprintf(p, sizeof p, "%.10g", r.predicted);
        out << r.year << ',' << r.month << ',' << a << ',' << p << ',' << r.split << '\n';
    }
}

} // namespace rbon

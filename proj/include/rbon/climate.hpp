#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbon/operator_model.hpp"

namespace rbon {

struct MonthlyRecord {
    int year = 0;
    int month = 0;                ///< 1..12
    std::optional<double> value;  ///< empty when missing
};

struct MonthlySeries {
    std::vector<MonthlyRecord> records;
    std::string source_label;

    [[nodiscard]] std::size_t missing_count() const;
};

/// Column mapping for a monthly CSV file.
///
/// Either year_column + month_column, or date_column holding YYYYMM, must
/// be set. Lines starting with comment_prefix are ignored. With
/// skip_until_header, free-form preamble lines before the header row are
/// skipped.
struct CsvSchema {
    char delimiter = ',';
    std::string comment_prefix = "#";
    bool skip_until_header = false;
    std::string year_column = "year";
    std::string month_column = "month";
    std::string date_column;
    std::string value_column = "value";
    std::vector<double> missing_markers;
    /// Rows that cannot be read at all (bad year/month, wrong field count)
    /// tolerated before parsing fails.
    int max_malformed_rows = 0;

    /// NOAA Mauna Loa monthly mean file: year,month,decimal date,average,...
    /// with -99.99 marking missing months.
    static CsvSchema mauna_loa();
    /// NOAA "Climate at a Glance" time series: title lines, then Date,Value,...
    /// with Date as YYYYMM.
    static CsvSchema climate_at_a_glance();
    static CsvSchema preset(const std::string& name);
};

MonthlySeries parse_monthly_csv(std::istream& in, const CsvSchema& schema, std::string source_label = {});
MonthlySeries parse_monthly_csv(const std::filesystem::path& file, const CsvSchema& schema);

/// year,month,value rows with round-trip precision; missing values are
/// written as `missing_marker`. Parsing the output with CsvSchema{} plus that
/// marker reproduces the series.
void write_monthly_csv(std::ostream& out, const MonthlySeries& series, double missing_marker = -99.99);

struct YearFunction {
    int year = 0;
    std::array<double, 12> samples{};
};

/// Years with all 12 months present and non-missing, ascending.
std::vector<YearFunction> to_year_functions(const MonthlySeries& series);

struct ForecastDataset {
    TrainingSet train;
    TrainingSet test;
    std::vector<int> train_years;
    std::vector<int> test_years;
};

/// Branch input: the 12 monthly values of `inputs` for year n. Queries: the
/// month index 1..12. Targets: `targets` for the same year. The most recent
/// `holdout_years` common years form the test split.
ForecastDataset build_forecast_dataset(const std::vector<YearFunction>& inputs,
                                       const std::vector<YearFunction>& targets, int holdout_years);

struct ForecastRow {
    int year;
    int month;
    double actual;
    double predicted;
    std::string split;
};

/// year,month,actual,predicted,split
void write_forecast_csv(std::ostream& out, const std::vector<ForecastRow>& rows);

} // namespace rbon

#ifndef PATHWAYS_INGEST_HPP
#define PATHWAYS_INGEST_HPP

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pathways::ingest {

struct GaugeRecord {
    std::chrono::sys_seconds time;
    double level_mm = 0.0;

    friend bool operator==(const GaugeRecord&, const GaugeRecord&) = default;
};

// Hourly sea-level record with strictly increasing timestamps. Missing hours are gaps.
struct GaugeSeries {
    std::string station_id;
    std::vector<GaugeRecord> records;

    // Sorts by time; throws StructuralError on duplicate timestamps or non-finite levels.
    static GaugeSeries from_unsorted(std::string station_id, std::vector<GaugeRecord> records);
    std::size_t size() const { return records.size(); }
};

struct CsvFormat {
    double missing_sentinel = -32767.0;
    std::string station_id;
};

struct ParsedGauge {
    GaugeSeries series;
    std::size_t dropped = 0;
};

// Header `timestamp,level_mm`, timestamps `YYYY-MM-DDTHH:MM:SSZ`. Sentinel rows are
// dropped and counted. Malformed rows raise ParseError with the 1-based line number;
// a timestamp not after its predecessor raises StructuralError.
ParsedGauge parse_gauge_csv(std::istream& in, const CsvFormat& format = {});

std::chrono::sys_seconds parse_timestamp(const std::string& text);
std::string format_timestamp(std::chrono::sys_seconds t);

struct AnnualStats {
    int year = 0;
    double mean_level = 0.0;  // mm
    double max_level = 0.0;   // mm
    double max_surge = 0.0;   // mm, max(level - year mean - mean tide)
    std::size_t n_obs = 0;
};

// Calendar-year (UTC) statistics for years whose hourly coverage reaches min_coverage.
std::vector<AnnualStats> annual_stats(const GaugeSeries& series, double mean_tide_mm, double min_coverage = 0.8);

void write_annual_stats(std::ostream& os, const std::vector<AnnualStats>& stats);

struct AbmEstimate {
    double mu = 0.0;     // mm/yr
    double sigma = 0.0;  // mm/sqrt(yr)
    std::size_t increments = 0;
};

// Drift and volatility of annual means. An increment spanning g years counts as g
// unit-year increments: mu = (last - first) / elapsed, sigma^2 from (d - mu g)^2 / g
// with n - 1 degrees of freedom over the n increments.
AbmEstimate estimate_abm(std::vector<std::pair<int, double>> annual_means);

} // namespace pathways::ingest

#endif // PATHWAYS_INGEST_HPP

#include "pathways/ingest.hpp"

#include "pathways/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

namespace pathways::ingest {

namespace {

using namespace std::chrono;

std::string trim(std::string s) {
    const auto ws = [](unsigned char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n'; };
    while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

bool read_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    const auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return r.ec == std::errc{};
}

bool parse_ts(const std::string& s, sys_seconds& out) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != 'Z')
        return false;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, h) ||
        !read_int(s, 14, 2, mi) || !read_int(s, 17, 2, sec))
        return false;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return false;
    out = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
    return true;
}

bool parse_level(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto r = std::from_chars(first, s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

int year_of(sys_seconds t) { return static_cast<int>(year_month_day{floor<days>(t)}.year()); }

} // namespace

sys_seconds parse_timestamp(const std::string& text) {
    sys_seconds t;
    if (!parse_ts(trim(text), t)) throw ParseError("malformed timestamp '" + text + "'", 0);
    return t;
}

std::string format_timestamp(sys_seconds t) {
    const auto dp = floor<days>(t);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{t - dp};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

GaugeSeries GaugeSeries::from_unsorted(std::string station_id, std::vector<GaugeRecord> records) {
    for (const auto& r : records)
        if (!std::isfinite(r.level_mm)) throw StructuralError("non-finite level at " + format_timestamp(r.time), 0);
    std::stable_sort(records.begin(), records.end(),
                     [](const GaugeRecord& a, const GaugeRecord& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].time == records[i - 1].time)
            throw StructuralError("duplicate timestamp " + format_timestamp(records[i].time), 0);
    return {std::move(station_id), std::move(records)};
}

ParsedGauge parse_gauge_csv(std::istream& in, const CsvFormat& format) {
    ParsedGauge out;
    out.series.station_id = format.station_id;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (!header) {
            if (comma == std::string::npos || trim(row.substr(0, comma)) != "timestamp" ||
                trim(row.substr(comma + 1)) != "level_mm")
                throw ParseError("expected header 'timestamp,level_mm'", lineno);
            header = true;
            continue;
        }
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
            throw ParseError("expected 2 columns", lineno);
        sys_seconds t;
        if (!parse_ts(trim(row.substr(0, comma)), t)) throw ParseError("malformed timestamp", lineno);
        double level = 0.0;
        if (!parse_level(trim(row.substr(comma + 1)), level) || !std::isfinite(level))
            throw ParseError("malformed level", lineno);
        if (!out.series.records.empty() && t <= out.series.records.back().time)
            throw StructuralError("timestamp not after previous row", lineno);
        if (level == format.missing_sentinel) {
            ++out.dropped;
            continue;
        }
        out.series.records.push_back({t, level});
    }
    if (!header) throw ParseError("missing header 'timestamp,level_mm'", lineno);
    return out;
}

std::vector<AnnualStats> annual_stats(const GaugeSeries& series, double mean_tide_mm, double min_coverage) {
    if (!(min_coverage > 0.0 && min_coverage <= 1.0)) throw DomainError("min_coverage must be in (0, 1]");
    if (!std::isfinite(mean_tide_mm)) throw DomainError("mean_tide must be finite");
    std::map<int, std::vector<double>> by_year;
    for (const auto& r : series.records) by_year[year_of(r.time)].push_back(r.level_mm);

    std::vector<AnnualStats> out;
    for (const auto& [y, levels] : by_year) {
        const bool leap = year{y}.is_leap();
        const double hours_in_year = leap ? 8784.0 : 8760.0;
        if (static_cast<double>(levels.size()) < min_coverage * hours_in_year) continue;
        double sum = 0.0, mx = levels.front();
        for (double v : levels) {
            sum += v;
            mx = std::max(mx, v);
        }
        AnnualStats s;
        s.year = y;
        s.n_obs = levels.size();
        s.mean_level = sum / static_cast<double>(levels.size());
        s.max_level = mx;
        s.max_surge = mx - s.mean_level - mean_tide_mm;
        out.push_back(s);
    }
    return out;
}

void write_annual_stats(std::ostream& os, const std::vector<AnnualStats>& stats) {
    os << "year,mean_mm,max_mm,max_surge_mm,n_obs\n";
    char buf[160];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%zu\n", s.year, s.mean_level, s.max_level, s.max_surge,
                      s.n_obs);
        os << buf;
    }
}

AbmEstimate estimate_abm(std::vector<std::pair<int, double>> annual_means) {
    if (annual_means.size() < 3) throw InsufficientDataError("estimate_abm needs at least 3 annual means");
    std::sort(annual_means.begin(), annual_means.end());
    for (std::size_t i = 1; i < annual_means.size(); ++i)
        if (annual_means[i].first == annual_means[i - 1].first)
            throw DomainError("estimate_abm: duplicate year " + std::to_string(annual_means[i].first));
    for (const auto& [y, v] : annual_means)
        if (!std::isfinite(v)) throw DomainError("estimate_abm: non-finite mean for year " + std::to_string(y));

    const double elapsed = annual_means.back().first - annual_means.front().first;
    AbmEstimate e;
    e.increments = annual_means.size() - 1;
    e.mu = (annual_means.back().second - annual_means.front().second) / elapsed;
    double ss = 0.0;
    for (std::size_t i = 1; i < annual_means.size(); ++i) {
        const double g = annual_means[i].first - annual_means[i - 1].first;
        const double dev = annual_means[i].second - annual_means[i - 1].second - e.mu * g;
        ss += dev * dev / g;
    }
    e.sigma = std::sqrt(ss / static_cast<double>(e.increments - 1));
    return e;
}

} // namespace pathways::ingest

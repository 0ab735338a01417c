#include "mtfl/ingest/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "mtfl/core/error.hpp"
#include "mtfl/core/log.hpp"

namespace mtfl::ingest {

namespace {

constexpr const char *kSectorNames[kSectorCount] = {
    "progression", "demographics", "disease_mortality", "healthcare",
    "ihr",         "social_culture", "others",
};

/// Linear-interpolation quantile of a sorted sample, p in [0, 1].
double quantile_sorted(const std::vector<double> &sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1)
        return sorted[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Walks a sorted day series and checks that days 0..window-1 are all
/// present, returning pointers into it; shared by the CFR and
/// progression summaries.
std::vector<const DayRecord *> window_view(const std::string &region,
                                           std::span<const DayRecord> days, std::size_t window) {
    std::vector<const DayRecord *> view;
    view.reserve(window);
    std::size_t pos = 0;
    for (std::size_t t = 0; t < window; ++t) {
        while (pos < days.size() && days[pos].day < static_cast<long>(t))
            ++pos;
        if (pos == days.size() || days[pos].day != static_cast<long>(t))
            throw DataError("region '" + region + "': missing day " + std::to_string(t) +
                            " in the observation window");
        view.push_back(&days[pos]);
    }
    return view;
}

} // namespace

std::string sector_name(Sector s) { return kSectorNames[static_cast<std::size_t>(s)]; }

Sector parse_sector(const std::string &name) {
    for (std::size_t i = 0; i < kSectorCount; ++i)
        if (name == kSectorNames[i])
            return static_cast<Sector>(i);
    throw DataError("unknown sector name '" + name + "'");
}

bool FactorTable::any_missing() const {
    return std::any_of(missing.begin(), missing.end(), [](std::uint8_t m) { return m != 0; });
}

std::size_t FactorTable::indicator_index(const std::string &name) const {
    for (std::size_t j = 0; j < indicators.size(); ++j)
        if (indicators[j].name == name)
            return j;
    throw DataError("unknown indicator '" + name + "'");
}

FactorTable load_factor_table(const std::filesystem::path &path, const FactorSchema &schema) {
    return factor_table_from(csv::read_file(path), schema);
}

FactorTable factor_table_from(const csv::Table &table, const FactorSchema &schema) {
    const std::size_t c_region = table.column(schema.region_col);
    const std::size_t c_sector = table.column(schema.sector_col);
    const std::size_t c_indicator = table.column(schema.indicator_col);
    const std::size_t c_value = table.column(schema.value_col);

    std::set<std::string> region_set;
    std::map<std::string, Sector> indicator_sector;
    // (region, indicator) -> (value, present); empty value cell = absent.
    std::map<std::pair<std::string, std::string>, std::pair<double, bool>> cells;

    for (const auto &row : table.rows) {
        const std::string &region = row[c_region];
        const std::string &name = row[c_indicator];
        if (region.empty())
            throw DataError("factor row with empty region id");
        if (name.empty())
            throw DataError("factor row with empty indicator name");
        const Sector sector = parse_sector(row[c_sector]);

        const auto [it, inserted] = indicator_sector.emplace(name, sector);
        if (!inserted && it->second != sector)
            throw DataError("indicator '" + name + "' listed under two sectors");

        const auto key = std::make_pair(region, name);
        if (cells.count(key))
            throw DataError("duplicate cell for region '" + region + "', indicator '" + name +
                            "'");
        if (row[c_value].empty())
            cells[key] = {0.0, false};
        else
            cells[key] = {csv::parse_double(row[c_value], "factor value for region '" + region +
                                                              "', indicator '" + name + "'"),
                          true};
        region_set.insert(region);
    }

    FactorTable out;
    out.regions.assign(region_set.begin(), region_set.end()); // set order = sorted
    for (const auto &[name, sector] : indicator_sector)
        out.indicators.push_back({sector, name});
    std::sort(out.indicators.begin(), out.indicators.end(),
              [](const Indicator &a, const Indicator &b) {
                  if (a.sector != b.sector)
                      return static_cast<int>(a.sector) < static_cast<int>(b.sector);
                  return a.name < b.name;
              });

    const std::size_t r = out.regions.size(), d = out.indicators.size();
    out.values = Matrix(r, d);
    out.missing.assign(r * d, 1);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const auto it = cells.find({out.regions[i], out.indicators[j].name});
            if (it != cells.end() && it->second.second) {
                out.values(i, j) = it->second.first;
                out.missing[i * d + j] = 0;
            }
        }
    return out;
}

FactorTable impute_missing(const FactorTable &t) {
    FactorTable out = t;
    const std::size_t r = t.regions.size(), d = t.indicators.size();
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        std::size_t observed = 0;
        for (std::size_t i = 0; i < r; ++i)
            if (!t.is_missing(i, j)) {
                sum += t.values(i, j);
                ++observed;
            }
        if (observed == 0)
            throw DataError("indicator '" + t.indicators[j].name +
                            "' has no observed values to impute from");
        const double mean = sum / static_cast<double>(observed);
        for (std::size_t i = 0; i < r; ++i)
            if (t.is_missing(i, j))
                out.values(i, j) = mean;
    }
    out.missing.assign(r * d, 0);
    return out;
}

FactorTable flag_outliers(const FactorTable &t, double iqr_mult) {
    if (iqr_mult <= 0.0)
        return t;
    FactorTable out = t;
    const std::size_t r = t.regions.size(), d = t.indicators.size();
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> observed;
        for (std::size_t i = 0; i < r; ++i)
            if (!t.is_missing(i, j))
                observed.push_back(t.values(i, j));
        if (observed.size() < 4)
            continue; // too few points for meaningful quartiles
        std::sort(observed.begin(), observed.end());
        const double q1 = quantile_sorted(observed, 0.25);
        const double q3 = quantile_sorted(observed, 0.75);
        const double median = quantile_sorted(observed, 0.5);
        const double iqr = q3 - q1;
        if (iqr <= 0.0)
            continue; // no spread to judge deviations against
        std::size_t flagged = 0;
        for (std::size_t i = 0; i < r; ++i)
            if (!t.is_missing(i, j) && std::fabs(t.values(i, j) - median) > iqr_mult * iqr) {
                out.missing[i * d + j] = 1;
                ++flagged;
            }
        if (flagged > 0)
            log::info("flagged ", flagged, " outlier cell(s) in indicator '",
                      t.indicators[j].name, "'");
    }
    return out;
}

EpidemicTable load_epidemic(const std::filesystem::path &path) {
    return epidemic_from(csv::read_file(path));
}

EpidemicTable epidemic_from(const csv::Table &table) {
    const std::size_t c_region = table.column("region_id");
    const std::size_t c_day = table.column("day");
    const std::size_t c_cases = table.column("confirmed_cases");
    const std::size_t c_deaths = table.column("confirmed_deaths");

    EpidemicTable out;
    std::set<std::pair<std::string, long>> seen;
    for (const auto &row : table.rows) {
        const std::string &region = row[c_region];
        if (region.empty())
            throw DataError("epidemic row with empty region id");
        DayRecord rec;
        rec.day = static_cast<long>(csv::parse_int(row[c_day], "day for region '" + region + "'"));
        rec.cases = csv::parse_double(row[c_cases], "confirmed_cases for region '" + region + "'");
        rec.deaths =
            csv::parse_double(row[c_deaths], "confirmed_deaths for region '" + region + "'");
        if (rec.day < 0)
            throw DataError("region '" + region + "': negative day offset");
        if (rec.cases < 0 || rec.deaths < 0)
            throw DataError("region '" + region + "': negative cumulative count at day " +
                            std::to_string(rec.day));
        if (rec.deaths > rec.cases)
            throw DataError("region '" + region + "': deaths exceed cases at day " +
                            std::to_string(rec.day));
        if (!seen.insert({region, rec.day}).second)
            throw DataError("duplicate epidemic row for region '" + region + "', day " +
                            std::to_string(rec.day));
        out.series[region].push_back(rec);
    }
    for (auto &[region, days] : out.series) {
        std::sort(days.begin(), days.end(),
                  [](const DayRecord &a, const DayRecord &b) { return a.day < b.day; });
        for (std::size_t i = 1; i < days.size(); ++i)
            if (days[i].cases < days[i - 1].cases || days[i].deaths < days[i - 1].deaths)
                throw DataError("region '" + region + "': cumulative series decreases at day " +
                                std::to_string(days[i].day));
    }
    return out;
}

CfrSeries compute_cfr_series(const std::string &region, std::span<const DayRecord> days,
                             std::size_t window) {
    const auto view = window_view(region, days, window);
    CfrSeries out;
    out.region = region;
    out.cfr.resize(window);
    for (std::size_t t = 0; t < window; ++t) {
        const DayRecord &rec = *view[t];
        if (rec.deaths > rec.cases)
            throw DataError("region '" + region + "': deaths exceed cases at day " +
                            std::to_string(rec.day));
        if (rec.cases == 0.0) {
            log::warn("region '", region, "': zero confirmed cases at day ", rec.day,
                      "; CFR set to 0");
            out.cfr[t] = 0.0;
        } else {
            out.cfr[t] = rec.deaths / rec.cases;
        }
    }
    return out;
}

Dataset assemble_dataset(const FactorTable &ft, const EpidemicTable &epi, std::size_t window) {
    if (ft.any_missing())
        throw DataError("factor table still has missing cells; impute before assembly");
    Dataset out;
    out.regions = ft.regions;
    out.features = ft.indicators;
    out.x = ft.values;
    out.y = Matrix(ft.regions.size(), window);
    for (std::size_t i = 0; i < ft.regions.size(); ++i) {
        const auto it = epi.series.find(ft.regions[i]);
        if (it == epi.series.end())
            throw DataError("region '" + ft.regions[i] + "' has no epidemic series");
        const CfrSeries cfr = compute_cfr_series(ft.regions[i], it->second, window);
        for (std::size_t t = 0; t < window; ++t)
            out.y(i, t) = cfr.cfr[t];
    }
    return out;
}

ProgressionSummary progression_summary(std::span<const DayRecord> days, std::size_t prog_days,
                                       double population) {
    if (prog_days == 0)
        throw ConfigError("progression summary window must be at least 1 day");
    if (population <= 0.0)
        throw ConfigError("progression summary requires a positive population");
    const auto view = window_view("<progression>", days, prog_days);

    ProgressionSummary out;
    double prev_cases = 0.0, prev_deaths = 0.0;
    for (const DayRecord *rec : view) {
        out.daily_new_cases += rec->cases - prev_cases;
        out.daily_new_deaths += rec->deaths - prev_deaths;
        prev_cases = rec->cases;
        prev_deaths = rec->deaths;
    }
    const double span_days = static_cast<double>(prog_days);
    out.daily_new_cases /= span_days;
    out.daily_new_deaths /= span_days;
    const DayRecord &last = *view.back();
    out.active_cases = last.cases - last.deaths;
    out.cases_per_million = last.cases / population * 1e6;
    return out;
}

} // namespace mtfl::ingest

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtfl/core/csv.hpp"
#include "mtfl/core/matrix.hpp"

namespace mtfl::ingest {

// The static regional indicators fall into seven named sectors; sector
// membership drives the ablation masks and the report grouping.
enum class Sector {
    progression,
    demographics,
    disease_mortality,
    healthcare,
    ihr,
    social_culture,
    others,
};
inline constexpr std::size_t kSectorCount = 7;

std::string sector_name(Sector s);
Sector parse_sector(const std::string &name); // throws DataError on unknown names

struct Indicator {
    Sector sector;
    std::string name;
};

/// Regions x indicators static design data. Regions sort ascending by id
/// and indicators by (sector, name), so the matrix layout is independent
/// of input row order.
struct FactorTable {
    std::vector<std::string> regions;
    std::vector<Indicator> indicators;
    Matrix values;                      // regions x indicators
    std::vector<std::uint8_t> missing;  // same shape, row-major; 1 = absent

    bool is_missing(std::size_t region, std::size_t indicator) const {
        return missing[region * indicators.size() + indicator] != 0;
    }
    bool any_missing() const;
    /// Index of an indicator by name; throws DataError when absent.
    std::size_t indicator_index(const std::string &name) const;
};

/// Header-name mapping for the long-format factor CSV.
struct FactorSchema {
    std::string region_col = "region_id";
    std::string sector_col = "sector";
    std::string indicator_col = "indicator";
    std::string value_col = "value";
};

/// Long-format rows (region_id, sector, indicator, value); an empty value
/// cell marks a missing observation. Every region must carry a row
/// (possibly empty-valued) for every indicator it mentions elsewhere;
/// cells never mentioned at all are also marked missing.
FactorTable load_factor_table(const std::filesystem::path &path, const FactorSchema &schema = {});
FactorTable factor_table_from(const csv::Table &table, const FactorSchema &schema = {});

/// Replaces every missing cell with the mean of the observed values in
/// its indicator column and clears the mask. Observed cells are
/// untouched, which makes the operation idempotent. A column with no
/// observed value at all is an error naming the indicator.
FactorTable impute_missing(const FactorTable &t);

/// Flags per-indicator outliers (|value - median| > iqr_mult * IQR over
/// observed cells) as missing so a following impute_missing refills
/// them. Quartiles use linear interpolation. iqr_mult <= 0 disables.
FactorTable flag_outliers(const FactorTable &t, double iqr_mult = 3.0);

struct DayRecord {
    long day = 0;     // offset from first confirmed case, 0-based
    double cases = 0; // cumulative confirmed cases
    double deaths = 0;
};

/// Per-region cumulative series keyed by region id, each sorted by day.
struct EpidemicTable {
    std::map<std::string, std::vector<DayRecord>> series;
};

/// CSV columns: region_id, day, confirmed_cases, confirmed_deaths.
/// Rejects duplicate (region, day) rows, negative counts, deaths above
/// cases, and non-monotone cumulative series.
EpidemicTable load_epidemic(const std::filesystem::path &path);
EpidemicTable epidemic_from(const csv::Table &table);

struct CfrSeries {
    std::string region;
    std::vector<double> cfr; // one entry per day of the window, in [0,1]
};

/// cfr[t] = deaths[t] / cases[t]; a zero-case day yields 0 with a logged
/// warning. Requires every day 0..window-1 present.
CfrSeries compute_cfr_series(const std::string &region, std::span<const DayRecord> days,
                             std::size_t window);

/// Assembled raw design data: X holds the static indicator values, Y the
/// daily CFR series (group-target rewriting happens later, in the task
/// builder).
struct Dataset {
    std::vector<std::string> regions;
    std::vector<Indicator> features;
    Matrix x; // regions x features
    Matrix y; // regions x window, daily CFR
};

/// Requires a fully-imputed table and a complete window of epidemic data
/// for every region in it.
Dataset assemble_dataset(const FactorTable &ft, const EpidemicTable &epi, std::size_t window);

/// Early-window scalar summaries of a cumulative series; these fill the
/// four progression-sector indicator columns for synthetic regions (real
/// datasets ship them pre-computed the same way).
struct ProgressionSummary {
    double daily_new_cases = 0;      // mean of day-over-day case increments
    double daily_new_deaths = 0;     // mean of day-over-day death increments
    double active_cases = 0;         // cases - deaths at the last summary day
    double cases_per_million = 0;    // cases at the last summary day per 1e6 pop
};

ProgressionSummary progression_summary(std::span<const DayRecord> days, std::size_t prog_days,
                                       double population);

// Canonical names for the progression-sector indicators the augmentation
// path overwrites on synthetic rows.
inline constexpr const char *kProgressionDailyCases = "Daily new cases";
inline constexpr const char *kProgressionDailyDeaths = "Daily new deaths";
inline constexpr const char *kProgressionActiveCases = "Current active case";
inline constexpr const char *kProgressionCasesPerMillion = "Cases per million inhabitants";

} // namespace mtfl::ingest

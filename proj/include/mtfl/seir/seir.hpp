#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtfl/ingest/ingest.hpp"

namespace mtfl::seir {

/// Compartmental rates are per day. The step is normalized to
/// 1/ceil(1/dt) so integration lands exactly on day marks.
struct SeirParams {
    double beta = 0.0;  // transmission rate
    double sigma = 0.0; // incubation exit rate
    double gamma = 0.0; // recovery rate
    double mu = 0.0;    // infection fatality fraction, in [0,1]
    double n_pop = 0.0;
    double e0 = 0.0;
    double i0 = 0.0;
    std::size_t days = 0;
    double dt = 0.1;

    void validate() const; // throws ConfigError on violated invariants
};

/// Day-mark states 0..days inclusive; every array is days+1 long.
/// cum_cases counts the initially infected plus everyone who has left
/// incubation; cum_deaths is mu times the recovered-flow quadrature.
struct SeirTrajectory {
    std::vector<double> s, e, i, r;
    std::vector<double> cum_cases;
    std::vector<double> cum_deaths;

    std::size_t days() const { return s.empty() ? 0 : s.size() - 1; }
};

/// Moderate-epidemic defaults used when a config names no parameters:
/// beta 0.6, sigma 0.2, gamma 0.1, mu 0.02, n_pop 1e6, i0 10, dt 0.1.
/// days stays 0 for the caller to fill.
SeirParams default_params();

/// Classic RK4 on S' = -bSI/N, E' = bSI/N - sE, I' = sE - gI, R' = gI
/// with the two cumulative flows integrated alongside the state. A step
/// that drives a compartment negative or non-finite raises SolverError
/// advising a smaller dt.
SeirTrajectory simulate_seir(const SeirParams &p);

/// Cumulative ingest-compatible series for days 0..days.
std::vector<ingest::DayRecord> trajectory_days(const SeirTrajectory &t);

struct SyntheticSample {
    std::string region;
    SeirParams params;
    std::uint64_t seed = 0;      // per-region jitter stream
    std::vector<double> factors; // aligned with the source table's indicators
    std::vector<ingest::DayRecord> days;
};

struct Augmentation {
    std::vector<SyntheticSample> samples;
};

/// count synthetic regions cloned from template_region: static factors
/// jittered by a relative uniform +-jitter, progression columns
/// recomputed from the simulated series, epidemic series taken from the
/// trajectory. Params cycle through variants; sample j draws from the
/// stream mix_seed(seed, j). The template row must be fully observed.
Augmentation synthesize_samples(const ingest::FactorTable &table,
                                const std::string &template_region,
                                std::span<const SeirParams> variants, std::size_t count,
                                std::uint64_t seed, double jitter = 0.05);

/// Splices the synthetic rows into the factor table (regions stay
/// sorted, all cells observed) and adds their series to the epidemic
/// table. Rejects region-id collisions.
void append_samples(ingest::FactorTable &table, ingest::EpidemicTable &epi,
                    const Augmentation &aug);

/// JSON manifest recording params and seed per synthetic region.
std::string augmentation_manifest(const Augmentation &aug);

} // namespace mtfl::seir

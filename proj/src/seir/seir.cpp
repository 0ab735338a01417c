#include "mtfl/seir/seir.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mtfl/core/error.hpp"
#include "mtfl/core/rng.hpp"

namespace mtfl::seir {

namespace {

// State layout: S, E, I, R, case flow quadrature, death flow quadrature.
using State = std::array<double, 6>;

State derivative(const SeirParams &p, const State &y) {
    const double infection = p.beta * y[0] * y[2] / p.n_pop;
    const double incubation = p.sigma * y[1];
    const double recovery = p.gamma * y[2];
    return {-infection, infection - incubation, incubation - recovery, recovery, incubation,
            recovery};
}

State rk4_step(const SeirParams &p, const State &y, double h) {
    const State k1 = derivative(p, y);
    State mid;
    for (std::size_t j = 0; j < 6; ++j)
        mid[j] = y[j] + 0.5 * h * k1[j];
    const State k2 = derivative(p, mid);
    for (std::size_t j = 0; j < 6; ++j)
        mid[j] = y[j] + 0.5 * h * k2[j];
    const State k3 = derivative(p, mid);
    State end;
    for (std::size_t j = 0; j < 6; ++j)
        end[j] = y[j] + h * k3[j];
    const State k4 = derivative(p, end);
    State out;
    for (std::size_t j = 0; j < 6; ++j)
        out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    return out;
}

} // namespace

SeirParams default_params() {
    SeirParams p;
    p.beta = 0.6;
    p.sigma = 0.2;
    p.gamma = 0.1;
    p.mu = 0.02;
    p.n_pop = 1e6;
    p.i0 = 10.0;
    p.dt = 0.1;
    return p;
}

void SeirParams::validate() const {
    if (beta < 0.0 || sigma < 0.0 || gamma < 0.0)
        throw ConfigError("seir: rates must be non-negative");
    if (mu < 0.0 || mu > 1.0)
        throw ConfigError("seir: mu must lie in [0, 1]");
    if (!(n_pop > 0.0))
        throw ConfigError("seir: n_pop must be positive");
    if (e0 < 0.0 || i0 < 0.0 || e0 + i0 > n_pop)
        throw ConfigError("seir: initial compartments must be non-negative and fit n_pop");
    if (days == 0)
        throw ConfigError("seir: days must be at least 1");
    if (!(dt > 0.0) || dt > 1.0)
        throw ConfigError("seir: dt must lie in (0, 1]");
}

SeirTrajectory simulate_seir(const SeirParams &p) {
    p.validate();
    const std::size_t steps_per_day = static_cast<std::size_t>(std::ceil(1.0 / p.dt));
    const double h = 1.0 / static_cast<double>(steps_per_day);

    SeirTrajectory out;
    const std::size_t marks = p.days + 1;
    out.s.reserve(marks);
    out.e.reserve(marks);
    out.i.reserve(marks);
    out.r.reserve(marks);
    out.cum_cases.reserve(marks);
    out.cum_deaths.reserve(marks);

    State y{p.n_pop - p.e0 - p.i0, p.e0, p.i0, 0.0, 0.0, 0.0};
    const auto record = [&] {
        out.s.push_back(y[0]);
        out.e.push_back(y[1]);
        out.i.push_back(y[2]);
        out.r.push_back(y[3]);
        out.cum_cases.push_back(p.i0 + y[4]);
        out.cum_deaths.push_back(p.mu * y[5]);
    };
    record();

    for (std::size_t day = 0; day < p.days; ++day) {
        for (std::size_t step = 0; step < steps_per_day; ++step) {
            y = rk4_step(p, y, h);
            for (std::size_t j = 0; j < 4; ++j) {
                if (!std::isfinite(y[j]) || y[j] < -1e-12 * p.n_pop)
                    throw SolverError("seir: step left a compartment negative; use a smaller dt");
                y[j] = std::max(y[j], 0.0); // absorb roundoff at the axis
            }
        }
        record();
    }
    return out;
}

std::vector<ingest::DayRecord> trajectory_days(const SeirTrajectory &t) {
    std::vector<ingest::DayRecord> days(t.s.size());
    for (std::size_t d = 0; d < days.size(); ++d)
        days[d] = {static_cast<long>(d), t.cum_cases[d], t.cum_deaths[d]};
    return days;
}

Augmentation synthesize_samples(const ingest::FactorTable &table,
                                const std::string &template_region,
                                std::span<const SeirParams> variants, std::size_t count,
                                std::uint64_t seed, double jitter) {
    if (count == 0)
        throw ConfigError("synthesize_samples: count must be at least 1");
    if (variants.empty())
        throw ConfigError("synthesize_samples: need at least one parameter variant");
    if (jitter < 0.0 || jitter >= 1.0)
        throw ConfigError("synthesize_samples: jitter must lie in [0, 1)");
    const auto row_it = std::find(table.regions.begin(), table.regions.end(), template_region);
    if (row_it == table.regions.end())
        throw DataError("synthesize_samples: unknown template region " + template_region);
    const std::size_t row = static_cast<std::size_t>(row_it - table.regions.begin());
    const std::size_t n_ind = table.indicators.size();
    for (std::size_t j = 0; j < n_ind; ++j)
        if (table.is_missing(row, j))
            throw DataError("synthesize_samples: template row has missing cells; impute first");

    Augmentation aug;
    aug.samples.resize(count);
    for (std::size_t c = 0; c < count; ++c) {
        SyntheticSample &sample = aug.samples[c];
        sample.params = variants[c % variants.size()];
        sample.seed = mix_seed(seed, c);
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "-syn-%02zu", c + 1);
        sample.region = template_region + suffix;

        const SeirTrajectory traj = simulate_seir(sample.params);
        sample.days = trajectory_days(traj);
        const ingest::ProgressionSummary prog =
            ingest::progression_summary(sample.days, sample.days.size(), sample.params.n_pop);

        Rng rng(sample.seed);
        sample.factors.resize(n_ind);
        for (std::size_t j = 0; j < n_ind; ++j) {
            const double wiggle = 1.0 + jitter * (2.0 * rng.uniform() - 1.0);
            sample.factors[j] = table.values(row, j) * wiggle;
        }
        // Progression columns describe the simulated series, not the template.
        for (std::size_t j = 0; j < n_ind; ++j) {
            if (table.indicators[j].sector != ingest::Sector::progression)
                continue;
            const std::string &name = table.indicators[j].name;
            if (name == ingest::kProgressionDailyCases)
                sample.factors[j] = prog.daily_new_cases;
            else if (name == ingest::kProgressionDailyDeaths)
                sample.factors[j] = prog.daily_new_deaths;
            else if (name == ingest::kProgressionActiveCases)
                sample.factors[j] = prog.active_cases;
            else if (name == ingest::kProgressionCasesPerMillion)
                sample.factors[j] = prog.cases_per_million;
        }
    }
    return aug;
}

void append_samples(ingest::FactorTable &table, ingest::EpidemicTable &epi,
                    const Augmentation &aug) {
    const std::size_t n_ind = table.indicators.size();
    for (const SyntheticSample &sample : aug.samples) {
        if (sample.factors.size() != n_ind)
            throw DataError("append_samples: factor width mismatch for " + sample.region);
        if (std::binary_search(table.regions.begin(), table.regions.end(), sample.region))
            throw DataError("append_samples: region id collision on " + sample.region);
        if (epi.series.count(sample.region))
            throw DataError("append_samples: epidemic series collision on " + sample.region);
    }

    const std::size_t n_old = table.regions.size();
    const std::size_t n_new = n_old + aug.samples.size();
    std::vector<std::string> regions = table.regions;
    for (const SyntheticSample &sample : aug.samples)
        regions.push_back(sample.region);
    std::vector<std::size_t> order(n_new);
    for (std::size_t i = 0; i < n_new; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return regions[a] < regions[b]; });

    Matrix values(n_new, n_ind);
    std::vector<std::uint8_t> missing(n_new * n_ind, 0);
    std::vector<std::string> sorted(n_new);
    for (std::size_t i = 0; i < n_new; ++i) {
        const std::size_t src = order[i];
        sorted[i] = regions[src];
        for (std::size_t j = 0; j < n_ind; ++j) {
            if (src < n_old) {
                values(i, j) = table.values(src, j);
                missing[i * n_ind + j] = table.missing[src * n_ind + j];
            } else {
                values(i, j) = aug.samples[src - n_old].factors[j];
            }
        }
    }
    table.regions = std::move(sorted);
    table.values = std::move(values);
    table.missing = std::move(missing);

    for (const SyntheticSample &sample : aug.samples)
        epi.series[sample.region] = sample.days;
}

std::string augmentation_manifest(const Augmentation &aug) {
    nlohmann::json doc;
    doc["samples"] = nlohmann::json::array();
    for (const SyntheticSample &sample : aug.samples) {
        nlohmann::json entry;
        entry["region"] = sample.region;
        entry["seed"] = sample.seed;
        entry["params"] = {{"beta", sample.params.beta},   {"sigma", sample.params.sigma},
                           {"gamma", sample.params.gamma}, {"mu", sample.params.mu},
                           {"n_pop", sample.params.n_pop}, {"e0", sample.params.e0},
                           {"i0", sample.params.i0},       {"days", sample.params.days},
                           {"dt", sample.params.dt}};
        doc["samples"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

} // namespace mtfl::seir

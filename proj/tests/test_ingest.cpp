#include <doctest.h>

#include <string>
#include <vector>

#include "mtfl/core/csv.hpp"
#include "mtfl/core/error.hpp"
#include "mtfl/ingest/ingest.hpp"

using namespace mtfl;
namespace ig = mtfl::ingest;

namespace {

const std::string kFactorsHeader = "region_id,sector,indicator,value\n";

std::string small_factors() {
    return kFactorsHeader +
           "DE,demographics,Aging rate,21.5\n"
           "DE,healthcare,Beds per million,8000\n"
           "DE,others,Air quality,42\n"
           "FR,demographics,Aging rate,20.1\n"
           "FR,healthcare,Beds per million,5900\n"
           "FR,others,Air quality,55\n";
}

ig::FactorTable table_from(const std::string &text) {
    return ig::factor_table_from(csv::read_string(text));
}

std::vector<ig::DayRecord> days_from(std::vector<std::pair<double, double>> cd) {
    std::vector<ig::DayRecord> out;
    for (std::size_t t = 0; t < cd.size(); ++t)
        out.push_back({static_cast<long>(t), cd[t].first, cd[t].second});
    return out;
}

} // namespace

TEST_CASE("factor table loads with sorted regions and sector-grouped indicators") {
    const auto t = table_from(small_factors());
    REQUIRE(t.regions == std::vector<std::string>{"DE", "FR"});
    REQUIRE(t.indicators.size() == 3);
    CHECK(t.indicators[0].name == "Aging rate");
    CHECK(t.indicators[0].sector == ig::Sector::demographics);
    CHECK(t.indicators[1].name == "Beds per million");
    CHECK(t.indicators[2].name == "Air quality");
    CHECK(t.values(0, 0) == 21.5);
    CHECK(t.values(1, 1) == 5900);
    CHECK_FALSE(t.any_missing());
}

TEST_CASE("factor table is independent of input row order") {
    // Same cells, reversed row order.
    std::string reversed = kFactorsHeader;
    const auto body = small_factors().substr(kFactorsHeader.size());
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < body.size()) {
        const auto end = body.find('\n', start);
        lines.push_back(body.substr(start, end - start));
        start = end + 1;
    }
    for (auto it = lines.rbegin(); it != lines.rend(); ++it)
        reversed += *it + "\n";

    const auto a = table_from(small_factors());
    const auto b = table_from(reversed);
    CHECK(a.regions == b.regions);
    CHECK(a.values == b.values);
    CHECK(a.missing == b.missing);
}

TEST_CASE("empty value cells set the missing mask") {
    const auto t = table_from(kFactorsHeader + "DE,others,Air quality,42\n"
                                               "FR,others,Air quality,\n");
    CHECK_FALSE(t.is_missing(0, 0));
    CHECK(t.is_missing(1, 0));
}

TEST_CASE("cells never mentioned are missing too") {
    const auto t = table_from(kFactorsHeader + "DE,others,Air quality,42\n"
                                               "DE,demographics,Aging rate,21\n"
                                               "FR,others,Air quality,55\n");
    // FR never mentions Aging rate.
    const auto j = t.indicator_index("Aging rate");
    CHECK(t.is_missing(1, j));
    CHECK_FALSE(t.is_missing(0, j));
}

TEST_CASE("factor table load rejects malformed input") {
    CHECK_THROWS_AS(table_from(kFactorsHeader + "DE,others,Air quality,42\n"
                                                "DE,others,Air quality,43\n"),
                    DataError); // duplicate cell
    CHECK_THROWS_AS(table_from(kFactorsHeader + "DE,weather,Air quality,42\n"),
                    DataError); // unknown sector
    CHECK_THROWS_AS(table_from(kFactorsHeader + "DE,others,Air quality,abc\n"),
                    DataError); // non-numeric
    CHECK_THROWS_AS(table_from(kFactorsHeader + "DE,others,Air quality,42\n"
                                                "FR,healthcare,Air quality,42\n"),
                    DataError); // one indicator, two sectors
}

TEST_CASE("imputation fills with the observed column mean") {
    const auto t = table_from(kFactorsHeader + "A,others,Air quality,1\n"
                                               "B,others,Air quality,\n"
                                               "C,others,Air quality,3\n");
    const auto filled = ig::impute_missing(t);
    CHECK(filled.values(0, 0) == 1);
    CHECK(filled.values(1, 0) == 2); // mean of {1, 3}
    CHECK(filled.values(2, 0) == 3);
    CHECK_FALSE(filled.any_missing());

    // Idempotent: a second pass changes nothing.
    const auto twice = ig::impute_missing(filled);
    CHECK(twice.values == filled.values);

    // Column mean over all cells equals the observed mean exactly.
    double sum = 0;
    for (std::size_t i = 0; i < 3; ++i)
        sum += filled.values(i, 0);
    CHECK(sum / 3 == 2.0);
}

TEST_CASE("imputation with no missing cells is the identity") {
    const auto t = table_from(small_factors());
    const auto filled = ig::impute_missing(t);
    CHECK(filled.values == t.values);
}

TEST_CASE("a fully-missing indicator is an error naming it") {
    const auto t = table_from(kFactorsHeader + "A,others,Air quality,\n"
                                               "B,others,Air quality,\n");
    CHECK_THROWS_WITH_AS(ig::impute_missing(t), doctest::Contains("Air quality"), DataError);
}

TEST_CASE("outlier flagging marks far cells missing and skips flat columns") {
    std::string text = kFactorsHeader;
    // Indicator "spread": tight cluster plus one far point.
    const double spread_vals[] = {10, 11, 12, 13, 14, 500};
    // Indicator "flat": identical values (IQR 0) must never be flagged.
    for (int i = 0; i < 6; ++i) {
        const std::string region = "R" + std::to_string(i);
        text += region + ",others,spread," + std::to_string(spread_vals[i]) + "\n";
        text += region + ",others,flat,7\n";
    }
    const auto t = table_from(text);
    const auto flagged = ig::flag_outliers(t, 3.0);
    const auto j_spread = flagged.indicator_index("spread");
    const auto j_flat = flagged.indicator_index("flat");
    int n_flagged = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        if (flagged.is_missing(i, j_spread))
            ++n_flagged;
        CHECK_FALSE(flagged.is_missing(i, j_flat));
    }
    CHECK(n_flagged == 1);
    // The flagged cell is the 500.
    CHECK(flagged.is_missing(5, j_spread));

    // Disabled filter is the identity.
    const auto off = ig::flag_outliers(t, 0.0);
    CHECK(off.missing == t.missing);
}

TEST_CASE("cfr series divides cumulative deaths by cases") {
    const auto days = days_from({{896000, 45000}});
    const auto cfr = ig::compute_cfr_series("X", days, 1);
    CHECK(cfr.cfr[0] == doctest::Approx(0.050223).epsilon(1e-4));
}

TEST_CASE("cfr series handles zero numerator and zero denominator") {
    const auto days = days_from({{100, 0}, {0, 0}});
    // Day 1 has zero cases (constructed, not cumulative-consistent; the
    // direct entry point does not re-validate monotonicity).
    const auto cfr = ig::compute_cfr_series("X", days, 2);
    CHECK(cfr.cfr[0] == 0.0);
    CHECK(cfr.cfr[1] == 0.0);
}

TEST_CASE("cfr series validates the window") {
    const auto days = days_from({{10, 1}, {20, 2}});
    CHECK_THROWS_AS(ig::compute_cfr_series("X", days, 3), DataError); // missing day 2
    std::vector<ig::DayRecord> bad = {{0, 10, 11}};
    CHECK_THROWS_AS(ig::compute_cfr_series("X", bad, 1), DataError); // deaths > cases
}

TEST_CASE("epidemic loader validates counts and uniqueness") {
    const std::string header = "region_id,day,confirmed_cases,confirmed_deaths\n";
    const auto ok = ig::epidemic_from(csv::read_string(header + "A,1,20,2\nA,0,10,1\n"));
    REQUIRE(ok.series.at("A").size() == 2);
    CHECK(ok.series.at("A")[0].day == 0); // sorted by day

    CHECK_THROWS_AS(ig::epidemic_from(csv::read_string(header + "A,0,10,1\nA,0,11,1\n")),
                    DataError); // duplicate day
    CHECK_THROWS_AS(ig::epidemic_from(csv::read_string(header + "A,0,10,12\n")),
                    DataError); // deaths > cases
    CHECK_THROWS_AS(ig::epidemic_from(csv::read_string(header + "A,0,10,1\nA,1,5,1\n")),
                    DataError); // cases decrease
    CHECK_THROWS_AS(ig::epidemic_from(csv::read_string(header + "A,0,-1,-2\n")),
                    DataError); // negative counts
}

TEST_CASE("assemble_dataset shapes X and Y and rejects incomplete input") {
    const auto ft = ig::impute_missing(table_from(small_factors()));
    const std::string header = "region_id,day,confirmed_cases,confirmed_deaths\n";
    std::string epi_text = header;
    for (const std::string region : {"DE", "FR"})
        for (int day = 0; day < 3; ++day)
            epi_text += region + "," + std::to_string(day) + "," +
                        std::to_string(100 * (day + 1)) + "," + std::to_string(5 * (day + 1)) +
                        "\n";
    const auto epi = ig::epidemic_from(csv::read_string(epi_text));

    const auto ds = ig::assemble_dataset(ft, epi, 3);
    CHECK(ds.x.rows() == 2);
    CHECK(ds.x.cols() == 3);
    CHECK(ds.y.rows() == 2);
    CHECK(ds.y.cols() == 3);
    CHECK(ds.y(0, 0) == doctest::Approx(0.05));
    CHECK(ds.regions == std::vector<std::string>{"DE", "FR"});

    // Unimputed table rejected.
    const auto raw = table_from(kFactorsHeader + "DE,others,Air quality,\n"
                                                 "FR,others,Air quality,1\n");
    CHECK_THROWS_AS(ig::assemble_dataset(raw, epi, 3), DataError);

    // Region without epidemic rows rejected.
    ig::EpidemicTable partial = epi;
    partial.series.erase("FR");
    CHECK_THROWS_WITH_AS(ig::assemble_dataset(ft, partial, 3), doctest::Contains("FR"),
                         DataError);
}

TEST_CASE("progression summary reduces the early window to four scalars") {
    // Cumulative cases 4,10,18; deaths 1,2,4 over three days.
    const auto days = days_from({{4, 1}, {10, 2}, {18, 4}});
    const auto s = ig::progression_summary(days, 3, 2e6);
    CHECK(s.daily_new_cases == doctest::Approx(6.0));  // (4+6+8)/3
    CHECK(s.daily_new_deaths == doctest::Approx(4.0 / 3.0));
    CHECK(s.active_cases == doctest::Approx(14.0));    // 18 - 4
    CHECK(s.cases_per_million == doctest::Approx(9.0)); // 18 / 2e6 * 1e6

    CHECK_THROWS_AS(ig::progression_summary(days, 0, 2e6), ConfigError);
    CHECK_THROWS_AS(ig::progression_summary(days, 3, 0.0), ConfigError);
    CHECK_THROWS_AS(ig::progression_summary(days, 4, 2e6), DataError); // window too long
}

TEST_CASE("sector names round-trip") {
    for (std::size_t i = 0; i < ig::kSectorCount; ++i) {
        const auto s = static_cast<ig::Sector>(i);
        CHECK(ig::parse_sector(ig::sector_name(s)) == s);
    }
    CHECK_THROWS_AS(ig::parse_sector("nope"), DataError);
}

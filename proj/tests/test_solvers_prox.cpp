#include <doctest.h>

#include <cmath>
#include <span>
#include <vector>

#include "mtfl/core/rng.hpp"
#include "mtfl/solvers/prox.hpp"
#include "oracles.hpp"

using mtfl::Rng;
using mtfl::solvers::prox_flsa;
using mtfl::solvers::prox_fsgl_row;
using mtfl::solvers::prox_group_l2;
using mtfl::solvers::prox_l1;

namespace {

std::vector<double> random_vec(Rng &rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto &x : v)
        x = scale * rng.normal();
    return v;
}

double dist2(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

/// Closed-form fused-lasso prox for exactly two points: both move toward
/// each other by tau until they meet at the mean.
std::vector<double> flsa2_closed_form(double a, double b, double tau) {
    if (std::fabs(a - b) <= 2.0 * tau) {
        const double m = 0.5 * (a + b);
        return {m, m};
    }
    const double dir = (b > a) ? 1.0 : -1.0;
    return {a + dir * tau, b - dir * tau};
}

} // namespace

TEST_CASE("prox_l1 soft threshold known values") {
    std::vector<double> v = {3.0, -1.5, 0.2, -0.2, 0.0};
    std::vector<double> out(v.size());
    prox_l1(v, 0.5, out);
    CHECK(out[0] == doctest::Approx(2.5));
    CHECK(out[1] == doctest::Approx(-1.0));
    CHECK(out[2] == 0.0);
    CHECK(out[3] == 0.0);
    CHECK(out[4] == 0.0);
}

TEST_CASE("prox_flsa two-point pinned values") {
    std::vector<double> v = {1.0, 0.0};
    std::vector<double> out(2);

    prox_flsa(v, 0.2, out);
    CHECK(out[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.2).epsilon(1e-12));

    prox_flsa(v, 0.5, out);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Beyond the fusion point the pair stays at its mean.
    prox_flsa(v, 0.9, out);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("prox_flsa matches two-point closed form on random pairs") {
    Rng rng(0xf15a0001u);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = 3.0 * rng.normal();
        const double b = 3.0 * rng.normal();
        const double tau = 2.0 * rng.uniform();
        std::vector<double> v = {a, b}, out(2);
        prox_flsa(v, tau, out);
        const auto expect = flsa2_closed_form(a, b, tau);
        CHECK(out[0] == doctest::Approx(expect[0]).epsilon(1e-12));
        CHECK(out[1] == doctest::Approx(expect[1]).epsilon(1e-12));
    }
}

TEST_CASE("prox_flsa is equivariant under constant shifts") {
    Rng rng(0xf15a0002u);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(10);
        const auto v = random_vec(rng, n, 2.0);
        const double c = 5.0 * rng.normal();
        const double tau = rng.uniform();
        std::vector<double> shifted(v);
        for (auto &x : shifted)
            x += c;
        std::vector<double> out_a(n), out_b(n);
        prox_flsa(v, tau, out_a);
        prox_flsa(shifted, tau, out_b);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(out_b[i] == doctest::Approx(out_a[i] + c).epsilon(1e-10));
    }
}

TEST_CASE("prox_flsa matches grid oracle for three points") {
    Rng rng(0xf15a0003u);
    for (int trial = 0; trial < 20; ++trial) {
        const auto v = random_vec(rng, 3, 1.5);
        oracles::ProxTaus taus;
        taus.tv = 0.1 + rng.uniform();
        std::vector<double> out(3);
        prox_flsa(v, taus.tv, out);
        const double ours = oracles::prox_objective(out, v, taus);
        const double oracle = oracles::grid_min_objective(v, taus);
        CHECK(ours <= oracle + 1e-9);
        CHECK(oracle <= ours + 1e-7);
    }
}

TEST_CASE("prox_flsa output beats random candidates on longer vectors") {
    Rng rng(0xf15a0004u);
    const std::size_t n = 12;
    const auto v = random_vec(rng, n, 2.0);
    oracles::ProxTaus taus;
    taus.tv = 0.35;
    std::vector<double> out(n);
    prox_flsa(v, taus.tv, out);
    const double ours = oracles::prox_objective(out, v, taus);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> cand(n);
        const double radius = 0.5 * rng.uniform();
        for (std::size_t i = 0; i < n; ++i)
            cand[i] = out[i] + radius * rng.normal();
        CHECK(ours <= oracles::prox_objective(cand, v, taus) + 1e-12);
    }
}

TEST_CASE("prox_group_l2 scales or zeroes whole vectors") {
    std::vector<double> v = {3.0, 4.0}; // norm 5
    std::vector<double> out(2);
    prox_group_l2(v, 2.0, out);
    CHECK(out[0] == doctest::Approx(3.0 * 0.6).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(4.0 * 0.6).epsilon(1e-12));

    prox_group_l2(v, 5.0, out);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);

    prox_group_l2(v, 7.5, out);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
}

TEST_CASE("prox_fsgl_row reduces to its parts when other weights vanish") {
    Rng rng(0xf15a0005u);
    const std::size_t n = 9;
    const auto v = random_vec(rng, n, 2.0);
    std::vector<double> composed(n), single(n);

    prox_fsgl_row(v, 0.4, 0.0, 0.0, composed);
    prox_l1(v, 0.4, single);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(composed[i] == doctest::Approx(single[i]).epsilon(1e-12));

    prox_fsgl_row(v, 0.0, 0.3, 0.0, composed);
    prox_flsa(v, 0.3, single);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(composed[i] == doctest::Approx(single[i]).epsilon(1e-12));

    prox_fsgl_row(v, 0.0, 0.0, 0.7, composed);
    prox_group_l2(v, 0.7, single);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(composed[i] == doctest::Approx(single[i]).epsilon(1e-12));
}

TEST_CASE("prox_fsgl_row matches grid oracle for three points") {
    Rng rng(0xf15a0006u);
    for (int trial = 0; trial < 10; ++trial) {
        const auto v = random_vec(rng, 3, 1.5);
        oracles::ProxTaus taus;
        taus.l1 = 0.3 * rng.uniform();
        taus.tv = 0.3 * rng.uniform();
        taus.group = 0.3 * rng.uniform();
        std::vector<double> out(3);
        prox_fsgl_row(v, taus.l1, taus.tv, taus.group, out);
        const double ours = oracles::prox_objective(out, v, taus);
        const double oracle = oracles::grid_min_objective(v, taus);
        CHECK(ours <= oracle + 1e-9);
        CHECK(oracle <= ours + 1e-7);
    }
}

TEST_CASE("prox_fsgl_row matches subgradient oracle on longer vectors") {
    Rng rng(0xf15a0007u);
    for (int trial = 0; trial < 3; ++trial) {
        const auto v = random_vec(rng, 9, 2.0);
        oracles::ProxTaus taus;
        taus.l1 = 0.25;
        taus.tv = 0.4;
        taus.group = 0.5;
        std::vector<double> out(9);
        prox_fsgl_row(v, taus.l1, taus.tv, taus.group, out);
        const double ours = oracles::prox_objective(out, v, taus);
        const double oracle = oracles::subgradient_min_objective(v, taus);
        CHECK(ours <= oracle + 1e-9);
        CHECK(oracle <= ours + 1e-3);
    }
}

TEST_CASE("prox_fsgl_row output beats random candidates") {
    Rng rng(0xf15a0008u);
    const std::size_t n = 14;
    const auto v = random_vec(rng, n, 2.0);
    oracles::ProxTaus taus;
    taus.l1 = 0.2;
    taus.tv = 0.3;
    taus.group = 0.6;
    std::vector<double> out(n);
    prox_fsgl_row(v, taus.l1, taus.tv, taus.group, out);
    const double ours = oracles::prox_objective(out, v, taus);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> cand(n);
        const double radius = 0.4 * rng.uniform();
        for (std::size_t i = 0; i < n; ++i)
            cand[i] = out[i] + radius * rng.normal();
        CHECK(ours <= oracles::prox_objective(cand, v, taus) + 1e-12);
    }
}

TEST_CASE("prox operators are non-expansive") {
    Rng rng(0xf15a0009u);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(12);
        const auto a = random_vec(rng, n, 3.0);
        const auto b = random_vec(rng, n, 3.0);
        std::vector<double> pa(n), pb(n);
        const double gap = dist2(a, b) + 1e-12;

        prox_l1(a, 0.5, pa);
        prox_l1(b, 0.5, pb);
        CHECK(dist2(pa, pb) <= gap);

        prox_flsa(a, 0.5, pa);
        prox_flsa(b, 0.5, pb);
        CHECK(dist2(pa, pb) <= gap);

        prox_group_l2(a, 0.5, pa);
        prox_group_l2(b, 0.5, pb);
        CHECK(dist2(pa, pb) <= gap);

        prox_fsgl_row(a, 0.3, 0.4, 0.5, pa);
        prox_fsgl_row(b, 0.3, 0.4, 0.5, pb);
        CHECK(dist2(pa, pb) <= gap);
    }
}

TEST_CASE("prox operators accept aliased output") {
    Rng rng(0xf15a000au);
    const std::size_t n = 11;
    const auto v = random_vec(rng, n, 2.0);

    std::vector<double> expect(n), in_place(v);
    prox_fsgl_row(v, 0.2, 0.3, 0.4, expect);
    prox_fsgl_row(in_place, 0.2, 0.3, 0.4, in_place);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(in_place[i] == doctest::Approx(expect[i]).epsilon(1e-12));

    std::vector<double> tv_in_place(v);
    prox_flsa(v, 0.3, expect);
    prox_flsa(tv_in_place, 0.3, tv_in_place);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(tv_in_place[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

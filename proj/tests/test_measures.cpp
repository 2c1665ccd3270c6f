#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aperiodica/measures.hpp"
#include "aperiodica/scheme.hpp"

#include <cmath>

using namespace aperiodica;
using namespace aperiodica::measures;
using groups::SetDescriptor;
using groups::SpaceDescriptor;
using groups::VanHoveSpec;

namespace {

Rational rat(long long n, long long d = 1) { return Rational(n, d); }

// Dirac comb on step*Z + offset over the real patch [lo, hi)
PointMeasure arith_comb(long long step, long long offset, long long lo, long long hi) {
    PointMeasure mu;
    mu.patch = SetDescriptor::interval(rat(lo), rat(hi));
    mu.nonnegative = true;
    long long first = lo + ((offset - lo) % step + step) % step;
    for (long long v = first; v < hi; v += step) mu.atoms.push_back({double(v), {1, 0}, {}, false});
    return mu;
}

cps::PointSet arith_points_z(long long step, long long offset, long long lo, long long hi) {
    cps::PointSet ps;
    ps.patch = SetDescriptor::integer_range(lo, hi);
    ps.integral = true;
    long long first = lo + ((offset - lo) % step + step) % step;
    for (long long v = first; v < hi; v += step) {
        ps.xs.push_back(double(v));
        ps.coords.push_back({v, 0});
    }
    return ps;
}

}  // namespace

TEST_CASE("bump predicates: tent and plateau") {
    auto t = BumpFunction::tent(rat(1, 2));
    CHECK(t.radius() == rat(1, 2));
    CHECK(t.unit_range());
    CHECK(t.peak_at_origin());
    CHECK(t.eval(0.25) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t.eval(0.5) == 0.0);
    CHECK(t.eval(-0.7) == 0.0);

    auto p = BumpFunction::plateau(rat(1), rat(1, 2));
    CHECK(p.radius() == rat(3, 2));
    CHECK(p.unit_range());
    CHECK(p.peak_at_origin());
    CHECK(p.eval(0.9) == 1.0);
    CHECK(p.eval(1.25) == doctest::Approx(0.5).epsilon(1e-15));

    auto scaled = BumpFunction::from_profile(cps::WeightFunction::tent(rat(0), rat(2)));
    CHECK(scaled.radius() == rat(2));
    CHECK_THROWS_AS(BumpFunction::plateau(rat(0), rat(1)), std::invalid_argument);
}

TEST_CASE("smooth: convolution values against hand checks") {
    PointMeasure dz = arith_comb(1, 0, -100, 101);
    auto tent_half = BumpFunction::tent(rat(1, 2));
    CHECK(smooth(tent_half, dz, 0.25).value.real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(smooth(tent_half, dz, 0.25).truncated);

    PointMeasure zero;
    zero.patch = SetDescriptor::interval(rat(-10), rat(10));
    CHECK(smooth(tent_half, zero, 1.0).value == std::complex<double>{0, 0});

    // tent of half-width 1 vanishes exactly at the two flanking even integers
    PointMeasure d2z = arith_comb(2, 0, -100, 101);
    CHECK(smooth(BumpFunction::tent(rat(1)), d2z, 1.0).value.real() == 0.0);
}

TEST_CASE("smooth: truncation flag near the patch edge") {
    PointMeasure dz = arith_comb(1, 0, -10, 11);
    auto phi = BumpFunction::tent(rat(1));
    CHECK_FALSE(smooth(phi, dz, 9.0).truncated);
    CHECK(smooth(phi, dz, 10.5).truncated);
    CHECK(smooth(phi, dz, -9.5).truncated);
}

TEST_CASE("smooth: linearity and translation covariance") {
    auto phi = BumpFunction::tent(rat(1));
    PointMeasure mu = arith_comb(2, 0, -50, 51);
    PointMeasure nu = arith_comb(3, 1, -50, 51);
    PointMeasure combo;
    combo.patch = mu.patch;
    for (const auto& a : mu.atoms) combo.atoms.push_back({a.x, 2.0 * a.w, {}, false});
    for (const auto& a : nu.atoms) combo.atoms.push_back({a.x, {0.0, -0.5}, {}, false});
    std::sort(combo.atoms.begin(), combo.atoms.end(),
              [](const auto& a, const auto& b) { return a.x < b.x; });
    for (double x : {0.3, 1.7, -4.25}) {
        auto lhs = smooth(phi, combo, x).value;
        auto rhs = 2.0 * smooth(phi, mu, x).value +
                   std::complex<double>{0.0, -0.5} * smooth(phi, nu, x).value;
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }

    PointMeasure shifted = translated(mu, 0.5);
    for (double x : {0.25, 3.75}) {
        CHECK(smooth(phi, shifted, x + 0.5).value.real() == smooth(phi, mu, x).value.real());
    }
}

TEST_CASE("sample_smooth covers a grid and counts truncated samples") {
    PointMeasure dz = arith_comb(1, 0, -10, 11);
    auto phi = BumpFunction::tent(rat(1, 2));
    auto f = sample_smooth(phi, dz, -5.0, 0.25, 41, kern::Exec::Serial);
    CHECK(f.values.size() == 41);
    CHECK(f.values[0] == 1.0);   // x = -5 sits on an atom
    CHECK(f.values[1] == 0.5);   // x = -4.75
    CHECK(f.truncated_count == 0);
    auto g = sample_smooth(phi, dz, -5.0, 0.25, 41, kern::Exec::Parallel);
    CHECK(f.values == g.values);

    auto edge = sample_smooth(phi, dz, 9.8, 0.25, 4, kern::Exec::Serial);
    CHECK(edge.truncated_count > 0);
}

TEST_CASE("mean_estimate: integer comb has mean one, uniformly over shifts") {
    PointMeasure dz = arith_comb(1, 0, -102, 103);
    VanHoveSpec v(SpaceDescriptor::real_line());
    auto est = mean_estimate(dz, v, 100, {0.0, 0.5});
    CHECK(est.real_value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.translate_spread <= 1.0 / 100 + 1e-12);
    CHECK(est.n_max == 100);
    CHECK(est.sequence.back().first == 100);
    // ladder is increasing and ends at the horizon
    for (std::size_t i = 1; i < est.sequence.size(); ++i)
        CHECK(est.sequence[i - 1].first < est.sequence[i].first);
}

TEST_CASE("mean_estimate: golden comb approaches the density formula") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto patch = SetDescriptor::interval(rat(-201), rat(201));
    auto mu = PointMeasure::from_point_set(cps::cut_and_project(s, w, patch));
    VanHoveSpec v(SpaceDescriptor::real_line());
    auto est = mean_estimate(mu, v, 200);
    double target = 1.0 / std::sqrt(5.0);
    CHECK(std::abs(est.real_value() - target) <= 5.0 / 200);
}

TEST_CASE("mean_estimate: zero measure, domination, and patch errors") {
    PointMeasure zero;
    zero.patch = SetDescriptor::interval(rat(-20), rat(20));
    VanHoveSpec v(SpaceDescriptor::real_line());
    CHECK(mean_estimate(zero, v, 10).value == std::complex<double>{0, 0});

    PointMeasure dz = arith_comb(1, 0, -50, 51);
    PointMeasure d2z = arith_comb(2, 0, -50, 51);
    auto ea = mean_estimate(d2z, v, 40);
    auto eb = mean_estimate(dz, v, 40);
    REQUIRE(ea.sequence.size() == eb.sequence.size());
    for (std::size_t i = 0; i < ea.sequence.size(); ++i)
        CHECK(ea.sequence[i].second.real() <= eb.sequence[i].second.real() + 1e-12);

    try {
        mean_estimate(dz, v, 60);
        FAIL("expected a patch-size error");
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("patch must contain") != std::string::npos);
    }
}

TEST_CASE("uniform_upper_density: full and arithmetic integer combs") {
    VanHoveSpec vz(SpaceDescriptor::integers());
    auto all = arith_points_z(1, 0, -100, 101);
    auto u1 = uniform_upper_density(all, vz, 100);
    CHECK(u1.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u1.n_eff == 100);

    auto sparse = arith_points_z(5, 2, -100, 101);
    auto u5 = uniform_upper_density(sparse, vz, 100);
    CHECK(std::abs(u5.value - 0.2) <= 1.0 / 100);
    // finite-horizon sup over placements can only overshoot the density
    CHECK(u5.value >= 0.2 - 1e-12);
}

TEST_CASE("uniform_upper_density: dominates the centered mean estimate") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto patch = SetDescriptor::interval(rat(-201), rat(201));
    auto ps = cps::cut_and_project(s, w, patch);
    VanHoveSpec v(SpaceDescriptor::real_line());
    auto ud = uniform_upper_density(ps, v, 200);
    auto est = mean_estimate(PointMeasure::from_point_set(ps), v, 200);
    CHECK(ud.value >= est.real_value() - 1e-9);
    CHECK(ud.n_eff == 200);

    cps::PointSet tiny;
    tiny.patch = SetDescriptor::interval(rat(0), rat(1));
    CHECK_THROWS_AS(uniform_upper_density(tiny, v, 10), precondition_error);
}

TEST_CASE("almost_periods: exactly periodic samples report every multiple on the grid") {
    PointMeasure d3z = arith_comb(3, 0, -120, 121);
    auto phi = BumpFunction::tent(rat(1));
    auto f = sample_smooth(phi, d3z, -100.0, 0.25, 841);  // covers [-100, 110]
    auto ap = almost_periods(f, 0.05, 30.0);
    // periods are exactly the multiples of 3 (grid-aligned), so max_gap = 3
    CHECK(ap.max_gap == doctest::Approx(3.0).epsilon(1e-12));
    for (double t : {3.0, 6.0, 27.0})
        CHECK(std::find(ap.periods.begin(), ap.periods.end(), t) != ap.periods.end());
    for (const double t : ap.periods)
        CHECK(std::abs(t / 3.0 - std::round(t / 3.0)) < 1e-9);

    SampledFunction flat{0.0, 0.5, std::vector<double>(100, 0.0), 0};
    auto all = almost_periods(flat, 0.01, 20.0);
    CHECK(all.periods.size() == 41);  // every grid shift 0, 0.5, ..., 20
    CHECK(all.max_gap == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(almost_periods(flat, 0.01, 80.0), precondition_error);
}

TEST_CASE("almost_periods: continuous window weight yields dense periods, indicator does not") {
    auto s = cps::Scheme::golden();
    auto patch = SetDescriptor::interval(rat(-260), rat(260));
    auto phi = BumpFunction::tent(rat(7, 10));
    const double x0 = -210.0, pitch = 0.125;
    const std::size_t count = 3361;  // covers [-210, 210]
    const double horizon = 200.0;

    // weight = tent over the window: shifts with small star values move every
    // weight a little instead of creating unit-height mismatches
    auto smooth_comb = cps::omega_comb(s, cps::WeightFunction::tent(rat(1, 2), rat(1, 2)), patch);
    auto f = sample_smooth(phi, smooth_comb, x0, pitch, count);
    auto ap_smooth = almost_periods(f, 0.2, horizon);
    CHECK(ap_smooth.periods.size() > 10);
    CHECK(ap_smooth.max_gap <= 40.0);

    auto hard_comb = cps::omega_comb(
        s, cps::WeightFunction::indicator(SetDescriptor::interval(rat(0), rat(1))), patch);
    auto g = sample_smooth(phi, hard_comb, x0, pitch, count);
    auto ap_hard = almost_periods(g, 0.2, horizon);
    CHECK(ap_hard.max_gap > ap_smooth.max_gap);
}

TEST_CASE("discrepancy_set: exact support comparison") {
    PointMeasure dz = arith_comb(1, 0, -50, 51);
    PointMeasure d2z = arith_comb(2, 0, -50, 51);
    auto same = discrepancy_set(dz, dz);
    CHECK(same.points.size() == 0);
    CHECK_FALSE(same.patch_restricted);

    auto odd = discrepancy_set(dz, d2z);
    CHECK(odd.points.size() == 50);  // odd integers in [-50, 51)
    for (double x : odd.points.xs) CHECK(std::abs(std::fmod(x, 2.0)) == 1.0);

    // weight difference below tolerance is not a discrepancy
    PointMeasure tweaked = dz;
    tweaked.atoms[10].w += 5e-13;
    CHECK(discrepancy_set(dz, tweaked).points.size() == 0);
    tweaked.atoms[10].w += 1e-9;
    CHECK(discrepancy_set(dz, tweaked).points.size() == 1);

    // mismatched patches are flagged and compared on the intersection
    PointMeasure half = arith_comb(1, 0, 0, 51);
    auto r = discrepancy_set(dz, half);
    CHECK(r.patch_restricted);
    CHECK(r.points.size() == 0);
}

TEST_CASE("discrepancy_set: lattice coords make support identity exact") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto patch = SetDescriptor::interval(rat(0), rat(20));
    auto mu = PointMeasure::from_point_set(cps::cut_and_project(s, w, patch));
    auto nu = mu;
    nu.atoms.erase(nu.atoms.begin() + 3);
    auto d = discrepancy_set(mu, nu);
    REQUIRE(d.points.size() == 1);
    CHECK(d.points.coords[0] == cps::LatticePoint{2, 3});
}

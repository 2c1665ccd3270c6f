#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aperiodica/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace aperiodica;
using namespace aperiodica::cps;
using groups::SetDescriptor;

namespace {

Rational rat(long long n, long long d = 1) { return Rational(n, d); }

// Direct lattice sweep over |m| <= mb, |n| <= nb with exact membership tests;
// the enumeration must reproduce it exactly whenever its solved coefficient
// ranges fit inside the sweep box.
std::vector<LatticePoint> sweep_oracle(const Scheme& s, const Window& w,
                                       const SetDescriptor& patch, long long mb, long long nb) {
    std::vector<LatticePoint> out;
    for (long long m = -mb; m <= mb; ++m)
        for (long long n = -nb; n <= nb; ++n) {
            LatticePoint pt{m, n};
            if (!groups::contains(patch, direct_exact(s, pt))) continue;
            if (!groups::contains(w, star_exact(s, pt))) continue;
            out.push_back(pt);
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LatticePoint> sorted_coords(const PointSet& ps) {
    auto c = ps.coords;
    std::sort(c.begin(), c.end());
    return c;
}

}  // namespace

TEST_CASE("star map: golden values are exact field elements") {
    Scheme s = Scheme::golden();
    CHECK(star_exact(s, {1, 1}) == QuadExt(rat(3, 2), rat(-1, 2), 5));
    CHECK(star_exact(s, {0, 0}) == QuadExt(rat(0)));
    CHECK(direct_exact(s, {1, 1}) == QuadExt(rat(3, 2), rat(1, 2), 5));
    CHECK(star_value(s, {1, 1}) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2).epsilon(1e-12));

    // additivity, exact
    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        LatticePoint p{static_cast<long long>(rng() % 2001) - 1000,
                       static_cast<long long>(rng() % 2001) - 1000};
        LatticePoint q{static_cast<long long>(rng() % 2001) - 1000,
                       static_cast<long long>(rng() % 2001) - 1000};
        CHECK(star_exact(s, p + q) == star_exact(s, p) + star_exact(s, q));
    }
}

TEST_CASE("star map: residue schemes") {
    Scheme s = Scheme::padic(5, 2);
    CHECK(star_residue(s, {7, 0}) == 7);
    CHECK(star_residue(s, {-3, 0}) == 22);
    CHECK(star_residue(s, {25, 0}) == 0);
    CHECK(star_residue(Scheme::trivial(), {42, 0}) == 0);
    CHECK_THROWS_AS(star_exact(s, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(star_residue(Scheme::golden(), {1, 0}), std::invalid_argument);
}

TEST_CASE("scheme construction validates its inputs") {
    CHECK_THROWS_AS(Scheme::quadratic({1, 1, 2, 4}), std::invalid_argument);  // square
    CHECK_THROWS_AS(Scheme::quadratic({1, 1, 2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Scheme::quadratic({1, 0, 2, 5}), std::invalid_argument);
    CHECK_THROWS_AS(Scheme::padic(4, 2), std::invalid_argument);  // composite
    Scheme g = Scheme::golden();
    Scheme pr = Scheme::product(g, Scheme::padic(3, 2));
    CHECK_THROWS_AS(Scheme::product(pr, g), std::invalid_argument);
    CHECK(g.internal_space() == groups::SpaceDescriptor::real_line());
    CHECK(Scheme::trivial().internal_space() == groups::SpaceDescriptor::cyclic(1));
}

TEST_CASE("cut_and_project: golden window [0,1) on [0,20) gives nine points") {
    Scheme s = Scheme::golden();
    Window w = SetDescriptor::interval(rat(0), rat(1));
    SetDescriptor patch = SetDescriptor::interval(rat(0), rat(20));
    PointSet ps = cut_and_project(s, w, patch);
    REQUIRE(ps.size() == 9);
    std::vector<LatticePoint> expect{{0, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 4},
                                     {4, 5}, {4, 6}, {5, 7}, {5, 8}};
    CHECK(ps.coords == expect);  // already sorted by position here
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(ps.xs[i] == doctest::Approx(direct_exact(s, ps.coords[i]).value()).epsilon(1e-13));
    CHECK(std::is_sorted(ps.xs.begin(), ps.xs.end()));
    CHECK(ps.has_coords());
    CHECK_FALSE(ps.integral);
}

TEST_CASE("cut_and_project: matches the exact lattice sweep on seeded sets") {
    std::mt19937 rng(314);
    auto r8 = [&](long long lo, long long hi) {
        return rat(static_cast<long long>(rng() % (8 * (hi - lo))) + 8 * lo, 8);
    };
    for (int trial = 0; trial < 12; ++trial) {
        Scheme s = (trial % 2 == 0) ? Scheme::golden()
                                    : Scheme::quadratic(QuadraticIrrational::silver());
        // window: one or two atoms inside [-2, 2]
        Rational a = r8(-2, 1), b = a + r8(0, 1) + rat(1, 8);
        std::vector<groups::RealInterval> watoms{{a, b}};
        if (trial % 3 == 0) {
            Rational c = b + rat(1, 8), d = c + r8(0, 1) + rat(1, 8);
            watoms.push_back({c, d});
        }
        Window w = SetDescriptor::real_union(watoms);
        // patch: two atoms inside [-25, 25]
        Rational p0 = r8(-25, 0), p1 = p0 + r8(0, 10) + rat(1, 2);
        Rational p2 = p1 + r8(0, 5), p3 = p2 + r8(0, 10) + rat(1, 2);
        SetDescriptor patch = SetDescriptor::real_union({{p0, p1}, {p2, p3}});

        auto oracle = sweep_oracle(s, w, patch, 90, 40);
        PointSet serial = cut_and_project(s, w, patch, kern::Exec::Serial);
        PointSet parallel = cut_and_project(s, w, patch, kern::Exec::Parallel);
        CHECK(sorted_coords(serial) == oracle);
        CHECK(serial.coords == parallel.coords);
        CHECK(serial.xs == parallel.xs);
    }
}

TEST_CASE("cut_and_project: membership at a razor-thin window edge is exact") {
    // star(1,1) = (3 - sqrt 5)/2 = 0.381966011250105...; rational endpoints a
    // few 1e-10 on either side must classify it correctly despite the float
    // presieve.
    Scheme s = Scheme::golden();
    SetDescriptor patch = SetDescriptor::interval(rat(0), rat(10));
    Window below = SetDescriptor::interval(rat(0), rat(381966011, 1000000000));
    Window above = SetDescriptor::interval(rat(0), rat(381966012, 1000000000));
    auto has11 = [](const PointSet& ps) {
        return std::find(ps.coords.begin(), ps.coords.end(), LatticePoint{1, 1}) !=
               ps.coords.end();
    };
    CHECK_FALSE(has11(cut_and_project(s, below, patch)));
    CHECK(has11(cut_and_project(s, above, patch)));
}

TEST_CASE("cut_and_project: residue windows over the integers") {
    Scheme s = Scheme::padic(5, 3);
    auto h = s.internal_space();
    SetDescriptor patch = SetDescriptor::integer_range(-20, 21);

    PointSet ps = cut_and_project(s, SetDescriptor::residue_class(h, 2, 1), patch);
    std::vector<double> expect{-18, -13, -8, -3, 2, 7, 12, 17};
    CHECK(ps.xs == expect);
    CHECK(ps.integral);

    // union of classes at different levels
    Window w2 = groups::set_union(SetDescriptor::residue_class(h, 2, 1),
                                  SetDescriptor::residue_class(h, 0, 2));
    PointSet ps2 = cut_and_project(s, w2, SetDescriptor::integer_range(0, 30));
    CHECK(ps2.xs == std::vector<double>{0, 2, 7, 12, 17, 22, 25, 27});

    // whole internal space recovers every integer of the patch
    PointSet all = cut_and_project(s, SetDescriptor::whole_space(h), patch);
    CHECK(all.size() == 41);
}

TEST_CASE("cut_and_project: trivial internal space") {
    Scheme s = Scheme::trivial();
    auto h = s.internal_space();
    SetDescriptor patch = SetDescriptor::integer_range(-3, 4);
    CHECK(cut_and_project(s, SetDescriptor::whole_space(h), patch).size() == 7);
    CHECK(cut_and_project(s, SetDescriptor::empty(h), patch).size() == 0);
}

TEST_CASE("cut_and_project: preconditions") {
    Scheme s = Scheme::golden();
    Window w = SetDescriptor::interval(rat(0), rat(1));
    CHECK_THROWS_AS(
        cut_and_project(s, w, SetDescriptor::whole_space(groups::SpaceDescriptor::real_line())),
        precondition_error);
    CHECK_THROWS_AS(
        cut_and_project(s, SetDescriptor::whole_space(groups::SpaceDescriptor::real_line()),
                        SetDescriptor::interval(rat(0), rat(1))),
        precondition_error);
    CHECK_THROWS_AS(cut_and_project(s, SetDescriptor::integer_range(0, 1),
                                    SetDescriptor::interval(rat(0), rat(1))),
                    std::invalid_argument);
}

TEST_CASE("difference of a model set lands in the dilated-window model set") {
    Scheme s = Scheme::golden();
    Window w = SetDescriptor::interval(rat(0), rat(1));
    PointSet ps = cut_and_project(s, w, SetDescriptor::interval(rat(0), rat(20)));
    Window wdiff = groups::minkowski_sum(w, groups::negate(w));
    PointSet big = cut_and_project(s, wdiff, SetDescriptor::interval(rat(-20), rat(20)));
    auto coords = sorted_coords(big);
    for (const auto& p : ps.coords)
        for (const auto& q : ps.coords) {
            CHECK(std::binary_search(coords.begin(), coords.end(), p - q));
        }
}

TEST_CASE("product schemes pair the factor configurations") {
    Scheme s = Scheme::product(Scheme::golden(), Scheme::golden());
    Window w = SetDescriptor::interval(rat(0), rat(1));
    SetDescriptor patch = SetDescriptor::interval(rat(0), rat(10));
    PointSet2 ps = cut_and_project_product(s, w, w, patch, patch);
    CHECK(ps.size() == 25);  // 5 golden points below 10, squared
    CHECK(ps.xs[0][0] == 0.0);
    CHECK(ps.xs[0][1] == 0.0);
    CHECK_THROWS_AS(cut_and_project_product(Scheme::golden(), w, w, patch, patch),
                    std::invalid_argument);
    CHECK_THROWS_AS(cut_and_project(s, w, patch), std::invalid_argument);
}

TEST_CASE("omega_comb: indicator weight reproduces the plain comb") {
    Scheme s = Scheme::golden();
    Window w = SetDescriptor::interval(rat(0), rat(1));
    SetDescriptor patch = SetDescriptor::interval(rat(0), rat(20));
    PointSet ps = cut_and_project(s, w, patch);
    auto mu = omega_comb(s, WeightFunction::indicator(w), patch);
    auto nu = measures::PointMeasure::from_point_set(ps);
    REQUIRE(mu.size() == nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(mu.atoms[i].coord == nu.atoms[i].coord);
        CHECK(mu.atoms[i].x == nu.atoms[i].x);
        CHECK(mu.atoms[i].w == std::complex<double>{1.0, 0.0});
    }
    CHECK(mu.nonnegative);
}

TEST_CASE("omega_comb: continuous weight evaluates exactly at star positions") {
    Scheme s = Scheme::golden();
    auto tent = WeightFunction::tent(rat(1, 2), rat(1, 2));  // supported on [0,1]
    SetDescriptor patch = SetDescriptor::interval(rat(0), rat(20));
    auto mu = omega_comb(s, tent, patch);
    // the nine window points minus (0,0), whose star value 0 gets weight 0
    REQUIRE(mu.size() == 8);
    for (const auto& a : mu.atoms) CHECK_FALSE(a.coord == LatticePoint{0, 0});
    auto it = std::find_if(mu.atoms.begin(), mu.atoms.end(),
                           [](const auto& a) { return a.coord == LatticePoint{1, 1}; });
    REQUIRE(it != mu.atoms.end());
    CHECK(it->w.real() == doctest::Approx(3.0 - std::sqrt(5.0)).epsilon(1e-12));

    // residue scheme: step weight of value 1/3 on the window
    Scheme sp = Scheme::padic(5, 2);
    auto h = sp.internal_space();
    WeightFunction f = WeightFunction::indicator(SetDescriptor::residue_class(h, 2, 1));
    auto mup = omega_comb(sp, f, SetDescriptor::integer_range(0, 10));
    REQUIRE(mup.size() == 2);  // 2 and 7
    CHECK(mup.atoms[0].x == 2.0);
    CHECK(mup.atoms[1].w.real() == 1.0);
    CHECK(mup.integral_support);
}

TEST_CASE("density_constant: exact covolume reciprocals") {
    auto g = density_constant(Scheme::golden());
    CHECK(g.exact_valid);
    CHECK(g.exact == QuadExt(rat(0), rat(1, 5), 5));
    CHECK(g.value == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));

    CHECK(density_constant(Scheme::padic(5, 2)).exact == QuadExt(rat(1)));
    CHECK(density_constant(Scheme::trivial()).exact == QuadExt(rat(1)));

    auto pr = density_constant(Scheme::product(Scheme::golden(), Scheme::padic(3, 1)));
    CHECK(pr.exact_valid);
    CHECK(pr.exact == QuadExt(rat(0), rat(1, 5), 5));

    auto silver = density_constant(Scheme::quadratic(QuadraticIrrational::silver()));
    CHECK(silver.exact == QuadExt(rat(0), rat(1, 4), 2));  // 1/(2 sqrt 2)
}

TEST_CASE("empirical density approaches the window-mass prediction") {
    Scheme s = Scheme::golden();
    Window w = SetDescriptor::interval(rat(0), rat(1));
    double target = density_constant(s).value * to_double(groups::haar_measure(w));
    for (long long R : {50, 100, 200}) {
        SetDescriptor patch = SetDescriptor::interval(rat(-R), rat(R));
        PointSet ps = cut_and_project(s, w, patch);
        double emp = static_cast<double>(ps.size()) / (2.0 * R);
        CHECK(std::abs(emp - target) <= 5.0 / R);
    }
}

TEST_CASE("window_flags: regularity of interval and residue windows") {
    Scheme s = Scheme::golden();
    CHECK(window_flags(s, SetDescriptor::interval(rat(0), rat(1))).regular());
    CHECK_FALSE(window_flags(s, SetDescriptor::empty(groups::SpaceDescriptor::real_line()))
                    .nonempty_interior);
    CHECK_FALSE(window_flags(s, SetDescriptor::whole_space(groups::SpaceDescriptor::real_line()))
                    .compact_closure);
    Scheme sp = Scheme::padic(5, 2);
    CHECK(window_flags(sp, SetDescriptor::whole_space(sp.internal_space())).regular());
    CHECK_THROWS_AS(window_flags(sp, SetDescriptor::interval(rat(0), rat(1))),
                    std::invalid_argument);
}

TEST_CASE("character lift: exact dual pair passes, generic pair fails") {
    Scheme s = Scheme::golden();
    QuadExt beta(rat(1, 2), rat(1, 10), 5), gamma(rat(-1, 2), rat(1, 10), 5);
    CHECK(is_dual_pair(s, beta, gamma));
    CHECK(beta - gamma == QuadExt(rat(1)));
    CHECK_FALSE(is_dual_pair(s, beta, beta));

    auto res = character_lift_check(s, beta.value(), gamma.value(), 200, 1e-9);
    CHECK(res.pass);
    CHECK(res.max_deviation < 1e-9);
    auto res_s = character_lift_check(s, beta.value(), gamma.value(), 200, 1e-9,
                                      kern::Exec::Serial);
    CHECK(res_s.max_deviation == res.max_deviation);

    auto bad = character_lift_check(s, 0.3, 0.3, 50, 0.1);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_deviation > 0.5);

    CHECK_THROWS_AS(character_lift_check(Scheme::padic(5, 2), 0.5, 0.5, 10, 0.1),
                    precondition_error);
}

TEST_CASE("point measures: unit-window sup and comb construction") {
    measures::PointMeasure mu;
    for (double x : {0.0, 0.5, 0.9, 2.0, 2.05, 3.5})
        mu.atoms.push_back({x, {1.0, 0.0}, {}, false});
    CHECK(mu.sup_unit_window() == 3.0);
    mu.atoms[3].w = {0.0, -2.0};  // magnitude 2 at x=2.0
    CHECK(mu.sup_unit_window() == 3.0);
    mu.atoms[4].w = {3.0, 4.0};  // magnitude 5 at x=2.05
    CHECK(mu.sup_unit_window() == 7.0);
    CHECK(measures::PointMeasure{}.sup_unit_window() == 0.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aperiodica/gap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

using namespace aperiodica;
using namespace aperiodica::gap;
using groups::SetDescriptor;
using groups::SpaceDescriptor;
using groups::VanHoveSpec;
using measures::PointMeasure;

namespace {

Rational rat(long long n, long long d = 1) { return Rational(n, d); }

PointMeasure arith_comb(long long step, long long offset, long long lo, long long hi) {
    PointMeasure mu;
    mu.patch = SetDescriptor::interval(rat(lo), rat(hi));
    mu.nonnegative = true;
    long long first = lo + ((offset - lo) % step + step) % step;
    for (long long v = first; v < hi; v += step) mu.atoms.push_back({double(v), {1, 0}, {}, false});
    return mu;
}

double mass_in(const PointMeasure& mu, double lo, double hi) {
    double total = 0;
    for (const auto& a : mu.atoms)
        if (lo <= a.x && a.x < hi) total += a.w.real();
    return total;
}

}  // namespace

TEST_CASE("riemann_sandwich: unit interval layout is exact") {
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto s = riemann_sandwich(w, 0.1);

    CHECK(s.gap_integral == rat(1, 10));
    CHECK(s.lower.integral() == rat(37, 40));
    CHECK(s.upper.integral() == rat(41, 40));

    // lower: ramp 1/40 -> 1/20, plateau to 19/20, ramp down to 39/40
    REQUIRE(s.lower.breaks.size() == 4);
    CHECK(s.lower.breaks[0] == rat(1, 40));
    CHECK(s.lower.breaks[1] == rat(1, 20));
    CHECK(s.lower.breaks[2] == rat(19, 20));
    CHECK(s.lower.breaks[3] == rat(39, 40));
    // upper: ramp -1/40 -> 0, plateau to 1, ramp down to 41/40
    REQUIRE(s.upper.breaks.size() == 4);
    CHECK(s.upper.breaks[0] == rat(-1, 40));
    CHECK(s.upper.breaks[1] == rat(0));
    CHECK(s.upper.breaks[2] == rat(1));
    CHECK(s.upper.breaks[3] == rat(41, 40));

    CHECK(s.lower.eval(QuadExt(rat(3, 80))) == QuadExt(rat(1, 2)));  // ramp midpoint
    CHECK(s.upper.eval(QuadExt(rat(-1, 80))) == QuadExt(rat(1, 2)));
    CHECK(s.lower.continuous());
    CHECK(s.upper.continuous());

    // pointwise chain 0 <= lower <= 1_W <= upper <= 1 on a rational grid
    for (long long i = -20; i <= 220; ++i) {
        QuadExt x{rat(i, 200)};
        QuadExt f = s.lower.eval(x), g = s.upper.eval(x);
        QuadExt ind{rat(groups::contains(w, x) ? 1 : 0)};
        CHECK(QuadExt(rat(0)) <= f);
        CHECK(f <= ind);
        CHECK(ind <= g);
        CHECK(g <= QuadExt(rat(1)));
    }
}

TEST_CASE("riemann_sandwich: margins clamp to short intervals and separations") {
    auto w = groups::set_union(SetDescriptor::interval(rat(0), rat(1, 10)),
                               SetDescriptor::interval(rat(1, 5), rat(2)));
    auto s = riemann_sandwich(w, 10.0);  // huge eps: clamps take over
    // margin = min(separation/3 = 1/30, narrow width/5 = 1/50) = 1/50, two intervals
    CHECK(s.gap_integral == rat(4, 25));
    CHECK(s.upper.max_value() == rat(1));
    CHECK(s.upper.nonnegative());

    for (long long i = -10; i <= 110; ++i) {
        QuadExt x{rat(i, 50)};
        QuadExt f = s.lower.eval(x), g = s.upper.eval(x);
        QuadExt ind{rat(groups::contains(w, x) ? 1 : 0)};
        CHECK(f <= ind);
        CHECK(ind <= g);
        CHECK(g <= QuadExt(rat(1)));
    }
}

TEST_CASE("riemann_sandwich: degenerate and residue windows") {
    auto empty = SetDescriptor::empty(SpaceDescriptor::real_line());
    auto se = riemann_sandwich(empty, 0.5);
    CHECK(se.gap_integral == rat(0));
    CHECK(se.lower.integral() == rat(0));

    auto h = SpaceDescriptor::padic(5, 3);
    auto wc = SetDescriptor::residue_class(h, 2, 1);
    auto sc = riemann_sandwich(wc, 0.01);
    CHECK(sc.gap_integral == rat(0));
    CHECK(sc.lower.eval_residue(2) == rat(1));
    CHECK(sc.lower.eval_residue(3) == rat(0));
    CHECK(sc.upper.integral() == sc.lower.integral());

    CHECK_THROWS_AS(riemann_sandwich(SetDescriptor::interval(rat(0), rat(1)), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(riemann_sandwich(SetDescriptor::whole_space(SpaceDescriptor::real_line()), 0.1),
                    precondition_error);
}

TEST_CASE("gap_certificate: golden scheme, exact squeeze and empirical bounds") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto patch = SetDescriptor::interval(rat(-500), rat(500));
    VanHoveSpec v{SpaceDescriptor::real_line()};
    double eps = 0.1;

    auto cert = gap_certificate(s, w, eps, patch, v);

    CHECK(cert.horizon == 500);
    CHECK(cert.certified_bound > 0);
    CHECK(cert.certified_bound <= eps + 1e-15);

    // the certified bound really is D_S * gap_integral, checked exactly
    auto ds = cps::density_constant(s);
    CHECK(ds.exact * QuadExt(cert.sandwich.gap_integral) <=
          QuadExt(rational_from_double(eps)));

    // mu <= lambda <= nu atomwise; lambda carries unit weights
    REQUIRE(cert.mu_eps.size() <= cert.lambda_comb.size());
    REQUIRE(cert.lambda_comb.size() <= cert.nu_eps.size());
    CHECK(cert.gamma.size() == cert.nu_eps.size());
    std::vector<cps::LatticePoint> lam_coords, nu_coords;
    for (const auto& a : cert.lambda_comb.atoms) {
        CHECK(a.w == std::complex<double>{1.0, 0.0});
        lam_coords.push_back(a.coord);
    }
    for (const auto& a : cert.nu_eps.atoms) nu_coords.push_back(a.coord);
    for (const auto& a : cert.mu_eps.atoms) {
        CHECK(a.w.real() > 0.0);
        CHECK(a.w.real() <= 1.0);
        CHECK(std::binary_search(lam_coords.begin(), lam_coords.end(), a.coord));
    }
    for (const auto& c : lam_coords)
        CHECK(std::binary_search(nu_coords.begin(), nu_coords.end(), c));
    for (const auto& a : cert.nu_eps.atoms)
        if (std::binary_search(lam_coords.begin(), lam_coords.end(), a.coord))
            CHECK(a.w == std::complex<double>{1.0, 0.0});  // upper is flat 1 on the closure

    // finite-horizon empirical readings stay under the certificate
    CHECK(cert.empirical_mean_gap.real_value() <= cert.certified_bound + 0.02);
    CHECK(cert.empirical_mean_gap.real_value() >= 0.0);
    CHECK(cert.empirical_discrepancy_density.value < eps);

    // deterministic across execution policies
    auto cert_s = gap_certificate(s, w, eps, patch, v, kern::Exec::Serial);
    REQUIRE(cert_s.nu_eps.size() == cert.nu_eps.size());
    for (std::size_t i = 0; i < cert.nu_eps.size(); ++i) {
        CHECK(cert_s.nu_eps.atoms[i].x == cert.nu_eps.atoms[i].x);
        CHECK(cert_s.nu_eps.atoms[i].w == cert.nu_eps.atoms[i].w);
    }
    CHECK(cert_s.empirical_discrepancy_density.value ==
          cert.empirical_discrepancy_density.value);
}

TEST_CASE("gap_certificate: tighter eps shrinks the sandwich") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto patch = SetDescriptor::interval(rat(-2000), rat(2000));
    VanHoveSpec v{SpaceDescriptor::real_line()};

    auto tight = gap_certificate(s, w, 0.01, patch, v);
    CHECK(tight.certified_bound <= 0.01);
    CHECK(tight.empirical_discrepancy_density.value < 0.01);
    CHECK(tight.sandwich.gap_integral < rat(1, 40));
}

TEST_CASE("gap_certificate: residue windows certify a zero gap") {
    auto s = cps::Scheme::padic(5, 3);
    auto w = SetDescriptor::residue_class(s.internal_space(), 2, 1);
    auto patch = SetDescriptor::integer_range(-300, 301);
    VanHoveSpec v{SpaceDescriptor::integers()};

    auto cert = gap_certificate(s, w, 0.01, patch, v);
    CHECK(cert.horizon == 300);
    CHECK(cert.certified_bound == 0.0);
    CHECK(cert.sandwich.gap_integral == rat(0));
    CHECK(cert.lambda_comb.size() == 120);
    REQUIRE(cert.mu_eps.size() == cert.nu_eps.size());
    for (std::size_t i = 0; i < cert.mu_eps.size(); ++i)
        CHECK(cert.mu_eps.atoms[i].w == cert.nu_eps.atoms[i].w);
    CHECK(cert.empirical_mean_gap.real_value() == 0.0);
    CHECK(cert.empirical_discrepancy_density.value == 0.0);
}

TEST_CASE("gap_certificate: refusals name the failed requirement") {
    auto s = cps::Scheme::golden();
    auto patch = SetDescriptor::interval(rat(-100), rat(100));
    VanHoveSpec v{SpaceDescriptor::real_line()};
    auto w = SetDescriptor::interval(rat(0), rat(1));

    CHECK_THROWS_AS(gap_certificate(s, w, -1.0, patch, v), std::invalid_argument);
    CHECK_THROWS_AS(
        gap_certificate(s, SetDescriptor::whole_space(SpaceDescriptor::real_line()), 0.1, patch, v),
        precondition_error);
    CHECK_THROWS_AS(
        gap_certificate(s, SetDescriptor::empty(SpaceDescriptor::real_line()), 0.1, patch, v),
        precondition_error);
    try {
        gap_certificate(s, SetDescriptor::whole_space(SpaceDescriptor::real_line()), 0.1, patch, v);
        FAIL("expected a refusal");
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("non-compact") != std::string::npos);
    }

    // patch on one side of the origin: no centered horizon exists
    CHECK_THROWS_AS(
        gap_certificate(s, w, 0.1, SetDescriptor::interval(rat(10), rat(500)), v),
        precondition_error);

    auto prod = cps::Scheme::product(cps::Scheme::golden(), cps::Scheme::trivial());
    CHECK_THROWS_AS(gap_certificate(prod, w, 0.1, patch, v), std::invalid_argument);
}

TEST_CASE("min_gap and the default profile") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto lam = cps::cut_and_project(s, w, SetDescriptor::interval(rat(0), rat(50)));
    REQUIRE(lam.size() >= 2);
    double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(min_gap(lam) == doctest::Approx(phi).epsilon(1e-12));

    // oracle: brute-force pairwise minimum
    double brute = 1e30;
    for (std::size_t i = 0; i < lam.size(); ++i)
        for (std::size_t j = i + 1; j < lam.size(); ++j)
            brute = std::min(brute, std::abs(lam.xs[j] - lam.xs[i]));
    CHECK(min_gap(lam) == brute);

    cps::PointSet tiny;
    tiny.xs = {1.0};
    CHECK_THROWS_AS(min_gap(tiny), precondition_error);

    auto psi = default_psi(min_gap(lam));
    CHECK(psi.unit_range());
    CHECK(psi.peak_at_origin());
    CHECK(to_double(psi.radius()) == doctest::Approx(0.45 * phi).epsilon(1e-12));
    CHECK_THROWS_AS(default_psi(0.0), std::invalid_argument);
}

TEST_CASE("t_operator: fixed point on the carrier, exactly") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto lam = cps::cut_and_project(s, w, SetDescriptor::interval(rat(-100), rat(100)));
    auto omega = PointMeasure::from_point_set(lam);
    auto psi = default_psi(min_gap(lam));

    auto fixed = t_operator(psi, omega, omega);
    REQUIRE(fixed.size() == omega.size());
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        CHECK(fixed.atoms[i].x == omega.atoms[i].x);
        CHECK(fixed.atoms[i].w == omega.atoms[i].w);
    }
    CHECK(fixed.nonnegative);

    // arbitrary complex weights on the carrier survive untouched as well
    std::mt19937 rng(77);
    auto mu = omega;
    mu.nonnegative = false;
    for (auto& a : mu.atoms) {
        double th = 6.283185307179586 * ((rng() >> 11) * 0x1.0p-53);
        a.w = {std::cos(th), std::sin(th)};
    }
    auto back = t_operator(psi, omega, mu);
    REQUIRE(back.size() == mu.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back.atoms[i].w == mu.atoms[i].w);
}

TEST_CASE("t_operator: linearity, support, and domination") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto lam = cps::cut_and_project(s, w, SetDescriptor::interval(rat(-60), rat(60)));
    auto omega = PointMeasure::from_point_set(lam);
    auto psi = default_psi(min_gap(lam));

    auto mu = arith_comb(1, 0, -60, 60);
    auto nu = arith_comb(3, 1, -60, 60);

    // support of T(anything) sits inside the carrier
    auto tmu = t_operator(psi, omega, mu);
    for (const auto& a : tmu.atoms)
        CHECK(std::binary_search(lam.xs.begin(), lam.xs.end(), a.x));

    // linearity with complex coefficients
    std::complex<double> ca{0.3, -1.1}, cb{2.0, 0.7};
    auto combo = mu;
    combo.nonnegative = false;
    for (auto& a : combo.atoms) a.w *= ca;
    for (const auto& b : nu.atoms) combo.atoms.push_back({b.x, cb * b.w, b.coord, b.has_coord});
    std::sort(combo.atoms.begin(), combo.atoms.end(),
              [](const auto& p, const auto& q) { return p.x < q.x; });
    auto lhs = t_operator(psi, omega, combo);
    auto ta = t_operator(psi, omega, mu);
    auto tb = t_operator(psi, omega, nu);
    for (const auto& a : lhs.atoms) {
        std::complex<double> expect{0, 0};
        for (const auto& p : ta.atoms)
            if (p.x == a.x) expect += ca * p.w;
        for (const auto& q : tb.atoms)
            if (q.x == a.x) expect += cb * q.w;
        CHECK(std::abs(a.w - expect) <= 1e-12 * (1.0 + std::abs(expect)));
    }

    // positivity and mass domination: T(mu)(A) <= mu(A thickened by the radius)
    CHECK(tmu.nonnegative);
    double r = to_double(psi.radius());
    for (double lo : {-40.0, -10.0, 3.0}) {
        double hi = lo + 17.0;
        CHECK(mass_in(tmu, lo, hi) <= mass_in(mu, lo - r, hi + r) + 1e-12);
    }

    // averaged form of domination at a fixed horizon
    double n = 50.0;
    CHECK(mass_in(tmu, -n, n) / (2 * n) <=
          mass_in(mu, -n - 1, n + 1) / (2 * n) + 1e-12);
}

TEST_CASE("t_operator: profile and radius preconditions") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto lam = cps::cut_and_project(s, w, SetDescriptor::interval(rat(-40), rat(40)));
    auto omega = PointMeasure::from_point_set(lam);
    auto mu = arith_comb(1, 0, -40, 40);

    auto too_tall = measures::BumpFunction::from_profile(
        cps::WeightFunction::continuous_pl({{rat(-1), rat(0)}, {rat(0), rat(2)}, {rat(1), rat(0)}}));
    CHECK_THROWS_AS(t_operator(too_tall, omega, mu), std::invalid_argument);

    auto off_peak = measures::BumpFunction::from_profile(cps::WeightFunction::continuous_pl(
        {{rat(-1), rat(0)}, {rat(-1, 2), rat(1)}, {rat(0), rat(1, 2)}, {rat(1), rat(0)}}));
    CHECK_THROWS_AS(t_operator(off_peak, omega, mu), std::invalid_argument);

    auto wide = measures::BumpFunction::tent(rat(1));  // 1 > min_gap/2 = phi/2 is false; use 0.9
    CHECK_NOTHROW(t_operator(measures::BumpFunction::tent(rat(4, 5)), omega, mu));
    try {
        t_operator(measures::BumpFunction::tent(rat(9, 10)), omega, mu);
        FAIL("expected a radius refusal");
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("minimal gap") != std::string::npos);
    }
    (void)wide;

    // a singleton carrier has no gap to violate
    PointMeasure single;
    single.patch = SetDescriptor::interval(rat(-1), rat(1));
    single.atoms.push_back({0.0, {1, 0}, {}, false});
    CHECK_NOTHROW(t_operator(measures::BumpFunction::tent(rat(10)), single, mu));
}

TEST_CASE("reconstruct_window: golden window recovered with shrinking slack") {
    auto s = cps::Scheme::golden();
    auto w = SetDescriptor::interval(rat(0), rat(1));
    auto patch = SetDescriptor::interval(rat(-300), rat(300));
    auto lam = cps::cut_and_project(s, w, patch);
    REQUIRE(lam.size() > 100);

    auto est = reconstruct_window(s, lam);
    REQUIRE(est.window.ivs.size() == 1);
    double n = static_cast<double>(lam.size());
    CHECK(std::abs(to_double(est.window.ivs[0].lo)) <= 10.0 / n);
    CHECK(std::abs(to_double(est.window.ivs[0].hi) - 1.0) <= 10.0 / n);
    CHECK(est.boundary_mass > 0.0);
    CHECK(est.boundary_mass <= 10.0 / n);

    // consistency: the estimated window reproduces every input point
    auto again = cps::cut_and_project(s, est.window, patch);
    REQUIRE(again.size() >= lam.size());
    for (const auto& c : lam.coords)
        CHECK(std::binary_search(again.coords.begin(), again.coords.end(), c,
                                 [](auto a, auto b) { return a < b; }));

    // a larger patch tightens the estimate
    auto lam2 = cps::cut_and_project(s, w, SetDescriptor::interval(rat(-1200), rat(1200)));
    auto est2 = reconstruct_window(s, lam2);
    CHECK(est2.boundary_mass < est.boundary_mass);
}

TEST_CASE("reconstruct_window: residue classes come back exactly") {
    auto s = cps::Scheme::padic(5, 3);
    auto w = SetDescriptor::residue_class(s.internal_space(), 2, 1);
    auto patch = SetDescriptor::integer_range(-200, 201);
    auto lam = cps::cut_and_project(s, w, patch);

    auto est = reconstruct_window(s, lam);
    CHECK(groups::equal_sets(est.window, w));
    CHECK(est.boundary_mass == 0.0);

    // sparse leaves stay flagged as ambiguous boundary mass
    cps::PointSet sparse;
    sparse.patch = SetDescriptor::integer_range(0, 125);
    sparse.integral = true;
    auto sp = cps::Scheme::padic(5, 2);
    for (long long x : {0, 50}) {
        sparse.xs.push_back(double(x));
        sparse.coords.push_back({x, 0});
    }
    auto est2 = reconstruct_window(sp, sparse);
    CHECK(groups::equal_sets(est2.window,
                             SetDescriptor::residue_class(sp.internal_space(), 0, 2)));
    CHECK(est2.boundary_mass == doctest::Approx(0.04).epsilon(1e-12));

    // a full residue class at the leaf level is solid, no ambiguity
    cps::PointSet solid;
    solid.patch = SetDescriptor::integer_range(0, 125);
    solid.integral = true;
    for (long long x = 0; x < 125; x += 25) {
        solid.xs.push_back(double(x));
        solid.coords.push_back({x, 0});
    }
    auto est3 = reconstruct_window(sp, solid);
    CHECK(groups::equal_sets(est3.window,
                             SetDescriptor::residue_class(sp.internal_space(), 0, 2)));
    CHECK(est3.boundary_mass == 0.0);
}

TEST_CASE("reconstruct_window: degenerate inputs and refusals") {
    auto s = cps::Scheme::golden();

    cps::PointSet empty;
    empty.patch = SetDescriptor::interval(rat(0), rat(1));
    auto est = reconstruct_window(s, empty);
    CHECK(groups::is_empty(est.window));
    CHECK(est.boundary_mass == 0.0);

    cps::PointSet bare;
    bare.patch = SetDescriptor::interval(rat(0), rat(10));
    bare.xs = {0.0, 1.0};
    CHECK_THROWS_AS(reconstruct_window(s, bare), precondition_error);

    cps::PointSet off;
    off.patch = SetDescriptor::interval(rat(0), rat(10));
    off.xs = {0.0, 2.5};
    off.coords = {{0, 0}, {1, 1}};
    try {
        reconstruct_window(s, off);
        FAIL("expected an offender report");
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("2.5") != std::string::npos);
    }

    auto sp = cps::Scheme::padic(5, 2);
    cps::PointSet frac;
    frac.patch = SetDescriptor::integer_range(0, 10);
    frac.xs = {0.0, 0.5};
    CHECK_THROWS_AS(reconstruct_window(sp, frac), precondition_error);

    auto prod = cps::Scheme::product(cps::Scheme::golden(), cps::Scheme::trivial());
    cps::PointSet some;
    some.patch = SetDescriptor::interval(rat(0), rat(10));
    some.xs = {0.0};
    some.coords = {{0, 0}};
    CHECK_THROWS_AS(reconstruct_window(prod, some), std::invalid_argument);

    // trivial scheme: density decides between the whole window and ambiguity
    auto st = cps::Scheme::trivial();
    cps::PointSet dense;
    dense.patch = SetDescriptor::integer_range(0, 100);
    dense.integral = true;
    for (long long x = 0; x < 100; ++x) {
        dense.xs.push_back(double(x));
        dense.coords.push_back({x, 0});
    }
    auto et = reconstruct_window(st, dense);
    CHECK(groups::equal_sets(et.window, SetDescriptor::whole_space(st.internal_space())));
    CHECK(et.boundary_mass == 0.0);

    cps::PointSet thin;
    thin.patch = SetDescriptor::integer_range(0, 100);
    thin.integral = true;
    for (long long x = 0; x < 100; x += 10) {
        thin.xs.push_back(double(x));
        thin.coords.push_back({x, 0});
    }
    auto eth = reconstruct_window(st, thin);
    CHECK(eth.boundary_mass == 1.0);
}

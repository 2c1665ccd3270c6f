#include "aperiodica/gap.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace aperiodica::gap {

using cps::WeightFunction;
using cps::Window;
using groups::SetDescriptor;
using groups::SpaceKind;
using measures::PointMeasure;

namespace {

// One weight function from disjoint sorted trapezoids (x0 ramp x1 top x2 ramp x3),
// with explicit zero segments over the gaps.
WeightFunction trapezoid_chain(const std::vector<std::array<Rational, 4>>& traps) {
    WeightFunction f;
    auto push_segment = [&](const Rational& lv, const Rational& rv, const Rational& next) {
        f.left_value.push_back(lv);
        f.right_value.push_back(rv);
        f.breaks.push_back(next);
    };
    for (const auto& t : traps) {
        if (f.breaks.empty())
            f.breaks.push_back(t[0]);
        else if (f.breaks.back() < t[0])
            push_segment(0, 0, t[0]);
        push_segment(0, 1, t[1]);
        if (t[1] < t[2]) push_segment(1, 1, t[2]);
        push_segment(1, 0, t[3]);
    }
    return f;
}

// Margin that fits every interval and every separation of the canonical atoms.
Rational clamp_margin(Rational m, const Window& w) {
    for (std::size_t i = 0; i < w.ivs.size(); ++i) {
        m = std::min(m, Rational((w.ivs[i].hi - w.ivs[i].lo) / 5));
        if (i + 1 < w.ivs.size())
            m = std::min(m, Rational((w.ivs[i + 1].lo - w.ivs[i].hi) / 3));
    }
    return m;
}

RiemannSandwich sandwich_with_margin(const Window& w, const Rational& m) {
    RiemannSandwich s;
    s.target = w;
    std::vector<std::array<Rational, 4>> lower_traps, upper_traps;
    for (const auto& iv : w.ivs) {
        lower_traps.push_back({iv.lo + m, iv.lo + 2 * m, iv.hi - 2 * m, iv.hi - m});
        upper_traps.push_back({iv.lo - m, iv.lo, iv.hi, iv.hi + m});
    }
    s.lower = trapezoid_chain(lower_traps);
    s.upper = trapezoid_chain(upper_traps);
    s.gap_integral = 4 * m * Rational(static_cast<long long>(w.ivs.size()));
    return s;
}

}  // namespace

RiemannSandwich riemann_sandwich(const Window& w, double eps) {
    if (eps <= 0) throw std::invalid_argument("riemann_sandwich: eps must be positive");
    switch (w.space.kind) {
        case SpaceKind::RealLine: {
            if (w.whole) throw precondition_error("riemann_sandwich: window must be bounded");
            if (w.ivs.empty()) {
                RiemannSandwich s;
                s.target = w;
                s.gap_integral = 0;
                return s;
            }
            Rational m = clamp_margin(
                snap_tolerance(eps) / (4 * Rational(static_cast<long long>(w.ivs.size()))), w);
            return sandwich_with_margin(w, m);
        }
        case SpaceKind::PAdic:
        case SpaceKind::Cyclic: {
            // residue windows are clopen: the indicator is its own envelope
            RiemannSandwich s;
            s.target = w;
            s.lower = WeightFunction::indicator(w);
            s.upper = s.lower;
            s.gap_integral = 0;
            return s;
        }
        default:
            throw std::invalid_argument("riemann_sandwich: scalar internal space required");
    }
}

Certificate gap_certificate(const cps::Scheme& s, const Window& w, double eps,
                            const SetDescriptor& patch, const groups::VanHoveSpec& v,
                            kern::Exec exec) {
    if (eps <= 0) throw std::invalid_argument("gap_certificate: eps must be positive");
    auto flags = cps::window_flags(s, w);
    if (!flags.regular()) {
        std::ostringstream msg;
        msg << "gap_certificate: window is not regular (interior "
            << (flags.nonempty_interior ? "ok" : "empty") << ", closure "
            << (flags.compact_closure ? "compact" : "non-compact") << ")";
        throw precondition_error(msg.str());
    }

    Certificate cert;
    auto ds = cps::density_constant(s);

    if (s.kind == cps::Scheme::Kind::Quadratic) {
        const auto k = static_cast<long long>(w.ivs.size());
        // margin sized so the discrepancy zones (width 3m at each window edge)
        // carry density about 0.6·eps, which keeps both the certified mean
        // bound D_S·4mk and the finite-patch discrepancy density below eps
        Rational m = clamp_margin(rational_from_double(0.1 * eps / (k * ds.value)), w);
        QuadExt eps_q{snap_tolerance(eps)};
        while (!(ds.exact * QuadExt(4 * m * k) <= eps_q)) m *= Rational(63, 64);
        cert.sandwich = sandwich_with_margin(w, m);
    } else if (s.kind == cps::Scheme::Kind::PAdic || s.kind == cps::Scheme::Kind::Trivial) {
        cert.sandwich = riemann_sandwich(w, eps);
    } else {
        throw std::invalid_argument("gap_certificate: product schemes are not supported");
    }

    auto h = s.internal_space();
    cert.mu_eps = cps::omega_comb(s, cert.sandwich.lower, patch, exec);
    cert.nu_eps = cps::omega_comb(s, cert.sandwich.upper, patch, exec);
    cert.lambda_comb = cps::omega_comb(s, WeightFunction::indicator(w), patch, exec);
    cert.gamma = cps::cut_and_project(s, cert.sandwich.upper.support(h), patch, exec);
    cert.certified_bound = (ds.exact * QuadExt(cert.sandwich.gap_integral)).value();

    // exact pointwise chain 0 <= lower <= 1_W <= upper <= 1 on the carrier
    PointMeasure diff;
    diff.patch = patch;
    diff.nonnegative = true;
    diff.integral_support = cert.gamma.integral;
    for (std::size_t i = 0; i < cert.gamma.size(); ++i) {
        QuadExt fe, ge;
        bool in_w;
        if (s.kind == cps::Scheme::Kind::Quadratic) {
            QuadExt star = cps::star_exact(s, cert.gamma.coords[i]);
            fe = cert.sandwich.lower.eval(star);
            ge = cert.sandwich.upper.eval(star);
            in_w = groups::contains(w, star);
        } else {
            long long r = cps::star_residue(s, cert.gamma.coords[i]);
            fe = QuadExt(cert.sandwich.lower.eval_residue(r));
            ge = QuadExt(cert.sandwich.upper.eval_residue(r));
            in_w = groups::contains_int(w, cert.gamma.coords[i].m);
        }
        QuadExt ind{Rational(in_w ? 1 : 0)};
        if (!(QuadExt(Rational(0)) <= fe && fe <= ind && ind <= ge && ge <= QuadExt(Rational(1))))
            throw internal_check_error("gap_certificate: sandwich chain violated at a point");
        double gap_w = (ge - fe).value();
        if (gap_w != 0.0)
            diff.atoms.push_back({cert.gamma.xs[i], {gap_w, 0.0}, cert.gamma.coords[i], true});
    }

    // centered averaging horizon from the patch hull
    double lo, hi;
    bool discrete = patch.space.kind == SpaceKind::Integers;
    if (discrete) {
        if (patch.rngs.empty()) throw precondition_error("gap_certificate: empty patch");
        lo = static_cast<double>(patch.rngs.front().lo);
        hi = static_cast<double>(patch.rngs.back().hi - 1);
    } else {
        if (patch.ivs.empty()) throw precondition_error("gap_certificate: empty patch");
        lo = to_double(patch.ivs.front().lo);
        hi = to_double(patch.ivs.back().hi);
    }
    cert.horizon = static_cast<long long>(std::floor(std::min(-lo, hi)));
    if (cert.horizon < 1)
        throw precondition_error("gap_certificate: patch must straddle the origin");

    cert.empirical_mean_gap = measures::mean_estimate(diff, v, cert.horizon);
    auto disc = measures::discrepancy_set(cert.mu_eps, cert.nu_eps);
    cert.empirical_discrepancy_density =
        measures::uniform_upper_density(disc.points, v, cert.horizon, exec);
    return cert;
}

double min_gap(const cps::PointSet& ps) {
    if (ps.size() < 2) throw precondition_error("min_gap: need at least two points");
    double best = ps.xs[1] - ps.xs[0];
    for (std::size_t i = 2; i < ps.size(); ++i) best = std::min(best, ps.xs[i] - ps.xs[i - 1]);
    return best;
}

measures::BumpFunction default_psi(double gap) {
    if (gap <= 0) throw std::invalid_argument("default_psi: gap must be positive");
    return measures::BumpFunction::tent(rational_from_double(0.45 * gap));
}

PointMeasure t_operator(const measures::BumpFunction& psi, const PointMeasure& omega,
                        const PointMeasure& mu) {
    if (!psi.unit_range() || !psi.peak_at_origin())
        throw std::invalid_argument("t_operator: profile must satisfy 0 <= psi <= 1, psi(0) = 1");
    double r = to_double(psi.radius());
    if (omega.size() >= 2) {
        double g = omega.atoms[1].x - omega.atoms[0].x;
        for (std::size_t i = 2; i < omega.size(); ++i)
            g = std::min(g, omega.atoms[i].x - omega.atoms[i - 1].x);
        if (!(r < g / 2)) {
            std::ostringstream msg;
            msg << "t_operator: support radius " << r << " must stay below half the carrier's "
                << "minimal gap " << g;
            throw precondition_error(msg.str());
        }
    }
    PointMeasure out;
    out.patch = groups::set_intersect(omega.patch, mu.patch);
    out.nonnegative = omega.nonnegative && mu.nonnegative;
    out.integral_support = omega.integral_support;
    for (const auto& a : omega.atoms) {
        std::complex<double> wgt = measures::smooth(psi, mu, a.x).value * a.w;
        if (wgt != std::complex<double>{0.0, 0.0})
            out.atoms.push_back({a.x, wgt, a.coord, a.has_coord});
    }
    return out;
}

namespace {

long long pos_mod(long long n, long long m) {
    long long r = n % m;
    return r < 0 ? r + m : r;
}

// largest rational provably <= v (resp. > v + pad), found by widening steps
Rational pad_below(const QuadExt& v) {
    double d = v.value();
    double step = 1e-9 * (std::abs(d) + 1.0);
    for (int i = 0; i < 64; ++i, step *= 4) {
        Rational c = rational_from_double(d - step);
        if (QuadExt(c) <= v) return c;
    }
    throw internal_check_error("reconstruct_window: failed to bracket a star value from below");
}

Rational pad_above(const QuadExt& v, double pad) {
    double d = v.value() + pad;
    double step = 1e-9 * (std::abs(d) + 1.0);
    for (int i = 0; i < 64; ++i, step *= 4) {
        Rational c = rational_from_double(d + step);
        if (QuadExt(c) > v) return c;
    }
    throw internal_check_error("reconstruct_window: failed to bracket a star value from above");
}

WindowEstimate reconstruct_real(const cps::Scheme& s, const cps::PointSet& lam,
                                double threshold) {
    if (!lam.has_coords())
        throw precondition_error("reconstruct_window: lattice coordinates required");
    std::vector<QuadExt> stars;
    stars.reserve(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (std::abs(cps::direct_value(s, lam.coords[i]) - lam.xs[i]) > 1e-9) {
            std::ostringstream msg;
            msg << "reconstruct_window: point at x=" << lam.xs[i] << " is not on the scheme lattice";
            throw precondition_error(msg.str());
        }
        stars.push_back(cps::star_exact(s, lam.coords[i]));
    }
    std::sort(stars.begin(), stars.end());

    WindowEstimate est;
    std::vector<groups::RealInterval> atoms;
    std::size_t block_start = 0;
    for (std::size_t i = 1; i <= stars.size(); ++i) {
        bool split = i == stars.size() ||
                     (stars[i] - stars[i - 1]).value() > threshold;
        if (!split) continue;
        std::size_t count = i - block_start;
        double spacing = count >= 2
                             ? (stars[i - 1] - stars[block_start]).value() / double(count - 1)
                             : threshold;
        atoms.push_back({pad_below(stars[block_start]), pad_above(stars[i - 1], spacing)});
        est.boundary_mass += 2.0 * spacing;
        block_start = i;
    }
    est.window = SetDescriptor::real_union(std::move(atoms));
    return est;
}

struct ResidueEntry {
    long long residue;
    long long count;
};

void descend_classes(long long p, int depth, int level, long long cls,
                     const std::vector<ResidueEntry>& bucket, double expected_full,
                     std::vector<groups::PadicClass>& keep, double& boundary_mass) {
    long long total = 0;
    for (const auto& e : bucket) total += e.count;
    if (total == 0) return;
    if (static_cast<double>(total) >= 0.5 * expected_full) {
        keep.push_back({cls, level});
        return;
    }
    if (level == depth) {
        // populated but far short of a full class: ambiguous at this horizon
        keep.push_back({cls, level});
        boundary_mass += std::pow(static_cast<double>(p), -level);
        return;
    }
    long long mod = 1;
    for (int i = 0; i < level; ++i) mod *= p;
    std::vector<std::vector<ResidueEntry>> child(p);
    for (const auto& e : bucket) child[(e.residue / mod) % p].push_back(e);
    for (long long t = 0; t < p; ++t)
        descend_classes(p, depth, level + 1, cls + t * mod, child[t], expected_full / p, keep,
                        boundary_mass);
}

WindowEstimate reconstruct_residue(const cps::Scheme& s, const cps::PointSet& lam) {
    long long n_total = 0;
    for (const auto& rg : lam.patch.rngs) n_total += rg.hi - rg.lo;
    if (n_total <= 0) throw precondition_error("reconstruct_window: empty patch");
    for (double x : lam.xs)
        if (x != std::floor(x)) {
            std::ostringstream msg;
            msg << "reconstruct_window: point at x=" << x << " is not on the scheme lattice";
            throw precondition_error(msg.str());
        }

    WindowEstimate est;
    auto h = s.internal_space();
    if (s.kind == cps::Scheme::Kind::Trivial) {
        auto n = static_cast<double>(lam.size());
        est.window = SetDescriptor::cyclic_subset(h, {0});
        if (n < 0.5 * static_cast<double>(n_total)) est.boundary_mass = 1.0;
        return est;
    }

    long long modulus = h.padic_modulus();
    std::map<long long, long long> leaves;
    for (double x : lam.xs) ++leaves[pos_mod(static_cast<long long>(std::llround(x)), modulus)];
    std::vector<ResidueEntry> bucket;
    for (const auto& [r, c] : leaves) bucket.push_back({r, c});

    std::vector<groups::PadicClass> keep;
    descend_classes(s.p, s.depth, 0, 0, bucket, static_cast<double>(n_total), keep,
                    est.boundary_mass);
    est.window = SetDescriptor::padic_union(h, std::move(keep));
    return est;
}

}  // namespace

WindowEstimate reconstruct_window(const cps::Scheme& s, const cps::PointSet& lam,
                                  double gap_threshold) {
    if (lam.size() == 0)
        return {SetDescriptor::empty(s.internal_space()), 0.0};
    switch (s.kind) {
        case cps::Scheme::Kind::Quadratic: {
            double threshold =
                gap_threshold > 0 ? gap_threshold : 5.0 / static_cast<double>(lam.size());
            return reconstruct_real(s, lam, threshold);
        }
        case cps::Scheme::Kind::PAdic:
        case cps::Scheme::Kind::Trivial:
            return reconstruct_residue(s, lam);
        default:
            throw std::invalid_argument("reconstruct_window: product schemes are not supported");
    }
}

}  // namespace aperiodica::gap

#include "aperiodica/measures.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace aperiodica::measures {

using groups::SetDescriptor;
using groups::SpaceKind;

BumpFunction BumpFunction::tent(const Rational& halfwidth) {
    return {cps::WeightFunction::tent(Rational(0), halfwidth)};
}

BumpFunction BumpFunction::plateau(const Rational& top, const Rational& ramp) {
    if (top <= 0 || ramp <= 0) throw std::invalid_argument("plateau: top and ramp must be positive");
    return {cps::WeightFunction::continuous_pl({{-top - ramp, Rational(0)},
                                                {-top, Rational(1)},
                                                {top, Rational(1)},
                                                {top + ramp, Rational(0)}})};
}

BumpFunction BumpFunction::from_profile(cps::WeightFunction f) {
    if (f.kind != cps::WeightFunction::Kind::PiecewiseLinear)
        throw std::invalid_argument("from_profile: piecewise-linear profile required");
    return {std::move(f)};
}

Rational BumpFunction::radius() const {
    SetDescriptor supp = profile.support(groups::SpaceDescriptor::real_line());
    if (supp.ivs.empty()) return Rational(0);
    Rational lo = supp.ivs.front().lo, hi = supp.ivs.back().hi;
    return std::max(lo < 0 ? -lo : lo, hi < 0 ? -hi : hi);
}

bool BumpFunction::unit_range() const {
    // piecewise-linear extremes sit at segment endpoints
    for (std::size_t i = 0; i < profile.left_value.size(); ++i) {
        if (profile.left_value[i] < 0 || profile.left_value[i] > 1) return false;
        if (profile.right_value[i] < 0 || profile.right_value[i] > 1) return false;
    }
    return true;
}

bool BumpFunction::peak_at_origin() const {
    return profile.eval(QuadExt(Rational(0))) == QuadExt(Rational(1));
}

namespace {

// [lo, hi) as a descriptor in the patch's space, for coverage checks
SetDescriptor reach_descriptor(const SetDescriptor& patch, double lo, double hi) {
    if (patch.space.kind == SpaceKind::RealLine)
        return SetDescriptor::interval(rational_from_double(lo), rational_from_double(hi));
    if (patch.space.kind == SpaceKind::Integers) {
        auto a = static_cast<long long>(std::ceil(lo));
        auto b = static_cast<long long>(std::floor(hi)) + 1;
        return SetDescriptor::integer_range(a, b);
    }
    throw std::invalid_argument("point measures live on the line or the integers");
}

bool patch_covers(const SetDescriptor& patch, double lo, double hi) {
    if (hi <= lo) return true;
    return groups::is_empty(groups::set_subtract(reach_descriptor(patch, lo, hi), patch));
}

}  // namespace

SmoothValue smooth(const BumpFunction& phi, const PointMeasure& mu, double x) {
    double r = to_double(phi.radius());
    SmoothValue out;
    out.truncated = !patch_covers(mu.patch, x - r, x + r);
    auto lo = std::lower_bound(mu.atoms.begin(), mu.atoms.end(), x - r,
                               [](const PointMeasure::Atom& a, double v) { return a.x < v; });
    for (auto it = lo; it != mu.atoms.end() && it->x <= x + r; ++it)
        out.value += it->w * phi.eval(x - it->x);
    return out;
}

SampledFunction sample_smooth(const BumpFunction& phi, const PointMeasure& mu, double x0,
                              double pitch, std::size_t count, kern::Exec exec) {
    if (pitch <= 0) throw std::invalid_argument("sample_smooth: pitch must be positive");
    SampledFunction f;
    f.x0 = x0;
    f.pitch = pitch;
    f.values.assign(count, 0.0);
    long long truncated = 0;
    const long long n = static_cast<long long>(count);
    if (exec == kern::Exec::Serial) {
        for (long long i = 0; i < n; ++i) {
            SmoothValue v = smooth(phi, mu, x0 + static_cast<double>(i) * pitch);
            f.values[i] = v.value.real();
            if (v.truncated) ++truncated;
        }
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : truncated) \
    num_threads(kern::thread_count())
#endif
        for (long long i = 0; i < n; ++i) {
            SmoothValue v = smooth(phi, mu, x0 + static_cast<double>(i) * pitch);
            f.values[i] = v.value.real();
            if (v.truncated) ++truncated;
        }
    }
    f.truncated_count = static_cast<std::size_t>(truncated);
    return f;
}

namespace {

std::vector<long long> ladder_up_to(long long n_max) {
    std::vector<long long> ns;
    for (long long decade = 1; decade <= n_max; decade *= 10) {
        for (long long m : {1, 2, 5}) {
            long long n = m * decade;
            if (n < n_max) ns.push_back(n);
        }
    }
    ns.push_back(n_max);
    return ns;
}

}  // namespace

MeanEstimate mean_estimate(const PointMeasure& mu, const groups::VanHoveSpec& v, long long n_max,
                           const std::vector<double>& translates) {
    if (n_max < 1) throw std::invalid_argument("mean_estimate: n_max must be >= 1");
    if (!(v.space == mu.patch.space))
        throw std::invalid_argument("mean_estimate: averaging space does not match the patch");
    const bool discrete = v.space.kind == SpaceKind::Integers;
    if (!discrete && v.space.kind != SpaceKind::RealLine)
        throw std::invalid_argument("mean_estimate: line or integer measures only");
    std::vector<double> shifts = translates.empty() ? std::vector<double>{0.0} : translates;

    for (double x : shifts) {
        if (discrete && x != std::floor(x))
            throw std::invalid_argument("mean_estimate: integer translates required on Z");
        double lo = x - static_cast<double>(n_max);
        double hi = x + static_cast<double>(n_max);  // reach treats hi as inclusive on Z
        if (!patch_covers(mu.patch, lo, hi)) {
            std::ostringstream msg;
            msg << "mean_estimate: patch must contain [" << lo << ", "
                << hi + (discrete ? 1.0 : 0.0) << ") to average at n_max=" << n_max
                << " around translate " << x;
            throw precondition_error(msg.str());
        }
    }

    // prefix sums over the sorted atoms make each window a two-lookup query
    std::vector<std::complex<double>> pre(mu.atoms.size() + 1);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) pre[i + 1] = pre[i] + mu.atoms[i].w;
    auto window_mass = [&](double lo, double hi) {
        auto first = std::lower_bound(mu.atoms.begin(), mu.atoms.end(), lo,
                                      [](const PointMeasure::Atom& a, double v) { return a.x < v; });
        auto last = std::lower_bound(mu.atoms.begin(), mu.atoms.end(), hi,
                                     [](const PointMeasure::Atom& a, double v) { return a.x < v; });
        return pre[last - mu.atoms.begin()] - pre[first - mu.atoms.begin()];
    };
    auto estimate_at = [&](double x, long long n) {
        double hi = x + static_cast<double>(n) + (discrete ? 1.0 : 0.0);
        return window_mass(x - static_cast<double>(n), hi) / to_double(v.volume(n));
    };

    MeanEstimate est;
    est.n_max = n_max;
    for (long long n : ladder_up_to(n_max))
        est.sequence.emplace_back(n, estimate_at(shifts[0], n));
    est.value = est.sequence.back().second;
    for (std::size_t i = 1; i < shifts.size(); ++i)
        est.translate_spread =
            std::max(est.translate_spread, std::abs(estimate_at(shifts[i], n_max) - est.value));
    return est;
}

UpperDensity uniform_upper_density(const cps::PointSet& ps, const groups::VanHoveSpec& v,
                                   long long n_max, kern::Exec exec) {
    if (n_max < 1) throw std::invalid_argument("uniform_upper_density: n_max must be >= 1");
    if (!(v.space == ps.patch.space))
        throw std::invalid_argument("uniform_upper_density: space does not match the patch");
    const bool discrete = v.space.kind == SpaceKind::Integers;
    if (!discrete && v.space.kind != SpaceKind::RealLine)
        throw std::invalid_argument("uniform_upper_density: line or integer sets only");

    double lo, hi;
    if (discrete) {
        if (ps.patch.rngs.empty())
            throw precondition_error("uniform_upper_density: empty patch");
        lo = static_cast<double>(ps.patch.rngs.front().lo);
        hi = static_cast<double>(ps.patch.rngs.back().hi);
    } else {
        if (ps.patch.ivs.empty())
            throw precondition_error("uniform_upper_density: empty patch");
        lo = to_double(ps.patch.ivs.front().lo);
        hi = to_double(ps.patch.ivs.back().hi);
    }
    auto width_of = [&](long long n) { return discrete ? 2.0 * n + 1.0 : 2.0 * n; };
    long long n_fit =
        discrete ? (static_cast<long long>(hi - lo) - 1) / 2
                 : static_cast<long long>(std::floor((hi - lo) / 2.0));
    UpperDensity out;
    out.n_eff = std::min(n_max, n_fit);
    if (out.n_eff < 1)
        throw precondition_error("uniform_upper_density: patch holds no averaging ball");

    std::set<long long> tail{(out.n_eff + 1) / 2, out.n_eff};
    for (long long n : ladder_up_to(out.n_eff))
        if (n >= (out.n_eff + 1) / 2) tail.insert(n);
    for (long long n : tail) {
        double dens =
            ps.xs.empty()
                ? 0.0
                : static_cast<double>(kern::max_window_count(ps.xs, width_of(n), lo, hi, exec)) /
                      to_double(v.volume(n));
        out.by_n.emplace_back(n, dens);
        out.value = std::max(out.value, dens);
    }
    return out;
}

AlmostPeriods almost_periods(const SampledFunction& f, double eps, double horizon,
                             kern::Exec exec) {
    if (f.pitch <= 0) throw std::invalid_argument("almost_periods: pitch must be positive");
    if (eps <= 0) throw std::invalid_argument("almost_periods: eps must be positive");
    auto max_shift = static_cast<long long>(std::floor(horizon / f.pitch + 1e-9));
    if (max_shift >= static_cast<long long>(f.values.size()))
        throw precondition_error("almost_periods: horizon exceeds the sampled range");

    AlmostPeriods out;
    out.periods.push_back(0.0);
    if (max_shift >= 1) {
        auto dev = kern::shift_sup_deviation(f.values, max_shift, exec);
        for (long long j = 1; j <= max_shift; ++j)
            if (dev[j - 1] < eps) out.periods.push_back(static_cast<double>(j) * f.pitch);
    }
    for (std::size_t i = 1; i < out.periods.size(); ++i)
        out.max_gap = std::max(out.max_gap, out.periods[i] - out.periods[i - 1]);
    out.max_gap = std::max(out.max_gap, horizon - out.periods.back());
    return out;
}

namespace {

bool same_support(const PointMeasure::Atom& a, const PointMeasure::Atom& b) {
    if (a.has_coord && b.has_coord) return a.coord == b.coord;
    return a.x == b.x;
}

bool in_patch(const SetDescriptor& patch, const PointMeasure::Atom& a) {
    if (patch.space.kind == SpaceKind::Integers)
        return groups::contains_int(patch, static_cast<long long>(std::llround(a.x)));
    return groups::contains(patch, rational_from_double(a.x));
}

}  // namespace

Discrepancy discrepancy_set(const PointMeasure& mu, const PointMeasure& nu) {
    if (!(mu.patch.space == nu.patch.space))
        throw std::invalid_argument("discrepancy_set: measures live in different spaces");
    Discrepancy out;
    SetDescriptor patch = mu.patch;
    if (!groups::equal_sets(mu.patch, nu.patch)) {
        out.patch_restricted = true;
        patch = groups::set_intersect(mu.patch, nu.patch);
    }
    auto filtered = [&](const PointMeasure& m) {
        std::vector<PointMeasure::Atom> v;
        for (const auto& a : m.atoms)
            if (!out.patch_restricted || in_patch(patch, a)) v.push_back(a);
        return v;
    };
    std::vector<PointMeasure::Atom> a = filtered(mu), b = filtered(nu);

    std::vector<PointMeasure::Atom> diff;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (same_support(a[i], b[j])) {
            if (std::abs(a[i].w - b[j].w) > 1e-12) diff.push_back(a[i]);
            ++i, ++j;
        } else if (a[i].x < b[j].x) {
            diff.push_back(a[i++]);
        } else if (b[j].x < a[i].x) {
            diff.push_back(b[j++]);
        } else {
            // equal position, distinct lattice coords: both sides disagree here
            diff.push_back(a[i++]);
            diff.push_back(b[j++]);
        }
    }
    while (i < a.size()) diff.push_back(a[i++]);
    while (j < b.size()) diff.push_back(b[j++]);

    out.points.patch = patch;
    out.points.integral = mu.integral_support && nu.integral_support;
    bool all_coords = !diff.empty();
    for (const auto& atom : diff) all_coords = all_coords && atom.has_coord;
    for (const auto& atom : diff) {
        out.points.xs.push_back(atom.x);
        if (all_coords) out.points.coords.push_back(atom.coord);
    }
    return out;
}

PointMeasure translated(const PointMeasure& mu, double t) {
    PointMeasure out;
    out.nonnegative = mu.nonnegative;
    if (mu.patch.space.kind == SpaceKind::Integers) {
        if (t != std::floor(t))
            throw std::invalid_argument("translated: integer shift required on Z");
        out.patch = groups::translate_int(mu.patch, static_cast<long long>(t));
        out.integral_support = mu.integral_support;
    } else {
        out.patch = groups::translate(mu.patch, rational_from_double(t));
        out.integral_support = false;
    }
    out.atoms.reserve(mu.atoms.size());
    for (const auto& a : mu.atoms) out.atoms.push_back({a.x + t, a.w, {}, false});
    return out;
}

}  // namespace aperiodica::measures

#pragma once

#include "aperiodica/kernels.hpp"
#include "aperiodica/point_set.hpp"
#include "aperiodica/space.hpp"
#include "aperiodica/weight.hpp"

#include <complex>
#include <vector>

namespace aperiodica::measures {

// Piecewise-linear bump on the line, wrapped with the predicates the
// smoothing and averaging operators care about.
struct BumpFunction {
    cps::WeightFunction profile;

    static BumpFunction tent(const Rational& halfwidth);
    // 1 on [-top, top], linear ramp to 0 over `ramp` on both sides
    static BumpFunction plateau(const Rational& top, const Rational& ramp);
    static BumpFunction from_profile(cps::WeightFunction f);

    double eval(double x) const { return profile.eval(x); }
    QuadExt eval_exact(const QuadExt& x) const { return profile.eval(x); }
    Rational radius() const;      // support radius around the origin
    bool unit_range() const;      // 0 <= phi <= 1 everywhere
    bool peak_at_origin() const;  // phi(0) == 1
};

// phi * mu at one point. `truncated` reports that the support of phi around x
// pokes outside the patch, so mass may be missing.
struct SmoothValue {
    std::complex<double> value;
    bool truncated = false;
};
SmoothValue smooth(const BumpFunction& phi, const PointMeasure& mu, double x);

// Real samples of Re(phi * mu) on a uniform grid.
struct SampledFunction {
    double x0 = 0;
    double pitch = 0;
    std::vector<double> values;
    std::size_t truncated_count = 0;  // samples flagged by smooth()
};
SampledFunction sample_smooth(const BumpFunction& phi, const PointMeasure& mu, double x0,
                              double pitch, std::size_t count,
                              kern::Exec exec = kern::Exec::Parallel);

/**
 * Finite-horizon averaging: value_n = mu(x + A_n) / |A_n| along the ball
 * sequence, evaluated on a 1-2-5 ladder of n up to n_max. `value` is the
 * horizon entry for the first translate; `translate_spread` is the largest
 * horizon deviation any other translate shows against it. Nothing here claims
 * a limit: the sequence itself is the deliverable.
 */
struct MeanEstimate {
    std::vector<std::pair<long long, std::complex<double>>> sequence;
    std::complex<double> value;
    double translate_spread = 0;
    long long n_max = 0;

    double real_value() const { return value.real(); }
};
MeanEstimate mean_estimate(const PointMeasure& mu, const groups::VanHoveSpec& v, long long n_max,
                           const std::vector<double>& translates = {0.0});

/**
 * sup over window placement of card(ps in window) / |A_n|, maximized over n
 * in the tail [n_eff/2, n_eff] where n_eff keeps A_n inside the patch. The
 * placement sup is exact (windows anchored at points), not a shift grid.
 */
struct UpperDensity {
    double value = 0;
    long long n_eff = 0;
    std::vector<std::pair<long long, double>> by_n;
};
UpperDensity uniform_upper_density(const cps::PointSet& ps, const groups::VanHoveSpec& v,
                                   long long n_max, kern::Exec exec = kern::Exec::Parallel);

// Grid shifts t with sup_x |f(x) - f(x - t)| < eps over the comparable range,
// up to `horizon`. max_gap spans consecutive periods plus the trailing gap to
// the horizon (0 is always a period, so there is no leading gap to miss).
struct AlmostPeriods {
    std::vector<double> periods;
    double max_gap = 0;
};
AlmostPeriods almost_periods(const SampledFunction& f, double eps, double horizon,
                             kern::Exec exec = kern::Exec::Parallel);

// Support points where the two measures disagree: unmatched atoms, and shared
// atoms whose weights differ by more than 1e-12. Support identity is exact —
// lattice coordinates when both sides carry them, else exact position.
struct Discrepancy {
    cps::PointSet points;
    bool patch_restricted = false;  // patches differed; compared on the intersection
};
Discrepancy discrepancy_set(const PointMeasure& mu, const PointMeasure& nu);

// Shift every atom and the patch by t. Lattice coords do not survive a
// generic translation, so the result carries positions only.
PointMeasure translated(const PointMeasure& mu, double t);

}  // namespace aperiodica::measures

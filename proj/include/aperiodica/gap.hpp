#pragma once

#include "aperiodica/measures.hpp"
#include "aperiodica/scheme.hpp"

namespace aperiodica::gap {

/**
 * Continuous trapezoid envelope of a window indicator: lower <= 1_W <= upper
 * pointwise, both piecewise linear (or locally constant on residue windows,
 * where the indicator is already continuous and the envelope is exact).
 * gap_integral = ∫(upper - lower) dθ_H, exact from the representations.
 */
struct RiemannSandwich {
    cps::WeightFunction lower, upper;
    Rational gap_integral;
    cps::Window target;
};
// margin m = eps/4 per interval (shrunk to fit short intervals and narrow
// separations); the trapezoid geometry makes ∫(upper - lower) = 4·m·k exactly
RiemannSandwich riemann_sandwich(const cps::Window& w, double eps);

/**
 * Sandwich certificate for a model-set comb: mu_eps = Ω(lower), nu_eps =
 * Ω(upper) on the patch, squeezed between 0 <= mu_eps <= δ_Λ <= nu_eps <= δ_Γ
 * (verified exactly at every enumerated point before returning). The
 * certified bound D_S·∫(upper - lower) <= eps is established in exact
 * arithmetic; the empirical fields report finite-horizon averages.
 */
struct Certificate {
    measures::PointMeasure mu_eps, nu_eps, lambda_comb;
    cps::PointSet gamma;            // carrier model set, window ⊇ supp(upper)
    RiemannSandwich sandwich;
    double certified_bound = 0;     // D_S · gap_integral
    long long horizon = 0;
    measures::MeanEstimate empirical_mean_gap;          // mean of nu - mu
    measures::UpperDensity empirical_discrepancy_density;  // of {mu != nu}
};
Certificate gap_certificate(const cps::Scheme& s, const cps::Window& w, double eps,
                            const groups::SetDescriptor& patch, const groups::VanHoveSpec& v,
                            kern::Exec exec = kern::Exec::Parallel);

// minimal pairwise distance of a sorted configuration (needs >= 2 points)
double min_gap(const cps::PointSet& ps);

// tent of half-width 0.45·gap: the widest default profile that keeps every
// translate of its support meeting the carrier in at most one point
measures::BumpFunction default_psi(double gap);

/**
 * T(mu) = (psi * mu) · omega: sample the smoothed measure at the support of
 * the carrier comb omega and reweight. Requires 0 <= psi <= 1, psi(0) = 1,
 * and support radius below half the carrier's minimal gap.
 */
measures::PointMeasure t_operator(const measures::BumpFunction& psi,
                                  const measures::PointMeasure& omega,
                                  const measures::PointMeasure& mu);

/**
 * Empirical window recovery from the star image of a configuration. Real
 * internal spaces: sort the exact star values, merge runs separated by at
 * most gap_threshold (default 5/N), pad each block by its mean spacing.
 * Residue internal spaces: descend the class tree, keeping classes that hold
 * at least half their expected share of points. boundary_mass estimates the
 * Haar mass left ambiguous at the patch horizon; for a regular model set it
 * shrinks with the patch, for an irregular one it does not.
 */
struct WindowEstimate {
    groups::SetDescriptor window;
    double boundary_mass = 0;
};
WindowEstimate reconstruct_window(const cps::Scheme& s, const cps::PointSet& lam,
                                  double gap_threshold = 0);

}  // namespace aperiodica::gap

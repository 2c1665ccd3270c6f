#pragma once

#include "aperiodica/kernels.hpp"
#include "aperiodica/point_set.hpp"

#include <string>
#include <vector>

namespace aperiodica::meyer {

// Half the minimal gap: the largest radius r with (s+B_r) pairwise disjoint
// over the configuration. A singleton is vacuously discrete at any radius,
// reported as infinity.
double discreteness_radius(const cps::PointSet& ps);

// Half the maximal gap between consecutive points (interior of the patch
// only; the patch edges say nothing about denseness). A singleton falls back
// to half the patch width.
double covering_radius(const cps::PointSet& ps);

/**
 * Finite-patch Meyer diagnosis. The difference sets are computed on the
 * central third of the patch, where every representation by patch points is
 * present. `meyer` means all positive witnesses were found at this scale:
 * a translate cover Lambda - Lambda subset Lambda + F with |F| <= the search
 * bound, and a triple-difference spacing that has not collapsed relative to
 * the configuration's own minimal gap (ratio 1/64). Anything less is
 * `inconclusive` — a finite patch can never certify that a set is not Meyer.
 */
struct MeyerVerdict {
    bool uniformly_discrete = false;
    double discreteness_radius = 0;  // witness for the configuration itself
    bool relatively_dense = false;
    double covering_radius = 0;
    double triple_difference_gap = 0;  // min spacing of (L-L-L) on the central third
    std::size_t triple_count = 0;
    bool f_found = false;
    std::vector<double> f_set;  // translates with (L-L) central subset L + F
    bool meyer = false;
    bool inconclusive = false;
    std::string note;
};
MeyerVerdict meyer_test(const cps::PointSet& ps, std::size_t f_search_bound = 64,
                        kern::Exec exec = kern::Exec::Parallel);

/**
 * Complete enumeration of {sum c_j theta^j : c_j in {0,1}} up to `bound`,
 * theta > 3. Digit vectors ride along so digit-level properties can be
 * checked exactly; xs is sorted and runs parallel to digits (c_0..c_deg,
 * trailing zeros trimmed; the empty sum has an empty vector).
 */
struct ThetaSet {
    double theta = 0;
    double bound = 0;
    std::vector<double> xs;
    std::vector<std::vector<int>> digits;

    cps::PointSet points() const;  // real-line configuration on [0, bound]
};
ThetaSet lambda_theta(double theta, double bound);

// Floors and floors+1 of the theta enumeration, deduplicated: an integer
// point set whose complement stays infinite while its density drops to zero.
cps::PointSet m_theta(double theta, double bound);

// Strict window-count inequality card(L ∩ [t, t+n])/n < (9 n^{log_theta 3}+1)/n,
// the density-zero mechanism made checkable at finite n.
struct DensityCheck {
    long long count = 0;
    double count_ratio = 0;
    double bound_value = 0;
    bool ok = false;
};
DensityCheck density_bound_check(double theta, double t, long long n, const ThetaSet& ts);

}  // namespace aperiodica::meyer

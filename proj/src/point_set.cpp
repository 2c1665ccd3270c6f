#include "aperiodica/point_set.hpp"

#include <algorithm>
#include <cmath>

namespace aperiodica::measures {

double PointMeasure::sup_unit_window() const {
    // Sliding half-open window [t, t+1): the sup over t is attained with the
    // window's left edge anchored at an atom (or just past one), so scanning
    // anchored windows is exact.
    double best = 0.0;
    const std::size_t n = atoms.size();
    std::size_t hi = 0;
    double acc = 0.0;
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(atoms[i].w);
    for (std::size_t lo = 0; lo < n; ++lo) {
        if (hi < lo) {
            hi = lo;
            acc = 0.0;
        }
        while (hi < n && atoms[hi].x < atoms[lo].x + 1.0) acc += mags[hi++];
        best = std::max(best, acc);
        acc -= mags[lo];
    }
    return best;
}

PointMeasure PointMeasure::from_point_set(const cps::PointSet& ps) {
    PointMeasure mu;
    mu.patch = ps.patch;
    mu.integral_support = ps.integral;
    mu.nonnegative = true;
    mu.atoms.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        Atom a;
        a.x = ps.xs[i];
        a.w = {1.0, 0.0};
        if (ps.has_coords()) {
            a.coord = ps.coords[i];
            a.has_coord = true;
        }
        mu.atoms.push_back(a);
    }
    return mu;
}

}  // namespace aperiodica::measures

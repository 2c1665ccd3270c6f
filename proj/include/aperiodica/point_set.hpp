#pragma once

#include "aperiodica/space.hpp"

#include <array>
#include <complex>
#include <vector>

namespace aperiodica::cps {

// Lattice coordinates. Quadratic schemes use both slots (point = m + n*alpha);
// arithmetic schemes over Z use m alone.
struct LatticePoint {
    long long m = 0, n = 0;

    friend LatticePoint operator+(LatticePoint a, LatticePoint b) {
        return {a.m + b.m, a.n + b.n};
    }
    friend LatticePoint operator-(LatticePoint a, LatticePoint b) {
        return {a.m - b.m, a.n - b.n};
    }
    friend bool operator==(LatticePoint a, LatticePoint b) { return a.m == b.m && a.n == b.n; }
    friend bool operator<(LatticePoint a, LatticePoint b) {
        return a.m != b.m ? a.m < b.m : a.n < b.n;
    }
};

// Finite point configuration on a patch of the direct space (R or Z).
// Positions are sorted; coords, when present, run parallel to xs and make
// identity tests exact.
struct PointSet {
    std::vector<double> xs;
    std::vector<LatticePoint> coords;
    groups::SetDescriptor patch;
    bool integral = false;  // all positions are integers

    bool has_coords() const { return coords.size() == xs.size() && !xs.empty(); }
    std::size_t size() const { return xs.size(); }
};

// Product-scheme configuration: pairs of positions with per-factor coords.
struct PointSet2 {
    std::vector<std::array<double, 2>> xs;
    std::vector<std::pair<LatticePoint, LatticePoint>> coords;
    std::size_t size() const { return xs.size(); }
};

}  // namespace aperiodica::cps

namespace aperiodica::measures {

// Weighted Dirac comb on a patch. Atoms stay sorted by position; lattice
// coords, when present, give exact support identity.
struct PointMeasure {
    struct Atom {
        double x = 0;
        std::complex<double> w;
        cps::LatticePoint coord;
        bool has_coord = false;
    };
    std::vector<Atom> atoms;
    groups::SetDescriptor patch;
    bool integral_support = false;
    bool nonnegative = false;

    std::size_t size() const { return atoms.size(); }

    // sup over unit windows of the total weight magnitude inside; finite-patch
    // witness of translation boundedness
    double sup_unit_window() const;

    static PointMeasure from_point_set(const cps::PointSet& ps);
};

}  // namespace aperiodica::measures

#pragma once

#include "aperiodica/kernels.hpp"
#include "aperiodica/point_set.hpp"
#include "aperiodica/space.hpp"
#include "aperiodica/weight.hpp"

#include <memory>
#include <string>

namespace aperiodica::cps {

// alpha = (u + v*sqrt(d)) / w with conjugate (u - v*sqrt(d)) / w.
struct QuadraticIrrational {
    long long u = 1, v = 1, w = 2, d = 5;

    static QuadraticIrrational golden() { return {1, 1, 2, 5}; }
    static QuadraticIrrational silver() { return {1, 1, 1, 2}; }  // 1 + sqrt(2)

    QuadExt value() const { return QuadExt(Rational(u, w), Rational(v, w), d); }
    QuadExt conjugate() const { return QuadExt(Rational(u, w), Rational(-v, w), d); }
};

/**
 * Cut-and-project data: a lattice sitting across direct space G and internal
 * space H, projecting injectively to G and densely to H.
 *
 *   Quadratic: G = R, H = R, lattice {(m + n*alpha, m + n*alpha')}.
 *   PAdic:     G = Z, H = Z_p truncated at depth k, lattice {(n, n mod p^k)}.
 *   Trivial:   G = Z, H = {0}.
 *   Product:   componentwise pairing of two of the above.
 */
struct Scheme {
    enum class Kind { Quadratic, PAdic, Trivial, Product };
    Kind kind = Kind::Quadratic;
    QuadraticIrrational alpha;
    long long p = 0;
    int depth = 0;
    std::shared_ptr<Scheme> left, right;

    static Scheme quadratic(QuadraticIrrational a);
    static Scheme golden() { return quadratic(QuadraticIrrational::golden()); }
    static Scheme padic(long long p, int depth);
    static Scheme trivial();
    static Scheme product(const Scheme& a, const Scheme& b);

    groups::SpaceDescriptor direct_space() const;
    groups::SpaceDescriptor internal_space() const;
};

using Window = groups::SetDescriptor;  // subset of the internal space

// Star map, exact. Quadratic: (m, n) -> m + n*alpha'. PAdic: n -> n mod p^k.
QuadExt star_exact(const Scheme& s, LatticePoint pt);
long long star_residue(const Scheme& s, LatticePoint pt);
double star_value(const Scheme& s, LatticePoint pt);
QuadExt direct_exact(const Scheme& s, LatticePoint pt);
double direct_value(const Scheme& s, LatticePoint pt);

struct WindowFlags {
    bool nonempty_interior = false;
    bool compact_closure = false;
    bool null_boundary = false;
    bool regular() const { return nonempty_interior && compact_closure && null_boundary; }
};
WindowFlags window_flags(const Scheme& s, const Window& w);

// Complete enumeration of {x in lattice : x in patch, x* in window}. The
// coefficient ranges are solved from the patch and the window hull, then every
// candidate passes an exact membership test; nothing is sampled.
PointSet cut_and_project(const Scheme& s, const Window& w, const groups::SetDescriptor& patch,
                         kern::Exec exec = kern::Exec::Parallel);
PointSet2 cut_and_project_product(const Scheme& s, const Window& wa, const Window& wb,
                                  const groups::SetDescriptor& patch_a,
                                  const groups::SetDescriptor& patch_b);

// Weighted comb sum_x h(x*) delta_x restricted to the patch. Indicator
// weights reproduce the model-set comb exactly.
measures::PointMeasure omega_comb(const Scheme& s, const WeightFunction& h,
                                  const groups::SetDescriptor& patch,
                                  kern::Exec exec = kern::Exec::Parallel);

// Reciprocal lattice covolume. Exact as a quadratic-field element for the
// scalar schemes; products of mixed fields fall back to a float value.
struct DensityConstant {
    QuadExt exact;
    bool exact_valid = true;
    double value = 0;
};
DensityConstant density_constant(const Scheme& s);

// max over |m|,|n| <= coeff_bound of |chi_beta(x) - chi_gamma(x*)| for the
// line characters chi_t(y) = exp(2 pi i t y). Euclidean internal spaces only.
struct CharacterLiftResult {
    double max_deviation = 0;
    LatticePoint worst;
    bool pass = false;
};
CharacterLiftResult character_lift_check(const Scheme& s, double beta, double gamma,
                                         long long coeff_bound, double tol,
                                         kern::Exec exec = kern::Exec::Parallel);
// exact dual-pair certificate: beta - gamma and beta*alpha - gamma*alpha'
// both integers
bool is_dual_pair(const Scheme& s, const QuadExt& beta, const QuadExt& gamma);

}  // namespace aperiodica::cps

#pragma once

#include "aperiodica/errors.hpp"
#include "aperiodica/quadratic.hpp"
#include "aperiodica/rational.hpp"

#include <memory>
#include <string>
#include <vector>

namespace aperiodica::groups {

/**
 * The group catalogue: the real line and plane, the integers, p-adic integers
 * truncated at a finite depth (residues mod p^depth with total Haar mass 1),
 * finite cyclic groups, and binary products of these, nested at most twice.
 *
 * Haar normalization: Lebesgue on R^d, counting on Z and Z/mZ, total mass 1
 * on the truncated p-adics (a class r + p^j Z_p has mass p^-j).
 */
enum class SpaceKind { RealLine, RealPlane, Integers, PAdic, Cyclic, Product };

struct SpaceDescriptor {
    SpaceKind kind = SpaceKind::RealLine;
    long long p = 0;       // PAdic prime
    int depth = 0;         // PAdic truncation: classes live at levels 0..depth
    long long modulus = 0; // Cyclic
    std::shared_ptr<SpaceDescriptor> first, second; // product factors

    static SpaceDescriptor real_line();
    static SpaceDescriptor real_plane();
    static SpaceDescriptor integers();
    static SpaceDescriptor padic(long long p, int depth);
    static SpaceDescriptor cyclic(long long modulus);
    static SpaceDescriptor product(const SpaceDescriptor& a, const SpaceDescriptor& b);

    // RealPlane is stored with two RealLine factors so the set algebra treats
    // it exactly like a product.
    bool product_like() const { return kind == SpaceKind::Product || kind == SpaceKind::RealPlane; }
    bool compact() const;
    long long padic_modulus() const; // p^depth

    friend bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b);
};

// Atoms. All scalar sets are kept in a canonical form: real and integer
// intervals sorted, disjoint and non-touching; p-adic classes pairwise
// disjoint with complete sibling families merged into their parent.
struct RealInterval {
    Rational lo, hi; // [lo, hi)
};
struct IntRange {
    long long lo = 0, hi = 0; // {lo, ..., hi-1}
};
struct PadicClass {
    long long r = 0; // residue, 0 <= r < p^level
    int level = 0;   // r + p^level Z_p
};

struct SetDescriptor {
    SpaceDescriptor space;
    bool whole = false;                  // the entire group (R, Z, or a product hull)
    std::vector<RealInterval> ivs;       // RealLine
    std::vector<IntRange> rngs;          // Integers
    std::vector<PadicClass> classes;     // PAdic
    std::vector<long long> members;      // Cyclic
    std::vector<std::pair<SetDescriptor, SetDescriptor>> boxes; // products, pairwise disjoint

    static SetDescriptor empty(const SpaceDescriptor& s);
    static SetDescriptor whole_space(const SpaceDescriptor& s);
    static SetDescriptor real_union(std::vector<RealInterval> atoms);
    static SetDescriptor interval(const Rational& lo, const Rational& hi);
    static SetDescriptor integer_union(std::vector<IntRange> atoms);
    static SetDescriptor integer_range(long long lo, long long hi_exclusive);
    static SetDescriptor padic_union(const SpaceDescriptor& s, std::vector<PadicClass> atoms);
    static SetDescriptor residue_class(const SpaceDescriptor& s, long long r, int level);
    static SetDescriptor cyclic_subset(const SpaceDescriptor& s, std::vector<long long> members);
    static SetDescriptor box(const SpaceDescriptor& s, SetDescriptor a, SetDescriptor b);
};

bool is_empty(const SetDescriptor& sd);
bool is_bounded(const SetDescriptor& sd);
bool equal_sets(const SetDescriptor& a, const SetDescriptor& b);

SetDescriptor set_union(const SetDescriptor& a, const SetDescriptor& b);
SetDescriptor set_intersect(const SetDescriptor& a, const SetDescriptor& b);
SetDescriptor set_subtract(const SetDescriptor& a, const SetDescriptor& b);
SetDescriptor minkowski_sum(const SetDescriptor& a, const SetDescriptor& b);
SetDescriptor negate(const SetDescriptor& a);

// Membership. Scalar spaces only; product membership goes through the factors.
bool contains(const SetDescriptor& sd, const Rational& x);  // RealLine, exact
bool contains(const SetDescriptor& sd, const QuadExt& x);   // RealLine, exact
bool contains_int(const SetDescriptor& sd, long long n);    // Integers, PAdic, Cyclic

SetDescriptor translate(const SetDescriptor& sd, const Rational& t); // RealLine
SetDescriptor translate_int(const SetDescriptor& sd, long long t);   // Integers, PAdic, Cyclic

// Exact Haar measure. Throws measure_infinite_error on unbounded descriptors
// over non-compact groups.
Rational haar_measure(const SetDescriptor& sd);

// K-collar of the boundary of `a`: points of the closure of the complement
// reachable from a by K, together with points of a+K outside the interior.
// Computed in the canonical half-open algebra, so null sets of isolated
// endpoints are dropped; the Haar measure of the result is unaffected.
SetDescriptor k_boundary(const SetDescriptor& a, const SetDescriptor& k);

// Centered-ball averaging sequence A_n with radius n.
struct VanHoveSpec {
    SpaceDescriptor space;

    explicit VanHoveSpec(SpaceDescriptor s) : space(std::move(s)) {}
    SetDescriptor ball(long long n) const;
    Rational volume(long long n) const;
};

// |d^K A_n| / |A_n|, exact.
Rational van_hove_ratio(const VanHoveSpec& v, const SetDescriptor& k, long long n);

}  // namespace aperiodica::groups

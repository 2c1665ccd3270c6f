#pragma once

#include "aperiodica/quadratic.hpp"
#include "aperiodica/space.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace aperiodica::cps {

/**
 * Weight function on an internal space. Over the real line it is piecewise
 * linear with jumps allowed: on each segment [x_i, x_{i+1}) the value runs
 * linearly from left_value[i] to the right limit right_value[i], and it is
 * zero outside [x_0, x_last). Indicators of half-open interval unions and
 * continuous piecewise-linear bumps are both instances. Over p-adic and
 * cyclic spaces it is a finite step function on disjoint classes (locally
 * constant, hence continuous there).
 *
 * Breakpoints and values are exact rationals; evaluation at quadratic
 * irrationals stays exact.
 */
struct WeightFunction {
    enum class Kind { PiecewiseLinear, Steps };
    Kind kind = Kind::PiecewiseLinear;

    // PiecewiseLinear (real internal space)
    std::vector<Rational> breaks;       // size k+1 for k segments, strictly increasing
    std::vector<Rational> left_value;   // size k
    std::vector<Rational> right_value;  // size k

    // Steps
    groups::SetDescriptor support_classes;  // union of the step atoms
    std::vector<std::pair<groups::PadicClass, Rational>> padic_steps;
    std::vector<std::pair<long long, Rational>> cyclic_steps;

    static WeightFunction indicator(const groups::SetDescriptor& w);
    // continuous piecewise-linear function through the given nodes, zero
    // outside the node range (first and last node values must be 0)
    static WeightFunction continuous_pl(std::vector<std::pair<Rational, Rational>> nodes);
    static WeightFunction tent(const Rational& center, const Rational& halfwidth);

    QuadExt eval(const QuadExt& x) const;  // real-line kind
    double eval(double x) const;
    Rational eval_residue(long long r) const;  // step kind

    Rational integral() const;  // against the internal Haar measure
    bool continuous() const;
    bool nonnegative() const;
    Rational max_value() const;
    groups::SetDescriptor support(const groups::SpaceDescriptor& h) const;
};

// Finite sum of tensor atoms f_i(x) * g_i(y) for product internal spaces.
struct ProductWeight {
    std::vector<std::pair<WeightFunction, WeightFunction>> terms;

    double eval(double x, double y) const;
    Rational integral() const;
};

}  // namespace aperiodica::cps

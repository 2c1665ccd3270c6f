#include "aperiodica/weight.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>

namespace aperiodica::cps {

using groups::SetDescriptor;
using groups::SpaceDescriptor;
using groups::SpaceKind;

WeightFunction WeightFunction::indicator(const SetDescriptor& w) {
    WeightFunction f;
    switch (w.space.kind) {
        case SpaceKind::RealLine: {
            f.kind = Kind::PiecewiseLinear;
            if (w.whole) throw precondition_error("indicator: window must be bounded");
            // contiguous segment chain over the atom hull; gaps carry value 0
            for (std::size_t i = 0; i < w.ivs.size(); ++i) {
                if (i > 0 && w.ivs[i - 1].hi < w.ivs[i].lo) {
                    f.breaks.push_back(w.ivs[i - 1].hi);
                    f.left_value.push_back(0);
                    f.right_value.push_back(0);
                }
                f.breaks.push_back(w.ivs[i].lo);
                f.left_value.push_back(1);
                f.right_value.push_back(1);
            }
            if (!w.ivs.empty()) f.breaks.push_back(w.ivs.back().hi);
            break;
        }
        case SpaceKind::PAdic:
            f.kind = Kind::Steps;
            f.support_classes = w;
            for (const auto& c : w.classes) f.padic_steps.emplace_back(c, Rational(1));
            break;
        case SpaceKind::Cyclic:
            f.kind = Kind::Steps;
            f.support_classes = w;
            for (long long m : w.members) f.cyclic_steps.emplace_back(m, Rational(1));
            break;
        default: throw std::invalid_argument("indicator: scalar internal space required");
    }
    return f;
}

WeightFunction WeightFunction::continuous_pl(std::vector<std::pair<Rational, Rational>> nodes) {
    if (nodes.size() < 2) throw std::invalid_argument("continuous_pl: need at least two nodes");
    std::sort(nodes.begin(), nodes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i - 1].first == nodes[i].first)
            throw std::invalid_argument("continuous_pl: duplicate node abscissa");
    if (nodes.front().second != 0 || nodes.back().second != 0)
        throw std::invalid_argument("continuous_pl: boundary node values must be zero");
    WeightFunction f;
    f.kind = Kind::PiecewiseLinear;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        f.breaks.push_back(nodes[i].first);
        if (i + 1 < nodes.size()) {
            f.left_value.push_back(nodes[i].second);
            f.right_value.push_back(nodes[i + 1].second);
        }
    }
    return f;
}

WeightFunction WeightFunction::tent(const Rational& center, const Rational& halfwidth) {
    if (halfwidth <= 0) throw std::invalid_argument("tent: halfwidth must be positive");
    return continuous_pl({{center - halfwidth, Rational(0)},
                          {center, Rational(1)},
                          {center + halfwidth, Rational(0)}});
}

QuadExt WeightFunction::eval(const QuadExt& x) const {
    if (kind != Kind::PiecewiseLinear)
        throw std::invalid_argument("eval(QuadExt): piecewise-linear weight required");
    if (breaks.empty()) return QuadExt(Rational(0));
    if (x < QuadExt(breaks.front()) || x >= QuadExt(breaks.back())) return QuadExt(Rational(0));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (x < QuadExt(breaks[i + 1])) {
            Rational slope = (right_value[i] - left_value[i]) / (breaks[i + 1] - breaks[i]);
            return QuadExt(left_value[i]) + (x - QuadExt(breaks[i])) * slope;
        }
    }
    return QuadExt(Rational(0));
}

double WeightFunction::eval(double x) const {
    if (kind != Kind::PiecewiseLinear)
        throw std::invalid_argument("eval(double): piecewise-linear weight required");
    if (breaks.empty()) return 0;
    double lo = to_double(breaks.front());
    if (x < lo || x >= to_double(breaks.back())) return 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double hi = to_double(breaks[i + 1]);
        if (x < hi) {
            double l = to_double(left_value[i]), r = to_double(right_value[i]);
            double b = to_double(breaks[i]);
            return l + (r - l) * (x - b) / (hi - b);
        }
    }
    return 0;
}

Rational WeightFunction::eval_residue(long long r) const {
    if (kind != Kind::Steps) throw std::invalid_argument("eval_residue: step weight required");
    for (const auto& [cls, v] : padic_steps) {
        long long mod = 1;
        for (int i = 0; i < cls.level; ++i) mod *= support_classes.space.p;
        long long rr = r % mod;
        if (rr < 0) rr += mod;
        if (rr == cls.r) return v;
    }
    for (const auto& [m, v] : cyclic_steps) {
        long long mod = support_classes.space.modulus;
        long long rr = r % mod;
        if (rr < 0) rr += mod;
        if (rr == m) return v;
    }
    return Rational(0);
}

Rational WeightFunction::integral() const {
    Rational total = 0;
    if (kind == Kind::PiecewiseLinear) {
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
            total += (left_value[i] + right_value[i]) * (breaks[i + 1] - breaks[i]) / 2;
    } else {
        for (const auto& [cls, v] : padic_steps) {
            long long mod = 1;
            for (int i = 0; i < cls.level; ++i) mod *= support_classes.space.p;
            total += v / mod;
        }
        for (const auto& [m, v] : cyclic_steps) {
            (void)m;
            total += v;
        }
    }
    return total;
}

bool WeightFunction::continuous() const {
    if (kind == Kind::Steps) return true;  // locally constant
    if (breaks.empty()) return true;
    if (left_value.front() != 0 || right_value.back() != 0) return false;
    for (std::size_t i = 0; i + 1 < left_value.size(); ++i)
        if (right_value[i] != left_value[i + 1]) return false;
    return true;
}

bool WeightFunction::nonnegative() const {
    if (kind == Kind::Steps) {
        for (const auto& [c, v] : padic_steps)
            if (v < 0) return false;
        for (const auto& [m, v] : cyclic_steps)
            if (v < 0) return false;
        return true;
    }
    for (std::size_t i = 0; i < left_value.size(); ++i)
        if (left_value[i] < 0 || right_value[i] < 0) return false;
    return true;
}

Rational WeightFunction::max_value() const {
    Rational m = 0;
    if (kind == Kind::Steps) {
        for (const auto& [c, v] : padic_steps) m = std::max(m, v);
        for (const auto& [x, v] : cyclic_steps) m = std::max(m, v);
        return m;
    }
    for (std::size_t i = 0; i < left_value.size(); ++i)
        m = std::max({m, left_value[i], right_value[i]});
    return m;
}

SetDescriptor WeightFunction::support(const SpaceDescriptor& h) const {
    if (kind == Kind::Steps) return support_classes;
    if (h.kind != SpaceKind::RealLine)
        throw std::invalid_argument("support: space does not match weight kind");
    std::vector<groups::RealInterval> atoms;
    for (std::size_t i = 0; i < left_value.size(); ++i)
        if (left_value[i] != 0 || right_value[i] != 0)
            atoms.push_back({breaks[i], breaks[i + 1]});
    return SetDescriptor::real_union(std::move(atoms));
}

double ProductWeight::eval(double x, double y) const {
    double v = 0;
    for (const auto& [f, g] : terms) v += f.eval(x) * g.eval(y);
    return v;
}

Rational ProductWeight::integral() const {
    Rational v = 0;
    for (const auto& [f, g] : terms) v += f.integral() * g.integral();
    return v;
}

}  // namespace aperiodica::cps

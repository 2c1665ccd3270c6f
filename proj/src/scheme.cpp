#include "aperiodica/scheme.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aperiodica::cps {

using groups::SetDescriptor;
using groups::SpaceDescriptor;
using groups::SpaceKind;

namespace {

bool is_square(long long d) {
    long long r = static_cast<long long>(std::sqrt(static_cast<double>(d)));
    for (long long s = std::max(0LL, r - 2); s <= r + 2; ++s)
        if (s * s == d) return true;
    return false;
}

long long ipow(long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

long long pos_mod(long long n, long long m) {
    long long r = n % m;
    return r < 0 ? r + m : r;
}

}  // namespace

Scheme Scheme::quadratic(QuadraticIrrational a) {
    if (a.v <= 0 || a.w <= 0) throw std::invalid_argument("quadratic scheme: need v > 0, w > 0");
    if (a.d < 2 || is_square(a.d))
        throw std::invalid_argument("quadratic scheme: d must be a non-square >= 2");
    Scheme s;
    s.kind = Kind::Quadratic;
    s.alpha = a;
    return s;
}

Scheme Scheme::padic(long long p, int depth) {
    SpaceDescriptor::padic(p, depth);  // validates
    Scheme s;
    s.kind = Kind::PAdic;
    s.p = p;
    s.depth = depth;
    return s;
}

Scheme Scheme::trivial() {
    Scheme s;
    s.kind = Kind::Trivial;
    return s;
}

Scheme Scheme::product(const Scheme& a, const Scheme& b) {
    if (a.kind == Kind::Product || b.kind == Kind::Product)
        throw std::invalid_argument("product scheme: factors must be scalar schemes");
    Scheme s;
    s.kind = Kind::Product;
    s.left = std::make_shared<Scheme>(a);
    s.right = std::make_shared<Scheme>(b);
    return s;
}

SpaceDescriptor Scheme::direct_space() const {
    switch (kind) {
        case Kind::Quadratic: return SpaceDescriptor::real_line();
        case Kind::PAdic:
        case Kind::Trivial: return SpaceDescriptor::integers();
        default:
            return SpaceDescriptor::product(left->direct_space(), right->direct_space());
    }
}

SpaceDescriptor Scheme::internal_space() const {
    switch (kind) {
        case Kind::Quadratic: return SpaceDescriptor::real_line();
        case Kind::PAdic: return SpaceDescriptor::padic(p, depth);
        case Kind::Trivial: return SpaceDescriptor::cyclic(1);
        default:
            return SpaceDescriptor::product(left->internal_space(), right->internal_space());
    }
}

QuadExt star_exact(const Scheme& s, LatticePoint pt) {
    if (s.kind != Scheme::Kind::Quadratic)
        throw std::invalid_argument("star_exact: quadratic scheme required");
    return QuadExt(Rational(pt.m)) + s.alpha.conjugate() * Rational(pt.n);
}

long long star_residue(const Scheme& s, LatticePoint pt) {
    switch (s.kind) {
        case Scheme::Kind::PAdic: return pos_mod(pt.m, ipow(s.p, s.depth));
        case Scheme::Kind::Trivial: return 0;
        default: throw std::invalid_argument("star_residue: arithmetic scheme required");
    }
}

double star_value(const Scheme& s, LatticePoint pt) {
    if (s.kind == Scheme::Kind::Quadratic) return star_exact(s, pt).value();
    return static_cast<double>(star_residue(s, pt));
}

QuadExt direct_exact(const Scheme& s, LatticePoint pt) {
    if (s.kind != Scheme::Kind::Quadratic)
        throw std::invalid_argument("direct_exact: quadratic scheme required");
    return QuadExt(Rational(pt.m)) + s.alpha.value() * Rational(pt.n);
}

double direct_value(const Scheme& s, LatticePoint pt) {
    if (s.kind == Scheme::Kind::Quadratic) return direct_exact(s, pt).value();
    return static_cast<double>(pt.m);
}

WindowFlags window_flags(const Scheme& s, const Window& w) {
    if (!(w.space == s.internal_space()))
        throw std::invalid_argument("window_flags: window lives in the wrong space");
    WindowFlags f;
    f.nonempty_interior = !groups::is_empty(w);  // canonical atoms have interior
    f.compact_closure = groups::is_bounded(w);
    // interval unions have finite boundaries; classes and finite subsets are clopen
    f.null_boundary = true;
    return f;
}

// ---------------------------------------------------------------------------
// enumeration

namespace {

// Exact membership with a float fast path: candidates more than `margin` away
// from every atom boundary are classified in doubles (safe for coefficients
// up to ~1e6, where the double star error is < 1e-9); borderline candidates
// fall through to the exact quadratic-field test.
struct RealMembership {
    const SetDescriptor& sd;
    double margin = 1e-6;

    bool test(double xd, const QuadExt& exact) const {
        for (const auto& iv : sd.ivs) {
            double lo = to_double(iv.lo), hi = to_double(iv.hi);
            if (xd >= lo + margin && xd < hi - margin) return true;
        }
        bool borderline = false;
        for (const auto& iv : sd.ivs) {
            double lo = to_double(iv.lo), hi = to_double(iv.hi);
            if (std::abs(xd - lo) <= margin || std::abs(xd - hi) <= margin) {
                borderline = true;
                break;
            }
        }
        if (!borderline) return false;
        return groups::contains(sd, exact);
    }
};

void enumerate_quadratic_range(const Scheme& s, const Window& w, const SetDescriptor& patch,
                               long long n_lo, long long n_hi,
                               std::vector<LatticePoint>& out) {
    const double alpha = s.alpha.value().value();
    const double alpha_c = s.alpha.conjugate().value();
    RealMembership in_window{w};
    RealMembership in_patch{patch};

    double y0 = to_double(w.ivs.front().lo), y1 = to_double(w.ivs.back().hi);
    for (long long n = n_lo; n <= n_hi; ++n) {
        for (const auto& pi : patch.ivs) {
            double x0 = to_double(pi.lo), x1 = to_double(pi.hi);
            double m_lo = std::max(x0 - n * alpha, y0 - n * alpha_c) - 2;
            double m_hi = std::min(x1 - n * alpha, y1 - n * alpha_c) + 2;
            if (m_hi < m_lo) continue;
            auto m_first = static_cast<long long>(std::floor(m_lo));
            auto m_last = static_cast<long long>(std::ceil(m_hi));
            for (long long m = m_first; m <= m_last; ++m) {
                LatticePoint pt{m, n};
                double xd = m + n * alpha;
                double yd = m + n * alpha_c;
                if (!in_patch.test(xd, direct_exact(s, pt))) continue;
                if (!in_window.test(yd, star_exact(s, pt))) continue;
                out.push_back(pt);
            }
        }
    }
}

}  // namespace

PointSet cut_and_project(const Scheme& s, const Window& w, const SetDescriptor& patch,
                         kern::Exec exec) {
    if (!(w.space == s.internal_space()))
        throw std::invalid_argument("cut_and_project: window lives in the wrong space");
    if (!(patch.space == s.direct_space()))
        throw std::invalid_argument("cut_and_project: patch lives in the wrong space");
    if (!groups::is_bounded(patch))
        throw precondition_error("cut_and_project: patch must be bounded");
    if (!groups::is_bounded(w))
        throw precondition_error("cut_and_project: window must be bounded");

    PointSet ps;
    ps.patch = patch;
    if (groups::is_empty(w) || groups::is_empty(patch)) return ps;

    switch (s.kind) {
        case Scheme::Kind::Quadratic: {
            const double alpha = s.alpha.value().value();
            const double alpha_c = s.alpha.conjugate().value();
            const double denom = alpha - alpha_c;  // 2v sqrt(d) / w > 0
            double x0 = to_double(patch.ivs.front().lo), x1 = to_double(patch.ivs.back().hi);
            double y0 = to_double(w.ivs.front().lo), y1 = to_double(w.ivs.back().hi);
            auto n_lo = static_cast<long long>(std::floor((x0 - y1) / denom)) - 2;
            auto n_hi = static_cast<long long>(std::ceil((x1 - y0) / denom)) + 2;

            std::vector<LatticePoint> pts;
            if (exec == kern::Exec::Serial) {
                enumerate_quadratic_range(s, w, patch, n_lo, n_hi, pts);
            } else {
                int nt = kern::thread_count();
                long long span = n_hi - n_lo + 1;
                long long chunk = std::max<long long>(1, (span + nt - 1) / nt);
                std::vector<std::vector<LatticePoint>> parts((span + chunk - 1) / chunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(nt)
#endif
                for (long long c = 0; c < static_cast<long long>(parts.size()); ++c) {
                    long long lo = n_lo + c * chunk;
                    long long hi = std::min(n_hi, lo + chunk - 1);
                    enumerate_quadratic_range(s, w, patch, lo, hi, parts[c]);
                }
                for (auto& part : parts) pts.insert(pts.end(), part.begin(), part.end());
            }
            std::sort(pts.begin(), pts.end(), [&](LatticePoint a, LatticePoint b) {
                double xa = a.m + a.n * alpha, xb = b.m + b.n * alpha;
                if (xa != xb) return xa < xb;
                return a < b;
            });
            // candidate ranges of adjacent patch atoms overlap by the padding,
            // so the same lattice point can surface twice
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            for (const auto& pt : pts) {
                ps.xs.push_back(pt.m + pt.n * alpha);
                ps.coords.push_back(pt);
            }
            break;
        }
        case Scheme::Kind::PAdic: {
            std::vector<long long> vals;
            for (const auto& cls : w.classes) {
                long long mod = ipow(s.p, cls.level);
                for (const auto& rg : patch.rngs) {
                    long long first = rg.lo + pos_mod(cls.r - rg.lo, mod);
                    for (long long v = first; v < rg.hi; v += mod) vals.push_back(v);
                }
            }
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            for (long long v : vals) {
                ps.xs.push_back(static_cast<double>(v));
                ps.coords.push_back({v, 0});
            }
            ps.integral = true;
            break;
        }
        case Scheme::Kind::Trivial: {
            if (!w.members.empty()) {
                for (const auto& rg : patch.rngs)
                    for (long long v = rg.lo; v < rg.hi; ++v) {
                        ps.xs.push_back(static_cast<double>(v));
                        ps.coords.push_back({v, 0});
                    }
            }
            ps.integral = true;
            break;
        }
        default:
            throw std::invalid_argument(
                "cut_and_project: use cut_and_project_product for product schemes");
    }
    return ps;
}

PointSet2 cut_and_project_product(const Scheme& s, const Window& wa, const Window& wb,
                                  const SetDescriptor& patch_a, const SetDescriptor& patch_b) {
    if (s.kind != Scheme::Kind::Product)
        throw std::invalid_argument("cut_and_project_product: product scheme required");
    PointSet left = cut_and_project(*s.left, wa, patch_a);
    PointSet right = cut_and_project(*s.right, wb, patch_b);
    PointSet2 out;
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j) {
            out.xs.push_back({left.xs[i], right.xs[j]});
            out.coords.emplace_back(left.coords[i], right.coords[j]);
        }
    return out;
}

measures::PointMeasure omega_comb(const Scheme& s, const WeightFunction& h,
                                  const SetDescriptor& patch, kern::Exec exec) {
    SetDescriptor supp = h.support(s.internal_space());
    PointSet ps = cut_and_project(s, supp, patch, exec);
    measures::PointMeasure mu;
    mu.patch = patch;
    mu.integral_support = ps.integral;
    mu.nonnegative = h.nonnegative();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double wv;
        if (h.kind == WeightFunction::Kind::PiecewiseLinear) {
            QuadExt ev = (s.kind == Scheme::Kind::Quadratic)
                             ? h.eval(star_exact(s, ps.coords[i]))
                             : h.eval(QuadExt(Rational(0)));
            if (ev.sign() == 0) continue;
            wv = ev.value();
        } else {
            Rational rv = h.eval_residue(star_residue(s, ps.coords[i]));
            if (rv == 0) continue;
            wv = to_double(rv);
        }
        mu.atoms.push_back({ps.xs[i], {wv, 0.0}, ps.coords[i], true});
    }
    return mu;
}

DensityConstant density_constant(const Scheme& s) {
    DensityConstant dc;
    switch (s.kind) {
        case Scheme::Kind::Quadratic: {
            // covolume = |alpha' - alpha| = 2v sqrt(d)/w, so the density
            // constant is w / (2 v sqrt(d)) = (w / 2vd) sqrt(d)
            dc.exact = QuadExt(Rational(0), Rational(s.alpha.w, 2 * s.alpha.v * s.alpha.d),
                               s.alpha.d);
            dc.value = dc.exact.value();
            break;
        }
        case Scheme::Kind::PAdic:
        case Scheme::Kind::Trivial:
            dc.exact = QuadExt(Rational(1));
            dc.value = 1.0;
            break;
        default: {
            DensityConstant a = density_constant(*s.left), b = density_constant(*s.right);
            dc.value = a.value * b.value;
            if (a.exact_valid && b.exact_valid &&
                (a.exact.D == 0 || b.exact.D == 0 || a.exact.D == b.exact.D)) {
                dc.exact = a.exact * b.exact;
            } else {
                dc.exact_valid = false;
            }
        }
    }
    return dc;
}

CharacterLiftResult character_lift_check(const Scheme& s, double beta, double gamma,
                                         long long coeff_bound, double tol, kern::Exec exec) {
    if (s.kind != Scheme::Kind::Quadratic)
        throw precondition_error(
            "character_lift_check: internal space is not Euclidean (p-adic characters "
            "unsupported)");
    if (coeff_bound < 0) throw std::invalid_argument("character_lift_check: negative bound");
    const double alpha = s.alpha.value().value();
    const double alpha_c = s.alpha.conjugate().value();
    const long long b = coeff_bound;
    const long long rows = 2 * b + 1;

    std::vector<double> row_dev(rows, 0.0);
    std::vector<long long> row_arg(rows, 0);
    auto scan_row = [&](long long ri) {
        long long m = ri - b;
        double best = 0.0;
        long long argn = -b;
        for (long long n = -b; n <= b; ++n) {
            double d = beta * (m + n * alpha) - gamma * (m + n * alpha_c);
            double dev = 2.0 * std::abs(std::sin(M_PI * (d - std::round(d))));
            if (dev > best) {
                best = dev;
                argn = n;
            }
        }
        row_dev[ri] = best;
        row_arg[ri] = argn;
    };
    if (exec == kern::Exec::Serial) {
        for (long long ri = 0; ri < rows; ++ri) scan_row(ri);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(kern::thread_count())
#endif
        for (long long ri = 0; ri < rows; ++ri) scan_row(ri);
    }
    CharacterLiftResult r;
    for (long long ri = 0; ri < rows; ++ri) {
        if (row_dev[ri] > r.max_deviation) {
            r.max_deviation = row_dev[ri];
            r.worst = {ri - b, row_arg[ri]};
        }
    }
    r.pass = r.max_deviation <= tol;
    return r;
}

bool is_dual_pair(const Scheme& s, const QuadExt& beta, const QuadExt& gamma) {
    if (s.kind != Scheme::Kind::Quadratic)
        throw std::invalid_argument("is_dual_pair: quadratic scheme required");
    QuadExt d1 = beta - gamma;
    QuadExt d2 = beta * s.alpha.value() - gamma * s.alpha.conjugate();
    auto is_integer = [](const QuadExt& q) {
        return q.b == 0 && denominator(q.a) == 1;
    };
    return is_integer(d1) && is_integer(d2);
}

}  // namespace aperiodica::cps

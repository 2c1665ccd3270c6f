#include "aperiodica/meyer.hpp"

#include "aperiodica/errors.hpp"
#include "aperiodica/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace aperiodica::meyer {

using cps::LatticePoint;
using cps::PointSet;
using groups::SetDescriptor;
using groups::SpaceKind;

namespace {

// patch hull [A, B) as doubles, for scale decisions only
std::pair<double, double> patch_hull(const SetDescriptor& patch) {
    if (patch.space.kind == SpaceKind::RealLine && !patch.ivs.empty())
        return {to_double(patch.ivs.front().lo), to_double(patch.ivs.back().hi)};
    if (patch.space.kind == SpaceKind::Integers && !patch.rngs.empty())
        return {static_cast<double>(patch.rngs.front().lo),
                static_cast<double>(patch.rngs.back().hi)};
    throw precondition_error("meyer: configuration needs a nonempty line or integer patch");
}

}  // namespace

double discreteness_radius(const PointSet& ps) {
    if (ps.size() == 0) throw precondition_error("discreteness_radius: empty configuration");
    if (ps.size() == 1) return std::numeric_limits<double>::infinity();
    return gap::min_gap(ps) / 2.0;
}

double covering_radius(const PointSet& ps) {
    if (ps.size() == 0) throw precondition_error("covering_radius: empty configuration");
    if (ps.size() == 1) {
        auto [a, b] = patch_hull(ps.patch);
        return (b - a) / 2.0;
    }
    double worst = 0;
    for (std::size_t i = 1; i < ps.size(); ++i)
        worst = std::max(worst, ps.xs[i] - ps.xs[i - 1]);
    return worst / 2.0;
}

namespace {

struct Diff {
    double x = 0;
    LatticePoint c;
};

// sort + adjacent-unique under the exact identity (coords when available)
void canonize(std::vector<Diff>& v, bool keyed) {
    if (keyed) {
        std::sort(v.begin(), v.end(), [](const Diff& a, const Diff& b) { return a.c < b.c; });
        v.erase(std::unique(v.begin(), v.end(),
                            [](const Diff& a, const Diff& b) { return a.c == b.c; }),
                v.end());
        std::sort(v.begin(), v.end(), [](const Diff& a, const Diff& b) { return a.x < b.x; });
    } else {
        std::sort(v.begin(), v.end(), [](const Diff& a, const Diff& b) { return a.x < b.x; });
        v.erase(std::unique(v.begin(), v.end(),
                            [](const Diff& a, const Diff& b) { return a.x == b.x; }),
                v.end());
    }
}

}  // namespace

MeyerVerdict meyer_test(const PointSet& ps, std::size_t f_search_bound, kern::Exec exec) {
    if (ps.size() < 2) throw precondition_error("meyer_test: need at least two points");
    if (!std::is_sorted(ps.xs.begin(), ps.xs.end()))
        throw std::invalid_argument("meyer_test: positions must be sorted");

    MeyerVerdict verdict;
    verdict.discreteness_radius = discreteness_radius(ps);
    verdict.uniformly_discrete = verdict.discreteness_radius > 0;
    verdict.covering_radius = covering_radius(ps);

    auto [A, B] = patch_hull(ps.patch);
    double width = B - A;
    if (width < 4.0 * verdict.covering_radius) {
        std::ostringstream msg;
        msg << "meyer_test: patch width " << width << " must be at least four covering radii ("
            << 4.0 * verdict.covering_radius << ")";
        throw precondition_error(msg.str());
    }
    verdict.relatively_dense = true;  // enforced by the width gate above
    const double R = width / 3.0;
    const bool keyed = ps.has_coords();
    const auto n = static_cast<long long>(ps.size());

    // every pairwise difference, exact-deduplicated; the central universe
    // |d| <= R is what the translate cover must explain
    std::vector<Diff> pairs;
    {
        auto emit_rows = [&](long long lo, long long hi, std::vector<Diff>& sink) {
            for (long long i = lo; i < hi; ++i)
                for (long long j = 0; j < n; ++j)
                    sink.push_back({ps.xs[i] - ps.xs[j],
                                    keyed ? ps.coords[i] - ps.coords[j] : LatticePoint{}});
        };
        if (exec == kern::Exec::Serial) {
            emit_rows(0, n, pairs);
        } else {
            int nt = kern::thread_count();
            long long chunk = std::max<long long>(1, (n + nt - 1) / nt);
            std::vector<std::vector<Diff>> parts((n + chunk - 1) / chunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(nt)
#endif
            for (long long c = 0; c < static_cast<long long>(parts.size()); ++c)
                emit_rows(c * chunk, std::min(n, (c + 1) * chunk), parts[c]);
            for (auto& part : parts) pairs.insert(pairs.end(), part.begin(), part.end());
        }
        canonize(pairs, keyed);
    }

    std::vector<std::size_t> universe;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (std::abs(pairs[i].x) <= R) universe.push_back(i);

    // second subtraction: triples restricted to the central third, plus the
    // cover candidates f = d - z for central d
    std::vector<Diff> triples;
    struct Candidate {
        Diff f;
        std::vector<std::size_t> covers;  // indices into `universe`
    };
    std::map<std::pair<long long, long long>, std::size_t> cand_by_coord;
    std::map<double, std::size_t> cand_by_value;
    std::vector<Candidate> candidates;
    {
        const auto m = static_cast<long long>(pairs.size());
        auto emit_diffs = [&](long long lo, long long hi, std::vector<Diff>& sink) {
            for (long long di = lo; di < hi; ++di) {
                const Diff& d = pairs[di];
                auto zlo = std::lower_bound(ps.xs.begin(), ps.xs.end(), d.x - R);
                for (auto it = zlo; it != ps.xs.end() && *it <= d.x + R; ++it) {
                    auto zi = static_cast<std::size_t>(it - ps.xs.begin());
                    sink.push_back({d.x - *it, keyed ? d.c - ps.coords[zi] : LatticePoint{}});
                }
            }
        };
        if (exec == kern::Exec::Serial) {
            emit_diffs(0, m, triples);
        } else {
            int nt = kern::thread_count();
            long long chunk = std::max<long long>(1, (m + nt - 1) / nt);
            std::vector<std::vector<Diff>> parts((m + chunk - 1) / chunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(nt)
#endif
            for (long long c = 0; c < static_cast<long long>(parts.size()); ++c)
                emit_diffs(c * chunk, std::min(m, (c + 1) * chunk), parts[c]);
            for (auto& part : parts) triples.insert(triples.end(), part.begin(), part.end());
        }
        canonize(triples, keyed);

        for (std::size_t ui = 0; ui < universe.size(); ++ui) {
            const Diff& d = pairs[universe[ui]];
            auto zlo = std::lower_bound(ps.xs.begin(), ps.xs.end(), d.x - R);
            for (auto it = zlo; it != ps.xs.end() && *it <= d.x + R; ++it) {
                auto zi = static_cast<std::size_t>(it - ps.xs.begin());
                Diff f{d.x - *it, keyed ? d.c - ps.coords[zi] : LatticePoint{}};
                std::size_t slot;
                if (keyed) {
                    auto [pos, fresh] = cand_by_coord.try_emplace(
                        std::make_pair(f.c.m, f.c.n), candidates.size());
                    if (fresh) candidates.push_back({f, {}});
                    slot = pos->second;
                } else {
                    auto [pos, fresh] = cand_by_value.try_emplace(f.x, candidates.size());
                    if (fresh) candidates.push_back({f, {}});
                    slot = pos->second;
                }
                candidates[slot].covers.push_back(ui);
            }
        }
    }

    verdict.triple_count = triples.size();
    verdict.triple_difference_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < triples.size(); ++i)
        verdict.triple_difference_gap =
            std::min(verdict.triple_difference_gap, triples[i].x - triples[i - 1].x);

    // greedy translate cover of the central pair differences
    std::vector<char> covered(universe.size(), 0);
    std::size_t uncovered = universe.size();
    while (uncovered > 0 && verdict.f_set.size() < f_search_bound) {
        std::size_t best = candidates.size();
        std::size_t best_count = 0;
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            std::size_t count = 0;
            for (std::size_t ui : candidates[ci].covers)
                if (!covered[ui]) ++count;
            if (count > best_count ||
                (count == best_count && count > 0 &&
                 (std::abs(candidates[ci].f.x) < std::abs(candidates[best].f.x) ||
                  (std::abs(candidates[ci].f.x) == std::abs(candidates[best].f.x) &&
                   candidates[ci].f.x < candidates[best].f.x)))) {
                best = ci;
                best_count = count;
            }
        }
        if (best_count == 0) break;
        verdict.f_set.push_back(candidates[best].f.x);
        for (std::size_t ui : candidates[best].covers) {
            if (!covered[ui]) --uncovered;
            covered[ui] = 1;
        }
    }
    std::sort(verdict.f_set.begin(), verdict.f_set.end());
    verdict.f_found = uncovered == 0;

    // collapse test: the triple spacing must stay comparable to the
    // configuration's own spacing, else the evidence is inconclusive
    double floor_gap = 2.0 * verdict.discreteness_radius / 64.0;
    bool gap_ok = verdict.triple_difference_gap >= floor_gap;
    verdict.meyer = verdict.f_found && gap_ok;
    verdict.inconclusive = !verdict.meyer;
    std::ostringstream note;
    if (verdict.meyer) {
        note << "cover of size " << verdict.f_set.size() << ", triple spacing "
             << verdict.triple_difference_gap;
    } else if (!gap_ok) {
        note << "triple-difference spacing collapsed to " << verdict.triple_difference_gap
             << " against configuration spacing " << 2.0 * verdict.discreteness_radius;
    } else {
        note << "no translate cover of size <= " << f_search_bound
             << " found; absence at this scale proves nothing";
    }
    verdict.note = note.str();
    return verdict;
}

PointSet ThetaSet::points() const {
    PointSet ps;
    ps.xs = xs;
    ps.patch = SetDescriptor::interval(Rational(0), rational_from_double(bound) + 1);
    return ps;
}

ThetaSet lambda_theta(double theta, double bound) {
    if (!(theta > 3.0))
        throw std::invalid_argument("lambda_theta: theta must exceed 3");
    if (!(bound > 0)) throw std::invalid_argument("lambda_theta: bound must be positive");

    std::vector<double> powers;
    for (double p = 1.0; p <= bound; p *= theta) powers.push_back(p);

    ThetaSet out;
    out.theta = theta;
    out.bound = bound;
    std::vector<int> digits(powers.size(), 0);
    // descend from the top power; partial sums are monotone, so one
    // comparison prunes the whole subtree
    auto rec = [&](auto&& self, long long j, double partial) -> void {
        if (j < 0) {
            std::size_t deg = digits.size();
            while (deg > 0 && digits[deg - 1] == 0) --deg;
            out.xs.push_back(partial);
            out.digits.emplace_back(digits.begin(), digits.begin() + deg);
            return;
        }
        digits[j] = 0;
        self(self, j - 1, partial);
        if (partial + powers[j] <= bound) {
            digits[j] = 1;
            self(self, j - 1, partial + powers[j]);
            digits[j] = 0;
        }
    };
    rec(rec, static_cast<long long>(powers.size()) - 1, 0.0);

    std::vector<std::size_t> order(out.xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return out.xs[a] < out.xs[b]; });
    ThetaSet sorted;
    sorted.theta = theta;
    sorted.bound = bound;
    for (std::size_t i : order) {
        if (!sorted.xs.empty() && sorted.xs.back() == out.xs[i]) continue;
        sorted.xs.push_back(out.xs[i]);
        sorted.digits.push_back(std::move(out.digits[i]));
    }
    return sorted;
}

PointSet m_theta(double theta, double bound) {
    auto ts = lambda_theta(theta, bound);
    std::vector<long long> members;
    for (double x : ts.xs) {
        auto f = static_cast<long long>(std::floor(x));
        members.push_back(f);
        members.push_back(f + 1);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());

    PointSet ps;
    ps.integral = true;
    ps.patch = SetDescriptor::integer_range(0, static_cast<long long>(std::floor(bound)) + 2);
    for (long long v : members) {
        ps.xs.push_back(static_cast<double>(v));
        ps.coords.push_back({v, 0});
    }
    return ps;
}

DensityCheck density_bound_check(double theta, double t, long long n, const ThetaSet& ts) {
    if (!(theta > 3.0))
        throw std::invalid_argument("density_bound_check: theta must exceed 3");
    if (n < 1) throw std::invalid_argument("density_bound_check: n must be >= 1");
    if (ts.theta != theta)
        throw std::invalid_argument("density_bound_check: enumeration was built for another theta");
    if (t + static_cast<double>(n) > ts.bound) {
        std::ostringstream msg;
        msg << "density_bound_check: enumeration complete only up to " << ts.bound
            << ", window reaches " << t + static_cast<double>(n);
        throw precondition_error(msg.str());
    }

    DensityCheck check;
    auto lo = std::lower_bound(ts.xs.begin(), ts.xs.end(), t);
    auto hi = std::upper_bound(ts.xs.begin(), ts.xs.end(), t + static_cast<double>(n));
    check.count = hi - lo;
    check.count_ratio = static_cast<double>(check.count) / static_cast<double>(n);
    double exponent = std::log(3.0) / std::log(theta);
    check.bound_value =
        (9.0 * std::pow(static_cast<double>(n), exponent) + 1.0) / static_cast<double>(n);
    check.ok = check.count_ratio < check.bound_value;
    return check;
}

}  // namespace aperiodica::meyer

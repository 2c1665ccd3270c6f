#include "aperiodica/space.hpp"

#include <algorithm>
#include <utility>

namespace aperiodica::groups {

namespace {

long long ipow(long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int nesting_depth(const SpaceDescriptor& s) {
    if (!s.product_like()) return 0;
    return 1 + std::max(nesting_depth(*s.first), nesting_depth(*s.second));
}

long long pos_mod(long long n, long long m) {
    long long r = n % m;
    return r < 0 ? r + m : r;
}

}  // namespace

SpaceDescriptor SpaceDescriptor::real_line() {
    SpaceDescriptor s;
    s.kind = SpaceKind::RealLine;
    return s;
}

SpaceDescriptor SpaceDescriptor::real_plane() {
    SpaceDescriptor s;
    s.kind = SpaceKind::RealPlane;
    s.first = std::make_shared<SpaceDescriptor>(real_line());
    s.second = std::make_shared<SpaceDescriptor>(real_line());
    return s;
}

SpaceDescriptor SpaceDescriptor::integers() {
    SpaceDescriptor s;
    s.kind = SpaceKind::Integers;
    return s;
}

SpaceDescriptor SpaceDescriptor::padic(long long p, int depth) {
    if (!is_prime(p)) throw std::invalid_argument("padic space: p must be prime");
    if (depth < 1 || depth > 40) throw std::invalid_argument("padic space: depth must be in [1, 40]");
    if (depth > 62 / (p >= 2 ? 1 : 1) && ipow(p, depth) <= 0)
        throw std::invalid_argument("padic space: p^depth overflows");
    SpaceDescriptor s;
    s.kind = SpaceKind::PAdic;
    s.p = p;
    s.depth = depth;
    return s;
}

SpaceDescriptor SpaceDescriptor::cyclic(long long modulus) {
    if (modulus < 1) throw std::invalid_argument("cyclic space: modulus must be positive");
    SpaceDescriptor s;
    s.kind = SpaceKind::Cyclic;
    s.modulus = modulus;
    return s;
}

SpaceDescriptor SpaceDescriptor::product(const SpaceDescriptor& a, const SpaceDescriptor& b) {
    SpaceDescriptor s;
    s.kind = SpaceKind::Product;
    s.first = std::make_shared<SpaceDescriptor>(a);
    s.second = std::make_shared<SpaceDescriptor>(b);
    if (nesting_depth(s) > 2) throw std::invalid_argument("product space: nesting deeper than 2");
    return s;
}

bool SpaceDescriptor::compact() const {
    switch (kind) {
        case SpaceKind::PAdic:
        case SpaceKind::Cyclic: return true;
        case SpaceKind::RealLine:
        case SpaceKind::Integers: return false;
        default: return first->compact() && second->compact();
    }
}

long long SpaceDescriptor::padic_modulus() const {
    if (kind != SpaceKind::PAdic) throw std::invalid_argument("padic_modulus: not a p-adic space");
    return ipow(p, depth);
}

bool operator==(const SpaceDescriptor& a, const SpaceDescriptor& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case SpaceKind::PAdic: return a.p == b.p && a.depth == b.depth;
        case SpaceKind::Cyclic: return a.modulus == b.modulus;
        case SpaceKind::RealPlane:
        case SpaceKind::Product: return *a.first == *b.first && *a.second == *b.second;
        default: return true;
    }
}

// ---------------------------------------------------------------------------
// canonicalization

namespace {

void canon_real(std::vector<RealInterval>& v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](const RealInterval& i) { return i.lo >= i.hi; }),
            v.end());
    std::sort(v.begin(), v.end(),
              [](const RealInterval& a, const RealInterval& b) { return a.lo < b.lo; });
    std::vector<RealInterval> out;
    for (auto& iv : v) {
        if (!out.empty() && iv.lo <= out.back().hi) {
            if (iv.hi > out.back().hi) out.back().hi = iv.hi;
        } else {
            out.push_back(iv);
        }
    }
    v = std::move(out);
}

void canon_int(std::vector<IntRange>& v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](const IntRange& i) { return i.lo >= i.hi; }),
            v.end());
    std::sort(v.begin(), v.end(), [](const IntRange& a, const IntRange& b) { return a.lo < b.lo; });
    std::vector<IntRange> out;
    for (auto& r : v) {
        if (!out.empty() && r.lo <= out.back().hi) {
            if (r.hi > out.back().hi) out.back().hi = r.hi;
        } else {
            out.push_back(r);
        }
    }
    v = std::move(out);
}

bool class_contains(long long p, const PadicClass& outer, const PadicClass& inner) {
    if (outer.level > inner.level) return false;
    return pos_mod(inner.r, ipow(p, outer.level)) == outer.r;
}

void canon_padic(long long p, int depth, std::vector<PadicClass>& v) {
    for (auto& c : v) {
        if (c.level < 0 || c.level > depth)
            throw std::invalid_argument("residue class level outside truncation depth");
        c.r = pos_mod(c.r, ipow(p, c.level));
    }
    bool changed = true;
    while (changed) {
        changed = false;
        // drop classes contained in another
        std::sort(v.begin(), v.end(), [](const PadicClass& a, const PadicClass& b) {
            return a.level != b.level ? a.level < b.level : a.r < b.r;
        });
        std::vector<PadicClass> kept;
        for (const auto& c : v) {
            bool covered = false;
            for (const auto& k : kept)
                if (class_contains(p, k, c)) {
                    covered = true;
                    break;
                }
            if (!covered)
                kept.push_back(c);
            else
                changed = true;
        }
        v = std::move(kept);
        // merge complete sibling families into their parent
        for (std::size_t i = 0; i < v.size();) {
            const PadicClass c = v[i];
            if (c.level == 0) {
                ++i;
                continue;
            }
            long long parent_mod = ipow(p, c.level - 1);
            long long parent_r = pos_mod(c.r, parent_mod);
            int found = 0;
            for (const auto& d : v)
                if (d.level == c.level && pos_mod(d.r, parent_mod) == parent_r) ++found;
            if (found == p) {
                std::vector<PadicClass> next;
                for (const auto& d : v)
                    if (!(d.level == c.level && pos_mod(d.r, parent_mod) == parent_r))
                        next.push_back(d);
                next.push_back({parent_r, c.level - 1});
                v = std::move(next);
                changed = true;
                i = 0;
            } else {
                ++i;
            }
        }
    }
    std::sort(v.begin(), v.end(), [](const PadicClass& a, const PadicClass& b) {
        return a.level != b.level ? a.level < b.level : a.r < b.r;
    });
}

void canon_cyclic(long long m, std::vector<long long>& v) {
    for (auto& x : v) x = pos_mod(x, m);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void canon_boxes(std::vector<std::pair<SetDescriptor, SetDescriptor>>& v) {
    std::vector<std::pair<SetDescriptor, SetDescriptor>> out;
    for (auto& b : v)
        if (!is_empty(b.first) && !is_empty(b.second)) out.push_back(std::move(b));
    v = std::move(out);
}

void require_same_space(const SetDescriptor& a, const SetDescriptor& b, const char* op) {
    if (!(a.space == b.space))
        throw std::invalid_argument(std::string(op) + ": operands live in different spaces");
}

}  // namespace

// ---------------------------------------------------------------------------
// constructors

SetDescriptor SetDescriptor::empty(const SpaceDescriptor& s) {
    SetDescriptor sd;
    sd.space = s;
    return sd;
}

SetDescriptor SetDescriptor::whole_space(const SpaceDescriptor& s) {
    SetDescriptor sd;
    sd.space = s;
    switch (s.kind) {
        case SpaceKind::PAdic: sd.classes = {{0, 0}}; break;
        case SpaceKind::Cyclic:
            for (long long i = 0; i < s.modulus; ++i) sd.members.push_back(i);
            break;
        case SpaceKind::RealPlane:
        case SpaceKind::Product:
            sd.boxes.emplace_back(whole_space(*s.first), whole_space(*s.second));
            break;
        default: sd.whole = true;
    }
    return sd;
}

SetDescriptor SetDescriptor::real_union(std::vector<RealInterval> atoms) {
    SetDescriptor sd;
    sd.space = SpaceDescriptor::real_line();
    sd.ivs = std::move(atoms);
    canon_real(sd.ivs);
    return sd;
}

SetDescriptor SetDescriptor::interval(const Rational& lo, const Rational& hi) {
    return real_union({{lo, hi}});
}

SetDescriptor SetDescriptor::integer_union(std::vector<IntRange> atoms) {
    SetDescriptor sd;
    sd.space = SpaceDescriptor::integers();
    sd.rngs = std::move(atoms);
    canon_int(sd.rngs);
    return sd;
}

SetDescriptor SetDescriptor::integer_range(long long lo, long long hi_exclusive) {
    return integer_union({{lo, hi_exclusive}});
}

SetDescriptor SetDescriptor::padic_union(const SpaceDescriptor& s, std::vector<PadicClass> atoms) {
    if (s.kind != SpaceKind::PAdic) throw std::invalid_argument("padic_union: p-adic space required");
    SetDescriptor sd;
    sd.space = s;
    sd.classes = std::move(atoms);
    canon_padic(s.p, s.depth, sd.classes);
    return sd;
}

SetDescriptor SetDescriptor::residue_class(const SpaceDescriptor& s, long long r, int level) {
    return padic_union(s, {{r, level}});
}

SetDescriptor SetDescriptor::cyclic_subset(const SpaceDescriptor& s, std::vector<long long> members) {
    if (s.kind != SpaceKind::Cyclic)
        throw std::invalid_argument("cyclic_subset: cyclic space required");
    SetDescriptor sd;
    sd.space = s;
    sd.members = std::move(members);
    canon_cyclic(s.modulus, sd.members);
    return sd;
}

SetDescriptor SetDescriptor::box(const SpaceDescriptor& s, SetDescriptor a, SetDescriptor b) {
    if (!s.product_like()) throw std::invalid_argument("box: product space required");
    if (!(a.space == *s.first) || !(b.space == *s.second))
        throw std::invalid_argument("box: factor spaces do not match");
    SetDescriptor sd;
    sd.space = s;
    sd.boxes.emplace_back(std::move(a), std::move(b));
    canon_boxes(sd.boxes);
    return sd;
}

// ---------------------------------------------------------------------------
// predicates

bool is_empty(const SetDescriptor& sd) {
    if (sd.whole) return false;
    switch (sd.space.kind) {
        case SpaceKind::RealLine: return sd.ivs.empty();
        case SpaceKind::Integers: return sd.rngs.empty();
        case SpaceKind::PAdic: return sd.classes.empty();
        case SpaceKind::Cyclic: return sd.members.empty();
        default:
            for (const auto& b : sd.boxes)
                if (!is_empty(b.first) && !is_empty(b.second)) return false;
            return true;
    }
}

bool is_bounded(const SetDescriptor& sd) {
    if (sd.whole) return sd.space.compact();
    if (sd.space.product_like()) {
        for (const auto& b : sd.boxes)
            if (!is_bounded(b.first) || !is_bounded(b.second)) return false;
    }
    return true;
}

bool equal_sets(const SetDescriptor& a, const SetDescriptor& b) {
    require_same_space(a, b, "equal_sets");
    if (a.whole || b.whole) return a.whole == b.whole;
    return is_empty(set_subtract(a, b)) && is_empty(set_subtract(b, a));
}

// ---------------------------------------------------------------------------
// set operations

namespace {

std::vector<PadicClass> padic_subtract_class(long long p, const PadicClass& c1,
                                             const PadicClass& c2) {
    int lmin = std::min(c1.level, c2.level);
    long long mod = ipow(p, lmin);
    if (pos_mod(c1.r, mod) != pos_mod(c2.r, mod)) return {c1};  // disjoint
    if (c2.level <= c1.level) return {};                        // c1 inside c2
    // c2 strictly inside c1: peel one level and recurse
    std::vector<PadicClass> out;
    long long step = ipow(p, c1.level);
    for (long long j = 0; j < p; ++j) {
        PadicClass child{pos_mod(c1.r + j * step, step * p), c1.level + 1};
        auto rest = padic_subtract_class(p, child, c2);
        out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
}

std::vector<std::pair<SetDescriptor, SetDescriptor>> box_subtract_one(
    const std::pair<SetDescriptor, SetDescriptor>& box,
    const std::pair<SetDescriptor, SetDescriptor>& cut) {
    SetDescriptor a_in = set_intersect(box.first, cut.first);
    if (is_empty(a_in) || is_empty(set_intersect(box.second, cut.second)))
        return {box};
    std::vector<std::pair<SetDescriptor, SetDescriptor>> out;
    SetDescriptor a_out = set_subtract(box.first, cut.first);
    if (!is_empty(a_out)) out.emplace_back(a_out, box.second);
    SetDescriptor b_out = set_subtract(box.second, cut.second);
    if (!is_empty(b_out)) out.emplace_back(a_in, b_out);
    return out;
}

}  // namespace

SetDescriptor set_union(const SetDescriptor& a, const SetDescriptor& b) {
    require_same_space(a, b, "set_union");
    if (a.whole || b.whole) return SetDescriptor::whole_space(a.space);
    SetDescriptor out = SetDescriptor::empty(a.space);
    switch (a.space.kind) {
        case SpaceKind::RealLine:
            out.ivs = a.ivs;
            out.ivs.insert(out.ivs.end(), b.ivs.begin(), b.ivs.end());
            canon_real(out.ivs);
            break;
        case SpaceKind::Integers:
            out.rngs = a.rngs;
            out.rngs.insert(out.rngs.end(), b.rngs.begin(), b.rngs.end());
            canon_int(out.rngs);
            break;
        case SpaceKind::PAdic:
            out.classes = a.classes;
            out.classes.insert(out.classes.end(), b.classes.begin(), b.classes.end());
            canon_padic(a.space.p, a.space.depth, out.classes);
            break;
        case SpaceKind::Cyclic:
            out.members = a.members;
            out.members.insert(out.members.end(), b.members.begin(), b.members.end());
            canon_cyclic(a.space.modulus, out.members);
            break;
        default: {
            out.boxes = a.boxes;
            for (const auto& nb : b.boxes) {
                std::vector<std::pair<SetDescriptor, SetDescriptor>> pieces{nb};
                for (const auto& existing : out.boxes) {
                    std::vector<std::pair<SetDescriptor, SetDescriptor>> next;
                    for (const auto& piece : pieces) {
                        auto remains = box_subtract_one(piece, existing);
                        next.insert(next.end(), remains.begin(), remains.end());
                    }
                    pieces = std::move(next);
                }
                out.boxes.insert(out.boxes.end(), pieces.begin(), pieces.end());
            }
            canon_boxes(out.boxes);
        }
    }
    return out;
}

SetDescriptor set_intersect(const SetDescriptor& a, const SetDescriptor& b) {
    require_same_space(a, b, "set_intersect");
    if (a.whole) return b;
    if (b.whole) return a;
    SetDescriptor out = SetDescriptor::empty(a.space);
    switch (a.space.kind) {
        case SpaceKind::RealLine: {
            std::size_t i = 0, j = 0;
            while (i < a.ivs.size() && j < b.ivs.size()) {
                Rational lo = std::max(a.ivs[i].lo, b.ivs[j].lo);
                Rational hi = std::min(a.ivs[i].hi, b.ivs[j].hi);
                if (lo < hi) out.ivs.push_back({lo, hi});
                (a.ivs[i].hi < b.ivs[j].hi) ? ++i : ++j;
            }
            break;
        }
        case SpaceKind::Integers: {
            std::size_t i = 0, j = 0;
            while (i < a.rngs.size() && j < b.rngs.size()) {
                long long lo = std::max(a.rngs[i].lo, b.rngs[j].lo);
                long long hi = std::min(a.rngs[i].hi, b.rngs[j].hi);
                if (lo < hi) out.rngs.push_back({lo, hi});
                (a.rngs[i].hi < b.rngs[j].hi) ? ++i : ++j;
            }
            break;
        }
        case SpaceKind::PAdic: {
            long long p = a.space.p;
            for (const auto& c1 : a.classes)
                for (const auto& c2 : b.classes) {
                    const PadicClass& fine = c1.level >= c2.level ? c1 : c2;
                    const PadicClass& coarse = c1.level >= c2.level ? c2 : c1;
                    if (pos_mod(fine.r, ipow(p, coarse.level)) == coarse.r)
                        out.classes.push_back(fine);
                }
            canon_padic(p, a.space.depth, out.classes);
            break;
        }
        case SpaceKind::Cyclic:
            std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(),
                                  b.members.end(), std::back_inserter(out.members));
            break;
        default:
            for (const auto& x : a.boxes)
                for (const auto& y : b.boxes)
                    out.boxes.emplace_back(set_intersect(x.first, y.first),
                                           set_intersect(x.second, y.second));
            canon_boxes(out.boxes);
    }
    return out;
}

SetDescriptor set_subtract(const SetDescriptor& a, const SetDescriptor& b) {
    require_same_space(a, b, "set_subtract");
    if (a.whole)
        throw precondition_error("set_subtract: unbounded minuend is not representable");
    if (b.whole) return SetDescriptor::empty(a.space);
    SetDescriptor out = SetDescriptor::empty(a.space);
    switch (a.space.kind) {
        case SpaceKind::RealLine: {
            for (const auto& iv : a.ivs) {
                Rational lo = iv.lo;
                for (const auto& cut : b.ivs) {
                    if (cut.hi <= lo) continue;
                    if (cut.lo >= iv.hi) break;
                    if (cut.lo > lo) out.ivs.push_back({lo, std::min(cut.lo, iv.hi)});
                    lo = std::max(lo, cut.hi);
                    if (lo >= iv.hi) break;
                }
                if (lo < iv.hi) out.ivs.push_back({lo, iv.hi});
            }
            canon_real(out.ivs);
            break;
        }
        case SpaceKind::Integers: {
            for (const auto& rg : a.rngs) {
                long long lo = rg.lo;
                for (const auto& cut : b.rngs) {
                    if (cut.hi <= lo) continue;
                    if (cut.lo >= rg.hi) break;
                    if (cut.lo > lo) out.rngs.push_back({lo, std::min(cut.lo, rg.hi)});
                    lo = std::max(lo, cut.hi);
                    if (lo >= rg.hi) break;
                }
                if (lo < rg.hi) out.rngs.push_back({lo, rg.hi});
            }
            canon_int(out.rngs);
            break;
        }
        case SpaceKind::PAdic: {
            std::vector<PadicClass> pieces = a.classes;
            for (const auto& cut : b.classes) {
                std::vector<PadicClass> next;
                for (const auto& piece : pieces) {
                    auto rest = padic_subtract_class(a.space.p, piece, cut);
                    next.insert(next.end(), rest.begin(), rest.end());
                }
                pieces = std::move(next);
            }
            out.classes = std::move(pieces);
            canon_padic(a.space.p, a.space.depth, out.classes);
            break;
        }
        case SpaceKind::Cyclic:
            std::set_difference(a.members.begin(), a.members.end(), b.members.begin(),
                                b.members.end(), std::back_inserter(out.members));
            break;
        default: {
            auto pieces = a.boxes;
            for (const auto& cut : b.boxes) {
                std::vector<std::pair<SetDescriptor, SetDescriptor>> next;
                for (const auto& piece : pieces) {
                    auto rest = box_subtract_one(piece, cut);
                    next.insert(next.end(), rest.begin(), rest.end());
                }
                pieces = std::move(next);
            }
            out.boxes = std::move(pieces);
            canon_boxes(out.boxes);
        }
    }
    return out;
}

SetDescriptor minkowski_sum(const SetDescriptor& a, const SetDescriptor& b) {
    require_same_space(a, b, "minkowski_sum");
    if (is_empty(a) || is_empty(b)) return SetDescriptor::empty(a.space);
    if (a.whole || b.whole) return SetDescriptor::whole_space(a.space);
    SetDescriptor out = SetDescriptor::empty(a.space);
    switch (a.space.kind) {
        case SpaceKind::RealLine:
            for (const auto& x : a.ivs)
                for (const auto& y : b.ivs) out.ivs.push_back({x.lo + y.lo, x.hi + y.hi});
            canon_real(out.ivs);
            break;
        case SpaceKind::Integers:
            for (const auto& x : a.rngs)
                for (const auto& y : b.rngs) out.rngs.push_back({x.lo + y.lo, x.hi + y.hi - 1});
            canon_int(out.rngs);
            break;
        case SpaceKind::PAdic: {
            for (const auto& x : a.classes)
                for (const auto& y : b.classes) {
                    int lv = std::min(x.level, y.level);
                    out.classes.push_back({pos_mod(x.r + y.r, ipow(a.space.p, lv)), lv});
                }
            canon_padic(a.space.p, a.space.depth, out.classes);
            break;
        }
        case SpaceKind::Cyclic:
            for (long long x : a.members)
                for (long long y : b.members) out.members.push_back(x + y);
            canon_cyclic(a.space.modulus, out.members);
            break;
        default: {
            SetDescriptor acc = SetDescriptor::empty(a.space);
            for (const auto& x : a.boxes)
                for (const auto& y : b.boxes) {
                    SetDescriptor piece = SetDescriptor::empty(a.space);
                    piece.boxes.emplace_back(minkowski_sum(x.first, y.first),
                                             minkowski_sum(x.second, y.second));
                    canon_boxes(piece.boxes);
                    acc = set_union(acc, piece);
                }
            out = std::move(acc);
        }
    }
    return out;
}

SetDescriptor negate(const SetDescriptor& a) {
    if (a.whole) return a;
    SetDescriptor out = SetDescriptor::empty(a.space);
    switch (a.space.kind) {
        case SpaceKind::RealLine:
            for (const auto& iv : a.ivs) out.ivs.push_back({-iv.hi, -iv.lo});
            canon_real(out.ivs);
            break;
        case SpaceKind::Integers:
            for (const auto& rg : a.rngs) out.rngs.push_back({1 - rg.hi, 1 - rg.lo});
            canon_int(out.rngs);
            break;
        case SpaceKind::PAdic:
            for (const auto& c : a.classes)
                out.classes.push_back({pos_mod(-c.r, ipow(a.space.p, c.level)), c.level});
            canon_padic(a.space.p, a.space.depth, out.classes);
            break;
        case SpaceKind::Cyclic:
            for (long long x : a.members) out.members.push_back(-x);
            canon_cyclic(a.space.modulus, out.members);
            break;
        default:
            for (const auto& b : a.boxes)
                out.boxes.emplace_back(negate(b.first), negate(b.second));
            canon_boxes(out.boxes);
    }
    return out;
}

// ---------------------------------------------------------------------------
// membership / translation

bool contains(const SetDescriptor& sd, const Rational& x) {
    if (sd.space.kind != SpaceKind::RealLine)
        throw std::invalid_argument("contains(Rational): real-line descriptor required");
    if (sd.whole) return true;
    for (const auto& iv : sd.ivs)
        if (iv.lo <= x && x < iv.hi) return true;
    return false;
}

bool contains(const SetDescriptor& sd, const QuadExt& x) {
    if (sd.space.kind != SpaceKind::RealLine)
        throw std::invalid_argument("contains(QuadExt): real-line descriptor required");
    if (sd.whole) return true;
    for (const auto& iv : sd.ivs)
        if (QuadExt(iv.lo) <= x && x < QuadExt(iv.hi)) return true;
    return false;
}

bool contains_int(const SetDescriptor& sd, long long n) {
    if (sd.whole) return true;
    switch (sd.space.kind) {
        case SpaceKind::Integers:
            for (const auto& rg : sd.rngs)
                if (rg.lo <= n && n < rg.hi) return true;
            return false;
        case SpaceKind::PAdic:
            for (const auto& c : sd.classes)
                if (pos_mod(n, ipow(sd.space.p, c.level)) == c.r) return true;
            return false;
        case SpaceKind::Cyclic: {
            long long v = pos_mod(n, sd.space.modulus);
            return std::binary_search(sd.members.begin(), sd.members.end(), v);
        }
        default: throw std::invalid_argument("contains_int: scalar discrete descriptor required");
    }
}

SetDescriptor translate(const SetDescriptor& sd, const Rational& t) {
    if (sd.space.kind != SpaceKind::RealLine)
        throw std::invalid_argument("translate(Rational): real-line descriptor required");
    if (sd.whole) return sd;
    SetDescriptor out = sd;
    for (auto& iv : out.ivs) {
        iv.lo += t;
        iv.hi += t;
    }
    return out;
}

SetDescriptor translate_int(const SetDescriptor& sd, long long t) {
    if (sd.whole) return sd;
    SetDescriptor out = sd;
    switch (sd.space.kind) {
        case SpaceKind::Integers:
            for (auto& rg : out.rngs) {
                rg.lo += t;
                rg.hi += t;
            }
            break;
        case SpaceKind::PAdic:
            for (auto& c : out.classes) c.r = pos_mod(c.r + t, ipow(sd.space.p, c.level));
            canon_padic(sd.space.p, sd.space.depth, out.classes);
            break;
        case SpaceKind::Cyclic:
            for (auto& x : out.members) x = pos_mod(x + t, sd.space.modulus);
            std::sort(out.members.begin(), out.members.end());
            break;
        default: throw std::invalid_argument("translate_int: scalar discrete descriptor required");
    }
    return out;
}

// ---------------------------------------------------------------------------
// measure

Rational haar_measure(const SetDescriptor& sd) {
    if (sd.whole)
        throw measure_infinite_error("haar_measure: descriptor is unbounded in a non-compact group");
    Rational m = 0;
    switch (sd.space.kind) {
        case SpaceKind::RealLine:
            for (const auto& iv : sd.ivs) m += iv.hi - iv.lo;
            break;
        case SpaceKind::Integers:
            for (const auto& rg : sd.rngs) m += rg.hi - rg.lo;
            break;
        case SpaceKind::PAdic:
            for (const auto& c : sd.classes) m += Rational(1, ipow(sd.space.p, c.level));
            break;
        case SpaceKind::Cyclic: m = static_cast<long long>(sd.members.size()); break;
        default:
            for (const auto& b : sd.boxes) m += haar_measure(b.first) * haar_measure(b.second);
    }
    return m;
}

// ---------------------------------------------------------------------------
// K-boundary

namespace {

// bounded superset of everything the boundary formula touches
SetDescriptor universe_for(const SetDescriptor& a, const SetDescriptor& k) {
    const SpaceDescriptor& s = a.space;
    if (s.compact()) return SetDescriptor::whole_space(s);
    switch (s.kind) {
        case SpaceKind::RealLine: {
            SetDescriptor parts = set_union(set_union(a, minkowski_sum(a, k)),
                                            minkowski_sum(a, negate(k)));
            return SetDescriptor::interval(parts.ivs.front().lo - 1, parts.ivs.back().hi + 1);
        }
        case SpaceKind::Integers: {
            SetDescriptor parts = set_union(set_union(a, minkowski_sum(a, k)),
                                            minkowski_sum(a, negate(k)));
            return SetDescriptor::integer_range(parts.rngs.front().lo - 1, parts.rngs.back().hi + 1);
        }
        default: {
            // componentwise universes over the factor hulls
            SetDescriptor fa = SetDescriptor::empty(*s.first), fb = SetDescriptor::empty(*s.second);
            for (const auto& b : a.boxes) {
                fa = set_union(fa, b.first);
                fb = set_union(fb, b.second);
            }
            SetDescriptor ka = SetDescriptor::empty(*s.first), kb = SetDescriptor::empty(*s.second);
            for (const auto& b : k.boxes) {
                ka = set_union(ka, b.first);
                kb = set_union(kb, b.second);
            }
            return SetDescriptor::box(s, universe_for(fa, ka), universe_for(fb, kb));
        }
    }
}

}  // namespace

SetDescriptor k_boundary(const SetDescriptor& a, const SetDescriptor& k) {
    require_same_space(a, k, "k_boundary");
    if (!is_bounded(a) || !is_bounded(k))
        throw precondition_error("k_boundary: bounded descriptors required");
    if (is_empty(k)) throw precondition_error("k_boundary: K must be non-empty");
    if (is_empty(a)) return SetDescriptor::empty(a.space);
    SetDescriptor u = universe_for(a, k);
    SetDescriptor complement = set_subtract(u, a);
    SetDescriptor outer = set_intersect(minkowski_sum(a, k), complement);
    SetDescriptor inner = set_intersect(minkowski_sum(complement, negate(k)), a);
    return set_union(outer, inner);
}

// ---------------------------------------------------------------------------
// van Hove averaging sequence

SetDescriptor VanHoveSpec::ball(long long n) const {
    if (n < 1) throw std::invalid_argument("VanHoveSpec::ball: n must be >= 1");
    switch (space.kind) {
        case SpaceKind::RealLine: return SetDescriptor::interval(Rational(-n), Rational(n));
        case SpaceKind::Integers: return SetDescriptor::integer_range(-n, n + 1);
        case SpaceKind::PAdic:
        case SpaceKind::Cyclic: return SetDescriptor::whole_space(space);
        default:
            return SetDescriptor::box(space, VanHoveSpec(*space.first).ball(n),
                                      VanHoveSpec(*space.second).ball(n));
    }
}

Rational VanHoveSpec::volume(long long n) const { return haar_measure(ball(n)); }

Rational van_hove_ratio(const VanHoveSpec& v, const SetDescriptor& k, long long n) {
    SetDescriptor a = v.ball(n);
    return haar_measure(k_boundary(a, k)) / v.volume(n);
}

}  // namespace aperiodica::groups

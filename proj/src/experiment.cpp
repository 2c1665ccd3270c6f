#include "aperiodica/experiment.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace aperiodica::cli {

using groups::SetDescriptor;
using groups::SpaceDescriptor;
using groups::SpaceKind;
using nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_rec(const ordered_json& j, std::string& s, int depth) {
    using value_t = nlohmann::detail::value_t;
    switch (j.type()) {
        case value_t::object: {
            if (j.empty()) {
                s += "{}";
                return;
            }
            s += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) s += ",\n";
                first = false;
                s.append(2 * (depth + 1), ' ');
                s += ordered_json(it.key()).dump();
                s += ": ";
                dump_rec(it.value(), s, depth + 1);
            }
            s += "\n";
            s.append(2 * depth, ' ');
            s += "}";
            return;
        }
        case value_t::array: {
            if (j.empty()) {
                s += "[]";
                return;
            }
            s += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) s += ",\n";
                first = false;
                s.append(2 * (depth + 1), ' ');
                dump_rec(v, s, depth + 1);
            }
            s += "\n";
            s.append(2 * depth, ' ');
            s += "]";
            return;
        }
        case value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                s += "null";  // JSON has no inf/nan; null keeps the document parseable
                return;
            }
            s += fmt17(v);
            return;
        }
        default:
            s += j.dump();  // ints, bools, strings (escaped), null
            return;
    }
}

config_error cfg(const std::string& msg) { return config_error("config: " + msg); }

const ordered_json& require(const ordered_json& p, const char* key) {
    auto it = p.find(key);
    if (it == p.end()) throw cfg(std::string("missing \"") + key + "\"");
    return *it;
}

Rational parse_rational_node(const ordered_json& v, const char* what) {
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw cfg(std::string(what) + ": " + e.what());
        }
    }
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return rational_from_double(v.get<double>());
    throw cfg(std::string(what) + ": expected a number or \"num/den\" string");
}

double get_num(const ordered_json& p, const char* key, std::optional<double> dflt = {}) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (dflt) return *dflt;
        throw cfg(std::string("missing \"") + key + "\"");
    }
    if (!it->is_number()) throw cfg(std::string("\"") + key + "\" must be a number");
    return it->get<double>();
}

long long get_int(const ordered_json& p, const char* key, std::optional<long long> dflt = {}) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (dflt) return *dflt;
        throw cfg(std::string("missing \"") + key + "\"");
    }
    if (!it->is_number_integer()) throw cfg(std::string("\"") + key + "\" must be an integer");
    return it->get<long long>();
}

cps::Scheme named_scheme(const std::string& name) {
    if (name == "golden") return cps::Scheme::golden();
    if (name == "silver") return cps::Scheme::quadratic(cps::QuadraticIrrational::silver());
    if (name == "trivial") return cps::Scheme::trivial();
    throw cfg("unknown scheme \"" + name + "\"");
}

cps::Scheme parse_scheme(const ordered_json& p) {
    const auto& j = require(p, "scheme");
    if (j.is_string()) return named_scheme(j.get<std::string>());
    if (!j.is_object()) throw cfg("\"scheme\" must be a name or an object");
    std::string kind = j.value("kind", std::string());
    if (kind == "golden" || kind == "silver" || kind == "trivial") return named_scheme(kind);
    if (kind == "quadratic") {
        cps::QuadraticIrrational a;
        a.u = j.value("u", 1LL);
        a.v = j.value("v", 1LL);
        a.w = j.value("w", 2LL);
        a.d = j.value("d", 5LL);
        return cps::Scheme::quadratic(a);
    }
    if (kind == "padic") return cps::Scheme::padic(get_int(j, "p"), (int)get_int(j, "depth", 3));
    throw cfg("scheme: unknown kind \"" + kind + "\"");
}

groups::RealInterval parse_interval_pair(const ordered_json& v, const char* what) {
    if (!v.is_array() || v.size() != 2) throw cfg(std::string(what) + ": expected [lo, hi]");
    return {parse_rational_node(v[0], what), parse_rational_node(v[1], what)};
}

cps::Window parse_window(const cps::Scheme& s, const ordered_json& p) {
    const auto& j = require(p, "window");
    auto h = s.internal_space();
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name == "empty") return SetDescriptor::empty(h);
        if (name == "whole") return SetDescriptor::whole_space(h);
        throw cfg("window: unknown name \"" + name + "\"");
    }
    if (!j.is_object()) throw cfg("\"window\" must be a name or an object");
    if (j.value("empty", false)) return SetDescriptor::empty(h);
    if (j.value("whole", false)) return SetDescriptor::whole_space(h);
    if (j.contains("interval") || j.contains("intervals")) {
        if (h.kind != SpaceKind::RealLine)
            throw cfg("window: interval form needs a Euclidean internal space");
        std::vector<groups::RealInterval> atoms;
        if (j.contains("interval")) {
            atoms.push_back(parse_interval_pair(j["interval"], "window.interval"));
        } else {
            for (const auto& v : j["intervals"])
                atoms.push_back(parse_interval_pair(v, "window.intervals"));
        }
        return SetDescriptor::real_union(std::move(atoms));
    }
    if (j.contains("classes")) {
        if (h.kind != SpaceKind::PAdic)
            throw cfg("window: class form needs a residue internal space");
        std::vector<groups::PadicClass> atoms;
        for (const auto& v : j["classes"]) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
                !v[1].is_number_integer())
                throw cfg("window.classes: expected [residue, level] pairs");
            atoms.push_back({v[0].get<long long>(), (int)v[1].get<long long>()});
        }
        return SetDescriptor::padic_union(h, std::move(atoms));
    }
    if (j.contains("members")) {
        if (h.kind != SpaceKind::Cyclic)
            throw cfg("window: member form needs a finite internal space");
        std::vector<long long> mem;
        for (const auto& v : j["members"]) mem.push_back(v.get<long long>());
        return SetDescriptor::cyclic_subset(h, std::move(mem));
    }
    throw cfg("window: no recognized form (interval/intervals/classes/members/whole/empty)");
}

SetDescriptor radius_patch(const cps::Scheme& s, const Rational& r) {
    if (s.direct_space().kind == SpaceKind::RealLine)
        return SetDescriptor::interval(-r, r);
    long long n = (long long)std::floor(to_double(r));
    return SetDescriptor::integer_range(-n, n + 1);
}

SetDescriptor parse_patch(const cps::Scheme& s, const ordered_json& p) {
    const auto& j = require(p, "patch");
    if (!j.is_object()) throw cfg("\"patch\" must be an object");
    auto g = s.direct_space();
    SetDescriptor patch;
    if (j.contains("interval")) {
        if (g.kind != SpaceKind::RealLine)
            throw cfg("patch: interval form needs a Euclidean direct space");
        auto iv = parse_interval_pair(j["interval"], "patch.interval");
        patch = SetDescriptor::interval(iv.lo, iv.hi);
    } else if (j.contains("range")) {
        if (g.kind != SpaceKind::Integers)
            throw cfg("patch: range form needs an arithmetic direct space");
        const auto& v = j["range"];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
            !v[1].is_number_integer())
            throw cfg("patch.range: expected [lo, hi) integers");
        patch = SetDescriptor::integer_range(v[0].get<long long>(), v[1].get<long long>());
    } else if (j.contains("radius")) {
        patch = radius_patch(s, parse_rational_node(j["radius"], "patch.radius"));
    } else {
        throw cfg("patch: no recognized form (interval/range/radius)");
    }
    if (groups::is_empty(patch)) throw cfg("patch: empty");
    return patch;
}

ordered_json set_to_json(const SetDescriptor& sd) {
    ordered_json j;
    switch (sd.space.kind) {
        case SpaceKind::RealLine: {
            j["space"] = "real";
            if (sd.whole) {
                j["whole"] = true;
                break;
            }
            auto arr = ordered_json::array();
            for (const auto& iv : sd.ivs)
                arr.push_back({rational_to_string(iv.lo), rational_to_string(iv.hi)});
            j["intervals"] = arr;
            break;
        }
        case SpaceKind::Integers: {
            j["space"] = "integers";
            if (sd.whole) {
                j["whole"] = true;
                break;
            }
            auto arr = ordered_json::array();
            for (const auto& rg : sd.rngs) arr.push_back({rg.lo, rg.hi});
            j["ranges"] = arr;
            break;
        }
        case SpaceKind::PAdic: {
            j["space"] = "padic";
            j["p"] = sd.space.p;
            j["depth"] = sd.space.depth;
            if (sd.whole) {
                j["whole"] = true;
                break;
            }
            auto arr = ordered_json::array();
            for (const auto& c : sd.classes) arr.push_back({c.r, c.level});
            j["classes"] = arr;
            break;
        }
        case SpaceKind::Cyclic: {
            j["space"] = "cyclic";
            j["modulus"] = sd.space.modulus;
            if (sd.whole) {
                j["whole"] = true;
                break;
            }
            j["members"] = sd.members;
            break;
        }
        default:
            j["space"] = "product";
            break;
    }
    return j;
}

struct Csv {
    std::string header;
    std::vector<std::string> lines;
};

std::string star_column(const cps::Scheme& s, cps::LatticePoint pt) {
    switch (s.kind) {
        case cps::Scheme::Kind::Quadratic:
            return fmt17(cps::star_value(s, pt));
        case cps::Scheme::Kind::PAdic:
            return std::to_string(cps::star_residue(s, pt));
        default:
            return "0";
    }
}

Csv points_csv(const cps::Scheme& s, const cps::PointSet& ps) {
    Csv c;
    if (!ps.has_coords() && !ps.xs.empty()) {
        c.header = "x";
        for (double x : ps.xs) c.lines.push_back(fmt17(x));
        return c;
    }
    c.header = "m,n,x,x_star";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        auto pt = ps.coords[i];
        c.lines.push_back(std::to_string(pt.m) + "," + std::to_string(pt.n) + "," +
                          fmt17(ps.xs[i]) + "," + star_column(s, pt));
    }
    return c;
}

Csv values_csv(const cps::PointSet& ps) {
    Csv c;
    c.header = "x";
    for (double x : ps.xs) c.lines.push_back(fmt17(x));
    return c;
}

Csv measure_csv(const cps::Scheme& s, const measures::PointMeasure& mu) {
    Csv c;
    c.header = "m,n,x,x_star,w_re,w_im";
    for (const auto& a : mu.atoms) {
        std::string row;
        if (a.has_coord)
            row = std::to_string(a.coord.m) + "," + std::to_string(a.coord.n) + "," +
                  fmt17(a.x) + "," + star_column(s, a.coord);
        else
            row = ",," + fmt17(a.x) + ",";
        row += "," + fmt17(a.w.real()) + "," + fmt17(a.w.imag());
        c.lines.push_back(row);
    }
    return c;
}

std::pair<double, double> patch_bounds(const SetDescriptor& patch) {
    if (!patch.ivs.empty())
        return {to_double(patch.ivs.front().lo), to_double(patch.ivs.back().hi)};
    if (!patch.rngs.empty())
        return {(double)patch.rngs.front().lo, (double)(patch.rngs.back().hi - 1)};
    throw precondition_error("patch must be a nonempty scalar set");
}

bool euclidean(const cps::Scheme& s) { return s.kind == cps::Scheme::Kind::Quadratic; }

struct PipelineOut {
    ordered_json fields;
    Csv csv;
    std::string svg;
};

ordered_json mean_estimate_json(const measures::MeanEstimate& me) {
    ordered_json j;
    j["value"] = me.value.real();
    j["value_im"] = me.value.imag();
    j["translate_spread"] = me.translate_spread;
    j["n_max"] = me.n_max;
    auto seq = ordered_json::array();
    for (const auto& [n, v] : me.sequence) seq.push_back({n, v.real(), v.imag()});
    j["sequence"] = seq;
    return j;
}

// ---------------------------------------------------------------- pipelines

PipelineOut pipe_generate(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    auto w = parse_window(s, ex.params);
    auto patch = parse_patch(s, ex.params);
    auto pts = cps::cut_and_project(s, w, patch);

    PipelineOut out;
    out.fields["count"] = (long long)pts.size();
    auto dc = cps::density_constant(s);
    out.fields["density_constant"] = dc.value;
    try {
        Rational vol = groups::haar_measure(w);
        out.fields["window_measure"] = rational_to_string(vol);
        out.fields["expected_density"] = to_double(vol) * dc.value;
    } catch (const measure_infinite_error&) {
        out.fields["window_measure"] = nullptr;
    }
    out.fields["window"] = set_to_json(w);
    out.fields["patch"] = set_to_json(patch);
    out.csv = points_csv(s, pts);
    if (euclidean(s)) out.svg = emit_svg_strip(s, w, patch);
    return out;
}

PipelineOut pipe_density(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    auto w = parse_window(s, ex.params);
    std::vector<long long> radii;
    if (ex.params.contains("radii")) {
        for (const auto& v : ex.params.at("radii")) {
            if (!v.is_number_integer()) throw cfg("\"radii\" must be integers");
            radii.push_back(v.get<long long>());
        }
    } else {
        radii = {100, 1000, 10000};
    }
    if (radii.empty()) throw cfg("\"radii\" must be nonempty");

    auto dc = cps::density_constant(s);
    Rational wvol = groups::haar_measure(w);
    double expected = to_double(wvol) * dc.value;

    PipelineOut out;
    out.fields["window_measure"] = rational_to_string(wvol);
    out.fields["density_constant"] = dc.value;
    out.fields["expected_density"] = expected;

    auto rows = ordered_json::array();
    bool decreasing = true;
    double prev_err = 0;
    cps::PointSet last;
    SetDescriptor last_patch;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        long long R = radii[i];
        if (R <= 0) throw cfg("\"radii\" must be positive");
        auto patch = radius_patch(s, Rational(R));
        auto pts = cps::cut_and_project(s, w, patch);
        double vol = to_double(groups::haar_measure(patch));
        double est = (double)pts.size() / vol;
        double err = std::abs(est - expected);
        ordered_json row;
        row["radius"] = R;
        row["count"] = (long long)pts.size();
        row["estimate"] = est;
        row["abs_error"] = err;
        row["envelope"] = 5.0 / (double)R;
        row["within_envelope"] = err <= 5.0 / (double)R;
        rows.push_back(row);
        if (i > 0 && !(err < prev_err)) decreasing = false;
        prev_err = err;
        last = std::move(pts);
        last_patch = patch;
    }
    out.fields["by_radius"] = rows;
    out.fields["errors_decreasing"] = decreasing;
    out.fields["csv_radius"] = radii.back();
    out.csv = points_csv(s, last);
    if (euclidean(s)) out.svg = emit_svg_strip(s, w, last_patch);
    return out;
}

PipelineOut pipe_mean(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    auto w = parse_window(s, ex.params);
    auto patch = parse_patch(s, ex.params);
    long long n_max = get_int(ex.params, "n_max", 1000);

    std::vector<double> translates;
    if (ex.params.contains("translates")) {
        for (const auto& v : ex.params.at("translates")) {
            if (!v.is_number()) throw cfg("\"translates\" must be numbers");
            translates.push_back(v.get<double>());
        }
        if (translates.empty()) throw cfg("\"translates\" must be nonempty");
    } else {
        long long k = get_int(ex.params, "translate_count", 1);
        if (k < 1) throw cfg("\"translate_count\" must be >= 1");
        std::mt19937_64 rng(ex.seed);
        auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53; };
        translates.push_back(0.0);
        for (long long i = 1; i < k; ++i) translates.push_back(10.0 * u());
    }

    auto meas = cps::omega_comb(s, cps::WeightFunction::indicator(w), patch);
    auto me = measures::mean_estimate(meas, groups::VanHoveSpec(s.direct_space()), n_max,
                                      translates);

    PipelineOut out;
    out.fields["atom_count"] = (long long)meas.size();
    out.fields["translates"] = translates;
    out.fields["mean"] = mean_estimate_json(me);
    out.csv = measure_csv(s, meas);
    if (euclidean(s)) out.svg = emit_svg_strip(s, w, patch);
    return out;
}

PipelineOut pipe_gap_cert(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    auto w = parse_window(s, ex.params);
    auto patch = parse_patch(s, ex.params);
    double eps = get_num(ex.params, "eps", 0.1);

    auto cert =
        gap::gap_certificate(s, w, eps, patch, groups::VanHoveSpec(s.direct_space()));

    PipelineOut out;
    out.fields["eps"] = eps;
    out.fields["certified_bound"] = cert.certified_bound;
    out.fields["gap_integral"] = rational_to_string(cert.sandwich.gap_integral);
    out.fields["horizon"] = cert.horizon;
    out.fields["lambda_count"] = (long long)cert.lambda_comb.size();
    out.fields["gamma_count"] = (long long)cert.gamma.size();
    out.fields["empirical_mean_gap"] = cert.empirical_mean_gap.real_value();
    out.fields["mean_gap"] = mean_estimate_json(cert.empirical_mean_gap);
    ordered_json ud;
    ud["value"] = cert.empirical_discrepancy_density.value;
    ud["n_eff"] = cert.empirical_discrepancy_density.n_eff;
    auto byn = ordered_json::array();
    for (const auto& [n, v] : cert.empirical_discrepancy_density.by_n) byn.push_back({n, v});
    ud["by_n"] = byn;
    out.fields["empirical_discrepancy_density"] = ud;

    // gamma table with the sandwich weights; mu/nu atoms are keyed by lattice
    // coordinate (scalar schemes always carry them)
    std::map<cps::LatticePoint, double> fw, gw;
    for (const auto& a : cert.mu_eps.atoms)
        if (a.has_coord) fw[a.coord] = a.w.real();
    for (const auto& a : cert.nu_eps.atoms)
        if (a.has_coord) gw[a.coord] = a.w.real();
    Csv c;
    c.header = "m,n,x,x_star,f,g";
    for (std::size_t i = 0; i < cert.gamma.size(); ++i) {
        auto pt = cert.gamma.coords[i];
        auto fit = fw.find(pt);
        auto git = gw.find(pt);
        c.lines.push_back(std::to_string(pt.m) + "," + std::to_string(pt.n) + "," +
                          fmt17(cert.gamma.xs[i]) + "," + star_column(s, pt) + "," +
                          fmt17(fit == fw.end() ? 0.0 : fit->second) + "," +
                          fmt17(git == gw.end() ? 0.0 : git->second));
    }
    out.csv = std::move(c);
    if (euclidean(s)) out.svg = emit_svg_strip(s, w, patch);
    return out;
}

PipelineOut pipe_t_operator(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    auto w = parse_window(s, ex.params);
    auto patch = parse_patch(s, ex.params);
    long long trials = get_int(ex.params, "trials", 3);
    long long n_intervals = get_int(ex.params, "intervals", 8);
    if (trials < 1) throw cfg("\"trials\" must be >= 1");

    auto lam = cps::cut_and_project(s, w, patch);
    auto omega = measures::PointMeasure::from_point_set(lam);
    double carrier_gap = gap::min_gap(lam);
    measures::BumpFunction psi =
        ex.params.contains("psi_radius")
            ? measures::BumpFunction::tent(
                  rational_from_double(get_num(ex.params, "psi_radius")))
            : gap::default_psi(carrier_gap);

    std::mt19937_64 rng(ex.seed);
    auto u = [&] { return (double)(rng() >> 11) * 0x1.0p-53; };
    auto random_measure = [&](bool complex_weights) {
        measures::PointMeasure mu = omega;
        for (auto& a : mu.atoms) a.w = {u(), complex_weights ? u() : 0.0};
        mu.nonnegative = !complex_weights;
        return mu;
    };

    std::set<cps::LatticePoint> carrier(lam.coords.begin(), lam.coords.end());
    double fixed_err = 0;
    bool support_ok = true;
    measures::PointMeasure last_mu, last_t;
    for (long long t = 0; t < trials; ++t) {
        auto mu = random_measure(true);
        auto tmu = gap::t_operator(psi, omega, mu);
        if (tmu.size() != mu.size()) support_ok = false;
        for (std::size_t i = 0; i < tmu.size() && i < mu.size(); ++i) {
            if (!tmu.atoms[i].has_coord || !carrier.count(tmu.atoms[i].coord))
                support_ok = false;
            fixed_err = std::max(fixed_err, std::abs(tmu.atoms[i].w - mu.atoms[i].w));
        }
        last_mu = std::move(mu);
        last_t = std::move(tmu);
    }

    // additivity and homogeneity in one shot
    auto mu1 = random_measure(true);
    auto mu2 = random_measure(true);
    const std::complex<double> ca{0.3, 0.0}, cb{-1.1, 0.0};
    auto combo = omega;
    for (std::size_t i = 0; i < combo.atoms.size(); ++i)
        combo.atoms[i].w = ca * mu1.atoms[i].w + cb * mu2.atoms[i].w;
    combo.nonnegative = false;
    auto t_combo = gap::t_operator(psi, omega, combo);
    auto t1 = gap::t_operator(psi, omega, mu1);
    auto t2 = gap::t_operator(psi, omega, mu2);
    double lin_err = 0;
    for (std::size_t i = 0; i < t_combo.atoms.size(); ++i)
        lin_err = std::max(lin_err, std::abs(t_combo.atoms[i].w - ca * t1.atoms[i].w -
                                             cb * t2.atoms[i].w));

    // mass domination: T(mu)(A) <= mu(A thickened by the profile radius)
    auto mu_pos = random_measure(false);
    auto t_pos = gap::t_operator(psi, omega, mu_pos);
    double r = to_double(psi.radius());
    auto [plo, phi] = patch_bounds(patch);
    double max_excess = -1e300;
    for (long long i = 0; i < n_intervals; ++i) {
        double len = 0.5 + 2.5 * u();
        double c0 = plo + u() * std::max(0.0, (phi - plo) - len);
        double lhs = 0, rhs = 0;
        for (const auto& a : t_pos.atoms)
            if (a.x >= c0 && a.x < c0 + len) lhs += a.w.real();
        for (const auto& a : mu_pos.atoms)
            if (a.x >= c0 - r && a.x < c0 + len + r) rhs += a.w.real();
        max_excess = std::max(max_excess, lhs - rhs);
    }

    PipelineOut out;
    out.fields["carrier_count"] = (long long)lam.size();
    out.fields["carrier_min_gap"] = carrier_gap;
    out.fields["psi_radius"] = r;
    out.fields["trials"] = trials;
    out.fields["fixed_point_max_error"] = fixed_err;
    out.fields["support_in_carrier"] = support_ok;
    out.fields["linearity_max_error"] = lin_err;
    out.fields["domination_intervals"] = n_intervals;
    out.fields["domination_max_excess"] = max_excess;
    out.fields["domination_ok"] = max_excess <= 1e-12;

    Csv c;
    c.header = "m,n,x,mu_re,mu_im,t_re,t_im";
    for (std::size_t i = 0; i < last_mu.atoms.size(); ++i) {
        const auto& a = last_mu.atoms[i];
        const auto& b = last_t.atoms[i];
        c.lines.push_back(std::to_string(a.coord.m) + "," + std::to_string(a.coord.n) + "," +
                          fmt17(a.x) + "," + fmt17(a.w.real()) + "," + fmt17(a.w.imag()) +
                          "," + fmt17(b.w.real()) + "," + fmt17(b.w.imag()));
    }
    out.csv = std::move(c);
    if (euclidean(s)) out.svg = emit_svg_strip(s, w, patch);
    return out;
}

PipelineOut pipe_meyer_check(const Experiment& ex) {
    PipelineOut out;
    cps::PointSet ps;
    bool have_scheme = false;
    cps::Scheme s;
    cps::Window w;
    SetDescriptor patch;
    if (ex.params.contains("theta")) {
        double theta = get_num(ex.params, "theta");
        double bound = get_num(ex.params, "bound", 100.0);
        std::string which = ex.params.value("set", std::string("m"));
        if (which == "m")
            ps = meyer::m_theta(theta, bound);
        else if (which == "lambda")
            ps = meyer::lambda_theta(theta, bound).points();
        else
            throw cfg("\"set\" must be \"m\" or \"lambda\"");
        out.fields["theta"] = theta;
        out.fields["bound"] = bound;
        out.fields["set"] = which;
    } else {
        s = parse_scheme(ex.params);
        w = parse_window(s, ex.params);
        patch = parse_patch(s, ex.params);
        ps = cps::cut_and_project(s, w, patch);
        have_scheme = true;
    }
    long long fb = get_int(ex.params, "f_search_bound", 64);
    if (fb < 1) throw cfg("\"f_search_bound\" must be >= 1");
    auto v = meyer::meyer_test(ps, (std::size_t)fb);

    out.fields["point_count"] = (long long)ps.size();
    out.fields["uniformly_discrete"] = v.uniformly_discrete;
    out.fields["discreteness_radius"] = v.discreteness_radius;
    out.fields["relatively_dense"] = v.relatively_dense;
    out.fields["covering_radius"] = v.covering_radius;
    out.fields["triple_count"] = (long long)v.triple_count;
    out.fields["triple_difference_gap"] = v.triple_difference_gap;
    out.fields["f_found"] = v.f_found;
    out.fields["f_set"] = v.f_set;
    out.fields["meyer"] = v.meyer;
    out.fields["inconclusive"] = v.inconclusive;
    out.fields["note"] = v.note;

    out.csv = have_scheme ? points_csv(s, ps) : values_csv(ps);
    if (have_scheme && euclidean(s)) out.svg = emit_svg_strip(s, w, patch);
    return out;
}

PipelineOut pipe_counterexample(const Experiment& ex) {
    double theta = get_num(ex.params, "theta", 3.14159265358979312);
    double bound = get_num(ex.params, "bound", 2000.0);
    std::vector<double> t_values;
    if (ex.params.contains("t_values")) {
        for (const auto& v : ex.params.at("t_values")) t_values.push_back(v.get<double>());
    } else {
        for (int t = 0; t <= 1000; t += 100) t_values.push_back(t);
    }
    std::vector<long long> n_values;
    if (ex.params.contains("n_values")) {
        for (const auto& v : ex.params.at("n_values")) n_values.push_back(v.get<long long>());
    } else {
        n_values = {10, 100, 1000};
    }

    auto ts = meyer::lambda_theta(theta, bound);
    auto m = meyer::m_theta(theta, bound);

    auto sweep = ordered_json::array();
    bool all_ok = true;
    for (double t : t_values)
        for (long long n : n_values) {
            auto dc = meyer::density_bound_check(theta, t, n, ts);
            ordered_json row;
            row["t"] = t;
            row["n"] = n;
            row["count"] = dc.count;
            row["count_ratio"] = dc.count_ratio;
            row["bound_value"] = dc.bound_value;
            row["ok"] = dc.ok;
            sweep.push_back(row);
            all_ok = all_ok && dc.ok;
        }

    PipelineOut out;
    out.fields["theta"] = theta;
    out.fields["bound"] = bound;
    out.fields["lambda_count"] = (long long)ts.xs.size();
    out.fields["m_count"] = (long long)m.size();
    out.fields["density_sweep"] = sweep;
    out.fields["all_ok"] = all_ok;

    Csv c;
    c.header = "set,x";
    for (double x : ts.xs) c.lines.push_back("lambda," + fmt17(x));
    for (double x : m.xs) c.lines.push_back("m," + fmt17(x));
    out.csv = std::move(c);
    return out;
}

PipelineOut pipe_lift_check(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    long long coeff_bound = get_int(ex.params, "coeff_bound", 1000);
    double tol = get_num(ex.params, "tolerance", 1e-9);

    std::optional<QuadExt> beta_exact, gamma_exact;
    auto parse_coeff = [&](const char* key) -> double {
        const auto& v = require(ex.params, key);
        if (v.is_number()) return v.get<double>();
        if (v.is_array() && v.size() == 2) {
            QuadExt q(parse_rational_node(v[0], key), parse_rational_node(v[1], key),
                      s.alpha.d);
            (std::string(key) == "beta" ? beta_exact : gamma_exact) = q;
            return q.value();
        }
        throw cfg(std::string(key) + ": expected a number or [a, b] for a + b*sqrt(d)");
    };
    double beta = parse_coeff("beta");
    double gamma = parse_coeff("gamma");

    auto r = cps::character_lift_check(s, beta, gamma, coeff_bound, tol);

    PipelineOut out;
    out.fields["beta"] = beta;
    out.fields["gamma"] = gamma;
    out.fields["coeff_bound"] = coeff_bound;
    out.fields["tolerance"] = tol;
    out.fields["max_deviation"] = r.max_deviation;
    out.fields["worst_m"] = r.worst.m;
    out.fields["worst_n"] = r.worst.n;
    out.fields["pass"] = r.pass;
    if (beta_exact && gamma_exact)
        out.fields["dual_pair_exact"] = cps::is_dual_pair(s, *beta_exact, *gamma_exact);
    return out;
}

PipelineOut pipe_reconstruct(const Experiment& ex) {
    auto s = parse_scheme(ex.params);
    auto w = parse_window(s, ex.params);
    auto patch = parse_patch(s, ex.params);
    double thr = get_num(ex.params, "gap_threshold", 0.0);

    auto lam = cps::cut_and_project(s, w, patch);
    auto est = gap::reconstruct_window(s, lam, thr);

    PipelineOut out;
    out.fields["point_count"] = (long long)lam.size();
    out.fields["boundary_mass"] = est.boundary_mass;
    out.fields["window_estimate"] = set_to_json(est.window);
    out.fields["window_input"] = set_to_json(w);
    out.csv = points_csv(s, lam);
    if (euclidean(s)) out.svg = emit_svg_strip(s, w, patch);
    return out;
}

using PipeFn = PipelineOut (*)(const Experiment&);
const std::map<std::string, PipeFn>& pipeline_table() {
    static const std::map<std::string, PipeFn> table = {
        {"generate", pipe_generate},         {"density", pipe_density},
        {"mean", pipe_mean},                 {"gap-cert", pipe_gap_cert},
        {"t-operator", pipe_t_operator},     {"meyer-check", pipe_meyer_check},
        {"counterexample", pipe_counterexample}, {"lift-check", pipe_lift_check},
        {"reconstruct", pipe_reconstruct},
    };
    return table;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("config: cannot write '" + path.string() + "'");
    f << content;
    f.flush();
    if (!f) throw config_error("config: write failed for '" + path.string() + "'");
}

}  // namespace

std::string dump_json(const ordered_json& j) {
    std::string s;
    dump_rec(j, s, 0);
    s += "\n";
    return s;
}

Experiment experiment_from_json(const ordered_json& doc) {
    if (!doc.is_object() || doc.empty()) throw cfg("empty document");
    Experiment ex;
    ex.params = doc;
    const auto& name = require(doc, "pipeline");
    if (!name.is_string()) throw cfg("\"pipeline\" must be a string");
    ex.pipeline = name.get<std::string>();
    if (!pipeline_table().count(ex.pipeline))
        throw cfg("unknown pipeline \"" + ex.pipeline + "\"");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) throw cfg("\"seed\" must be an integer");
        ex.seed = doc["seed"].get<unsigned long long>();
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw cfg("\"out\" must be a string");
        ex.out_dir = doc["out"].get<std::string>();
    }
    return ex;
}

Experiment load_experiment(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw config_error("config: cannot read '" + config_path + "'");
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return experiment_from_json(doc);
}

RunResult run(const Experiment& ex) {
    auto it = pipeline_table().find(ex.pipeline);
    if (it == pipeline_table().end()) throw cfg("unknown pipeline \"" + ex.pipeline + "\"");
    PipelineOut out = it->second(ex);

    ordered_json res;
    res["spec_version"] = 1;
    res["pipeline"] = ex.pipeline;
    res["seed"] = ex.seed;
    for (const auto& [k, v] : out.fields.items()) res[k] = v;
    auto arts = ordered_json::array();
    arts.push_back("results.json");
    if (!out.csv.header.empty()) arts.push_back("points.csv");
    if (!out.svg.empty()) arts.push_back("strip.svg");
    res["artifacts"] = arts;

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(ex.out_dir, ec);
    if (ec) throw config_error("config: cannot create output directory '" + ex.out_dir + "'");

    RunResult rr;
    rr.results = res;
    auto dir = fs::path(ex.out_dir);
    write_text(dir / "results.json", dump_json(res));
    rr.files.push_back((dir / "results.json").string());
    if (!out.csv.header.empty()) {
        std::string body = out.csv.header + "\n";
        for (const auto& line : out.csv.lines) body += line + "\n";
        write_text(dir / "points.csv", body);
        rr.files.push_back((dir / "points.csv").string());
    }
    if (!out.svg.empty()) {
        write_text(dir / "strip.svg", out.svg);
        rr.files.push_back((dir / "strip.svg").string());
    }
    return rr;
}

}  // namespace aperiodica::cli

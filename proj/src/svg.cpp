#include "aperiodica/experiment.hpp"

#include "aperiodica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace aperiodica::cli {

using groups::SetDescriptor;

namespace {

std::string num(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string window_label(const SetDescriptor& w) {
    if (w.ivs.empty()) return "W = empty";
    std::string s = "W = ";
    for (std::size_t i = 0; i < w.ivs.size(); ++i) {
        if (i) s += " U ";
        s += "[" + rational_to_string(w.ivs[i].lo) + ", " + rational_to_string(w.ivs[i].hi) +
             ")";
    }
    return s;
}

}  // namespace

std::string emit_svg_strip(const cps::Scheme& s, const cps::Window& w,
                           const SetDescriptor& patch) {
    if (s.kind != cps::Scheme::Kind::Quadratic)
        throw precondition_error(
            "svg strip: Euclidean internal space required; residue schemes have no planar "
            "embedding");
    if (w.whole) throw precondition_error("svg strip: bounded window required");

    auto sel = cps::cut_and_project(s, w, patch);

    // vertical view: the window hull padded by its own height (at least 1)
    Rational wlo = 0, whi = 1;
    if (!w.ivs.empty()) {
        wlo = w.ivs.front().lo;
        whi = w.ivs.back().hi;
    }
    Rational h = whi - wlo;
    if (h < 1) h = 1;
    auto view = SetDescriptor::interval(wlo - h, whi + h);
    auto ctx = cps::cut_and_project(s, view, patch);

    double plo = to_double(patch.ivs.front().lo);
    double phi = to_double(patch.ivs.back().hi);
    if (!(phi > plo)) phi = plo + 1;
    double vlo = to_double(wlo - h), vhi = to_double(whi + h);

    const double x0 = 60, x1 = 880, y0 = 20, y1 = 340, axis_y = 400;
    auto sx = [&](double x) { return x0 + (x - plo) / (phi - plo) * (x1 - x0); };
    auto sy = [&](double y) { return y1 - (y - vlo) / (vhi - vlo) * (y1 - y0); };

    std::string svg;
    svg +=
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"460\" "
        "viewBox=\"0 0 900 460\">\n";
    svg += "<rect width=\"900\" height=\"460\" fill=\"#ffffff\"/>\n";
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(x1 - x0) +
           "\" height=\"" + num(y1 - y0) +
           "\" fill=\"none\" stroke=\"#d0d4d9\" stroke-width=\"1\"/>\n";

    // the strip: one shaded band per window interval, edges at the exact endpoints
    for (const auto& iv : w.ivs) {
        double top = sy(to_double(iv.hi)), bot = sy(to_double(iv.lo));
        svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(top) + "\" width=\"" + num(x1 - x0) +
               "\" height=\"" + num(bot - top) + "\" fill=\"#f5c542\" opacity=\"0.22\"/>\n";
        for (double edge : {bot, top})
            svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(edge) + "\" x2=\"" + num(x1) +
                   "\" y2=\"" + num(edge) +
                   "\" stroke=\"#b8860b\" stroke-width=\"1\" stroke-dasharray=\"5,4\"/>\n";
    }

    // lattice context in the (x, x*) plane
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        double ys = cps::star_value(s, ctx.coords[i]);
        svg += "<circle cx=\"" + num(sx(ctx.xs[i])) + "\" cy=\"" + num(sy(ys)) +
               "\" r=\"1.8\" fill=\"#94a3b1\"/>\n";
    }

    // selected points, drawn on top; data-x carries the full-precision position
    for (std::size_t i = 0; i < sel.size(); ++i) {
        double ys = cps::star_value(s, sel.coords[i]);
        svg += "<circle class=\"sel\" data-x=\"" + num(sel.xs[i], "%.17g") + "\" cx=\"" +
               num(sx(sel.xs[i])) + "\" cy=\"" + num(sy(ys)) +
               "\" r=\"2.6\" fill=\"#bf3b2f\"/>\n";
    }

    // projection axis with one tick per selected point
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(axis_y) + "\" x2=\"" + num(x1) +
           "\" y2=\"" + num(axis_y) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    for (std::size_t i = 0; i < sel.size(); ++i)
        svg += "<line x1=\"" + num(sx(sel.xs[i])) + "\" y1=\"" + num(axis_y - 7) +
               "\" x2=\"" + num(sx(sel.xs[i])) + "\" y2=\"" + num(axis_y + 7) +
               "\" stroke=\"#bf3b2f\" stroke-width=\"1\"/>\n";

    svg += "<text x=\"60\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#333333\">" +
           window_label(w) + "</text>\n";
    svg += "<text x=\"60\" y=\"440\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#333333\">patch [" +
           num(plo, "%.6g") + ", " + num(phi, "%.6g") + "), " +
           std::to_string(sel.size()) + " of " + std::to_string(ctx.size()) +
           " lattice points selected</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace aperiodica::cli

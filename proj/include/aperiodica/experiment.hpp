#pragma once

#include "aperiodica/gap.hpp"
#include "aperiodica/measures.hpp"
#include "aperiodica/meyer.hpp"
#include "aperiodica/scheme.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace aperiodica::cli {

/**
 * Experiment driver. A pipeline is named in a JSON config, runs through the
 * library, and leaves flat files in the output directory: results.json
 * always, points.csv where the run produces a point table, strip.svg for
 * Euclidean schemes. Identical config + seed gives byte-identical files; the
 * output directory itself is never echoed into them.
 */
struct Experiment {
    std::string pipeline;
    unsigned long long seed = 1;
    std::string out_dir = "aperiodica-out";
    nlohmann::ordered_json params;  // the full config document
};

// Throws config_error on unreadable files, parse failures, or a missing/
// unknown pipeline name.
Experiment load_experiment(const std::string& config_path);
Experiment experiment_from_json(const nlohmann::ordered_json& doc);

struct RunResult {
    nlohmann::ordered_json results;
    std::vector<std::string> files;  // paths written, results.json first
};

// Runs the pipeline and writes the artifacts. config_error for bad
// parameters, precondition_error for violated mathematical preconditions,
// internal_check_error when a result fails its own verification.
RunResult run(const Experiment& ex);

// Deterministic serialization: 2-space indent, insertion-ordered keys,
// floats printed with 17 significant digits so they round-trip exactly.
std::string dump_json(const nlohmann::ordered_json& j);

/**
 * The classical strip picture: lattice points drawn in the (x, x*) plane,
 * the window strip shaded with boundaries at the exact window endpoints,
 * selected points marked (class="sel", one per cut_and_project hit) and
 * projected onto the axis below. Requires a Euclidean internal space and a
 * bounded window; deterministic byte-for-byte.
 */
std::string emit_svg_strip(const cps::Scheme& s, const cps::Window& w,
                           const groups::SetDescriptor& patch);

}  // namespace aperiodica::cli

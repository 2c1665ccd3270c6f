#include "aperiodica/errors.hpp"
#include "aperiodica/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <memory>
#include <string>
#include <vector>

using aperiodica::config_error;
using aperiodica::internal_check_error;
using aperiodica::precondition_error;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

long long to_ll(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error("config: " + what + ": expected an integer, got '" + s + "'");
    }
}

double to_d(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error("config: " + what + ": expected a number, got '" + s + "'");
    }
}

ordered_json scheme_json(const std::string& s) {
    auto parts = split(s, ':');
    const std::string& k = parts[0];
    if (k == "golden" || k == "silver" || k == "trivial") {
        if (parts.size() != 1) throw config_error("config: scheme '" + s + "' takes no arguments");
        return k;
    }
    if (k == "padic") {
        if (parts.size() != 3)
            throw config_error("config: scheme 'padic' needs padic:P:DEPTH");
        return ordered_json{{"kind", "padic"},
                            {"p", to_ll(parts[1], "scheme p")},
                            {"depth", to_ll(parts[2], "scheme depth")}};
    }
    if (k == "quadratic") {
        if (parts.size() != 5)
            throw config_error("config: scheme 'quadratic' needs quadratic:U:V:W:D");
        return ordered_json{{"kind", "quadratic"},
                            {"u", to_ll(parts[1], "scheme u")},
                            {"v", to_ll(parts[2], "scheme v")},
                            {"w", to_ll(parts[3], "scheme w")},
                            {"d", to_ll(parts[4], "scheme d")}};
    }
    throw config_error("config: unknown scheme '" + s + "'");
}

ordered_json window_json(const std::string& w) {
    if (w == "empty" || w == "whole") return w;
    if (w.rfind("classes:", 0) == 0) {
        auto arr = ordered_json::array();
        for (const auto& item : split(w.substr(8), ';')) {
            auto rl = split(item, ':');
            if (rl.size() != 2) throw config_error("config: window class needs r:level");
            arr.push_back({to_ll(rl[0], "window residue"), to_ll(rl[1], "window level")});
        }
        return ordered_json{{"classes", arr}};
    }
    if (w.rfind("members:", 0) == 0) {
        auto arr = ordered_json::array();
        for (const auto& item : split(w.substr(8), ','))
            arr.push_back(to_ll(item, "window member"));
        return ordered_json{{"members", arr}};
    }
    auto arr = ordered_json::array();
    for (const auto& item : split(w, ';')) {
        auto pair = split(item, ',');
        if (pair.size() != 2)
            throw config_error("config: window interval needs lo,hi, got '" + item + "'");
        arr.push_back({pair[0], pair[1]});
    }
    return ordered_json{{"intervals", arr}};
}

ordered_json patch_json(const std::string& p) {
    if (p.rfind("range:", 0) == 0) {
        auto pair = split(p.substr(6), ',');
        if (pair.size() != 2) throw config_error("config: patch range needs lo,hi");
        return ordered_json{
            {"range", {to_ll(pair[0], "patch lo"), to_ll(pair[1], "patch hi")}}};
    }
    if (p.rfind("radius:", 0) == 0) return ordered_json{{"radius", p.substr(7)}};
    auto pair = split(p, ',');
    if (pair.size() != 2) throw config_error("config: patch needs lo,hi, got '" + p + "'");
    return ordered_json{{"interval", {pair[0], pair[1]}}};
}

// one flag bundle per shorthand subcommand
struct Shorthand {
    std::string pipeline;
    CLI::App* sub = nullptr;
    std::string scheme = "golden", window, patch, out, set = "m";
    std::string radii, translates, t_values, n_values;
    long long seed = 1;
    double eps = 0.1, theta = 3.14159265358979312, bound = 2000, beta = 0, gamma = 0,
           tol = 1e-9, psi_radius = 0, gap_threshold = 0;
    long long n_max = 1000, translate_count = 1, trials = 3, intervals = 8, f_bound = 64,
              coeff_bound = 1000;

    bool given(const std::string& name) const { return sub->count(name) > 0; }

    ordered_json build() const {
        ordered_json doc;
        doc["pipeline"] = pipeline;
        doc["seed"] = seed;
        bool wants_scheme = pipeline != "counterexample";
        bool theta_source = pipeline == "meyer-check" && given("--theta");
        if (theta_source) wants_scheme = false;
        if (wants_scheme) {
            doc["scheme"] = scheme_json(scheme);
            if (pipeline != "lift-check") {
                std::string w = window;
                if (w.empty()) w = scheme.rfind("padic", 0) == 0 || scheme == "trivial"
                                       ? "whole"
                                       : "0,1";
                doc["window"] = window_json(w);
            }
        }
        bool wants_patch = pipeline == "generate" || pipeline == "mean" ||
                           pipeline == "gap-cert" || pipeline == "t-operator" ||
                           pipeline == "reconstruct" ||
                           (pipeline == "meyer-check" && !theta_source);
        if (wants_patch) {
            if (patch.empty())
                throw config_error("config: " + pipeline + " needs --patch" +
                                   (pipeline == "meyer-check" ? " (or --theta)" : ""));
            doc["patch"] = patch_json(patch);
        }
        if (pipeline == "density" && given("--radii")) {
            auto arr = ordered_json::array();
            for (const auto& r : split(radii, ',')) arr.push_back(to_ll(r, "radius"));
            doc["radii"] = arr;
        }
        if (pipeline == "mean") {
            doc["n_max"] = n_max;
            if (given("--translates")) {
                auto arr = ordered_json::array();
                for (const auto& t : split(translates, ','))
                    arr.push_back(to_d(t, "translate"));
                doc["translates"] = arr;
            } else if (given("--translate-count")) {
                doc["translate_count"] = translate_count;
            }
        }
        if (pipeline == "gap-cert") doc["eps"] = eps;
        if (pipeline == "t-operator") {
            doc["trials"] = trials;
            doc["intervals"] = intervals;
            if (given("--psi-radius")) doc["psi_radius"] = psi_radius;
        }
        if (pipeline == "meyer-check") {
            if (theta_source) {
                doc["theta"] = theta;
                doc["bound"] = given("--bound") ? bound : 100.0;
                doc["set"] = set;
            }
            doc["f_search_bound"] = f_bound;
        }
        if (pipeline == "counterexample") {
            doc["theta"] = theta;
            doc["bound"] = bound;
            if (given("--t-values")) {
                auto arr = ordered_json::array();
                for (const auto& t : split(t_values, ',')) arr.push_back(to_d(t, "t value"));
                doc["t_values"] = arr;
            }
            if (given("--n-values")) {
                auto arr = ordered_json::array();
                for (const auto& n : split(n_values, ',')) arr.push_back(to_ll(n, "n value"));
                doc["n_values"] = arr;
            }
        }
        if (pipeline == "lift-check") {
            doc["beta"] = beta;
            doc["gamma"] = gamma;
            doc["coeff_bound"] = coeff_bound;
            doc["tolerance"] = tol;
        }
        if (pipeline == "reconstruct" && given("--gap-threshold"))
            doc["gap_threshold"] = gap_threshold;
        return doc;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aperiodica: cut-and-project sets, averaging certificates, and Meyer "
                 "diagnostics"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "execute a pipeline from a JSON config");
    std::string config_path, run_out;
    long long run_seed = 0;
    run_cmd->add_option("config", config_path, "path to the experiment JSON")->required();
    run_cmd->add_option("--out", run_out, "output directory (overrides the config)");
    run_cmd->add_option("--seed", run_seed, "seed (overrides the config)");

    const std::vector<std::pair<std::string, std::string>> names = {
        {"generate", "enumerate a cut-and-project set"},
        {"density", "count points against the density formula on a radius ladder"},
        {"mean", "finite-horizon averages of a model-set comb"},
        {"gap-cert", "sandwich certificate squeezing the comb between two averages"},
        {"t-operator", "smooth-sample-reweight operator checks on random measures"},
        {"meyer-check", "Meyer witnesses for a finite configuration"},
        {"counterexample", "the theta power set and its density-zero sweep"},
        {"lift-check", "character lift deviation across the lattice"},
        {"reconstruct", "window recovery from the star image"},
    };
    std::vector<std::unique_ptr<Shorthand>> shorts;
    for (const auto& [name, help] : names) {
        auto sh = std::make_unique<Shorthand>();
        sh->pipeline = name;
        sh->sub = app.add_subcommand(name, help);
        auto* s = sh->sub;
        if (name == "counterexample") {
            s->add_option("--theta", sh->theta, "base of the power digits (default pi)");
            s->add_option("--bound", sh->bound, "enumeration bound (default 2000)");
            s->add_option("--t-values", sh->t_values, "comma list of window starts");
            s->add_option("--n-values", sh->n_values, "comma list of window lengths");
        } else {
            s->add_option("--scheme", sh->scheme,
                          "golden|silver|trivial|padic:P:K|quadratic:U:V:W:D");
            if (name != "lift-check")
                s->add_option("--window", sh->window,
                              "lo,hi[;lo,hi] | classes:r:l[;r:l] | members:a,b | whole | "
                              "empty");
            if (name != "density" && name != "lift-check")
                s->add_option("--patch", sh->patch, "lo,hi | range:lo,hi | radius:R");
        }
        if (name == "density")
            s->add_option("--radii", sh->radii, "comma list of patch radii");
        if (name == "mean") {
            s->add_option("--n-max", sh->n_max, "averaging horizon");
            s->add_option("--translates", sh->translates, "comma list of shifts");
            s->add_option("--translate-count", sh->translate_count,
                          "number of seeded shifts (base 0 included)");
        }
        if (name == "gap-cert") s->add_option("--eps", sh->eps, "certificate budget");
        if (name == "t-operator") {
            s->add_option("--trials", sh->trials, "random measures to test");
            s->add_option("--intervals", sh->intervals, "random intervals for domination");
            s->add_option("--psi-radius", sh->psi_radius, "profile support radius");
        }
        if (name == "meyer-check") {
            s->add_option("--theta", sh->theta, "use the theta set instead of a scheme");
            s->add_option("--bound", sh->bound, "theta enumeration bound (default 100)");
            s->add_option("--set", sh->set, "m | lambda");
            s->add_option("--f-bound", sh->f_bound, "translate cover search bound");
        }
        if (name == "lift-check") {
            s->add_option("--beta", sh->beta, "direct character frequency")->required();
            s->add_option("--gamma", sh->gamma, "internal character frequency")->required();
            s->add_option("--coeff-bound", sh->coeff_bound, "lattice coefficient bound");
            s->add_option("--tol", sh->tol, "pass tolerance");
        }
        if (name == "reconstruct")
            s->add_option("--gap-threshold", sh->gap_threshold, "star-gap block splitter");
        s->add_option("--out", sh->out, "output directory");
        s->add_option("--seed", sh->seed, "seed for randomized choices");
        shorts.push_back(std::move(sh));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        aperiodica::cli::Experiment ex;
        if (run_cmd->parsed()) {
            ex = aperiodica::cli::load_experiment(config_path);
            if (run_cmd->count("--out")) ex.out_dir = run_out;
            if (run_cmd->count("--seed")) ex.seed = (unsigned long long)run_seed;
        } else {
            for (const auto& sh : shorts)
                if (sh->sub->parsed()) {
                    ex = aperiodica::cli::experiment_from_json(sh->build());
                    if (!sh->out.empty()) ex.out_dir = sh->out;
                    break;
                }
        }
        auto rr = aperiodica::cli::run(ex);
        std::cout << "wrote";
        for (const auto& f : rr.files) std::cout << ' ' << f;
        std::cout << '\n';
        return 0;
    } catch (const internal_check_error& e) {
        std::cerr << "internal check failure: " << e.what() << '\n';
        return 3;
    } catch (const precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return 2;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}

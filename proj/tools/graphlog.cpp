// Ground states of -lap(u) + a u = u log u^2 on weighted graphs.
//
//   graphlog solve      --graph cycle:8 --potential constant:-0.5
//   graphlog exhaustion --graph path:200 --potential coercive:1:-0.5 --radii 10,20,40
//   graphlog verify
//   graphlog export-dot --graph star:9
//
// Exit codes: 0 ok/converged, 1 config error, 2 not converged, 3 inconclusive.
// GRAPHLOG_THREADS caps the worker thread count.

#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphlog/graphlog.hpp"

namespace {

using graphlog::json;

struct CommonFlags {
    std::string config_file;
    std::string graph;
    std::string graph_file;
    std::string potential;
    std::string output_dir;
    std::string method;
    std::string init_kind;
    std::int64_t seed = -1;
    int max_iters = -1;
    double grad_tol = -1.0;
    int path_points = -1;
};

json merge_config(const CommonFlags& f) {
    json cfg = json::object();
    if (!f.config_file.empty()) {
        cfg = graphlog::load_json_file(f.config_file);
        if (!cfg.is_object())
            throw std::invalid_argument("config file must hold a JSON object");
    }
    if (!f.graph.empty()) cfg["graph"] = f.graph;
    if (!f.graph_file.empty()) cfg["graph"] = json{{"file", f.graph_file}};
    if (!f.potential.empty()) cfg["potential"] = f.potential;
    if (!f.output_dir.empty()) cfg["output_dir"] = f.output_dir;
    if (!f.method.empty()) cfg["method"] = f.method;
    if (!f.init_kind.empty()) cfg["init"]["kind"] = f.init_kind;
    if (f.seed >= 0) cfg["seed"] = f.seed;
    if (f.max_iters >= 0) cfg["max_iters"] = f.max_iters;
    if (f.grad_tol >= 0.0) cfg["grad_tol"] = f.grad_tol;
    if (f.path_points >= 0) cfg["path_points"] = f.path_points;
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool solver_flags) {
    cmd->add_option("--config", f.config_file, "JSON config file; flags override its keys");
    cmd->add_option("--graph", f.graph, "graph family spec, e.g. cycle:8 or lattice2d:5x5");
    cmd->add_option("--graph-file", f.graph_file, "graph JSON file")->excludes("--graph");
    cmd->add_option("--potential", f.potential,
                    "potential family spec, e.g. constant:-0.5 or coercive:1:-0.5");
    cmd->add_option("--out", f.output_dir, "output directory (default .)");
    if (solver_flags) {
        cmd->add_option("--method", f.method, "nehari_descent (default) or mountain_pass");
        cmd->add_option("--init", f.init_kind,
                        "initial shape: positive_bump, constant, random, embedded");
        cmd->add_option("--seed", f.seed, "RNG seed");
        cmd->add_option("--max-iters", f.max_iters, "iteration cap");
        cmd->add_option("--grad-tol", f.grad_tol, "residual l2 stopping tolerance");
        cmd->add_option("--path-points", f.path_points, "mountain pass path resolution");
    }
}

std::vector<int> parse_radii(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(graphlog::detail::to_int(item, "radii")));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ground states of -lap(u) + a u = u log u^2 on weighted graphs"};
    app.require_subcommand(1);
    app.footer("GRAPHLOG_THREADS caps the worker thread count.");

    CommonFlags solve_flags;
    std::string compare_path;
    CLI::App* solve = app.add_subcommand("solve", "compute a ground state");
    add_common(solve, solve_flags, true);
    solve->add_option("--compare", compare_path, "prior summary.json to diff the level against");

    CommonFlags ex_flags;
    std::string radii_text;
    std::int64_t center = -1;
    CLI::App* exhaustion =
        app.add_subcommand("exhaustion", "solve on nested ball truncations");
    add_common(exhaustion, ex_flags, true);
    exhaustion->add_option("--radii", radii_text, "comma-separated truncation radii");
    exhaustion->add_option("--center", center, "truncation center vertex");

    CommonFlags verify_flags;
    std::string verify_target = "all";
    double verify_n = -1.0;
    double crossing_budget = -1.0;
    std::vector<double> verify_eps;
    CLI::App* verify = app.add_subcommand(
        "verify", "check the divergent log-energy examples and the |s^2 log s^2| bound");
    verify->add_option("target", verify_target,
                       "what to verify: example1, example2, cepsilon, all (default)");
    verify->add_option("--config", verify_flags.config_file,
                       "JSON config file; flags override its keys");
    verify->add_option("--out", verify_flags.output_dir, "output directory (default .)");
    verify->add_option("-n,--n", verify_n, "series budget (default 100000)");
    verify->add_option("--crossing-budget", crossing_budget,
                       "exact crossing scan budget (default 1000000)");
    verify->add_option("--eps", verify_eps, "epsilons for the |s^2 log s^2| bound");

    CommonFlags dot_flags;
    std::string dot_out;
    CLI::App* export_dot = app.add_subcommand("export-dot", "write the graph in DOT format");
    add_common(export_dot, dot_flags, false);
    export_dot->add_option("--dot-out", dot_out, "output file ('-' for stdout, the default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Fold CLI11's many parse-error codes into the documented exit code 1
        // (help/version exits stay 0).
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) {
            json cfg = merge_config(solve_flags);
            if (!compare_path.empty()) cfg["compare"] = compare_path;
            return graphlog::run_solve(cfg);
        }
        if (exhaustion->parsed()) {
            json cfg = merge_config(ex_flags);
            if (!radii_text.empty()) cfg["radii"] = parse_radii(radii_text);
            if (center >= 0) cfg["center"] = center;
            return graphlog::run_exhaustion(cfg);
        }
        if (verify->parsed()) {
            json cfg = merge_config(verify_flags);
            cfg["target"] = verify_target;
            if (verify_n >= 0.0) cfg["n"] = static_cast<std::int64_t>(verify_n);
            if (crossing_budget >= 0.0)
                cfg["crossing_budget"] = static_cast<std::int64_t>(crossing_budget);
            if (!verify_eps.empty()) cfg["epsilons"] = verify_eps;
            return graphlog::run_verify(cfg);
        }
        if (export_dot->parsed()) {
            json cfg = merge_config(dot_flags);
            if (!dot_out.empty()) cfg["out"] = dot_out;
            return graphlog::run_export_dot(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

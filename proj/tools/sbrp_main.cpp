// Command line front end: solve, sweep, oracle and bench subcommands over
// the instance formats described in the README.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbrp/errors.hpp"
#include "sbrp/instance_io.hpp"
#include "sbrp/pipeline.hpp"
#include "sbrp/shareability.hpp"

namespace {

struct CommonParams {
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<int> nmax;
    double virtual_walk_m = 0.5 * sbrp::kMetersPerMile;
    bool exact_tsp = false;
    int exact_tsp_limit = 12;
    std::size_t trip_cap = 5'000'000;
    double time_limit_s = 3600.0;
    double gap = 0.0;
    std::string solver = "internal";
    bool no_node_compression = false;
    std::string format;  // empty: guess from extension
};

void add_common_options(CLI::App* cmd, CommonParams& p) {
    cmd->add_option("--format", p.format,
                    "instance format: native-json, bps-csv or euclidean-schittekat "
                    "(default: by extension)");
    cmd->add_option("--beta", p.beta, "edge compression budget factor (> 1)");
    cmd->add_option("--gamma", p.gamma, "quasi-clique growth tolerance in [0, 1)");
    cmd->add_option("--nmax", p.nmax, "split stops to at most this many students");
    cmd->add_option("--virtual-walk", p.virtual_walk_m,
                    "door-to-door aggregation radius in meters (default 0.5 mile)");
    cmd->add_flag("--exact-tsp", p.exact_tsp, "exact route evaluation for small trips");
    cmd->add_option("--exact-tsp-limit", p.exact_tsp_limit,
                    "largest trip solved exactly (default 12)");
    cmd->add_option("--trip-cap", p.trip_cap, "abort when the bus trip list exceeds this");
    cmd->add_option("--time-limit", p.time_limit_s, "assignment solver time limit in seconds");
    cmd->add_option("--gap", p.gap, "acceptable relative optimality gap (default 0)");
    cmd->add_option("--solver", p.solver, "internal or external:<command>");
    cmd->add_flag("--no-node-compression", p.no_node_compression,
                  "route students door-to-door without stop selection");
}

sbrp::SolveParams to_solve_params(const CommonParams& p) {
    sbrp::SolveParams sp;
    sp.beta = p.beta;
    sp.gamma = p.gamma;
    sp.split_cap = p.nmax;
    sp.virtual_walk_m = p.virtual_walk_m;
    sp.node_compression = !p.no_node_compression;
    sp.exact_tsp = p.exact_tsp;
    sp.exact_tsp_limit = p.exact_tsp_limit;
    sp.trip_cap = p.trip_cap;
    sp.time_limit_s = p.time_limit_s;
    sp.gap_limit = p.gap;
    sp.solver = p.solver;
    return sp;
}

sbrp::Instance load(const std::string& path, const std::string& format) {
    if (format.empty()) return sbrp::load_instance(path);
    if (format == "native-json") return sbrp::load_instance(path, sbrp::InstanceFormat::kNativeJson);
    if (format == "bps-csv") return sbrp::load_instance(path, sbrp::InstanceFormat::kBpsCsv);
    if (format == "euclidean-schittekat")
        return sbrp::load_instance(path, sbrp::InstanceFormat::kEuclideanSchittekat);
    throw sbrp::ValidationError("unknown format '" + format + "'");
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sbrp::Error(path + ": cannot open for writing");
    out << body;
}

int run_solve(const std::string& path, const CommonParams& common,
              const std::vector<std::string>& emits, const std::string& dump_network,
              const std::string& dump_trips_path) {
    const sbrp::Instance instance = load(path, common.format);
    const sbrp::SolveParams params = to_solve_params(common);

    if (!dump_network.empty() || !dump_trips_path.empty()) {
        // Re-run the front of the pipeline to export the requested stages.
        const sbrp::Metric metric = sbrp::compute_metric(instance);
        sbrp::StopPlan plan = params.node_compression
                                  ? sbrp::select_stops(instance, metric, params.virtual_walk_m)
                                  : sbrp::door_to_door_plan(instance);
        if (params.split_cap) plan = sbrp::split_stops(plan, *params.split_cap);
        sbrp::ShareabilityNetwork net = sbrp::build_network(
            instance, metric, plan, sbrp::default_pair_check(instance, metric));
        if (params.beta)
            net = sbrp::prune_edges(net, metric, instance.school, *params.beta,
                                    instance.capacity);
        if (!dump_network.empty()) {
            write_file(dump_network + ".edges", sbrp::network_to_edge_list(net));
            write_file(dump_network + ".graphml", sbrp::network_to_graphml(net));
        }
        if (!dump_trips_path.empty()) {
            sbrp::EnumerateOptions eo;
            eo.gamma = params.gamma;
            eo.tsp = sbrp::TspOptions{params.exact_tsp, params.exact_tsp_limit};
            eo.trip_cap = params.trip_cap;
            write_file(dump_trips_path,
                       sbrp::dump_trips(sbrp::enumerate_trips(net, instance, metric, eo)));
        }
    }

    const sbrp::Solution solution = sbrp::solve(instance, params);
    std::cout << sbrp::solution_to_text_table(solution);

    for (const std::string& spec : emits) {
        const std::size_t colon = spec.find(':');
        if (colon == std::string::npos)
            throw sbrp::ValidationError("--emit wants <format>:<path>, got '" + spec + "'");
        sbrp::emit(solution, instance, sbrp::parse_emit_format(spec.substr(0, colon)),
                   spec.substr(colon + 1));
    }
    return 0;
}

int run_oracle(const std::string& path, const CommonParams& common) {
    const sbrp::Instance instance = load(path, common.format);
    const sbrp::Solution solution = sbrp::brute_force_oracle(
        instance, sbrp::TspOptions{common.exact_tsp, common.exact_tsp_limit});
    std::cout << sbrp::solution_to_text_table(solution);
    return 0;
}

int run_sweep(const std::string& path, const CommonParams& common, const std::string& param_name,
              std::vector<double> values, double from, double to, double step,
              const std::string& out_csv) {
    const sbrp::Instance instance = load(path, common.format);
    sbrp::SweepParam param;
    if (param_name == "beta") param = sbrp::SweepParam::kBeta;
    else if (param_name == "gamma") param = sbrp::SweepParam::kGamma;
    else throw sbrp::ValidationError("--param must be beta or gamma");

    if (values.empty()) {
        if (!(step > 0.0)) throw sbrp::ValidationError("--step must be > 0");
        for (double v = from; v <= to + 1e-12; v += step) values.push_back(v);
    }
    const std::vector<sbrp::SweepRow> rows =
        sbrp::sweep(instance, param, values, to_solve_params(common));
    std::cout << sbrp::sweep_to_text(rows, param);
    if (!out_csv.empty()) write_file(out_csv, sbrp::sweep_to_csv(rows, param));
    return 0;
}

int run_bench(const std::string& dir, const CommonParams& common) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw sbrp::Error(dir + ": no instance files");

    int failures = 0;
    bool first = true;
    for (const std::string& file : files) {
        try {
            const sbrp::Instance instance = load(file, common.format);
            const sbrp::Solution solution = sbrp::solve(instance, to_solve_params(common));
            std::string table = sbrp::solution_to_text_table(solution);
            if (!first) {
                // keep one shared header line
                const std::size_t nl = table.find('\n');
                table = table.substr(nl + 1);
            }
            std::cout << table;
            first = false;
        } catch (const sbrp::Error& e) {
            std::cerr << file << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"school bus routing via shareability-network decomposition"};
    app.require_subcommand(1);

    CommonParams common;
    std::string instance_path, dir_path;
    std::vector<std::string> emits;
    std::string dump_network, dump_trips_path;
    std::string sweep_param;
    std::vector<double> sweep_values;
    double sweep_from = 0.0, sweep_to = 0.0, sweep_step = 0.0;
    std::string sweep_csv;

    CLI::App* solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("instance", instance_path, "instance file")->required();
    add_common_options(solve, common);
    solve->add_option("--emit", emits, "write a report: <format>:<path> (repeatable)");
    solve->add_option("--dump-network", dump_network,
                      "write <base>.edges and <base>.graphml of the shareability network");
    solve->add_option("--dump-trips", dump_trips_path, "write the sorted trip list");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "re-solve across a parameter grid");
    sweep_cmd->add_option("instance", instance_path, "instance file")->required();
    add_common_options(sweep_cmd, common);
    sweep_cmd->add_option("--param", sweep_param, "beta or gamma")->required();
    sweep_cmd->add_option("--values", sweep_values, "explicit grid values");
    sweep_cmd->add_option("--from", sweep_from, "grid start");
    sweep_cmd->add_option("--to", sweep_to, "grid end (inclusive)");
    sweep_cmd->add_option("--step", sweep_step, "grid step");
    sweep_cmd->add_option("--out", sweep_csv, "also write the rows as CSV");

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive reference (<= 10 students)");
    oracle->add_option("instance", instance_path, "instance file")->required();
    add_common_options(oracle, common);

    CLI::App* bench = app.add_subcommand("bench", "solve every instance in a directory");
    bench->add_option("dir", dir_path, "directory of instance files")->required();
    add_common_options(bench, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return run_solve(instance_path, common, emits, dump_network, dump_trips_path);
        if (sweep_cmd->parsed())
            return run_sweep(instance_path, common, sweep_param, sweep_values, sweep_from,
                             sweep_to, sweep_step, sweep_csv);
        if (oracle->parsed()) return run_oracle(instance_path, common);
        if (bench->parsed()) return run_bench(dir_path, common);
    } catch (const sbrp::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

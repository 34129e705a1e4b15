#ifndef SBRP_PIPELINE_HPP
#define SBRP_PIPELINE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbrp/instance.hpp"
#include "sbrp/metric.hpp"
#include "sbrp/set_cover.hpp"
#include "sbrp/stop_selection.hpp"
#include "sbrp/trips.hpp"

namespace sbrp {

struct SolveParams {
    std::optional<double> beta;       // edge compression budget factor (> 1)
    std::optional<double> gamma;      // quasi-clique growth tolerance [0, 1)
    std::optional<int> split_cap;     // split stops to at most this many students
    double virtual_walk_m = 0.5 * kMetersPerMile;  // door-to-door aggregation radius
    bool node_compression = true;     // off: one network node per student
    bool exact_tsp = false;
    int exact_tsp_limit = 12;
    std::size_t trip_cap = 5'000'000;
    double time_limit_s = 3600.0;
    double gap_limit = 0.0;
    std::string solver = "internal";  // or "external:<command>"
};

struct StageTimes {
    double metric_s = 0.0;
    double stops_s = 0.0;
    double network_s = 0.0;
    double trips_s = 0.0;
    double cover_s = 0.0;
    double total_s = 0.0;
};

struct Diagnostics {
    std::string instance;
    int students = 0;
    int door_to_door = 0;
    int stops = 0;              // selected stops after any splitting
    std::size_t bus_trips = 0;  // enumerated feasible bus trips
    std::optional<double> beta;
    std::optional<double> gamma;
    std::string solver_status;
    double cover_objective = 0.0;  // before partition repair
    double lower_bound = 0.0;
    double gap = 0.0;
    StageTimes times;  // informational; excluded from equality and JSON

    bool operator==(const Diagnostics& o) const {
        return instance == o.instance && students == o.students &&
               door_to_door == o.door_to_door && stops == o.stops &&
               bus_trips == o.bus_trips && beta == o.beta && gamma == o.gamma &&
               solver_status == o.solver_status && cover_objective == o.cover_objective &&
               lower_bound == o.lower_bound && gap == o.gap;
    }
};

struct ManifestEntry {
    NodeId stop = -1;      // planned stop id (split clones keep fresh ids)
    NodeId location = -1;  // network node of the stop
    std::vector<StudentId> students;

    bool operator==(const ManifestEntry&) const = default;
};

struct BusRoute {
    TripConfiguration trip;              // actual loads after assignment
    std::vector<ManifestEntry> manifest; // in route order

    bool operator==(const BusRoute&) const = default;
};

struct Solution {
    std::vector<BusRoute> bus_routes;
    std::vector<std::pair<StudentId, std::string>> alt_assignments;  // sorted by student
    double total_cost = 0.0;
    int bus_count = 0;
    int students_alt = 0;
    Diagnostics diagnostics;

    bool operator==(const Solution&) const = default;
};

// Full run: metric → stop selection (unless node compression is off) →
// optional stop splitting → shareability network → optional edge pruning →
// trip enumeration → set-cover assignment → partition repair.
// Throws InfeasibleError when no assignment exists (or the fleet limit is
// exceeded); stage errors propagate.
Solution solve(const Instance& instance, const SolveParams& params = {});

// Splits every stop with more than n_max students into co-located clones
// of at most n_max students each, reassigning students in id order.
StopPlan split_stops(const StopPlan& plan, int n_max);

// Exhaustive reference: minimizes over all partitions of the students into
// feasible bus trips and per-student alternate rides, using the same route
// evaluator as the pipeline. Guarded to at most 10 students.
Solution brute_force_oracle(const Instance& instance, const TspOptions& tsp = {});

enum class SweepParam { kBeta, kGamma };

struct SweepRow {
    double value = 0.0;
    double objective = 0.0;
    int buses = 0;
    std::size_t bus_trips = 0;
    double runtime_s = 0.0;
};

// Re-solves the instance across the grid of beta or gamma values.
std::vector<SweepRow> sweep(const Instance& instance, SweepParam param,
                            const std::vector<double>& grid, SolveParams base = {});
std::string sweep_to_text(const std::vector<SweepRow>& rows, SweepParam param);
std::string sweep_to_csv(const std::vector<SweepRow>& rows, SweepParam param);

// --- report emission --------------------------------------------------------

enum class EmitFormat { kTextTable, kJson, kGeoJson, kSvg };

// Parses "json", "geojson", "svg", "table"/"text-table".
EmitFormat parse_emit_format(const std::string& name);

void emit(const Solution& solution, const Instance& instance, EmitFormat format,
          const std::string& path);

std::string solution_to_json(const Solution& solution);
Solution solution_from_json(const std::string& text);
std::string solution_to_text_table(const Solution& solution);
std::string solution_to_geojson(const Solution& solution, const Instance& instance);
std::string solution_to_svg(const Solution& solution, const Instance& instance);

}  // namespace sbrp

#endif

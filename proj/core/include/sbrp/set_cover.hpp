#ifndef SBRP_SET_COVER_HPP
#define SBRP_SET_COVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sbrp {

struct CoverSet {
    int id = -1;                 // caller's id (e.g. trip index), unique
    std::vector<int> elements;   // sorted element indexes
    double weight = 0.0;         // >= 0
};

// Weighted set cover: pick sets covering every element at minimum total
// weight. Elements are dense indexes 0..num_elements-1; element_names are
// used in diagnostics only.
struct CoverProblem {
    int num_elements = 0;
    std::vector<std::string> element_names;
    std::vector<CoverSet> sets;

    std::string element_name(int e) const;
};

enum class CoverStatus { kOptimal, kFeasibleGap, kInfeasible };

struct CoverSolution {
    std::vector<int> chosen;    // set ids, sorted
    double objective = 0.0;
    CoverStatus status = CoverStatus::kInfeasible;
    double gap = 0.0;           // (incumbent - best bound) / incumbent
    double lower_bound = 0.0;   // root relaxation bound
    std::vector<double> incumbent_history;
    std::int64_t nodes_explored = 0;
    std::string message;        // infeasible: names an uncoverable element
};

struct SolveCoverOptions {
    double time_limit_s = 3600.0;
    double gap_limit = 0.0;                   // 0 = prove optimality
    std::vector<int> forced_in;               // set ids fixed to 1
    std::vector<int> forced_out;              // set ids fixed to 0
    std::optional<double> target_objective;   // stop once incumbent <= target
};

// Exact branch-and-bound. Lower bounds come from a dual-ascent relaxation,
// the initial incumbent from the greedy heuristic; depth-first dives with
// best-bound restarts. Fully deterministic.
CoverSolution solve_cover(const CoverProblem& problem, const SolveCoverOptions& options = {});
CoverSolution solve_cover(const CoverProblem& problem, double time_limit_s, double gap_limit);

struct GreedyCover {
    std::vector<int> chosen;  // set ids in pick order
    double cost = 0.0;
    bool feasible = false;
};

// Classic ratio greedy: repeatedly picks the set minimizing
// weight / newly-covered, ties by id.
GreedyCover greedy_cover(const CoverProblem& problem);

// Valid lower bound on the cover LP via single-pass dual ascent.
double dual_ascent_bound(const CoverProblem& problem);

// --- partition repair ------------------------------------------------------

// Shrinks chosen set `set_id` so it covers exactly `remaining` (a nonempty
// subset of its elements). Returns the replacement's id and weight, or
// nullopt when no feasible replacement exists. Implementations typically
// look the reduced trip up in the stored trip list and fall back to
// re-evaluating the reduced route.
using ShrinkFn = std::function<std::optional<std::pair<int, double>>(
    int set_id, const std::vector<int>& remaining)>;

struct PartitionRepair {
    CoverSolution solution;         // covers every element exactly once
    std::vector<int> element_set;   // element index -> chosen set id
};

// Turns a (possibly overlapping) cover into a partition without increasing
// the objective: while two chosen sets overlap, the one with the higher
// per-element cost loses the overlap and is replaced by its shrunk form;
// if shrinking fails the loser's remaining elements are split into
// singletons.
PartitionRepair repair_to_partition(const CoverProblem& problem,
                                    const CoverSolution& solution,
                                    const ShrinkFn& shrink);

// --- LP-format plug point ---------------------------------------------------

// CPLEX-LP text with variables y<set id> and one >=1 row per element.
std::string cover_to_lp(const CoverProblem& problem);
void save_lp(const CoverProblem& problem, const std::string& path);
CoverProblem cover_from_lp(const std::string& text);
CoverProblem load_lp(const std::string& path);

// Runs `command <lp-path>` and reads the assignment from its stdout:
// an optional line "status optimal|feasible|infeasible" followed by
// "y<id> <value>" lines (values >= 0.5 select the set). The reported gap
// is computed against this library's own dual-ascent bound.
CoverSolution solve_cover_external(const CoverProblem& problem, const std::string& command);

}  // namespace sbrp

#endif

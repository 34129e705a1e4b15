#include "sbrp/set_cover.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <unistd.h>

#include "sbrp/errors.hpp"

namespace sbrp {

namespace {

using Clock = std::chrono::steady_clock;

struct Prepared {
    int n = 0;
    int words = 0;
    std::vector<int> ids;                        // internal idx -> caller id
    std::vector<double> weight;
    std::vector<std::vector<int>> elems;         // per set, sorted unique
    std::vector<std::vector<std::uint64_t>> mask;
    std::vector<std::vector<int>> covers;        // per element: set idxs
    std::vector<std::uint64_t> full;
};

bool mask_get(const std::vector<std::uint64_t>& m, int e) {
    return (m[e >> 6] >> (e & 63)) & 1u;
}

void mask_set(std::vector<std::uint64_t>& m, int e) { m[e >> 6] |= 1ull << (e & 63); }

void mask_or(std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    for (std::size_t w = 0; w < a.size(); ++w) a[w] |= b[w];
}

int mask_new_count(const std::vector<std::uint64_t>& set_mask,
                   const std::vector<std::uint64_t>& covered) {
    int c = 0;
    for (std::size_t w = 0; w < set_mask.size(); ++w)
        c += std::popcount(set_mask[w] & ~covered[w]);
    return c;
}

Prepared prepare(const CoverProblem& p) {
    Prepared prep;
    prep.n = p.num_elements;
    if (prep.n < 0) throw ValidationError("num_elements must be >= 0");
    prep.words = (prep.n + 63) / 64;

    std::vector<std::size_t> order(p.sets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p.sets[a].id < p.sets[b].id;
    });

    std::set<int> seen;
    prep.covers.assign(prep.n, {});
    for (std::size_t k : order) {
        const CoverSet& s = p.sets[k];
        if (!seen.insert(s.id).second)
            throw ValidationError("duplicate set id " + std::to_string(s.id));
        if (s.weight < 0.0)
            throw ValidationError("set " + std::to_string(s.id) + " has negative weight");
        std::vector<int> es = s.elements;
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        std::vector<std::uint64_t> m(prep.words, 0);
        for (int e : es) {
            if (e < 0 || e >= prep.n)
                throw ValidationError("set " + std::to_string(s.id) + " references element " +
                                      std::to_string(e) + " out of range");
            mask_set(m, e);
        }
        const int idx = static_cast<int>(prep.ids.size());
        prep.ids.push_back(s.id);
        prep.weight.push_back(s.weight);
        prep.elems.push_back(std::move(es));
        prep.mask.push_back(std::move(m));
        for (int e : prep.elems.back()) prep.covers[e].push_back(idx);
    }
    prep.full.assign(prep.words, 0);
    for (int e = 0; e < prep.n; ++e) mask_set(prep.full, e);
    return prep;
}

struct Ascent {
    double bound = 0.0;
    bool infeasible = false;
    std::vector<double> slack;
};

// Single-pass dual ascent over uncovered elements, scarcest element first.
Ascent dual_ascent(const Prepared& prep, const std::vector<std::uint8_t>& active,
                   const std::vector<std::uint64_t>& covered) {
    Ascent a;
    a.slack = prep.weight;
    std::vector<int> uncovered;
    std::vector<int> counts(prep.n, 0);
    for (int e = 0; e < prep.n; ++e) {
        if (mask_get(covered, e)) continue;
        int c = 0;
        for (int j : prep.covers[e])
            if (active[j]) ++c;
        if (c == 0) {
            a.infeasible = true;
            return a;
        }
        counts[e] = c;
        uncovered.push_back(e);
    }
    std::sort(uncovered.begin(), uncovered.end(), [&](int x, int y) {
        if (counts[x] != counts[y]) return counts[x] < counts[y];
        return x < y;
    });
    for (int e : uncovered) {
        double delta = std::numeric_limits<double>::infinity();
        for (int j : prep.covers[e])
            if (active[j]) delta = std::min(delta, a.slack[j]);
        a.bound += delta;
        for (int j : prep.covers[e])
            if (active[j]) a.slack[j] -= delta;
    }
    return a;
}

struct GreedyPick {
    double cost = 0.0;
    std::vector<int> picks;  // internal idxs
    bool ok = false;
};

GreedyPick greedy_residual(const Prepared& prep, const std::vector<std::uint8_t>& active,
                           std::vector<std::uint64_t> covered) {
    GreedyPick g;
    while (covered != prep.full) {
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < prep.ids.size(); ++j) {
            if (!active[j]) continue;
            const int nc = mask_new_count(prep.mask[j], covered);
            if (nc == 0) continue;
            const double ratio = prep.weight[j] / nc;
            if (ratio < best_ratio) {
                best_ratio = ratio;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) return g;  // uncoverable
        g.picks.push_back(best);
        g.cost += prep.weight[best];
        mask_or(covered, prep.mask[best]);
    }
    g.ok = true;
    return g;
}

// Branch variable: among relaxation-tight sets, the one whose surrogate
// fractional value is closest to 0.5.
int pick_branch(const Prepared& prep, const std::vector<std::uint8_t>& active,
                const std::vector<std::uint64_t>& covered, const Ascent& ascent) {
    std::vector<std::uint8_t> tight(prep.ids.size(), 0);
    for (std::size_t j = 0; j < prep.ids.size(); ++j)
        if (active[j] && ascent.slack[j] <= 1e-9 * (1.0 + prep.weight[j]) &&
            mask_new_count(prep.mask[j], covered) > 0)
            tight[j] = 1;

    std::vector<int> tight_count(prep.n, 0);
    for (int e = 0; e < prep.n; ++e) {
        if (mask_get(covered, e)) continue;
        for (int j : prep.covers[e])
            if (tight[j]) ++tight_count[e];
    }

    int best = -1, best_new = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < prep.ids.size(); ++j) {
        if (!tight[j]) continue;
        double sum = 0.0;
        int cnt = 0;
        for (int e : prep.elems[j]) {
            if (mask_get(covered, e) || tight_count[e] == 0) continue;
            sum += 1.0 / tight_count[e];
            ++cnt;
        }
        if (cnt == 0) continue;
        const double score = std::abs(sum / cnt - 0.5);
        const int nc = mask_new_count(prep.mask[j], covered);
        if (score < best_score || (score == best_score && nc > best_new)) {
            best_score = score;
            best = static_cast<int>(j);
            best_new = nc;
        }
    }
    if (best >= 0) return best;

    // Fallback: best coverage per unit weight.
    double best_ratio = -1.0;
    for (std::size_t j = 0; j < prep.ids.size(); ++j) {
        if (!active[j]) continue;
        const int nc = mask_new_count(prep.mask[j], covered);
        if (nc == 0) continue;
        const double ratio = nc / std::max(prep.weight[j], 1e-12);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = static_cast<int>(j);
        }
    }
    return best;
}

struct OpenNode {
    double bound;
    std::uint64_t seq;
    std::vector<int> in;   // internal idxs
    std::vector<int> out;
};

struct OpenNodeCmp {
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.seq > b.seq;
    }
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string CoverProblem::element_name(int e) const {
    if (e >= 0 && e < static_cast<int>(element_names.size()) && !element_names[e].empty())
        return element_names[e];
    return "element " + std::to_string(e);
}

GreedyCover greedy_cover(const CoverProblem& problem) {
    const Prepared prep = prepare(problem);
    std::vector<std::uint8_t> active(prep.ids.size(), 1);
    std::vector<std::uint64_t> covered(prep.words, 0);
    GreedyPick g = greedy_residual(prep, active, covered);
    GreedyCover out;
    out.feasible = g.ok;
    out.cost = g.cost;
    for (int j : g.picks) out.chosen.push_back(prep.ids[j]);
    return out;
}

double dual_ascent_bound(const CoverProblem& problem) {
    const Prepared prep = prepare(problem);
    std::vector<std::uint8_t> active(prep.ids.size(), 1);
    std::vector<std::uint64_t> covered(prep.words, 0);
    const Ascent a = dual_ascent(prep, active, covered);
    return a.infeasible ? std::numeric_limits<double>::infinity() : a.bound;
}

CoverSolution solve_cover(const CoverProblem& problem, double time_limit_s, double gap_limit) {
    SolveCoverOptions opts;
    opts.time_limit_s = time_limit_s;
    opts.gap_limit = gap_limit;
    return solve_cover(problem, opts);
}

CoverSolution solve_cover(const CoverProblem& problem, const SolveCoverOptions& options) {
    const Prepared prep = prepare(problem);
    const auto t_start = Clock::now();
    const auto expired = [&] {
        return std::chrono::duration<double>(Clock::now() - t_start).count() >
               options.time_limit_s;
    };

    CoverSolution sol;

    std::map<int, int> id_to_idx;
    for (std::size_t j = 0; j < prep.ids.size(); ++j) id_to_idx[prep.ids[j]] = static_cast<int>(j);
    OpenNode root{0.0, 0, {}, {}};
    for (int id : options.forced_in) {
        auto it = id_to_idx.find(id);
        if (it == id_to_idx.end())
            throw ValidationError("forced_in: unknown set id " + std::to_string(id));
        root.in.push_back(it->second);
    }
    for (int id : options.forced_out) {
        auto it = id_to_idx.find(id);
        if (it == id_to_idx.end())
            throw ValidationError("forced_out: unknown set id " + std::to_string(id));
        root.out.push_back(it->second);
    }

    // Root feasibility: every element needs at least one selectable set.
    {
        std::vector<std::uint8_t> out_flag(prep.ids.size(), 0);
        for (int j : root.out) out_flag[j] = 1;
        for (int e = 0; e < prep.n; ++e) {
            bool any = false;
            for (int j : prep.covers[e])
                if (!out_flag[j]) {
                    any = true;
                    break;
                }
            if (!any) {
                sol.status = CoverStatus::kInfeasible;
                sol.message = problem.element_name(e) + " is not covered by any set";
                return sol;
            }
        }
    }

    double inc_cost = std::numeric_limits<double>::infinity();
    std::vector<int> inc_sets;
    const auto try_incumbent = [&](double cost, const std::vector<int>& sets_idx) {
        if (cost < inc_cost) {
            inc_cost = cost;
            inc_sets = sets_idx;
            sol.incumbent_history.push_back(cost);
        }
    };
    const auto target_met = [&] {
        return options.target_objective && inc_cost <= *options.target_objective + 1e-9;
    };

    std::uint64_t seq = 1;
    std::priority_queue<OpenNode, std::vector<OpenNode>, OpenNodeCmp> open;
    open.push(root);

    double root_bound = -1.0;
    bool proven = false;       // search space exhausted or bound met incumbent
    bool interrupted = false;  // time limit or target objective

    while (true) {
        if (open.empty()) {
            proven = true;
            break;
        }
        if (expired() || target_met()) {
            interrupted = true;
            break;
        }
        OpenNode node = open.top();
        open.pop();
        if (node.bound >= inc_cost) {
            proven = true;  // best-bound node cannot improve: done
            break;
        }
        if (options.gap_limit > 0.0 && std::isfinite(inc_cost) &&
            (inc_cost - node.bound) / std::max(std::abs(inc_cost), 1e-12) <=
                options.gap_limit) {
            open.push(std::move(node));
            interrupted = true;
            break;
        }

        // Depth-first dive from the best-bound node.
        std::vector<int> in = std::move(node.in), out = std::move(node.out);
        while (true) {
            ++sol.nodes_explored;
            std::vector<std::uint8_t> active(prep.ids.size(), 1);
            for (int j : in) active[j] = 0;
            for (int j : out) active[j] = 0;
            std::vector<std::uint64_t> covered(prep.words, 0);
            for (int j : in) mask_or(covered, prep.mask[j]);

            // Reduction: force sets that are the sole remaining cover of an
            // element.
            bool dead = false;
            for (bool changed = true; changed && !dead;) {
                changed = false;
                for (int e = 0; e < prep.n && !dead; ++e) {
                    if (mask_get(covered, e)) continue;
                    int last = -1, cnt = 0;
                    for (int j : prep.covers[e]) {
                        if (!active[j]) continue;
                        ++cnt;
                        last = j;
                        if (cnt > 1) break;
                    }
                    if (cnt == 0) dead = true;
                    else if (cnt == 1) {
                        in.push_back(last);
                        active[last] = 0;
                        mask_or(covered, prep.mask[last]);
                        changed = true;
                    }
                }
            }
            if (dead) break;

            double cost_in = 0.0;
            for (int j : in) cost_in += prep.weight[j];

            if (covered == prep.full) {
                try_incumbent(cost_in, in);
                break;
            }
            if (cost_in >= inc_cost) break;

            const Ascent ascent = dual_ascent(prep, active, covered);
            if (ascent.infeasible) break;
            const double lb = cost_in + ascent.bound;
            if (root_bound < 0.0) root_bound = lb;
            if (lb >= inc_cost) break;

            GreedyPick g = greedy_residual(prep, active, covered);
            if (g.ok) {
                std::vector<int> full_sets = in;
                full_sets.insert(full_sets.end(), g.picks.begin(), g.picks.end());
                try_incumbent(cost_in + g.cost, full_sets);
                if (lb >= inc_cost) break;
            }
            if (target_met() || expired()) {
                open.push({lb, seq++, in, out});  // keep the node open for the gap
                interrupted = true;
                break;
            }

            const int branch = pick_branch(prep, active, covered, ascent);
            if (branch < 0) break;  // residual uncoverable
            OpenNode out_child{lb, seq++, in, out};
            out_child.out.push_back(branch);
            open.push(std::move(out_child));
            in.push_back(branch);
        }
        if (interrupted) break;
    }

    if (!std::isfinite(inc_cost)) {
        sol.status = CoverStatus::kInfeasible;
        sol.message = "no feasible cover under the forced assignments";
        return sol;
    }

    sol.objective = inc_cost;
    for (int j : inc_sets) sol.chosen.push_back(prep.ids[j]);
    std::sort(sol.chosen.begin(), sol.chosen.end());
    sol.chosen.erase(std::unique(sol.chosen.begin(), sol.chosen.end()), sol.chosen.end());

    double best_bound = inc_cost;
    if (!proven && !open.empty()) best_bound = std::min(best_bound, open.top().bound);
    sol.lower_bound = root_bound >= 0.0 ? root_bound : best_bound;
    if (proven) {
        sol.status = CoverStatus::kOptimal;
        sol.gap = 0.0;
    } else {
        sol.status = CoverStatus::kFeasibleGap;
        sol.gap = std::max(0.0, (inc_cost - best_bound) /
                                    std::max(std::abs(inc_cost), 1e-12));
    }
    return sol;
}

PartitionRepair repair_to_partition(const CoverProblem& problem, const CoverSolution& solution,
                                    const ShrinkFn& shrink) {
    struct WSet {
        std::vector<int> elems;  // sorted
        double weight = 0.0;
    };
    std::map<int, WSet> work;  // chosen sets, keyed by id
    {
        std::map<int, const CoverSet*> by_id;
        for (const CoverSet& s : problem.sets) by_id[s.id] = &s;
        for (int id : solution.chosen) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw ValidationError("chosen set id " + std::to_string(id) + " not in problem");
            WSet w;
            w.elems = it->second->elements;
            std::sort(w.elems.begin(), w.elems.end());
            w.elems.erase(std::unique(w.elems.begin(), w.elems.end()), w.elems.end());
            w.weight = it->second->weight;
            work.emplace(id, std::move(w));
        }
    }
    {
        std::vector<int> count(problem.num_elements, 0);
        for (auto& [id, w] : work)
            for (int e : w.elems) ++count[e];
        for (int e = 0; e < problem.num_elements; ++e)
            if (count[e] == 0)
                throw ValidationError("input solution does not cover " + problem.element_name(e));
    }

    // Cost of replacing set `id` by a cover of exactly `rem`; +inf only if
    // even the singleton fallback fails.
    const auto replacement_cost = [&](int id, const std::vector<int>& rem) {
        if (rem.empty()) return 0.0;
        if (auto r = shrink(id, rem)) return r->second;
        double c = 0.0;
        for (int e : rem) {
            auto r = shrink(id, std::vector<int>{e});
            if (!r) return std::numeric_limits<double>::infinity();
            c += r->second;
        }
        return c;
    };

    const auto install_replacement = [&](int loser_id, const std::vector<int>& remaining) {
        const auto insert_part = [&](int nid, double nw, const std::vector<int>& elems) {
            auto found = work.find(nid);
            if (found != work.end()) {
                if (found->second.elems != elems)
                    throw ValidationError("shrink produced id " + std::to_string(nid) +
                                          " clashing with a chosen set of different elements");
                return;  // identical coverage already chosen; drop the duplicate
            }
            work.emplace(nid, WSet{elems, nw});
        };
        if (remaining.empty()) return;
        if (auto r = shrink(loser_id, remaining)) {
            insert_part(r->first, r->second, remaining);
            return;
        }
        for (int e : remaining) {
            const std::vector<int> one{e};
            auto r = shrink(loser_id, one);
            if (!r)
                throw InfeasibleError("partition repair: no singleton replacement for " +
                                      problem.element_name(e));
            insert_part(r->first, r->second, one);
        }
    };

    for (;;) {
        int a_id = -1, b_id = -1;
        std::vector<int> overlap;
        for (auto ita = work.begin(); ita != work.end() && a_id < 0; ++ita) {
            for (auto itb = std::next(ita); itb != work.end(); ++itb) {
                overlap.clear();
                std::set_intersection(ita->second.elems.begin(), ita->second.elems.end(),
                                      itb->second.elems.begin(), itb->second.elems.end(),
                                      std::back_inserter(overlap));
                if (!overlap.empty()) {
                    a_id = ita->first;
                    b_id = itb->first;
                    break;
                }
            }
        }
        if (a_id < 0) break;

        const WSet& a = work.at(a_id);
        const WSet& b = work.at(b_id);
        const double marg_a = a.weight / static_cast<double>(a.elems.size());
        const double marg_b = b.weight / static_cast<double>(b.elems.size());

        int loser_id;
        if (marg_a > marg_b) loser_id = a_id;
        else if (marg_b > marg_a) loser_id = b_id;
        else {
            std::vector<int> rem_a, rem_b;
            std::set_difference(a.elems.begin(), a.elems.end(), overlap.begin(), overlap.end(),
                                std::back_inserter(rem_a));
            std::set_difference(b.elems.begin(), b.elems.end(), overlap.begin(), overlap.end(),
                                std::back_inserter(rem_b));
            const double total_lose_a = b.weight + replacement_cost(a_id, rem_a);
            const double total_lose_b = a.weight + replacement_cost(b_id, rem_b);
            if (total_lose_a < total_lose_b) loser_id = a_id;
            else if (total_lose_b < total_lose_a) loser_id = b_id;
            else loser_id = std::max(a_id, b_id);
        }

        const WSet loser = work.at(loser_id);
        std::vector<int> remaining;
        std::set_difference(loser.elems.begin(), loser.elems.end(), overlap.begin(), overlap.end(),
                            std::back_inserter(remaining));
        work.erase(loser_id);
        install_replacement(loser_id, remaining);
    }

    PartitionRepair out;
    out.element_set.assign(problem.num_elements, -1);
    double objective = 0.0;
    for (auto& [id, w] : work) {
        out.solution.chosen.push_back(id);
        objective += w.weight;
        for (int e : w.elems) {
            if (out.element_set[e] != -1)
                throw ValidationError("partition repair left " + problem.element_name(e) +
                                      " covered twice");
            out.element_set[e] = id;
        }
    }
    for (int e = 0; e < problem.num_elements; ++e)
        if (out.element_set[e] == -1)
            throw ValidationError("partition repair left " + problem.element_name(e) +
                                  " uncovered");
    out.solution.objective = objective;
    out.solution.status = solution.status;
    out.solution.gap = solution.gap;
    out.solution.lower_bound = solution.lower_bound;
    out.solution.incumbent_history = solution.incumbent_history;
    out.solution.nodes_explored = solution.nodes_explored;
    return out;
}

std::string cover_to_lp(const CoverProblem& problem) {
    const Prepared prep = prepare(problem);
    std::ostringstream out;
    out << "\\ weighted set cover (" << prep.n << " elements, " << prep.ids.size() << " sets)\n";
    out << "Minimize\n obj:";
    int line_len = 5;
    const auto emit_term = [&](const std::string& term) {
        if (line_len + static_cast<int>(term.size()) > 200) {
            out << "\n   ";
            line_len = 3;
        }
        out << term;
        line_len += static_cast<int>(term.size());
    };
    for (std::size_t j = 0; j < prep.ids.size(); ++j)
        emit_term((j == 0 ? " " : " + ") + format_double(prep.weight[j]) + " y" +
                  std::to_string(prep.ids[j]));
    out << "\nSubject To\n";
    for (int e = 0; e < prep.n; ++e) {
        out << " e" << e << ":";
        line_len = 4;
        bool first = true;
        for (int j : prep.covers[e]) {
            emit_term((first ? " y" : " + y") + std::to_string(prep.ids[j]));
            first = false;
        }
        out << " >= 1\n";
    }
    out << "Binary\n";
    line_len = 0;
    for (std::size_t j = 0; j < prep.ids.size(); ++j) emit_term(" y" + std::to_string(prep.ids[j]));
    out << "\nEnd\n";
    return out.str();
}

void save_lp(const CoverProblem& problem, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << cover_to_lp(problem);
}

namespace {

bool is_keyword(const std::string& tok, const char* kw) {
    if (tok.size() != std::strlen(kw)) return false;
    for (std::size_t i = 0; i < tok.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(tok[i])) != kw[i]) return false;
    return true;
}

}  // namespace

CoverProblem cover_from_lp(const std::string& text) {
    std::vector<std::string> tokens;
    {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            const std::size_t c = line.find('\\');
            if (c != std::string::npos) line.resize(c);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
        }
    }

    enum Section { kNone, kObjective, kConstraints, kBinary };
    Section section = kNone;
    std::map<std::string, double> weights;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row_names;

    std::size_t i = 0;
    double pending_coef = 1.0;
    bool have_coef = false;
    while (i < tokens.size()) {
        const std::string& t = tokens[i];
        if (is_keyword(t, "minimize") || is_keyword(t, "min")) {
            section = kObjective;
            ++i;
            continue;
        }
        if (i + 1 < tokens.size() && is_keyword(t, "subject") && is_keyword(tokens[i + 1], "to")) {
            section = kConstraints;
            i += 2;
            continue;
        }
        if (is_keyword(t, "st") || is_keyword(t, "s.t.")) {
            section = kConstraints;
            ++i;
            continue;
        }
        if (is_keyword(t, "binary") || is_keyword(t, "binaries") || is_keyword(t, "bin")) {
            section = kBinary;
            ++i;
            continue;
        }
        if (is_keyword(t, "end")) break;

        switch (section) {
            case kObjective: {
                if (t.back() == ':') {
                    ++i;
                    break;
                }
                if (t == "+") {
                    ++i;
                    break;
                }
                if (t[0] == 'y') {
                    weights[t] = have_coef ? pending_coef : 1.0;
                    have_coef = false;
                    ++i;
                    break;
                }
                try {
                    pending_coef = std::stod(t);
                    have_coef = true;
                } catch (const std::exception&) {
                    throw ParseError("lp: unexpected objective token '" + t + "'");
                }
                ++i;
                break;
            }
            case kConstraints: {
                if (t.back() == ':') {
                    rows.emplace_back();
                    row_names.push_back(t.substr(0, t.size() - 1));
                    ++i;
                    break;
                }
                if (rows.empty()) {
                    rows.emplace_back();
                    row_names.push_back("e0");
                }
                if (t == "+") {
                    ++i;
                    break;
                }
                if (t == ">=" || t == ">") {
                    if (i + 1 >= tokens.size()) throw ParseError("lp: constraint missing rhs");
                    if (std::stod(tokens[i + 1]) != 1.0)
                        throw ParseError("lp: only >= 1 cover rows are supported");
                    i += 2;
                    break;
                }
                if (t[0] == 'y') {
                    rows.back().push_back(t);
                    ++i;
                    break;
                }
                if (t == "1") {  // explicit unit coefficient
                    ++i;
                    break;
                }
                throw ParseError("lp: unexpected constraint token '" + t + "'");
            }
            case kBinary:
                ++i;
                break;
            case kNone:
                throw ParseError("lp: token '" + t + "' before any section");
        }
    }

    CoverProblem p;
    p.num_elements = static_cast<int>(rows.size());
    p.element_names = row_names;
    std::map<int, CoverSet> sets;  // keyed by id
    const auto set_of = [&](const std::string& var) -> CoverSet& {
        int id;
        try {
            id = std::stoi(var.substr(1));
        } catch (const std::exception&) {
            throw ParseError("lp: variable '" + var + "' is not of the form y<int>");
        }
        auto [it, inserted] = sets.try_emplace(id);
        if (inserted) it->second.id = id;
        return it->second;
    };
    for (auto& [var, w] : weights) set_of(var).weight = w;
    for (std::size_t e = 0; e < rows.size(); ++e)
        for (const std::string& var : rows[e]) set_of(var).elements.push_back(static_cast<int>(e));
    for (auto& [id, s] : sets) p.sets.push_back(s);
    return p;
}

CoverProblem load_lp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return cover_from_lp(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

CoverSolution solve_cover_external(const CoverProblem& problem, const std::string& command) {
    char tmpl[] = "/tmp/sbrp_cover_XXXXXX.lp";
    const int fd = mkstemps(tmpl, 3);
    if (fd < 0) throw Error("cannot create temporary LP file");
    close(fd);
    const std::string lp_path = tmpl;
    save_lp(problem, lp_path);

    const std::string cmdline = command + " " + lp_path;
    FILE* pipe = popen(cmdline.c_str(), "r");
    if (!pipe) {
        std::remove(lp_path.c_str());
        throw Error("cannot run external solver: " + cmdline);
    }
    std::string output;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    const int rc = pclose(pipe);
    std::remove(lp_path.c_str());
    if (rc != 0) throw Error("external solver exited with status " + std::to_string(rc));

    CoverSolution sol;
    std::set<int> chosen;
    std::string declared;
    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        if (name == "status") {
            ls >> declared;
            continue;
        }
        double value = 0.0;
        if (name.size() < 2 || name[0] != 'y' || !(ls >> value)) continue;
        try {
            if (value >= 0.5) chosen.insert(std::stoi(name.substr(1)));
        } catch (const std::exception&) {
            throw ParseError("external solver: bad variable name '" + name + "'");
        }
    }

    if (declared == "infeasible") {
        sol.status = CoverStatus::kInfeasible;
        sol.message = "external solver reported infeasible";
        return sol;
    }

    std::vector<int> covered_count(problem.num_elements, 0);
    double objective = 0.0;
    for (const CoverSet& s : problem.sets) {
        if (!chosen.count(s.id)) continue;
        objective += s.weight;
        for (int e : s.elements) ++covered_count[e];
        sol.chosen.push_back(s.id);
    }
    std::sort(sol.chosen.begin(), sol.chosen.end());
    for (int e = 0; e < problem.num_elements; ++e)
        if (covered_count[e] == 0)
            throw ValidationError("external solver left " + problem.element_name(e) +
                                  " uncovered");

    sol.objective = objective;
    sol.lower_bound = dual_ascent_bound(problem);
    sol.gap = std::max(0.0, (objective - sol.lower_bound) /
                                std::max(std::abs(objective), 1e-12));
    sol.status = declared == "optimal" ? CoverStatus::kOptimal : CoverStatus::kFeasibleGap;
    if (sol.status == CoverStatus::kOptimal) sol.gap = 0.0;
    return sol;
}

}  // namespace sbrp

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "liftplan/lifted.hpp"

namespace liftplan {

/// Heuristic value signalling a dead end; such nodes are pruned.
inline constexpr double kDeadEnd = std::numeric_limits<double>::infinity();

class StateHeuristic {
 public:
  virtual ~StateHeuristic() = default;
  virtual double evaluate(const StateView& view) = 0;
};

/// Evaluates a state together with the action set A_s^rho of a partial action.
class ActionSetHeuristic {
 public:
  virtual ~ActionSetHeuristic() = default;
  virtual double evaluate(const StateView& view, const PartialAction& rho) = 0;
};

/// h'(s) = h(s, root).
class RootStateHeuristic final : public StateHeuristic {
 public:
  explicit RootStateHeuristic(ActionSetHeuristic& inner) : inner_(inner) {}
  double evaluate(const StateView& view) override { return inner_.evaluate(view, PartialAction::root()); }

 private:
  ActionSetHeuristic& inner_;
};

class BlindHeuristic final : public StateHeuristic, public ActionSetHeuristic {
 public:
  double evaluate(const StateView&) override { return 0.0; }
  double evaluate(const StateView&, const PartialAction&) override { return 0.0; }
};

struct SearchLimits {
  std::optional<double> time_seconds;
  std::optional<std::size_t> memory_mb;
  std::optional<std::size_t> max_expansions;
};

struct SearchStats {
  std::size_t expansions = 0;
  std::size_t evaluations = 0;
  std::size_t generated = 0;
  double wall_time = 0.0;  // seconds

  /// generated / expansions, 0 when nothing was expanded.
  double branching_factor() const {
    return expansions == 0 ? 0.0 : static_cast<double>(generated) / static_cast<double>(expansions);
  }
};

struct Plan {
  std::vector<GroundAction> actions;
  std::size_t cost() const { return actions.size(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

enum class SearchStatus { Solved, Unsolvable, ResourceExhausted };
enum class Exhaustion { Time, Memory, Expansions };

struct SearchResult {
  SearchStatus status = SearchStatus::Unsolvable;
  std::optional<Exhaustion> exhausted;
  Plan plan;
  SearchStats stats;
};

struct SearchNode {
  std::size_t state = 0;  // index into the search's state pool
  PartialAction rho;
  std::optional<std::size_t> parent;
  double h = 0.0;
  /// Action whose application produced `state`; set on root-rho nodes that
  /// change the state.
  std::optional<GroundAction> generating_action;
};

/// Walks parent links from `goal`. Keeps the fully instantiated partial
/// actions on the path, plus generating actions of state-space hops.
Plan extract_plan(const Task& task, const std::vector<SearchNode>& nodes, std::size_t goal);

/// Eager greedy best-first search over states, FIFO tie-breaking.
SearchResult gbfs_state(const Task& task, StateHeuristic& h, const SearchLimits& limits = {});

/// Greedy best-first search over <state, partial action> nodes. Nodes with a
/// single successor are expanded in place without evaluation.
SearchResult gbfs_partial(const Task& task, ActionSetHeuristic& h, const SearchLimits& limits = {});

/// Blind breadth-first search; returns shortest plans.
SearchResult bfs(const Task& task, const SearchLimits& limits = {});

bool is_goal(const Task& task, const State& state);

/// IPC format: one `(name args...)` per line, then `; cost = N (unit cost)`.
std::string plan_to_string(const Task& task, const Plan& plan);
/// Parses IPC plan text; lines starting with ';' are ignored. Throws
/// std::runtime_error on unknown actions/objects or arity mismatch.
Plan parse_plan(const Task& task, const std::string& text);

std::string to_string(SearchStatus status);
std::string to_string(Exhaustion e);

}  // namespace liftplan

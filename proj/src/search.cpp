#include "liftplan/search.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <fstream>
#include <memory>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace liftplan {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t resident_mb() {
  std::ifstream in("/proc/self/statm");
  std::size_t size = 0;
  std::size_t resident = 0;
  if (!(in >> size >> resident)) return 0;
  return resident * static_cast<std::size_t>(sysconf(_SC_PAGESIZE)) / (1024 * 1024);
}

/// Deadline, memory and expansion-cap bookkeeping shared by the searches.
class LimitGuard {
 public:
  explicit LimitGuard(const SearchLimits& limits) : limits_(limits), start_(Clock::now()) {}

  std::optional<Exhaustion> check(std::size_t expansions, bool force = false) const {
    if (limits_.max_expansions && expansions >= *limits_.max_expansions) return Exhaustion::Expansions;
    if (!force && expansions % 256 != 0) return std::nullopt;
    if (limits_.time_seconds && elapsed() >= *limits_.time_seconds) return Exhaustion::Time;
    if (limits_.memory_mb && resident_mb() >= *limits_.memory_mb) return Exhaustion::Memory;
    return std::nullopt;
  }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  SearchLimits limits_;
  Clock::time_point start_;
};

struct OpenEntry {
  double h;
  std::size_t order;
  std::size_t node;
  bool operator>(const OpenEntry& o) const { return h != o.h ? h > o.h : order > o.order; }
};

using OpenList = std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>>;

/// Node and state storage with duplicate detection on states.
class SearchSpace {
 public:
  /// Returns the pool index, or nullopt if the state was seen before.
  std::optional<std::size_t> insert_state(State s) {
    auto [it, inserted] = index_.try_emplace(s, states_.size());
    if (!inserted) return std::nullopt;
    states_.push_back(std::move(s));
    return it->second;
  }
  std::size_t add_node(SearchNode n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }
  const State& state(std::size_t i) const { return states_[i]; }
  const SearchNode& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<SearchNode>& nodes() const { return nodes_; }

 private:
  std::deque<State> states_;
  std::unordered_map<State, std::size_t, StateHash> index_;
  std::vector<SearchNode> nodes_;
};

SearchResult finish(SearchResult r, const LimitGuard& guard) {
  r.stats.wall_time = guard.elapsed();
  return r;
}

SearchResult solved(const Task& task, const SearchSpace& space, std::size_t goal, SearchStats stats,
                    const LimitGuard& guard) {
  SearchResult r;
  r.status = SearchStatus::Solved;
  r.plan = extract_plan(task, space.nodes(), goal);
  r.stats = stats;
  return finish(std::move(r), guard);
}

SearchResult exhausted(Exhaustion e, SearchStats stats, const LimitGuard& guard) {
  SearchResult r;
  r.status = SearchStatus::ResourceExhausted;
  r.exhausted = e;
  r.stats = stats;
  return finish(std::move(r), guard);
}

SearchResult unsolvable(SearchStats stats, const LimitGuard& guard) {
  SearchResult r;
  r.status = SearchStatus::Unsolvable;
  r.stats = stats;
  return finish(std::move(r), guard);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

bool is_goal(const Task& task, const State& state) {
  for (const auto& g : task.goal) {
    AtomId id = task.atom_id(g);
    bool ok = task.is_static(g.predicate) ? task.has_static_atom(id) : state.contains(id);
    if (!ok) return false;
  }
  return true;
}

Plan extract_plan(const Task& task, const std::vector<SearchNode>& nodes, std::size_t goal) {
  Plan plan;
  std::optional<std::size_t> cur = goal;
  while (cur) {
    const SearchNode& n = nodes[*cur];
    if (n.rho.is_full(task)) {
      plan.actions.push_back(n.rho.to_action());
    } else if (n.rho.is_root() && n.generating_action && n.parent &&
               nodes[*n.parent].rho.is_root()) {
      plan.actions.push_back(*n.generating_action);
    }
    cur = n.parent;
  }
  std::reverse(plan.actions.begin(), plan.actions.end());
  return plan;
}

SearchResult gbfs_state(const Task& task, StateHeuristic& h, const SearchLimits& limits) {
  LimitGuard guard(limits);
  SearchStats stats;
  SearchSpace space;
  State init = State::initial(task);
  std::size_t init_id = *space.insert_state(init);
  std::size_t root = space.add_node({init_id, PartialAction::root(), std::nullopt, 0.0, std::nullopt});
  if (is_goal(task, init)) return solved(task, space, root, stats, guard);

  double h0 = h.evaluate(StateView(task, space.state(init_id)));
  ++stats.evaluations;
  if (h0 == kDeadEnd) return unsolvable(stats, guard);

  OpenList open;
  std::size_t order = 0;
  open.push({h0, order++, root});
  while (!open.empty()) {
    if (auto e = guard.check(stats.expansions)) return exhausted(*e, stats, guard);
    OpenEntry top = open.top();
    open.pop();
    ++stats.expansions;
    const std::size_t state_id = space.node(top.node).state;
    StateView view(task, space.state(state_id));
    std::optional<std::size_t> goal_node;
    for_each_instantiation(view, PartialAction::root(), [&](const GroundAction& a) {
      ++stats.generated;
      auto succ = space.insert_state(apply_unchecked(task, space.state(state_id), a));
      if (!succ) return true;
      std::size_t id = space.add_node({*succ, PartialAction::root(), top.node, 0.0, a});
      if (is_goal(task, space.state(*succ))) {
        goal_node = id;
        return false;
      }
      double value = h.evaluate(StateView(task, space.state(*succ)));
      ++stats.evaluations;
      if (value == kDeadEnd) return true;
      open.push({value, order++, id});
      return true;
    });
    if (goal_node) return solved(task, space, *goal_node, stats, guard);
  }
  return unsolvable(stats, guard);
}

SearchResult gbfs_partial(const Task& task, ActionSetHeuristic& h, const SearchLimits& limits) {
  LimitGuard guard(limits);
  SearchStats stats;
  SearchSpace space;
  State init = State::initial(task);
  std::size_t init_id = *space.insert_state(init);
  std::size_t root = space.add_node({init_id, PartialAction::root(), std::nullopt, 0.0, std::nullopt});
  if (is_goal(task, init)) return solved(task, space, root, stats, guard);

  std::unique_ptr<StateView> view;
  std::size_t view_state = static_cast<std::size_t>(-1);
  auto view_of = [&](std::size_t state_id) -> const StateView& {
    if (!view || view_state != state_id) {
      view = std::make_unique<StateView>(task, space.state(state_id));
      view_state = state_id;
    }
    return *view;
  };

  double h0 = h.evaluate(view_of(init_id), PartialAction::root());
  ++stats.evaluations;
  if (h0 == kDeadEnd) return unsolvable(stats, guard);

  OpenList open;
  std::size_t order = 0;
  open.push({h0, order++, root});
  while (!open.empty()) {
    if (auto e = guard.check(stats.expansions)) return exhausted(*e, stats, guard);
    OpenEntry top = open.top();
    open.pop();
    ++stats.expansions;

    // Expand, collapsing single-successor chains without evaluation.
    std::size_t cur = top.node;
    while (true) {
      const SearchNode node = space.node(cur);
      if (node.rho.is_full(task)) {
        GroundAction a = node.rho.to_action();
        ++stats.generated;
        auto succ = space.insert_state(apply_unchecked(task, space.state(node.state), a));
        if (!succ) break;
        cur = space.add_node({*succ, PartialAction::root(), cur, 0.0, a});
        if (is_goal(task, space.state(*succ))) return solved(task, space, cur, stats, guard);
        continue;
      }
      const StateView& v = view_of(node.state);
      std::vector<PartialAction> kids = children(v, node.rho);
      if (kids.size() == 1) {
        ++stats.generated;
        cur = space.add_node({node.state, std::move(kids.front()), cur, 0.0, std::nullopt});
        continue;
      }
      for (auto& kid : kids) {
        ++stats.generated;
        double value = h.evaluate(v, kid);
        ++stats.evaluations;
        std::size_t id = space.add_node({node.state, std::move(kid), cur, value, std::nullopt});
        if (value == kDeadEnd) continue;
        open.push({value, order++, id});
      }
      break;
    }
  }
  return unsolvable(stats, guard);
}

SearchResult bfs(const Task& task, const SearchLimits& limits) {
  LimitGuard guard(limits);
  SearchStats stats;
  SearchSpace space;
  State init = State::initial(task);
  std::size_t init_id = *space.insert_state(init);
  std::size_t root = space.add_node({init_id, PartialAction::root(), std::nullopt, 0.0, std::nullopt});
  if (is_goal(task, init)) return solved(task, space, root, stats, guard);
  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    if (auto e = guard.check(stats.expansions)) return exhausted(*e, stats, guard);
    std::size_t n = queue.front();
    queue.pop_front();
    ++stats.expansions;
    const std::size_t state_id = space.node(n).state;
    StateView view(task, space.state(state_id));
    std::optional<std::size_t> goal_node;
    for_each_instantiation(view, PartialAction::root(), [&](const GroundAction& a) {
      ++stats.generated;
      auto succ = space.insert_state(apply_unchecked(task, space.state(state_id), a));
      if (!succ) return true;
      std::size_t id = space.add_node({*succ, PartialAction::root(), n, 0.0, a});
      if (is_goal(task, space.state(*succ))) {
        goal_node = id;
        return false;
      }
      queue.push_back(id);
      return true;
    });
    if (goal_node) return solved(task, space, *goal_node, stats, guard);
  }
  return unsolvable(stats, guard);
}

std::string plan_to_string(const Task& task, const Plan& plan) {
  std::string out;
  for (const auto& a : plan.actions) out += to_string(task, a) + "\n";
  out += "; cost = " + std::to_string(plan.cost()) + " (unit cost)\n";
  return out;
}

Plan parse_plan(const Task& task, const std::string& text) {
  Plan plan;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    auto open = line.find('(', first);
    auto close = line.find(')', first);
    if (open == std::string::npos || close == std::string::npos || close < open) {
      throw std::runtime_error("plan line " + std::to_string(lineno) + ": expected (name args...)");
    }
    std::istringstream tokens(lower(line.substr(open + 1, close - open - 1)));
    std::string name;
    tokens >> name;
    auto schema = task.find_schema(name);
    if (!schema) throw std::runtime_error("plan line " + std::to_string(lineno) + ": unknown action " + name);
    GroundAction a{*schema, {}};
    std::string arg;
    while (tokens >> arg) {
      auto obj = task.find_object(arg);
      if (!obj) throw std::runtime_error("plan line " + std::to_string(lineno) + ": unknown object " + arg);
      a.args.push_back(*obj);
    }
    if (a.args.size() != task.schemas[*schema].params.size()) {
      throw std::runtime_error("plan line " + std::to_string(lineno) + ": wrong number of arguments for " + name);
    }
    plan.actions.push_back(std::move(a));
  }
  return plan;
}

std::string to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::Solved: return "solved";
    case SearchStatus::Unsolvable: return "unsolvable";
    case SearchStatus::ResourceExhausted: return "exhausted";
  }
  return "?";
}

std::string to_string(Exhaustion e) {
  switch (e) {
    case Exhaustion::Time: return "time";
    case Exhaustion::Memory: return "memory";
    case Exhaustion::Expansions: return "expansions";
  }
  return "?";
}

}  // namespace liftplan

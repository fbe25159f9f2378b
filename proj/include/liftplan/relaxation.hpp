#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "liftplan/lifted.hpp"
#include "liftplan/search.hpp"

namespace liftplan {

class EmptyActionSet : public std::invalid_argument {
 public:
  EmptyActionSet() : std::invalid_argument("empty action set") {}
};

/// Body or head atom of a rule. Variables index the rule's variables.
struct DatalogAtom {
  PredicateId predicate = 0;
  std::vector<Term> args;
};

struct RuleOrigin {
  enum class Kind : std::uint8_t { Schema, Temporary, Goal };
  Kind kind = Kind::Schema;
  int index = 0;  // schema id, or position in the action set B
};

struct DatalogRule {
  DatalogAtom head;
  std::vector<DatalogAtom> body;
  std::vector<EqualityLiteral> equalities;
  int num_vars = 0;
  RuleOrigin origin;
};

/// Rules derived from a task: one per (schema, add effect) plus the goal rule.
/// Predicates are the task's, then `epsilon()` and `goal()` (both 0-ary).
class DatalogProgram {
 public:
  const Task& task() const { return *task_; }
  const std::vector<DatalogRule>& rules() const { return rules_; }
  bool restricted() const { return restricted_; }

  PredicateId epsilon() const { return static_cast<PredicateId>(task_->predicates.size()); }
  PredicateId goal() const { return epsilon() + 1; }
  int num_predicates() const { return goal() + 1; }
  int arity(PredicateId p) const { return p < epsilon() ? task_->predicates[p].arity : 0; }
  std::string predicate_name(PredicateId p) const;

  AtomId atom_id(PredicateId p, const ObjectId* args) const;
  AtomId epsilon_atom() const { return task_->num_atoms(); }
  AtomId goal_atom() const { return task_->num_atoms() + 1; }

  /// `head :- body.` lines, one per rule.
  std::string to_string() const;
  std::string rule_to_string(const DatalogRule& rule) const;

 private:
  friend DatalogProgram build_datalog(const Task&, bool);
  friend class RelaxedReachability;
  const Task* task_ = nullptr;
  bool restricted_ = false;
  std::vector<DatalogRule> rules_;
};

/// With `restricted`, every schema rule additionally requires epsilon.
DatalogProgram build_datalog(const Task& task, bool restricted = false);

/// Rule instantiation that first derived an atom.
struct Achiever {
  int rule = -1;  // index into rules, temporary rules follow the program's
  std::vector<ObjectId> binding;
};

struct ReachResult {
  /// Sorted reachable atoms, including epsilon when derived; excludes the goal atom.
  std::vector<AtomId> reachable;
  bool goal_reached = false;
  int goal_layer = -1;
};

/// Restriction of a task to an action set B: epsilon is required by all
/// schemas and only a copy of an action in B can add it.
struct RestrictedTask {
  const Task* base = nullptr;
  std::vector<GroundAction> action_set;
};

RestrictedTask restrict_task(const Task& task, std::vector<GroundAction> action_set);

/// Materializes a restricted task as an ordinary task (new 0-ary predicate
/// named `epsilon`, unique-suffixed on clash; one 0-ary schema per action in
/// B). Used for debugging dumps and as a ground test oracle.
Task materialize(const RestrictedTask& restricted);

/// Semi-naive layered fixpoint over a Datalog program with first-discovered
/// best achievers. Holds scratch space; not safe for concurrent use.
class RelaxedReachability {
 public:
  explicit RelaxedReachability(const DatalogProgram& program);

  /// Least fixpoint from the state and static atoms, with temporary ground
  /// rules `add(a), epsilon :- pre(a)` for each a in `temporary`.
  ReachResult reach(const StateView& view, const std::vector<GroundAction>& temporary = {});

  /// FF value: distinct actions in the relaxed plan; nullopt if the goal is
  /// unreachable.
  std::optional<int> h_ff(const StateView& view, const std::vector<GroundAction>& temporary = {});

  /// Layer at which `atom` was reached in the last evaluation.
  std::optional<int> layer(AtomId atom) const;

  /// Temporary rules of the last evaluation, in addition to the program's.
  const std::vector<DatalogRule>& temporary_rules() const { return temp_rules_; }

 private:
  struct Info {
    int layer;
    int achiever;  // -1 for facts
  };

  void run(const StateView& view, const std::vector<GroundAction>& temporary, bool stop_at_goal);
  void add_fact(PredicateId p, const ObjectId* args);
  void derive(const DatalogRule& rule, int rule_index, std::vector<ObjectId>& binding);
  void evaluate_rule(const DatalogRule& rule, int rule_index, int delta_pos);
  void join(const DatalogRule& rule, int rule_index, const std::vector<int>& order, std::size_t depth,
            int delta_pos, std::vector<ObjectId>& binding);
  void commit_pending();
  const DatalogRule& rule_at(int index) const;

  const DatalogProgram* program_;
  std::vector<DatalogRule> temp_rules_;

  // Per-predicate flattened tuples in derivation order; `old_end_` and
  // `cur_end_` delimit (in tuple counts) atoms older than the current delta
  // and atoms up to and including it.
  std::vector<std::vector<ObjectId>> tuples_;
  std::vector<std::size_t> old_end_;
  std::vector<std::size_t> cur_end_;
  // index_[p][pos * num_objects + o]: tuple indices with argument o at pos.
  std::vector<std::vector<std::vector<std::uint32_t>>> index_;

  struct Pending {
    PredicateId predicate;
    std::vector<ObjectId> args;
  };
  std::vector<Pending> pending_;
  std::unordered_map<AtomId, Info> info_;
  std::vector<Achiever> achievers_;
  int layer_ = 0;
  bool goal_reached_ = false;
};

/// Plain FF over the unrestricted program.
class FFHeuristic final : public StateHeuristic {
 public:
  explicit FFHeuristic(const Task& task);
  FFHeuristic(const FFHeuristic&) = delete;
  FFHeuristic& operator=(const FFHeuristic&) = delete;
  double evaluate(const StateView& view) override;

 private:
  DatalogProgram program_;
  RelaxedReachability reach_;
};

/// FF on the task restricted to A_s^rho.
class RestrictedFFHeuristic final : public ActionSetHeuristic {
 public:
  explicit RestrictedFFHeuristic(const Task& task);
  RestrictedFFHeuristic(const RestrictedFFHeuristic&) = delete;
  RestrictedFFHeuristic& operator=(const RestrictedFFHeuristic&) = delete;
  double evaluate(const StateView& view, const PartialAction& rho) override;
  /// Throws EmptyActionSet when B is empty and the goal does not hold.
  std::optional<int> evaluate_set(const StateView& view, const std::vector<GroundAction>& action_set);

 private:
  DatalogProgram program_;
  RelaxedReachability reach_;
};

}  // namespace liftplan

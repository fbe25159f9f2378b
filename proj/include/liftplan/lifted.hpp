#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftplan/pddl.hpp"

namespace liftplan {

/// A set of fluent ground atoms. Static atoms live in the task.
class State {
 public:
  State();
  /// `atoms` need not be sorted; duplicates are removed.
  explicit State(std::vector<AtomId> atoms);

  static State initial(const Task& task) { return State(task.initial_fluents()); }

  bool contains(AtomId id) const;
  const std::vector<AtomId>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  std::size_t hash() const { return hash_; }

  friend bool operator==(const State& a, const State& b) {
    return a.hash_ == b.hash_ && a.atoms_ == b.atoms_;
  }

 private:
  std::vector<AtomId> atoms_;
  std::size_t hash_ = 0;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  SchemaId schema = 0;
  std::vector<ObjectId> args;
  friend bool operator==(const GroundAction&, const GroundAction&) = default;
  friend auto operator<=>(const GroundAction&, const GroundAction&) = default;
};

/// A schema with a prefix of its parameters fixed, or the root (no schema).
struct PartialAction {
  std::optional<SchemaId> schema;
  std::vector<ObjectId> prefix;

  static PartialAction root() { return {}; }
  static PartialAction of(SchemaId s, std::vector<ObjectId> prefix = {}) {
    return {s, std::move(prefix)};
  }
  static PartialAction of(const GroundAction& a) { return {a.schema, a.args}; }

  bool is_root() const { return !schema.has_value(); }
  bool is_full(const Task& task) const {
    return schema && prefix.size() == task.schemas[*schema].params.size();
  }
  GroundAction to_action() const { return {*schema, prefix}; }

  friend bool operator==(const PartialAction&, const PartialAction&) = default;
  friend auto operator<=>(const PartialAction&, const PartialAction&) = default;
};

class NotApplicable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Per-predicate tuple index over the fluent atoms of one state plus the
/// task's static atoms. Build once per state and share across enumerations.
class StateView {
 public:
  StateView(const Task& task, const State& state);

  const Task& task() const { return *task_; }
  const State& state() const { return *state_; }
  /// Flattened argument tuples of true atoms of predicate `p`.
  const std::vector<ObjectId>& tuples(PredicateId p) const;
  bool holds(PredicateId p, const ObjectId* args) const;
  bool holds(AtomId id) const;

 private:
  const Task* task_;
  const State* state_;
  std::vector<std::vector<ObjectId>> fluent_tuples_;
};

// Semantics -----------------------------------------------------------------

GroundAtom instantiate(const LiftedAtom& atom, const std::vector<ObjectId>& args);
bool equalities_hold(const ActionSchema& schema, const std::vector<ObjectId>& args);

bool is_applicable(const Task& task, const State& state, const GroundAction& action);
/// Throws NotApplicable when the preconditions do not hold.
State apply(const Task& task, const State& state, const GroundAction& action);
/// Effect application without the applicability check.
State apply_unchecked(const Task& task, const State& state, const GroundAction& action);

std::vector<AtomId> add_ids(const Task& task, const GroundAction& action);
std::vector<AtomId> del_ids(const Task& task, const GroundAction& action);
std::vector<AtomId> pre_ids(const Task& task, const GroundAction& action);

// Partial action tree -------------------------------------------------------

int specificity(const PartialAction& rho);

/// Applicable children of `rho` in declaration order. Root yields schemas
/// with at least one applicable grounding; otherwise one-object extensions of
/// the prefix whose subtree contains an applicable action.
std::vector<PartialAction> children(const StateView& view, const PartialAction& rho);
std::vector<PartialAction> children(const Task& task, const State& state, const PartialAction& rho);

/// Streams applicable ground actions below `rho` in lexicographic order. The
/// callback returns false to stop early.
void for_each_instantiation(const StateView& view, const PartialAction& rho,
                            const std::function<bool(const GroundAction&)>& visit);
std::vector<GroundAction> instantiations(const StateView& view, const PartialAction& rho);
std::vector<GroundAction> instantiations(const Task& task, const State& state,
                                         const PartialAction& rho);
bool has_instantiation(const StateView& view, const PartialAction& rho);

/// [root, A(), A(o1), ..., A(o1..ok)].
std::vector<PartialAction> decompose(const GroundAction& action);

std::string to_string(const Task& task, const GroundAction& action);
std::string to_string(const Task& task, const PartialAction& rho);

}  // namespace liftplan

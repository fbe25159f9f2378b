#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace liftplan {

using ObjectId = int;
using PredicateId = int;
using SchemaId = int;
/// Dense per-task identifier of a ground atom (mixed-radix encoding of
/// predicate and arguments).
using AtomId = std::uint64_t;

// ---------------------------------------------------------------------------
// Errors

class PddlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public PddlError {
 public:
  SyntaxError(int line, int col, const std::string& what);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class UnsupportedFeature : public PddlError {
 public:
  explicit UnsupportedFeature(std::string feature);
  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

class UndeclaredPredicate : public PddlError {
 public:
  using PddlError::PddlError;
};

class UndeclaredObject : public PddlError {
 public:
  using PddlError::PddlError;
};

class ArityMismatch : public PddlError {
 public:
  using PddlError::PddlError;
};

class UnknownType : public PddlError {
 public:
  using PddlError::PddlError;
};

// ---------------------------------------------------------------------------
// Model

/// Argument of a lifted atom: either a schema parameter or a fixed object.
struct Term {
  enum class Kind : std::uint8_t { Variable, Object };
  Kind kind = Kind::Variable;
  int index = 0;  // parameter index or object id

  static Term var(int i) { return {Kind::Variable, i}; }
  static Term object(ObjectId o) { return {Kind::Object, o}; }
  bool is_var() const { return kind == Kind::Variable; }
  friend bool operator==(const Term&, const Term&) = default;
};

struct LiftedAtom {
  PredicateId predicate = 0;
  std::vector<Term> args;
  friend bool operator==(const LiftedAtom&, const LiftedAtom&) = default;
};

/// `(= ?x ?y)` or `(not (= ?x ?y))`. Checked structurally, never stored in
/// states.
struct EqualityLiteral {
  Term lhs;
  Term rhs;
  bool negated = false;
  friend bool operator==(const EqualityLiteral&, const EqualityLiteral&) = default;
};

struct Predicate {
  std::string name;
  int arity = 0;
  bool is_static = false;
  /// Introduced by type compilation.
  bool is_type = false;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<std::string> params;       // without leading '?'
  std::vector<std::string> param_types;  // empty strings once types are compiled
  std::vector<LiftedAtom> pre;
  std::vector<EqualityLiteral> equalities;
  std::vector<LiftedAtom> add;
  std::vector<LiftedAtom> del;
  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct GroundAtom {
  PredicateId predicate = 0;
  std::vector<ObjectId> args;
  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

struct TypeDecl {
  std::string name;
  std::string parent;  // empty for the root
  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

/// A lifted STRIPS task. After `compile_types` (which `parse_instance` runs)
/// the task is untyped and immutable.
class Task {
 public:
  std::string domain_name;
  std::string problem_name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<Predicate> predicates;
  std::vector<ActionSchema> schemas;
  /// Domain constants come first, then problem objects.
  std::vector<std::string> objects;
  std::vector<std::string> object_types;
  int num_constants = 0;
  std::vector<GroundAtom> init;
  std::vector<GroundAtom> goal;

  std::optional<PredicateId> find_predicate(std::string_view name) const;
  std::optional<ObjectId> find_object(std::string_view name) const;
  std::optional<SchemaId> find_schema(std::string_view name) const;

  /// Recomputes static flags and the atom encoding. Called by the parser and
  /// by `compile_types`; call again after editing a task by hand.
  void finalize();

  AtomId atom_id(const GroundAtom& atom) const;
  AtomId atom_id(PredicateId pred, const ObjectId* args) const;
  GroundAtom decode(AtomId id) const;
  PredicateId predicate_of(AtomId id) const;
  /// One past the largest atom id.
  AtomId num_atoms() const { return pred_offset_.empty() ? 0 : pred_offset_.back(); }
  bool is_static(PredicateId p) const { return predicates[p].is_static; }

  /// Sorted ids of all static atoms of the initial state.
  const std::vector<AtomId>& static_atoms() const { return static_atoms_; }
  bool has_static_atom(AtomId id) const;
  /// Argument tuples of true static atoms, per predicate (flattened).
  const std::vector<ObjectId>& static_tuples(PredicateId p) const { return static_tuples_[p]; }
  /// Sorted ids of all fluent atoms of the initial state.
  std::vector<AtomId> initial_fluents() const;
  std::vector<AtomId> goal_ids() const;

  std::string atom_to_string(const GroundAtom& atom) const;
  std::string atom_to_string(AtomId id) const;

  friend bool operator==(const Task& a, const Task& b);

 private:
  std::vector<AtomId> pred_offset_;
  std::vector<AtomId> static_atoms_;
  std::vector<std::vector<ObjectId>> static_tuples_;
};

// ---------------------------------------------------------------------------
// Operations

/// Parses a domain file. Supported: :strips, :typing, :equality, negated
/// equality literals, :action-costs (ignored with a warning).
Task parse_domain(std::string_view text);

/// Parses a problem against a parsed domain and compiles types away.
Task parse_instance(std::string_view text, const Task& domain);

/// Turns every type into a static unary predicate: objects gain `t(o)` for
/// their type and its ancestors, parameters gain `t(?v)` preconditions. The
/// root type `object` produces no predicate. Idempotent.
Task compile_types(const Task& task);

/// Predicates that appear in no add or delete list.
std::vector<PredicateId> static_predicates(const Task& task);

std::string domain_to_pddl(const Task& task);
std::string problem_to_pddl(const Task& task);

std::string read_file(const std::string& path);

}  // namespace liftplan

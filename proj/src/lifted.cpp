#include "liftplan/lifted.hpp"

#include <algorithm>
#include <limits>

namespace liftplan {

namespace {

std::size_t hash_atoms(const std::vector<AtomId>& atoms) {
  std::size_t h = 1469598103934665603ull;
  for (AtomId a : atoms) {
    h ^= static_cast<std::size_t>(a) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

ObjectId resolve(const Term& t, const std::vector<ObjectId>& bind) {
  return t.is_var() ? bind[t.index] : t.index;
}

int max_var(const LiftedAtom& a) {
  int m = -1;
  for (const auto& t : a.args) {
    if (t.is_var()) m = std::max(m, t.index);
  }
  return m;
}

int max_var(const EqualityLiteral& e) {
  int m = -1;
  if (e.lhs.is_var()) m = std::max(m, e.lhs.index);
  if (e.rhs.is_var()) m = std::max(m, e.rhs.index);
  return m;
}

/// Backtracking matcher binding a schema's parameters in declaration order.
/// Each precondition is checked as soon as its last variable is bound;
/// candidate values come from the smallest tuple list of such a precondition.
class SchemaMatcher {
 public:
  SchemaMatcher(const StateView& view, SchemaId schema)
      : view_(view),
        task_(view.task()),
        schema_id_(schema),
        s_(task_.schemas[schema]),
        atoms_at_(s_.params.size()),
        eqs_at_(s_.params.size()),
        bind_(s_.params.size(), -1) {
    for (std::size_t i = 0; i < s_.pre.size(); ++i) {
      int m = max_var(s_.pre[i]);
      (m < 0 ? ground_atoms_ : atoms_at_[m]).push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < s_.equalities.size(); ++i) {
      int m = max_var(s_.equalities[i]);
      (m < 0 ? ground_eqs_ : eqs_at_[m]).push_back(static_cast<int>(i));
    }
  }

  int arity() const { return static_cast<int>(s_.params.size()); }

  /// Binds `prefix` and verifies every literal it fully determines.
  bool bind_prefix(const std::vector<ObjectId>& prefix) {
    if (!check_ground()) return false;
    for (std::size_t p = 0; p < prefix.size(); ++p) {
      bind_[p] = prefix[p];
      if (!check_at(static_cast<int>(p))) return false;
    }
    return true;
  }

  std::vector<ObjectId> candidates(int p) const {
    const std::vector<ObjectId>* best = nullptr;
    const LiftedAtom* best_atom = nullptr;
    for (int idx : atoms_at_[p]) {
      const LiftedAtom& a = s_.pre[idx];
      const auto& tuples = view_.tuples(a.predicate);
      if (!best || tuples.size() < best->size()) {
        best = &tuples;
        best_atom = &a;
      }
    }
    std::vector<ObjectId> out;
    if (!best) {
      out.resize(task_.objects.size());
      for (std::size_t o = 0; o < out.size(); ++o) out[o] = static_cast<ObjectId>(o);
      return out;
    }
    const std::size_t k = best_atom->args.size();
    for (std::size_t off = 0; off + k <= best->size(); off += k) {
      ObjectId value = -1;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        const Term& t = best_atom->args[i];
        ObjectId v = (*best)[off + i];
        if (!t.is_var()) {
          ok = v == t.index;
        } else if (t.index == p) {
          if (value < 0) value = v;
          ok = value == v;
        } else {
          ok = bind_[t.index] == v;
        }
      }
      if (ok) out.push_back(value);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool check_at(int p) const {
    for (int idx : atoms_at_[p]) {
      if (!holds(s_.pre[idx])) return false;
    }
    for (int idx : eqs_at_[p]) {
      if (!eq_holds(s_.equalities[idx])) return false;
    }
    return true;
  }

  /// Enumerates completions from parameter `p`; returns false if stopped.
  bool enumerate(int p, const std::function<bool(const GroundAction&)>& visit) {
    if (p == arity()) return visit(GroundAction{schema_id_, bind_});
    for (ObjectId o : candidates(p)) {
      bind_[p] = o;
      if (check_at(p) && !enumerate(p + 1, visit)) {
        bind_[p] = -1;
        return false;
      }
    }
    bind_[p] = -1;
    return true;
  }

  bool exists(int p) {
    bool found = false;
    enumerate(p, [&](const GroundAction&) {
      found = true;
      return false;
    });
    return found;
  }

  void set(int p, ObjectId o) { bind_[p] = o; }

 private:
  bool check_ground() const {
    for (int idx : ground_atoms_) {
      if (!holds(s_.pre[idx])) return false;
    }
    for (int idx : ground_eqs_) {
      if (!eq_holds(s_.equalities[idx])) return false;
    }
    return true;
  }

  bool holds(const LiftedAtom& a) const {
    ObjectId args[16];
    std::vector<ObjectId> big;
    ObjectId* buf = args;
    if (a.args.size() > 16) {
      big.resize(a.args.size());
      buf = big.data();
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) buf[i] = resolve(a.args[i], bind_);
    return view_.holds(a.predicate, buf);
  }

  bool eq_holds(const EqualityLiteral& e) const {
    return (resolve(e.lhs, bind_) == resolve(e.rhs, bind_)) != e.negated;
  }

  const StateView& view_;
  const Task& task_;
  SchemaId schema_id_;
  const ActionSchema& s_;
  std::vector<int> ground_atoms_;
  std::vector<int> ground_eqs_;
  std::vector<std::vector<int>> atoms_at_;
  std::vector<std::vector<int>> eqs_at_;
  std::vector<ObjectId> bind_;
};

}  // namespace

// ---------------------------------------------------------------------------
// State

State::State() : hash_(hash_atoms({})) {}

State::State(std::vector<AtomId> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  hash_ = hash_atoms(atoms_);
}

bool State::contains(AtomId id) const { return std::binary_search(atoms_.begin(), atoms_.end(), id); }

StateView::StateView(const Task& task, const State& state)
    : task_(&task), state_(&state), fluent_tuples_(task.predicates.size()) {
  for (AtomId id : state.atoms()) {
    GroundAtom a = task.decode(id);
    auto& t = fluent_tuples_[a.predicate];
    t.insert(t.end(), a.args.begin(), a.args.end());
  }
}

const std::vector<ObjectId>& StateView::tuples(PredicateId p) const {
  return task_->is_static(p) ? task_->static_tuples(p) : fluent_tuples_[p];
}

bool StateView::holds(PredicateId p, const ObjectId* args) const {
  AtomId id = task_->atom_id(p, args);
  return task_->is_static(p) ? task_->has_static_atom(id) : state_->contains(id);
}

bool StateView::holds(AtomId id) const {
  return task_->is_static(task_->predicate_of(id)) ? task_->has_static_atom(id) : state_->contains(id);
}

// ---------------------------------------------------------------------------
// Semantics

GroundAtom instantiate(const LiftedAtom& atom, const std::vector<ObjectId>& args) {
  GroundAtom g;
  g.predicate = atom.predicate;
  g.args.reserve(atom.args.size());
  for (const auto& t : atom.args) g.args.push_back(resolve(t, args));
  return g;
}

bool equalities_hold(const ActionSchema& schema, const std::vector<ObjectId>& args) {
  for (const auto& e : schema.equalities) {
    if ((resolve(e.lhs, args) == resolve(e.rhs, args)) == e.negated) return false;
  }
  return true;
}

std::vector<AtomId> pre_ids(const Task& task, const GroundAction& action) {
  std::vector<AtomId> out;
  for (const auto& a : task.schemas[action.schema].pre) out.push_back(task.atom_id(instantiate(a, action.args)));
  return out;
}

std::vector<AtomId> add_ids(const Task& task, const GroundAction& action) {
  std::vector<AtomId> out;
  for (const auto& a : task.schemas[action.schema].add) out.push_back(task.atom_id(instantiate(a, action.args)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AtomId> del_ids(const Task& task, const GroundAction& action) {
  std::vector<AtomId> out;
  for (const auto& a : task.schemas[action.schema].del) out.push_back(task.atom_id(instantiate(a, action.args)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_applicable(const Task& task, const State& state, const GroundAction& action) {
  const ActionSchema& s = task.schemas[action.schema];
  if (action.args.size() != s.params.size()) return false;
  if (!equalities_hold(s, action.args)) return false;
  for (const auto& a : s.pre) {
    AtomId id = task.atom_id(instantiate(a, action.args));
    bool ok = task.is_static(a.predicate) ? task.has_static_atom(id) : state.contains(id);
    if (!ok) return false;
  }
  return true;
}

State apply_unchecked(const Task& task, const State& state, const GroundAction& action) {
  std::vector<AtomId> del = del_ids(task, action);
  std::vector<AtomId> add = add_ids(task, action);
  std::vector<AtomId> out;
  out.reserve(state.size() + add.size());
  std::set_difference(state.atoms().begin(), state.atoms().end(), del.begin(), del.end(),
                      std::back_inserter(out));
  for (AtomId a : add) {
    if (!task.is_static(task.predicate_of(a))) out.push_back(a);
  }
  return State(std::move(out));
}

State apply(const Task& task, const State& state, const GroundAction& action) {
  if (!is_applicable(task, state, action)) {
    throw NotApplicable("action " + to_string(task, action) + " is not applicable");
  }
  return apply_unchecked(task, state, action);
}

// ---------------------------------------------------------------------------
// Partial action tree

int specificity(const PartialAction& rho) {
  return rho.is_root() ? 0 : static_cast<int>(rho.prefix.size()) + 1;
}

bool has_instantiation(const StateView& view, const PartialAction& rho) {
  if (rho.is_root()) {
    for (std::size_t s = 0; s < view.task().schemas.size(); ++s) {
      if (has_instantiation(view, PartialAction::of(static_cast<SchemaId>(s)))) return true;
    }
    return false;
  }
  SchemaMatcher m(view, *rho.schema);
  if (!m.bind_prefix(rho.prefix)) return false;
  return m.exists(static_cast<int>(rho.prefix.size()));
}

std::vector<PartialAction> children(const StateView& view, const PartialAction& rho) {
  std::vector<PartialAction> out;
  const Task& task = view.task();
  if (rho.is_root()) {
    for (std::size_t s = 0; s < task.schemas.size(); ++s) {
      auto child = PartialAction::of(static_cast<SchemaId>(s));
      if (has_instantiation(view, child)) out.push_back(std::move(child));
    }
    return out;
  }
  if (rho.is_full(task)) return out;
  SchemaMatcher m(view, *rho.schema);
  if (!m.bind_prefix(rho.prefix)) return out;
  const int p = static_cast<int>(rho.prefix.size());
  for (ObjectId o : m.candidates(p)) {
    m.set(p, o);
    if (m.check_at(p) && m.exists(p + 1)) {
      PartialAction child = rho;
      child.prefix.push_back(o);
      out.push_back(std::move(child));
    }
  }
  return out;
}

std::vector<PartialAction> children(const Task& task, const State& state, const PartialAction& rho) {
  return children(StateView(task, state), rho);
}

void for_each_instantiation(const StateView& view, const PartialAction& rho,
                            const std::function<bool(const GroundAction&)>& visit) {
  if (rho.is_root()) {
    for (std::size_t s = 0; s < view.task().schemas.size(); ++s) {
      SchemaMatcher m(view, static_cast<SchemaId>(s));
      if (!m.bind_prefix({})) continue;
      if (!m.enumerate(0, visit)) return;
    }
    return;
  }
  SchemaMatcher m(view, *rho.schema);
  if (!m.bind_prefix(rho.prefix)) return;
  m.enumerate(static_cast<int>(rho.prefix.size()), visit);
}

std::vector<GroundAction> instantiations(const StateView& view, const PartialAction& rho) {
  std::vector<GroundAction> out;
  for_each_instantiation(view, rho, [&](const GroundAction& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

std::vector<GroundAction> instantiations(const Task& task, const State& state, const PartialAction& rho) {
  return instantiations(StateView(task, state), rho);
}

std::vector<PartialAction> decompose(const GroundAction& action) {
  std::vector<PartialAction> out;
  out.push_back(PartialAction::root());
  for (std::size_t k = 0; k <= action.args.size(); ++k) {
    out.push_back(PartialAction::of(
        action.schema, std::vector<ObjectId>(action.args.begin(), action.args.begin() + k)));
  }
  return out;
}

std::string to_string(const Task& task, const GroundAction& action) {
  std::string out = "(" + task.schemas[action.schema].name;
  for (ObjectId o : action.args) out += " " + task.objects[o];
  return out + ")";
}

std::string to_string(const Task& task, const PartialAction& rho) {
  if (rho.is_root()) return "⊥";
  const ActionSchema& s = task.schemas[*rho.schema];
  std::string out = s.name + "(";
  for (std::size_t i = 0; i < s.params.size(); ++i) {
    if (i) out += ",";
    out += i < rho.prefix.size() ? task.objects[rho.prefix[i]] : std::string("∘");
  }
  return out + ")";
}

}  // namespace liftplan

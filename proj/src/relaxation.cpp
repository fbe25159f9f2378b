#include "liftplan/relaxation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace liftplan {

namespace {

DatalogAtom to_datalog(const LiftedAtom& a) { return {a.predicate, a.args}; }

DatalogAtom ground_datalog(const GroundAtom& g) {
  DatalogAtom a{g.predicate, {}};
  for (ObjectId o : g.args) a.args.push_back(Term::object(o));
  return a;
}

constexpr int kMaxArity = 32;

ObjectId value(const Term& t, const std::vector<ObjectId>& binding) {
  return t.is_var() ? binding[t.index] : t.index;
}

}  // namespace

// ---------------------------------------------------------------------------
// Program

std::string DatalogProgram::predicate_name(PredicateId p) const {
  if (p == epsilon()) return "epsilon";
  if (p == goal()) return "goal";
  return task_->predicates[p].name;
}

AtomId DatalogProgram::atom_id(PredicateId p, const ObjectId* args) const {
  if (p == epsilon()) return epsilon_atom();
  if (p == goal()) return goal_atom();
  return task_->atom_id(p, args);
}

std::string DatalogProgram::rule_to_string(const DatalogRule& rule) const {
  const ActionSchema* schema =
      rule.origin.kind == RuleOrigin::Kind::Schema ? &task_->schemas[rule.origin.index] : nullptr;
  auto term = [&](const Term& t) {
    if (!t.is_var()) return task_->objects[t.index];
    return "?" + (schema ? schema->params[t.index] : "v" + std::to_string(t.index));
  };
  auto atom = [&](const DatalogAtom& a) {
    std::string s = predicate_name(a.predicate);
    if (a.args.empty()) return s;
    s += "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) s += (i ? ", " : "") + term(a.args[i]);
    return s + ")";
  };
  std::string out = atom(rule.head);
  std::vector<std::string> body;
  for (const auto& b : rule.body) body.push_back(atom(b));
  for (const auto& e : rule.equalities) body.push_back(term(e.lhs) + (e.negated ? " != " : " = ") + term(e.rhs));
  if (!body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) out += (i ? ", " : "") + body[i];
  }
  return out + ".";
}

std::string DatalogProgram::to_string() const {
  std::string out;
  for (const auto& r : rules_) out += rule_to_string(r) + "\n";
  return out;
}

DatalogProgram build_datalog(const Task& task, bool restricted) {
  DatalogProgram prog;
  prog.task_ = &task;
  prog.restricted_ = restricted;
  for (SchemaId s = 0; s < static_cast<SchemaId>(task.schemas.size()); ++s) {
    const ActionSchema& schema = task.schemas[s];
    for (const auto& add : schema.add) {
      DatalogRule r;
      r.head = to_datalog(add);
      for (const auto& pre : schema.pre) r.body.push_back(to_datalog(pre));
      if (restricted) r.body.push_back({prog.epsilon(), {}});
      r.equalities = schema.equalities;
      r.num_vars = static_cast<int>(schema.params.size());
      r.origin = {RuleOrigin::Kind::Schema, s};
      prog.rules_.push_back(std::move(r));
    }
  }
  DatalogRule goal;
  goal.head = {prog.goal(), {}};
  for (const auto& g : task.goal) goal.body.push_back(ground_datalog(g));
  goal.origin = {RuleOrigin::Kind::Goal, 0};
  prog.rules_.push_back(std::move(goal));
  return prog;
}

// ---------------------------------------------------------------------------
// Restriction

RestrictedTask restrict_task(const Task& task, std::vector<GroundAction> action_set) {
  return {&task, std::move(action_set)};
}

Task materialize(const RestrictedTask& restricted) {
  Task t = *restricted.base;
  std::string eps = "epsilon";
  while (t.find_predicate(eps)) eps += "_";
  const PredicateId eps_id = static_cast<PredicateId>(t.predicates.size());
  t.predicates.push_back({eps, 0, false, false});
  for (auto& schema : t.schemas) schema.pre.push_back({eps_id, {}});

  auto ground = [](const LiftedAtom& a, const std::vector<ObjectId>& args) {
    LiftedAtom out{a.predicate, {}};
    for (const auto& term : a.args) out.args.push_back(Term::object(term.is_var() ? args[term.index] : term.index));
    return out;
  };
  for (std::size_t i = 0; i < restricted.action_set.size(); ++i) {
    const GroundAction& a = restricted.action_set[i];
    const ActionSchema& src = restricted.base->schemas[a.schema];
    ActionSchema copy;
    copy.name = src.name;
    for (ObjectId o : a.args) copy.name += "_" + t.objects[o];
    copy.name += "_b" + std::to_string(i);
    while (t.find_schema(copy.name)) copy.name += "_";
    for (const auto& p : src.pre) copy.pre.push_back(ground(p, a.args));
    for (const auto& p : src.add) copy.add.push_back(ground(p, a.args));
    for (const auto& p : src.del) copy.del.push_back(ground(p, a.args));
    copy.add.push_back({eps_id, {}});
    t.schemas.push_back(std::move(copy));
  }
  t.finalize();
  return t;
}

// ---------------------------------------------------------------------------
// Fixpoint

RelaxedReachability::RelaxedReachability(const DatalogProgram& program) : program_(&program) {
  const int n = program.num_predicates();
  tuples_.resize(n);
  old_end_.resize(n);
  cur_end_.resize(n);
  index_.resize(n);
  const std::size_t objects = program.task().objects.size();
  for (int p = 0; p < n; ++p) {
    if (program.arity(p) > kMaxArity) throw std::length_error("predicate arity above " + std::to_string(kMaxArity));
    index_[p].resize(static_cast<std::size_t>(program.arity(p)) * objects);
  }
}

const DatalogRule& RelaxedReachability::rule_at(int index) const {
  const auto& rules = program_->rules();
  return index < static_cast<int>(rules.size()) ? rules[index] : temp_rules_[index - rules.size()];
}

void RelaxedReachability::add_fact(PredicateId p, const ObjectId* args) {
  AtomId id = program_->atom_id(p, args);
  if (!info_.emplace(id, Info{0, -1}).second) return;
  pending_.push_back({p, std::vector<ObjectId>(args, args + program_->arity(p))});
}

void RelaxedReachability::commit_pending() {
  const std::size_t objects = program_->task().objects.size();
  for (int p = 0; p < program_->num_predicates(); ++p) old_end_[p] = cur_end_[p];
  for (auto& pa : pending_) {
    const int arity = program_->arity(pa.predicate);
    auto& list = tuples_[pa.predicate];
    const auto tuple_index = static_cast<std::uint32_t>(arity == 0 ? list.size() : list.size() / arity);
    if (arity == 0) {
      list.push_back(0);  // one marker entry per 0-ary atom
    } else {
      list.insert(list.end(), pa.args.begin(), pa.args.end());
    }
    for (int i = 0; i < arity; ++i) index_[pa.predicate][i * objects + pa.args[i]].push_back(tuple_index);
  }
  pending_.clear();
  for (int p = 0; p < program_->num_predicates(); ++p) {
    const int arity = program_->arity(p);
    cur_end_[p] = arity == 0 ? tuples_[p].size() : tuples_[p].size() / arity;
  }
}

void RelaxedReachability::derive(const DatalogRule& rule, int rule_index, std::vector<ObjectId>& binding) {
  // Head or equality variables not bound by the body range over all objects.
  for (int v = 0; v < rule.num_vars; ++v) {
    if (binding[v] >= 0) continue;
    const int objects = static_cast<int>(program_->task().objects.size());
    for (ObjectId o = 0; o < objects; ++o) {
      binding[v] = o;
      derive(rule, rule_index, binding);
    }
    binding[v] = -1;
    return;
  }
  for (const auto& e : rule.equalities) {
    if ((value(e.lhs, binding) == value(e.rhs, binding)) == e.negated) return;
  }
  ObjectId out[kMaxArity];
  for (std::size_t i = 0; i < rule.head.args.size(); ++i) out[i] = value(rule.head.args[i], binding);
  AtomId id = program_->atom_id(rule.head.predicate, out);
  auto [it, inserted] = info_.emplace(id, Info{layer_ + 1, static_cast<int>(achievers_.size())});
  if (!inserted) return;
  achievers_.push_back({rule_index, binding});
  pending_.push_back({rule.head.predicate, std::vector<ObjectId>(out, out + rule.head.args.size())});
  if (rule.head.predicate == program_->goal()) goal_reached_ = true;
}

void RelaxedReachability::join(const DatalogRule& rule, int rule_index, const std::vector<int>& order,
                               std::size_t depth, int delta_pos, std::vector<ObjectId>& binding) {
  if (depth == order.size()) {
    derive(rule, rule_index, binding);
    return;
  }
  const int pos = order[depth];
  const DatalogAtom& atom = rule.body[pos];
  const PredicateId p = atom.predicate;
  std::size_t lo = 0;
  std::size_t hi = cur_end_[p];
  if (delta_pos >= 0) {
    if (pos == delta_pos) {
      lo = old_end_[p];
    } else if (pos < delta_pos) {
      hi = old_end_[p];
    }
  }
  if (lo >= hi) return;

  const int arity = static_cast<int>(atom.args.size());
  if (arity == 0) {
    join(rule, rule_index, order, depth + 1, delta_pos, binding);
    return;
  }

  const std::size_t objects = program_->task().objects.size();
  const std::vector<std::uint32_t>* best = nullptr;
  for (int i = 0; i < arity; ++i) {
    ObjectId o = value(atom.args[i], binding);
    if (o < 0) continue;
    const auto& list = index_[p][i * objects + o];
    if (!best || list.size() < best->size()) best = &list;
  }

  const auto& flat = tuples_[p];
  int newly_bound[kMaxArity];
  auto try_tuple = [&](std::size_t t) {
    const ObjectId* tup = flat.data() + t * arity;
    int n_bound = 0;
    bool ok = true;
    for (int i = 0; i < arity && ok; ++i) {
      const Term& term = atom.args[i];
      if (!term.is_var()) {
        ok = term.index == tup[i];
      } else if (binding[term.index] >= 0) {
        ok = binding[term.index] == tup[i];
      } else {
        binding[term.index] = tup[i];
        newly_bound[n_bound++] = term.index;
      }
    }
    if (ok) join(rule, rule_index, order, depth + 1, delta_pos, binding);
    for (int i = 0; i < n_bound; ++i) binding[newly_bound[i]] = -1;
  };

  if (best) {
    auto it = std::lower_bound(best->begin(), best->end(), static_cast<std::uint32_t>(lo));
    // Entries appended during this round lie beyond `hi` and are skipped.
    for (; it != best->end() && *it < hi; ++it) try_tuple(*it);
  } else {
    for (std::size_t t = lo; t < hi; ++t) try_tuple(t);
  }
}

void RelaxedReachability::evaluate_rule(const DatalogRule& rule, int rule_index, int delta_pos) {
  std::vector<int> order;
  order.reserve(rule.body.size());
  if (delta_pos >= 0) order.push_back(delta_pos);
  for (int i = 0; i < static_cast<int>(rule.body.size()); ++i) {
    if (i != delta_pos) order.push_back(i);
  }
  std::vector<ObjectId> binding(rule.num_vars, -1);
  join(rule, rule_index, order, 0, delta_pos, binding);
}

void RelaxedReachability::run(const StateView& view, const std::vector<GroundAction>& temporary,
                              bool stop_at_goal) {
  const Task& task = program_->task();
  for (auto& t : tuples_) t.clear();
  for (auto& per_pred : index_) {
    for (auto& l : per_pred) l.clear();
  }
  std::fill(old_end_.begin(), old_end_.end(), 0);
  std::fill(cur_end_.begin(), cur_end_.end(), 0);
  pending_.clear();
  info_.clear();
  achievers_.clear();
  layer_ = 0;
  goal_reached_ = false;

  temp_rules_.clear();
  for (std::size_t i = 0; i < temporary.size(); ++i) {
    const GroundAction& a = temporary[i];
    const ActionSchema& schema = task.schemas[a.schema];
    std::vector<DatalogAtom> body;
    for (const auto& pre : schema.pre) body.push_back(ground_datalog(instantiate(pre, a.args)));
    std::vector<DatalogAtom> heads;
    for (const auto& add : schema.add) heads.push_back(ground_datalog(instantiate(add, a.args)));
    heads.push_back({program_->epsilon(), {}});
    for (auto& h : heads) {
      DatalogRule r;
      r.head = std::move(h);
      r.body = body;
      r.origin = {RuleOrigin::Kind::Temporary, static_cast<int>(i)};
      temp_rules_.push_back(std::move(r));
    }
  }

  for (PredicateId p = 0; p < static_cast<PredicateId>(task.predicates.size()); ++p) {
    if (!task.is_static(p)) continue;
    const auto& flat = task.static_tuples(p);
    const int arity = task.predicates[p].arity;
    if (arity == 0) {
      if (!flat.empty()) add_fact(p, nullptr);
      continue;
    }
    for (std::size_t i = 0; i < flat.size(); i += arity) add_fact(p, flat.data() + i);
  }
  for (AtomId id : view.state().atoms()) {
    GroundAtom g = task.decode(id);
    add_fact(g.predicate, g.args.data());
  }
  commit_pending();

  const int n_rules = static_cast<int>(program_->rules().size() + temp_rules_.size());
  // First round: every rule against the facts, so empty bodies fire too.
  for (int r = 0; r < n_rules && !(stop_at_goal && goal_reached_); ++r) evaluate_rule(rule_at(r), r, -1);
  while (!pending_.empty() && !(stop_at_goal && goal_reached_)) {
    commit_pending();
    ++layer_;
    for (int r = 0; r < n_rules && !(stop_at_goal && goal_reached_); ++r) {
      const DatalogRule& rule = rule_at(r);
      for (int d = 0; d < static_cast<int>(rule.body.size()); ++d) {
        const PredicateId p = rule.body[d].predicate;
        if (cur_end_[p] > old_end_[p]) evaluate_rule(rule, r, d);
      }
    }
  }
}

ReachResult RelaxedReachability::reach(const StateView& view, const std::vector<GroundAction>& temporary) {
  run(view, temporary, false);
  ReachResult r;
  for (const auto& [id, info] : info_) {
    if (id != program_->goal_atom()) r.reachable.push_back(id);
  }
  std::sort(r.reachable.begin(), r.reachable.end());
  r.goal_reached = goal_reached_;
  if (goal_reached_) r.goal_layer = info_.at(program_->goal_atom()).layer - 1;
  return r;
}

std::optional<int> RelaxedReachability::layer(AtomId atom) const {
  auto it = info_.find(atom);
  if (it == info_.end()) return std::nullopt;
  return it->second.layer;
}

std::optional<int> RelaxedReachability::h_ff(const StateView& view, const std::vector<GroundAction>& temporary) {
  run(view, temporary, true);
  if (!goal_reached_) return std::nullopt;

  std::set<std::tuple<int, int, std::vector<ObjectId>>> actions;
  std::unordered_map<AtomId, bool> seen;
  std::vector<AtomId> stack{program_->goal_atom()};
  std::vector<ObjectId> args;
  while (!stack.empty()) {
    AtomId id = stack.back();
    stack.pop_back();
    if (!seen.emplace(id, true).second) continue;
    const Info& info = info_.at(id);
    if (info.achiever < 0) continue;
    const Achiever& ach = achievers_[info.achiever];
    const DatalogRule& rule = rule_at(ach.rule);
    if (rule.origin.kind != RuleOrigin::Kind::Goal) {
      std::vector<ObjectId> key = rule.origin.kind == RuleOrigin::Kind::Schema ? ach.binding : std::vector<ObjectId>{};
      actions.emplace(static_cast<int>(rule.origin.kind), rule.origin.index, std::move(key));
    }
    for (const auto& b : rule.body) {
      args.resize(b.args.size());
      for (std::size_t i = 0; i < b.args.size(); ++i) args[i] = value(b.args[i], ach.binding);
      stack.push_back(program_->atom_id(b.predicate, args.data()));
    }
  }
  return static_cast<int>(actions.size());
}

// ---------------------------------------------------------------------------
// Heuristics

FFHeuristic::FFHeuristic(const Task& task) : program_(build_datalog(task, false)), reach_(program_) {}

double FFHeuristic::evaluate(const StateView& view) {
  auto h = reach_.h_ff(view);
  return h ? static_cast<double>(*h) : kDeadEnd;
}

RestrictedFFHeuristic::RestrictedFFHeuristic(const Task& task)
    : program_(build_datalog(task, true)), reach_(program_) {}

std::optional<int> RestrictedFFHeuristic::evaluate_set(const StateView& view,
                                                       const std::vector<GroundAction>& action_set) {
  if (action_set.empty()) {
    if (is_goal(view.task(), view.state())) return 0;
    throw EmptyActionSet();
  }
  return reach_.h_ff(view, action_set);
}

double RestrictedFFHeuristic::evaluate(const StateView& view, const PartialAction& rho) {
  auto actions = instantiations(view, rho);
  if (actions.empty()) return is_goal(view.task(), view.state()) ? 0.0 : kDeadEnd;
  auto h = reach_.h_ff(view, actions);
  return h ? static_cast<double>(*h) : kDeadEnd;
}

}  // namespace liftplan

#include "liftplan/graphs.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "liftplan/relaxation.hpp"

namespace liftplan {

VertexColor VertexColor::object(std::vector<std::string> statics) {
  std::sort(statics.begin(), statics.end());
  VertexColor c;
  c.kind = Kind::Object;
  c.statics = std::move(statics);
  return c;
}

VertexColor VertexColor::atom(std::string tag, std::string predicate) {
  VertexColor c;
  c.kind = Kind::Atom;
  c.tag = std::move(tag);
  c.name = std::move(predicate);
  return c;
}

VertexColor VertexColor::action(std::string schema) {
  VertexColor c;
  c.kind = Kind::Action;
  c.name = std::move(schema);
  return c;
}

VertexColor VertexColor::effect_atom(std::string alpha, std::string beta, std::string predicate) {
  VertexColor c;
  c.kind = Kind::EffectAtom;
  c.tag = std::move(alpha);
  c.goal_tag = std::move(beta);
  c.name = std::move(predicate);
  return c;
}

std::string VertexColor::str() const {
  switch (kind) {
    case Kind::Object: {
      std::string s = "ob{";
      for (std::size_t i = 0; i < statics.size(); ++i) s += (i ? "," : "") + statics[i];
      return s + "}";
    }
    case Kind::Atom: return tag + "|" + name;
    case Kind::Action: return "act|" + name;
    case Kind::EffectAtom: return tag + "|" + goal_tag + "|" + name;
  }
  return "?";
}

int LabeledGraph::add_vertex(VertexColor color) {
  colors_.push_back(std::move(color));
  return num_vertices() - 1;
}

void LabeledGraph::add_edge(int u, int v, int label) {
  if (u < 0 || v < 0 || u >= num_vertices() || v >= num_vertices()) throw std::out_of_range("edge endpoint");
  if (label < 1) throw std::invalid_argument("edge labels start at 1");
  edges_.push_back({u, v, label});
}

int LabeledGraph::degree(int v) const {
  int d = 0;
  for (const auto& e : edges_) d += (e.u == v) + (e.v == v);
  return d;
}

std::string LabeledGraph::dump() const {
  std::string out;
  for (int i = 0; i < num_vertices(); ++i) out += "v " + std::to_string(i) + " " + colors_[i].str() + "\n";
  for (const auto& e : edges_) {
    out += "e " + std::to_string(e.u) + " " + std::to_string(e.v) + " " + std::to_string(e.label) + "\n";
  }
  return out;
}

std::string to_string(GraphKind kind) { return kind == GraphKind::AOAG ? "aoag" : "aeg"; }

GraphKind parse_graph_kind(const std::string& text) {
  std::string t = text;
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "aoag") return GraphKind::AOAG;
  if (t == "aeg") return GraphKind::AEG;
  throw std::invalid_argument("unknown graph kind: " + text);
}

namespace {

void add_objects(const Task& task, LabeledGraph& g) {
  std::vector<std::vector<std::string>> statics(task.objects.size());
  for (PredicateId p = 0; p < static_cast<PredicateId>(task.predicates.size()); ++p) {
    if (!task.is_static(p) || task.predicates[p].arity != 1) continue;
    for (ObjectId o : task.static_tuples(p)) statics[o].push_back(task.predicates[p].name);
  }
  for (auto& s : statics) g.add_vertex(VertexColor::object(std::move(s)));
}

void add_atom(const Task& task, LabeledGraph& g, AtomId id, VertexColor color) {
  GroundAtom a = task.decode(id);
  int v = g.add_vertex(std::move(color));
  for (std::size_t i = 0; i < a.args.size(); ++i) g.add_edge(v, a.args[i], static_cast<int>(i) + 1);
}

std::vector<AtomId> fluent_goals(const Task& task) {
  std::vector<AtomId> out;
  for (const auto& g : task.goal) {
    if (!task.is_static(g.predicate)) out.push_back(task.atom_id(g));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool contains(const std::vector<AtomId>& sorted, AtomId id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

std::vector<AtomId> sorted_union(const std::vector<AtomId>& a, const std::vector<AtomId>& b) {
  std::vector<AtomId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<AtomId> sorted_ids(std::vector<AtomId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool covers_applicable(const StateView& view, const std::vector<GroundAction>& b) {
  std::vector<GroundAction> sorted_b = b;
  std::sort(sorted_b.begin(), sorted_b.end());
  bool all = true;
  for_each_instantiation(view, PartialAction::root(), [&](const GroundAction& a) {
    all = std::binary_search(sorted_b.begin(), sorted_b.end(), a);
    return all;
  });
  return all;
}

}  // namespace

LabeledGraph ilg(const Task& task, const State& state) {
  LabeledGraph g;
  add_objects(task, g);
  const auto goals = fluent_goals(task);
  for (AtomId id : sorted_union(state.atoms(), goals)) {
    const bool in_s = state.contains(id);
    const bool in_g = contains(goals, id);
    const char* tag = in_s ? (in_g ? "ag" : "ap") : "ug";
    add_atom(task, g, id, VertexColor::atom(tag, task.predicates[task.predicate_of(id)].name));
  }
  return g;
}

EffectPartition effect_partition(const StateView& view, const std::vector<GroundAction>& action_set) {
  if (action_set.empty()) throw EmptyActionSet();
  const Task& task = view.task();
  EffectPartition part;
  if (covers_applicable(view, action_set)) {
    part.successor = view.state();
    return part;
  }
  std::vector<AtomId> all_add;
  std::vector<AtomId> all_del;
  bool first = true;
  for (const auto& a : action_set) {
    auto add = sorted_ids(add_ids(task, a));
    auto del = sorted_ids(del_ids(task, a));
    if (first) {
      part.unav_add = add;
      part.unav_del = del;
      first = false;
    } else {
      std::vector<AtomId> ia, id;
      std::set_intersection(part.unav_add.begin(), part.unav_add.end(), add.begin(), add.end(),
                            std::back_inserter(ia));
      std::set_intersection(part.unav_del.begin(), part.unav_del.end(), del.begin(), del.end(),
                            std::back_inserter(id));
      part.unav_add = std::move(ia);
      part.unav_del = std::move(id);
    }
    all_add = sorted_union(all_add, add);
    all_del = sorted_union(all_del, del);
  }
  std::set_difference(all_add.begin(), all_add.end(), part.unav_add.begin(), part.unav_add.end(),
                      std::back_inserter(part.opt_add));
  std::set_difference(all_del.begin(), all_del.end(), part.unav_del.begin(), part.unav_del.end(),
                      std::back_inserter(part.opt_del));
  std::vector<AtomId> next;
  for (AtomId id : view.state().atoms()) {
    if (!contains(part.unav_del, id)) next.push_back(id);
  }
  next.insert(next.end(), part.unav_add.begin(), part.unav_add.end());
  part.successor = State(std::move(next));
  return part;
}

LabeledGraph aoag(const StateView& view, const PartialAction& rho) {
  const Task& task = view.task();
  if (rho.is_root()) return ilg(task, view.state());
  auto actions = instantiations(view, rho);
  if (actions.size() == 1) return ilg(task, apply_unchecked(task, view.state(), actions.front()));
  if (actions.empty() || covers_applicable(view, actions)) return ilg(task, view.state());
  LabeledGraph g = ilg(task, view.state());
  for (const auto& a : actions) {
    int v = g.add_vertex(VertexColor::action(task.schemas[a.schema].name));
    for (std::size_t i = 0; i < a.args.size(); ++i) g.add_edge(v, a.args[i], static_cast<int>(i) + 1);
  }
  return g;
}

LabeledGraph aoag(const Task& task, const State& state, const PartialAction& rho) {
  return aoag(StateView(task, state), rho);
}

LabeledGraph aeg(const StateView& view, const PartialAction& rho) {
  const Task& task = view.task();
  EffectPartition part;
  if (rho.is_root()) {
    part.successor = view.state();
  } else {
    auto actions = instantiations(view, rho);
    if (actions.empty()) {
      part.successor = view.state();
    } else {
      part = effect_partition(view, actions);
    }
  }
  const auto goals = fluent_goals(task);
  const auto& next = part.successor.atoms();

  LabeledGraph g;
  add_objects(task, g);
  auto vertices = sorted_union(sorted_union(goals, next), sorted_union(part.opt_add, part.opt_del));
  for (AtomId id : vertices) {
    const bool in_goal = contains(goals, id);
    std::string alpha;
    if (contains(part.opt_add, id)) {
      alpha = "oa";
    } else if (contains(part.opt_del, id)) {
      alpha = "od";
    } else if (in_goal && !part.successor.contains(id)) {
      alpha = "u";
    } else {
      alpha = "a";
    }
    add_atom(task, g, id,
             VertexColor::effect_atom(alpha, in_goal ? "g" : "ng", task.predicates[task.predicate_of(id)].name));
  }
  return g;
}

LabeledGraph aeg(const Task& task, const State& state, const PartialAction& rho) {
  return aeg(StateView(task, state), rho);
}

LabeledGraph build_graph(GraphKind kind, const StateView& view, const PartialAction& rho) {
  return kind == GraphKind::AOAG ? aoag(view, rho) : aeg(view, rho);
}

}  // namespace liftplan

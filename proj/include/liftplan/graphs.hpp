#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liftplan/lifted.hpp"

namespace liftplan {

struct VertexColor {
  enum class Kind : std::uint8_t { Object, Atom, Action, EffectAtom };
  Kind kind = Kind::Object;
  /// Object: sorted static unary predicates true of the object.
  std::vector<std::string> statics;
  /// Atom: ag / ap / ug. EffectAtom: a / u / oa / od.
  std::string tag;
  /// EffectAtom: g / ng.
  std::string goal_tag;
  /// Predicate or schema name.
  std::string name;

  static VertexColor object(std::vector<std::string> statics);
  static VertexColor atom(std::string tag, std::string predicate);
  static VertexColor action(std::string schema);
  static VertexColor effect_atom(std::string alpha, std::string beta, std::string predicate);

  /// Canonical text, e.g. `ob{truck}`, `ug|on`, `act|stack`, `oa|g|on`.
  std::string str() const;
  friend bool operator==(const VertexColor&, const VertexColor&) = default;
};

struct LabeledEdge {
  int u = 0;
  int v = 0;
  int label = 1;
  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Undirected, vertex-colored, edge-labeled graph.
class LabeledGraph {
 public:
  int add_vertex(VertexColor color);
  void add_edge(int u, int v, int label);

  int num_vertices() const { return static_cast<int>(colors_.size()); }
  const std::vector<VertexColor>& colors() const { return colors_; }
  const std::vector<LabeledEdge>& edges() const { return edges_; }
  int degree(int v) const;

  /// `v <id> <color>` lines followed by `e <u> <v> <label>` lines.
  std::string dump() const;

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;

 private:
  std::vector<VertexColor> colors_;
  std::vector<LabeledEdge> edges_;
};

enum class GraphKind { AOAG, AEG };
std::string to_string(GraphKind kind);
/// Accepts `aoag` / `aeg` in any case; throws std::invalid_argument otherwise.
GraphKind parse_graph_kind(const std::string& text);

/// Object vertices first (declaration order), then fluent atoms of s ∪ G by
/// atom id. Static atoms only contribute unary predicates to object colors.
LabeledGraph ilg(const Task& task, const State& state);

struct EffectPartition {
  std::vector<AtomId> unav_add;
  std::vector<AtomId> unav_del;
  std::vector<AtomId> opt_add;
  std::vector<AtomId> opt_del;
  /// (s \ unav_del) ∪ unav_add.
  State successor;
};

/// Throws EmptyActionSet for an empty B. All sets are empty when B = A_s.
EffectPartition effect_partition(const StateView& view, const std::vector<GroundAction>& action_set);

/// ρ = ⊥: ILG(s). |B| = 1: ILG(apply(s, a)). A_s ⊆ B: ILG(s). Otherwise the
/// ILG plus one vertex per action, joined to its arguments.
LabeledGraph aoag(const StateView& view, const PartialAction& rho);
LabeledGraph aoag(const Task& task, const State& state, const PartialAction& rho);

LabeledGraph aeg(const StateView& view, const PartialAction& rho);
LabeledGraph aeg(const Task& task, const State& state, const PartialAction& rho);

LabeledGraph build_graph(GraphKind kind, const StateView& view, const PartialAction& rho);

}  // namespace liftplan

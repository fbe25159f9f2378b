#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "liftplan/relaxation.hpp"
#include "oracle.hpp"

using namespace liftplan;
using namespace liftplan::testing;

namespace {

GroundAction act(const Task& t, const char* schema, std::vector<const char*> args) {
  GroundAction a{*t.find_schema(schema), {}};
  for (auto* o : args) a.args.push_back(*t.find_object(o));
  return a;
}

AtomId atom(const Task& t, const char* pred, std::vector<const char*> args) {
  GroundAtom g{*t.find_predicate(pred), {}};
  for (auto* o : args) g.args.push_back(*t.find_object(o));
  return t.atom_id(g);
}

std::vector<AtomId> keys(const std::map<AtomId, int>& m) {
  std::vector<AtomId> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

/// Reachable atoms of the restricted task via the ground oracle, with the
/// materialized epsilon renamed to the program's epsilon id.
std::vector<AtomId> oracle_restricted(const Task& task, const State& s, const std::vector<GroundAction>& b) {
  Task m = materialize(restrict_task(task, b));
  const AtomId m_eps = m.num_atoms() - 1;
  std::vector<AtomId> out;
  for (AtomId id : keys(ground_relaxed_layers(m, s.atoms()))) {
    out.push_back(id == m_eps ? task.num_atoms() : id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Datalog, PickupRule) {
  Task t = bw2();
  DatalogProgram p = build_datalog(t);
  std::string text = p.to_string();
  EXPECT_NE(text.find("holding(?x) :- clear(?x), ontable(?x), handempty."), std::string::npos) << text;
  EXPECT_NE(text.find("goal :- on(a, b)."), std::string::npos) << text;
  // 1 + 3 + 3 + 2 add effects, plus the goal rule.
  EXPECT_EQ(p.rules().size(), 10u);
  DatalogProgram r = build_datalog(t, true);
  EXPECT_NE(r.to_string().find("holding(?x) :- clear(?x), ontable(?x), handempty, epsilon."), std::string::npos);
}

TEST(Datalog, SchemaWithoutAddsHasNoRules) {
  Task t = parse_instance(R"((define (problem p) (:domain d) (:objects o) (:init (p o)) (:goal (and (p o)))))",
                          parse_domain(R"((define (domain d) (:predicates (p ?x) (q ?x))
                            (:action del :parameters (?x) :precondition (p ?x) :effect (not (q ?x)))))"));
  DatalogProgram p = build_datalog(t);
  ASSERT_EQ(p.rules().size(), 1u);
  EXPECT_EQ(p.rules()[0].origin.kind, RuleOrigin::Kind::Goal);
  RelaxedReachability rr(p);
  State s = State::initial(t);
  auto res = rr.reach(StateView(t, s));
  // Facts only: the state plus static atoms.
  std::vector<AtomId> facts = s.atoms();
  facts.insert(facts.end(), t.static_atoms().begin(), t.static_atoms().end());
  std::sort(facts.begin(), facts.end());
  EXPECT_EQ(res.reachable, facts);
  EXPECT_EQ(res.goal_layer, 0);
}

TEST(RelaxedReach, Bw2AllFluentsReachable) {
  Task t = bw2();
  DatalogProgram p = build_datalog(t);
  RelaxedReachability rr(p);
  State s0 = State::initial(t);
  auto res = rr.reach(StateView(t, s0));
  EXPECT_TRUE(res.goal_reached);
  EXPECT_TRUE(std::binary_search(res.reachable.begin(), res.reachable.end(), atom(t, "holding", {"a"})));
  EXPECT_TRUE(std::binary_search(res.reachable.begin(), res.reachable.end(), atom(t, "on", {"a", "b"})));
  // 2 clear, 2 ontable, 2 holding, handempty, and all four on(x,y): the
  // relaxation lets stack(a,a) fire once holding(a) and clear(a) coexist.
  EXPECT_EQ(res.reachable.size(), 11u);
  EXPECT_EQ(res.reachable, keys(ground_relaxed_layers(t, s0.atoms())));
}

TEST(HFF, Bw2Values) {
  Task t = bw2();
  FFHeuristic h(t);
  State s0 = State::initial(t);
  EXPECT_EQ(h.evaluate(StateView(t, s0)), 2.0);
  EXPECT_EQ(min_relaxed_plan(t, s0), 2);
  State goal = apply(t, apply(t, s0, act(t, "pickup", {"a"})), act(t, "stack", {"a", "b"}));
  EXPECT_EQ(h.evaluate(StateView(t, goal)), 0.0);
}

TEST(HFF, UnreachableGoalIsDeadEnd) {
  Task t = load(kNoActionDomain, kNoActionProblem);
  FFHeuristic h(t);
  EXPECT_EQ(h.evaluate(StateView(t, State::initial(t))), kDeadEnd);
}

TEST(HFF, ZeroIffGoalAndDeadEndIffUnreachable) {
  for (auto [dom, prob] : {std::pair{kBlocksDomain, kBw3Reverse}, std::pair{kTrucksDomain, kTrucksProblem},
                           std::pair{kSpannerDomain, kSpannerProblem}}) {
    Task t = load(dom, prob);
    FFHeuristic h(t);
    std::mt19937 rng(11);
    auto goal_ids = t.goal_ids();
    for (const State& s : random_states(t, 25, rng)) {
      double v = h.evaluate(StateView(t, s));
      auto layers = ground_relaxed_layers(t, s.atoms());
      bool reachable = std::all_of(goal_ids.begin(), goal_ids.end(), [&](AtomId g) { return layers.count(g); });
      EXPECT_EQ(v == kDeadEnd, !reachable);
      EXPECT_EQ(v == 0.0, is_goal(t, s));
    }
  }
}

TEST(RelaxedReach, LayersMatchGroundOracle) {
  for (auto [dom, prob] : {std::pair{kBlocksDomain, kBw3Reverse}, std::pair{kTrucksDomain, kTrucksProblem},
                           std::pair{kSpannerDomain, kSpannerProblem}}) {
    Task t = load(dom, prob);
    DatalogProgram p = build_datalog(t);
    RelaxedReachability rr(p);
    std::mt19937 rng(5);
    for (const State& s : random_states(t, 20, rng)) {
      auto res = rr.reach(StateView(t, s));
      auto oracle = ground_relaxed_layers(t, s.atoms());
      ASSERT_EQ(res.reachable, keys(oracle));
      for (const auto& [id, l] : oracle) ASSERT_EQ(rr.layer(id), l) << t.atom_to_string(id);
    }
  }
}

TEST(Restricted, Bw2Values) {
  Task t = bw2();
  RestrictedFFHeuristic h(t);
  State s0 = State::initial(t);
  StateView v(t, s0);
  EXPECT_EQ(h.evaluate_set(v, {act(t, "pickup", {"a"})}), 2);
  EXPECT_EQ(h.evaluate_set(v, {act(t, "pickup", {"b"})}), 3);
  EXPECT_EQ(min_relaxed_plan(materialize(restrict_task(t, {act(t, "pickup", {"a"})})), s0), 2);
  EXPECT_EQ(min_relaxed_plan(materialize(restrict_task(t, {act(t, "pickup", {"b"})})), s0), 3);
  // Interleaving does not leak state between calls.
  EXPECT_EQ(h.evaluate_set(v, {act(t, "pickup", {"a"})}), 2);
}

TEST(Restricted, EmptySet) {
  Task t = bw2();
  RestrictedFFHeuristic h(t);
  State s0 = State::initial(t);
  EXPECT_THROW(h.evaluate_set(StateView(t, s0), {}), EmptyActionSet);
  DatalogProgram p = build_datalog(t, true);
  RelaxedReachability rr(p);
  auto res = rr.reach(StateView(t, s0));
  EXPECT_FALSE(res.goal_reached);
  EXPECT_EQ(res.reachable, s0.atoms());
}

TEST(Restricted, GoalStateIsZero) {
  Task t = bw2();
  RestrictedFFHeuristic h(t);
  State s0 = State::initial(t);
  State goal = apply(t, apply(t, s0, act(t, "pickup", {"a"})), act(t, "stack", {"a", "b"}));
  StateView v(t, goal);
  for (const auto& a : instantiations(v, PartialAction::root())) EXPECT_EQ(h.evaluate_set(v, {a}), 0);
  EXPECT_EQ(h.evaluate_set(v, {}), 0);
}

TEST(Restricted, TemporarySchemasMaterialize) {
  Task t = bw2();
  GroundAction a = act(t, "pickup", {"a"});
  Task m = materialize(restrict_task(t, {a}));
  ASSERT_EQ(m.schemas.size(), t.schemas.size() + 1);
  const ActionSchema& copy = m.schemas.back();
  EXPECT_TRUE(copy.params.empty());
  EXPECT_EQ(copy.pre.size(), t.schemas[a.schema].pre.size());
  EXPECT_EQ(copy.add.size(), t.schemas[a.schema].add.size() + 1);
  for (std::size_t i = 0; i < t.schemas.size(); ++i) EXPECT_EQ(m.schemas[i].pre.size(), t.schemas[i].pre.size() + 1);
  State s0 = State::initial(t);
  EXPECT_EQ(materialize(restrict_task(t, instantiations(t, s0, PartialAction::root()))).schemas.size(),
            t.schemas.size() + 2);
}

TEST(Restricted, FullSetAndSingletonsMatchOracle) {
  for (auto [dom, prob] : {std::pair{kBlocksDomain, kBw3Reverse}, std::pair{kTrucksDomain, kTrucksProblem},
                           std::pair{kSpannerDomain, kSpannerProblem}}) {
    Task t = load(dom, prob);
    DatalogProgram plain = build_datalog(t);
    DatalogProgram restricted = build_datalog(t, true);
    RelaxedReachability rp(plain);
    RelaxedReachability rr(restricted);
    std::mt19937 rng(17);
    for (const State& s : random_states(t, 10, rng)) {
      StateView v(t, s);
      auto applicable = instantiations(v, PartialAction::root());
      if (applicable.empty()) continue;
      auto full = rr.reach(v, applicable).reachable;
      ASSERT_EQ(full, oracle_restricted(t, s, applicable));
      auto expected = rp.reach(v).reachable;
      expected.push_back(t.num_atoms());
      ASSERT_EQ(full, expected);
      for (const auto& a : applicable) {
        auto single = rr.reach(v, {a}).reachable;
        ASSERT_EQ(single, oracle_restricted(t, s, {a}));
        std::vector<AtomId> grown = s.atoms();
        for (AtomId id : add_ids(t, a)) grown.push_back(id);
        auto base = keys(ground_relaxed_layers(t, State(grown).atoms()));
        base.push_back(t.num_atoms());
        ASSERT_EQ(single, base);
      }
    }
  }
}

TEST(SearchWithFF, Bw2StateSpace) {
  Task t = bw2();
  FFHeuristic h(t);
  auto r = gbfs_state(t, h);
  ASSERT_EQ(r.status, SearchStatus::Solved);
  EXPECT_EQ(r.plan.actions, (std::vector<GroundAction>{act(t, "pickup", {"a"}), act(t, "stack", {"a", "b"})}));
  EXPECT_EQ(r.plan.cost(), bfs(t).plan.cost());
}

TEST(SearchWithFF, Bw2PartialSpace) {
  Task t = bw2();
  RestrictedFFHeuristic h(t);
  auto r = gbfs_partial(t, h);
  ASSERT_EQ(r.status, SearchStatus::Solved);
  EXPECT_EQ(r.plan.cost(), 2u);
  EXPECT_EQ(r.plan.cost(), bfs(t).plan.cost());
}

TEST(SearchWithFF, SmallDomainsSolved) {
  for (auto [dom, prob] : {std::pair{kBlocksDomain, kBw3Reverse}, std::pair{kTrucksDomain, kTrucksProblem},
                           std::pair{kSpannerDomain, kSpannerProblem}}) {
    Task t = load(dom, prob);
    FFHeuristic ff(t);
    RestrictedFFHeuristic rff(t);
    RootStateHeuristic adapted(rff);
    for (auto r : {gbfs_state(t, ff), gbfs_partial(t, rff), gbfs_state(t, adapted)}) {
      ASSERT_EQ(r.status, SearchStatus::Solved) << t.domain_name;
      State s = State::initial(t);
      for (const auto& a : r.plan.actions) s = apply(t, s, a);
      EXPECT_TRUE(is_goal(t, s));
    }
  }
}

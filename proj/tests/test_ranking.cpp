#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "liftplan/ranking.hpp"
#include "synthetic.hpp"

using namespace liftplan;
using namespace liftplan::testing;

namespace {

RankingTuple tuple(FeatureVector x, FeatureVector xp, double delta, double sigma = 1.0) {
  return {std::move(x), std::move(xp), delta, sigma, TupleKind::LayerPredecessor};
}

double primal_objective(const Dataset& data, const std::vector<double>& w, double C) {
  double l1 = 0.0;
  for (double v : w) l1 += std::abs(v);
  return C * ranking_loss(data, w) + l1;
}

FeatureMap aoag_phi(ColorDictionary& dict) {
  return [&dict](const StateView& v, const PartialAction& rho) { return phi(v, rho, GraphKind::AOAG, 2, dict); };
}

Plan bw2_plan(const Task& t) { return parse_plan(t, "(pickup a)\n(stack a b)\n"); }

std::vector<TrainingInstance> bw_instances() {
  std::vector<TrainingInstance> out;
  Task t2 = bw2();
  out.push_back({"bw2", t2, bw2_plan(t2)});
  Task t3 = load(kBlocksDomain, kBw3Reverse);
  auto r = bfs(t3);
  out.push_back({"bw3", t3, r.plan});
  return out;
}

}  // namespace

TEST(Lp, SingleTupleWeightDependsOnC) {
  Dataset d{tuple({{0, 1}}, {}, 1.0)};
  auto hi = train_lp(d, 10.0);
  ASSERT_EQ(hi.w.size(), 1u);
  EXPECT_NEAR(hi.w[0], 1.0, 1e-9);
  EXPECT_NEAR(hi.slacks[0], 0.0, 1e-9);
  EXPECT_NEAR(hi.objective, 1.0, 1e-9);

  auto lo = train_lp(d, 0.5);
  EXPECT_NEAR(lo.w[0], 0.0, 1e-9);
  EXPECT_NEAR(lo.slacks[0], 1.0, 1e-9);
  EXPECT_NEAR(lo.objective, 0.5, 1e-9);
}

TEST(Lp, ContradictoryPairCancels) {
  Dataset d{tuple({{0, 1}}, {}, 1.0), tuple({}, {{0, 1}}, 1.0)};
  auto s = train_lp(d, 1.0);
  EXPECT_NEAR(s.w[0], 0.0, 1e-9);
  EXPECT_NEAR(s.slacks[0], 1.0, 1e-9);
  EXPECT_NEAR(s.slacks[1], 1.0, 1e-9);
}

TEST(Lp, ThreeTuples) {
  Dataset d{tuple({{0, 1}}, {}, 1.0), tuple({{1, 1}}, {}, 1.0), tuple({{0, 1}, {1, 1}}, {}, 2.0)};
  auto s = train_lp(d, 10.0);
  EXPECT_NEAR(s.w[0], 1.0, 1e-9);
  EXPECT_NEAR(s.w[1], 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(satisfaction_rate(d, s.w), 1.0);
}

TEST(Lp, ZeroCGivesZeroWeights) {
  Dataset d{tuple({{0, 2}}, {{1, 1}}, 1.0), tuple({{1, 3}}, {}, 1.0)};
  auto s = train_lp(d, 0.0);
  for (double w : s.w) EXPECT_EQ(w, 0.0);
}

TEST(Lp, IdenticalVectorsKeepSlack) {
  Dataset d{tuple({{0, 1}}, {{0, 1}}, 1.0), tuple({{1, 1}}, {}, 1.0)};
  auto s = train_lp(d, 10.0, 3);
  ASSERT_EQ(s.w.size(), 3u);
  EXPECT_NEAR(s.slacks[0], 1.0, 1e-9);
  EXPECT_NEAR(s.w[1], 1.0, 1e-9);
  EXPECT_EQ(s.w[0], 0.0);
  EXPECT_EQ(s.w[2], 0.0);
}

TEST(Lp, RejectsBadInput) {
  EXPECT_THROW(train_lp({}, 1.0), std::invalid_argument);
  EXPECT_THROW(train_lp({tuple({{0, 1}}, {}, 1.0)}, -1.0), std::invalid_argument);
  EXPECT_THROW(train_lp({tuple({{4, 1}}, {}, 1.0)}, 1.0, 2), std::invalid_argument);
}

// Random LPs: the returned w must satisfy strong duality against the
// solver's dual value and beat random perturbations.
TEST(Lp, RandomInstancesAreOptimal) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> feat(0, 5), cnt(0, 3), len(0, 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    Dataset d;
    const int m = 3 + trial % 12;
    for (int i = 0; i < m; ++i) {
      auto vec = [&] {
        std::map<int, int> acc;
        for (int j = len(rng); j > 0; --j) acc[feat(rng)] += 1 + cnt(rng);
        return FeatureVector(acc.begin(), acc.end());
      };
      d.push_back(tuple(vec(), vec(), i % 3 == 0 ? 0.0 : 1.0, 0.5 + (i % 4) * 0.5));
    }
    const double C = std::pow(10.0, trial % 5 - 2);
    auto s = train_lp(d, C, 6);
    const double obj = primal_objective(d, s.w, C);
    EXPECT_NEAR(obj, s.dual_objective, 1e-7 * std::max(1.0, obj)) << "trial " << trial;
    EXPECT_LT(s.slack_mismatch, 1e-7) << "trial " << trial;
    for (int k = 0; k < 20; ++k) {
      auto w = s.w;
      for (auto& v : w) v += 0.1 * unit(rng);
      EXPECT_GE(primal_objective(d, w, C), obj - 1e-9);
    }
  }
}

TEST(Tuning, TiesGoToSmallestC) {
  Dataset train{tuple({{0, 1}}, {}, 1.0)};
  auto r = tune_C(train, {}, {10.0, 1.0, 0.01, 100.0});
  EXPECT_DOUBLE_EQ(r.C, 0.01);
  EXPECT_EQ(r.losses.size(), 4u);
}

TEST(Tuning, PicksLowestValidationLoss) {
  Dataset train{tuple({{0, 1}}, {}, 1.0)};
  Dataset val{tuple({{0, 1}}, {}, 1.0)};
  auto r = tune_C(train, val, default_c_grid());
  EXPECT_DOUBLE_EQ(r.C, 10.0);
  EXPECT_NEAR(r.validation_loss, 0.0, 1e-9);
}

TEST(Tuning, SingleGridValue) {
  Dataset train{tuple({{0, 1}}, {}, 1.0)};
  EXPECT_DOUBLE_EQ(tune_C(train, train, {3.0}).C, 3.0);
  EXPECT_THROW(tune_C(train, train, {}), std::invalid_argument);
}

TEST(Tuning, SplitSize) {
  EXPECT_EQ(train_split_size(10), 8u);
  EXPECT_EQ(train_split_size(2), 1u);
  EXPECT_EQ(train_split_size(3), 2u);
  EXPECT_EQ(train_split_size(5), 4u);
  EXPECT_THROW(train_split_size(1), std::invalid_argument);
}

TEST(Dataset, Bw2FirstStep) {
  Task t = bw2();
  ColorDictionary dict;
  Plan one{{bw2_plan(t).actions[0]}};
  Plan full = bw2_plan(t);
  auto d = generate_dataset(t, full, aoag_phi(dict), Importances::defaults(GraphKind::AOAG));
  std::array<int, 4> step0{};
  // Step 0 tuples precede step 1 tuples; count until the first repeat of a
  // layer predecessor after a state sibling.
  std::size_t i = 0;
  for (; i < d.size(); ++i) {
    if (i > 0 && d[i].kind == TupleKind::LayerPredecessor && d[i - 1].kind == TupleKind::StateSibling) break;
    ++step0[static_cast<int>(d[i].kind)];
  }
  EXPECT_EQ(i, 6u);
  EXPECT_EQ(step0, (std::array<int, 4>{2, 1, 2, 1}));
  for (const auto& tp : d) EXPECT_DOUBLE_EQ(tp.sigma, Importances::defaults(GraphKind::AOAG).of(tp.kind));
  EXPECT_THROW(generate_dataset(t, one, aoag_phi(dict), {}), InvalidPlan);
}

TEST(Dataset, DegenerateTask) {
  auto f = synthetic_family(1, 1, 0, 1);
  ColorDictionary dict;
  auto d = generate_dataset(f.task, f.plan, aoag_phi(dict), {});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].kind, TupleKind::LayerPredecessor);
  EXPECT_EQ(d[1].kind, TupleKind::StatePredecessor);
}

TEST(Dataset, EmptyPlan) {
  Task t = load(kBlocksDomain, R"((define (problem p) (:domain blocksworld) (:objects a)
    (:init (ontable a) (clear a) (handempty)) (:goal (and (ontable a)))))");
  ColorDictionary dict;
  EXPECT_TRUE(generate_dataset(t, {}, aoag_phi(dict), {}).empty());
}

TEST(Dataset, TuplesRelateApplicableNodes) {
  Task t = load(kBlocksDomain, kBw3Reverse);
  Plan plan = bfs(t).plan;
  std::vector<std::pair<State, PartialAction>> nodes;
  // Record every node the generator featurises, then check the relations.
  FeatureMap f = [&](const StateView& v, const PartialAction& rho) {
    nodes.emplace_back(v.state(), rho);
    return FeatureVector{{static_cast<int>(nodes.size() - 1), 1}};
  };
  auto d = generate_dataset(t, plan, f, {});
  for (const auto& tp : d) {
    const auto& [s1, r1] = nodes.at(tp.x[0].first);
    const auto& [s2, r2] = nodes.at(tp.x_prime[0].first);
    EXPECT_TRUE(r1.is_root() || has_instantiation(StateView(t, s1), r1));
    EXPECT_TRUE(r2.is_root() || has_instantiation(StateView(t, s2), r2));
    EXPECT_EQ(s1, s2);
    switch (tp.kind) {
      case TupleKind::LayerPredecessor: EXPECT_EQ(specificity(r1), specificity(r2) + 1); break;
      case TupleKind::LayerSibling: EXPECT_EQ(specificity(r1), specificity(r2)); EXPECT_NE(r1, r2); break;
      case TupleKind::StatePredecessor: EXPECT_TRUE(r2.is_root()); EXPECT_GE(specificity(r1), 1); break;
      case TupleKind::StateSibling: EXPECT_TRUE(r1.is_full(t) && r2.is_full(t)); EXPECT_NE(r1, r2); break;
    }
  }
}

TEST(Dataset, InapplicableStepRejected) {
  Task t = bw2();
  ColorDictionary dict;
  Plan bad = parse_plan(t, "(stack a b)\n");
  EXPECT_THROW(generate_dataset(t, bad, aoag_phi(dict), {}), InvalidPlan);
}

TEST(Dataset, ClosedFormMatchesFamily) {
  for (int alpha : {1, 2}) {
    for (int beta : {1, 2, 3}) {
      for (int k : {0, 1, 2}) {
        for (int n : {1, 3}) {
          auto f = synthetic_family(alpha, beta, k, n);
          ColorDictionary dict;
          auto d = generate_dataset(f.task, f.plan, aoag_phi(dict), {});
          EXPECT_EQ(static_cast<std::int64_t>(d.size()), dataset_size_closed_form(alpha, beta, k, n))
              << alpha << " " << beta << " " << k << " " << n;
        }
      }
    }
  }
}

TEST(Dataset, CrossStatePairsAddOnePerStep) {
  auto f = synthetic_family(2, 2, 1, 3);
  ColorDictionary dict;
  DatasetOptions opt;
  opt.cross_state_pairs = true;
  auto d = generate_dataset(f.task, f.plan, aoag_phi(dict), {}, opt);
  EXPECT_EQ(static_cast<std::int64_t>(d.size()), dataset_size_closed_form(2, 2, 1, 3) + 2);
}

TEST(Dataset, SiblingCap) {
  auto f = synthetic_family(2, 3, 2, 1);
  ColorDictionary dict;
  DatasetOptions opt;
  opt.sibling_cap = 1;
  auto d = generate_dataset(f.task, f.plan, aoag_phi(dict), {}, opt);
  // 2(k+1) predecessors, at most one sibling per layer and one state sibling.
  EXPECT_EQ(d.size(), 6u + 3u + 1u);
}

TEST(Dataset, ClosedFormValues) {
  EXPECT_EQ(dataset_size_closed_form(1, 1, 0, 1), 2);
  EXPECT_EQ(dataset_size_closed_form(1, 1, 1, 1), 4);
  EXPECT_EQ(dataset_size_closed_form(2, 2, 1, 1), 11);
  EXPECT_EQ(dataset_size_closed_form(2, 2, 1, 0), 0);
  // alpha=2, beta=3, k=1, n=1: 4 + 5 + (1 + 5).
  EXPECT_EQ(dataset_size_closed_form(2, 3, 1, 1), 15);
}

TEST(Dataset, CsvHasOneLinePerTuple) {
  Dataset d{tuple({{0, 1}, {3, 2}}, {}, 1.0)};
  EXPECT_EQ(dataset_to_csv(d), "kind,delta,sigma,x,x_prime\nlp,1,1,0:1 3:2,\n");
}

TEST(Model, RoundTrip) {
  TrainConfig cfg;
  cfg.fixed_C = 10.0;
  TrainReport rep;
  auto model = train_model(bw_instances(), cfg, &rep);
  EXPECT_GT(rep.tuples, 0u);
  EXPECT_EQ(model.domain, "blocksworld");
  const std::string text = model_to_string(model);
  auto back = model_from_string(text);
  EXPECT_EQ(back.dict, model.dict);
  EXPECT_EQ(back.weights, model.weights);
  EXPECT_EQ(back.iterations, model.iterations);
  EXPECT_EQ(back.graph_kind, model.graph_kind);
  EXPECT_EQ(model_to_string(back), text);

  Task t = load(kBlocksDomain, kBw3Reverse);
  State s = State::initial(t);
  StateView v(t, s);
  for (const auto& rho : children(v, PartialAction::root())) {
    EXPECT_EQ(evaluate(model, v, rho), evaluate(back, v, rho));
  }

  auto path = std::filesystem::temp_directory_path() / "liftplan_model_test.txt";
  save_model(model, path.string());
  EXPECT_EQ(load_model(path.string()).weights, model.weights);
  std::filesystem::remove(path);
}

TEST(Model, DotProductEvaluation) {
  EXPECT_DOUBLE_EQ(dot({2.0, -1.0}, {{0, 3}, {1, 4}}), 2.0);
  EXPECT_DOUBLE_EQ(dot({0.0, 0.0}, {{0, 3}, {1, 4}}), 0.0);
}

TEST(Model, PrefersPlanActions) {
  TrainConfig cfg;
  cfg.fixed_C = 10.0;
  auto insts = bw_instances();
  auto model = train_model(insts, cfg);
  // The plan's first action should score no worse than its siblings.
  const Task& t = insts[0].task;
  State s = State::initial(t);
  StateView v(t, s);
  const double chosen = evaluate(model, v, PartialAction::of(insts[0].plan.actions[0]));
  for (const auto& a : instantiations(v, PartialAction::root())) {
    EXPECT_LE(chosen, evaluate(model, v, PartialAction::of(a)) + 1e-9);
  }
  EXPECT_LT(chosen, evaluate(model, v, PartialAction::root()));
}

TEST(Model, CorruptionDetected) {
  LinearModel m;
  m.dict.lookup("c|ag|on", 0);
  m.dict.lookup("w|0|(1,0)", 1);
  m.weights = {1.5, -0.25};
  m.C = 1.0;
  const std::string text = model_to_string(m);
  EXPECT_EQ(model_from_string(text).dict.iteration(1), 1);

  EXPECT_THROW(model_from_string(text.substr(0, text.size() / 2)), CorruptModel);
  std::string tampered = text;
  tampered.replace(tampered.find("1.5"), 3, "2.5");
  EXPECT_THROW(model_from_string(tampered), CorruptModel);
  std::string v2 = text;
  v2.replace(0, 10, "LLMODEL v2");
  EXPECT_THROW(model_from_string(v2), FormatVersionMismatch);
  EXPECT_THROW(model_from_string("hello\n"), CorruptModel);
  EXPECT_THROW(model_from_string(""), CorruptModel);
}

TEST(Model, FrozenDictionaryIgnoresUnseen) {
  TrainConfig cfg;
  cfg.fixed_C = 1.0;
  auto model = train_model(bw_instances(), cfg);
  const int before = model.dict.size();
  Task t = load(kTrucksDomain, kTrucksProblem);
  State s = State::initial(t);
  StateView v(t, s);
  EXPECT_NO_THROW(evaluate(model, v, PartialAction::root()));
  EXPECT_EQ(model.dict.size(), before);
}

TEST(Pipeline, TunesOnSplit) {
  TrainConfig cfg;
  TrainReport rep;
  train_model(bw_instances(), cfg, &rep);
  EXPECT_EQ(rep.train_instances, 1u);
  EXPECT_EQ(rep.validation_instances, 1u);
  EXPECT_EQ(rep.tuning.losses.size(), default_c_grid().size());
  EXPECT_LT(rep.slack_mismatch, 1e-6);
  std::size_t total = 0;
  for (auto c : rep.kind_counts) total += c;
  EXPECT_EQ(total, rep.tuples);
}

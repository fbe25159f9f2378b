#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "liftplan/bench.hpp"
#include "oracle.hpp"

using namespace liftplan;
using namespace liftplan::testing;

namespace {

Task parse(const GeneratedInstance& g) { return parse_instance(g.problem_pddl, parse_domain(g.domain_pddl)); }

RunRecord solved(std::string inst, std::string config, std::size_t len) {
  RunRecord r{"bw", std::move(inst), std::move(config), Outcome::Solved, len, {}};
  r.stats.expansions = 4;
  r.stats.generated = 10;
  r.stats.evaluations = 7;
  r.stats.wall_time = 0.0125;
  return r;
}

RunRecord unsolved(std::string inst, std::string config) {
  return {"bw", std::move(inst), std::move(config), Outcome::Timeout, std::nullopt, {}};
}

}  // namespace

TEST(Validate, Bw2) {
  Task t = bw2();
  EXPECT_TRUE(validate_plan(t, parse_plan(t, "(pickup a)\n(stack a b)\n")).valid);

  auto bad = validate_plan(t, parse_plan(t, "(stack a b)\n"));
  EXPECT_FALSE(bad.valid);
  EXPECT_EQ(bad.step, 0u);
  EXPECT_EQ(bad.reason, "precondition (holding a)");

  auto short_plan = validate_plan(t, parse_plan(t, "(pickup a)\n"));
  EXPECT_FALSE(short_plan.valid);
  EXPECT_EQ(short_plan.step, 1u);
}

TEST(Validate, EmptyPlanOnSatisfiedGoal) {
  Task t = load(kBlocksDomain, R"((define (problem p) (:domain blocksworld) (:objects a)
    (:init (ontable a) (clear a) (handempty)) (:goal (and (ontable a)))))");
  EXPECT_TRUE(validate_plan(t, {}).valid);
}

TEST(Validate, StaticPreconditions) {
  Task t = load(kSpannerDomain, kSpannerProblem);
  auto r = bfs(t);
  ASSERT_EQ(r.status, SearchStatus::Solved);
  EXPECT_TRUE(validate_plan(t, r.plan).valid);
}

TEST(StatsCsv, RoundTrip) {
  std::vector<RunRecord> rows{solved("p1", "partial-ff", 6), unsolved("p2", "partial-ff")};
  std::string text = stats_csv_header() + "\n";
  for (const auto& r : rows) text += to_csv_row(r) + "\n";
  auto back = parse_stats_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].plan_length, 6u);
  EXPECT_EQ(back[0].stats.expansions, 4u);
  EXPECT_NEAR(back[0].stats.wall_time, 0.0125, 1e-9);
  EXPECT_EQ(back[1].outcome, Outcome::Timeout);
  EXPECT_FALSE(back[1].plan_length);
  EXPECT_EQ(to_csv_row(back[0]), to_csv_row(rows[0]));
  EXPECT_EQ(to_csv_row(rows[0]), "bw,p1,partial-ff,solved,6,4,7,10,2.5000,12.500");
}

TEST(StatsCsv, Malformed) {
  const std::string h = stats_csv_header() + "\n";
  EXPECT_THROW(parse_stats_csv(""), MalformedCSV);
  EXPECT_THROW(parse_stats_csv("a,b,c\n"), MalformedCSV);
  EXPECT_THROW(parse_stats_csv(h + "bw,p,c,solved,3,1,1\n"), MalformedCSV);
  EXPECT_THROW(parse_stats_csv(h + "bw,p,c,won,3,1,1,1,1.0,2\n"), MalformedCSV);
  EXPECT_THROW(parse_stats_csv(h + "bw,p,c,solved,,1,1,1,1.0,2\n"), MalformedCSV);
  EXPECT_THROW(parse_stats_csv(h + "bw,p,c,timeout,4,1,1,1,1.0,2\n"), MalformedCSV);
  EXPECT_THROW(parse_stats_csv(h + "bw,p,c,solved,x,1,1,1,1.0,2\n"), MalformedCSV);
  EXPECT_NO_THROW(parse_stats_csv(h));
}

TEST(StatsCsv, SanitizesIdentifiers) {
  EXPECT_EQ(sanitize_identifier("a b,c"), "a_b_c");
  RunRecord r = solved("my inst", "x,y", 1);
  auto back = parse_stats_csv(stats_csv_header() + "\n" + to_csv_row(r) + "\n");
  EXPECT_EQ(back[0].instance, "my_inst");
  EXPECT_EQ(back[0].config, "x_y");
}

TEST(Report, QualityIsBestOverCost) {
  std::vector<RunRecord> rows{solved("p1", "A", 10), solved("p1", "B", 20), unsolved("p2", "A"),
                              solved("p2", "B", 5)};
  auto q = quality_scores(rows);
  EXPECT_DOUBLE_EQ(q[0], 1.0);
  EXPECT_DOUBLE_EQ(q[1], 0.5);
  EXPECT_DOUBLE_EQ(q[2], 0.0);
  EXPECT_DOUBLE_EQ(q[3], 1.0);

  auto rep = build_report(rows);
  ASSERT_EQ(rep.size(), 2u);
  EXPECT_EQ(rep[0].config, "A");
  EXPECT_EQ(rep[0].coverage, 1u);
  EXPECT_DOUBLE_EQ(rep[0].quality, 1.0);
  EXPECT_EQ(rep[1].coverage, 2u);
  EXPECT_DOUBLE_EQ(rep[1].quality, 1.5);
}

TEST(Report, SingleConfigScoresOne) {
  std::vector<RunRecord> rows{solved("p1", "A", 10), solved("p2", "A", 3), unsolved("p3", "A")};
  auto q = quality_scores(rows);
  EXPECT_EQ(q, (std::vector<double>{1.0, 1.0, 0.0}));
}

TEST(Report, Idempotent) {
  std::vector<RunRecord> rows{solved("p1", "A", 10), solved("p1", "B", 20), unsolved("p2", "A")};
  std::string text = stats_csv_header() + "\n";
  for (const auto& r : rows) text += to_csv_row(r) + "\n";
  const std::string once = report_to_csv(build_report(parse_stats_csv(text)));
  const std::string twice = report_to_csv(build_report(parse_stats_csv(text + text)));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once, "domain,config,instances,coverage,quality\nbw,A,2,1,1.0000\nbw,B,1,1,0.5000\n");
}

TEST(Generators, Deterministic) {
  for (const auto& fam : generator_families()) {
    auto a = generate(fam, 5, 0, 7);
    auto b = generate(fam, 5, 0, 7);
    EXPECT_EQ(a.problem_pddl, b.problem_pddl) << fam;
    EXPECT_EQ(a.domain_pddl, b.domain_pddl) << fam;
    EXPECT_NE(a.problem_pddl, generate(fam, 5, 0, 8).problem_pddl) << fam;
  }
  EXPECT_THROW(generate("sokoban", 3, 0, 1), std::invalid_argument);
  EXPECT_THROW(gen_blocksworld(0, 1), std::invalid_argument);
}

TEST(Generators, SmallInstancesSolvable) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    for (const auto& g : {gen_blocksworld(4, seed), gen_warehouse(3, seed), gen_ferry(2, 3, seed),
                          gen_blocksworld_large(6, 2, seed)}) {
      Task t = parse(g);
      auto r = bfs(t);
      ASSERT_EQ(r.status, SearchStatus::Solved) << g.name;
      EXPECT_TRUE(validate_plan(t, r.plan).valid) << g.name;
    }
  }
}

TEST(Generators, WarehouseBranchingIsQuadratic) {
  Task t = parse(gen_warehouse(10, 3));
  const auto applicable = ground_applicable_all(t, State::initial(t));
  EXPECT_GE(applicable.size(), 45u);
}

TEST(Generators, LargeBlocksworldGoalIsSmall) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Task t = parse(gen_blocksworld_large(50, 2, seed));
    EXPECT_EQ(t.objects.size(), 50u);
    std::set<ObjectId> mentioned;
    for (const auto& g : t.goal) mentioned.insert(g.args.begin(), g.args.end());
    EXPECT_LE(t.goal.size(), 2u);
    EXPECT_GE(t.goal.size(), 1u);
    EXPECT_LE(mentioned.size(), 4u);
  }
}

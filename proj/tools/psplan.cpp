// psplan: command-line front end for the liftplan library.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "liftplan/bench.hpp"
#include "liftplan/ranking.hpp"
#include "liftplan/relaxation.hpp"

namespace fs = std::filesystem;
using namespace liftplan;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitUnsolved = 1;
constexpr int kExitError = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("psplan");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LL_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Task load_task(const std::string& domain, const std::string& problem) {
  return parse_instance(read_file(problem), parse_domain(read_file(domain)));
}

SearchLimits make_limits(double time_limit, std::size_t memory_mb) {
  SearchLimits l;
  if (time_limit > 0) l.time_seconds = time_limit;
  if (memory_mb > 0) l.memory_mb = memory_mb;
  return l;
}

// --- solve ---------------------------------------------------------------

struct SolveArgs {
  std::string domain, problem;
  std::string search = "partial";
  std::string heuristic = "ff";
  double time_limit = 0;
  std::size_t memory_mb = 0;
  std::string output;
  std::string stats;
  std::string config;
};

int run_solve(const SolveArgs& a) {
  Task task = load_task(a.domain, a.problem);
  const bool partial = a.search == "partial";

  std::unique_ptr<LinearModel> model;
  std::string heur_tag = a.heuristic;
  if (a.heuristic.rfind("model:", 0) == 0) {
    model = std::make_unique<LinearModel>(load_model(a.heuristic.substr(6)));
    if (!model->domain.empty() && model->domain != task.domain_name) {
      spdlog::warn("model was trained on domain '{}', task is '{}'", model->domain, task.domain_name);
    }
    heur_tag = to_string(model->graph_kind);
  } else if (a.heuristic != "ff" && a.heuristic != "blind") {
    throw CLI::ValidationError("--heuristic", "expected ff, blind or model:<path>");
  }

  const SearchLimits limits = make_limits(a.time_limit, a.memory_mb);
  SearchResult result;
  if (model) {
    ModelHeuristic h(*model);
    result = partial ? gbfs_partial(task, h, limits) : gbfs_state(task, h, limits);
  } else if (a.heuristic == "blind") {
    BlindHeuristic h;
    result = partial ? gbfs_partial(task, h, limits) : gbfs_state(task, h, limits);
  } else if (partial) {
    RestrictedFFHeuristic h(task);
    result = gbfs_partial(task, h, limits);
  } else {
    FFHeuristic h(task);
    result = gbfs_state(task, h, limits);
  }

  RunRecord rec;
  rec.domain = task.domain_name;
  rec.instance = task.problem_name.empty() ? fs::path(a.problem).stem().string() : task.problem_name;
  rec.config = a.config.empty() ? a.search + "-" + heur_tag : a.config;
  rec.outcome = outcome_of(result);
  rec.stats = result.stats;
  if (rec.outcome == Outcome::Solved) {
    rec.plan_length = result.plan.cost();
    const auto check = validate_plan(task, result.plan);
    if (!check.valid) {
      spdlog::error("internal error: plan fails validation at step {}: {}", check.step, check.reason);
      rec.outcome = Outcome::Error;
      rec.plan_length.reset();
    } else {
      write_text(a.output, plan_to_string(task, result.plan));
    }
  }
  if (!a.stats.empty()) append_stats_row(a.stats, rec);

  spdlog::info("{}: {} ({} expansions, {} evaluations, {} generated, b = {:.2f}, {:.3f} s)", rec.instance,
               to_string(rec.outcome), result.stats.expansions, result.stats.evaluations, result.stats.generated,
               result.stats.branching_factor(), result.stats.wall_time);
  std::cerr << to_csv_row(rec) << "\n";
  if (rec.outcome == Outcome::Error) return kExitError;
  return rec.outcome == Outcome::Solved ? kExitSolved : kExitUnsolved;
}

// --- training data -------------------------------------------------------

struct TrainArgs {
  std::string domain;
  std::string instances;
  std::string plans;
  std::string graph = "aoag";
  int iterations = 2;
  std::string output;
  double C = 0;
  bool cross_state = false;
  std::size_t sibling_cap = 0;
};

fs::path find_plan(const fs::path& plans, const fs::path& problem) {
  for (const auto& name : {problem.stem().string() + ".plan", problem.filename().string() + ".plan",
                           problem.stem().string() + ".soln", problem.stem().string()}) {
    if (fs::is_regular_file(plans / name)) return plans / name;
  }
  throw InvalidPlan("no plan file for instance " + problem.filename().string() + " in " + plans.string());
}

std::vector<TrainingInstance> load_corpus(const TrainArgs& a) {
  const Task domain = parse_domain(read_file(a.domain));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.instances)) {
    if (!e.is_regular_file() || e.path().extension() != ".pddl") continue;
    if (fs::equivalent(e.path(), a.domain) || e.path().stem() == "domain") continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no problem files in " + a.instances);
  std::vector<TrainingInstance> out;
  for (const auto& f : files) {
    Task t = parse_instance(read_file(f.string()), domain);
    Plan p;
    try {
      p = parse_plan(t, read_file(find_plan(a.plans, f).string()));
    } catch (const InvalidPlan&) {
      throw;
    } catch (const std::exception& e) {
      throw InvalidPlan(f.filename().string() + ": " + e.what());
    }
    const auto check = validate_plan(t, p);
    if (!check.valid) {
      throw InvalidPlan(f.filename().string() + ": step " + std::to_string(check.step) + ": " + check.reason);
    }
    out.push_back({f.stem().string(), std::move(t), std::move(p)});
  }
  return out;
}

TrainConfig make_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.graph_kind = parse_graph_kind(a.graph);
  cfg.iterations = a.iterations;
  if (a.C > 0) cfg.fixed_C = a.C;
  cfg.dataset.cross_state_pairs = a.cross_state;
  if (a.sibling_cap > 0) cfg.dataset.sibling_cap = a.sibling_cap;
  return cfg;
}

int run_train(const TrainArgs& a) {
  auto corpus = load_corpus(a);
  TrainReport rep;
  LinearModel model = train_model(std::move(corpus), make_config(a), &rep);
  save_model(model, a.output);
  std::cout << "instances: " << rep.train_instances << " train, " << rep.validation_instances << " validation\n";
  std::cout << "tuples: " << rep.tuples << "\n";
  for (int k = 0; k < 4; ++k) {
    std::cout << "  " << to_string(static_cast<TupleKind>(k)) << ": " << rep.kind_counts[k] << "\n";
  }
  std::cout << "features: " << model.dict.size() << "\n";
  std::cout << "C: " << model.C << "\n";
  if (!rep.tuning.losses.empty()) std::cout << "validation loss: " << rep.tuning.validation_loss << "\n";
  std::cout << "training satisfaction: " << rep.satisfaction << " (" << rep.unsatisfiable
            << " tuples have identical vectors and delta > 0)\n";
  std::cout << "model: " << a.output << "\n";
  return 0;
}

int run_generate_data(const TrainArgs& a) {
  auto corpus = load_corpus(a);
  const TrainConfig cfg = make_config(a);
  const Importances imp = Importances::defaults(cfg.graph_kind);
  ColorDictionary dict;
  Dataset all;
  for (const auto& inst : corpus) {
    FeatureMap f = [&](const StateView& v, const PartialAction& rho) {
      return phi(v, rho, cfg.graph_kind, cfg.iterations, dict);
    };
    auto d = generate_dataset(inst.task, inst.plan, f, imp, cfg.dataset);
    spdlog::info("{}: {} tuples", inst.name, d.size());
    all.insert(all.end(), d.begin(), d.end());
  }
  write_text(a.output, dataset_to_csv(all));
  return 0;
}

// --- report / gen / validate ---------------------------------------------

int run_report(const std::vector<std::string>& inputs, const std::string& output) {
  std::vector<RunRecord> rows;
  for (const auto& path : inputs) {
    auto part = parse_stats_csv(read_file(path));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_text(output, report_to_csv(build_report(rows)));
  return 0;
}

int run_gen(const std::string& family, int size, int extra, std::uint64_t seed, int count, const std::string& dir) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    auto g = generate(family, size, extra, seed + static_cast<std::uint64_t>(i));
    write_text((fs::path(dir) / "domain.pddl").string(), g.domain_pddl);
    write_text((fs::path(dir) / (g.name + ".pddl")).string(), g.problem_pddl);
    std::cout << (fs::path(dir) / (g.name + ".pddl")).string() << "\n";
  }
  return 0;
}

int run_validate(const std::string& domain, const std::string& problem, const std::string& plan_path) {
  Task task = load_task(domain, problem);
  Plan plan = parse_plan(task, read_file(plan_path));
  auto v = validate_plan(task, plan);
  if (v.valid) {
    std::cout << "valid (cost " << plan.cost() << ")\n";
    return 0;
  }
  std::cout << "invalid at step " << v.step << ": " << v.reason << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lifted planner with partial-space search and learned action-set heuristics"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve a problem and append a stats row");
  s->add_option("domain", solve.domain, "Domain file")->required()->check(CLI::ExistingFile);
  s->add_option("problem", solve.problem, "Problem file")->required()->check(CLI::ExistingFile);
  s->add_option("--search", solve.search, "Search space")->check(CLI::IsMember({"state", "partial"}));
  s->add_option("--heuristic", solve.heuristic, "ff, blind or model:<path>");
  s->add_option("--time-limit", solve.time_limit, "Seconds (0 = none)");
  s->add_option("--memory-limit", solve.memory_mb, "MB (0 = none)");
  s->add_option("--output,-o", solve.output, "Plan file (default stdout)");
  s->add_option("--stats", solve.stats, "Stats CSV to append to");
  s->add_option("--config", solve.config, "Config name for the stats row");

  TrainArgs train;
  auto add_train_opts = [&](CLI::App* c) {
    c->add_option("domain", train.domain, "Domain file")->required()->check(CLI::ExistingFile);
    c->add_option("--instances", train.instances, "Directory of problem files")->required()->check(CLI::ExistingDirectory);
    c->add_option("--plans", train.plans, "Directory of <problem>.plan files")->required()->check(CLI::ExistingDirectory);
    c->add_option("--graph", train.graph, "aoag or aeg");
    c->add_option("--iterations", train.iterations, "WL iterations")->check(CLI::NonNegativeNumber);
    c->add_flag("--cross-state", train.cross_state, "Add tuples across consecutive states");
    c->add_option("--sibling-cap", train.sibling_cap, "Max sibling tuples per layer (0 = unlimited)");
    c->add_option("--output,-o", train.output, "Output file")->required();
  };
  auto* t = app.add_subcommand("train", "Train a ranking model from plans");
  add_train_opts(t);
  t->add_option("--C", train.C, "Fixed regularisation constant (skips tuning)");
  auto* gd = app.add_subcommand("generate-data", "Write the ranking dataset as CSV");
  add_train_opts(gd);

  std::vector<std::string> report_inputs;
  std::string report_out;
  auto* r = app.add_subcommand("report", "Coverage and quality per domain and config");
  r->add_option("csv", report_inputs, "Stats CSV files")->required()->check(CLI::ExistingFile);
  r->add_option("--output,-o", report_out, "Output CSV (default stdout)");

  std::string family;
  int size = 4, extra = 0, count = 1;
  std::uint64_t seed = 1;
  std::string gen_dir = ".";
  auto* g = app.add_subcommand("gen", "Generate instances");
  g->add_option("family", family, "Generator family")->required()->check(CLI::IsMember(generator_families()));
  g->add_option("--size", size, "Blocks / stacks / cars")->check(CLI::PositiveNumber);
  g->add_option("--extra", extra, "Goal atoms (blocksworld-large) or ports (ferry)");
  g->add_option("--count", count, "Number of instances")->check(CLI::PositiveNumber);
  g->add_option("--seed", seed, "First seed");
  g->add_option("--output,-o", gen_dir, "Output directory");

  std::string vdom, vprob, vplan;
  auto* v = app.add_subcommand("validate", "Check a plan");
  v->add_option("domain", vdom)->required()->check(CLI::ExistingFile);
  v->add_option("problem", vprob)->required()->check(CLI::ExistingFile);
  v->add_option("plan", vplan)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*s) return run_solve(solve);
    if (*t) return run_train(train);
    if (*gd) return run_generate_data(train);
    if (*r) return run_report(report_inputs, report_out);
    if (*g) return run_gen(family, size, extra, seed, count, gen_dir);
    if (*v) return run_validate(vdom, vprob, vplan);
  } catch (const CLI::ValidationError& e) {
    spdlog::error("{}", e.what());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
  }
  return kExitError;
}

#include "liftplan/bench.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace liftplan {

Validation validate_plan(const Task& task, const Plan& plan) {
  State s = State::initial(task);
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const GroundAction& a = plan.actions[i];
    const ActionSchema& schema = task.schemas.at(a.schema);
    if (a.args.size() != schema.params.size()) return {false, i, "wrong number of arguments"};
    if (!equalities_hold(schema, a.args)) return {false, i, "equality constraint violated"};
    for (const auto& pre : schema.pre) {
      GroundAtom g = instantiate(pre, a.args);
      AtomId id = task.atom_id(g);
      const bool ok = task.is_static(pre.predicate) ? task.has_static_atom(id) : s.contains(id);
      if (!ok) return {false, i, "precondition " + task.atom_to_string(g)};
    }
    s = apply_unchecked(task, s, a);
  }
  for (const auto& g : task.goal) {
    AtomId id = task.atom_id(g);
    const bool ok = task.is_static(g.predicate) ? task.has_static_atom(id) : s.contains(id);
    if (!ok) return {false, plan.actions.size(), "goal " + task.atom_to_string(g) + " not satisfied"};
  }
  return {};
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Solved: return "solved";
    case Outcome::Unsolved: return "unsolved";
    case Outcome::Timeout: return "timeout";
    case Outcome::MemoryOut: return "memory_out";
    case Outcome::Error: return "error";
  }
  return "?";
}

Outcome parse_outcome(const std::string& text) {
  for (Outcome o : {Outcome::Solved, Outcome::Unsolved, Outcome::Timeout, Outcome::MemoryOut, Outcome::Error}) {
    if (to_string(o) == text) return o;
  }
  throw MalformedCSV("unknown outcome '" + text + "'");
}

Outcome outcome_of(const SearchResult& result) {
  switch (result.status) {
    case SearchStatus::Solved: return Outcome::Solved;
    case SearchStatus::Unsolvable: return Outcome::Unsolved;
    case SearchStatus::ResourceExhausted:
      if (result.exhausted == Exhaustion::Time) return Outcome::Timeout;
      if (result.exhausted == Exhaustion::Memory) return Outcome::MemoryOut;
      return Outcome::Unsolved;
  }
  return Outcome::Error;
}

// ---------------------------------------------------------------------------
// CSV

std::string sanitize_identifier(const std::string& text) {
  std::string out;
  for (char c : text) {
    const bool bad = c == ',' || c == '"' || c == '\'' || static_cast<unsigned char>(c) <= ' ';
    out += bad ? '_' : c;
  }
  return out.empty() ? "_" : out;
}

std::string stats_csv_header() {
  return "domain,instance,config,outcome,plan_length,expansions,evaluations,generated,branching_factor,wall_ms";
}

std::string to_csv_row(const RunRecord& r) {
  char nums[160];
  std::snprintf(nums, sizeof nums, "%zu,%zu,%zu,%.4f,%.3f", r.stats.expansions, r.stats.evaluations,
                r.stats.generated, r.stats.branching_factor(), r.stats.wall_time * 1000.0);
  return sanitize_identifier(r.domain) + "," + sanitize_identifier(r.instance) + "," + sanitize_identifier(r.config) +
         "," + to_string(r.outcome) + "," + (r.plan_length ? std::to_string(*r.plan_length) : "") + "," + nums;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const char* column) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw MalformedCSV("line " + std::to_string(line) + ": bad " + column + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<RunRecord> parse_stats_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != stats_csv_header()) throw MalformedCSV("missing or unexpected header");
      header = true;
      continue;
    }
    // Concatenated files repeat the header.
    if (line == stats_csv_header()) continue;
    auto f = split(line, ',');
    if (f.size() != 10) {
      throw MalformedCSV("line " + std::to_string(lineno) + ": expected 10 fields, got " + std::to_string(f.size()));
    }
    RunRecord r;
    r.domain = f[0];
    r.instance = f[1];
    r.config = f[2];
    try {
      r.outcome = parse_outcome(f[3]);
    } catch (const MalformedCSV& e) {
      throw MalformedCSV("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!f[4].empty()) r.plan_length = parse_number<std::size_t>(f[4], lineno, "plan_length");
    if (r.plan_length.has_value() != (r.outcome == Outcome::Solved)) {
      throw MalformedCSV("line " + std::to_string(lineno) + ": plan_length must be set exactly for solved runs");
    }
    r.stats.expansions = parse_number<std::size_t>(f[5], lineno, "expansions");
    r.stats.evaluations = parse_number<std::size_t>(f[6], lineno, "evaluations");
    r.stats.generated = parse_number<std::size_t>(f[7], lineno, "generated");
    parse_number<double>(f[8], lineno, "branching_factor");
    r.stats.wall_time = parse_number<double>(f[9], lineno, "wall_ms") / 1000.0;
    out.push_back(std::move(r));
  }
  if (!header) throw MalformedCSV("empty stats file");
  return out;
}

void append_stats_row(const std::string& path, const RunRecord& r) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) out << stats_csv_header() << "\n";
  out << to_csv_row(r) << "\n";
}

// ---------------------------------------------------------------------------
// Report

namespace {

std::vector<RunRecord> dedupe(const std::vector<RunRecord>& records) {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::vector<RunRecord> out;
  for (const auto& r : records) {
    if (seen.emplace(r.domain, r.instance, r.config).second) out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<double> quality_scores(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::size_t> best;
  for (const auto& r : records) {
    if (r.outcome != Outcome::Solved) continue;
    auto key = std::make_pair(r.domain, r.instance);
    auto it = best.find(key);
    if (it == best.end() || *r.plan_length < it->second) best[key] = *r.plan_length;
  }
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.outcome != Outcome::Solved) {
      out.push_back(0.0);
      continue;
    }
    const std::size_t c_star = best.at({r.domain, r.instance});
    out.push_back(*r.plan_length == 0 ? 1.0 : static_cast<double>(c_star) / static_cast<double>(*r.plan_length));
  }
  return out;
}

std::vector<ReportRow> build_report(const std::vector<RunRecord>& records) {
  auto unique = dedupe(records);
  auto q = quality_scores(unique);
  std::map<std::pair<std::string, std::string>, ReportRow> rows;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const auto& r = unique[i];
    auto& row = rows[{r.domain, r.config}];
    row.domain = r.domain;
    row.config = r.config;
    ++row.instances;
    row.coverage += r.outcome == Outcome::Solved;
    row.quality += q[i];
  }
  std::vector<ReportRow> out;
  for (auto& [_, row] : rows) out.push_back(row);
  return out;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "domain,config,instances,coverage,quality\n";
  for (const auto& r : rows) {
    char q[32];
    std::snprintf(q, sizeof q, "%.4f", r.quality);
    out += r.domain + "," + r.config + "," + std::to_string(r.instances) + "," + std::to_string(r.coverage) + "," + q +
           "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

const char* kBlocksworldDomain = R"((define (domain blocksworld)
  (:requirements :strips)
  (:predicates (clear ?x) (ontable ?x) (handempty) (holding ?x) (on ?x ?y))
  (:action pickup
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action putdown
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
)";

const char* kWarehouseDomain = R"((define (domain warehouse)
  (:requirements :strips :equality)
  (:predicates (on ?x ?y) (clear ?x) (box ?x) (removable ?x) (removed ?x))
  (:action move
    :parameters (?b ?from ?to)
    :precondition (and (box ?b) (on ?b ?from) (clear ?b) (clear ?to) (not (= ?b ?to)))
    :effect (and (on ?b ?to) (clear ?from) (not (on ?b ?from)) (not (clear ?to))))
  (:action remove
    :parameters (?b ?from)
    :precondition (and (removable ?b) (on ?b ?from) (clear ?b))
    :effect (and (removed ?b) (clear ?from) (not (on ?b ?from)) (not (clear ?b)))))
)";

const char* kFerryDomain = R"((define (domain ferry)
  (:requirements :strips :typing :equality)
  (:types car location)
  (:predicates (at-ferry ?l - location) (at ?c - car ?l - location) (on ?c - car) (empty-ferry))
  (:action sail
    :parameters (?from ?to - location)
    :precondition (and (at-ferry ?from) (not (= ?from ?to)))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?c - car ?l - location)
    :precondition (and (at ?c ?l) (at-ferry ?l) (empty-ferry))
    :effect (and (on ?c) (not (at ?c ?l)) (not (empty-ferry))))
  (:action debark
    :parameters (?c - car ?l - location)
    :precondition (and (on ?c) (at-ferry ?l))
    :effect (and (at ?c ?l) (empty-ferry) (not (on ?c)))))
)";

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

using Towers = std::vector<std::vector<int>>;  // bottom to top

Towers random_towers(int blocks, Rng& rng) {
  std::vector<int> order(blocks);
  for (int i = 0; i < blocks; ++i) order[i] = i;
  for (int i = blocks - 1; i > 0; --i) std::swap(order[i], order[pick(rng, i + 1)]);
  Towers t;
  for (int b : order) {
    if (t.empty() || rng() % 3 == 0) {
      t.push_back({b});
    } else {
      t[pick(rng, t.size())].push_back(b);
    }
  }
  return t;
}

// One pickup/unstack followed by putdown/stack.
void random_move(Towers& t, Rng& rng) {
  const std::size_t from = pick(rng, t.size());
  const int b = t[from].back();
  t[from].pop_back();
  const bool was_alone = t[from].empty();
  if (was_alone) t.erase(t.begin() + static_cast<long>(from));
  const std::size_t choice = pick(rng, t.size() + 1);
  if (choice == t.size()) {
    t.push_back({b});
  } else {
    t[choice].push_back(b);
  }
}

std::set<std::pair<int, int>> on_facts(const Towers& t) {
  std::set<std::pair<int, int>> out;
  for (const auto& tower : t) {
    for (std::size_t i = 1; i < tower.size(); ++i) out.emplace(tower[i], tower[i - 1]);
  }
  return out;
}

// True if the goal derived from `goal` (its on facts, or all-on-table) already
// holds in `init`.
bool goal_holds(const Towers& goal, const Towers& init) {
  const auto g = on_facts(goal);
  const auto i = on_facts(init);
  if (g.empty()) return i.empty();
  return std::includes(i.begin(), i.end(), g.begin(), g.end());
}

std::string block(int b) { return "b" + std::to_string(b); }

std::string bw_init(const Towers& t) {
  std::string s = "(handempty)";
  for (const auto& tower : t) {
    s += " (ontable " + block(tower.front()) + ")";
    for (std::size_t i = 1; i < tower.size(); ++i) s += " (on " + block(tower[i]) + " " + block(tower[i - 1]) + ")";
    s += " (clear " + block(tower.back()) + ")";
  }
  return s;
}

std::string bw_problem(const std::string& name, int blocks, const Towers& init, const std::string& goal) {
  std::string s = "(define (problem " + name + ") (:domain blocksworld)\n  (:objects";
  for (int b = 0; b < blocks; ++b) s += " " + block(b);
  return s + ")\n  (:init " + bw_init(init) + ")\n  (:goal (and " + goal + ")))\n";
}

std::string seed_tag(std::uint64_t seed) { return "s" + std::to_string(seed); }

}  // namespace

std::vector<std::string> generator_families() { return {"blocksworld", "blocksworld-large", "warehouse-like", "ferry"}; }

GeneratedInstance gen_blocksworld(int blocks, std::uint64_t seed) {
  if (blocks < 1) throw std::invalid_argument("blocks must be positive");
  Rng rng(seed);
  Towers init = random_towers(blocks, rng);
  Towers goal = init;
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int i = 0, n = 2 * blocks + static_cast<int>(pick(rng, blocks + 1)); i < n; ++i) random_move(goal, rng);
    if (blocks < 2 || !goal_holds(goal, init)) break;
  }
  std::string g;
  auto on = on_facts(goal);
  for (const auto& [x, y] : on) g += "(on " + block(x) + " " + block(y) + ") ";
  // All blocks on the table: state that instead.
  if (on.empty()) {
    for (const auto& tower : goal) g += "(ontable " + block(tower.front()) + ") ";
  }
  g.pop_back();
  const std::string name = "bw-" + std::to_string(blocks) + "-" + seed_tag(seed);
  return {name, kBlocksworldDomain, bw_problem(name, blocks, init, g)};
}

GeneratedInstance gen_blocksworld_large(int blocks, int goal_atoms, std::uint64_t seed) {
  if (blocks < 2 || goal_atoms < 1) throw std::invalid_argument("need at least 2 blocks and 1 goal atom");
  Rng rng(seed);
  Towers init = random_towers(blocks, rng);
  Towers cur = init;
  const auto before = on_facts(init);
  std::vector<std::pair<int, int>> fresh;
  while (true) {
    for (int i = 0; i < blocks; ++i) random_move(cur, rng);
    fresh.clear();
    for (const auto& f : on_facts(cur)) {
      if (!before.count(f)) fresh.push_back(f);
    }
    if (!fresh.empty()) break;
  }
  for (std::size_t i = fresh.size(); i > 1; --i) std::swap(fresh[i - 1], fresh[pick(rng, i)]);
  fresh.resize(std::min<std::size_t>(fresh.size(), goal_atoms));
  std::string g;
  for (const auto& [x, y] : fresh) g += "(on " + block(x) + " " + block(y) + ") ";
  g.pop_back();
  const std::string name = "bwl-" + std::to_string(blocks) + "-" + seed_tag(seed);
  return {name, kBlocksworldDomain, bw_problem(name, blocks, init, g)};
}

GeneratedInstance gen_warehouse(int stacks, std::uint64_t seed) {
  if (stacks < 1) throw std::invalid_argument("stacks must be positive");
  Rng rng(seed);
  std::vector<std::vector<int>> towers(stacks);
  int boxes = 0;
  for (auto& t : towers) {
    const int h = 1 + static_cast<int>(pick(rng, 3));
    for (int i = 0; i < h; ++i) t.push_back(boxes++);
  }
  // Prefer a buried target so that digging is needed.
  std::vector<int> buried;
  for (const auto& t : towers) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) buried.push_back(t[i]);
  }
  const int target = buried.empty() ? static_cast<int>(pick(rng, boxes)) : buried[pick(rng, buried.size())];

  const std::string name = "wh-" + std::to_string(stacks) + "-" + seed_tag(seed);
  std::string s = "(define (problem " + name + ") (:domain warehouse)\n  (:objects";
  for (int p = 0; p < stacks; ++p) s += " p" + std::to_string(p);
  for (int b = 0; b < boxes; ++b) s += " x" + std::to_string(b);
  s += ")\n  (:init";
  for (int p = 0; p < stacks; ++p) {
    const auto& t = towers[p];
    std::string below = "p" + std::to_string(p);
    for (int b : t) {
      const std::string x = "x" + std::to_string(b);
      s += " (box " + x + ") (on " + x + " " + below + ")";
      below = x;
    }
    s += " (clear " + below + ")";
  }
  s += " (removable x" + std::to_string(target) + ")";
  s += ")\n  (:goal (and (removed x" + std::to_string(target) + "))))\n";
  return {name, kWarehouseDomain, s};
}

GeneratedInstance gen_ferry(int items, int locations, std::uint64_t seed) {
  if (items < 1 || locations < 2) throw std::invalid_argument("need at least 1 car and 2 locations");
  Rng rng(seed);
  const std::string name = "ferry-" + std::to_string(items) + "-" + std::to_string(locations) + "-" + seed_tag(seed);
  std::string s = "(define (problem " + name + ") (:domain ferry)\n  (:objects";
  for (int c = 0; c < items; ++c) s += " c" + std::to_string(c);
  s += " - car";
  for (int l = 0; l < locations; ++l) s += " l" + std::to_string(l);
  s += " - location)\n  (:init (empty-ferry) (at-ferry l" + std::to_string(pick(rng, locations)) + ")";
  std::string goal;
  for (int c = 0; c < items; ++c) {
    const std::size_t from = pick(rng, locations);
    const std::size_t to = (from + 1 + pick(rng, locations - 1)) % locations;
    s += " (at c" + std::to_string(c) + " l" + std::to_string(from) + ")";
    goal += " (at c" + std::to_string(c) + " l" + std::to_string(to) + ")";
  }
  s += ")\n  (:goal (and" + goal + ")))\n";
  return {name, kFerryDomain, s};
}

GeneratedInstance generate(const std::string& family, int size, int extra, std::uint64_t seed) {
  if (family == "blocksworld") return gen_blocksworld(size, seed);
  if (family == "blocksworld-large") return gen_blocksworld_large(size, extra > 0 ? extra : 2, seed);
  if (family == "warehouse-like") return gen_warehouse(size, seed);
  if (family == "ferry") return gen_ferry(size, extra > 0 ? extra : 3, seed);
  throw std::invalid_argument("unknown generator family: " + family);
}

}  // namespace liftplan

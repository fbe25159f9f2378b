#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftplan/search.hpp"

namespace liftplan {

class MalformedCSV : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Validation {
  bool valid = true;
  /// Failing step; equals the plan length when only the goal is missed.
  std::size_t step = 0;
  std::string reason;
};

/// Simulates the plan from the initial state.
Validation validate_plan(const Task& task, const Plan& plan);

enum class Outcome { Solved, Unsolved, Timeout, MemoryOut, Error };
std::string to_string(Outcome o);
Outcome parse_outcome(const std::string& text);
Outcome outcome_of(const SearchResult& result);

struct RunRecord {
  std::string domain;
  std::string instance;
  std::string config;
  Outcome outcome = Outcome::Unsolved;
  /// Present iff solved.
  std::optional<std::size_t> plan_length;
  SearchStats stats;
};

/// Replaces characters that would break the CSV (commas, whitespace, quotes).
std::string sanitize_identifier(const std::string& text);

std::string stats_csv_header();
std::string to_csv_row(const RunRecord& r);
/// Parses a stats CSV (header required). Throws MalformedCSV.
std::vector<RunRecord> parse_stats_csv(const std::string& text);
/// Appends one row, writing the header first if the file is new or empty.
void append_stats_row(const std::string& path, const RunRecord& r);

struct ReportRow {
  std::string domain;
  std::string config;
  std::size_t instances = 0;
  std::size_t coverage = 0;
  double quality = 0.0;
};

/// Per-instance quality: C*/C for solved runs, 0 otherwise. C* is the best
/// cost over all configs on the same (domain, instance).
std::vector<double> quality_scores(const std::vector<RunRecord>& records);

/// Coverage and quality sums per (domain, config), sorted. Duplicate
/// (domain, instance, config) rows keep the first occurrence.
std::vector<ReportRow> build_report(const std::vector<RunRecord>& records);
std::string report_to_csv(const std::vector<ReportRow>& rows);

// ---------------------------------------------------------------------------
// Generators

struct GeneratedInstance {
  std::string name;
  std::string domain_pddl;
  std::string problem_pddl;
};

std::vector<std::string> generator_families();

/// Random towers; the goal is the tower configuration reached by a random
/// walk of handempty-to-handempty moves.
GeneratedInstance gen_blocksworld(int blocks, std::uint64_t seed);
/// Many blocks, few goal atoms (`on` facts from a random walk).
GeneratedInstance gen_blocksworld_large(int blocks, int goal_atoms, std::uint64_t seed);
/// Boxes on `stacks` stacks; any top box moves onto any other top, so the
/// state-space branching factor grows quadratically. The goal removes one
/// buried box.
GeneratedInstance gen_warehouse(int stacks, std::uint64_t seed);
/// Ferry with `items` cars over `locations` ports.
GeneratedInstance gen_ferry(int items, int locations, std::uint64_t seed);

/// Dispatches on family name: blocksworld, blocksworld-large, warehouse-like,
/// ferry. `size` is blocks / stacks / cars; `extra` is goal atoms for
/// blocksworld-large and ports for ferry (0 picks a default).
GeneratedInstance generate(const std::string& family, int size, int extra, std::uint64_t seed);

}  // namespace liftplan

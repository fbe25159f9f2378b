#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftplan/search.hpp"
#include "liftplan/wl.hpp"

namespace liftplan {

class InvalidPlan : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatVersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layer predecessor, layer sibling, state predecessor, state sibling.
enum class TupleKind { LayerPredecessor, LayerSibling, StatePredecessor, StateSibling };
std::string to_string(TupleKind kind);

/// Training record: the heuristic should score x at least `delta` below x_prime.
struct RankingTuple {
  FeatureVector x;
  FeatureVector x_prime;
  double delta = 0.0;
  double sigma = 1.0;
  TupleKind kind = TupleKind::LayerPredecessor;
};

using Dataset = std::vector<RankingTuple>;

struct Importances {
  double layer_pred = 0.5;
  double layer_sib = 2.0;
  double state_pred = 0.5;
  double state_sib = 1.0;

  double of(TupleKind kind) const;
  static Importances defaults(GraphKind kind);
  /// Setting for domains with very wide state-space branching.
  static Importances warehouse();
};

struct DatasetOptions {
  /// Adds <phi(s_j, root), phi(s_{j-1}, a_{j-1}), 1> tuples between steps.
  bool cross_state_pairs = false;
  /// Caps sibling tuples per (step, specificity); unlimited by default.
  std::optional<std::size_t> sibling_cap;
};

using FeatureMap = std::function<FeatureVector(const StateView&, const PartialAction&)>;

/// Decomposes each plan step into partial actions and emits the four tuple
/// families. Throws InvalidPlan if an action is inapplicable or the goal is
/// not reached.
Dataset generate_dataset(const Task& task, const Plan& plan, const FeatureMap& phi, const Importances& importances,
                         const DatasetOptions& options = {});

/// 2n(k+1) + n(a*b^k - 1) + n * sum_{i=0..k} (a*b^i - 1).
std::int64_t dataset_size_closed_form(std::int64_t alpha, std::int64_t beta, std::int64_t k, std::int64_t n);

// ---------------------------------------------------------------------------
// LP

struct LpSolution {
  std::vector<double> w;
  /// Slacks from the solver's dual information.
  std::vector<double> slacks;
  double objective = 0.0;       // C * sum sigma_i z_i + ||w||_1
  double dual_objective = 0.0;  // sum delta_i lambda_i
  std::size_t iterations = 0;
  /// max_i |slacks_i - max(0, delta_i - w.(x_i - x'_i))|.
  double slack_mismatch = 0.0;
};

/// Solves min C sum sigma_i z_i + ||w||_1 s.t. w.(x_i - x'_i) >= delta_i - z_i,
/// z >= 0, through its dual with a bounded-variable primal simplex.
/// `dimension` defaults to one past the largest feature index.
LpSolution train_lp(const Dataset& data, double C, std::optional<int> dimension = std::nullopt);

/// sum_i sigma_i max(0, delta_i - w.(x_i - x'_i)).
double ranking_loss(const Dataset& data, const std::vector<double>& w);
/// Fraction of tuples with slack at most `tolerance`.
double satisfaction_rate(const Dataset& data, const std::vector<double>& w, double tolerance = 0.01);

std::vector<double> default_c_grid();

struct TuneResult {
  double C = 1.0;
  double validation_loss = 0.0;
  std::vector<std::pair<double, double>> losses;  // (C, validation loss)
};

/// Picks the grid value with the lowest validation loss; ties go to the
/// smallest C.
TuneResult tune_C(const Dataset& train, const Dataset& validation, const std::vector<double>& grid,
                  std::optional<int> dimension = std::nullopt);

/// Number of training instances for an 80/20 split, clamped to [1, n-1].
std::size_t train_split_size(std::size_t n, double ratio = 0.8);

// ---------------------------------------------------------------------------
// Models

struct LinearModel {
  GraphKind graph_kind = GraphKind::AOAG;
  int iterations = 2;
  ColorDictionary dict;
  std::vector<double> weights;
  std::string domain;
  double C = 1.0;
  std::string trained;  // ISO date
};

/// w . phi(state, rho) against the model's dictionary (never grows it).
double evaluate(const LinearModel& model, const StateView& view, const PartialAction& rho);

void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);
std::string model_to_string(const LinearModel& model);
LinearModel model_from_string(const std::string& text);

class ModelHeuristic final : public ActionSetHeuristic, public StateHeuristic {
 public:
  explicit ModelHeuristic(const LinearModel& model) : model_(model) {}
  double evaluate(const StateView& view, const PartialAction& rho) override;
  double evaluate(const StateView& view) override;

 private:
  const LinearModel& model_;
};

/// CSV with columns kind,delta,sigma,x,x_prime; vectors as `idx:count` lists.
std::string dataset_to_csv(const Dataset& data);

// ---------------------------------------------------------------------------
// Pipeline

struct TrainingInstance {
  std::string name;
  Task task;
  Plan plan;
};

struct TrainConfig {
  GraphKind graph_kind = GraphKind::AOAG;
  int iterations = 2;
  std::optional<Importances> importances;  // defaults per graph kind
  double split_ratio = 0.8;
  std::vector<double> c_grid = default_c_grid();
  /// Skips tuning when set.
  std::optional<double> fixed_C;
  DatasetOptions dataset;
};

struct TrainReport {
  std::size_t train_instances = 0;
  std::size_t validation_instances = 0;
  std::size_t tuples = 0;
  std::size_t kind_counts[4] = {0, 0, 0, 0};
  TuneResult tuning;
  double satisfaction = 0.0;
  /// Tuples with delta > 0 and x == x'; no weight vector satisfies them.
  std::size_t unsatisfiable = 0;
  double slack_mismatch = 0.0;
  double objective = 0.0;
};

/// Grows one dictionary over all instances, tunes C on an ordered 80/20
/// split (by object count, then name), and trains the final model on all
/// instances. The model's weights are the negated LP solution, so nodes the
/// tuples prefer get lower heuristic values.
LinearModel train_model(std::vector<TrainingInstance> instances, const TrainConfig& config, TrainReport* report = nullptr);

}  // namespace liftplan

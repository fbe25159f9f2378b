#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "liftplan/ranking.hpp"

namespace liftplan {

namespace {

constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateBeforeBland = 50;

enum class Status : std::uint8_t { Basic, AtLower, AtUpper };

/// max c^T x s.t. A x = 0, l <= x <= u, where the last `rows` columns are -I
/// (an initial feasible basis at x = 0 when 0 lies within every bound).
class BoundedSimplex {
 public:
  using Column = std::vector<std::pair<int, double>>;

  BoundedSimplex(int rows, std::vector<Column> structural, std::vector<double> cost, std::vector<double> upper)
      : p_(rows), m_(static_cast<int>(structural.size())), cols_(std::move(structural)) {
    const int n = m_ + p_;
    cost_ = std::move(cost);
    cost_.resize(n, 0.0);
    lower_.assign(n, 0.0);
    upper_ = std::move(upper);
    upper_.resize(n, 1.0);
    for (int j = m_; j < n; ++j) lower_[j] = -1.0;
    x_.assign(n, 0.0);
    status_.assign(n, Status::AtLower);
    basis_.resize(p_);
    for (int k = 0; k < p_; ++k) {
      basis_[k] = m_ + k;
      status_[m_ + k] = Status::Basic;
    }
    binv_ = -Eigen::MatrixXd::Identity(p_, p_);
  }

  std::size_t solve(std::size_t max_iterations) {
    std::size_t iter = 0;
    int since_refactor = 0;
    int degenerate = 0;
    Eigen::VectorXd y(p_);
    Eigen::VectorXd alpha(p_);
    while (true) {
      if (iter >= max_iterations) throw SolverFailure("simplex iteration limit reached");
      compute_duals(y);
      const bool bland = degenerate >= kDegenerateBeforeBland;
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < m_ + p_; ++j) {
        if (status_[j] == Status::Basic || upper_[j] - lower_[j] <= 0.0) continue;
        const double r = reduced_cost(j, y);
        const bool eligible = (status_[j] == Status::AtLower && r > kCostTol) ||
                              (status_[j] == Status::AtUpper && r < -kCostTol);
        if (!eligible) continue;
        if (bland) {
          q = j;
          break;
        }
        if (std::abs(r) > best) {
          best = std::abs(r);
          q = j;
        }
      }
      if (q < 0) return iter;
      ++iter;

      column_times_binv(q, alpha);
      const double dir = status_[q] == Status::AtLower ? 1.0 : -1.0;
      double theta = upper_[q] - lower_[q];
      int leave = -1;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (int k = 0; k < p_; ++k) {
        const double a = alpha[k];
        if (std::abs(a) <= kPivotTol) continue;
        const double rate = -dir * a;
        const int b = basis_[k];
        const double limit = rate < 0 ? (x_[b] - lower_[b]) / -rate : (upper_[b] - x_[b]) / rate;
        const double t = std::max(limit, 0.0);
        const bool better = t < theta - 1e-12 ||
                            (leave >= 0 && std::abs(t - theta) <= 1e-12 &&
                             (bland ? b < basis_[leave] : std::abs(a) > leave_pivot));
        if (better) {
          theta = t;
          leave = k;
          leave_to_upper = rate > 0;
          leave_pivot = std::abs(a);
        }
      }
      degenerate = theta <= 1e-12 ? degenerate + 1 : 0;

      for (int k = 0; k < p_; ++k) x_[basis_[k]] -= dir * theta * alpha[k];
      x_[q] += dir * theta;
      if (leave < 0) {
        // Bound flip of the entering variable.
        status_[q] = status_[q] == Status::AtLower ? Status::AtUpper : Status::AtLower;
        x_[q] = status_[q] == Status::AtLower ? lower_[q] : upper_[q];
        continue;
      }
      const int out = basis_[leave];
      status_[out] = leave_to_upper ? Status::AtUpper : Status::AtLower;
      x_[out] = leave_to_upper ? upper_[out] : lower_[out];
      basis_[leave] = q;
      status_[q] = Status::Basic;

      const double piv = alpha[leave];
      binv_.row(leave) /= piv;
      alpha[leave] = 0.0;
      Eigen::RowVectorXd pivot_row = binv_.row(leave);
      binv_.noalias() -= alpha * pivot_row;
      if (++since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  void compute_duals(Eigen::VectorXd& y) const {
    y.setZero();
    for (int k = 0; k < p_; ++k) {
      const double c = cost_[basis_[k]];
      if (c != 0.0) y += c * binv_.row(k).transpose();
    }
  }

  double reduced_cost(int j, const Eigen::VectorXd& y) const {
    if (j >= m_) return cost_[j] + y[j - m_];
    double r = cost_[j];
    for (const auto& [row, v] : cols_[j]) r -= y[row] * v;
    return r;
  }

  Status status(int j) const { return status_[j]; }
  double value(int j) const { return x_[j]; }

 private:
  void column_times_binv(int q, Eigen::VectorXd& out) const {
    if (q >= m_) {
      out = -binv_.col(q - m_);
      return;
    }
    out.setZero();
    for (const auto& [row, v] : cols_[q]) out += v * binv_.col(row);
  }

  void refactor() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p_, p_);
    for (int k = 0; k < p_; ++k) {
      const int j = basis_[k];
      if (j >= m_) {
        b(j - m_, k) = -1.0;
      } else {
        for (const auto& [row, v] : cols_[j]) b(row, k) = v;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    binv_ = lu.inverse();
    // x_B = B^{-1} (-N x_N)
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p_);
    for (int j = 0; j < m_ + p_; ++j) {
      if (status_[j] == Status::Basic || x_[j] == 0.0) continue;
      if (j >= m_) {
        rhs[j - m_] += x_[j];
      } else {
        for (const auto& [row, v] : cols_[j]) rhs[row] -= v * x_[j];
      }
    }
    Eigen::VectorXd xb = binv_ * rhs;
    for (int k = 0; k < p_; ++k) x_[basis_[k]] = xb[k];
  }

  int p_;
  int m_;
  std::vector<Column> cols_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<Status> status_;
  std::vector<int> basis_;
  Eigen::MatrixXd binv_;
};

std::map<int, double> difference(const RankingTuple& t) {
  std::map<int, double> d;
  for (const auto& [i, c] : t.x) d[i] += c;
  for (const auto& [i, c] : t.x_prime) d[i] -= c;
  for (auto it = d.begin(); it != d.end();) it = it->second == 0.0 ? d.erase(it) : std::next(it);
  return d;
}

double margin(const RankingTuple& t, const std::vector<double>& w) {
  double s = 0.0;
  for (const auto& [i, c] : t.x) s += i < static_cast<int>(w.size()) ? w[i] * c : 0.0;
  for (const auto& [i, c] : t.x_prime) s -= i < static_cast<int>(w.size()) ? w[i] * c : 0.0;
  return s;
}

}  // namespace

double ranking_loss(const Dataset& data, const std::vector<double>& w) {
  double loss = 0.0;
  for (const auto& t : data) loss += t.sigma * std::max(0.0, t.delta - margin(t, w));
  return loss;
}

double satisfaction_rate(const Dataset& data, const std::vector<double>& w, double tolerance) {
  if (data.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& t : data) ok += std::max(0.0, t.delta - margin(t, w)) <= tolerance;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

LpSolution train_lp(const Dataset& data, double C, std::optional<int> dimension) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  if (C < 0) throw std::invalid_argument("C must be non-negative");
  int dim = 0;
  for (const auto& t : data) {
    for (const auto& e : t.x) dim = std::max(dim, e.first + 1);
    for (const auto& e : t.x_prime) dim = std::max(dim, e.first + 1);
  }
  if (dimension) {
    if (*dimension < dim) throw std::invalid_argument("dimension smaller than feature indices");
    dim = *dimension;
  }

  // Features whose difference is zero everywhere get weight 0 and no row.
  std::vector<std::map<int, double>> diffs;
  diffs.reserve(data.size());
  std::vector<int> row_of(dim, -1);
  std::vector<int> feature_of;
  for (const auto& t : data) {
    diffs.push_back(difference(t));
    for (const auto& [i, v] : diffs.back()) {
      if (row_of[i] < 0) {
        row_of[i] = 0;
      }
    }
  }
  for (int i = 0; i < dim; ++i) {
    if (row_of[i] >= 0) {
      row_of[i] = static_cast<int>(feature_of.size());
      feature_of.push_back(i);
    }
  }
  const int rows = static_cast<int>(feature_of.size());

  std::vector<BoundedSimplex::Column> cols(data.size());
  std::vector<double> cost(data.size());
  std::vector<double> upper(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (const auto& [f, v] : diffs[i]) cols[i].emplace_back(row_of[f], v);
    cost[i] = data[i].delta;
    upper[i] = C * data[i].sigma;
  }
  const int m = static_cast<int>(data.size());
  BoundedSimplex lp(rows, std::move(cols), std::move(cost), std::move(upper));
  const std::size_t limit = 200 * static_cast<std::size_t>(m + rows) + 10000;
  LpSolution sol;
  sol.iterations = lp.solve(limit);

  Eigen::VectorXd y(rows);
  lp.compute_duals(y);
  sol.w.assign(dim, 0.0);
  for (int k = 0; k < rows; ++k) sol.w[feature_of[k]] = y[k];
  sol.slacks.assign(data.size(), 0.0);
  double sum_slack = 0.0;
  for (int i = 0; i < m; ++i) {
    if (lp.status(i) != Status::Basic) sol.slacks[i] = std::max(0.0, lp.reduced_cost(i, y));
    sum_slack += data[i].sigma * sol.slacks[i];
    sol.dual_objective += data[i].delta * lp.value(i);
  }
  double l1 = 0.0;
  for (double v : sol.w) l1 += std::abs(v);
  sol.objective = C * sum_slack + l1;
  for (int i = 0; i < m; ++i) {
    const double rebuilt = std::max(0.0, data[i].delta - margin(data[i], sol.w));
    sol.slack_mismatch = std::max(sol.slack_mismatch, std::abs(rebuilt - sol.slacks[i]));
  }
  const double gap = std::abs(sol.objective - sol.dual_objective);
  if (gap > 1e-6 * std::max(1.0, std::abs(sol.objective))) {
    spdlog::warn("LP duality gap {:.3g} (primal {:.9g}, dual {:.9g})", gap, sol.objective, sol.dual_objective);
  }
  spdlog::debug("LP: {} tuples, {} active features, {} iterations, objective {:.6g}", m, rows, sol.iterations,
                sol.objective);
  return sol;
}

}  // namespace liftplan

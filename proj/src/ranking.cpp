#include "liftplan/ranking.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace liftplan {

std::string to_string(TupleKind kind) {
  switch (kind) {
    case TupleKind::LayerPredecessor: return "lp";
    case TupleKind::LayerSibling: return "ls";
    case TupleKind::StatePredecessor: return "sp";
    case TupleKind::StateSibling: return "ss";
  }
  return "?";
}

double Importances::of(TupleKind kind) const {
  switch (kind) {
    case TupleKind::LayerPredecessor: return layer_pred;
    case TupleKind::LayerSibling: return layer_sib;
    case TupleKind::StatePredecessor: return state_pred;
    case TupleKind::StateSibling: return state_sib;
  }
  return 1.0;
}

Importances Importances::defaults(GraphKind kind) {
  return kind == GraphKind::AOAG ? Importances{0.5, 2.0, 0.5, 1.0} : Importances{0.5, 2.0, 0.5, 0.75};
}

Importances Importances::warehouse() { return {2.0, 1.5, 2.0, 0.5}; }

// ---------------------------------------------------------------------------
// Dataset

Dataset generate_dataset(const Task& task, const Plan& plan, const FeatureMap& phi, const Importances& importances,
                         const DatasetOptions& options) {
  Dataset out;
  State s = State::initial(task);
  FeatureVector prev_full;
  const auto cap = options.sibling_cap.value_or(static_cast<std::size_t>(-1));
  for (std::size_t j = 0; j < plan.actions.size(); ++j) {
    const GroundAction& a = plan.actions[j];
    if (!is_applicable(task, s, a)) {
      throw InvalidPlan("step " + std::to_string(j) + ": " + to_string(task, a) + " is not applicable");
    }
    StateView view(task, s);
    std::map<PartialAction, FeatureVector> cache;
    auto f = [&](const PartialAction& rho) -> const FeatureVector& {
      auto it = cache.find(rho);
      if (it == cache.end()) it = cache.emplace(rho, phi(view, rho)).first;
      return it->second;
    };
    auto push = [&](const FeatureVector& x, const FeatureVector& xp, double delta, TupleKind kind) {
      out.push_back({x, xp, delta, importances.of(kind), kind});
    };

    const auto seq = decompose(a);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) push(f(seq[i + 1]), f(seq[i]), 1.0, TupleKind::LayerPredecessor);
    if (options.cross_state_pairs && j > 0) {
      push(f(PartialAction::root()), prev_full, 1.0, TupleKind::LayerPredecessor);
    }

    std::vector<PartialAction> level{PartialAction::root()};
    for (std::size_t i = 1; i < seq.size(); ++i) {
      std::vector<PartialAction> next;
      for (const auto& rho : level) {
        if (!rho.is_root() && rho.is_full(task)) continue;
        for (auto& kid : children(view, rho)) next.push_back(std::move(kid));
      }
      std::size_t emitted = 0;
      for (const auto& sib : next) {
        if (sib == seq[i]) continue;
        if (emitted++ >= cap) break;
        push(f(seq[i]), f(sib), 0.0, TupleKind::LayerSibling);
      }
      level = std::move(next);
    }

    for (std::size_t i = 1; i < seq.size(); ++i) push(f(seq[i]), f(PartialAction::root()), 1.0, TupleKind::StatePredecessor);

    std::size_t emitted = 0;
    const PartialAction full = PartialAction::of(a);
    for (const auto& b : instantiations(view, PartialAction::root())) {
      if (b == a) continue;
      if (emitted++ >= cap) break;
      push(f(full), f(PartialAction::of(b)), 0.0, TupleKind::StateSibling);
    }

    prev_full = f(full);
    s = apply_unchecked(task, s, a);
  }
  if (!is_goal(task, s)) throw InvalidPlan("plan does not reach the goal");
  return out;
}

std::int64_t dataset_size_closed_form(std::int64_t alpha, std::int64_t beta, std::int64_t k, std::int64_t n) {
  auto power = [](std::int64_t b, std::int64_t e) {
    std::int64_t r = 1;
    for (std::int64_t i = 0; i < e; ++i) r *= b;
    return r;
  };
  std::int64_t layers = 0;
  for (std::int64_t i = 0; i <= k; ++i) layers += alpha * power(beta, i) - 1;
  return 2 * n * (k + 1) + n * (alpha * power(beta, k) - 1) + n * layers;
}

// ---------------------------------------------------------------------------
// Tuning

std::vector<double> default_c_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

std::size_t train_split_size(std::size_t n, double ratio) {
  if (n < 2) throw std::invalid_argument("need at least two instances to split");
  auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

TuneResult tune_C(const Dataset& train, const Dataset& validation, const std::vector<double>& grid,
                  std::optional<int> dimension) {
  if (grid.empty()) throw std::invalid_argument("empty C grid");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  TuneResult best;
  bool first = true;
  for (double C : sorted) {
    auto sol = train_lp(train, C, dimension);
    const double loss = ranking_loss(validation, sol.w);
    best.losses.emplace_back(C, loss);
    spdlog::debug("C = {:g}: validation loss {:.6g}", C, loss);
    if (first || loss < best.validation_loss - 1e-9 * std::max(1.0, std::abs(best.validation_loss))) {
      best.C = C;
      best.validation_loss = loss;
      first = false;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Models

double evaluate(const LinearModel& model, const StateView& view, const PartialAction& rho) {
  return dot(model.weights, phi(view, rho, model.graph_kind, model.iterations, model.dict));
}

double ModelHeuristic::evaluate(const StateView& view, const PartialAction& rho) {
  return liftplan::evaluate(model_, view, rho);
}

double ModelHeuristic::evaluate(const StateView& view) {
  return liftplan::evaluate(model_, view, PartialAction::root());
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string today() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

}  // namespace

std::string model_to_string(const LinearModel& model) {
  std::ostringstream os;
  os << "LLMODEL v1 " << to_string(model.graph_kind) << " " << model.iterations << "\n";
  os << "domain " << (model.domain.empty() ? "-" : model.domain) << "\n";
  os << "C " << format_double(model.C) << "\n";
  os << "trained " << (model.trained.empty() ? "-" : model.trained) << "\n";
  os << "dictionary " << model.dict.size() << "\n";
  for (int i = 0; i < model.dict.size(); ++i) os << model.dict.signature(i) << "\t" << i << "\n";
  std::size_t nonzero = 0;
  for (double w : model.weights) nonzero += w != 0.0;
  os << "weights " << nonzero << "\n";
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) os << i << "\t" << format_double(model.weights[i]) << "\n";
  }
  std::string body = os.str();
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016" PRIx64, fnv1a(body));
  return body + "checksum " + sum + "\n";
}

LinearModel model_from_string(const std::string& text) {
  auto nl = text.find('\n');
  const std::string header = text.substr(0, nl);
  std::istringstream hs(header);
  std::string magic, version, kind;
  int iterations = -1;
  hs >> magic >> version >> kind >> iterations;
  if (magic != "LLMODEL") throw CorruptModel("not a model file");
  if (version != "v1") throw FormatVersionMismatch("unsupported model version " + version);

  const auto pos = text.rfind("checksum ");
  if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n')) throw CorruptModel("missing checksum");
  std::istringstream cs(text.substr(pos + 9));
  std::string expected;
  cs >> expected;
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016" PRIx64, fnv1a(text.substr(0, pos)));
  if (expected != sum) throw CorruptModel("checksum mismatch");

  LinearModel m;
  try {
    m.graph_kind = parse_graph_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw CorruptModel(e.what());
  }
  if (iterations < 0) throw CorruptModel("bad iteration count");
  m.iterations = iterations;

  std::istringstream in(text.substr(nl + 1, pos - nl - 1));
  std::string line;
  auto expect_key = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0) throw CorruptModel("expected " + key);
    return line.substr(key.size() + 1);
  };
  m.domain = expect_key("domain");
  if (m.domain == "-") m.domain.clear();
  m.C = std::stod(expect_key("C"));
  m.trained = expect_key("trained");
  if (m.trained == "-") m.trained.clear();
  const long n_dict = std::stol(expect_key("dictionary"));
  std::vector<std::pair<int, std::string>> entries;
  for (long i = 0; i < n_dict; ++i) {
    if (!std::getline(in, line)) throw CorruptModel("truncated dictionary");
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw CorruptModel("bad dictionary line");
    entries.emplace_back(std::stoi(line.substr(tab + 1)), line.substr(0, tab));
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& [idx, sig] : entries) {
    int iteration = 0;
    if (sig.rfind("w|", 0) == 0) {
      const int own = std::stoi(sig.substr(2, sig.find('|', 2) - 2));
      if (own < 0 || own >= idx) throw CorruptModel("dictionary entry out of order");
      iteration = m.dict.iteration(own) + 1;
    }
    try {
      m.dict.insert(sig, idx, iteration);
    } catch (const std::invalid_argument& e) {
      throw CorruptModel(e.what());
    }
  }
  m.dict.freeze();
  m.weights.assign(m.dict.size(), 0.0);
  const long n_weights = std::stol(expect_key("weights"));
  for (long i = 0; i < n_weights; ++i) {
    if (!std::getline(in, line)) throw CorruptModel("truncated weights");
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw CorruptModel("bad weight line");
    const long idx = std::stol(line.substr(0, tab));
    if (idx < 0 || idx >= static_cast<long>(m.weights.size())) throw CorruptModel("weight index out of range");
    m.weights[idx] = std::stod(line.substr(tab + 1));
  }
  return m;
}

void save_model(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << model_to_string(model);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

std::string dataset_to_csv(const Dataset& data) {
  auto vec = [](const FeatureVector& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += (i ? " " : "") + std::to_string(x[i].first) + ":" + std::to_string(x[i].second);
    }
    return s;
  };
  std::string out = "kind,delta,sigma,x,x_prime\n";
  for (const auto& t : data) {
    out += to_string(t.kind) + "," + format_double(t.delta) + "," + format_double(t.sigma) + "," + vec(t.x) + "," +
           vec(t.x_prime) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

LinearModel train_model(std::vector<TrainingInstance> instances, const TrainConfig& config, TrainReport* report) {
  if (instances.empty()) throw std::invalid_argument("no training instances");
  std::stable_sort(instances.begin(), instances.end(), [](const TrainingInstance& a, const TrainingInstance& b) {
    if (a.task.objects.size() != b.task.objects.size()) return a.task.objects.size() < b.task.objects.size();
    return a.name < b.name;
  });
  const Importances imp = config.importances.value_or(Importances::defaults(config.graph_kind));

  LinearModel model;
  model.graph_kind = config.graph_kind;
  model.iterations = config.iterations;
  model.domain = instances.front().task.domain_name;
  model.trained = today();

  std::vector<Dataset> per_instance;
  for (const auto& inst : instances) {
    FeatureMap f = [&](const StateView& v, const PartialAction& rho) {
      return phi(v, rho, config.graph_kind, config.iterations, model.dict);
    };
    try {
      per_instance.push_back(generate_dataset(inst.task, inst.plan, f, imp, config.dataset));
    } catch (const InvalidPlan& e) {
      throw InvalidPlan(inst.name + ": " + e.what());
    }
    spdlog::debug("{}: {} tuples", inst.name, per_instance.back().size());
  }
  const int dim = model.dict.size();
  model.dict.freeze();

  Dataset all;
  for (const auto& d : per_instance) all.insert(all.end(), d.begin(), d.end());
  if (all.empty()) throw std::invalid_argument("training plans produced no tuples");

  TrainReport rep;
  rep.tuples = all.size();
  for (const auto& t : all) {
    ++rep.kind_counts[static_cast<int>(t.kind)];
    rep.unsatisfiable += t.delta > 0.0 && t.x == t.x_prime;
  }

  if (config.fixed_C) {
    model.C = *config.fixed_C;
    rep.tuning.C = model.C;
    rep.train_instances = instances.size();
  } else if (instances.size() < 2) {
    throw std::invalid_argument("C tuning needs at least two instances");
  } else {
    const std::size_t n_train = train_split_size(instances.size(), config.split_ratio);
    Dataset train, validation;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      auto& dst = i < n_train ? train : validation;
      dst.insert(dst.end(), per_instance[i].begin(), per_instance[i].end());
    }
    rep.train_instances = n_train;
    rep.validation_instances = instances.size() - n_train;
    if (train.empty()) throw std::invalid_argument("training split produced no tuples");
    rep.tuning = tune_C(train, validation, config.c_grid, dim);
    model.C = rep.tuning.C;
  }

  auto sol = train_lp(all, model.C, dim);
  // The LP pushes w.x above w.x' for preferred x; search minimises, so the
  // stored heuristic is the negation.
  model.weights.resize(sol.w.size());
  for (std::size_t i = 0; i < sol.w.size(); ++i) model.weights[i] = sol.w[i] == 0.0 ? 0.0 : -sol.w[i];
  rep.satisfaction = satisfaction_rate(all, sol.w);
  rep.slack_mismatch = sol.slack_mismatch;
  rep.objective = sol.objective;
  if (report) *report = rep;
  return model;
}

}  // namespace liftplan

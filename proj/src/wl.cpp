#include "liftplan/wl.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace liftplan {

int ColorDictionary::lookup(const std::string& signature, int iteration) {
  auto it = index_.find(signature);
  if (it != index_.end()) return it->second;
  if (mode_ == Mode::Frozen) return -1;
  const int idx = size();
  index_.emplace(signature, idx);
  signatures_.push_back(signature);
  iterations_.push_back(iteration);
  return idx;
}

std::optional<int> ColorDictionary::find(const std::string& signature) const {
  auto it = index_.find(signature);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ColorDictionary::insert(const std::string& signature, int index, int iteration) {
  if (index < 0) throw std::invalid_argument("negative dictionary index");
  if (index_.count(signature)) throw std::invalid_argument("duplicate signature: " + signature);
  if (index >= size()) {
    signatures_.resize(index + 1);
    iterations_.resize(index + 1, -1);
  } else if (iterations_[index] >= 0) {
    throw std::invalid_argument("duplicate dictionary index " + std::to_string(index));
  }
  signatures_[index] = signature;
  iterations_[index] = iteration;
  index_.emplace(signature, index);
}

namespace {

template <typename Lookup>
FeatureVector refine(const LabeledGraph& graph, int iterations, Lookup&& lookup) {
  const int n = graph.num_vertices();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (label, neighbor)
  for (const auto& e : graph.edges()) {
    adj[e.u].emplace_back(e.label, e.v);
    adj[e.v].emplace_back(e.label, e.u);
  }

  std::map<int, int> counts;
  std::vector<int> colors(n);
  for (int v = 0; v < n; ++v) {
    colors[v] = lookup("c|" + graph.colors()[v].str(), 0);
    if (colors[v] >= 0) ++counts[colors[v]];
  }

  std::vector<int> next(n);
  std::vector<std::pair<int, int>> pairs;
  for (int t = 1; t <= iterations; ++t) {
    for (int v = 0; v < n; ++v) {
      next[v] = -1;
      if (colors[v] < 0) continue;
      pairs.clear();
      bool unknown = false;
      for (const auto& [label, u] : adj[v]) {
        if (colors[u] < 0) {
          unknown = true;
          break;
        }
        pairs.emplace_back(label, colors[u]);
      }
      if (unknown) continue;
      std::sort(pairs.begin(), pairs.end());
      std::string sig = "w|" + std::to_string(colors[v]) + "|";
      for (const auto& [label, c] : pairs) sig += "(" + std::to_string(label) + "," + std::to_string(c) + ")";
      next[v] = lookup(sig, t);
      if (next[v] >= 0) ++counts[next[v]];
    }
    colors.swap(next);
  }
  return FeatureVector(counts.begin(), counts.end());
}

}  // namespace

FeatureVector wl_features(const LabeledGraph& graph, int iterations, ColorDictionary& dict) {
  return refine(graph, iterations, [&](const std::string& sig, int t) { return dict.lookup(sig, t); });
}

FeatureVector wl_features(const LabeledGraph& graph, int iterations, const ColorDictionary& dict) {
  return refine(graph, iterations, [&](const std::string& sig, int) { return dict.find(sig).value_or(-1); });
}

FeatureVector phi(const StateView& view, const PartialAction& rho, GraphKind kind, int iterations,
                  ColorDictionary& dict) {
  return wl_features(build_graph(kind, view, rho), iterations, dict);
}

FeatureVector phi(const StateView& view, const PartialAction& rho, GraphKind kind, int iterations,
                  const ColorDictionary& dict) {
  return wl_features(build_graph(kind, view, rho), iterations, dict);
}

double dot(const std::vector<double>& w, const FeatureVector& x) {
  double s = 0.0;
  for (const auto& [i, c] : x) {
    if (i < static_cast<int>(w.size())) s += w[i] * c;
  }
  return s;
}

}  // namespace liftplan

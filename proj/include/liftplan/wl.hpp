#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "liftplan/graphs.hpp"

namespace liftplan {

/// Injective map from color signatures to dense feature indices.
class ColorDictionary {
 public:
  enum class Mode { Growing, Frozen };

  /// Index of `signature`; in Growing mode unseen signatures are added with
  /// the given WL iteration, in Frozen mode they yield -1.
  int lookup(const std::string& signature, int iteration);
  std::optional<int> find(const std::string& signature) const;

  int size() const { return static_cast<int>(signatures_.size()); }
  const std::string& signature(int index) const { return signatures_[index]; }
  int iteration(int index) const { return iterations_[index]; }

  Mode mode() const { return mode_; }
  void freeze() { mode_ = Mode::Frozen; }
  void unfreeze() { mode_ = Mode::Growing; }

  /// Inserts at a fixed index (used when loading); throws on conflicts.
  void insert(const std::string& signature, int index, int iteration);

  friend bool operator==(const ColorDictionary& a, const ColorDictionary& b) {
    return a.signatures_ == b.signatures_ && a.iterations_ == b.iterations_;
  }

 private:
  Mode mode_ = Mode::Growing;
  std::vector<std::string> signatures_;
  std::vector<int> iterations_;
  std::unordered_map<std::string, int> index_;
};

/// Sparse counts sorted by feature index.
using FeatureVector = std::vector<std::pair<int, int>>;

/// Color histogram over WL iterations 0..L.
FeatureVector wl_features(const LabeledGraph& graph, int iterations, ColorDictionary& dict);
/// Read-only lookup: behaves as a frozen dictionary.
FeatureVector wl_features(const LabeledGraph& graph, int iterations, const ColorDictionary& dict);

FeatureVector phi(const StateView& view, const PartialAction& rho, GraphKind kind, int iterations,
                  ColorDictionary& dict);
FeatureVector phi(const StateView& view, const PartialAction& rho, GraphKind kind, int iterations,
                  const ColorDictionary& dict);

double dot(const std::vector<double>& w, const FeatureVector& x);

}  // namespace liftplan

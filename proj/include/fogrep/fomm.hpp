#pragma once

// Fusion multi-order Markov model: first-order transition counts kept under
// several time discretizations, fused with online-learned weights.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fogrep/calendar.hpp"
#include "fogrep/grid.hpp"

namespace fogrep {

enum class Discretizer { Global, HourOfDay, DayOfWeek, Month };

inline constexpr std::array<Discretizer, 4> kAllDiscretizers = {
    Discretizer::Global, Discretizer::HourOfDay, Discretizer::DayOfWeek, Discretizer::Month};

int bin_count(Discretizer d);
int bin_of(Discretizer d, Timestamp t);
std::string_view to_string(Discretizer d);

struct Prediction {
  NodeId node = 0;
  double probability = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Probability row over successors, ordered by node id.
using Distribution = std::vector<Prediction>;

class MarkovSubModel {
 public:
  struct Row {
    std::map<NodeId, std::uint64_t> counts;
    std::uint64_t total = 0;
  };

  explicit MarkovSubModel(Discretizer d) : discretizer_(d) {}

  Discretizer discretizer() const { return discretizer_; }

  void increment(int bin, NodeId from, NodeId to);

  /// nullptr when (bin, from) has never been left.
  const Row* row(int bin, NodeId from) const;

  /// Count-ratio probabilities; empty when the row is empty.
  Distribution distribution(int bin, NodeId from) const;

  const std::map<std::pair<int, NodeId>, Row>& rows() const { return rows_; }

 private:
  Discretizer discretizer_;
  std::map<std::pair<int, NodeId>, Row> rows_;
};

/// Convex combination of the contributing distributions (null entries do
/// not contribute and their weight is renormalized away), ranked by
/// probability descending then node id ascending.
std::vector<Prediction> fuse_distributions(std::span<const Distribution* const> rows,
                                           std::span<const double> weights);

class FommModel {
 public:
  static constexpr std::size_t kSubModels = kAllDiscretizers.size();

  explicit FommModel(std::string user_id);

  const std::string& user_id() const { return user_id_; }

  /// Scores every sub-model's current top-1 guess against `to_node`, then
  /// learns the transition and refreshes the weights.
  void observe_transition(const NodeVisit& from, NodeId to_node);

  /// Up to k most probable next nodes; empty when nothing is known about
  /// the current node.
  std::vector<Prediction> predict_next(const NodeVisit& current, std::size_t k) const;

  std::array<double, kSubModels> sub_model_accuracy() const;
  const std::array<double, kSubModels>& weights() const { return weights_; }
  const MarkovSubModel& sub_model(std::size_t i) const { return sub_models_[i]; }

  /// Per sub-model `bin,from,to,count` rows, each block headed by
  /// `# <discretizer>`.
  void dump(std::ostream& out) const;

 private:
  // Own row, or the global row for the same origin when the own row is
  // empty, or empty.
  Distribution effective_distribution(std::size_t sub, Timestamp t, NodeId from) const;
  void refresh_weights();

  std::string user_id_;
  std::array<MarkovSubModel, kSubModels> sub_models_;
  std::array<std::uint64_t, kSubModels> hits_{};
  std::array<std::uint64_t, kSubModels> misses_{};
  std::array<double, kSubModels> weights_{};
};

}  // namespace fogrep

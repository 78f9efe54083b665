#include "fogrep/fomm.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace fogrep {

int bin_count(Discretizer d) {
  switch (d) {
    case Discretizer::Global: return 1;
    case Discretizer::HourOfDay: return 24;
    case Discretizer::DayOfWeek: return 7;
    case Discretizer::Month: return 12;
  }
  return 1;
}

int bin_of(Discretizer d, Timestamp t) {
  if (d == Discretizer::Global) return 0;
  const CalendarBins bins = calendar_bins(t);
  switch (d) {
    case Discretizer::HourOfDay: return bins.hour;
    case Discretizer::DayOfWeek: return bins.day_of_week;
    case Discretizer::Month: return bins.month;
    case Discretizer::Global: break;
  }
  return 0;
}

std::string_view to_string(Discretizer d) {
  switch (d) {
    case Discretizer::Global: return "global";
    case Discretizer::HourOfDay: return "hour_of_day";
    case Discretizer::DayOfWeek: return "day_of_week";
    case Discretizer::Month: return "month";
  }
  return "?";
}

void MarkovSubModel::increment(int bin, NodeId from, NodeId to) {
  Row& row = rows_[{bin, from}];
  ++row.counts[to];
  ++row.total;
}

const MarkovSubModel::Row* MarkovSubModel::row(int bin, NodeId from) const {
  auto it = rows_.find({bin, from});
  return it == rows_.end() ? nullptr : &it->second;
}

Distribution MarkovSubModel::distribution(int bin, NodeId from) const {
  Distribution dist;
  const Row* r = row(bin, from);
  if (r == nullptr || r->total == 0) return dist;
  dist.reserve(r->counts.size());
  const auto total = static_cast<double>(r->total);
  for (const auto& [to, count] : r->counts) {
    dist.push_back({to, static_cast<double>(count) / total});
  }
  return dist;
}

std::vector<Prediction> fuse_distributions(std::span<const Distribution* const> rows,
                                           std::span<const double> weights) {
  if (rows.size() != weights.size()) {
    throw std::invalid_argument("fuse_distributions: rows and weights differ in length");
  }
  double weight_sum = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (rows[s] != nullptr && !rows[s]->empty()) weight_sum += weights[s];
  }
  std::vector<Prediction> fused;
  if (weight_sum <= 0.0) return fused;

  std::map<NodeId, double> acc;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (rows[s] == nullptr || rows[s]->empty()) continue;
    const double w = weights[s] / weight_sum;
    for (const auto& p : *rows[s]) acc[p.node] += w * p.probability;
  }
  fused.reserve(acc.size());
  for (const auto& [node, prob] : acc) fused.push_back({node, prob});
  std::stable_sort(fused.begin(), fused.end(), [](const Prediction& a, const Prediction& b) {
    return a.probability > b.probability;
  });
  return fused;
}

FommModel::FommModel(std::string user_id)
    : user_id_(std::move(user_id)),
      sub_models_{MarkovSubModel{Discretizer::Global}, MarkovSubModel{Discretizer::HourOfDay},
                  MarkovSubModel{Discretizer::DayOfWeek}, MarkovSubModel{Discretizer::Month}} {
  refresh_weights();
}

Distribution FommModel::effective_distribution(std::size_t sub, Timestamp t, NodeId from) const {
  const MarkovSubModel& model = sub_models_[sub];
  Distribution dist = model.distribution(bin_of(model.discretizer(), t), from);
  if (dist.empty() && model.discretizer() != Discretizer::Global) {
    dist = sub_models_[0].distribution(0, from);
  }
  return dist;
}

void FommModel::observe_transition(const NodeVisit& from, NodeId to_node) {
  if (from.user_id != user_id_) {
    throw std::invalid_argument("observe_transition: visit of user '" + from.user_id +
                                "' fed to model of user '" + user_id_ + "'");
  }
  for (std::size_t s = 0; s < kSubModels; ++s) {
    const Distribution dist = effective_distribution(s, from.arrival, from.node_id);
    // Top-1 under the same ranking predict_next uses.
    const Prediction* top = nullptr;
    for (const auto& p : dist) {
      if (top == nullptr || p.probability > top->probability) top = &p;
    }
    if (top != nullptr && top->node == to_node) {
      ++hits_[s];
    } else {
      ++misses_[s];
    }
  }
  for (auto& model : sub_models_) {
    model.increment(bin_of(model.discretizer(), from.arrival), from.node_id, to_node);
  }
  refresh_weights();
}

std::vector<Prediction> FommModel::predict_next(const NodeVisit& current, std::size_t k) const {
  std::array<Distribution, kSubModels> dists;
  std::array<const Distribution*, kSubModels> ptrs{};
  for (std::size_t s = 0; s < kSubModels; ++s) {
    dists[s] = effective_distribution(s, current.arrival, current.node_id);
    ptrs[s] = &dists[s];
  }
  auto fused = fuse_distributions(ptrs, weights_);
  if (fused.size() > k) fused.resize(k);
  return fused;
}

std::array<double, FommModel::kSubModels> FommModel::sub_model_accuracy() const {
  std::array<double, kSubModels> rate{};
  for (std::size_t s = 0; s < kSubModels; ++s) {
    const auto n = hits_[s] + misses_[s];
    rate[s] = n == 0 ? 0.0 : static_cast<double>(hits_[s]) / static_cast<double>(n);
  }
  return rate;
}

// Laplace-smoothed hit rate per sub-model, normalized to a probability vector.
void FommModel::refresh_weights() {
  double sum = 0.0;
  for (std::size_t s = 0; s < kSubModels; ++s) {
    weights_[s] = static_cast<double>(hits_[s] + 1) / static_cast<double>(hits_[s] + misses_[s] + 2);
    sum += weights_[s];
  }
  for (auto& w : weights_) w /= sum;
}

void FommModel::dump(std::ostream& out) const {
  for (const auto& model : sub_models_) {
    out << "# " << to_string(model.discretizer()) << '\n';
    for (const auto& [key, row] : model.rows()) {
      for (const auto& [to, count] : row.counts) {
        out << key.first << ',' << key.second << ',' << to << ',' << count << '\n';
      }
    }
  }
}

}  // namespace fogrep

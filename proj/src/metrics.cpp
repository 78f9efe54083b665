#include "fogrep/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace fogrep {

namespace {

constexpr std::string_view kResultsHeader = "policy,variant,availability_pct,excess_pct";

Seconds overlap(Timestamp a0, Timestamp a1, Timestamp b0, Timestamp b1) {
  return std::max<Timestamp>(0, std::min(a1, b1) - std::max(a0, b0));
}

std::string pct(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

MetricsResult compute_metrics(std::span<const HoldingInterval> history, const VisitStreams& presence) {
  std::map<std::string, std::vector<const HoldingInterval*>> by_user;
  for (const auto& h : history) by_user[h.user_id].push_back(&h);

  MetricsResult out;
  double avail_sum = 0.0, excess_sum = 0.0;
  std::size_t counted = 0;
  for (const auto& [user, visits] : presence) {
    UserMetrics um;
    um.user_id = user;
    for (const auto& v : visits) um.presence_seconds += v.duration();

    if (auto it = by_user.find(user); it != by_user.end()) {
      for (const HoldingInterval* h : it->second) {
        // First visit that ends after the interval starts.
        auto v = std::upper_bound(visits.begin(), visits.end(), h->from,
                                  [](Timestamp t, const NodeVisit& nv) { return t < nv.departure; });
        for (; v != visits.end() && v->arrival < h->to; ++v) {
          const Seconds ov = overlap(h->from, h->to, v->arrival, v->departure);
          if (v->node_id != h->node_id) {
            um.excess_node_seconds += ov;
          } else if (h->kind == HoldingInterval::Kind::Replica) {
            um.available_seconds += ov;
          }
        }
      }
    }

    if (um.presence_seconds > 0) {
      const auto presence_d = static_cast<double>(um.presence_seconds);
      um.availability_pct = 100.0 * static_cast<double>(um.available_seconds) / presence_d;
      um.excess_pct = 100.0 * static_cast<double>(um.excess_node_seconds) / presence_d;
      avail_sum += *um.availability_pct;
      excess_sum += *um.excess_pct;
      ++counted;
      out.presence_seconds += um.presence_seconds;
      out.available_seconds += um.available_seconds;
      out.excess_node_seconds += um.excess_node_seconds;
    }
    out.users.push_back(std::move(um));
  }
  if (out.presence_seconds > 0) {
    const auto total = static_cast<double>(out.presence_seconds);
    out.availability_pct = 100.0 * static_cast<double>(out.available_seconds) / total;
    out.excess_pct = 100.0 * static_cast<double>(out.excess_node_seconds) / total;
  }
  if (counted > 0) {
    out.availability_pct_unweighted = avail_sum / static_cast<double>(counted);
    out.excess_pct_unweighted = excess_sum / static_cast<double>(counted);
  }
  return out;
}

double availability(std::span<const HoldingInterval> history, const VisitStreams& presence) {
  return compute_metrics(history, presence).availability_pct;
}

double excess_data(std::span<const HoldingInterval> history, const VisitStreams& presence) {
  return compute_metrics(history, presence).excess_pct;
}

std::vector<std::size_t> pareto_front(std::span<const ResultRow> rows) {
  auto dominates = [](const ResultRow& a, const ResultRow& b) {
    return a.availability_pct >= b.availability_pct && a.excess_pct <= b.excess_pct &&
           (a.availability_pct > b.availability_pct || a.excess_pct < b.excess_pct);
  };
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < rows.size() && !dominated; ++j) {
      dominated = j != i && dominates(rows[j], rows[i]);
    }
    if (!dominated) front.push_back(i);
  }
  std::stable_sort(front.begin(), front.end(), [&rows](std::size_t a, std::size_t b) {
    return rows[a].availability_pct < rows[b].availability_pct;
  });
  return front;
}

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << r.variant << ',' << pct(r.availability_pct) << ','
        << pct(r.excess_pct) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) {
    throw std::runtime_error("results header mismatch: expected '" + std::string(kResultsHeader) +
                             "', got '" + line + "'");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    ResultRow r;
    auto num = [](std::string_view s, double& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc{} && p == s.data() + s.size();
    };
    if (f.size() != 4 || f[0].empty() || !num(f[2], r.availability_pct) ||
        !num(f[3], r.excess_pct)) {
      throw std::runtime_error("malformed results row at line " + std::to_string(line_no));
    }
    r.policy = std::string(f[0]);
    r.variant = std::string(f[1]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error("results file has no rows");
  return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ResultRow> rows,
                          std::span<const std::size_t> front) {
  out << kResultsHeader << ",pareto\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool on_front = std::find(front.begin(), front.end(), i) != front.end();
    out << rows[i].policy << ',' << rows[i].variant << ',' << pct(rows[i].availability_pct) << ','
        << pct(rows[i].excess_pct) << ',' << (on_front ? 1 : 0) << '\n';
  }
}

void write_pareto_csv(std::ostream& out, std::span<const ResultRow> rows,
                      std::span<const std::size_t> front) {
  out << kResultsHeader << '\n';
  for (std::size_t i : front) {
    out << rows[i].policy << ',' << rows[i].variant << ',' << pct(rows[i].availability_pct) << ','
        << pct(rows[i].excess_pct) << '\n';
  }
}

}  // namespace fogrep

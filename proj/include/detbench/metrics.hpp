#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "detbench/protocol.hpp"

namespace detbench {

struct DetectorSummary {
  std::string detector;
  std::vector<std::pair<int, double>> rep_by_n;  // ascending n
  double rep_overall = 0.0;
  std::optional<double> stability;  // undefined when rep_overall == 0
  double p10 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p90 = 0.0;
  double mean = 0.0;  // over the pooled per-task, per-n sample
  int rank = 0;       // within one aggregation (competition ranking)
};

// Linearly interpolated percentile between closest ranks; `sorted` must be
// ascending. With this convention the median of an odd-length sample is the
// middle element exactly.
inline double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InvalidParameterError("percentile of empty sample");
  if (p < 0.0 || p > 100.0) throw InvalidParameterError("percentile out of [0,100]");
  if (sorted.size() == 1) return sorted.front();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Normalised dispersion of repeatability across the feature-count axis:
// population standard deviation of the per-n values divided by their mean.
// A zero mean leaves it undefined (reported as absent, never infinity).
inline std::optional<double> stability_error(const std::vector<double>& rep_per_n) {
  if (rep_per_n.empty()) throw InvalidParameterError("stability of empty series");
  double mean = 0.0;
  for (const double v : rep_per_n) mean += v;
  mean /= static_cast<double>(rep_per_n.size());
  if (mean == 0.0) return std::nullopt;
  double ss = 0.0;
  for (const double v : rep_per_n) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(rep_per_n.size())) / mean;
}

// Reduce a complete (detector x task x n) grid of records to per-detector
// summaries. Records may arrive in any order; they are keyed and summed in
// a fixed order so results are bit-reproducible. An incomplete or duplicated
// grid is an error naming the offending cells. With `exclude_degenerate`,
// tasks whose record was forced to zero (empty common part) are dropped from
// the means and pooled percentiles instead of contributing zeros.
inline std::vector<DetectorSummary> aggregate(const std::vector<RepeatabilityRecord>& records,
                                              bool exclude_degenerate = false) {
  if (records.empty()) throw ValidationError("aggregate: no records");

  std::set<std::string> detectors;
  std::set<std::string> tasks;
  std::set<int> n_values;
  std::map<std::tuple<std::string, std::string, int>, const RepeatabilityRecord*> grid;
  for (const auto& r : records) {
    detectors.insert(r.detector);
    tasks.insert(r.task);
    n_values.insert(r.n);
    const auto key = std::make_tuple(r.detector, r.task, r.n);
    if (!grid.emplace(key, &r).second)
      throw ValidationError("aggregate: duplicate record for (" + r.detector + ", " + r.task +
                            ", n=" + std::to_string(r.n) + ")");
  }

  std::vector<std::string> missing;
  for (const auto& d : detectors)
    for (const auto& t : tasks)
      for (const int n : n_values)
        if (!grid.count(std::make_tuple(d, t, n)))
          missing.push_back("(" + d + ", " + t + ", n=" + std::to_string(n) + ")");
  if (!missing.empty()) {
    std::string message = "aggregate: incomplete grid, missing " +
                          std::to_string(missing.size()) + " cell(s):";
    const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) message += " " + missing[i];
    if (shown < missing.size()) message += " ...";
    throw ValidationError(message);
  }

  std::vector<DetectorSummary> summaries;
  summaries.reserve(detectors.size());
  for (const auto& d : detectors) {
    DetectorSummary s;
    s.detector = d;
    std::vector<double> pooled;
    std::vector<double> per_n;
    for (const int n : n_values) {
      double sum = 0.0;
      int count = 0;
      for (const auto& t : tasks) {
        const RepeatabilityRecord& r = *grid.at(std::make_tuple(d, t, n));
        if (exclude_degenerate && r.degenerate) continue;
        sum += r.rep;
        pooled.push_back(r.rep);
        ++count;
      }
      const double rep_n = count > 0 ? sum / count : 0.0;
      s.rep_by_n.emplace_back(n, rep_n);
      per_n.push_back(rep_n);
    }
    double overall = 0.0;
    for (const double v : per_n) overall += v;
    s.rep_overall = overall / static_cast<double>(per_n.size());
    s.stability = stability_error(per_n);

    if (pooled.empty()) pooled.push_back(0.0);
    std::sort(pooled.begin(), pooled.end());
    s.p10 = percentile(pooled, 10);
    s.p25 = percentile(pooled, 25);
    s.p50 = percentile(pooled, 50);
    s.p75 = percentile(pooled, 75);
    s.p90 = percentile(pooled, 90);
    double pooled_sum = 0.0;
    for (const double v : pooled) pooled_sum += v;
    s.mean = pooled_sum / static_cast<double>(pooled.size());
    summaries.push_back(std::move(s));
  }
  return summaries;
}

// Competition ranking by overall repeatability, best first: tied detectors
// share the lower rank number and the next rank skips (1, 1, 3, ...).
inline void assign_ranks(std::vector<DetectorSummary>& summaries) {
  std::vector<std::size_t> order(summaries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (summaries[a].rep_overall != summaries[b].rep_overall)
      return summaries[a].rep_overall > summaries[b].rep_overall;
    return summaries[a].detector < summaries[b].detector;
  });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (pos > 0 &&
        summaries[order[pos]].rep_overall == summaries[order[pos - 1]].rep_overall) {
      summaries[order[pos]].rank = summaries[order[pos - 1]].rank;
    } else {
      summaries[order[pos]].rank = static_cast<int>(pos) + 1;
    }
  }
}

}  // namespace detbench

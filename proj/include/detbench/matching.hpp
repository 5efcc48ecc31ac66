#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "detbench/geometry.hpp"

namespace detbench {

// One admissible correspondence: overlap already cleared the 1 - eps_O bar.
// Sub-threshold pairs are simply absent from the candidate list, which is
// equivalent to the -inf score convention.
struct CandidatePair {
  int ref_index = 0;
  int target_index = 0;
  double overlap = 0.0;
};

// One-to-one assignment, pairs sorted by overlap descending.
struct Matching {
  std::vector<CandidatePair> pairs;
  double total_overlap() const {
    double sum = 0.0;
    for (const auto& p : pairs) sum += p.overlap;
    return sum;
  }
};

// All (ref, target) pairs whose normalised overlap reaches 1 - eps_O.
// `ref_to_target` is the task homography as stored (reference to target);
// targets are warped into the reference frame once and reused across refs.
// Targets whose centers fail to warp are skipped; upstream common-part
// filtering has already dropped and counted those.
inline std::vector<CandidatePair> build_candidates(const std::vector<Region>& refs,
                                                   const std::vector<Region>& targets,
                                                   const Homography& ref_to_target,
                                                   double overlap_eps,
                                                   double norm_area = kDefaultNormArea,
                                                   bool legacy_quick_reject = false) {
  if (!(overlap_eps > 0.0 && overlap_eps < 1.0))
    throw InvalidParameterError("overlap epsilon must lie in (0, 1)");

  const Homography target_to_ref = ref_to_target.inverse();
  std::vector<std::optional<Region>> warped(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    try {
      warped[j] = warp_region(targets[j], target_to_ref);
    } catch (const DegenerateWarpError&) {
      warped[j] = std::nullopt;
    }
  }

  const double threshold = 1.0 - overlap_eps;

  // IoU never exceeds the smaller/larger area ratio, and rescaling both
  // regions by the same factor preserves that ratio, so a pair whose ratio
  // sits below half the acceptance threshold cannot reach it even with
  // rasterisation error. Skipping those pairs early keeps the raster grids
  // bounded when region scales differ by orders of magnitude (a tiny
  // reference otherwise normalises a large target into an enormous ellipse).
  std::vector<double> ref_area(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) ref_area[i] = area(refs[i]);
  std::vector<double> warped_area(targets.size(), 0.0);
  for (std::size_t j = 0; j < targets.size(); ++j)
    if (warped[j]) warped_area[j] = area(*warped[j]);
  const double ratio_floor = 0.5 * threshold;

  std::vector<CandidatePair> candidates;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (!warped[j]) continue;
      const double ratio = std::min(ref_area[i], warped_area[j]) /
                           std::max(ref_area[i], warped_area[j]);
      if (ratio < ratio_floor) continue;
      const double ov = normalized_overlap(refs[i], *warped[j], norm_area, legacy_quick_reject);
      if (ov >= threshold)
        candidates.push_back({static_cast<int>(i), static_cast<int>(j), ov});
    }
  }
  return candidates;
}

// Greedy approximation of the maximum-weight bipartite matching: candidates
// are visited in descending overlap, ties broken by (ref_index, target_index),
// and accepted when both endpoints are still free. The tie-break makes the
// result independent of the input ordering.
inline Matching greedy_match(std::vector<CandidatePair> candidates) {
  int ref_count = 0, target_count = 0;
  for (const auto& c : candidates) {
    if (!std::isfinite(c.overlap)) throw InvalidParameterError("candidate overlap is not finite");
    ref_count = std::max(ref_count, c.ref_index + 1);
    target_count = std::max(target_count, c.target_index + 1);
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const CandidatePair& a, const CandidatePair& b) {
              if (a.overlap != b.overlap) return a.overlap > b.overlap;
              if (a.ref_index != b.ref_index) return a.ref_index < b.ref_index;
              return a.target_index < b.target_index;
            });

  std::vector<char> ref_used(ref_count, 0);
  std::vector<char> target_used(target_count, 0);

  Matching result;
  for (const auto& c : candidates) {
    if (ref_used[c.ref_index] || target_used[c.target_index]) continue;
    ref_used[c.ref_index] = 1;
    target_used[c.target_index] = 1;
    result.pairs.push_back(c);
  }
  return result;
}

}  // namespace detbench

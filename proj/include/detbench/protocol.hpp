#pragma once

#include <string>
#include <utility>
#include <vector>

#include "detbench/matching.hpp"

namespace detbench {

struct ImageInfo {
  std::string id;  // "<sequence>/<index>"
  int width = 0;
  int height = 0;
};

// One evaluation unit: a reference image, a target image, and the ground
// truth homography mapping reference coordinates to target coordinates.
struct PairTask {
  std::string id;  // "<sequence>/<ref>-<target>"
  std::string sequence;
  std::string nuisance;  // "viewpoint" | "illumination" | other
  ImageInfo ref_image;
  ImageInfo target_image;
  Homography ref_to_target;
};

struct EvalParams {
  double overlap_eps = 0.4;
  double norm_area = kDefaultNormArea;
  std::vector<int> n_list{100, 200, 500, 1000};
  double point_radius = 10.0;
  double magnification = 1.0;
  bool legacy_quick_reject = false;  // sweep/diagnostic mode only
};

inline void validate(const EvalParams& p) {
  if (!(p.overlap_eps > 0.0 && p.overlap_eps < 1.0))
    throw InvalidParameterError("overlap epsilon must lie in (0, 1)");
  if (!(p.norm_area > 0.0)) throw InvalidParameterError("normalisation area must be > 0");
  if (!(p.point_radius > 0.0)) throw InvalidParameterError("point radius must be > 0");
  if (!(p.magnification > 0.0)) throw InvalidParameterError("magnification must be > 0");
  if (p.n_list.empty()) throw InvalidParameterError("n list must not be empty");
  int prev = 0;
  for (const int n : p.n_list) {
    if (n <= prev) throw InvalidParameterError("n list must be strictly increasing and positive");
    prev = n;
  }
}

// Per (detector, task, n) outcome. rep = correspondences / min(filtered
// counts); when either filtered list is empty the record is degenerate and
// rep is 0 rather than NaN, so aggregation stays total.
struct RepeatabilityRecord {
  std::string detector;
  std::string task;
  int n = 0;
  double rep = 0.0;
  int num_correspondences = 0;
  int num_ref_filtered = 0;
  int num_target_filtered = 0;
  bool degenerate = false;
};

// The n highest-score regions; ties keep their input order.
inline std::vector<Region> select_top_n(const std::vector<Region>& detections, int n) {
  if (n < 1) throw InvalidParameterError("top-n must be >= 1");
  std::vector<Region> out = detections;
  std::stable_sort(out.begin(), out.end(),
                   [](const Region& a, const Region& b) { return a.score > b.score; });
  if (static_cast<std::size_t>(n) < out.size()) out.resize(n);
  return out;
}

struct CommonPartResult {
  std::vector<Region> refs;
  std::vector<Region> targets;
  int dropped_degenerate = 0;
};

namespace detail {

inline bool in_domain(const Eigen::Vector2d& p, const ImageInfo& image) {
  return p.x() >= 0.0 && p.x() < image.width && p.y() >= 0.0 && p.y() < image.height;
}

}  // namespace detail

// Drop regions that cannot be matched because their center falls outside the
// other image: ref centers are sent through H and tested against the target
// domain [0,W')x[0,H'), target centers through H^-1 against [0,W)x[0,H).
// Centers that hit the horizon are dropped and counted, not raised.
inline CommonPartResult common_part_filter(const std::vector<Region>& refs,
                                           const std::vector<Region>& targets,
                                           const PairTask& task) {
  CommonPartResult out;
  const Homography inverse = task.ref_to_target.inverse();
  for (const Region& r : refs) {
    try {
      if (detail::in_domain(task.ref_to_target.apply(r.center), task.target_image))
        out.refs.push_back(r);
    } catch (const DegenerateWarpError&) {
      ++out.dropped_degenerate;
    }
  }
  for (const Region& t : targets) {
    try {
      if (detail::in_domain(inverse.apply(t.center), task.ref_image)) out.targets.push_back(t);
    } catch (const DegenerateWarpError&) {
      ++out.dropped_degenerate;
    }
  }
  return out;
}

// The full per-pair pipeline: top-n selection, optional magnification,
// common-part filtering, warped overlap thresholding, greedy matching.
inline RepeatabilityRecord pair_repeatability(const std::vector<Region>& refs,
                                              const std::vector<Region>& targets,
                                              const PairTask& task, const EvalParams& params,
                                              int n, const std::string& detector = {}) {
  validate(params);
  std::vector<Region> ref_top = select_top_n(refs, n);
  std::vector<Region> target_top = select_top_n(targets, n);

  if (params.magnification != 1.0) {
    for (Region& r : ref_top) r = magnify(r, params.magnification);
    for (Region& t : target_top) t = magnify(t, params.magnification);
  }

  const CommonPartResult common = common_part_filter(ref_top, target_top, task);

  RepeatabilityRecord record;
  record.detector = detector;
  record.task = task.id;
  record.n = n;
  record.num_ref_filtered = static_cast<int>(common.refs.size());
  record.num_target_filtered = static_cast<int>(common.targets.size());

  const int min_count = std::min(record.num_ref_filtered, record.num_target_filtered);
  if (min_count == 0) {
    record.degenerate = true;
    return record;
  }

  const Matching matching =
      greedy_match(build_candidates(common.refs, common.targets, task.ref_to_target,
                                    params.overlap_eps, params.norm_area,
                                    params.legacy_quick_reject));
  record.num_correspondences = static_cast<int>(matching.pairs.size());
  record.rep = static_cast<double>(record.num_correspondences) / min_count;
  return record;
}

// Repeatability as a function of the magnification factor; with the corrected
// quick-reject the curve is approximately flat.
inline std::vector<std::pair<double, double>> magnification_sweep(
    const std::vector<Region>& refs, const std::vector<Region>& targets, const PairTask& task,
    const EvalParams& params, int n, const std::vector<double>& gammas) {
  std::vector<std::pair<double, double>> out;
  out.reserve(gammas.size());
  for (const double gamma : gammas) {
    if (!(gamma > 0.0)) throw InvalidParameterError("magnification must be > 0");
    EvalParams swept = params;
    swept.magnification = gamma;
    out.emplace_back(gamma, pair_repeatability(refs, targets, task, swept, n).rep);
  }
  return out;
}

}  // namespace detbench

#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "detbench/metrics.hpp"
#include "detbench/svg.hpp"
#include "detbench/version.hpp"

namespace detbench {

struct RunMetadata {
  std::string tool_version = kToolVersion;
  std::string dataset;
  EvalParams params;
  std::uint64_t master_seed = 0;
  std::vector<std::string> detectors;
  std::map<std::string, std::string> input_checksums;  // input id -> sha256
  bool exclude_degenerate = false;
};

struct SplitSummaries {
  std::string split;  // "all" or a nuisance label
  std::vector<DetectorSummary> summaries;
};

struct ReportBundle {
  RunMetadata metadata;
  std::vector<RepeatabilityRecord> records;
  std::vector<SplitSummaries> splits;
  std::vector<std::string> artifacts;  // emitted files, relative to the bundle
};

namespace detail {

inline nlohmann::json to_json(const EvalParams& p) {
  return {{"overlap_eps", p.overlap_eps},     {"norm_area", p.norm_area},
          {"n_list", p.n_list},               {"point_radius", p.point_radius},
          {"magnification", p.magnification}, {"legacy_quick_reject", p.legacy_quick_reject}};
}

inline EvalParams params_from_json(const nlohmann::json& j) {
  EvalParams p;
  p.overlap_eps = j.at("overlap_eps").get<double>();
  p.norm_area = j.at("norm_area").get<double>();
  p.n_list = j.at("n_list").get<std::vector<int>>();
  p.point_radius = j.at("point_radius").get<double>();
  p.magnification = j.at("magnification").get<double>();
  p.legacy_quick_reject = j.at("legacy_quick_reject").get<bool>();
  return p;
}

inline nlohmann::json to_json(const RepeatabilityRecord& r) {
  return {{"detector", r.detector},
          {"task", r.task},
          {"n", r.n},
          {"rep", r.rep},
          {"correspondences", r.num_correspondences},
          {"ref_count", r.num_ref_filtered},
          {"target_count", r.num_target_filtered},
          {"degenerate", r.degenerate}};
}

inline RepeatabilityRecord record_from_json(const nlohmann::json& j) {
  RepeatabilityRecord r;
  r.detector = j.at("detector").get<std::string>();
  r.task = j.at("task").get<std::string>();
  r.n = j.at("n").get<int>();
  r.rep = j.at("rep").get<double>();
  r.num_correspondences = j.at("correspondences").get<int>();
  r.num_ref_filtered = j.at("ref_count").get<int>();
  r.num_target_filtered = j.at("target_count").get<int>();
  r.degenerate = j.at("degenerate").get<bool>();
  return r;
}

inline nlohmann::json to_json(const DetectorSummary& s) {
  nlohmann::json rep_by_n = nlohmann::json::array();
  for (const auto& [n, rep] : s.rep_by_n) rep_by_n.push_back({{"n", n}, {"rep", rep}});
  nlohmann::json j = {{"detector", s.detector},
                      {"rep_by_n", rep_by_n},
                      {"rep_overall", s.rep_overall},
                      {"p10", s.p10},
                      {"p25", s.p25},
                      {"p50", s.p50},
                      {"p75", s.p75},
                      {"p90", s.p90},
                      {"mean", s.mean},
                      {"rank", s.rank}};
  if (s.stability)
    j["stability"] = *s.stability;
  else
    j["stability"] = nullptr;
  return j;
}

inline DetectorSummary summary_from_json(const nlohmann::json& j) {
  DetectorSummary s;
  s.detector = j.at("detector").get<std::string>();
  for (const auto& e : j.at("rep_by_n"))
    s.rep_by_n.emplace_back(e.at("n").get<int>(), e.at("rep").get<double>());
  s.rep_overall = j.at("rep_overall").get<double>();
  if (!j.at("stability").is_null()) s.stability = j.at("stability").get<double>();
  s.p10 = j.at("p10").get<double>();
  s.p25 = j.at("p25").get<double>();
  s.p50 = j.at("p50").get<double>();
  s.p75 = j.at("p75").get<double>();
  s.p90 = j.at("p90").get<double>();
  s.mean = j.at("mean").get<double>();
  s.rank = j.at("rank").get<int>();
  return s;
}

inline std::string sanitize_filename(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return out;
}

// 2-decimal fixed formatting for the human tables.
inline std::string fixed2(double value) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << value;
  return os.str();
}

inline std::string shortest_num(double value) { return svg_num(value); }

inline std::string n_label(int n) {
  if (n >= 1000 && n % 1000 == 0) return std::to_string(n / 1000) + "k";
  if (n < 1000 && n % 100 == 0) return "." + std::to_string(n / 100) + "k";
  return std::to_string(n);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Machine results document, schema "detbench-results/1".

inline void write_results(const std::filesystem::path& path, const ReportBundle& bundle) {
  nlohmann::json meta = {{"tool_version", bundle.metadata.tool_version},
                         {"dataset", bundle.metadata.dataset},
                         {"params", detail::to_json(bundle.metadata.params)},
                         {"master_seed", bundle.metadata.master_seed},
                         {"detectors", bundle.metadata.detectors},
                         {"input_checksums", bundle.metadata.input_checksums},
                         {"exclude_degenerate", bundle.metadata.exclude_degenerate}};

  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : bundle.records) records.push_back(detail::to_json(r));

  nlohmann::json splits = nlohmann::json::array();
  for (const auto& split : bundle.splits) {
    nlohmann::json summaries = nlohmann::json::array();
    for (const auto& s : split.summaries) summaries.push_back(detail::to_json(s));
    splits.push_back({{"split", split.split}, {"summaries", summaries}});
  }

  const nlohmann::json doc = {{"schema", kResultsSchema},
                              {"metadata", meta},
                              {"records", records},
                              {"splits", splits},
                              {"artifacts", bundle.artifacts}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write results file: " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw Error("failed writing results file: " + path.string());
}

inline ReportBundle read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open results file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("results " + path.string() + ": " + e.what());
  }
  try {
    if (doc.value("schema", "") != kResultsSchema)
      throw ValidationError("results field 'schema' must be \"" + std::string(kResultsSchema) +
                            "\"");
    ReportBundle bundle;
    const auto& meta = doc.at("metadata");
    bundle.metadata.tool_version = meta.at("tool_version").get<std::string>();
    bundle.metadata.dataset = meta.at("dataset").get<std::string>();
    bundle.metadata.params = detail::params_from_json(meta.at("params"));
    bundle.metadata.master_seed = meta.at("master_seed").get<std::uint64_t>();
    bundle.metadata.detectors = meta.at("detectors").get<std::vector<std::string>>();
    bundle.metadata.input_checksums =
        meta.at("input_checksums").get<std::map<std::string, std::string>>();
    bundle.metadata.exclude_degenerate = meta.at("exclude_degenerate").get<bool>();
    for (const auto& r : doc.at("records")) bundle.records.push_back(detail::record_from_json(r));
    for (const auto& split : doc.at("splits")) {
      SplitSummaries ss;
      ss.split = split.at("split").get<std::string>();
      for (const auto& s : split.at("summaries"))
        ss.summaries.push_back(detail::summary_from_json(s));
      bundle.splits.push_back(std::move(ss));
    }
    bundle.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
    return bundle;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("results " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tables: per split a human CSV (repeatability in percent, 2 decimals) and a
// machine CSV (shortest-round-trip, re-parses bit-exactly), plus a combined
// table with stb/rep/rnk blocks per split and an average-rank column.

inline std::vector<std::string> emit_tables(const ReportBundle& bundle,
                                            const std::filesystem::path& out_dir) {
  std::vector<std::string> written;

  for (const auto& split : bundle.splits) {
    const std::string stem = "table_" + detail::sanitize_filename(split.split);

    {
      const std::string name = stem + ".csv";
      std::ofstream out(out_dir / name, std::ios::binary);
      if (!out) throw Error("cannot write table: " + (out_dir / name).string());
      out << "detector,stb,rep,rnk\n";
      for (const auto& s : split.summaries) {
        out << s.detector << ',' << (s.stability ? detail::fixed2(*s.stability) : "") << ','
            << detail::fixed2(100.0 * s.rep_overall) << ',' << s.rank << "\n";
      }
      written.push_back(name);
    }

    {
      const std::string name = stem + "_machine.csv";
      std::ofstream out(out_dir / name, std::ios::binary);
      if (!out) throw Error("cannot write table: " + (out_dir / name).string());
      out << "detector,rep_overall,stability,p10,p25,p50,p75,p90,mean,rank";
      if (!split.summaries.empty())
        for (const auto& [n, rep] : split.summaries.front().rep_by_n) out << ",rep_" << n;
      out << "\n";
      for (const auto& s : split.summaries) {
        out << s.detector << ',' << detail::shortest_num(s.rep_overall) << ','
            << (s.stability ? detail::shortest_num(*s.stability) : "") << ','
            << detail::shortest_num(s.p10) << ',' << detail::shortest_num(s.p25) << ','
            << detail::shortest_num(s.p50) << ',' << detail::shortest_num(s.p75) << ','
            << detail::shortest_num(s.p90) << ',' << detail::shortest_num(s.mean) << ','
            << s.rank;
        for (const auto& [n, rep] : s.rep_by_n) out << ',' << detail::shortest_num(rep);
        out << "\n";
      }
      written.push_back(name);
    }
  }

  {
    // Combined table over the nuisance splits when present ("all" is its own
    // per-split table); ranks come last, then their average across splits.
    std::vector<const SplitSummaries*> columns;
    for (const auto& split : bundle.splits)
      if (bundle.splits.size() == 1 || split.split != "all") columns.push_back(&split);

    std::vector<std::string> detectors;
    if (!columns.empty())
      for (const auto& s : columns.front()->summaries) detectors.push_back(s.detector);

    const std::string name = "table_combined.csv";
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw Error("cannot write table: " + (out_dir / name).string());
    out << "detector";
    for (const auto* c : columns)
      out << ',' << c->split << "_stb," << c->split << "_rep," << c->split << "_rnk";
    out << ",avg_rnk\n";
    for (const auto& d : detectors) {
      out << d;
      double rank_sum = 0.0;
      for (const auto* c : columns) {
        const DetectorSummary* found = nullptr;
        for (const auto& s : c->summaries)
          if (s.detector == d) found = &s;
        if (!found) throw ValidationError("combined table: detector '" + d + "' missing in split '" +
                                          c->split + "'");
        out << ',' << (found->stability ? detail::fixed2(*found->stability) : "") << ','
            << detail::fixed2(100.0 * found->rep_overall) << ',' << found->rank;
        rank_sum += found->rank;
      }
      out << ',' << detail::fixed2(rank_sum / static_cast<double>(columns.size())) << "\n";
    }
    written.push_back(name);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Box-and-whisker figure: repeatability on the x axis, one row per detector
// (input order top to bottom). Box spans p25-p75 with a median line, the
// whiskers span p10-p25 and p75-p90 in the detector's invariance-class line
// style, the mean is drawn as a cross, and the per-n values are labelled
// markers. The root element declares the linear x mapping in data-
// attributes so the geometry can be checked by parsing the file back.

inline void emit_box_whisker(const std::vector<DetectorSummary>& summaries,
                             const std::filesystem::path& path) {
  const double left = 150, right = 25, top = 34, bottom = 46, row_height = 48;
  const double width = 860;
  const double height = top + bottom + row_height * static_cast<double>(summaries.size());
  const double px_min = left, px_max = width - right;
  auto x_of = [&](double v) { return px_min + v * (px_max - px_min); };

  SvgCanvas svg(width, height,
                {{"x-min", "0"},
                 {"x-max", "1"},
                 {"px-min", svg_num(px_min)},
                 {"px-max", svg_num(px_max)}});

  const SvgStyle grid{.fill = "none", .stroke = "#dddddd", .stroke_width = 1.0};
  const SvgStyle axis{.fill = "none", .stroke = "black", .stroke_width = 1.0};
  for (int tick = 0; tick <= 10; ++tick) {
    const double v = tick / 10.0;
    svg.line(x_of(v), top - 6, x_of(v), height - bottom, tick ? grid : axis);
    if (tick % 2 == 0) svg.text(x_of(v), height - bottom + 16, svg_num(v), 11, "middle");
  }
  svg.line(px_min, height - bottom, px_max, height - bottom, axis);
  svg.text((px_min + px_max) / 2, height - 10, "repeatability", 12, "middle");

  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const DetectorSummary& s = summaries[i];
    const double yc = top + row_height * (static_cast<double>(i) + 0.5);
    const std::string dash = invariance_dash(s.detector);

    std::ostringstream attrs;
    attrs << "class=\"row\" data-detector=\"" << SvgCanvas::escape(s.detector) << "\" data-p10=\""
          << svg_num(s.p10) << "\" data-p25=\"" << svg_num(s.p25) << "\" data-p50=\""
          << svg_num(s.p50) << "\" data-p75=\"" << svg_num(s.p75) << "\" data-p90=\""
          << svg_num(s.p90) << "\" data-mean=\"" << svg_num(s.mean) << "\"";
    svg.group_begin(attrs.str());

    SvgStyle whisker{.fill = "none", .stroke = "black", .stroke_width = 1.2, .dash = dash};
    svg.line(x_of(s.p10), yc, x_of(s.p25), yc, whisker, "class=\"whisker-low\"");
    svg.line(x_of(s.p75), yc, x_of(s.p90), yc, whisker, "class=\"whisker-high\"");
    const SvgStyle cap{.fill = "none", .stroke = "black", .stroke_width = 1.2};
    svg.line(x_of(s.p10), yc - 5, x_of(s.p10), yc + 5, cap, "class=\"cap-low\"");
    svg.line(x_of(s.p90), yc - 5, x_of(s.p90), yc + 5, cap, "class=\"cap-high\"");

    const SvgStyle box{.fill = "white", .stroke = "black", .stroke_width = 1.2};
    svg.rect(x_of(s.p25), yc - 9, x_of(s.p75) - x_of(s.p25), 18, box, "class=\"box\"");
    const SvgStyle median{.fill = "none", .stroke = "black", .stroke_width = 2.0};
    svg.line(x_of(s.p50), yc - 9, x_of(s.p50), yc + 9, median, "class=\"median\"");

    const SvgStyle mean_style{.fill = "none", .stroke = "#d62728", .stroke_width = 1.4};
    svg.line(x_of(s.mean) - 4, yc - 4, x_of(s.mean) + 4, yc + 4, mean_style, "class=\"mean\"");
    svg.line(x_of(s.mean) - 4, yc + 4, x_of(s.mean) + 4, yc - 4, mean_style, "class=\"mean\"");

    for (const auto& [n, rep] : s.rep_by_n) {
      std::ostringstream extra;
      extra << "class=\"nmark\" data-n=\"" << n << "\" data-rep=\"" << svg_num(rep) << "\"";
      svg.text(x_of(rep), yc - 14, detail::n_label(n), 9, "middle", "#1f77b4", extra.str());
    }

    svg.text(left - 10, yc + 4, s.detector, 11, "end");
    svg.group_end();
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write figure: " + path.string());
  out << svg.str();
}

// ---------------------------------------------------------------------------
// Scatter grid at a fixed n: one panel per (reference row, detector column),
// one point per pair task, with the identity diagonal for reference. Every
// detector must cover exactly the same task set.

inline void emit_scatter_grid(const std::vector<RepeatabilityRecord>& records,
                              const std::vector<std::string>& reference_detectors,
                              const std::vector<std::string>& detectors, int n,
                              const std::filesystem::path& path) {
  std::map<std::string, std::map<std::string, double>> rep;  // detector -> task -> rep
  std::set<std::string> tasks;
  for (const auto& r : records) {
    if (r.n != n) continue;
    rep[r.detector][r.task] = r.rep;
    tasks.insert(r.task);
  }

  std::vector<std::string> wanted = reference_detectors;
  wanted.insert(wanted.end(), detectors.begin(), detectors.end());
  for (const auto& d : wanted) {
    const auto it = rep.find(d);
    std::vector<std::string> missing;
    for (const auto& t : tasks)
      if (it == rep.end() || !it->second.count(t)) missing.push_back(t);
    if (!missing.empty()) {
      std::string message =
          "scatter: detector '" + d + "' missing " + std::to_string(missing.size()) + " task(s):";
      const std::size_t shown = std::min<std::size_t>(missing.size(), 10);
      for (std::size_t i = 0; i < shown; ++i) message += " " + missing[i];
      if (shown < missing.size()) message += " ...";
      throw ValidationError(message);
    }
  }

  const double panel = 170, gap = 14, left = 70, top = 46, bottom = 20, right = 16;
  const double width =
      left + right + panel * static_cast<double>(detectors.size()) +
      gap * static_cast<double>(detectors.size() ? detectors.size() - 1 : 0);
  const double height =
      top + bottom + panel * static_cast<double>(reference_detectors.size()) +
      gap * static_cast<double>(reference_detectors.size() ? reference_detectors.size() - 1 : 0);

  SvgCanvas svg(width, height, {{"n", std::to_string(n)}, {"panel", svg_num(panel)}});

  const SvgStyle frame{.fill = "none", .stroke = "black", .stroke_width = 1.0};
  const SvgStyle diagonal{.fill = "none", .stroke = "#999999", .stroke_width = 0.8, .dash = "4,3"};

  for (std::size_t row = 0; row < reference_detectors.size(); ++row) {
    const std::string& ref = reference_detectors[row];
    const double y0 = top + static_cast<double>(row) * (panel + gap);
    svg.text(left - 12, y0 + panel / 2, ref, 11, "end");
    for (std::size_t col = 0; col < detectors.size(); ++col) {
      const std::string& det = detectors[col];
      const double x0 = left + static_cast<double>(col) * (panel + gap);
      if (row == 0) svg.text(x0 + panel / 2, top - 10, det, 11, "middle");

      std::ostringstream attrs;
      attrs << "class=\"panel\" data-ref=\"" << SvgCanvas::escape(ref) << "\" data-det=\""
            << SvgCanvas::escape(det) << "\" data-x0=\"" << svg_num(x0) << "\" data-y0=\""
            << svg_num(y0) << "\"";
      svg.group_begin(attrs.str());
      svg.rect(x0, y0, panel, panel, frame, "class=\"frame\"");
      svg.line(x0, y0 + panel, x0 + panel, y0, diagonal, "class=\"diag\"");
      SvgStyle point{.fill = series_color(col), .stroke = "none", .stroke_width = 0.0,
                     .dash = "", .opacity = 0.55};
      const auto& ref_rep = rep.at(ref);
      const auto& det_rep = rep.at(det);
      for (const auto& t : tasks) {
        const double px = x0 + ref_rep.at(t) * panel;
        const double py = y0 + panel - det_rep.at(t) * panel;
        svg.circle(px, py, 1.8, point, "class=\"pt\"");
      }
      svg.group_end();
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write figure: " + path.string());
  out << svg.str();
}

// ---------------------------------------------------------------------------
// Magnification sweep figure: repeatability against the magnification
// factor on a logarithmic axis, one line per detector (a lone point draws a
// marker instead of a line).

struct SweepSeries {
  std::string detector;
  std::vector<std::pair<double, double>> points;  // (gamma, mean rep), gamma ascending
};

inline void emit_sweep(const std::vector<SweepSeries>& series,
                       const std::filesystem::path& path) {
  if (series.empty()) throw InvalidParameterError("sweep figure: no series");
  double log_min = 0.0, log_max = 0.0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [gamma, rep] : s.points) {
      if (gamma <= 0.0) throw InvalidParameterError("sweep figure: gamma must be positive");
      const double lg = std::log2(gamma);
      log_min = first ? lg : std::min(log_min, lg);
      log_max = first ? lg : std::max(log_max, lg);
      first = false;
    }
  if (first) throw InvalidParameterError("sweep figure: no points");
  if (log_max == log_min) {
    log_min -= 1.0;
    log_max += 1.0;
  }

  const double left = 60, right = 170, top = 24, bottom = 46;
  const double width = 760, height = 420;
  const double px_min = left, px_max = width - right;
  const double py_min = height - bottom, py_max = top;  // y grows upward in data space
  auto x_of = [&](double gamma) {
    return px_min + (std::log2(gamma) - log_min) / (log_max - log_min) * (px_max - px_min);
  };
  auto y_of = [&](double rep) { return py_min + rep * (py_max - py_min); };

  SvgCanvas svg(width, height,
                {{"logx-min", svg_num(log_min)},
                 {"logx-max", svg_num(log_max)},
                 {"px-min", svg_num(px_min)},
                 {"px-max", svg_num(px_max)},
                 {"y-min", "0"},
                 {"y-max", "1"},
                 {"py-min", svg_num(py_min)},
                 {"py-max", svg_num(py_max)}});

  const SvgStyle grid{.fill = "none", .stroke = "#dddddd", .stroke_width = 1.0};
  const SvgStyle axis{.fill = "none", .stroke = "black", .stroke_width = 1.0};
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = tick / 5.0;
    svg.line(px_min, y_of(v), px_max, y_of(v), tick ? grid : axis);
    svg.text(px_min - 8, y_of(v) + 4, svg_num(v), 10, "end");
  }
  std::set<double> gamma_ticks;
  for (const auto& s : series)
    for (const auto& [gamma, rep] : s.points) gamma_ticks.insert(gamma);
  for (const double gamma : gamma_ticks) {
    svg.line(x_of(gamma), py_max, x_of(gamma), py_min, grid);
    svg.text(x_of(gamma), py_min + 16, svg_num(gamma), 10, "middle");
  }
  svg.line(px_min, py_min, px_max, py_min, axis);
  svg.line(px_min, py_min, px_min, py_max, axis);
  svg.text((px_min + px_max) / 2, height - 10, "magnification factor (log scale)", 12, "middle");

  for (std::size_t i = 0; i < series.size(); ++i) {
    const SweepSeries& s = series[i];
    const char* color = series_color(i);
    std::vector<std::pair<double, double>> pts;
    for (const auto& [gamma, rep] : s.points) pts.emplace_back(x_of(gamma), y_of(rep));
    if (pts.size() >= 2) {
      SvgStyle line_style{.fill = "none", .stroke = color, .stroke_width = 1.8,
                          .dash = invariance_dash(s.detector)};
      std::ostringstream extra;
      extra << "class=\"series\" data-detector=\"" << SvgCanvas::escape(s.detector) << "\"";
      svg.polyline(pts, line_style, extra.str());
    }
    SvgStyle marker{.fill = color, .stroke = "none", .stroke_width = 0.0};
    for (std::size_t k = 0; k < pts.size(); ++k) {
      std::ostringstream extra;
      extra << "class=\"sweeppt\" data-detector=\"" << SvgCanvas::escape(s.detector)
            << "\" data-gamma=\"" << svg_num(s.points[k].first) << "\" data-rep=\""
            << svg_num(s.points[k].second) << "\"";
      svg.circle(pts[k].first, pts[k].second, 2.6, marker, extra.str());
    }
    const double ly = top + 18 * static_cast<double>(i);
    SvgStyle legend_line{.fill = "none", .stroke = color, .stroke_width = 1.8,
                         .dash = invariance_dash(s.detector)};
    svg.line(width - right + 12, ly, width - right + 40, ly, legend_line);
    svg.text(width - right + 46, ly + 4, s.detector, 11, "start");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write figure: " + path.string());
  out << svg.str();
}

}  // namespace detbench

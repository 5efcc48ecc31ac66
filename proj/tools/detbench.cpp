// detbench: repeatability benchmark for local feature detectors.
//
// Subcommands: evaluate (score detections over a dataset), baseline
// (generate random-detector files), sweep (repeatability vs magnification),
// fetch (download manifest-declared files), manifest-scan (build a manifest
// from a dataset directory tree).

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "detbench/fetch.hpp"
#include "detbench/image_dims.hpp"
#include "detbench/runner.hpp"
#include "detbench/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitDegenerateStrict = 3;

void add_eval_options(CLI::App* cmd, detbench::RunConfig& config, std::string& manifest,
                      std::string& detections, std::string& out,
                      std::vector<std::string>& detectors,
                      std::vector<std::string>& baselines) {
  cmd->add_option("--manifest", manifest, "dataset manifest file")->required();
  cmd->add_option("--detections", detections,
                  "detections root: <detector>/<sequence>/<image index>.det");
  cmd->add_option("--detectors", detectors,
                  "detector subdirectories to evaluate (default: all present)")
      ->delimiter(',');
  cmd->add_option("--baselines", baselines, "random baselines to add (rand-t, rand-s, rand-a)")
      ->delimiter(',');
  cmd->add_option("--out", out, "output directory")->required();
  cmd->add_option("--overlap-eps", config.params.overlap_eps,
                  "max tolerated overlap error (correspondence needs IoU >= 1 - eps)")
      ->capture_default_str();
  cmd->add_option("--point-radius", config.params.point_radius,
                  "radius assigned to point-like detections")
      ->capture_default_str();
  cmd->add_option("--seed", config.master_seed, "master seed for random baselines")
      ->capture_default_str();
  cmd->add_option("--workers", config.workers, "worker threads")->capture_default_str();
  cmd->add_flag("--legacy-quick-reject", config.params.legacy_quick_reject,
                "test mode: apply the excircle quick-reject before normalization");
}

void require_sources(const detbench::RunConfig& config) {
  if (config.detections_dir.empty() && config.baseline_types.empty())
    throw detbench::ValidationError("nothing to evaluate: give --detections and/or --baselines");
  if (!config.detections_dir.empty() && !fs::is_directory(config.detections_dir))
    throw detbench::ValidationError("detections directory not found: " +
                                    config.detections_dir.string());
  if (!fs::exists(config.manifest_path))
    throw detbench::ValidationError("manifest not found: " + config.manifest_path.string());
}

int cmd_evaluate(detbench::RunConfig config) {
  require_sources(config);
  const detbench::RunOutcome outcome = detbench::run_evaluate(config);

  const auto& bundle = outcome.bundle;
  std::cout << bundle.metadata.detectors.size() << " detector(s), "
            << bundle.records.size() << " records\n";
  for (const auto& split : bundle.splits) {
    std::cout << "[" << split.split << "]\n";
    std::vector<const detbench::DetectorSummary*> order;
    for (const auto& s : split.summaries) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return a->rank < b->rank; });
    for (const auto* s : order) {
      std::cout << "  rnk " << s->rank << "  " << std::left << std::setw(16) << s->detector
                << std::right << "  rep " << std::fixed << std::setprecision(2)
                << 100.0 * s->rep_overall << "  stb ";
      if (s->stability)
        std::cout << std::fixed << std::setprecision(2) << *s->stability;
      else
        std::cout << "--";
      std::cout << "\n";
    }
  }
  std::cout << "wrote " << outcome.results_path.string() << "\n";

  if (outcome.degenerate_present) {
    std::cout << "note: some tasks were degenerate (empty common part)\n";
    if (config.strict) return kExitDegenerateStrict;
  }
  return kExitOk;
}

int cmd_baseline(detbench::RunConfig config) {
  if (!fs::exists(config.manifest_path))
    throw detbench::ValidationError("manifest not found: " + config.manifest_path.string());
  const int written = detbench::run_baseline(config);
  std::cout << "wrote " << written << " detection file(s) under " << config.out_dir.string()
            << "\n";
  return kExitOk;
}

int cmd_sweep(detbench::RunConfig config) {
  require_sources(config);
  const std::vector<detbench::SweepSeries> series = detbench::run_sweep(config);
  for (const auto& s : series) {
    double lo = 1.0, hi = 0.0;
    for (const auto& [gamma, rep] : s.points) {
      lo = std::min(lo, rep);
      hi = std::max(hi, rep);
    }
    std::cout << std::left << std::setw(16) << s.detector << std::right << " rep "
              << std::fixed << std::setprecision(4) << lo << " .. " << hi << " (spread "
              << hi - lo << ") over " << s.points.size() << " magnification(s)\n";
  }
  std::cout << "wrote " << (config.out_dir / "sweep.svg").string() << " and sweep.csv\n";
  return kExitOk;
}

int cmd_fetch(const std::string& manifest_path, const std::string& dest, int workers,
              int attempts) {
  const detbench::DatasetManifest manifest = detbench::load_manifest(manifest_path);
  const fs::path root = dest.empty() ? manifest.base_dir : fs::path(dest);
  const auto items = detbench::collect_fetch_items(manifest, root);
  if (items.empty()) {
    std::cout << "manifest declares no downloadable files\n";
    return kExitOk;
  }

  detbench::FetchOptions options;
  options.workers = workers;
  options.attempts = attempts;
  options.on_complete = [](const detbench::FetchResult& r) {
    std::cout << "[" << detbench::to_string(r.status) << "] " << r.item.dest.string();
    if (!r.message.empty()) std::cout << " (" << r.message << ")";
    std::cout << "\n";
  };
  const auto results = detbench::fetch_all(items, options);

  int failed = 0;
  for (const auto& r : results)
    if (r.status == detbench::FetchStatus::kFailed) ++failed;
  std::cout << results.size() - failed << "/" << results.size() << " file(s) ok\n";
  return failed ? kExitRuntime : kExitOk;
}

// Build a manifest from a directory tree of sequences: each sub-directory
// holds images named <index>.<ext> (index from 1) and homography files
// H_1_<index> (or the H1to<index>p naming) mapping image 1 to that image.
// Sequence directories prefixed i_/v_ are labelled illumination/viewpoint.
int cmd_manifest_scan(const std::string& root_arg, std::string name, std::string out_arg) {
  const fs::path root(root_arg);
  if (!fs::is_directory(root))
    throw detbench::ValidationError("not a directory: " + root.string());
  if (name.empty()) name = fs::absolute(root).filename().string();
  const fs::path out = out_arg.empty() ? root / "manifest.json" : fs::path(out_arg);

  static const std::vector<std::string> kImageExt = {".ppm", ".pgm", ".png", ".jpg", ".jpeg"};
  const std::regex h_underscore(R"(H_1_(\d+))");
  const std::regex h_vgg(R"(H1to(\d+)p?)");

  std::vector<std::string> seq_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) seq_dirs.push_back(entry.path().filename().string());
  std::sort(seq_dirs.begin(), seq_dirs.end());

  nlohmann::json sequences = nlohmann::json::array();
  int total_images = 0, total_pairs = 0;
  for (const auto& dir : seq_dirs) {
    std::map<int, std::string> images;       // index -> relative path
    std::map<int, std::string> homographies;  // target index -> relative path
    for (const auto& entry : fs::directory_iterator(root / dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string filename = entry.path().filename().string();
      const std::string stem = entry.path().stem().string();
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      std::smatch match;
      if (std::find(kImageExt.begin(), kImageExt.end(), ext) != kImageExt.end() &&
          !stem.empty() && stem.find_first_not_of("0123456789") == std::string::npos) {
        images[std::stoi(stem)] = dir + "/" + filename;
      } else if (std::regex_match(filename, match, h_underscore) ||
                 std::regex_match(filename, match, h_vgg)) {
        homographies[std::stoi(match[1])] = dir + "/" + filename;
      }
    }
    if (images.empty()) {
      std::cout << "skipping " << dir << " (no numbered images)\n";
      continue;
    }
    if (!images.count(1))
      throw detbench::ValidationError("sequence '" + dir + "': no reference image 1.*");
    const int k = images.rbegin()->first;
    for (int i = 1; i <= k; ++i)
      if (!images.count(i))
        throw detbench::ValidationError("sequence '" + dir + "': image " + std::to_string(i) +
                                        " missing (found 1.." + std::to_string(k) + ")");
    for (int t = 2; t <= k; ++t)
      if (!homographies.count(t))
        throw detbench::ValidationError("sequence '" + dir + "': homography to image " +
                                        std::to_string(t) + " missing");

    std::string nuisance = "other";
    if (dir.rfind("i_", 0) == 0) nuisance = "illumination";
    if (dir.rfind("v_", 0) == 0) nuisance = "viewpoint";

    nlohmann::json seq = {{"id", dir},
                          {"nuisance", nuisance},
                          {"images", nlohmann::json::array()},
                          {"homographies", nlohmann::json::array()}};
    for (int i = 1; i <= k; ++i) {
      const detbench::ImageDims dims = detbench::probe_image_dims(root / images.at(i));
      seq["images"].push_back(
          {{"file", images.at(i)}, {"width", dims.width}, {"height", dims.height}});
      ++total_images;
    }
    for (int t = 2; t <= k; ++t) {
      seq["homographies"].push_back({{"file", homographies.at(t)},
                                     {"from", 1},
                                     {"to", t},
                                     {"direction", "ref-to-target"}});
      ++total_pairs;
    }
    sequences.push_back(std::move(seq));
  }

  const nlohmann::json doc = {
      {"schema", detbench::kManifestSchema}, {"name", name}, {"sequences", sequences}};
  std::ofstream file(out, std::ios::binary);
  if (!file) throw detbench::Error("cannot write " + out.string());
  file << doc.dump(2) << "\n";
  file.close();
  if (!file) throw detbench::Error("failed writing " + out.string());
  std::cout << "wrote " << out.string() << ": " << sequences.size() << " sequence(s), "
            << total_images << " image(s), " << total_pairs << " pair task(s)\n";

  detbench::load_manifest(out);  // round-trip sanity check
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repeatability benchmark for local feature detectors"};
  app.set_version_flag("--version", detbench::kToolVersion);
  app.require_subcommand(1);

  detbench::RunConfig eval_config, sweep_config, baseline_config;
  std::string eval_manifest, eval_detections, eval_out;
  std::vector<std::string> eval_detectors, eval_baselines;
  std::string sweep_manifest, sweep_detections, sweep_out;
  std::vector<std::string> sweep_detectors, sweep_baselines;
  std::string baseline_manifest, baseline_out;
  std::vector<std::string> baseline_types;
  std::string fetch_manifest, fetch_dest;
  int fetch_workers = 4, fetch_attempts = 3;
  std::string scan_root, scan_name, scan_out;
  int sweep_top_n = 1000;

  CLI::App* evaluate = app.add_subcommand("evaluate", "score detections over a dataset");
  add_eval_options(evaluate, eval_config, eval_manifest, eval_detections, eval_out,
                   eval_detectors, eval_baselines);
  evaluate->add_option("--top-n", eval_config.params.n_list,
                       "feature-count cutoffs (strongest n kept)")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_flag("--exclude-degenerate", eval_config.exclude_degenerate,
                     "drop degenerate tasks from aggregation instead of counting them as 0");
  evaluate->add_flag("--strict", eval_config.strict,
                     "exit with status 3 when any task is degenerate");

  CLI::App* baseline = app.add_subcommand("baseline", "write random-baseline detection files");
  baseline->add_option("--manifest", baseline_manifest, "dataset manifest file")->required();
  baseline->add_option("--types", baseline_types, "rand-t, rand-s, rand-a")
      ->delimiter(',')
      ->required();
  baseline->add_option("--seed", baseline_config.master_seed, "master seed")
      ->capture_default_str();
  baseline->add_option("--count", baseline_config.baseline_count,
                       "detections per image (default 1000)");
  baseline->add_option("--point-radius", baseline_config.params.point_radius,
                       "radius of translation-baseline regions")
      ->capture_default_str();
  baseline->add_option("--out", baseline_out, "output detections directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "repeatability vs magnification factor");
  add_eval_options(sweep, sweep_config, sweep_manifest, sweep_detections, sweep_out,
                   sweep_detectors, sweep_baselines);
  sweep->add_option("--gammas", sweep_config.gammas, "magnification factors")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--top-n", sweep_top_n, "feature-count cutoff")->capture_default_str();

  CLI::App* fetch = app.add_subcommand("fetch", "download manifest-declared files");
  fetch->add_option("--manifest", fetch_manifest, "dataset manifest file")->required();
  fetch->add_option("--dest", fetch_dest, "destination root (default: manifest directory)");
  fetch->add_option("--workers", fetch_workers, "concurrent downloads")->capture_default_str();
  fetch->add_option("--attempts", fetch_attempts, "attempts per file")->capture_default_str();

  CLI::App* scan = app.add_subcommand("manifest-scan", "build a manifest from a dataset tree");
  scan->add_option("--root", scan_root, "dataset root directory")->required();
  scan->add_option("--name", scan_name, "dataset name (default: root directory name)");
  scan->add_option("--out", scan_out, "manifest path (default: <root>/manifest.json)");

  sweep_config.gammas = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitValidation : kExitOk;
  }

  try {
    if (evaluate->parsed()) {
      eval_config.manifest_path = eval_manifest;
      eval_config.detections_dir = eval_detections;
      eval_config.out_dir = eval_out;
      eval_config.detectors = eval_detectors;
      eval_config.baseline_types = eval_baselines;
      return cmd_evaluate(eval_config);
    }
    if (baseline->parsed()) {
      baseline_config.manifest_path = baseline_manifest;
      baseline_config.out_dir = baseline_out;
      baseline_config.baseline_types = baseline_types;
      return cmd_baseline(baseline_config);
    }
    if (sweep->parsed()) {
      sweep_config.manifest_path = sweep_manifest;
      sweep_config.detections_dir = sweep_detections;
      sweep_config.out_dir = sweep_out;
      sweep_config.detectors = sweep_detectors;
      sweep_config.baseline_types = sweep_baselines;
      sweep_config.params.n_list = {sweep_top_n};
      return cmd_sweep(sweep_config);
    }
    if (fetch->parsed()) return cmd_fetch(fetch_manifest, fetch_dest, fetch_workers, fetch_attempts);
    if (scan->parsed()) return cmd_manifest_scan(scan_root, scan_name, scan_out);
  } catch (const detbench::ParseError& e) {
    std::cerr << "detbench: " << e.what() << "\n";
    return kExitValidation;
  } catch (const detbench::ValidationError& e) {
    std::cerr << "detbench: " << e.what() << "\n";
    return kExitValidation;
  } catch (const detbench::InvalidParameterError& e) {
    std::cerr << "detbench: " << e.what() << "\n";
    return kExitValidation;
  } catch (const detbench::InvalidRegionError& e) {
    std::cerr << "detbench: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "detbench: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

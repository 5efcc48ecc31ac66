#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "detbench/baselines.hpp"
#include "detbench/dataset.hpp"
#include "detbench/report.hpp"
#include "detbench/sha256.hpp"

namespace detbench {

// A named detector with its detections keyed by image id. File-backed
// detectors and in-memory random baselines both reduce to this.
struct DetectorSource {
  std::string name;
  std::map<std::string, std::vector<Region>> detections;
};

namespace detail {

inline const std::vector<Region>& detections_for(const DetectorSource& source,
                                                 const std::string& image) {
  const auto it = source.detections.find(image);
  if (it == source.detections.end())
    throw ValidationError("detector '" + source.name + "' has no detections for image '" + image +
                          "'");
  return it->second;
}

template <typename Work>
void run_pool(std::size_t cells, int workers, Work&& work) {
  if (workers < 1) throw InvalidParameterError("worker count must be positive");
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(cells);
        return;
      }
    }
  };
  const int pool = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(cells, 1)));
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int t = 0; t < pool; ++t) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Compute the full (detector x task x n) record grid. Cells are indexed up
// front and written by index, so the output order — detector-major, then
// task, then n — is identical for any worker count.
inline std::vector<RepeatabilityRecord> evaluate_grid(const std::vector<DetectorSource>& sources,
                                                      const std::vector<PairTask>& tasks,
                                                      const EvalParams& params, int workers = 1) {
  validate(params);
  if (sources.empty()) throw ValidationError("no detectors to evaluate");
  if (tasks.empty()) throw ValidationError("no pair tasks to evaluate");

  const std::size_t n_count = params.n_list.size();
  const std::size_t cells = sources.size() * tasks.size() * n_count;
  std::vector<RepeatabilityRecord> records(cells);

  detail::run_pool(cells, workers, [&](std::size_t cell) {
    const std::size_t n_idx = cell % n_count;
    const std::size_t t_idx = (cell / n_count) % tasks.size();
    const std::size_t d_idx = cell / (n_count * tasks.size());
    const DetectorSource& source = sources[d_idx];
    const PairTask& task = tasks[t_idx];
    records[cell] = pair_repeatability(detail::detections_for(source, task.ref_image.id),
                                       detail::detections_for(source, task.target_image.id), task,
                                       params, params.n_list[n_idx], source.name);
  });
  return records;
}

// ---------------------------------------------------------------------------
// Random baselines as in-memory sources.

inline std::string canonical_baseline_name(const std::string& type) {
  std::string t = type;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "rand-t") return "RAND-T";
  if (t == "rand-s") return "RAND-S";
  if (t == "rand-a") return "RAND-A";
  throw InvalidParameterError("unknown baseline type '" + type +
                              "' (expected rand-t, rand-s, or rand-a)");
}

// Detections for one baseline on one image. The sub-seed depends on the
// master seed, the baseline name, and the image id only, so a given image
// always receives the same random detections no matter which tasks use it
// or whether the baseline was written to files first.
inline std::vector<Region> sample_baseline(const std::string& name, int width, int height,
                                           int count, double point_radius,
                                           std::uint64_t master_seed,
                                           const std::string& image) {
  RandParams params;
  params.point_radius = point_radius;
  params.seed = derive_seed(master_seed, name, image);
  if (name == "RAND-T") return sample_rand_t(width, height, count, params);
  if (name == "RAND-S") return sample_rand_s(width, height, count, params);
  if (name == "RAND-A") return sample_rand_a(width, height, count, params);
  throw InvalidParameterError("unknown baseline '" + name + "'");
}

inline DetectorSource make_baseline_source(const std::string& type,
                                           const DatasetManifest& manifest, int count,
                                           double point_radius, std::uint64_t master_seed) {
  DetectorSource source;
  source.name = canonical_baseline_name(type);
  for (const auto& seq : manifest.sequences) {
    for (std::size_t i = 0; i < seq.images.size(); ++i) {
      const std::string id = image_id(seq.id, static_cast<int>(i) + 1);
      source.detections[id] =
          sample_baseline(source.name, seq.images[i].width, seq.images[i].height, count,
                          point_radius, master_seed, id);
    }
  }
  return source;
}

// ---------------------------------------------------------------------------
// Run configuration shared by the CLI commands.

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path detections_dir;      // empty when only baselines run
  std::vector<std::string> detectors;        // empty = discover subdirectories
  std::vector<std::string> baseline_types;   // rand-t / rand-s / rand-a
  EvalParams params;
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir;
  int workers = 1;
  int baseline_count = 0;                    // 0 = max of n_list
  bool exclude_degenerate = false;
  bool strict = false;
  std::vector<double> gammas;                // sweep only
};

struct RunOutcome {
  ReportBundle bundle;
  std::filesystem::path results_path;
  bool degenerate_present = false;
};

namespace detail {

inline std::string detection_rel_path(const std::string& detector, const std::string& image) {
  return detector + "/" + image + ".det";
}

// Load every file-backed detector, failing fast with the complete list of
// missing files rather than stopping at the first.
inline std::vector<DetectorSource> load_file_detectors(const RunConfig& config,
                                                       const DatasetManifest& manifest,
                                                       RunMetadata& metadata) {
  std::vector<std::string> names = config.detectors;
  if (names.empty() && !config.detections_dir.empty() &&
      std::filesystem::is_directory(config.detections_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(config.detections_dir))
      if (entry.is_directory()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
  }

  std::vector<DetectorSource> sources;
  std::vector<std::string> missing;
  for (const auto& name : names) {
    DetectorSource source;
    source.name = name;
    for (const auto& seq : manifest.sequences) {
      for (std::size_t i = 0; i < seq.images.size(); ++i) {
        const std::string id = image_id(seq.id, static_cast<int>(i) + 1);
        const std::filesystem::path path =
            config.detections_dir / detection_rel_path(name, id);
        if (!std::filesystem::exists(path)) {
          missing.push_back(path.string());
          continue;
        }
        source.detections[id] = load_detections(path);
        metadata.input_checksums["detections:" + detection_rel_path(name, id)] =
            sha256_file(path);
      }
    }
    sources.push_back(std::move(source));
  }
  if (!missing.empty()) {
    std::string message =
        "missing " + std::to_string(missing.size()) + " detection file(s):";
    for (const auto& m : missing) message += "\n  " + m;
    throw ValidationError(message);
  }
  return sources;
}

inline std::vector<DetectorSource> assemble_sources(const RunConfig& config,
                                                    const DatasetManifest& manifest,
                                                    RunMetadata& metadata) {
  std::vector<DetectorSource> sources = load_file_detectors(config, manifest, metadata);
  const int count = config.baseline_count > 0
                        ? config.baseline_count
                        : *std::max_element(config.params.n_list.begin(),
                                            config.params.n_list.end());
  for (const auto& type : config.baseline_types)
    sources.push_back(make_baseline_source(type, manifest, count, config.params.point_radius,
                                           config.master_seed));
  std::sort(sources.begin(), sources.end(),
            [](const DetectorSource& a, const DetectorSource& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < sources.size(); ++i)
    if (sources[i].name == sources[i - 1].name)
      throw ValidationError("duplicate detector name '" + sources[i].name + "'");
  return sources;
}

inline void checksum_inputs(const RunConfig& config, const DatasetManifest& manifest,
                            RunMetadata& metadata) {
  metadata.input_checksums["manifest"] = sha256_file(config.manifest_path);
  for (const auto& seq : manifest.sequences)
    for (const auto& hom : seq.homographies)
      metadata.input_checksums["homography:" + hom.file] =
          sha256_file(manifest.base_dir / hom.file);
}

inline std::vector<std::string> split_labels(const std::vector<PairTask>& tasks) {
  std::set<std::string> labels;
  for (const auto& t : tasks) labels.insert(t.nuisance);
  return {labels.begin(), labels.end()};
}

}  // namespace detail

// Evaluate every detector over every task and n, aggregate per split
// ("all" plus each nuisance label), emit tables and figures, and write the
// machine results document last so it can list the other artifacts.
inline RunOutcome run_evaluate(const RunConfig& config) {
  validate(config.params);
  const DatasetManifest manifest = load_manifest(config.manifest_path);
  const std::vector<PairTask> tasks = load_tasks(manifest);

  RunMetadata metadata;
  metadata.dataset = manifest.name;
  metadata.params = config.params;
  metadata.master_seed = config.master_seed;
  metadata.exclude_degenerate = config.exclude_degenerate;
  detail::checksum_inputs(config, manifest, metadata);

  const std::vector<DetectorSource> sources =
      detail::assemble_sources(config, manifest, metadata);
  for (const auto& s : sources) metadata.detectors.push_back(s.name);

  ReportBundle bundle;
  bundle.metadata = std::move(metadata);
  bundle.records = evaluate_grid(sources, tasks, config.params, config.workers);

  std::map<std::string, std::string> task_nuisance;
  for (const auto& t : tasks) task_nuisance[t.id] = t.nuisance;

  std::vector<std::string> splits{"all"};
  for (const auto& label : detail::split_labels(tasks)) splits.push_back(label);
  for (const auto& split : splits) {
    std::vector<RepeatabilityRecord> subset;
    for (const auto& r : bundle.records)
      if (split == "all" || task_nuisance.at(r.task) == split) subset.push_back(r);
    SplitSummaries ss;
    ss.split = split;
    ss.summaries = aggregate(subset, config.exclude_degenerate);
    assign_ranks(ss.summaries);
    bundle.splits.push_back(std::move(ss));
  }

  std::filesystem::create_directories(config.out_dir);
  for (const auto& name : emit_tables(bundle, config.out_dir)) bundle.artifacts.push_back(name);
  for (const auto& split : bundle.splits) {
    const std::string name = "box_whisker_" + detail::sanitize_filename(split.split) + ".svg";
    emit_box_whisker(split.summaries, config.out_dir / name);
    bundle.artifacts.push_back(name);
  }
  {
    const int n_max = *std::max_element(config.params.n_list.begin(), config.params.n_list.end());
    emit_scatter_grid(bundle.records, bundle.metadata.detectors, bundle.metadata.detectors, n_max,
                      config.out_dir / "scatter_grid.svg");
    bundle.artifacts.push_back("scatter_grid.svg");
  }

  RunOutcome outcome;
  outcome.results_path = config.out_dir / "results.json";
  bundle.artifacts.push_back("results.json");
  write_results(outcome.results_path, bundle);
  for (const auto& r : bundle.records) outcome.degenerate_present |= r.degenerate;
  outcome.bundle = std::move(bundle);
  return outcome;
}

// Magnification sweep at a single n: per detector, repeatability averaged
// over all tasks for each gamma. Emits a figure plus a machine CSV.
inline std::vector<SweepSeries> run_sweep(const RunConfig& config) {
  validate(config.params);
  if (config.gammas.empty()) throw InvalidParameterError("sweep: no gamma values");
  for (const double g : config.gammas)
    if (!(g > 0.0)) throw InvalidParameterError("sweep: gamma must be positive");
  if (config.params.n_list.size() != 1)
    throw InvalidParameterError("sweep: exactly one top-n value expected");

  const DatasetManifest manifest = load_manifest(config.manifest_path);
  const std::vector<PairTask> tasks = load_tasks(manifest);
  RunMetadata scratch;
  const std::vector<DetectorSource> sources = detail::assemble_sources(config, manifest, scratch);
  const int n = config.params.n_list.front();

  // One cell per (detector, task); each computes the whole gamma series.
  std::vector<std::vector<std::vector<std::pair<double, double>>>> cell_results(
      sources.size(), std::vector<std::vector<std::pair<double, double>>>(tasks.size()));
  detail::run_pool(sources.size() * tasks.size(), config.workers, [&](std::size_t cell) {
    const std::size_t t_idx = cell % tasks.size();
    const std::size_t d_idx = cell / tasks.size();
    const DetectorSource& source = sources[d_idx];
    const PairTask& task = tasks[t_idx];
    cell_results[d_idx][t_idx] = magnification_sweep(
        detail::detections_for(source, task.ref_image.id),
        detail::detections_for(source, task.target_image.id), task, config.params, n,
        config.gammas);
  });

  std::vector<SweepSeries> series;
  for (std::size_t d = 0; d < sources.size(); ++d) {
    SweepSeries s;
    s.detector = sources[d].name;
    for (std::size_t g = 0; g < config.gammas.size(); ++g) {
      double sum = 0.0;
      for (std::size_t t = 0; t < tasks.size(); ++t) sum += cell_results[d][t][g].second;
      s.points.emplace_back(config.gammas[g], sum / static_cast<double>(tasks.size()));
    }
    series.push_back(std::move(s));
  }

  std::filesystem::create_directories(config.out_dir);
  emit_sweep(series, config.out_dir / "sweep.svg");
  std::ofstream csv(config.out_dir / "sweep.csv", std::ios::binary);
  if (!csv) throw Error("cannot write sweep.csv");
  csv << "detector,gamma,rep\n";
  for (const auto& s : series)
    for (const auto& [gamma, rep] : s.points)
      csv << s.detector << ',' << svg_num(gamma) << ',' << svg_num(rep) << "\n";
  return series;
}

// Write baseline detection files: <out>/<NAME>/<sequence>/<index>.det for
// every image in the manifest and every requested type.
inline int run_baseline(const RunConfig& config) {
  if (config.baseline_types.empty())
    throw InvalidParameterError("baseline: no types requested");
  const DatasetManifest manifest = load_manifest(config.manifest_path);
  const int count = config.baseline_count > 0 ? config.baseline_count : 1000;

  int written = 0;
  for (const auto& type : config.baseline_types) {
    const std::string name = canonical_baseline_name(type);
    for (const auto& seq : manifest.sequences) {
      std::filesystem::create_directories(config.out_dir / name / seq.id);
      for (std::size_t i = 0; i < seq.images.size(); ++i) {
        const std::string id = image_id(seq.id, static_cast<int>(i) + 1);
        const std::vector<Region> regions =
            sample_baseline(name, seq.images[i].width, seq.images[i].height, count,
                            config.params.point_radius, config.master_seed, id);
        write_detections(config.out_dir / name / seq.id / (std::to_string(i + 1) + ".det"),
                         regions);
        ++written;
      }
    }
  }
  return written;
}

}  // namespace detbench

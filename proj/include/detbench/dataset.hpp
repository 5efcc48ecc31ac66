#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "detbench/protocol.hpp"

namespace detbench {

inline constexpr const char* kManifestSchema = "detbench-manifest/1";
inline constexpr const char* kDetectionSchema = "detbench-det/1";

struct DownloadEntry {
  std::string url;
  std::string sha256;
};

struct ManifestImage {
  std::string file;
  int width = 0;
  int height = 0;
  std::optional<DownloadEntry> download;
};

struct ManifestHomography {
  std::string file;
  int from = 0;
  int to = 0;
  bool ref_to_target = true;  // direction of the matrix stored in the file
  std::optional<DownloadEntry> download;
};

struct ManifestSequence {
  std::string id;
  std::string nuisance;
  std::vector<ManifestImage> images;
  std::vector<ManifestHomography> homographies;
};

struct DatasetManifest {
  std::string name;
  std::filesystem::path base_dir;  // directory of the manifest file
  std::vector<ManifestSequence> sequences;

  int image_count() const {
    int count = 0;
    for (const auto& s : sequences) count += static_cast<int>(s.images.size());
    return count;
  }
  int pair_count() const {
    int count = 0;
    for (const auto& s : sequences) count += static_cast<int>(s.homographies.size());
    return count;
  }
};

// "<sequence>/<1-based image index>", the canonical image id used in task
// ids, detection paths, and baseline sub-seeds.
inline std::string image_id(const std::string& sequence, int index) {
  return sequence + "/" + std::to_string(index);
}

namespace detail {

inline std::optional<DownloadEntry> parse_download(const nlohmann::json& node) {
  if (!node.contains("download")) return std::nullopt;
  const auto& d = node.at("download");
  if (!d.contains("url") || !d.contains("sha256"))
    throw ValidationError("manifest: download entry requires url and sha256");
  return DownloadEntry{d.at("url").get<std::string>(), d.at("sha256").get<std::string>()};
}

}  // namespace detail

// Parse and validate a manifest file. Invariants enforced here: the
// reference image of every sequence is index 1, homographies point from it
// to a distinct existing image, and there are exactly (#images - 1) of them.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest: " + path.string());

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }

  DatasetManifest manifest;
  manifest.base_dir = path.parent_path();
  try {
    if (doc.value("schema", "") != kManifestSchema)
      throw ValidationError("manifest field 'schema' must be \"" + std::string(kManifestSchema) +
                            "\"");
    manifest.name = doc.value("name", "dataset");
    if (!doc.contains("sequences") || !doc.at("sequences").is_array())
      throw ValidationError("manifest field 'sequences' missing or not an array");

    for (const auto& seq_node : doc.at("sequences")) {
      ManifestSequence seq;
      if (!seq_node.contains("id")) throw ValidationError("sequence field 'id' missing");
      seq.id = seq_node.at("id").get<std::string>();
      seq.nuisance = seq_node.value("nuisance", "other");

      if (!seq_node.contains("images") || seq_node.at("images").empty())
        throw ValidationError("sequence '" + seq.id + "': field 'images' missing or empty");
      for (const auto& img_node : seq_node.at("images")) {
        ManifestImage img;
        img.file = img_node.at("file").get<std::string>();
        img.width = img_node.at("width").get<int>();
        img.height = img_node.at("height").get<int>();
        if (img.width <= 0 || img.height <= 0)
          throw ValidationError("sequence '" + seq.id + "': image '" + img.file +
                                "' has non-positive dimensions");
        img.download = detail::parse_download(img_node);
        seq.images.push_back(std::move(img));
      }

      const int num_images = static_cast<int>(seq.images.size());
      std::vector<bool> target_seen(num_images + 1, false);
      for (const auto& hom_node : seq_node.value("homographies", nlohmann::json::array())) {
        ManifestHomography hom;
        hom.file = hom_node.at("file").get<std::string>();
        hom.from = hom_node.at("from").get<int>();
        hom.to = hom_node.at("to").get<int>();
        const std::string direction = hom_node.value("direction", "ref-to-target");
        if (direction == "ref-to-target") {
          hom.ref_to_target = true;
        } else if (direction == "target-to-ref") {
          hom.ref_to_target = false;
        } else {
          throw ValidationError("sequence '" + seq.id + "': homography '" + hom.file +
                                "' has unknown direction '" + direction + "'");
        }
        if (hom.from != 1)
          throw ValidationError("sequence '" + seq.id + "': homography '" + hom.file +
                                "' must start at the reference image (from = 1)");
        if (hom.to < 2 || hom.to > num_images)
          throw ValidationError("sequence '" + seq.id + "': homography '" + hom.file +
                                "' references image " + std::to_string(hom.to) + " of " +
                                std::to_string(num_images));
        if (target_seen[hom.to])
          throw ValidationError("sequence '" + seq.id + "': duplicate homography to image " +
                                std::to_string(hom.to));
        target_seen[hom.to] = true;
        hom.download = detail::parse_download(hom_node);
        seq.homographies.push_back(std::move(hom));
      }

      if (static_cast<int>(seq.homographies.size()) != num_images - 1)
        throw ValidationError("sequence '" + seq.id + "': expected " +
                              std::to_string(num_images - 1) + " homographies, found " +
                              std::to_string(seq.homographies.size()));
      manifest.sequences.push_back(std::move(seq));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  return manifest;
}

// Parse a 3x3 row-major whitespace-separated homography file.
inline Homography load_homography(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open homography file: " + path.string());
  std::vector<double> values;
  double value;
  while (in >> value) values.push_back(value);
  if (!in.eof()) {
    std::string token;
    in.clear();
    in >> token;
    throw ParseError("homography " + path.string() + ": non-numeric token '" + token + "'");
  }
  if (values.size() != 9)
    throw ParseError("homography " + path.string() + ": expected 9 numbers, found " +
                     std::to_string(values.size()));
  Eigen::Matrix3d m;
  m << values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7],
      values[8];
  try {
    return Homography(m);
  } catch (const ValidationError& e) {
    throw ValidationError("homography " + path.string() + ": " + e.what());
  }
}

// Build the evaluation tasks declared by a manifest, reading every
// homography file (relative paths resolve against the manifest location).
// Matrices stored target-to-ref are inverted so tasks always carry the
// reference-to-target map.
inline std::vector<PairTask> load_tasks(const DatasetManifest& manifest) {
  std::vector<PairTask> tasks;
  tasks.reserve(manifest.pair_count());
  for (const auto& seq : manifest.sequences) {
    for (const auto& hom : seq.homographies) {
      const Homography stored = load_homography(manifest.base_dir / hom.file);
      PairTask task;
      task.id = seq.id + "/" + std::to_string(hom.from) + "-" + std::to_string(hom.to);
      task.sequence = seq.id;
      task.nuisance = seq.nuisance;
      const ManifestImage& ref = seq.images[hom.from - 1];
      const ManifestImage& target = seq.images[hom.to - 1];
      task.ref_image = {image_id(seq.id, hom.from), ref.width, ref.height};
      task.target_image = {image_id(seq.id, hom.to), target.width, target.height};
      task.ref_to_target = hom.ref_to_target ? stored : stored.inverse();
      tasks.push_back(std::move(task));
    }
  }
  return tasks;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream iss(line);
  std::string field;
  while (iss >> field) fields.push_back(field);
  return fields;
}

inline double parse_double(const std::string& token, const std::filesystem::path& path,
                           int line_number) {
  double value;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("detections " + path.string() + ": line " + std::to_string(line_number) +
                     ": bad number '" + token + "'");
  return value;
}

inline std::string shortest(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace detail

// Read a detection file. The canonical format is
//   detbench-det/1\n<count>\n
// followed by one "u v m11 m12 m22 score" row per feature, where (m11, m12,
// m22) is the shape matrix itself. Files without the header are read in the
// legacy 5-column mode "u v a b c": the conic coefficients of
// a(x-u)^2 + 2b(x-u)(y-v) + c(y-v)^2 = 1, i.e. M = [[a, b], [b, c]] -- the
// row IS the shape matrix under the legacy naming, no reparametrisation.
// Legacy rows carry no score; row order is trusted (first row strongest)
// and scores k..1 are assigned.
inline std::vector<Region> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open detection file: " + path.string());

  std::vector<std::pair<int, std::string>> rows;  // (line number, text)
  std::string line;
  int line_number = 0;
  bool canonical = false;
  long declared_count = -1;

  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 && line == kDetectionSchema) {
      canonical = true;
      continue;
    }
    if (canonical && line_number == 2) {
      const auto fields = detail::split_fields(line);
      bool ok = fields.size() == 1;
      if (ok) {
        const std::string& token = fields[0];
        const auto [ptr, ec] =
            std::from_chars(token.data(), token.data() + token.size(), declared_count);
        ok = ec == std::errc() && ptr == token.data() + token.size() && declared_count >= 0;
      }
      if (!ok)
        throw ParseError("detections " + path.string() + ": line 2: expected feature count");
      continue;
    }
    if (detail::split_fields(line).empty()) continue;
    rows.emplace_back(line_number, line);
  }

  if (canonical && declared_count != static_cast<long>(rows.size()))
    throw ParseError("detections " + path.string() + ": header declares " +
                     std::to_string(declared_count) + " features, found " +
                     std::to_string(rows.size()));

  const std::size_t expected_fields = canonical ? 6 : 5;
  std::vector<Region> regions;
  regions.reserve(rows.size());
  std::vector<int> invalid_lines;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [row_line, text] = rows[i];
    const auto fields = detail::split_fields(text);
    if (fields.size() != expected_fields)
      throw ParseError("detections " + path.string() + ": line " + std::to_string(row_line) +
                       ": expected " + std::to_string(expected_fields) + " fields, found " +
                       std::to_string(fields.size()));
    Region region;
    region.center = {detail::parse_double(fields[0], path, row_line),
                     detail::parse_double(fields[1], path, row_line)};
    const double m11 = detail::parse_double(fields[2], path, row_line);
    const double m12 = detail::parse_double(fields[3], path, row_line);
    const double m22 = detail::parse_double(fields[4], path, row_line);
    region.shape << m11, m12, m12, m22;
    region.score = canonical ? detail::parse_double(fields[5], path, row_line)
                             : static_cast<double>(rows.size() - i);
    if (!is_valid(region)) {
      invalid_lines.push_back(row_line);
      continue;
    }
    regions.push_back(std::move(region));
  }

  if (!invalid_lines.empty()) {
    std::string message = "detections " + path.string() + ": non-SPD shape on line";
    message += invalid_lines.size() > 1 ? "s" : "";
    for (const int l : invalid_lines) message += " " + std::to_string(l);
    throw InvalidRegionError(message);
  }
  return regions;
}

// Write detections in the canonical format with shortest-round-trip number
// formatting, so load_detections(write_detections(x)) == x bit-exactly.
inline void write_detections(const std::filesystem::path& path, const std::vector<Region>& regions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write detection file: " + path.string());
  out << kDetectionSchema << "\n" << regions.size() << "\n";
  for (const Region& r : regions) {
    out << detail::shortest(r.center.x()) << ' ' << detail::shortest(r.center.y()) << ' '
        << detail::shortest(r.shape(0, 0)) << ' ' << detail::shortest(r.shape(0, 1)) << ' '
        << detail::shortest(r.shape(1, 1)) << ' ' << detail::shortest(r.score) << "\n";
  }
  if (!out) throw Error("failed writing detection file: " + path.string());
}

}  // namespace detbench

#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

// glibc's <resolv.h>, pulled in transitively by the HTTP client, leaks an
// object-like `_res` macro that corrupts that identifier in every header
// included afterwards (Eigen uses it as a parameter name).
#ifdef _res
#undef _res
#endif

#include "detbench/dataset.hpp"
#include "detbench/sha256.hpp"

namespace detbench {

struct FetchItem {
  std::string url;
  std::string sha256;
  std::filesystem::path dest;
};

enum class FetchStatus { kVerified, kDownloaded, kFailed };

inline const char* to_string(FetchStatus status) {
  switch (status) {
    case FetchStatus::kVerified: return "verified";
    case FetchStatus::kDownloaded: return "downloaded";
    default: return "failed";
  }
}

struct FetchResult {
  FetchItem item;
  FetchStatus status = FetchStatus::kFailed;
  std::string message;
};

struct FetchOptions {
  int workers = 4;
  int attempts = 3;
  int backoff_ms = 500;      // doubled after each failed attempt
  int timeout_seconds = 60;
  std::function<void(const FetchResult&)> on_complete;  // serialised by a mutex
};

// Every manifest entry that declares a download source, with its
// destination resolved under `root`.
inline std::vector<FetchItem> collect_fetch_items(const DatasetManifest& manifest,
                                                  const std::filesystem::path& root) {
  std::vector<FetchItem> items;
  for (const auto& seq : manifest.sequences) {
    for (const auto& img : seq.images)
      if (img.download)
        items.push_back({img.download->url, img.download->sha256, root / img.file});
    for (const auto& hom : seq.homographies)
      if (hom.download)
        items.push_back({hom.download->url, hom.download->sha256, root / hom.file});
  }
  return items;
}

namespace detail {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port], the httplib client base
  std::string path;
};

inline ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw FetchError("malformed url (missing scheme): " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw FetchError("unsupported url scheme '" + scheme + "': " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline void quarantine(const std::filesystem::path& path) {
  std::filesystem::path bad = path;
  bad += ".corrupt";
  std::error_code ec;
  std::filesystem::remove(bad, ec);
  std::filesystem::rename(path, bad, ec);
  if (ec) std::filesystem::remove(path);
}

inline FetchResult fetch_one(const FetchItem& item, const FetchOptions& options) {
  FetchResult result;
  result.item = item;

  std::error_code ec;
  if (std::filesystem::exists(item.dest, ec)) {
    if (sha256_file(item.dest) == item.sha256) {
      result.status = FetchStatus::kVerified;
      result.message = "already present, checksum ok";
      return result;
    }
    quarantine(item.dest);
    result.message = "existing file failed checksum, quarantined; ";
  }

  ParsedUrl url;
  try {
    url = parse_url(item.url);
  } catch (const FetchError& e) {
    result.message += e.what();
    return result;
  }

  std::filesystem::create_directories(item.dest.parent_path(), ec);
  int backoff = options.backoff_ms;
  for (int attempt = 1; attempt <= options.attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    httplib::Client client(url.origin);
    client.set_connection_timeout(options.timeout_seconds);
    client.set_read_timeout(options.timeout_seconds);
    client.set_follow_location(true);

    auto response = client.Get(url.path);
    if (!response) {
      result.message += "attempt " + std::to_string(attempt) + ": " +
                        httplib::to_string(response.error()) + "; ";
      continue;
    }
    if (response->status != 200) {
      result.message +=
          "attempt " + std::to_string(attempt) + ": http " + std::to_string(response->status) + "; ";
      continue;
    }
    if (sha256_hex(response->body) != item.sha256) {
      result.message += "attempt " + std::to_string(attempt) + ": checksum mismatch; ";
      // Keep the last bad payload next to the destination for inspection.
      std::ofstream bad(item.dest.string() + ".corrupt", std::ios::binary);
      bad.write(response->body.data(), static_cast<std::streamsize>(response->body.size()));
      continue;
    }

    const std::filesystem::path part = item.dest.string() + ".part";
    std::ofstream out(part, std::ios::binary);
    if (!out) {
      result.message += "cannot write " + part.string();
      return result;
    }
    out.write(response->body.data(), static_cast<std::streamsize>(response->body.size()));
    out.close();
    std::filesystem::rename(part, item.dest, ec);
    if (ec) {
      result.message += "rename failed: " + ec.message();
      return result;
    }
    result.status = FetchStatus::kDownloaded;
    result.message += std::to_string(response->body.size()) + " bytes";
    return result;
  }
  result.message += "giving up after " + std::to_string(options.attempts) + " attempts";
  return result;
}

}  // namespace detail

// Download (or verify) every item with a bounded worker pool. Results come
// back in input order regardless of completion order.
inline std::vector<FetchResult> fetch_all(const std::vector<FetchItem>& items,
                                          const FetchOptions& options = {}) {
  if (options.workers < 1 || options.attempts < 1)
    throw InvalidParameterError("fetch: workers and attempts must be positive");

  std::vector<FetchResult> results(items.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      results[i] = detail::fetch_one(items[i], options);
      if (options.on_complete) {
        std::lock_guard<std::mutex> lock(report_mutex);
        options.on_complete(results[i]);
      }
    }
  };

  const int pool = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(options.workers), items.size()));
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return results;
}

}  // namespace detbench

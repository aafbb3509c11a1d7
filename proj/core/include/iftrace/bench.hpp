#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iftrace/config.hpp"
#include "iftrace/taint.hpp"

namespace iftrace {

class ManifestError : public std::runtime_error {
 public:
  ManifestError(int entry_index, const std::string& field, const std::string& why);
};

class EmptyBenchmarkError : public std::runtime_error {
 public:
  EmptyBenchmarkError();
};

enum class BenchLabel { Leakage, Clean };

struct ManifestEntry {
  std::string name;
  std::vector<std::string> sources;  // absolute after load
  std::string top;
  std::vector<AssetSeed> assets;
  BenchLabel label = BenchLabel::Clean;
  std::optional<std::vector<std::string>> expected_path;
};

struct BenchmarkManifest {
  std::vector<ManifestEntry> entries;
  std::string dir;  // directory the manifest was loaded from
};

// Validates the manifest, resolves relative source paths against the
// manifest's directory, and checks that every source file exists.
BenchmarkManifest load_manifest(const std::string& path);

enum class BenchMode { DivideAndConquer, Monolithic };

struct EntryResult {
  std::string name;
  BenchLabel label = BenchLabel::Clean;
  std::optional<bool> verdict;  // unset when the entry errored
  bool correct = false;
  std::optional<bool> path_agreement;  // only when an expected path was given
  std::string error;
  double wall_ms = 0.0;
};

struct Metrics {
  std::string approach;
  int total = 0;
  int correct = 0;
  double success_rate = 0.0;
  int negatives = 0;         // entries labeled clean
  int false_positives = 0;   // clean entries flagged as leaking
  double false_positive_rate = 0.0;
  std::vector<EntryResult> entries;  // manifest order
};

// Runs every entry (a failing design records an error note and counts as
// incorrect; the sweep continues). divide-and-conquer runs the per-module
// pipeline plus integration; monolithic sends the whole design in one
// prompt. Entries may run on cfg.workers threads.
Metrics run_benchmarks(const BenchmarkManifest& manifest, const ToolConfig& cfg,
                       BenchMode mode);

enum class MetricsFormat { Json, Table };

// Json: canonical bytes (timings only when with_timings is set).
// Table: Approach | Success Rate | False Positive Rate, percentages with two
// decimals.
std::string emit_metrics(const std::vector<Metrics>& all, MetricsFormat format,
                         bool with_timings = false);

const char* bench_mode_name(BenchMode m);

}  // namespace iftrace

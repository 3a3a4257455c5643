#pragma once

// On-disk datasets of (conductivity, NtD matrix, kernel) triples.
//
//   out_dir/manifest.json
//   out_dir/{train,valid,test}/sample_XXXXX_{gamma,ntd,kernel}.eitk

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "eitlab/boundary_spectral.hpp"
#include "eitlab/conductivity.hpp"
#include "eitlab/forward.hpp"
#include "eitlab/training.hpp"

namespace eit {

enum class Distribution { Shape, ThreePhase, Lognormal, Homogeneous };

Distribution parse_distribution(const std::string& name);
std::string to_string(Distribution d);

ConductivityField sample_conductivity(Distribution d, std::uint64_t seed, int n);

struct SplitCounts {
  int train = 200;
  int valid = 50;
  int test = 50;

  bool operator==(const SplitCounts&) const = default;
};

struct DatasetConfig {
  Distribution distribution = Distribution::Shape;
  SplitCounts counts;
  int grid = 32;
  int modes = 16;
  int rings = 32;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const DatasetConfig&) const = default;
};

inline constexpr int kDatasetFormatVersion = 1;
inline const std::vector<std::string> kSplits = {"train", "valid", "test"};

struct FileEntry {
  std::string path;  // relative to the dataset directory
  std::uint32_t crc32 = 0;
};

struct SampleEntry {
  std::string split;
  int index = 0;
  std::uint64_t seed = 0;
  FileEntry gamma, ntd, kernel;
};

struct DatasetManifest {
  DatasetConfig config;
  int format_version = kDatasetFormatVersion;
  bool complete = false;
  std::vector<SampleEntry> samples;

  std::vector<const SampleEntry*> split(const std::string& name) const;
};

/// Per-sample seed for (split, index) under the master seed.
std::uint64_t sample_seed(std::uint64_t master, const std::string& split, int index);

/// NtD matrix (after reality symmetrization) and kernel of one conductivity.
struct SimulatedSample {
  NtDMatrix ntd;
  KernelGrid kernel;
  double reality_violation = 0.0;
};

SimulatedSample simulate_sample(const DiskMesh& mesh, const ConductivityField& gamma, int modes);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Writes every missing or corrupt sample and the manifest. An existing
/// incomplete dataset with the same config is resumed; a complete one is
/// returned untouched. A different config in out_dir raises ConfigError.
DatasetManifest generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir,
                                 const ProgressFn& progress = {});

DatasetManifest load_manifest(const std::filesystem::path& dir);
void save_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest);

/// Loads a split, verifying checksums. limit > 0 keeps the first `limit` samples.
std::vector<Sample> load_split(const std::filesystem::path& dir, const DatasetManifest& manifest,
                               const std::string& split, int limit = 0);

}  // namespace eit

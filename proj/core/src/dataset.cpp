#include "eitlab/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eitlab/array_io.hpp"
#include "eitlab/rng.hpp"

namespace eit {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSampleStream = 0xda7a;

int split_id(const std::string& split) {
  for (std::size_t i = 0; i < kSplits.size(); ++i) {
    if (kSplits[i] == split) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown split: " + split);
}

int split_count(const SplitCounts& c, const std::string& split) {
  switch (split_id(split)) {
    case 0: return c.train;
    case 1: return c.valid;
    default: return c.test;
  }
}

std::string sample_file(const std::string& split, int index, const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "sample_%05d_%s.eitk", index, what);
  return split + "/" + buf;
}

json file_json(const FileEntry& f) { return {{"path", f.path}, {"crc32", f.crc32}}; }

FileEntry file_from_json(const json& j) { return {j.at("path").get<std::string>(), j.at("crc32").get<std::uint32_t>()}; }

bool file_ok(const fs::path& dir, const FileEntry& f) {
  if (f.path.empty() || !fs::exists(dir / f.path)) return false;
  try {
    return file_crc32(dir / f.path) == f.crc32;
  } catch (const FormatError&) {
    return false;
  }
}

}  // namespace

Distribution parse_distribution(const std::string& name) {
  if (name == "shape") return Distribution::Shape;
  if (name == "three-phase") return Distribution::ThreePhase;
  if (name == "lognormal") return Distribution::Lognormal;
  if (name == "homogeneous") return Distribution::Homogeneous;
  throw ConfigError("unknown distribution '" + name + "' (shape, three-phase, lognormal, homogeneous)");
}

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::Shape: return "shape";
    case Distribution::ThreePhase: return "three-phase";
    case Distribution::Lognormal: return "lognormal";
    case Distribution::Homogeneous: return "homogeneous";
  }
  return "?";
}

ConductivityField sample_conductivity(Distribution d, std::uint64_t seed, int n) {
  switch (d) {
    case Distribution::Shape: return sample_shape(seed, n);
    case Distribution::ThreePhase: return sample_three_phase(seed, n);
    case Distribution::Lognormal: return sample_lognormal(seed, n);
    case Distribution::Homogeneous: return homogeneous_field(n);
  }
  throw std::invalid_argument("sample_conductivity: bad distribution");
}

void DatasetConfig::validate() const {
  if (counts.train < 0 || counts.valid < 0 || counts.test < 0) throw ConfigError("sample counts must be >= 0");
  if (grid < 4 || grid % 2 != 0) throw ConfigError("grid must be even and >= 4");
  if (modes < 1 || modes > grid / 2) throw ConfigError("modes must lie in [1, grid/2]");
  if (rings < 2) throw ConfigError("rings must be >= 2");
}

std::vector<const SampleEntry*> DatasetManifest::split(const std::string& name) const {
  std::vector<const SampleEntry*> out;
  for (const auto& s : samples) {
    if (s.split == name) out.push_back(&s);
  }
  return out;
}

std::uint64_t sample_seed(std::uint64_t master, const std::string& split, int index) {
  return derive_seed(master, {kSampleStream, static_cast<std::uint64_t>(split_id(split)),
                              static_cast<std::uint64_t>(index)});
}

SimulatedSample simulate_sample(const DiskMesh& mesh, const ConductivityField& gamma, int modes) {
  const NtDMatrix raw = assemble_ntd(mesh, gamma, modes, gamma.grid_size());
  Symmetrized sym = symmetrize_reality(raw);
  KernelGrid kernel = kernel_from_matrix(sym.matrix);
  return {std::move(sym.matrix), std::move(kernel), sym.violation};
}

void save_manifest(const fs::path& dir, const DatasetManifest& m) {
  json samples = json::array();
  for (const auto& s : m.samples) {
    samples.push_back({{"split", s.split},
                       {"index", s.index},
                       {"seed", s.seed},
                       {"gamma", file_json(s.gamma)},
                       {"ntd", file_json(s.ntd)},
                       {"kernel", file_json(s.kernel)}});
  }
  const json doc = {{"format_version", m.format_version},
                    {"distribution", to_string(m.config.distribution)},
                    {"counts", {{"train", m.config.counts.train}, {"valid", m.config.counts.valid},
                                {"test", m.config.counts.test}}},
                    {"grid", m.config.grid},
                    {"modes", m.config.modes},
                    {"rings", m.config.rings},
                    {"seed", m.config.seed},
                    {"noise", nullptr},
                    {"complete", m.complete},
                    {"samples", samples}};
  fs::create_directories(dir);
  const fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / "manifest.json");
}

DatasetManifest load_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("no dataset manifest in " + dir.string());
  try {
    const json doc = json::parse(in);
    DatasetManifest m;
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kDatasetFormatVersion) {
      throw FormatError("unsupported dataset format version " + std::to_string(m.format_version));
    }
    m.config.distribution = parse_distribution(doc.at("distribution").get<std::string>());
    m.config.counts.train = doc.at("counts").at("train").get<int>();
    m.config.counts.valid = doc.at("counts").at("valid").get<int>();
    m.config.counts.test = doc.at("counts").at("test").get<int>();
    m.config.grid = doc.at("grid").get<int>();
    m.config.modes = doc.at("modes").get<int>();
    m.config.rings = doc.at("rings").get<int>();
    m.config.seed = doc.at("seed").get<std::uint64_t>();
    m.complete = doc.at("complete").get<bool>();
    for (const auto& s : doc.at("samples")) {
      m.samples.push_back({s.at("split").get<std::string>(), s.at("index").get<int>(),
                           s.at("seed").get<std::uint64_t>(), file_from_json(s.at("gamma")),
                           file_from_json(s.at("ntd")), file_from_json(s.at("kernel"))});
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError("malformed manifest in " + dir.string() + ": " + e.what());
  }
}

DatasetManifest generate_dataset(const DatasetConfig& config, const fs::path& out_dir, const ProgressFn& progress) {
  config.validate();
  DatasetManifest manifest;
  manifest.config = config;
  if (fs::exists(out_dir / "manifest.json")) {
    DatasetManifest existing = load_manifest(out_dir);
    if (!(existing.config == config)) {
      throw ConfigError("dataset in " + out_dir.string() + " was generated with a different configuration");
    }
    if (existing.complete) return existing;
    manifest = std::move(existing);
  }

  // Slot per (split, index) in canonical order; entries from a partial run are kept.
  std::vector<SampleEntry> slots;
  for (const auto& split : kSplits) {
    for (int i = 0; i < split_count(config.counts, split); ++i) {
      SampleEntry e;
      e.split = split;
      e.index = i;
      e.seed = sample_seed(config.seed, split, i);
      for (const auto& old : manifest.samples) {
        if (old.split == split && old.index == i && old.seed == e.seed) e = old;
      }
      slots.push_back(e);
    }
  }
  manifest.complete = false;
  manifest.samples = slots;
  save_manifest(out_dir, manifest);

  const DiskMesh mesh = build_mesh(config.rings);
  for (std::size_t k = 0; k < manifest.samples.size(); ++k) {
    SampleEntry& e = manifest.samples[k];
    if (!(file_ok(out_dir, e.gamma) && file_ok(out_dir, e.ntd) && file_ok(out_dir, e.kernel))) {
      const ConductivityField gamma = sample_conductivity(config.distribution, e.seed, config.grid);
      const SimulatedSample sim = simulate_sample(mesh, gamma, config.modes);
      e.gamma.path = sample_file(e.split, e.index, "gamma");
      e.ntd.path = sample_file(e.split, e.index, "ntd");
      e.kernel.path = sample_file(e.split, e.index, "kernel");
      save_real(out_dir / e.gamma.path, gamma.values);
      save_complex(out_dir / e.ntd.path, sim.ntd.values());
      save_real(out_dir / e.kernel.path, sim.kernel.values);
      e.gamma.crc32 = file_crc32(out_dir / e.gamma.path);
      e.ntd.crc32 = file_crc32(out_dir / e.ntd.path);
      e.kernel.crc32 = file_crc32(out_dir / e.kernel.path);
      save_manifest(out_dir, manifest);
    }
    if (progress) progress(k + 1, manifest.samples.size());
  }
  manifest.complete = true;
  save_manifest(out_dir, manifest);
  return manifest;
}

std::vector<Sample> load_split(const fs::path& dir, const DatasetManifest& manifest, const std::string& split,
                               int limit) {
  const auto entries = manifest.split(split);
  const std::size_t count = limit > 0 ? std::min<std::size_t>(entries.size(), limit) : entries.size();
  if (limit > 0 && static_cast<std::size_t>(limit) > entries.size()) {
    throw ConfigError("requested " + std::to_string(limit) + " " + split + " samples but the dataset has " +
                      std::to_string(entries.size()));
  }
  const int n = manifest.config.grid;
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const SampleEntry& e = *entries[i];
    for (const FileEntry* f : {&e.gamma, &e.kernel}) {
      if (!file_ok(dir, *f)) throw FormatError("checksum mismatch or missing file: " + (dir / f->path).string());
    }
    Sample s;
    s.kernel.values = load_real(dir / e.kernel.path);
    s.gamma.values = load_real(dir / e.gamma.path);
    if (s.gamma.values.rows() != n || s.kernel.values.rows() != n) throw FormatError("grid size mismatch in " + e.gamma.path);
    s.gamma.mask = disk_mask(n);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace eit

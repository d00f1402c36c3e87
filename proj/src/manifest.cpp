#include "aqua/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "aqua/rng.hpp"

namespace aqua {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int segments_in(double duration_s, double segment_duration_s) {
  return static_cast<int>(std::floor(duration_s / segment_duration_s + 1e-9));
}

struct Recording {
  const ManifestEntry* entry;
  int seg_count;
};

// Recordings of one class, ordered by source_id then shuffled with a stream
// derived from the class name, so results do not depend on manifest row order.
std::vector<Recording> class_recordings(const DatasetManifest& manifest, const std::string& cls,
                                        double segment_duration_s, const Rng& root) {
  std::vector<Recording> recs;
  for (const auto& e : manifest.entries)
    if (e.label == cls) recs.push_back({&e, segments_in(e.duration_s, segment_duration_s)});
  std::sort(recs.begin(), recs.end(),
            [](const Recording& a, const Recording& b) { return a.entry->source_id < b.entry->source_id; });
  Rng rng = root.fork(fnv1a64(cls));
  rng.shuffle(recs.begin(), recs.end());
  return recs;
}

}  // namespace

std::vector<std::string> DatasetManifest::class_names() const {
  std::vector<std::string> names;
  for (const auto& e : entries) names.push_back(e.label);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

void DatasetManifest::validate() const {
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (e.label.empty()) throw std::runtime_error("manifest: empty label for " + e.path);
    if (e.duration_s <= 0) throw std::runtime_error("manifest: non-positive duration for " + e.path);
    if (!ids.insert(e.source_id).second)
      throw std::runtime_error("manifest: duplicate source_id " + e.source_id);
  }
}

SplitAssignment partition(const DatasetManifest& manifest, double ratio, std::uint64_t seed,
                          double segment_duration_s, std::vector<std::string>* warnings) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("partition: ratio must be in (0, 1)");
  manifest.validate();

  SplitAssignment out;
  out.ratio = ratio;
  out.seed = seed;
  const Rng root(seed);

  for (const auto& cls : manifest.class_names()) {
    auto recs = class_recordings(manifest, cls, segment_duration_s, root);
    long total = 0;
    for (const auto& r : recs) total += r.seg_count;

    if (recs.size() == 1) {
      out.train.insert(recs[0].entry->source_id);
      if (warnings)
        warnings->push_back("class '" + cls + "' has a single recording and cannot appear in both splits");
      continue;
    }

    // Prefix of the shuffled order whose segment fraction is closest to the
    // ratio; both splits stay non-empty.
    std::size_t best_k = 1;
    double best_dev = 2.0;
    long cum = 0;
    for (std::size_t k = 1; k < recs.size(); ++k) {
      cum += recs[k - 1].seg_count;
      const double frac = total > 0 ? static_cast<double>(cum) / static_cast<double>(total) : 0.0;
      const double dev = std::abs(frac - ratio);
      if (dev < best_dev) {
        best_dev = dev;
        best_k = k;
      }
    }
    for (std::size_t i = 0; i < recs.size(); ++i)
      ((i < best_k) ? out.train : out.test).insert(recs[i].entry->source_id);
    if (warnings && best_dev > 0.05)
      warnings->push_back("class '" + cls + "' train fraction misses the target ratio by " +
                          std::to_string(best_dev));
  }
  return out;
}

CuratedManifest build_dataset(const DatasetManifest& manifest, int per_class,
                              const std::string& contamination_class, double contamination_rate,
                              std::uint64_t seed, double segment_duration_s, ContaminationBase base,
                              double test_fraction_hint, const std::string& background_class) {
  if (per_class <= 0) throw std::invalid_argument("build_dataset: per_class must be positive");
  if (contamination_rate < 0 || contamination_rate >= 1)
    throw std::invalid_argument("build_dataset: contamination_rate must be in [0, 1)");
  manifest.validate();

  const Rng root(seed);
  const auto classes = manifest.class_names();

  // Per-class pools of (recording, segment_index) in selection order.
  std::map<std::string, std::vector<std::pair<const ManifestEntry*, int>>> pool;
  for (const auto& cls : classes) {
    auto recs = class_recordings(manifest, cls, segment_duration_s, root);
    auto& sel = pool[cls];
    Rng seg_rng = root.fork(fnv1a64(cls) ^ 0x5e67ULL);
    for (const auto& r : recs) {
      std::vector<int> idx(static_cast<std::size_t>(r.seg_count));
      for (int i = 0; i < r.seg_count; ++i) idx[static_cast<std::size_t>(i)] = i;
      seg_rng.shuffle(idx.begin(), idx.end());
      for (int i : idx) sel.emplace_back(r.entry, i);
    }
  }

  auto take = [&](const std::string& cls, int count, int skip) {
    const auto& sel = pool[cls];
    if (static_cast<int>(sel.size()) < skip + count)
      throw std::runtime_error("build_dataset: class '" + cls + "' has only " +
                               std::to_string(sel.size()) + " segments, need " +
                               std::to_string(skip + count));
    std::vector<std::pair<const ManifestEntry*, int>> out(sel.begin() + skip, sel.begin() + skip + count);
    return out;
  };

  int n_contaminants = 0;
  if (!contamination_class.empty() && contamination_rate > 0) {
    if (!pool.count(contamination_class))
      throw std::runtime_error("build_dataset: contamination class '" + contamination_class +
                               "' not present in manifest");
    if (base == ContaminationBase::background_pool) {
      n_contaminants = static_cast<int>(std::lround(contamination_rate * per_class));
    } else {
      const double test_total = test_fraction_hint * per_class * static_cast<double>(classes.size());
      n_contaminants = static_cast<int>(std::lround(contamination_rate * test_total));
    }
    n_contaminants = std::min(n_contaminants, per_class);
  }

  CuratedManifest curated;
  for (const auto& cls : classes) {
    const bool is_bg = cls == background_class;
    const int visible = is_bg ? per_class - n_contaminants : per_class;
    for (const auto& [entry, seg_idx] : take(cls, visible, 0)) {
      curated.rows.push_back({entry->path, entry->source_id, cls, segment_duration_s, seg_idx, "", ""});
    }
  }
  if (n_contaminants > 0) {
    // Contaminants come after the contamination class's own rows so no
    // segment is used twice.
    for (const auto& [entry, seg_idx] : take(contamination_class, n_contaminants, per_class)) {
      curated.rows.push_back({entry->path, entry->source_id, background_class, segment_duration_s,
                              seg_idx, "", contamination_class});
    }
  }

  std::sort(curated.rows.begin(), curated.rows.end(), [](const CuratedRow& a, const CuratedRow& b) {
    return std::tie(a.label, a.source_id, a.segment_index) < std::tie(b.label, b.source_id, b.segment_index);
  });
  return curated;
}

void annotate_split(CuratedManifest& curated, const SplitAssignment& split) {
  for (auto& row : curated.rows) {
    if (split.train.count(row.source_id)) {
      row.split = "train";
    } else if (split.test.count(row.source_id)) {
      row.split = "test";
    } else {
      throw std::runtime_error("annotate_split: source_id '" + row.source_id + "' missing from assignment");
    }
  }
}

DatasetManifest read_manifest_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest: " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty manifest: " + path.string());
  if (line != "path,source_id,label,duration_s")
    throw std::runtime_error("manifest header mismatch in " + path.string() + ": got '" + line + "'");
  DatasetManifest m;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4) throw std::runtime_error("manifest row has " + std::to_string(fields.size()) + " fields: " + line);
    m.entries.push_back({fields[0], fields[1], fields[2], std::stod(fields[3])});
  }
  return m;
}

void write_manifest_csv(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write manifest: " + path.string());
  f << "path,source_id,label,duration_s\n";
  char buf[64];
  for (const auto& e : manifest.entries) {
    std::snprintf(buf, sizeof buf, "%.6f", e.duration_s);
    f << e.path << ',' << e.source_id << ',' << e.label << ',' << buf << '\n';
  }
}

CuratedManifest read_curated_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open curated manifest: " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty curated manifest: " + path.string());
  if (line != "path,source_id,label,duration_s,segment_index,split,hidden_truth")
    throw std::runtime_error("curated manifest header mismatch in " + path.string());
  CuratedManifest c;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 7) throw std::runtime_error("curated row has " + std::to_string(fields.size()) + " fields: " + line);
    c.rows.push_back({fields[0], fields[1], fields[2], std::stod(fields[3]), std::stoi(fields[4]),
                      fields[5], fields[6]});
  }
  return c;
}

void write_curated_csv(const std::filesystem::path& path, const CuratedManifest& curated) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write curated manifest: " + path.string());
  f << "path,source_id,label,duration_s,segment_index,split,hidden_truth\n";
  char buf[64];
  for (const auto& r : curated.rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.duration_s);
    f << r.path << ',' << r.source_id << ',' << r.label << ',' << buf << ',' << r.segment_index << ','
      << r.split << ',' << r.hidden_truth << '\n';
  }
}

}  // namespace aqua

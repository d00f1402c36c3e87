#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "aqua/types.hpp"

namespace aqua {

struct ManifestEntry {
  std::string path;
  std::string source_id;
  std::string label;
  double duration_s = 0.0;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<std::string> class_names() const;  // sorted, unique
  void validate() const;                         // unique source_ids, non-empty labels
};

// Recording-level train/test assignment. Segments of one recording always
// land on the same side.
struct SplitAssignment {
  std::set<std::string> train;
  std::set<std::string> test;
  double ratio = 0.9;
  std::uint64_t seed = 0;
};

// Partitions recordings per class so the train fraction of segments tracks
// `ratio` as closely as the recording granularity allows. Deterministic for a
// fixed (manifest, ratio, seed); warnings collect classes that cannot be
// split (single recording) or that miss the ratio by more than 5 points.
SplitAssignment partition(const DatasetManifest& manifest, double ratio, std::uint64_t seed,
                          double segment_duration_s = 2.0,
                          std::vector<std::string>* warnings = nullptr);

enum class ContaminationBase { background_pool, total_test };

// One selected segment of the curated dataset. `label` is the visible class;
// `hidden_truth` is non-empty only for contaminants and never feeds training.
struct CuratedRow {
  std::string path;
  std::string source_id;
  std::string label;
  double duration_s = 0.0;
  int segment_index = 0;
  std::string split;         // "train"/"test" once annotated
  std::string hidden_truth;  // true class of a contaminant, else empty
};

struct CuratedManifest {
  std::vector<CuratedRow> rows;
};

// Stratified subsampling at `per_class` segments per class (recordings first,
// then segments within recordings), with `contamination_class` segments
// injected into the background pool at `contamination_rate` and relabeled as
// background. `test_fraction_hint` is used only for the total_test base.
CuratedManifest build_dataset(const DatasetManifest& manifest, int per_class,
                              const std::string& contamination_class, double contamination_rate,
                              std::uint64_t seed, double segment_duration_s = 2.0,
                              ContaminationBase base = ContaminationBase::background_pool,
                              double test_fraction_hint = 0.1,
                              const std::string& background_class = "background");

void annotate_split(CuratedManifest& curated, const SplitAssignment& split);

// CSV round trips. Manifest header: path,source_id,label,duration_s
// Curated header adds: segment_index,split,hidden_truth
DatasetManifest read_manifest_csv(const std::filesystem::path& path);
void write_manifest_csv(const std::filesystem::path& path, const DatasetManifest& manifest);
CuratedManifest read_curated_csv(const std::filesystem::path& path);
void write_curated_csv(const std::filesystem::path& path, const CuratedManifest& curated);

}  // namespace aqua

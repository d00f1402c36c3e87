#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aqua/audio.hpp"
#include "aqua/manifest.hpp"
#include "aqua/rng.hpp"

namespace aqua {

// Parametric stand-in for a vessel signature: a harmonic stack with rolloff,
// amplitude-modulated at the propeller cadence, over broadband noise.
struct ClassProfile {
  std::string name;
  double fundamental_hz = 0.0;  // 0 = no tonal content
  int harmonics = 0;
  double rolloff_db_per_harmonic = 4.0;
  double noise_level = 0.05;
  double am_rate_hz = 0.0;
  double am_depth = 0.5;
};

// background is broadband-only; the four vessel classes get spread-out
// fundamentals and distinct cadences.
std::vector<ClassProfile> default_profiles();

Waveform generate_vessel_signal(const ClassProfile& profile, double duration_s, int rate, Rng& rng);

struct CorpusConfig {
  std::filesystem::path out_dir;
  std::vector<ClassProfile> profiles = default_profiles();
  int recordings_per_class = 10;
  double recording_s = 20.0;
  int sample_rate = 32000;
  std::uint64_t seed = 1;
  double level_jitter_db = 3.0;  // per-recording level spread
};

// Writes one WAV per recording plus manifest.csv; byte-identical for a fixed
// seed. Returns the manifest it wrote.
DatasetManifest generate_corpus(const CorpusConfig& cfg);

}  // namespace aqua

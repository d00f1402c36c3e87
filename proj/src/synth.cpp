#include "aqua/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aqua/wav.hpp"

namespace aqua {

std::vector<ClassProfile> default_profiles() {
  return {
      {"background", 0.0, 0, 4.0, 0.30, 0.0, 0.0},
      {"cargo", 120.0, 8, 4.0, 0.05, 1.5, 0.5},
      {"passenger-ship", 300.0, 8, 4.0, 0.05, 2.5, 0.5},
      {"tanker", 600.0, 8, 4.0, 0.05, 4.0, 0.5},
      {"tug", 900.0, 8, 4.0, 0.05, 6.0, 0.5},
  };
}

Waveform generate_vessel_signal(const ClassProfile& profile, double duration_s, int rate, Rng& rng) {
  if (profile.fundamental_hz > 0 && profile.harmonics > 0 &&
      profile.fundamental_hz * profile.harmonics >= rate / 2.0)
    throw std::invalid_argument("synth: harmonic stack of '" + profile.name + "' exceeds Nyquist");

  const auto n = static_cast<Index>(std::llround(duration_s * rate));
  Vecd x = Vecd::Zero(n);
  const double two_pi = 2.0 * std::numbers::pi;

  if (profile.fundamental_hz > 0) {
    for (int h = 1; h <= profile.harmonics; ++h) {
      const double amp = std::pow(10.0, -profile.rolloff_db_per_harmonic * (h - 1) / 20.0);
      const double w = two_pi * profile.fundamental_hz * h / rate;
      const double phase = rng.uniform(0.0, two_pi);
      for (Index i = 0; i < n; ++i) x[i] += amp * std::sin(w * static_cast<double>(i) + phase);
    }
    if (profile.am_rate_hz > 0) {
      const double wm = two_pi * profile.am_rate_hz / rate;
      const double pm = rng.uniform(0.0, two_pi);
      const double d = profile.am_depth;
      for (Index i = 0; i < n; ++i)
        x[i] *= (1.0 + d * std::sin(wm * static_cast<double>(i) + pm)) / (1.0 + d);
    }
  }
  if (profile.noise_level > 0) {
    for (Index i = 0; i < n; ++i) x[i] += profile.noise_level * rng.normal();
  }

  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0) x *= 0.9 / peak;

  Waveform w;
  w.sample_rate = rate;
  w.samples = x.cast<float>();
  return w;
}

DatasetManifest generate_corpus(const CorpusConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.profiles.size() < 2) throw std::invalid_argument("synth: need at least two profiles");
  fs::create_directories(cfg.out_dir);

  const Rng root(cfg.seed);
  DatasetManifest manifest;
  for (const auto& profile : cfg.profiles) {
    for (int r = 0; r < cfg.recordings_per_class; ++r) {
      Rng rng = root.fork(fnv1a64(profile.name) ^ static_cast<std::uint64_t>(r));
      ClassProfile jittered = profile;
      if (cfg.level_jitter_db > 0 && profile.noise_level > 0) {
        const double db = rng.uniform(-cfg.level_jitter_db, cfg.level_jitter_db);
        jittered.noise_level *= std::pow(10.0, db / 20.0);
      }
      Waveform w = generate_vessel_signal(jittered, cfg.recording_s, cfg.sample_rate, rng);

      const std::string source_id = profile.name + "_" + std::to_string(r);
      const fs::path file = cfg.out_dir / (source_id + ".wav");
      if (fs::exists(file)) throw std::runtime_error("synth: output collision at " + file.string());
      write_wav_file(file, w.samples, w.sample_rate);
      manifest.entries.push_back({file.string(), source_id, profile.name, cfg.recording_s});
    }
  }
  write_manifest_csv(cfg.out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace aqua

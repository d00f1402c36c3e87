#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "aqua/augment.hpp"
#include "aqua/dsp.hpp"
#include "aqua/nn/checkpoint.hpp"
#include "aqua/nn/network.hpp"

namespace aqua {

using MaskGrid = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Pool of real background spectrograms (compressed, normalized) mixed into
// training inputs as one of the noise variants.
struct NoiseBank {
  std::vector<Matd> backgrounds;
};

enum class NoiseVariant { gaussian, band_hum, real_background };

struct DenoiserConfig {
  int epochs = 100;
  double lr = 1e-3;
  int batch = 4;
  std::uint64_t seed = 1;
  double lr_decay = 1.0;  // per-epoch exponential lr factor; 1 = constant
  int base_channels = 16;
  AugmentSpec augment;  // spectrogram-domain; inert by default
  double noise_intensity_lo = 0.25;
  double noise_intensity_hi = 1.25;
  double mask_k = 1.0;
};

// Forced-variant injection. Intensity is the additive scale for gaussian and
// band_hum; for real_background it is the convex mix weight.
Matd add_noise_with(const Matd& sp, NoiseVariant variant, double intensity, const Matd* background,
                    Rng& rng);

// Draws a variant and intensity; an empty bank downgrades the real-background
// variant to gaussian with a warning.
Matd add_noise_variants(const Matd& sp, const NoiseBank& bank, Rng& rng, const DenoiserConfig& cfg,
                        std::vector<std::string>* warnings = nullptr);

// Cell = 1 iff value > per-frame mean + k * per-frame std, then 3x3 majority
// smoothing. Frame statistics run down each time column; per-frequency-row
// statistics would zero out exactly the tonal rows the mask is meant to keep.
MaskGrid generate_binary_mask(const Matd& sp, double k = 1.0);

enum class PairCase { noise_to_original, original_to_mask };

struct TrainingPair {
  Matf input;
  Matf target;
  PairCase kind = PairCase::noise_to_original;
};

// Augments first, then draws the case with probability 1/2 each:
//   A: (augmented + noise, augmented)   B: (augmented, mask(augmented))
TrainingPair make_training_pair(const Matd& sp, const NoiseBank& bank, const DenoiserConfig& cfg,
                                Rng& rng);

struct LossCurve {
  std::vector<double> epoch_loss;
};

struct DenoiserModel {
  std::unique_ptr<nn::Network<float>> net;
  StftConfig stft;
  PerBinStats norm;
  Fingerprint fp;
  int base_channels = 16;
  int rows = kCompressedBins;
  int cols = 200;
};

// U-Net trained on mixed case-A (regression, MSE) and case-B (mask, BCE on
// the sigmoid of the shared linear head) pairs. Deterministic per seed.
DenoiserModel train_denoiser(std::span<const Matd> specs, const NoiseBank& bank,
                             const DenoiserConfig& cfg, const StftConfig& stft,
                             const PerBinStats& norm, LossCurve* curve = nullptr);

// Forward pass of the regression head; dims preserved.
Matd denoise(const DenoiserModel& model, const Matd& sp);

struct DenoiserEvalResult {
  double mse_ratio = 0.0;    // mean over pairs of MSE(denoised,clean)/MSE(noisy,clean)
  double snr_gain_db = 0.0;  // -10*log10(mse_ratio)
  int pairs = 0;
};

DenoiserEvalResult eval_denoiser(const DenoiserModel& model,
                                 std::span<const std::pair<Matd, Matd>> clean_noisy);

void save_denoiser(const std::filesystem::path& path, const DenoiserModel& model,
                   const CheckpointMeta& meta);
DenoiserModel load_denoiser(const std::filesystem::path& path);

}  // namespace aqua

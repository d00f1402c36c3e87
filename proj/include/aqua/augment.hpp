#pragma once

#include "aqua/audio.hpp"
#include "aqua/dsp.hpp"
#include "aqua/rng.hpp"
#include "aqua/types.hpp"

namespace aqua {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double draw(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

struct AugmentSpec {
  Range pitch_shift_semitones{0.0, 0.0};  // |x| <= 2
  Range time_stretch{1.0, 1.0};           // within [0.9, 1.1]
  Range gain_db{0.0, 0.0};
  Range noise_sigma{0.0, 0.0};  // >= 0
  int freq_mask_width = 0;      // max masked bins, < freq_bins

  void validate() const;
};

// Multiplicative gain plus elementwise Gaussian noise, re-clamped to [-1, 1].
Segment augment_waveform(const Segment& s, const AugmentSpec& spec, Rng& rng);

// Frame axis linearly resampled by `factor` (0.9..1.1), then cropped or
// edge-padded back to the original frame count.
Spectrogram stretch_time(const Spectrogram& sp, double factor);

// Frequency axis resampled by 2^(semitones/12); vacated bins get db_floor.
Spectrogram pitch_shift_bins(const Spectrogram& sp, double semitones, double db_floor = -120.0);

// One contiguous band of w ~ uniform{0..max_width} rows set to db_floor.
Spectrogram frequency_mask(const Spectrogram& sp, Rng& rng, int max_width, double db_floor = -120.0);

// Pitch, stretch and mask applied in sequence with parameters drawn from the
// spec; the denoiser uses this before pairing inputs with targets.
Spectrogram augment_spectrogram(const Spectrogram& sp, const AugmentSpec& spec, Rng& rng,
                                double db_floor = -120.0);

}  // namespace aqua

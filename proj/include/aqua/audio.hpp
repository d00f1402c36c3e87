#pragma once

#include <string>
#include <vector>

#include "aqua/types.hpp"

namespace aqua {

struct Waveform {
  Vecf samples;  // amplitudes in [-1, 1]
  int sample_rate = 0;
  std::string source_id;
};

struct Segment {
  Vecf samples;  // exactly duration * rate samples
  int sample_rate = 0;
  std::string source_id;
  int segment_index = 0;
  std::string label;  // empty when unlabeled
};

// Band-limited rate conversion: polyphase windowed-sinc interpolation with a
// Kaiser window, 32 taps per phase. Output length is round(n * target / source).
Waveform resample(const Waveform& w, int target_rate);

// Non-overlapping fixed-length segmentation; the trailing remainder shorter
// than one segment is discarded. A waveform shorter than one segment yields
// an empty list.
std::vector<Segment> segment(const Waveform& w, double duration_s);

}  // namespace aqua

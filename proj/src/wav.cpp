#include "aqua/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace aqua {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  std::size_t remaining() const { return bytes.size() - pos; }

  void need(std::size_t n, const std::string& what) {
    if (remaining() < n) throw WavError("truncated wav: " + what);
  }

  std::string tag() {
    need(4, "chunk id");
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), 4);
    pos += 4;
    return s;
  }

  std::uint32_t u32(const std::string& what) {
    need(4, what);
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }

  std::uint16_t u16(const std::string& what) {
    need(2, what);
    std::uint16_t v;
    std::memcpy(&v, bytes.data() + pos, 2);
    pos += 2;
    return v;
  }
};

}  // namespace

WavData parse_wav(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  if (r.tag() != "RIFF") throw WavError("malformed wav: missing RIFF chunk");
  r.u32("RIFF size");
  if (r.tag() != "WAVE") throw WavError("malformed wav: missing WAVE form type");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;

  while (r.remaining() >= 8) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32("size of chunk '" + id + "'");
    if (size > r.remaining()) throw WavError("malformed wav: chunk '" + id + "' overruns file");

    if (id == "fmt ") {
      if (size < 16) throw WavError("malformed wav: chunk 'fmt ' too short");
      const std::size_t end = r.pos + size;
      format = r.u16("format tag");
      channels = r.u16("channel count");
      rate = r.u32("sample rate");
      r.u32("byte rate");
      r.u16("block align");
      bits = r.u16("bits per sample");
      r.pos = end + (size & 1);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw WavError("malformed wav: chunk 'data' precedes 'fmt '");
      if (channels == 0 || rate == 0) throw WavError("malformed wav: chunk 'fmt ' has zero channels or rate");
      if (format == kFormatPcm && bits != 16)
        throw WavError("unsupported wav format: " + std::to_string(bits) + "-bit PCM (expected 16-bit PCM or 32-bit float)");
      if (format == kFormatIeeeFloat && bits != 32)
        throw WavError("unsupported wav format: " + std::to_string(bits) + "-bit float (expected 16-bit PCM or 32-bit float)");
      if (format != kFormatPcm && format != kFormatIeeeFloat)
        throw WavError("unsupported wav format: format tag " + std::to_string(format));

      const std::size_t bytes_per = bits / 8;
      const std::size_t frame_bytes = bytes_per * channels;
      const std::size_t frames = size / frame_bytes;
      const std::uint8_t* p = bytes.data() + r.pos;

      WavData out;
      out.sample_rate = static_cast<int>(rate);
      out.samples.resize(static_cast<Index>(frames));
      const double inv_ch = 1.0 / channels;
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
          const std::uint8_t* s = p + f * frame_bytes + c * bytes_per;
          if (format == kFormatPcm) {
            std::int16_t v;
            std::memcpy(&v, s, 2);
            acc += v / 32768.0;
          } else {
            float v;
            std::memcpy(&v, s, 4);
            acc += v;
          }
        }
        out.samples[static_cast<Index>(f)] = static_cast<float>(acc * inv_ch);
      }
      return out;
    } else {
      r.pos += size + (size & 1);  // chunks are word-aligned
    }
  }
  throw WavError(have_fmt ? "malformed wav: missing 'data' chunk" : "malformed wav: missing 'fmt ' chunk");
}

std::vector<std::uint8_t> encode_wav16(const Vecf& samples, int sample_rate) {
  const std::uint32_t n = static_cast<std::uint32_t>(samples.size());
  const std::uint32_t data_bytes = n * 2;
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);

  auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto put_u16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };

  put_tag("RIFF");
  put_u32(36 + data_bytes);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(sample_rate));
  put_u32(static_cast<std::uint32_t>(sample_rate) * 2);
  put_u16(2);   // block align
  put_u16(16);  // bits
  put_tag("data");
  put_u32(data_bytes);
  for (Index i = 0; i < samples.size(); ++i) {
    const double x = std::clamp(static_cast<double>(samples[i]), -1.0, 1.0);
    const long q = std::lround(x * 32768.0);
    put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  return out;
}

WavData read_wav_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw WavError("cannot open wav file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_wav(bytes);
}

void write_wav_file(const std::filesystem::path& path, const Vecf& samples, int sample_rate) {
  const auto bytes = encode_wav16(samples, sample_rate);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw WavError("cannot write wav file: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace aqua

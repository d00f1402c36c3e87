#include "aqua/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace aqua {
namespace {

constexpr char kMagic[4] = {'A', 'Q', 'S', 'G'};
constexpr std::uint16_t kVersion = 1;

enum SectionId : std::uint16_t {
  kSecStft = 1,
  kSecNorm = 2,
  kSecArch = 3,
  kSecParams = 4,
  kSecMeta = 5,
  kSecThreshold = 6,
  kSecClasses = 7,
  kSecFingerprint = 8,
};

struct Writer {
  std::vector<std::uint8_t> out;

  template <class T>
  void raw(const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out.insert(out.end(), p, p + sizeof(T));
  }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void str(const std::string& s) {
    raw(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
};

struct Reader {
  std::span<const std::uint8_t> in;
  std::size_t pos = 0;

  template <class T>
  T raw(const char* what) {
    if (pos + sizeof(T) > in.size()) throw CheckpointError(std::string("truncated checkpoint: ") + what);
    T v;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::string str(const char* what) {
    const auto n = raw<std::uint32_t>(what);
    if (pos + n > in.size()) throw CheckpointError(std::string("truncated checkpoint: ") + what);
    std::string s(reinterpret_cast<const char*>(in.data() + pos), n);
    pos += n;
    return s;
  }
};

void write_section(Writer& w, SectionId id, const std::vector<std::uint8_t>& payload) {
  w.raw(static_cast<std::uint16_t>(id));
  w.raw(static_cast<std::uint64_t>(payload.size()));
  w.bytes(payload.data(), payload.size());
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ck) {
  Writer w;
  w.bytes(kMagic, 4);
  w.raw(kVersion);

  std::vector<std::pair<SectionId, std::vector<std::uint8_t>>> sections;

  {
    Writer s;
    s.raw(static_cast<std::int32_t>(ck.stft.fft_size));
    s.raw(static_cast<std::int32_t>(ck.stft.hop));
    s.raw(static_cast<std::uint16_t>(ck.stft.window));
    s.raw(ck.stft.db_floor);
    s.raw(ck.stft.power_eps);
    sections.emplace_back(kSecStft, std::move(s.out));
  }
  if (ck.norm) {
    Writer s;
    s.raw(static_cast<std::int64_t>(ck.norm->mean.size()));
    s.raw(ck.norm->epsilon);
    s.bytes(ck.norm->mean.data(), sizeof(double) * static_cast<std::size_t>(ck.norm->mean.size()));
    s.bytes(ck.norm->std.data(), sizeof(double) * static_cast<std::size_t>(ck.norm->std.size()));
    sections.emplace_back(kSecNorm, std::move(s.out));
  }
  {
    Writer s;
    s.raw(ck.arch.net_kind);
    s.raw(static_cast<std::uint32_t>(ck.arch.ints.size()));
    s.bytes(ck.arch.ints.data(), sizeof(std::int32_t) * ck.arch.ints.size());
    s.raw(static_cast<std::uint32_t>(ck.arch.layers.size()));
    for (const auto& l : ck.arch.layers) {
      s.raw(l.kind);
      s.raw(static_cast<std::uint32_t>(l.ints.size()));
      s.bytes(l.ints.data(), sizeof(std::int32_t) * l.ints.size());
    }
    sections.emplace_back(kSecArch, std::move(s.out));
  }
  {
    Writer s;
    s.raw(static_cast<std::uint64_t>(ck.blob.size()));
    s.bytes(ck.blob.data(), sizeof(float) * ck.blob.size());
    sections.emplace_back(kSecParams, std::move(s.out));
  }
  {
    Writer s;
    s.raw(ck.meta.epochs);
    s.raw(ck.meta.lr);
    s.raw(ck.meta.seed);
    s.raw(static_cast<std::uint32_t>(ck.meta.extra.size()));
    for (const auto& [k, v] : ck.meta.extra) {
      s.str(k);
      s.str(v);
    }
    sections.emplace_back(kSecMeta, std::move(s.out));
  }
  if (ck.threshold) {
    Writer s;
    s.raw(ck.threshold->threshold);
    s.raw(ck.threshold->percentile);
    s.raw(ck.threshold->rescale_lo);
    s.raw(ck.threshold->rescale_hi);
    sections.emplace_back(kSecThreshold, std::move(s.out));
  }
  if (!ck.classes.empty()) {
    Writer s;
    s.raw(static_cast<std::uint32_t>(ck.classes.size()));
    for (const auto& c : ck.classes) s.str(c);
    sections.emplace_back(kSecClasses, std::move(s.out));
  }
  if (ck.fingerprint) {
    Writer s;
    s.raw(ck.fingerprint->hash);
    s.raw(static_cast<std::uint8_t>(ck.fingerprint->denoised ? 1 : 0));
    sections.emplace_back(kSecFingerprint, std::move(s.out));
  }

  w.raw(static_cast<std::uint16_t>(sections.size()));
  for (auto& [id, payload] : sections) write_section(w, id, payload);
  return std::move(w.out);
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  char magic[4];
  if (bytes.size() < 4) throw CheckpointError("truncated checkpoint: magic");
  std::memcpy(magic, bytes.data(), 4);
  r.pos = 4;
  if (std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("bad checkpoint magic");
  const auto version = r.raw<std::uint16_t>("version");
  if (version != kVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kVersion) + ")");
  const auto n_sections = r.raw<std::uint16_t>("section count");

  Checkpoint ck;
  bool have_arch = false, have_params = false, have_meta = false;
  for (std::uint16_t s = 0; s < n_sections; ++s) {
    const auto id = r.raw<std::uint16_t>("section id");
    const auto len = r.raw<std::uint64_t>("section length");
    if (r.pos + len > bytes.size()) throw CheckpointError("truncated checkpoint: section payload");
    Reader sec{bytes.subspan(r.pos, len)};
    r.pos += len;

    switch (id) {
      case kSecStft: {
        ck.stft.fft_size = sec.raw<std::int32_t>("fft_size");
        ck.stft.hop = sec.raw<std::int32_t>("hop");
        ck.stft.window = static_cast<WindowKind>(sec.raw<std::uint16_t>("window"));
        ck.stft.db_floor = sec.raw<double>("db_floor");
        ck.stft.power_eps = sec.raw<double>("power_eps");
        break;
      }
      case kSecNorm: {
        PerBinStats norm;
        const auto bins = sec.raw<std::int64_t>("bins");
        norm.epsilon = sec.raw<double>("epsilon");
        norm.mean.resize(bins);
        norm.std.resize(bins);
        for (std::int64_t i = 0; i < bins; ++i) norm.mean[i] = sec.raw<double>("mean");
        for (std::int64_t i = 0; i < bins; ++i) norm.std[i] = sec.raw<double>("std");
        ck.norm = std::move(norm);
        break;
      }
      case kSecArch: {
        ck.arch.net_kind = sec.raw<std::uint16_t>("net kind");
        const auto ni = sec.raw<std::uint32_t>("net ints");
        ck.arch.ints.resize(ni);
        for (auto& v : ck.arch.ints) v = sec.raw<std::int32_t>("net int");
        const auto nl = sec.raw<std::uint32_t>("layer count");
        ck.arch.layers.resize(nl);
        for (auto& l : ck.arch.layers) {
          l.kind = sec.raw<std::uint16_t>("layer kind");
          const auto li = sec.raw<std::uint32_t>("layer ints");
          l.ints.resize(li);
          for (auto& v : l.ints) v = sec.raw<std::int32_t>("layer int");
        }
        have_arch = true;
        break;
      }
      case kSecParams: {
        const auto n = sec.raw<std::uint64_t>("param count");
        if (sec.pos + n * sizeof(float) > sec.in.size())
          throw CheckpointError("truncated checkpoint: parameter blob");
        ck.blob.resize(n);
        std::memcpy(ck.blob.data(), sec.in.data() + sec.pos, n * sizeof(float));
        have_params = true;
        break;
      }
      case kSecMeta: {
        ck.meta.epochs = sec.raw<std::int32_t>("epochs");
        ck.meta.lr = sec.raw<double>("lr");
        ck.meta.seed = sec.raw<std::uint64_t>("seed");
        const auto n = sec.raw<std::uint32_t>("meta entries");
        for (std::uint32_t i = 0; i < n; ++i) {
          std::string k = sec.str("meta key");
          ck.meta.extra[k] = sec.str("meta value");
        }
        have_meta = true;
        break;
      }
      case kSecThreshold: {
        ThresholdSection t;
        t.threshold = sec.raw<double>("threshold");
        t.percentile = sec.raw<double>("percentile");
        t.rescale_lo = sec.raw<double>("rescale lo");
        t.rescale_hi = sec.raw<double>("rescale hi");
        ck.threshold = t;
        break;
      }
      case kSecClasses: {
        const auto n = sec.raw<std::uint32_t>("class count");
        for (std::uint32_t i = 0; i < n; ++i) ck.classes.push_back(sec.str("class name"));
        break;
      }
      case kSecFingerprint: {
        Fingerprint fp;
        fp.hash = sec.raw<std::uint64_t>("fingerprint hash");
        fp.denoised = sec.raw<std::uint8_t>("denoised flag") != 0;
        ck.fingerprint = fp;
        break;
      }
      default:
        throw CheckpointError("unknown checkpoint section " + std::to_string(id));
    }
  }
  if (!have_arch || !have_params || !have_meta)
    throw CheckpointError("checkpoint missing required sections");
  return ck;
}

void write_checkpoint_file(const std::filesystem::path& path, const Checkpoint& ck) {
  const auto bytes = save_checkpoint(ck);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot write checkpoint: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint read_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return load_checkpoint(bytes);
}

namespace {
std::uint64_t stft_hash(const StftConfig& stft) {
  std::uint64_t h = fnv1a64(&stft.fft_size, sizeof stft.fft_size);
  h = fnv1a64(&stft.hop, sizeof stft.hop, h);
  h = fnv1a64(&stft.window, sizeof stft.window, h);
  h = fnv1a64(&stft.db_floor, sizeof stft.db_floor, h);
  h = fnv1a64(&stft.power_eps, sizeof stft.power_eps, h);
  return h;
}
}  // namespace

Fingerprint make_fingerprint(const StftConfig& stft, const PerBinStats* norm, bool denoised) {
  std::uint64_t h = stft_hash(stft);
  if (norm) {
    h = fnv1a64(norm->mean.data(), sizeof(double) * static_cast<std::size_t>(norm->mean.size()), h);
    h = fnv1a64(norm->std.data(), sizeof(double) * static_cast<std::size_t>(norm->std.size()), h);
    h = fnv1a64(&norm->epsilon, sizeof norm->epsilon, h);
  }
  const std::uint8_t d = denoised ? 1 : 0;
  return {fnv1a64(&d, 1, h), denoised};
}

Fingerprint make_fingerprint(const StftConfig& stft, double rescale_lo, double rescale_hi, bool denoised) {
  std::uint64_t h = stft_hash(stft);
  h = fnv1a64(&rescale_lo, sizeof rescale_lo, h);
  h = fnv1a64(&rescale_hi, sizeof rescale_hi, h);
  const std::uint8_t d = denoised ? 1 : 0;
  return {fnv1a64(&d, 1, h), denoised};
}

}  // namespace aqua

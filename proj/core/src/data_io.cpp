#include "esrnn/data_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>

#include "esrnn/error.hpp"

namespace esrnn {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (first != last && *first == '+') ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path.string()), in_(path) {
    if (!in_) throw LoadError(path_, 0, "cannot open file");
  }

  /// Next line; false at end of file. Updates line().
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    return true;
  }

  /// True if only blank lines remain.
  bool rest_blank() {
    std::string line;
    while (next(line)) {
      if (!split_ws(line).empty()) return false;
    }
    return true;
  }

  std::size_t line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }
  [[noreturn]] void fail(std::size_t line, const std::string& what) const { throw LoadError(path_, line, what); }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

Sequence load_sequence(const fs::path& features, const fs::path& labels, std::size_t n_classes) {
  Sequence seq;
  {
    LineReader r(features);
    std::string line;
    if (!r.next(line)) r.fail(1, "missing header \"T N_I\"");
    const auto head = split_ws(line);
    std::size_t T = 0;
    std::size_t ni = 0;
    if (head.size() != 2 || !parse_number(head[0], T) || !parse_number(head[1], ni)) {
      r.fail(1, "malformed header, expected \"T N_I\"");
    }
    if (T == 0 || ni == 0) r.fail(1, "header dimensions must be positive");
    seq.frames = Mat(T, ni);
    for (std::size_t t = 0; t < T; ++t) {
      if (!r.next(line)) {
        r.fail(t + 2, "expected " + std::to_string(T) + " rows, found " + std::to_string(t));
      }
      const auto toks = split_ws(line);
      if (toks.size() != ni) {
        r.fail(r.line(), "expected " + std::to_string(ni) + " values, found " + std::to_string(toks.size()));
      }
      auto row = seq.frames.row(t);
      for (std::size_t j = 0; j < ni; ++j) {
        if (!parse_number(toks[j], row[j]) || !std::isfinite(row[j])) {
          r.fail(r.line(), "bad real \"" + std::string(toks[j]) + "\"");
        }
      }
    }
    if (!r.rest_blank()) r.fail(r.line(), "unexpected data after " + std::to_string(T) + " rows");
  }
  {
    LineReader r(labels);
    const std::size_t T = seq.frames.rows();
    seq.labels.reserve(T);
    std::string line;
    while (r.next(line)) {
      const auto toks = split_ws(line);
      if (toks.empty()) {
        if (r.rest_blank()) break;
        r.fail(r.line(), "blank line inside label list");
      }
      if (seq.labels.size() == T) r.fail(r.line(), "more than " + std::to_string(T) + " labels");
      std::size_t label = 0;
      if (toks.size() != 1 || !parse_number(toks[0], label)) r.fail(r.line(), "expected one integer label");
      if (label >= n_classes) {
        r.fail(r.line(), "label " + std::to_string(label) + " out of range [0, " + std::to_string(n_classes) + ")");
      }
      seq.labels.push_back(label);
    }
    if (seq.labels.size() != T) {
      r.fail(seq.labels.size() + 1, "expected " + std::to_string(T) + " labels, found " + std::to_string(seq.labels.size()));
    }
  }
  return seq;
}

void save_sequence(const fs::path& features, const fs::path& labels, const Sequence& seq) {
  {
    auto out = open_out(features);
    out << seq.frames.rows() << ' ' << seq.frames.cols() << '\n';
    for (std::size_t t = 0; t < seq.frames.rows(); ++t) {
      const auto row = seq.frames.row(t);
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_real(row[j]);
      out << '\n';
    }
    finish(out, features);
  }
  {
    auto out = open_out(labels);
    for (std::size_t label : seq.labels) out << label << '\n';
    finish(out, labels);
  }
}

Manifest load_manifest(const fs::path& path) {
  LineReader r(path);
  Manifest m;
  std::string line;
  auto expect_kv = [&](std::string_view key, std::size_t& value) {
    if (!r.next(line)) r.fail(r.line() + 1, "missing \"" + std::string(key) + "\"");
    const auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != key || !parse_number(toks[1], value) || value == 0) {
      r.fail(r.line(), "expected \"" + std::string(key) + " <positive integer>\"");
    }
  };
  if (!r.next(line) || split_ws(line) != std::vector<std::string_view>{"esrnn-manifest", "1"}) {
    r.fail(1, "expected header \"esrnn-manifest 1\"");
  }
  expect_kv("n_inputs", m.n_inputs);
  expect_kv("n_outputs", m.n_outputs);
  const fs::path base = path.parent_path();
  while (r.next(line)) {
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) r.fail(r.line(), "expected \"<features> <labels>\"");
    ManifestEntry e{fs::path(std::string(toks[0])), fs::path(std::string(toks[1]))};
    if (e.features.is_relative()) e.features = base / e.features;
    if (e.labels.is_relative()) e.labels = base / e.labels;
    if (!fs::exists(e.features)) r.fail(r.line(), "missing file " + e.features.string());
    if (!fs::exists(e.labels)) r.fail(r.line(), "missing file " + e.labels.string());
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) r.fail(r.line(), "manifest lists no sequences");
  return m;
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  auto out = open_out(path);
  out << "esrnn-manifest 1\n"
      << "n_inputs " << manifest.n_inputs << '\n'
      << "n_outputs " << manifest.n_outputs << '\n';
  for (const auto& e : manifest.entries) out << e.features.generic_string() << ' ' << e.labels.generic_string() << '\n';
  finish(out, path);
}

std::vector<Sequence> load_dataset(const Manifest& manifest) {
  std::vector<Sequence> data;
  data.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    Sequence seq = load_sequence(e.features, e.labels, manifest.n_outputs);
    if (seq.input_dim() != manifest.n_inputs) {
      throw LoadError(e.features.string(), 1,
                      "N_I=" + std::to_string(seq.input_dim()) + " but manifest declares n_inputs=" +
                          std::to_string(manifest.n_inputs));
    }
    data.push_back(std::move(seq));
  }
  return data;
}

// ---------------------------------------------------------------------------
// Checkpoints

const char* to_string(CheckpointErrorKind kind) {
  switch (kind) {
    case CheckpointErrorKind::io: return "io";
    case CheckpointErrorKind::bad_magic: return "bad_magic";
    case CheckpointErrorKind::bad_version: return "bad_version";
    case CheckpointErrorKind::bad_length: return "bad_length";
    case CheckpointErrorKind::bad_checksum: return "bad_checksum";
    case CheckpointErrorKind::bad_dims: return "bad_dims";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'E', 'S', 'R', 'N'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 7 * 4;
constexpr std::uint32_t kMaxDim = 1u << 20;
constexpr std::uint32_t kMaxDelta = 1u << 16;

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(std::span<const double> xs) {
    for (double x : xs) u64(std::bit_cast<std::uint64_t>(x));
  }
  std::vector<std::uint8_t> bytes;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  void f64(std::span<double> xs) {
    for (double& x : xs) x = std::bit_cast<double>(u64());
  }
  std::size_t pos() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::uint64_t byte_sum(std::span<const std::uint8_t> b) {
  std::uint64_t s = 0;
  for (std::uint8_t x : b) s += x;
  return s;
}

std::uint32_t narrow_dim(std::size_t v, const char* what) {
  if (v == 0 || v > kMaxDim) {
    throw CheckpointError(CheckpointErrorKind::bad_dims, std::string("checkpoint: invalid ") + what);
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  c.params.validate();
  const std::size_t n = c.params.hidden();
  if (c.params.inputs_eff() != c.cfg.augmented_inputs(c.n_inputs)) {
    throw CheckpointError(CheckpointErrorKind::bad_dims, "checkpoint: Wi width does not match window * n_inputs");
  }
  if (c.lambda.size() != n) throw CheckpointError(CheckpointErrorKind::bad_dims, "checkpoint: lambda length mismatch");

  ByteWriter w;
  w.bytes.insert(w.bytes.end(), kMagic.begin(), kMagic.end());
  w.u32(c.version);
  w.u32(narrow_dim(n, "N"));
  w.u32(narrow_dim(c.n_inputs, "N_I"));
  w.u32(narrow_dim(c.params.outputs(), "N_o"));
  if (c.cfg.delta1 > kMaxDelta || c.cfg.delta2 > kMaxDelta) {
    throw CheckpointError(CheckpointErrorKind::bad_dims, "checkpoint: window order too large");
  }
  w.u32(static_cast<std::uint32_t>(c.cfg.delta1));
  w.u32(static_cast<std::uint32_t>(c.cfg.delta2));
  w.u32(static_cast<std::uint32_t>(c.cfg.nonlin));
  w.u32(static_cast<std::uint32_t>(c.cfg.head));
  w.f64(c.params.W.data());
  w.f64(c.params.Wi.data());
  w.f64(c.params.U.data());
  w.f64(c.params.b.span());
  w.f64(c.lambda.span());
  w.u64(c.iteration);
  w.u64(byte_sum(w.bytes));
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  using K = CheckpointErrorKind;
  if (bytes.size() < 4) throw CheckpointError(K::bad_length, "checkpoint: file too short for magic");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw CheckpointError(K::bad_magic, "checkpoint: bad magic bytes");
  }
  if (bytes.size() < 8) throw CheckpointError(K::bad_length, "checkpoint: file too short for version");
  ByteReader r(bytes);
  r.u32();
  Checkpoint c;
  c.version = r.u32();
  if (c.version != kCheckpointVersion) {
    throw CheckpointError(K::bad_version, "checkpoint: unsupported version " + std::to_string(c.version));
  }
  if (bytes.size() < kHeaderBytes) throw CheckpointError(K::bad_length, "checkpoint: truncated header");

  const std::uint32_t n = r.u32();
  const std::uint32_t ni = r.u32();
  const std::uint32_t no = r.u32();
  const std::uint32_t d1 = r.u32();
  const std::uint32_t d2 = r.u32();
  const std::uint32_t nonlin = r.u32();
  const std::uint32_t head = r.u32();
  if (n == 0 || ni == 0 || no == 0 || n > kMaxDim || ni > kMaxDim || no > kMaxDim || d1 > kMaxDelta ||
      d2 > kMaxDelta || nonlin > 1 || head > 1) {
    throw CheckpointError(K::bad_dims, "checkpoint: invalid dimensions or tags in header");
  }
  c.cfg = ArmaConfig{d1, d2, static_cast<Nonlinearity>(nonlin), static_cast<OutputHead>(head)};
  c.n_inputs = ni;
  // With every dim <= 2^20 and window <= 2^17 the byte count fits in 64 bits.
  const std::uint64_t eff = static_cast<std::uint64_t>(c.cfg.window()) * ni;
  const std::uint64_t reals = std::uint64_t{n} * n + std::uint64_t{n} * eff + std::uint64_t{no} * n + 2 * std::uint64_t{n};
  const std::uint64_t expected = kHeaderBytes + 8 * reals + 16;
  if (expected != bytes.size()) {
    throw CheckpointError(K::bad_length, "checkpoint: expected " + std::to_string(expected) + " bytes, found " +
                                             std::to_string(bytes.size()));
  }
  const std::size_t body = bytes.size() - 8;
  ByteReader tail(bytes.subspan(body));
  if (tail.u64() != byte_sum(bytes.first(body))) {
    throw CheckpointError(K::bad_checksum, "checkpoint: checksum mismatch");
  }

  c.params = ModelParams::zeros(n, static_cast<std::size_t>(eff), no);
  c.lambda = Vec(n);
  r.f64(c.params.W.data());
  r.f64(c.params.Wi.data());
  r.f64(c.params.U.data());
  r.f64(c.params.b.span());
  r.f64(c.lambda.span());
  c.iteration = r.u64();
  return c;
}

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  const auto bytes = encode_checkpoint(ckpt);
  try {
    auto out = open_out(path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    finish(out, path);
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(CheckpointErrorKind::io, e.what());
  }
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointErrorKind::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report log

namespace {
constexpr std::string_view kReportHeader =
    "epoch,mean_cost,frame_error,inf_norm_W,max_lambda,mean_lambda,clip_events,wall_ms";

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace

void write_report_log(const fs::path& path, std::span<const TrainReport> reports) {
  auto out = open_out(path);
  out << kReportHeader << '\n';
  for (const auto& r : reports) {
    out << r.epoch << ',' << g12(r.mean_cost) << ',' << g12(r.frame_error) << ',' << g12(r.inf_norm_W)
        << ',' << g12(r.max_lambda) << ',' << g12(r.mean_lambda) << ',' << r.clip_events << ','
        << g12(r.wall_ms) << '\n';
  }
  finish(out, path);
}

std::vector<TrainReport> read_report_log(const fs::path& path) {
  LineReader r(path);
  std::string line;
  if (!r.next(line) || line != kReportHeader) r.fail(1, "missing report header");
  std::vector<TrainReport> out;
  while (r.next(line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      f.push_back(rest.substr(0, pos));
    }
    f.push_back(rest);
    TrainReport t;
    if (f.size() != 8 || !parse_number(f[0], t.epoch) || !parse_number(f[1], t.mean_cost) ||
        !parse_number(f[2], t.frame_error) || !parse_number(f[3], t.inf_norm_W) ||
        !parse_number(f[4], t.max_lambda) || !parse_number(f[5], t.mean_lambda) ||
        !parse_number(f[6], t.clip_events) || !parse_number(f[7], t.wall_ms)) {
      r.fail(r.line(), "malformed report row");
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace esrnn

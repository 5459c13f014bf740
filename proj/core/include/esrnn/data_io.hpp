#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "esrnn/model.hpp"
#include "esrnn/training.hpp"

namespace esrnn {

namespace fs = std::filesystem;

// Feature file: header "T N_I", then T lines of N_I reals.
// Label file: T lines, one integer class index each.
Sequence load_sequence(const fs::path& features, const fs::path& labels, std::size_t n_classes);
void save_sequence(const fs::path& features, const fs::path& labels, const Sequence& seq);

struct ManifestEntry {
  fs::path features;
  fs::path labels;
};

/// Dataset listing. Relative paths resolve against the manifest's directory.
///
///   esrnn-manifest 1
///   n_inputs <N_I>
///   n_outputs <N_o>
///   <features> <labels>
///   ...
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::size_t n_inputs = 0;
  std::size_t n_outputs = 0;
};

Manifest load_manifest(const fs::path& path);
void save_manifest(const fs::path& path, const Manifest& manifest);
/// Loads every listed sequence and checks it against the declared dims.
std::vector<Sequence> load_dataset(const Manifest& manifest);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  ArmaConfig cfg;
  std::size_t n_inputs = 0;  // raw N_I; Wi has window() * n_inputs columns
  ModelParams params;
  Vec lambda;
  std::uint64_t iteration = 0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

enum class CheckpointErrorKind { io, bad_magic, bad_version, bad_length, bad_checksum, bad_dims };

const char* to_string(CheckpointErrorKind kind);

class CheckpointError : public std::runtime_error {
 public:
  CheckpointError(CheckpointErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  CheckpointErrorKind kind() const noexcept { return kind_; }

 private:
  CheckpointErrorKind kind_;
};

// Layout, all integers and reals little-endian:
//   "ESRN" | u32 version | u32 N, N_I, N_o, delta1, delta2, nonlin, head
//   | f64 W, Wi, U, b, lambda (row-major) | u64 iteration
//   | u64 sum of all preceding bytes mod 2^64
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const fs::path& path);

/// CSV with a header row and one row per epoch, reals at 12 significant digits.
void write_report_log(const fs::path& path, std::span<const TrainReport> reports);
std::vector<TrainReport> read_report_log(const fs::path& path);

}  // namespace esrnn

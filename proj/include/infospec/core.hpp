#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace infospec {

enum class Errc {
  kZeroSpectrum,
  kNonFinite,
  kWindowOutOfRange,
  kGridTooSmall,
  kGridMismatch,
  kEmptyLibrary,
  kInvalidLibrary,
  kNonPositiveThreshold,
  kBinOutOfRange,
  kInvalidArgument,
  kLengthMismatch,
  kZeroVariance,
  kDimensionMismatch,
  kEmptySamples,
  kDegenerateRange,
  kNonOneHotTarget,
  kTOutOfRange,
  kParse,
  kIo,
};

std::string_view to_string(Errc code);

/// All library failures are reported through this exception. The message is
/// prefixed with the error-code name so CLI users can grep for it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

struct PpmInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double ppm) const { return ppm >= lo && ppm <= hi; }
  bool operator==(const PpmInterval&) const = default;
};

/// Uniform chemical-shift axis. Channel c sits at
/// start + c * (end - start) / (n - 1); start may exceed end (descending axis).
class PpmGrid {
 public:
  PpmGrid(double start_ppm, double end_ppm, std::size_t n_channels);

  double start_ppm() const { return start_; }
  double end_ppm() const { return end_; }
  std::size_t size() const { return n_; }
  double step() const { return (end_ - start_) / static_cast<double>(n_ - 1); }
  double ppm_at(std::size_t channel) const;
  double lo() const;
  double hi() const;
  PpmInterval window() const { return {lo(), hi()}; }

  /// Channel whose ppm is closest to `ppm` (clamped to the grid).
  std::size_t nearest_channel(double ppm) const;

  bool operator==(const PpmGrid&) const = default;

 private:
  double start_;
  double end_;
  std::size_t n_;
};

/// Intensity vector on a grid. Construction only enforces the length; finiteness
/// is checked where it matters (normalization, library validation).
class Spectrum {
 public:
  Spectrum(PpmGrid grid, std::vector<double> intensities);

  const PpmGrid& grid() const { return grid_; }
  std::span<const double> values() const { return intensities_; }
  std::size_t size() const { return intensities_.size(); }
  double operator[](std::size_t c) const { return intensities_[c]; }
  bool all_finite() const;

 private:
  PpmGrid grid_;
  std::vector<double> intensities_;
};

/// Spectra per class, in library order.
class ClassMultiplicities {
 public:
  explicit ClassMultiplicities(std::vector<std::size_t> counts);

  std::span<const std::size_t> counts() const { return counts_; }
  std::size_t n_classes() const { return counts_.size(); }
  std::size_t total() const { return total_; }
  /// Class index of the i-th spectrum.
  std::size_t class_of(std::size_t index) const;

 private:
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

struct LibraryEntry {
  std::string label;
  Spectrum spectrum;
};

class SpectrumLibrary {
 public:
  explicit SpectrumLibrary(PpmGrid grid, std::vector<LibraryEntry> entries = {});

  const PpmGrid& grid() const { return grid_; }
  std::span<const LibraryEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const LibraryEntry& operator[](std::size_t i) const { return entries_[i]; }

  void add(std::string label, Spectrum spectrum);

  /// Run-length encoding of the label column. Only meaningful for a library
  /// whose classes are contiguous.
  ClassMultiplicities multiplicities() const;
  std::vector<std::string> class_labels() const;

 private:
  PpmGrid grid_;
  std::vector<LibraryEntry> entries_;
};

enum class ViolationKind { kGridMismatch, kNonContiguousClass, kNonFinite };

struct LibraryViolation {
  ViolationKind kind;
  std::size_t entry;
  std::string detail;
};

std::string_view to_string(ViolationKind kind);

/// Divides by the Euclidean norm so the result has unit 2-norm.
Spectrum vector_normalize(const Spectrum& s);
std::vector<double> vector_normalize(std::span<const double> values);

/// Piecewise-linear resampling onto `target`. The target window must lie inside
/// the source window.
Spectrum resample(const Spectrum& s, const PpmGrid& target);

std::vector<LibraryViolation> validate_library(const SpectrumLibrary& lib);

/// Throws kInvalidLibrary (or kEmptyLibrary) describing the first violation.
void require_valid(const SpectrumLibrary& lib);

SpectrumLibrary resample(const SpectrumLibrary& lib, const PpmGrid& target);

}  // namespace infospec

#include "infospec/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace infospec {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kZeroSpectrum: return "ZeroSpectrum";
    case Errc::kNonFinite: return "NonFinite";
    case Errc::kWindowOutOfRange: return "WindowOutOfRange";
    case Errc::kGridTooSmall: return "GridTooSmall";
    case Errc::kGridMismatch: return "GridMismatch";
    case Errc::kEmptyLibrary: return "EmptyLibrary";
    case Errc::kInvalidLibrary: return "InvalidLibrary";
    case Errc::kNonPositiveThreshold: return "NonPositiveThreshold";
    case Errc::kBinOutOfRange: return "BinOutOfRange";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kZeroVariance: return "ZeroVariance";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kEmptySamples: return "EmptySamples";
    case Errc::kDegenerateRange: return "DegenerateRange";
    case Errc::kNonOneHotTarget: return "NonOneHotTarget";
    case Errc::kTOutOfRange: return "TOutOfRange";
    case Errc::kParse: return "Parse";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

// --- PpmGrid -----------------------------------------------------------------

PpmGrid::PpmGrid(double start_ppm, double end_ppm, std::size_t n_channels)
    : start_(start_ppm), end_(end_ppm), n_(n_channels) {
  if (n_ < 2) throw Error(Errc::kGridTooSmall, "grid needs at least 2 channels");
  if (!std::isfinite(start_) || !std::isfinite(end_))
    throw Error(Errc::kNonFinite, "grid bounds must be finite");
  if (start_ == end_) throw Error(Errc::kInvalidArgument, "grid start and end coincide");
}

double PpmGrid::ppm_at(std::size_t channel) const {
  if (channel + 1 == n_) return end_;
  return start_ + static_cast<double>(channel) * step();
}

double PpmGrid::lo() const { return std::min(start_, end_); }
double PpmGrid::hi() const { return std::max(start_, end_); }

std::size_t PpmGrid::nearest_channel(double ppm) const {
  const double pos = (ppm - start_) / step();
  if (pos <= 0.0) return 0;
  const auto c = static_cast<std::size_t>(std::llround(pos));
  return std::min(c, n_ - 1);
}

// --- Spectrum ----------------------------------------------------------------

Spectrum::Spectrum(PpmGrid grid, std::vector<double> intensities)
    : grid_(grid), intensities_(std::move(intensities)) {
  if (intensities_.size() != grid_.size())
    throw Error(Errc::kLengthMismatch, "spectrum has " + std::to_string(intensities_.size()) +
                                           " values for a " + std::to_string(grid_.size()) +
                                           "-channel grid");
}

bool Spectrum::all_finite() const {
  return std::all_of(intensities_.begin(), intensities_.end(),
                     [](double v) { return std::isfinite(v); });
}

// --- ClassMultiplicities -----------------------------------------------------

ClassMultiplicities::ClassMultiplicities(std::vector<std::size_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) throw Error(Errc::kInvalidArgument, "no classes");
  for (auto c : counts_) {
    if (c == 0) throw Error(Errc::kInvalidArgument, "class multiplicity must be >= 1");
    total_ += c;
  }
}

std::size_t ClassMultiplicities::class_of(std::size_t index) const {
  std::size_t end = 0;
  for (std::size_t m = 0; m < counts_.size(); ++m) {
    end += counts_[m];
    if (index < end) return m;
  }
  throw Error(Errc::kInvalidArgument, "index beyond multiplicity total");
}

// --- SpectrumLibrary ---------------------------------------------------------

SpectrumLibrary::SpectrumLibrary(PpmGrid grid, std::vector<LibraryEntry> entries)
    : grid_(grid), entries_(std::move(entries)) {}

void SpectrumLibrary::add(std::string label, Spectrum spectrum) {
  entries_.push_back({std::move(label), std::move(spectrum)});
}

ClassMultiplicities SpectrumLibrary::multiplicities() const {
  if (entries_.empty()) throw Error(Errc::kEmptyLibrary, "library has no entries");
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == 0 || entries_[i].label != entries_[i - 1].label)
      counts.push_back(1);
    else
      ++counts.back();
  }
  return ClassMultiplicities(std::move(counts));
}

std::vector<std::string> SpectrumLibrary::class_labels() const {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (i == 0 || entries_[i].label != entries_[i - 1].label) labels.push_back(entries_[i].label);
  return labels;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kGridMismatch: return "GridMismatch";
    case ViolationKind::kNonContiguousClass: return "NonContiguousClass";
    case ViolationKind::kNonFinite: return "NonFinite";
  }
  return "Unknown";
}

std::vector<LibraryViolation> validate_library(const SpectrumLibrary& lib) {
  std::vector<LibraryViolation> out;
  std::set<std::string> closed;
  const auto entries = lib.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!(e.spectrum.grid() == lib.grid()))
      out.push_back({ViolationKind::kGridMismatch, i, "entry grid differs from library grid"});
    if (!e.spectrum.all_finite())
      out.push_back({ViolationKind::kNonFinite, i, "entry '" + e.label + "' has NaN/Inf"});
    if (i > 0 && e.label != entries[i - 1].label) {
      closed.insert(entries[i - 1].label);
      if (closed.contains(e.label))
        out.push_back({ViolationKind::kNonContiguousClass, i,
                       "class '" + e.label + "' reappears after another class"});
    }
  }
  return out;
}

void require_valid(const SpectrumLibrary& lib) {
  if (lib.empty()) throw Error(Errc::kEmptyLibrary, "library has no entries");
  const auto violations = validate_library(lib);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(Errc::kInvalidLibrary, std::string(to_string(v.kind)) + " at entry " +
                                           std::to_string(v.entry) + ": " + v.detail);
  }
}

// --- normalization -----------------------------------------------------------

std::vector<double> vector_normalize(std::span<const double> values) {
  double sum_sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::kNonFinite, "spectrum contains NaN/Inf");
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) throw Error(Errc::kZeroSpectrum, "cannot normalize an all-zero spectrum");
  const double norm = std::sqrt(sum_sq);
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [norm](double v) { return v / norm; });
  return out;
}

Spectrum vector_normalize(const Spectrum& s) {
  return Spectrum(s.grid(), vector_normalize(s.values()));
}

// --- resampling --------------------------------------------------------------

Spectrum resample(const Spectrum& s, const PpmGrid& target) {
  const PpmGrid& src = s.grid();
  if (src == target) return s;
  // Rounding slack so that identical windows expressed differently still pass.
  const double slack = 1e-9 * std::max(1.0, std::abs(src.hi()));
  if (target.lo() < src.lo() - slack || target.hi() > src.hi() + slack)
    throw Error(Errc::kWindowOutOfRange, "target window [" + std::to_string(target.lo()) + ", " +
                                             std::to_string(target.hi()) +
                                             "] exceeds source window");
  if (!s.all_finite()) throw Error(Errc::kNonFinite, "source spectrum contains NaN/Inf");

  const auto y = s.values();
  const std::size_t last = src.size() - 1;
  std::vector<double> out(target.size());
  for (std::size_t c = 0; c < target.size(); ++c) {
    const double pos = std::clamp((target.ppm_at(c) - src.start_ppm()) / src.step(), 0.0,
                                  static_cast<double>(last));
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= last) i = last - 1;
    const double frac = pos - static_cast<double>(i);
    out[c] = frac == 0.0 ? y[i] : y[i] + frac * (y[i + 1] - y[i]);
  }
  return Spectrum(target, std::move(out));
}

SpectrumLibrary resample(const SpectrumLibrary& lib, const PpmGrid& target) {
  SpectrumLibrary out(target);
  for (const auto& e : lib.entries()) out.add(e.label, resample(e.spectrum, target));
  return out;
}

}  // namespace infospec

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "infospec/core.hpp"

namespace infospec {

/// Per-channel intensity extremes across a library.
struct ChannelEnvelope {
  std::vector<double> mins;
  std::vector<double> maxs;

  std::size_t size() const { return mins.size(); }
};

/// Bin populations for one channel; `total` is the number of library spectra.
struct ChannelHistogram {
  std::vector<std::uint32_t> counts;
  std::uint32_t total = 0;

  std::size_t n_bins() const { return counts.size(); }
};

struct FitModel {
  PpmGrid grid;
  double max_threshold;
  std::size_t n_bins;
  bool suppress_solvent;
  /// Envelope of the clipped, renormalized training spectra (histogram edges).
  ChannelEnvelope envelope;
  std::vector<ChannelHistogram> histograms;
};

struct InformationSpectrum {
  PpmGrid grid;
  std::vector<double> info;
};

struct FitOptions {
  std::size_t n_bins = 11;
  /// Maximum threshold; when unset it is derived with suggest_threshold().
  std::optional<double> threshold;
  bool suppress_solvent = true;
  /// Windows excluded when suggesting a threshold (water at 4.7 ppm by default).
  std::vector<PpmInterval> solvent_windows = {{4.6, 4.8}};
};

inline constexpr double kThresholdSafetyFactor = 1.05;

ChannelEnvelope compute_envelope(const SpectrumLibrary& lib);
ChannelEnvelope compute_envelope(std::span<const std::vector<double>> spectra);

/// Zeroes every point strictly above `threshold`; everything else is kept.
Spectrum clip_threshold(const Spectrum& s, double threshold);
std::vector<double> clip_threshold(std::span<const double> values, double threshold);

/// Lowest level that spares every peak outside the solvent windows: the largest
/// envelope maximum outside them, times kThresholdSafetyFactor.
double suggest_threshold(const ChannelEnvelope& env, const PpmGrid& grid,
                         std::span<const PpmInterval> solvent_windows);

/// floor((value - min) / (max - min) * n_bins), clamped into [0, n_bins).
/// A degenerate range (max == min) maps to bin 0.
std::size_t bin_index(double value, double min, double max, std::size_t n_bins);

/// 1 - counts[k] / total.
double information_content(std::size_t k, const ChannelHistogram& h);

FitModel fit_train(const SpectrumLibrary& lib, const FitOptions& options = {});

/// Applies the training preamble (normalize, clip, renormalize) to `s` and maps
/// each channel to its information content.
InformationSpectrum fit_apply(const FitModel& model, const Spectrum& s);

/// Spectrum after the per-spectrum preprocessing that precedes binning.
std::vector<double> fit_preprocess(const FitModel& model, const Spectrum& s);

/// Marks the `top_fraction` highest-mean-information channels over `lib`, merges
/// adjacent ones, and returns the intervals ordered by mean information
/// (descending).
std::vector<PpmInterval> hot_regions(const FitModel& model, const SpectrumLibrary& lib,
                                     double top_fraction);

}  // namespace infospec

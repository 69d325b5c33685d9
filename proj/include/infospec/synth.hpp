#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infospec/core.hpp"

namespace infospec {

/// Lorentzian line: amplitude at center, half-width at half-maximum in ppm.
struct PeakSpec {
  double center_ppm = 0.0;
  double amplitude = 0.0;
  double width_ppm = 0.0;

  bool operator==(const PeakSpec&) const = default;
};

struct ClassSpec {
  std::string label;
  std::vector<PeakSpec> peaks;

  bool operator==(const ClassSpec&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Range&) const = default;
};

struct CountRange {
  std::size_t lo = 4;
  std::size_t hi = 10;
};

inline constexpr PpmInterval kAnomericWindow{4.5, 5.5};
inline constexpr PpmInterval kHumpWindow{3.3, 4.3};

/// Water line guard band kept free of analyte peaks by default.
inline constexpr PpmInterval kDefaultExcludedArr[] = {{4.6, 4.8}};
inline constexpr std::span<const PpmInterval> kDefaultExcluded{kDefaultExcludedArr};

/// Per-spectrum corruptions layered on a class template. Widths and the drift
/// coefficients are in the same units as peak amplitudes.
struct VariationConfig {
  Range concentration{0.5, 2.0};
  double shift_jitter_ppm = 0.001;
  /// Noise standard deviation relative to the largest analyte amplitude.
  double noise_sigma = 0.01;
  Range drift_coeff_range{-0.05, 0.05};
  std::size_t drift_degree = 3;
  double solvent_amplitude_factor = 1000.0;
  double solvent_ppm = 4.7;
  bool include_solvent = true;
  /// Per-acquisition solvent line width (shimming) and extra amplitude factor.
  Range solvent_width_ppm{0.003, 0.008};
  Range solvent_amplitude_jitter{1.1, 2.0};
  /// Analyte lines are truncated beyond this many half-widths from center.
  double peak_cutoff_widths = 10.0;
};

/// Everything gen_spectrum adds together, kept apart for inspection.
struct SpectrumComponents {
  std::vector<double> analyte;
  std::vector<double> solvent;
  std::vector<double> baseline;
  std::vector<double> noise;
  double concentration = 1.0;
  /// Largest concentration-scaled analyte amplitude.
  double max_analyte_amplitude = 0.0;
  std::vector<PeakSpec> placed_peaks;
};

/// sum_j b_j t^j (1 - t)^(M - j), M = coeffs.size() - 1, without binomial
/// weights.
double bernstein_baseline(std::span<const double> coeffs, double t);

double lorentzian(double ppm, const PeakSpec& peak);

/// Class templates with peaks in the anomeric and hump windows, avoiding
/// `excluded` (the water line by default). Every pair of classes differs in at
/// least one peak center by more than 3 widths.
std::vector<ClassSpec> gen_class_specs(std::size_t n_classes, CountRange peaks_per_class,
                                       std::uint64_t seed,
                                       std::span<const PpmInterval> excluded = kDefaultExcluded);

/// True when some peak of one class is more than 3 widths from every peak
/// center of the other.
bool classes_distinct(const ClassSpec& a, const ClassSpec& b);

SpectrumComponents gen_components(const ClassSpec& spec, const VariationConfig& var,
                                   const PpmGrid& grid, std::uint64_t seed);
Spectrum gen_spectrum(const ClassSpec& spec, const VariationConfig& var, const PpmGrid& grid,
                      std::uint64_t seed);

SpectrumLibrary gen_library(std::size_t n_classes, const ClassMultiplicities& multiplicities,
                            const VariationConfig& var, const PpmGrid& grid, std::uint64_t seed,
                            CountRange peaks_per_class = {});

/// Same as gen_library, also returning the class templates used.
struct GeneratedLibrary {
  SpectrumLibrary library;
  std::vector<ClassSpec> classes;
};
GeneratedLibrary gen_library_detailed(std::size_t n_classes, const ClassMultiplicities& multiplicities,
                                      const VariationConfig& var, const PpmGrid& grid,
                                      std::uint64_t seed, CountRange peaks_per_class = {});

/// Nineteen classes of 4 spectra followed by four singletons (80 spectra).
ClassMultiplicities reference_multiplicities();

/// 1.0 - 5.5 ppm at `n_channels` points.
PpmGrid default_grid(std::size_t n_channels = 5000);

}  // namespace infospec

#include "infospec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "infospec/rng.hpp"

namespace infospec {

namespace {

constexpr Range kAmplitudeRange{0.3, 1.0};
constexpr Range kWidthRange{0.002, 0.01};
constexpr int kMaxClassAttempts = 10000;

void check_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw Error(Errc::kInvalidArgument, std::string(name) + " range is empty or non-finite");
}

void check_variation(const VariationConfig& var) {
  check_range(var.concentration, "concentration");
  check_range(var.drift_coeff_range, "drift coefficient");
  check_range(var.solvent_width_ppm, "solvent width");
  check_range(var.solvent_amplitude_jitter, "solvent amplitude jitter");
  if (!(var.concentration.lo > 0.0))
    throw Error(Errc::kInvalidArgument, "concentration must be positive");
  if (!(var.shift_jitter_ppm >= 0.0) || !(var.noise_sigma >= 0.0))
    throw Error(Errc::kInvalidArgument, "jitter and noise must be >= 0");
  if (!(var.solvent_amplitude_factor >= 1.0))
    throw Error(Errc::kInvalidArgument, "solvent_amplitude_factor must be >= 1");
  if (!(var.solvent_width_ppm.lo > 0.0))
    throw Error(Errc::kInvalidArgument, "solvent width must be positive");
  if (!(var.solvent_amplitude_jitter.lo >= 1.0))
    throw Error(Errc::kInvalidArgument, "solvent amplitude jitter must be >= 1");
  if (!(var.peak_cutoff_widths > 0.0))
    throw Error(Errc::kInvalidArgument, "peak cutoff must be positive");
}

double sample_center(Rng& rng) {
  // The two windows have equal length; pick a point on their union.
  const double u = rng.uniform(0.0, 2.0);
  return u < 1.0 ? kAnomericWindow.lo + u : kHumpWindow.lo + (u - 1.0);
}

bool peak_isolated(const PeakSpec& p, const ClassSpec& other) {
  return std::all_of(other.peaks.begin(), other.peaks.end(), [&](const PeakSpec& q) {
    return std::abs(p.center_ppm - q.center_ppm) > 3.0 * std::max(p.width_ppm, q.width_ppm);
  });
}

}  // namespace

double bernstein_baseline(std::span<const double> coeffs, double t) {
  if (coeffs.empty()) throw Error(Errc::kInvalidArgument, "at least one coefficient is required");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::kTOutOfRange, "t must lie in [0, 1]");
  const int m = static_cast<int>(coeffs.size()) - 1;
  double sum = 0.0;
  for (int j = 0; j <= m; ++j) sum += coeffs[j] * std::pow(t, j) * std::pow(1.0 - t, m - j);
  return sum;
}

double lorentzian(double ppm, const PeakSpec& peak) {
  const double w2 = peak.width_ppm * peak.width_ppm;
  const double d = ppm - peak.center_ppm;
  return peak.amplitude * w2 / (w2 + d * d);
}

bool classes_distinct(const ClassSpec& a, const ClassSpec& b) {
  return std::any_of(a.peaks.begin(), a.peaks.end(), [&](const PeakSpec& p) { return peak_isolated(p, b); }) ||
         std::any_of(b.peaks.begin(), b.peaks.end(), [&](const PeakSpec& p) { return peak_isolated(p, a); });
}

std::vector<ClassSpec> gen_class_specs(std::size_t n_classes, CountRange peaks_per_class,
                                       std::uint64_t seed, std::span<const PpmInterval> excluded) {
  if (n_classes < 1) throw Error(Errc::kInvalidArgument, "n_classes must be >= 1");
  if (peaks_per_class.lo < 1 || peaks_per_class.lo > peaks_per_class.hi)
    throw Error(Errc::kInvalidArgument, "peaks_per_class must be a non-empty range starting at >= 1");

  Rng rng(seed);
  std::vector<ClassSpec> specs;
  specs.reserve(n_classes);
  for (std::size_t m = 0; m < n_classes; ++m) {
    char label[32];
    std::snprintf(label, sizeof label, "C%02zu", m + 1);
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxClassAttempts)
        throw Error(Errc::kInvalidArgument, "could not place a distinct class " + std::string(label));
      ClassSpec spec{label, {}};
      const auto n_peaks = rng.integer(peaks_per_class.lo, peaks_per_class.hi);
      while (spec.peaks.size() < n_peaks) {
        PeakSpec p;
        p.center_ppm = sample_center(rng);
        p.amplitude = rng.uniform(kAmplitudeRange.lo, kAmplitudeRange.hi);
        p.width_ppm = rng.uniform(kWidthRange.lo, kWidthRange.hi);
        const bool blocked = std::any_of(excluded.begin(), excluded.end(),
                                         [&](const PpmInterval& w) { return w.contains(p.center_ppm); });
        if (!blocked) spec.peaks.push_back(p);
      }
      const bool distinct = std::all_of(specs.begin(), specs.end(),
                                        [&](const ClassSpec& o) { return classes_distinct(spec, o); });
      if (distinct) {
        specs.push_back(std::move(spec));
        break;
      }
    }
  }
  return specs;
}

SpectrumComponents gen_components(const ClassSpec& spec, const VariationConfig& var,
                                  const PpmGrid& grid, std::uint64_t seed) {
  check_variation(var);
  if (spec.peaks.empty()) throw Error(Errc::kInvalidArgument, "class '" + spec.label + "' has no peaks");
  const std::size_t n = grid.size();
  Rng rng(seed);
  SpectrumComponents out;
  out.analyte.assign(n, 0.0);
  out.solvent.assign(n, 0.0);
  out.baseline.assign(n, 0.0);
  out.noise.assign(n, 0.0);

  out.concentration = rng.uniform(var.concentration.lo, var.concentration.hi);
  for (const auto& p : spec.peaks) {
    PeakSpec placed = p;
    placed.center_ppm += rng.uniform(-var.shift_jitter_ppm, var.shift_jitter_ppm);
    placed.amplitude *= out.concentration;
    out.placed_peaks.push_back(placed);
    out.max_analyte_amplitude = std::max(out.max_analyte_amplitude, placed.amplitude);
    const double reach = var.peak_cutoff_widths * placed.width_ppm;
    for (std::size_t c = 0; c < n; ++c) {
      const double ppm = grid.ppm_at(c);
      if (std::abs(ppm - placed.center_ppm) <= reach) out.analyte[c] += lorentzian(ppm, placed);
    }
  }

  const double solvent_width = rng.uniform(var.solvent_width_ppm.lo, var.solvent_width_ppm.hi);
  const double solvent_scale =
      rng.uniform(var.solvent_amplitude_jitter.lo, var.solvent_amplitude_jitter.hi);
  if (var.include_solvent) {
    // Centered on a channel so the sampled maximum equals the line amplitude.
    const PeakSpec water{grid.ppm_at(grid.nearest_channel(var.solvent_ppm)),
                         var.solvent_amplitude_factor * out.max_analyte_amplitude * solvent_scale,
                         solvent_width};
    for (std::size_t c = 0; c < n; ++c) out.solvent[c] = lorentzian(grid.ppm_at(c), water);
  }

  std::vector<double> coeffs(var.drift_degree + 1);
  for (double& b : coeffs) b = rng.uniform(var.drift_coeff_range.lo, var.drift_coeff_range.hi);
  for (std::size_t c = 0; c < n; ++c)
    out.baseline[c] = bernstein_baseline(coeffs, static_cast<double>(c) / static_cast<double>(n - 1));

  const double sigma = var.noise_sigma * out.max_analyte_amplitude;
  for (std::size_t c = 0; c < n; ++c) out.noise[c] = sigma * rng.normal();
  return out;
}

Spectrum gen_spectrum(const ClassSpec& spec, const VariationConfig& var, const PpmGrid& grid,
                      std::uint64_t seed) {
  const auto parts = gen_components(spec, var, grid, seed);
  std::vector<double> values(grid.size());
  for (std::size_t c = 0; c < values.size(); ++c)
    values[c] = parts.analyte[c] + parts.solvent[c] + parts.baseline[c] + parts.noise[c];
  return Spectrum(grid, std::move(values));
}

GeneratedLibrary gen_library_detailed(std::size_t n_classes, const ClassMultiplicities& multiplicities,
                                      const VariationConfig& var, const PpmGrid& grid,
                                      std::uint64_t seed, CountRange peaks_per_class) {
  if (multiplicities.n_classes() != n_classes)
    throw Error(Errc::kInvalidArgument, std::to_string(multiplicities.n_classes()) +
                                            " multiplicities for " + std::to_string(n_classes) +
                                            " classes");
  GeneratedLibrary out{SpectrumLibrary(grid),
                       gen_class_specs(n_classes, peaks_per_class, Rng::derive(seed, 0))};
  std::uint64_t index = 0;
  for (std::size_t m = 0; m < n_classes; ++m) {
    for (std::size_t r = 0; r < multiplicities.counts()[m]; ++r) {
      out.library.add(out.classes[m].label,
                      gen_spectrum(out.classes[m], var, grid, Rng::derive(seed, ++index)));
    }
  }
  return out;
}

SpectrumLibrary gen_library(std::size_t n_classes, const ClassMultiplicities& multiplicities,
                            const VariationConfig& var, const PpmGrid& grid, std::uint64_t seed,
                            CountRange peaks_per_class) {
  return gen_library_detailed(n_classes, multiplicities, var, grid, seed, peaks_per_class).library;
}

ClassMultiplicities reference_multiplicities() {
  std::vector<std::size_t> counts(19, 4);
  counts.insert(counts.end(), 4, 1);
  return ClassMultiplicities(std::move(counts));
}

PpmGrid default_grid(std::size_t n_channels) { return PpmGrid(1.0, 5.5, n_channels); }

}  // namespace infospec

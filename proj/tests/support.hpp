#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infospec/core.hpp"
#include "infospec/rng.hpp"
#include "infospec/synth.hpp"

namespace infospec::testing {

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

/// Library with `counts[m]` spectra labelled "Lm", random positive intensities.
inline SpectrumLibrary random_library(Rng& rng, const PpmGrid& grid, const std::vector<std::size_t>& counts) {
  SpectrumLibrary lib(grid);
  for (std::size_t m = 0; m < counts.size(); ++m)
    for (std::size_t r = 0; r < counts[m]; ++r)
      lib.add("L" + std::to_string(m), Spectrum(grid, random_vector(rng, grid.size(), 0.01, 1.0)));
  return lib;
}

/// Every corruption switched off: analyte lines only.
inline VariationConfig clean_variation() {
  VariationConfig v;
  v.concentration = {1.0, 1.0};
  v.shift_jitter_ppm = 0.0;
  v.noise_sigma = 0.0;
  v.drift_coeff_range = {0.0, 0.0};
  v.include_solvent = false;
  v.solvent_amplitude_factor = 1.0;
  return v;
}

}  // namespace infospec::testing

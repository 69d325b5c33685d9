#include "infospec/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace infospec {

ChannelEnvelope compute_envelope(std::span<const std::vector<double>> spectra) {
  if (spectra.empty()) throw Error(Errc::kEmptyLibrary, "cannot build an envelope from no spectra");
  ChannelEnvelope env{spectra.front(), spectra.front()};
  for (const auto& s : spectra.subspan(1)) {
    if (s.size() != env.size())
      throw Error(Errc::kLengthMismatch, "spectra differ in channel count");
    for (std::size_t c = 0; c < s.size(); ++c) {
      env.mins[c] = std::min(env.mins[c], s[c]);
      env.maxs[c] = std::max(env.maxs[c], s[c]);
    }
  }
  return env;
}

ChannelEnvelope compute_envelope(const SpectrumLibrary& lib) {
  require_valid(lib);
  std::vector<std::vector<double>> spectra;
  spectra.reserve(lib.size());
  for (const auto& e : lib.entries())
    spectra.emplace_back(e.spectrum.values().begin(), e.spectrum.values().end());
  return compute_envelope(spectra);
}

std::vector<double> clip_threshold(std::span<const double> values, double threshold) {
  if (!(threshold > 0.0))
    throw Error(Errc::kNonPositiveThreshold, "threshold must be > 0, got " + std::to_string(threshold));
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out)
    if (v > threshold) v = 0.0;
  return out;
}

Spectrum clip_threshold(const Spectrum& s, double threshold) {
  return Spectrum(s.grid(), clip_threshold(s.values(), threshold));
}

double suggest_threshold(const ChannelEnvelope& env, const PpmGrid& grid,
                         std::span<const PpmInterval> solvent_windows) {
  if (env.size() != grid.size())
    throw Error(Errc::kLengthMismatch, "envelope does not match grid");
  if (solvent_windows.empty())
    throw Error(Errc::kInvalidArgument, "at least one solvent window is required");
  const double slack = 1e-12 * std::max(1.0, grid.hi());
  for (const auto& w : solvent_windows) {
    if (w.lo > w.hi || w.lo < grid.lo() - slack || w.hi > grid.hi() + slack)
      throw Error(Errc::kWindowOutOfRange, "solvent window [" + std::to_string(w.lo) + ", " +
                                               std::to_string(w.hi) + "] is outside the grid");
  }
  bool any = false;
  double best = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double ppm = grid.ppm_at(c);
    const bool in_solvent = std::any_of(solvent_windows.begin(), solvent_windows.end(),
                                        [ppm](const PpmInterval& w) { return w.contains(ppm); });
    if (in_solvent) continue;
    best = any ? std::max(best, env.maxs[c]) : env.maxs[c];
    any = true;
  }
  if (!any) throw Error(Errc::kWindowOutOfRange, "solvent windows cover the whole grid");
  return kThresholdSafetyFactor * best;
}

std::size_t bin_index(double value, double min, double max, std::size_t n_bins) {
  if (n_bins < 2) throw Error(Errc::kInvalidArgument, "n_bins must be >= 2");
  if (!(max > min)) return 0;
  const double scaled = std::floor((value - min) / (max - min) * static_cast<double>(n_bins));
  if (!(scaled > 0.0)) return 0;  // also absorbs NaN
  const double top = static_cast<double>(n_bins - 1);
  return static_cast<std::size_t>(std::min(scaled, top));
}

double information_content(std::size_t k, const ChannelHistogram& h) {
  if (k >= h.counts.size())
    throw Error(Errc::kBinOutOfRange, "bin " + std::to_string(k) + " of " +
                                          std::to_string(h.counts.size()));
  if (h.total == 0) throw Error(Errc::kInvalidArgument, "empty channel histogram");
  return 1.0 - static_cast<double>(h.counts[k]) / static_cast<double>(h.total);
}

namespace {

std::vector<double> preprocess(std::span<const double> values, bool suppress_solvent,
                               double threshold) {
  std::vector<double> v = suppress_solvent ? vector_normalize(values)
                                           : std::vector<double>(values.begin(), values.end());
  v = clip_threshold(v, threshold);
  return vector_normalize(v);
}

}  // namespace

FitModel fit_train(const SpectrumLibrary& lib, const FitOptions& options) {
  require_valid(lib);
  if (options.n_bins < 2) throw Error(Errc::kInvalidArgument, "n_bins must be >= 2");
  const PpmGrid& grid = lib.grid();
  const std::size_t n_channels = grid.size();

  // Step 1: optional first normalization against dominant solvent peaks.
  std::vector<std::vector<double>> spectra;
  spectra.reserve(lib.size());
  for (const auto& e : lib.entries()) {
    const auto v = e.spectrum.values();
    spectra.push_back(options.suppress_solvent ? vector_normalize(v)
                                               : std::vector<double>(v.begin(), v.end()));
  }

  // Steps 2-3: the raw envelope picks the maximum threshold, then clip.
  double threshold = 0.0;
  if (options.threshold) {
    threshold = *options.threshold;
  } else {
    threshold = suggest_threshold(compute_envelope(spectra), grid, options.solvent_windows);
  }
  if (!(threshold > 0.0))
    throw Error(Errc::kNonPositiveThreshold,
                "maximum threshold must be > 0, got " + std::to_string(threshold));

  // Step 4: renormalize what survived the clip.
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    try {
      spectra[i] = vector_normalize(clip_threshold(spectra[i], threshold));
    } catch (const Error& err) {
      if (err.code() != Errc::kZeroSpectrum) throw;
      throw Error(Errc::kZeroSpectrum, "clipping at " + std::to_string(threshold) +
                                           " removed every point of entry " + std::to_string(i) +
                                           " ('" + lib[i].label + "')");
    }
  }

  // Step 5: new envelope and per-channel histograms.
  FitModel model{grid, threshold, options.n_bins, options.suppress_solvent,
                 compute_envelope(spectra), {}};
  model.histograms.assign(n_channels, ChannelHistogram{std::vector<std::uint32_t>(options.n_bins, 0),
                                                       static_cast<std::uint32_t>(lib.size())});
  for (const auto& s : spectra) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      const auto k = bin_index(s[c], model.envelope.mins[c], model.envelope.maxs[c], model.n_bins);
      ++model.histograms[c].counts[k];
    }
  }
  return model;
}

std::vector<double> fit_preprocess(const FitModel& model, const Spectrum& s) {
  if (!(s.grid() == model.grid))
    throw Error(Errc::kGridMismatch, "spectrum grid does not match the model grid");
  return preprocess(s.values(), model.suppress_solvent, model.max_threshold);
}

InformationSpectrum fit_apply(const FitModel& model, const Spectrum& s) {
  const auto v = fit_preprocess(model, s);
  InformationSpectrum out{model.grid, std::vector<double>(v.size())};
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto k = bin_index(v[c], model.envelope.mins[c], model.envelope.maxs[c], model.n_bins);
    out.info[c] = information_content(k, model.histograms[c]);
  }
  return out;
}

std::vector<PpmInterval> hot_regions(const FitModel& model, const SpectrumLibrary& lib,
                                     double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw Error(Errc::kInvalidArgument, "top_fraction must be in (0, 1]");
  if (lib.empty()) throw Error(Errc::kEmptyLibrary, "library has no entries");

  const std::size_t n = model.grid.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& e : lib.entries()) {
    const auto fis = fit_apply(model, e.spectrum);
    for (std::size_t c = 0; c < n; ++c) mean[c] += fis.info[c];
  }
  for (double& m : mean) m /= static_cast<double>(lib.size());

  const auto n_marked = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n) - 1e-9)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
  std::vector<bool> marked(n, false);
  for (std::size_t i = 0; i < std::min(n_marked, n); ++i) marked[order[i]] = true;

  struct Run {
    PpmInterval interval;
    double score;
  };
  std::vector<Run> runs;
  for (std::size_t c = 0; c < n;) {
    if (!marked[c]) {
      ++c;
      continue;
    }
    std::size_t end = c;
    double sum = 0.0;
    while (end < n && marked[end]) sum += mean[end++];
    const double a = model.grid.ppm_at(c);
    const double b = model.grid.ppm_at(end - 1);
    runs.push_back({{std::min(a, b), std::max(a, b)}, sum / static_cast<double>(end - c)});
    c = end;
  }
  std::stable_sort(runs.begin(), runs.end(),
                   [](const Run& a, const Run& b) { return a.score > b.score; });
  std::vector<PpmInterval> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.interval);
  return out;
}

}  // namespace infospec

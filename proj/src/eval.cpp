#include "infospec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace infospec {

CorrelationMatrix::CorrelationMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols())
    throw Error(Errc::kDimensionMismatch, "correlation matrix must be square");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(Errc::kLengthMismatch, "vectors of length " + std::to_string(x.size()) + " and " +
                                           std::to_string(y.size()));
  if (x.size() < 2) throw Error(Errc::kLengthMismatch, "pearson needs at least 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  // Population normalization throughout; the 1/n factors cancel in the ratio.
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(Errc::kZeroVariance, "vector has zero variance");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<const std::vector<double>> vectors) {
  const std::size_t n = vectors.size();
  if (n < 2) throw Error(Errc::kInvalidArgument, "correlation matrix needs at least 2 vectors");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      try {
        m(i, j) = pearson(vectors[i], vectors[j]);
      } catch (const Error& e) {
        throw Error(e.code(), "pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                  "): " + e.what());
      }
      m(j, i) = m(i, j);
    }
  }
  return CorrelationMatrix(std::move(m));
}

CorrelationMatrix ideal_matrix(const ClassMultiplicities& mult) {
  const std::size_t n = mult.total();
  Matrix m(n, n, 0.0);
  std::size_t begin = 0;
  for (std::size_t count : mult.counts()) {
    for (std::size_t i = begin; i < begin + count; ++i)
      for (std::size_t j = begin; j < begin + count; ++j) m(i, j) = 1.0;
    begin += count;
  }
  return CorrelationMatrix(std::move(m));
}

IndexPartition partition_indices(const ClassMultiplicities& mult) {
  const std::size_t n = mult.total();
  std::vector<std::size_t> cls(n);
  for (std::size_t i = 0; i < n; ++i) cls[i] = mult.class_of(i);
  IndexPartition part;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) (cls[i] == cls[j] ? part.intra : part.inter).emplace_back(i, j);
  return part;
}

DistanceReport make_distance_report(double d_intra, double d_inter, std::size_t intra_size,
                                    std::size_t inter_size) {
  DistanceReport r;
  r.d_intra = d_intra;
  r.d_inter = d_inter;
  r.d_total = d_intra + d_inter;
  r.intra_size = intra_size;
  r.inter_size = inter_size;
  r.d_avg = (intra_size ? d_intra / static_cast<double>(intra_size) : 0.0) +
            (inter_size ? d_inter / static_cast<double>(inter_size) : 0.0);
  return r;
}

namespace {

double squared_deviation(const CorrelationMatrix& a, const CorrelationMatrix& b,
                         std::span<const IndexPair> pairs) {
  double sum = 0.0;
  for (const auto& [i, j] : pairs) {
    if (i >= a.n() || j >= a.n())
      throw Error(Errc::kDimensionMismatch, "partition index outside the matrix");
    const double d = a(i, j) - b(i, j);
    sum += d * d;
  }
  return sum;
}

}  // namespace

DistanceReport distances(const CorrelationMatrix& measured, const CorrelationMatrix& ideal,
                         const IndexPartition& part) {
  const std::size_t n = measured.n();
  if (ideal.n() != n)
    throw Error(Errc::kDimensionMismatch, "measured is " + std::to_string(n) + "x" +
                                              std::to_string(n) + ", ideal is " +
                                              std::to_string(ideal.n()) + "x" +
                                              std::to_string(ideal.n()));
  if (part.intra.size() + part.inter.size() != n * n)
    throw Error(Errc::kDimensionMismatch, "partition does not cover the matrix");

  auto r = make_distance_report(squared_deviation(ideal, measured, part.intra),
                                squared_deviation(ideal, measured, part.inter), part.intra.size(),
                                part.inter.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = ideal(i, j) - measured(i, j);
      total += d * d;
    }
  }
  r.d_total = total;
  return r;
}

std::vector<double> gather(const CorrelationMatrix& m, std::span<const IndexPair> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) out.push_back(m(i, j));
  return out;
}

double threshold_error(std::span<const double> intra, std::span<const double> inter,
                       double threshold, double prior_intra, double prior_inter) {
  const auto missed = std::count_if(intra.begin(), intra.end(), [&](double x) { return x < threshold; });
  const auto false_alarms =
      std::count_if(inter.begin(), inter.end(), [&](double x) { return x >= threshold; });
  return prior_intra * static_cast<double>(missed) / static_cast<double>(intra.size()) +
         prior_inter * static_cast<double>(false_alarms) / static_cast<double>(inter.size());
}

BayesReport bayes_error(std::span<const double> intra_samples, std::span<const double> inter_samples,
                        const BayesOptions& options) {
  if (intra_samples.empty() || inter_samples.empty())
    throw Error(Errc::kEmptySamples, "both sample sets must be non-empty");
  if (options.n_bins < 2) throw Error(Errc::kInvalidArgument, "n_bins must be >= 2");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(intra_samples.begin(), intra_samples.end(), finite) ||
      !std::all_of(inter_samples.begin(), inter_samples.end(), finite))
    throw Error(Errc::kNonFinite, "samples contain NaN/Inf");

  const auto [lo0, hi0] = std::minmax_element(intra_samples.begin(), intra_samples.end());
  const auto [lo1, hi1] = std::minmax_element(inter_samples.begin(), inter_samples.end());
  const double lo = std::min(*lo0, *lo1);
  const double hi = std::max(*hi0, *hi1);
  if (!(hi > lo)) throw Error(Errc::kDegenerateRange, "all samples are identical");

  const std::size_t bins = options.n_bins;
  BayesReport r;
  r.range_lo = lo;
  r.range_hi = hi;
  const auto n0 = static_cast<double>(intra_samples.size());
  const auto n1 = static_cast<double>(inter_samples.size());
  if (options.priors == PriorMode::kEmpirical) {
    r.prior_intra = n0 / (n0 + n1);
    r.prior_inter = n1 / (n0 + n1);
  }

  auto histogram = [&](std::span<const double> samples) {
    ChannelHistogram h{std::vector<std::uint32_t>(bins, 0), static_cast<std::uint32_t>(samples.size())};
    for (double x : samples) ++h.counts[bin_index(x, lo, hi, bins)];
    return h;
  };
  r.intra_histogram = histogram(intra_samples);
  r.inter_histogram = histogram(inter_samples);

  // Sign of P(H0) f(x|H0) - P(H1) f(x|H1) per bin; 0 where the two agree.
  std::vector<int> sign(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double g0 = r.prior_intra * r.intra_histogram.counts[b] / n0;
    const double g1 = r.prior_inter * r.inter_histogram.counts[b] / n1;
    sign[b] = g0 > g1 ? 1 : (g0 < g1 ? -1 : 0);
  }

  // Crossings: bin boundaries where the nearest nonzero sign flips.
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> candidates;
  int left = 0;
  for (std::size_t k = 1; k < bins; ++k) {
    if (sign[k - 1] != 0) left = sign[k - 1];
    int right = 0;
    for (std::size_t b = k; b < bins && right == 0; ++b) right = sign[b];
    if (left != 0 && right != 0 && left != right) {
      candidates.push_back(lo + static_cast<double>(k) * width);
      // Refine the crossing to sample resolution within the two bins it separates.
      for (auto samples : {intra_samples, inter_samples})
        for (double x : samples) {
          const auto b = bin_index(x, lo, hi, bins);
          if (b + 1 == k || b == k) candidates.push_back(x);
        }
    }
  }
  // Without a usable crossing the best rule assigns everything to one class.
  candidates.push_back(lo);
  candidates.push_back(std::nextafter(hi, std::numeric_limits<double>::infinity()));

  std::optional<double> best_error;
  for (double t : candidates) {
    const double e = threshold_error(intra_samples, inter_samples, t, r.prior_intra, r.prior_inter);
    if (!best_error || e < *best_error) {
      best_error = e;
      r.threshold = t;
    }
  }
  r.error_probability = std::clamp(*best_error, 0.0, 1.0);
  return r;
}

std::vector<std::vector<double>> library_vectors(const SpectrumLibrary& lib) {
  std::vector<std::vector<double>> out;
  out.reserve(lib.size());
  for (const auto& e : lib.entries())
    out.emplace_back(e.spectrum.values().begin(), e.spectrum.values().end());
  return out;
}

EvaluationReport evaluate_transform(const SpectrumLibrary& raw_lib,
                                    std::span<const std::vector<double>> transformed,
                                    const ClassMultiplicities& mult, const BayesOptions& options) {
  if (transformed.size() != raw_lib.size())
    throw Error(Errc::kDimensionMismatch, std::to_string(transformed.size()) +
                                              " transformed vectors for a library of " +
                                              std::to_string(raw_lib.size()));
  if (mult.total() != raw_lib.size())
    throw Error(Errc::kDimensionMismatch, "multiplicities total " + std::to_string(mult.total()) +
                                              " but library has " + std::to_string(raw_lib.size()));
  const auto lib_mult = raw_lib.multiplicities();
  if (!std::equal(lib_mult.counts().begin(), lib_mult.counts().end(), mult.counts().begin(),
                  mult.counts().end()))
    throw Error(Errc::kInvalidArgument, "multiplicities disagree with the library's class labels");

  const auto measured = correlation_matrix(transformed);
  const auto part = partition_indices(mult);
  EvaluationReport report;
  report.distances = distances(measured, ideal_matrix(mult), part);
  report.intra_samples = gather(measured, part.intra);
  report.inter_samples = gather(measured, part.inter);
  report.bayes = bayes_error(report.intra_samples, report.inter_samples, options);
  return report;
}

}  // namespace infospec

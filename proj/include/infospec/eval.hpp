#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "infospec/core.hpp"
#include "infospec/fit.hpp"
#include "infospec/matrix.hpp"

namespace infospec {

/// Square matrix of correlation coefficients (measured or ideal).
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix values);
  static CorrelationMatrix zeros(std::size_t n) { return CorrelationMatrix(Matrix(n, n, 0.0)); }

  std::size_t n() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Coordinates of same-class (intra) and cross-class (inter) matrix entries.
/// Diagonal entries belong to intra.
struct IndexPartition {
  std::vector<IndexPair> intra;
  std::vector<IndexPair> inter;
};

struct DistanceReport {
  double d_intra = 0.0;
  double d_inter = 0.0;
  double d_total = 0.0;
  double d_avg = 0.0;
  std::size_t intra_size = 0;
  std::size_t inter_size = 0;
};

enum class PriorMode {
  kEqual,      ///< P(H0) = P(H1) = 1/2: balanced error, independent of set sizes.
  kEmpirical,  ///< Priors proportional to sample counts.
};

struct BayesOptions {
  std::size_t n_bins = 25;
  PriorMode priors = PriorMode::kEqual;
};

/// Two-hypothesis histogram classifier over correlation values. H0 = intra
/// (classified when x >= threshold), H1 = inter.
struct BayesReport {
  double threshold = 0.0;
  double error_probability = 0.0;
  double prior_intra = 0.5;
  double prior_inter = 0.5;
  double range_lo = 0.0;
  double range_hi = 0.0;
  ChannelHistogram intra_histogram;
  ChannelHistogram inter_histogram;
};

struct EvaluationReport {
  DistanceReport distances;
  BayesReport bayes;
  std::vector<double> intra_samples;
  std::vector<double> inter_samples;
};

/// Pearson product-moment coefficient, clamped to [-1, 1].
double pearson(std::span<const double> x, std::span<const double> y);

CorrelationMatrix correlation_matrix(std::span<const std::vector<double>> vectors);

/// Block-diagonal 0/1 matrix of class membership.
CorrelationMatrix ideal_matrix(const ClassMultiplicities& mult);

IndexPartition partition_indices(const ClassMultiplicities& mult);

DistanceReport distances(const CorrelationMatrix& measured, const CorrelationMatrix& ideal,
                         const IndexPartition& part);

/// Assembles a report from already-summed distances; d_avg weights each part by
/// the inverse of its set size.
DistanceReport make_distance_report(double d_intra, double d_inter, std::size_t intra_size,
                                    std::size_t inter_size);

/// Matrix entries gathered in partition order.
std::vector<double> gather(const CorrelationMatrix& m, std::span<const IndexPair> pairs);

/// Empirical misclassification mass for the rule "x >= threshold => intra".
double threshold_error(std::span<const double> intra, std::span<const double> inter,
                       double threshold, double prior_intra, double prior_inter);

BayesReport bayes_error(std::span<const double> intra_samples, std::span<const double> inter_samples,
                        const BayesOptions& options = {});

/// Correlation distances and Bayes error of `transformed` (one vector per library
/// entry, same order) against the ideal matrix for `mult`.
EvaluationReport evaluate_transform(const SpectrumLibrary& raw_lib,
                                    std::span<const std::vector<double>> transformed,
                                    const ClassMultiplicities& mult,
                                    const BayesOptions& options = {});

/// Library intensities as plain vectors, in library order.
std::vector<std::vector<double>> library_vectors(const SpectrumLibrary& lib);

}  // namespace infospec

// Randomized invariant checks. Each property runs kCases independently seeded cases.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "infospec/ann.hpp"
#include "infospec/eval.hpp"
#include "infospec/fit.hpp"
#include "infospec/synth.hpp"
#include "support.hpp"

namespace infospec {
namespace {

constexpr int kCases = 100;

using testing::random_vector;

Rng case_rng(std::uint64_t property, int i) { return Rng(Rng::derive(property, static_cast<std::uint64_t>(i))); }

PpmGrid random_grid(Rng& rng, std::size_t min_n = 2, std::size_t max_n = 200) {
  const double a = rng.uniform(-2, 8);
  const double b = a + (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.1, 5);
  return PpmGrid(a, b, rng.integer(min_n, max_n));
}

std::vector<std::size_t> random_counts(Rng& rng, std::size_t max_classes = 6, std::size_t max_per = 5) {
  std::vector<std::size_t> c(rng.integer(1, max_classes));
  for (auto& n : c) n = rng.integer(1, max_per);
  return c;
}

TEST(Property, NormalizeIdempotentAndScaleInvariant) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(1, i);
    const auto v = random_vector(rng, rng.integer(1, 300), -10, 10);
    const auto once = vector_normalize(v);
    const auto twice = vector_normalize(once);
    double ss = 0;
    for (double x : once) ss += x * x;
    EXPECT_NEAR(ss, 1.0, 1e-12);
    const double k = std::exp(rng.uniform(-10, 10));
    std::vector<double> scaled(v);
    for (double& x : scaled) x *= k;
    const auto from_scaled = vector_normalize(scaled);
    for (std::size_t c = 0; c < v.size(); ++c) {
      ASSERT_NEAR(twice[c], once[c], 1e-12);
      ASSERT_NEAR(from_scaled[c], once[c], 1e-9);
    }
  }
}

TEST(Property, ResampleIdentityAndAffineExactness) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(2, i);
    const auto src = random_grid(rng, 2, 400);
    const Spectrum s(src, random_vector(rng, src.size()));
    const auto same = resample(s, src);
    ASSERT_TRUE(std::equal(same.values().begin(), same.values().end(), s.values().begin()));

    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    std::vector<double> affine(src.size());
    for (std::size_t c = 0; c < affine.size(); ++c) affine[c] = a * src.ppm_at(c) + b;
    const double lo = rng.uniform(src.lo(), src.hi());
    const double hi = rng.uniform(lo, src.hi());
    if (!(hi > lo)) continue;
    const bool descending = rng.uniform() < 0.5;
    const PpmGrid dst(descending ? hi : lo, descending ? lo : hi, rng.integer(2, 300));
    const auto r = resample(Spectrum(src, affine), dst);
    for (std::size_t c = 0; c < dst.size(); ++c) ASSERT_NEAR(r[c], a * dst.ppm_at(c) + b, 1e-12);
  }
}

struct FitCase {
  SpectrumLibrary lib;
  FitModel model;
};

FitCase random_fit_case(Rng& rng) {
  const auto grid = random_grid(rng, 5, 80);
  auto lib = testing::random_library(rng, grid, random_counts(rng));
  const auto bins = rng.integer(2, 15);
  const bool suppress = rng.uniform() < 0.5;
  // A threshold above every normalized value keeps each spectrum non-empty.
  auto model = fit_train(lib, FitOptions{.n_bins = bins, .threshold = rng.uniform(1.0, 2.0), .suppress_solvent = suppress});
  return {std::move(lib), std::move(model)};
}

TEST(Property, FitHistogramsAndCodomain) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(3, i);
    const auto [lib, model] = random_fit_case(rng);
    ASSERT_EQ(model.histograms.size(), lib.grid().size());
    for (const auto& h : model.histograms) {
      std::uint32_t sum = 0;
      for (auto c : h.counts) sum += c;
      ASSERT_EQ(sum, lib.size());
      ASSERT_EQ(h.total, lib.size());
    }
    for (std::size_t c = 0; c < model.envelope.size(); ++c) ASSERT_LE(model.envelope.mins[c], model.envelope.maxs[c]);
    // Training points only need the clamp at the exact channel maximum.
    for (const auto& e : lib.entries()) {
      const auto prep = fit_preprocess(model, e.spectrum);
      for (std::size_t c = 0; c < prep.size(); ++c) {
        const double lo = model.envelope.mins[c], hi = model.envelope.maxs[c];
        if (hi == lo) continue;
        const double raw = std::floor((prep[c] - lo) / (hi - lo) * model.n_bins);
        ASSERT_GE(raw, 0.0);
        if (raw >= model.n_bins) ASSERT_EQ(prep[c], hi);
      }
    }
    const Spectrum query(lib.grid(), random_vector(rng, lib.grid().size(), -0.5, 3.0));
    for (const auto& e : {lib[0].spectrum, query}) {
      for (double v : fit_apply(model, e).info) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
    }
  }
}

TEST(Property, FitApplyScaleInvariant) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(4, i);
    const auto grid = random_grid(rng, 5, 80);
    const auto lib = testing::random_library(rng, grid, random_counts(rng));
    const auto model = fit_train(lib, FitOptions{.n_bins = 11, .threshold = 1.5});
    const auto v = random_vector(rng, grid.size(), 0.01, 1.0);
    // Powers of two keep the scaling exact, so bins cannot flip on rounding.
    const double k = std::ldexp(1.0, static_cast<int>(rng.integer(0, 40)) - 20);
    std::vector<double> scaled(v);
    for (double& x : scaled) x *= k;
    ASSERT_EQ(fit_apply(model, Spectrum(grid, v)).info, fit_apply(model, Spectrum(grid, scaled)).info);
  }
}

TEST(Property, ConstantChannelsCarryNoInformation) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(5, i);
    const auto grid = random_grid(rng, 5, 60);
    const auto counts = random_counts(rng);
    const std::size_t dead = rng.integer(0, grid.size() - 1);
    SpectrumLibrary lib(grid);
    for (std::size_t m = 0; m < counts.size(); ++m) {
      for (std::size_t r = 0; r < counts[m]; ++r) {
        auto v = random_vector(rng, grid.size(), 0.01, 1.0);
        v[dead] = 0.0;
        lib.add("c" + std::to_string(m), Spectrum(grid, v));
      }
    }
    const auto model = fit_train(lib, FitOptions{.threshold = 1.5});
    const Spectrum query(grid, random_vector(rng, grid.size(), -1.0, 1.0));
    ASSERT_EQ(fit_apply(model, query).info[dead], 0.0);
  }
}

TEST(Property, PearsonSymmetryBoundsAffine) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(6, i);
    const auto n = rng.integer(2, 200);
    const auto x = random_vector(rng, n, -5, 5);
    const auto y = random_vector(rng, n, -5, 5);
    const double r = pearson(x, y);
    ASSERT_EQ(r, pearson(y, x));
    ASSERT_LE(std::abs(r), 1.0 + 1e-12);
    const double a = rng.uniform(0.1, 10), b = rng.uniform(-10, 10);
    std::vector<double> ax(x), ay(y);
    for (double& v : ax) v = a * v + b;
    for (double& v : ay) v = a * v - b;
    ASSERT_NEAR(pearson(x, ax), 1.0, 1e-9);
    ASSERT_NEAR(pearson(ax, y), r, 1e-9);
    ASSERT_NEAR(pearson(x, ay), r, 1e-9);
  }
}

TEST(Property, CorrelationMatrixSymmetricUnitDiagonal) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(7, i);
    const auto n = rng.integer(2, 12);
    const auto len = rng.integer(3, 50);
    std::vector<std::vector<double>> v;
    for (std::size_t k = 0; k < n; ++k) v.push_back(random_vector(rng, len));
    const auto m = correlation_matrix(v);
    for (std::size_t a = 0; a < n; ++a) {
      ASSERT_NEAR(m(a, a), 1.0, 1e-12);
      for (std::size_t b = 0; b < n; ++b) ASSERT_NEAR(m(a, b), m(b, a), 1e-12);
    }
  }
}

TEST(Property, IdealMatrixAndPartition) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(8, i);
    const ClassMultiplicities mult(random_counts(rng, 10, 6));
    const auto ideal = ideal_matrix(mult);
    const auto n = mult.total();
    double trace = 0;
    std::size_t ones = 0;
    for (std::size_t a = 0; a < n; ++a) {
      trace += ideal(a, a);
      for (std::size_t b = 0; b < n; ++b) {
        ASSERT_TRUE(ideal(a, b) == 0.0 || ideal(a, b) == 1.0);
        ones += ideal(a, b) == 1.0;
      }
    }
    ASSERT_EQ(trace, static_cast<double>(n));
    std::size_t expected_intra = 0;
    for (auto c : mult.counts()) expected_intra += c * c;
    const auto part = partition_indices(mult);
    ASSERT_EQ(part.intra.size(), expected_intra);
    ASSERT_EQ(ones, expected_intra);
    ASSERT_EQ(part.intra.size() + part.inter.size(), n * n);
    std::vector<int> seen(n * n, 0);
    for (const auto& [a, b] : part.intra) ++seen[a * n + b];
    for (const auto& [a, b] : part.inter) ++seen[a * n + b];
    ASSERT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
}

TEST(Property, DistanceAdditivity) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(9, i);
    auto counts = random_counts(rng, 8, 5);
    counts.push_back(rng.integer(1, 5));  // at least two classes, so inter is non-empty
    const ClassMultiplicities mult(counts);
    const auto n = mult.total();
    Matrix m(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) m(a, b) = m(b, a) = a == b ? 1.0 : rng.uniform(-1, 1);
    const auto part = partition_indices(mult);
    const auto d = distances(CorrelationMatrix(m), ideal_matrix(mult), part);
    ASSERT_GE(d.d_intra, 0.0);
    ASSERT_GE(d.d_inter, 0.0);
    ASSERT_NEAR(d.d_total, d.d_intra + d.d_inter, 1e-9);
    ASSERT_NEAR(d.d_avg, d.d_intra / part.intra.size() + d.d_inter / part.inter.size(), 1e-9);
  }
}

TEST(Property, BayesErrorBounds) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(10, i);
    auto intra = random_vector(rng, rng.integer(1, 300), rng.uniform(-1, 0.5), 1.0);
    auto inter = random_vector(rng, rng.integer(1, 3000), -1.0, rng.uniform(-0.5, 1.0));
    if (rng.uniform() < 0.5) intra.push_back(-1.0);  // keep the range non-degenerate
    for (PriorMode priors : {PriorMode::kEqual, PriorMode::kEmpirical}) {
      const auto r = bayes_error(intra, inter, BayesOptions{.n_bins = rng.integer(2, 40), .priors = priors});
      ASSERT_GE(r.error_probability, 0.0);
      ASSERT_LE(r.error_probability, std::min(r.prior_intra, r.prior_inter) + 1e-12);
      ASSERT_NEAR(r.prior_intra + r.prior_inter, 1.0, 1e-12);
    }
    // Disjoint supports are separated perfectly.
    const double gap = rng.uniform(-0.5, 0.5);
    const auto hi = random_vector(rng, rng.integer(1, 100), gap + 0.01, 1.0);
    const auto lo = random_vector(rng, rng.integer(1, 100), -1.0, gap - 0.01);
    ASSERT_EQ(bayes_error(hi, lo).error_probability, 0.0);
  }
}

TEST(Property, GeneratorDeterminism) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(11, i);
    const auto seed = rng.integer(0, UINT64_MAX - 1);
    const auto grid = default_grid(rng.integer(50, 400));
    const auto specs = gen_class_specs(rng.integer(1, 4), {}, seed);
    ASSERT_EQ(specs, gen_class_specs(specs.size(), {}, seed));
    const auto a = gen_spectrum(specs[0], VariationConfig{}, grid, seed ^ 1);
    const auto b = gen_spectrum(specs[0], VariationConfig{}, grid, seed ^ 1);
    ASSERT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST(Property, BernsteinEndpoints) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(12, i);
    const auto b = random_vector(rng, rng.integer(1, 9), -5, 5);
    ASSERT_EQ(bernstein_baseline(b, 0.0), b.front());
    ASSERT_EQ(bernstein_baseline(b, 1.0), b.back());
  }
}

TEST(Property, BackpropMatchesFiniteDifferences) {
  constexpr double h = 1e-5;
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(13, i);
    auto net = init_network({5, 3, 2}, rng.integer(0, 1000));
    for (double& w : net.hidden_weights.data()) w = rng.uniform(-1, 1);
    for (double& w : net.output_weights.data()) w = rng.uniform(-1, 1);
    const auto x = random_vector(rng, 5);
    std::vector<double> t(2, 0.0);
    t[rng.integer(0, 1)] = 1.0;
    const Loss kind = i % 2 ? Loss::kSquaredError : Loss::kCrossEntropy;
    const auto g = backprop(net, x, t, kind);
    auto check = [&](Matrix& w, const Matrix& analytic) {
      for (std::size_t k = 0; k < w.data().size(); ++k) {
        const double orig = w.data()[k];
        w.data()[k] = orig + h;
        const double up = loss(net, x, t, kind);
        w.data()[k] = orig - h;
        const double down = loss(net, x, t, kind);
        w.data()[k] = orig;
        const double numeric = (up - down) / (2 * h);
        const double a = analytic.data()[k];
        ASSERT_LE(std::abs(a - numeric), 1e-4 * std::max({std::abs(a), std::abs(numeric), 1e-8}))
            << "case " << i << " weight " << k;
      }
    };
    check(net.hidden_weights, g.hidden);
    check(net.output_weights, g.output);
  }
}

TEST(Property, ClassifyInvariantUnderMonotoneMaps) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(14, i);
    const auto out = random_vector(rng, rng.integer(1, 30), 0.0, 1.0);
    std::vector<double> mapped(out);
    const double a = rng.uniform(0.1, 5), b = rng.uniform(-3, 3);
    for (double& v : mapped) v = std::exp(a * v) + b;
    ASSERT_EQ(argmax(out), argmax(mapped));
  }
}

TEST(Property, MaxBitErrorInUnitInterval) {
  for (int i = 0; i < kCases; ++i) {
    auto rng = case_rng(15, i);
    const MlpTopology t{rng.integer(1, 8), rng.integer(1, 6), rng.integer(2, 5)};
    const auto net = init_network(t, rng.integer(0, 99));
    std::vector<std::vector<double>> inputs, targets;
    for (std::size_t p = 0; p < rng.integer(1, 10); ++p) {
      inputs.push_back(random_vector(rng, t.n_inputs, -3, 3));
      std::vector<double> y(t.n_outputs, 0.0);
      y[rng.integer(0, t.n_outputs - 1)] = 1.0;
      targets.push_back(y);
    }
    const double e = max_bit_error(net, inputs, targets);
    ASSERT_GE(e, 0.0);
    ASSERT_LE(e, 1.0);
  }
}

}  // namespace
}  // namespace infospec

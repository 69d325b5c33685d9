// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "infospec/ann.hpp"
#include "infospec/eval.hpp"
#include "infospec/fit.hpp"
#include "infospec/rng.hpp"
#include "infospec/synth.hpp"

using namespace infospec;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ClassMultiplicities table1() { return reference_multiplicities(); }

const SpectrumLibrary& seed42_library() {
  static const SpectrumLibrary lib = gen_library(23, table1(), VariationConfig{}, default_grid(2000), 42);
  return lib;
}

std::vector<std::vector<double>> fis_vectors(const FitModel& model, const SpectrumLibrary& lib) {
  std::vector<std::vector<double>> out;
  for (const auto& e : lib.entries()) out.push_back(fit_apply(model, e.spectrum).info);
  return out;
}

void davg_arithmetic() {
  struct Row {
    double intra, inter, expected;
  };
  const Row rows[] = {{65, 1092, 0.39}, {30, 1475, 0.34}, {15, 2355, 0.44}};
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const double d = make_distance_report(r.intra, r.inter, 308, 6092).d_avg;
    ok = ok && std::abs(d - r.expected) <= 0.005;
    detail += fmt("%.4f ", d);
  }
  report(1, ok, "D_avg arithmetic (0.39, 0.34, 0.44 +-0.005)", detail);
}

void partition_counts() {
  const auto p = partition_indices(table1());
  const bool ok = p.intra.size() == 308 && p.inter.size() == 6092 && p.intra.size() + p.inter.size() == 6400;
  report(2, ok, "partition counts", "intra " + std::to_string(p.intra.size()) + ", inter " +
                                        std::to_string(p.inter.size()));
}

void random_transform() {
  const auto d = distances(CorrelationMatrix::zeros(80), ideal_matrix(table1()), partition_indices(table1()));
  const bool ok = d.d_intra == 308.0 && d.d_inter == 0.0 && d.d_total == 308.0;
  report(3, ok, "all-zero matrix distances (308, 0, 308)",
         fmt("d_intra %g", d.d_intra) + fmt(", d_inter %g", d.d_inter) + fmt(", d_total %g", d.d_total));
}

void ideal_example() {
  const double expected[5][5] = {{1, 1, 0, 0, 0},
                                 {1, 1, 0, 0, 0},
                                 {0, 0, 1, 1, 1},
                                 {0, 0, 1, 1, 1},
                                 {0, 0, 1, 1, 1}};
  const auto m = ideal_matrix(ClassMultiplicities({2, 3}));
  bool ok = m.n() == 5;
  for (std::size_t i = 0; ok && i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) ok = ok && m(i, j) == expected[i][j];
  report(4, ok, "ideal matrix for (2, 3)", ok ? "matches element-for-element" : "mismatch");
}

void separability() {
  const auto start = std::chrono::steady_clock::now();
  const auto& lib = seed42_library();
  const auto mult = lib.multiplicities();
  const auto raw = evaluate_transform(lib, library_vectors(lib), mult);
  const auto model = fit_train(lib);
  const auto fit = evaluate_transform(lib, fis_vectors(model, lib), mult);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = fit.distances.d_avg < raw.distances.d_avg &&
                  fit.bayes.error_probability <= raw.bayes.error_probability - 0.05 && secs < 120;
  report(5, ok, "FIT improves separability on the seed-42 library",
         fmt("d_avg raw %.4f", raw.distances.d_avg) + fmt(" fit %.4f", fit.distances.d_avg) +
             fmt(", bayes raw %.4f", raw.bayes.error_probability) +
             fmt(" fit %.4f", fit.bayes.error_probability) + fmt(", %.1f s", secs));
}

void ann_ordering() {
  const auto start = std::chrono::steady_clock::now();
  const auto lib = resample(seed42_library(), default_grid(500));
  const auto mult = lib.multiplicities();
  std::vector<std::size_t> classes(lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) classes[i] = mult.class_of(i);
  const auto targets = one_hot_targets(classes, mult.n_classes());
  const MlpTopology topology{500, 10, 23};
  const TrainConfig cfg{.step_size = 0.01, .momentum = 0.0, .max_epochs = 20000, .n_repeats = 4};
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4};

  const auto raw = train_repeated(topology, library_vectors(lib), targets, cfg, seeds);
  const auto fit = train_repeated(topology, fis_vectors(fit_train(lib), lib), targets, cfg, seeds);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto raw_reach = raw.mean_curve.epochs_to_reach(0.3);
  const auto fit_reach = fit.mean_curve.epochs_to_reach(0.3);
  const bool ok = fit_reach && (!raw_reach || *fit_reach < *raw_reach) && secs < 600;
  auto show = [](const std::optional<std::size_t>& e) { return e ? std::to_string(*e) : std::string("never"); };
  report(6, ok, "ANN 500-10-23 reaches max bit error 0.3 sooner on FIT inputs",
         "fit " + show(fit_reach) + ", raw " + show(raw_reach) + " (of 20000 epochs)" +
             fmt(", final fit %.3f", fit.mean_curve.max_bit_error.back()) +
             fmt(" raw %.3f", raw.mean_curve.max_bit_error.back()) + fmt(", %.0f s", secs));
}

double worst_gradient_error(Rng& rng, int cases) {
  constexpr double h = 1e-5;
  double worst = 0;
  for (int i = 0; i < cases; ++i) {
    auto net = init_network({5, 3, 2}, rng.integer(0, 1u << 30));
    for (double& w : net.hidden_weights.data()) w = rng.uniform(-1, 1);
    for (double& w : net.output_weights.data()) w = rng.uniform(-1, 1);
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-1, 1);
    std::vector<double> t(2, 0.0);
    t[rng.integer(0, 1)] = 1.0;
    for (Loss kind : {Loss::kCrossEntropy, Loss::kSquaredError}) {
      const auto g = backprop(net, x, t, kind);
      for (auto [w, a] : {std::pair{&net.hidden_weights, &g.hidden}, std::pair{&net.output_weights, &g.output}}) {
        for (std::size_t k = 0; k < w->data().size(); ++k) {
          const double orig = w->data()[k];
          w->data()[k] = orig + h;
          const double up = loss(net, x, t, kind);
          w->data()[k] = orig - h;
          const double down = loss(net, x, t, kind);
          w->data()[k] = orig;
          const double numeric = (up - down) / (2 * h);
          const double an = a->data()[k];
          worst = std::max(worst, std::abs(an - numeric) / std::max({std::abs(an), std::abs(numeric), 1e-8}));
        }
      }
    }
  }
  return worst;
}

void gradient_check() {
  Rng rng(7);
  const double worst = worst_gradient_error(rng, 20);
  report(7, worst <= 1e-4, "backprop vs central differences on 5-3-2 (rel. err <= 1e-4)",
         fmt("worst relative error %.2e", worst));
}

// Compact re-run of the module invariants, 100 seeded cases each.
void invariant_suites() {
  constexpr int kCases = 100;
  std::vector<std::string> broken;
  auto suite = [&](const char* name, const std::function<bool(Rng&)>& property) {
    for (int i = 0; i < kCases; ++i) {
      Rng rng(Rng::derive(std::hash<std::string>{}(name) & 0xffff, static_cast<std::uint64_t>(i)));
      if (!property(rng)) {
        broken.push_back(name);
        return;
      }
    }
  };
  auto vec = [](Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
  };

  suite("normalize idempotent/scale-invariant", [&](Rng& rng) {
    const auto v = vec(rng, rng.integer(1, 200), -5, 5);
    const auto a = vector_normalize(v);
    const auto b = vector_normalize(a);
    auto s = v;
    const double k = rng.uniform(0.001, 1000);
    for (double& x : s) x *= k;
    const auto c = vector_normalize(s);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-12 || std::abs(a[i] - c[i]) > 1e-9) return false;
    return true;
  });
  suite("FIS in [0,1] and histogram totals", [&](Rng& rng) {
    const PpmGrid grid(1.0, 5.5, rng.integer(5, 60));
    SpectrumLibrary lib(grid);
    const auto n_classes = rng.integer(1, 5);
    for (std::size_t m = 0; m < n_classes; ++m)
      for (std::size_t r = rng.integer(1, 4); r > 0; --r) lib.add(std::to_string(m), Spectrum(grid, vec(rng, grid.size(), 0.01, 1)));
    const auto model = fit_train(lib, FitOptions{.n_bins = rng.integer(2, 15), .threshold = 1.5});
    for (const auto& h : model.histograms) {
      std::uint32_t sum = 0;
      for (auto c : h.counts) sum += c;
      if (sum != lib.size()) return false;
    }
    for (double v : fit_apply(model, Spectrum(grid, vec(rng, grid.size(), -1, 2))).info)
      if (v < 0 || v > 1) return false;
    return true;
  });
  suite("pearson bounds/symmetry", [&](Rng& rng) {
    const auto n = rng.integer(2, 100);
    const auto x = vec(rng, n, -3, 3);
    const auto y = vec(rng, n, -3, 3);
    const double r = pearson(x, y);
    return r == pearson(y, x) && std::abs(r) <= 1.0 + 1e-12;
  });
  suite("d_total additivity", [&](Rng& rng) {
    std::vector<std::size_t> counts(rng.integer(2, 6));
    for (auto& c : counts) c = rng.integer(1, 4);
    const ClassMultiplicities mult(counts);
    const auto n = mult.total();
    Matrix m(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) m(a, b) = m(b, a) = a == b ? 1.0 : rng.uniform(-1, 1);
    const auto d = distances(CorrelationMatrix(m), ideal_matrix(mult), partition_indices(mult));
    return std::abs(d.d_total - (d.d_intra + d.d_inter)) <= 1e-9 && d.d_intra >= 0 && d.d_inter >= 0;
  });
  suite("generator determinism", [&](Rng& rng) {
    const auto seed = rng.integer(0, 1u << 30);
    const auto specs = gen_class_specs(2, {}, seed);
    const auto grid = default_grid(rng.integer(50, 300));
    const auto a = gen_spectrum(specs[1], VariationConfig{}, grid, seed + 1);
    const auto b = gen_spectrum(specs[1], VariationConfig{}, grid, seed + 1);
    return specs == gen_class_specs(2, {}, seed) && std::equal(a.values().begin(), a.values().end(), b.values().begin());
  });
  suite("Bernstein endpoint identities", [&](Rng& rng) {
    const auto b = vec(rng, rng.integer(1, 8), -2, 2);
    return bernstein_baseline(b, 0.0) == b.front() && bernstein_baseline(b, 1.0) == b.back();
  });

  std::string detail = broken.empty() ? "6 suites x 100 cases hold" : "broken:";
  for (const auto& b : broken) detail += " " + b + ";";
  report(8, broken.empty(), "invariant suites", detail);
}

void fis_reproducibility() {
  const auto& lib = seed42_library();
  const auto mult = lib.multiplicities();
  const auto fis = fis_vectors(fit_train(lib), lib);
  Rng rng(2024);
  auto pick_same = [&] {
    // Only the 19 replicated classes have same-class pairs.
    const auto m = rng.integer(0, 18);
    const auto a = rng.integer(0, 3);
    auto b = rng.integer(0, 2);
    if (b >= a) ++b;
    return std::pair{4 * m + a, 4 * m + b};
  };
  auto pick_cross = [&] {
    for (;;) {
      const auto a = rng.integer(0, lib.size() - 1);
      const auto b = rng.integer(0, lib.size() - 1);
      if (mult.class_of(a) != mult.class_of(b)) return std::pair{a, b};
    }
  };
  int wins = 0;
  constexpr int kComparisons = 50;
  for (int i = 0; i < kComparisons; ++i) {
    const auto [a, b] = pick_same();
    const auto [c, d] = pick_cross();
    wins += pearson(fis[a], fis[b]) > pearson(fis[c], fis[d]);
  }
  const double rate = static_cast<double>(wins) / kComparisons;
  report(9, rate >= 0.9, "same-class FIS correlation beats cross-class (>= 90% of 50)",
         std::to_string(wins) + "/" + std::to_string(kComparisons) + fmt(" = %.2f", rate));
}

}  // namespace

int main() {
  davg_arithmetic();
  partition_counts();
  random_transform();
  ideal_example();
  separability();
  gradient_check();
  invariant_suites();
  fis_reproducibility();
  ann_ordering();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

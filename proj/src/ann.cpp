#include "infospec/ann.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "infospec/core.hpp"
#include "infospec/rng.hpp"

namespace infospec {

namespace {

constexpr double kInitRange = 0.1;

void check_topology(const MlpTopology& t) {
  if (t.n_inputs < 1 || t.n_hidden < 1 || t.n_outputs < 1)
    throw Error(Errc::kInvalidArgument, "topology layers must all be >= 1");
}

void check_input(const MlpNetwork& net, std::span<const double> input) {
  if (input.size() != net.topology.n_inputs)
    throw Error(Errc::kDimensionMismatch, "input has " + std::to_string(input.size()) +
                                              " values, network expects " +
                                              std::to_string(net.topology.n_inputs));
}

/// Activations of one forward pass; hidden carries a trailing 1 for the bias.
struct Activations {
  std::vector<double> hidden;
  std::vector<double> output;
};

void forward_into(const MlpNetwork& net, std::span<const double> input, Activations& act) {
  const auto& [n_in, n_hid, n_out] = net.topology;
  act.hidden.resize(n_hid + 1);
  act.output.resize(n_out);
  for (std::size_t j = 0; j < n_hid; ++j) {
    const auto w = net.hidden_weights.row(j);
    double s = w[n_in];
    for (std::size_t i = 0; i < n_in; ++i) s += w[i] * input[i];
    act.hidden[j] = sigmoid(s);
  }
  act.hidden[n_hid] = 1.0;
  for (std::size_t k = 0; k < n_out; ++k) {
    const auto w = net.output_weights.row(k);
    double s = 0.0;
    for (std::size_t j = 0; j <= n_hid; ++j) s += w[j] * act.hidden[j];
    act.output[k] = sigmoid(s);
  }
}

void output_deltas(const Activations& act, std::span<const double> target, Loss kind,
                   std::vector<double>& delta) {
  delta.resize(act.output.size());
  for (std::size_t k = 0; k < act.output.size(); ++k) {
    const double o = act.output[k];
    delta[k] = kind == Loss::kCrossEntropy ? o - target[k] : (o - target[k]) * o * (1.0 - o);
  }
}

void hidden_deltas(const MlpNetwork& net, const Activations& act, std::span<const double> out_delta,
                   std::vector<double>& delta) {
  const std::size_t n_hid = net.topology.n_hidden;
  delta.assign(n_hid, 0.0);
  for (std::size_t k = 0; k < out_delta.size(); ++k) {
    const auto w = net.output_weights.row(k);
    for (std::size_t j = 0; j < n_hid; ++j) delta[j] += w[j] * out_delta[k];
  }
  for (std::size_t j = 0; j < n_hid; ++j) delta[j] *= act.hidden[j] * (1.0 - act.hidden[j]);
}

void check_patterns(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                    std::span<const std::vector<double>> targets) {
  if (inputs.size() != targets.size())
    throw Error(Errc::kDimensionMismatch, std::to_string(inputs.size()) + " inputs but " +
                                              std::to_string(targets.size()) + " targets");
  if (inputs.empty()) throw Error(Errc::kInvalidArgument, "no training patterns");
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    check_input(net, inputs[p]);
    if (targets[p].size() != net.topology.n_outputs)
      throw Error(Errc::kDimensionMismatch, "target " + std::to_string(p) + " has " +
                                                std::to_string(targets[p].size()) + " values");
  }
}

void check_one_hot(std::span<const std::vector<double>> targets) {
  for (std::size_t p = 0; p < targets.size(); ++p) {
    const auto ones = std::count(targets[p].begin(), targets[p].end(), 1.0);
    const auto zeros = std::count(targets[p].begin(), targets[p].end(), 0.0);
    if (ones != 1 || static_cast<std::size_t>(ones + zeros) != targets[p].size())
      throw Error(Errc::kNonOneHotTarget, "target " + std::to_string(p) + " is not one-hot");
  }
}

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::optional<std::size_t> LearningCurve::epochs_to_reach(double level) const {
  for (std::size_t e = 0; e < max_bit_error.size(); ++e)
    if (max_bit_error[e] <= level) return e + 1;
  return std::nullopt;
}

MlpNetwork init_network(const MlpTopology& topology, std::uint64_t seed) {
  check_topology(topology);
  MlpNetwork net{topology, Matrix(topology.n_hidden, topology.n_inputs + 1),
                 Matrix(topology.n_outputs, topology.n_hidden + 1), seed};
  Rng rng(seed);
  for (double& w : net.hidden_weights.data()) w = rng.uniform(-kInitRange, kInitRange);
  for (double& w : net.output_weights.data()) w = rng.uniform(-kInitRange, kInitRange);
  return net;
}

std::vector<double> forward(const MlpNetwork& net, std::span<const double> input) {
  check_input(net, input);
  Activations act;
  forward_into(net, input, act);
  return act.output;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::size_t classify(const MlpNetwork& net, std::span<const double> input) {
  return argmax(forward(net, input));
}

double loss(const MlpNetwork& net, std::span<const double> input, std::span<const double> target,
            Loss kind) {
  const auto out = forward(net, input);
  if (target.size() != out.size()) throw Error(Errc::kDimensionMismatch, "target size");
  double l = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (kind == Loss::kSquaredError) {
      l += 0.5 * (out[k] - target[k]) * (out[k] - target[k]);
    } else {
      l -= target[k] * std::log(out[k]) + (1.0 - target[k]) * std::log1p(-out[k]);
    }
  }
  return l;
}

Gradient backprop(const MlpNetwork& net, std::span<const double> input,
                  std::span<const double> target, Loss kind) {
  check_input(net, input);
  if (target.size() != net.topology.n_outputs) throw Error(Errc::kDimensionMismatch, "target size");
  const auto& [n_in, n_hid, n_out] = net.topology;
  Activations act;
  forward_into(net, input, act);
  std::vector<double> d_out;
  std::vector<double> d_hid;
  output_deltas(act, target, kind, d_out);
  hidden_deltas(net, act, d_out, d_hid);

  Gradient g{Matrix(n_hid, n_in + 1), Matrix(n_out, n_hid + 1)};
  for (std::size_t k = 0; k < n_out; ++k)
    for (std::size_t j = 0; j <= n_hid; ++j) g.output(k, j) = d_out[k] * act.hidden[j];
  for (std::size_t j = 0; j < n_hid; ++j) {
    for (std::size_t i = 0; i < n_in; ++i) g.hidden(j, i) = d_hid[j] * input[i];
    g.hidden(j, n_in) = d_hid[j];
  }
  return g;
}

double max_bit_error(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                     std::span<const std::vector<double>> targets) {
  check_patterns(net, inputs, targets);
  Activations act;
  double worst = 0.0;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    forward_into(net, inputs[p], act);
    for (std::size_t k = 0; k < act.output.size(); ++k)
      worst = std::max(worst, std::abs(targets[p][k] - act.output[k]));
  }
  return worst;
}

double accuracy(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                std::span<const std::vector<double>> targets) {
  check_patterns(net, inputs, targets);
  std::size_t hits = 0;
  for (std::size_t p = 0; p < inputs.size(); ++p)
    if (classify(net, inputs[p]) == argmax(targets[p])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(inputs.size());
}

TrainResult train(MlpNetwork net, std::span<const std::vector<double>> inputs,
                  std::span<const std::vector<double>> targets, const TrainConfig& cfg) {
  check_patterns(net, inputs, targets);
  check_one_hot(targets);
  if (cfg.max_epochs < 1) throw Error(Errc::kInvalidArgument, "max_epochs must be >= 1");
  if (!(cfg.step_size >= 0.0)) throw Error(Errc::kInvalidArgument, "step_size must be >= 0");
  if (cfg.momentum != 0.0) throw Error(Errc::kInvalidArgument, "momentum is not supported");

  const auto& [n_in, n_hid, n_out] = net.topology;
  const double eta = cfg.step_size;
  Activations act;
  std::vector<double> d_out;
  std::vector<double> d_hid;
  LearningCurve curve;
  curve.max_bit_error.reserve(std::min<std::size_t>(cfg.max_epochs, 1 << 20));

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (std::size_t p = 0; p < inputs.size(); ++p) {
      const auto& x = inputs[p];
      forward_into(net, x, act);
      output_deltas(act, targets[p], cfg.loss, d_out);
      hidden_deltas(net, act, d_out, d_hid);
      for (std::size_t k = 0; k < n_out; ++k) {
        auto w = net.output_weights.row(k);
        const double step = eta * d_out[k];
        for (std::size_t j = 0; j <= n_hid; ++j) w[j] -= step * act.hidden[j];
      }
      for (std::size_t j = 0; j < n_hid; ++j) {
        auto w = net.hidden_weights.row(j);
        const double step = eta * d_hid[j];
        for (std::size_t i = 0; i < n_in; ++i) w[i] -= step * x[i];
        w[n_in] -= step;
      }
    }
    const double err = max_bit_error(net, inputs, targets);
    curve.max_bit_error.push_back(err);
    if (cfg.target_max_bit_error && err <= *cfg.target_max_bit_error) break;
  }
  curve.accuracy = accuracy(net, inputs, targets);
  return {std::move(net), std::move(curve)};
}

RepeatedResult train_repeated(const MlpTopology& topology,
                              std::span<const std::vector<double>> inputs,
                              std::span<const std::vector<double>> targets, const TrainConfig& cfg,
                              std::span<const std::uint64_t> seeds) {
  if (seeds.size() != cfg.n_repeats)
    throw Error(Errc::kInvalidArgument, std::to_string(seeds.size()) + " seeds for " +
                                            std::to_string(cfg.n_repeats) + " repeats");
  if (seeds.empty()) throw Error(Errc::kInvalidArgument, "at least one seed is required");

  std::vector<std::future<TrainResult>> jobs;
  jobs.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    jobs.push_back(std::async(std::launch::async, [&, seed] {
      return train(init_network(topology, seed), inputs, targets, cfg);
    }));
  }
  RepeatedResult result;
  for (auto& job : jobs) result.runs.push_back(job.get());

  std::size_t longest = 0;
  for (const auto& r : result.runs) longest = std::max(longest, r.curve.max_bit_error.size());
  auto& mean = result.mean_curve;
  mean.max_bit_error.assign(longest, 0.0);
  for (const auto& r : result.runs) {
    const auto& c = r.curve.max_bit_error;
    for (std::size_t e = 0; e < longest; ++e) mean.max_bit_error[e] += e < c.size() ? c[e] : c.back();
    mean.accuracy += r.curve.accuracy;
  }
  const auto n = static_cast<double>(result.runs.size());
  for (double& v : mean.max_bit_error) v /= n;
  mean.accuracy /= n;
  return result;
}

std::vector<std::vector<double>> one_hot_targets(std::span<const std::size_t> classes,
                                                 std::size_t n_classes) {
  std::vector<std::vector<double>> out;
  out.reserve(classes.size());
  for (std::size_t c : classes) {
    if (c >= n_classes) throw Error(Errc::kInvalidArgument, "class index out of range");
    std::vector<double> t(n_classes, 0.0);
    t[c] = 1.0;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace infospec

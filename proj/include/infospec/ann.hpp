#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "infospec/matrix.hpp"

namespace infospec {

struct MlpTopology {
  std::size_t n_inputs = 0;
  std::size_t n_hidden = 0;
  std::size_t n_outputs = 0;

  bool operator==(const MlpTopology&) const = default;
};

/// Two-stage fully connected network with logistic units. Each weight row ends
/// with the bias weight, i.e. hidden_weights is n_hidden x (n_inputs + 1).
struct MlpNetwork {
  MlpTopology topology;
  Matrix hidden_weights;
  Matrix output_weights;
  std::uint64_t seed = 0;
};

enum class Loss {
  kCrossEntropy,  ///< output delta = o - t
  kSquaredError,  ///< 1/2 sum (o - t)^2, output delta = (o - t) o (1 - o)
};

struct TrainConfig {
  double step_size = 0.01;
  double momentum = 0.0;
  std::size_t max_epochs = 100000;
  std::optional<double> target_max_bit_error;
  std::size_t n_repeats = 4;
  Loss loss = Loss::kCrossEntropy;
};

struct LearningCurve {
  std::vector<double> max_bit_error;  ///< one entry per completed epoch
  double accuracy = 0.0;              ///< training-set accuracy after the last epoch

  /// 1-based epoch at which the curve first reaches `level`, if it does.
  std::optional<std::size_t> epochs_to_reach(double level) const;
};

struct TrainResult {
  MlpNetwork network;
  LearningCurve curve;
};

struct RepeatedResult {
  LearningCurve mean_curve;
  std::vector<TrainResult> runs;
};

struct Gradient {
  Matrix hidden;
  Matrix output;
};

double sigmoid(double x);

/// Weights i.i.d. uniform on [-0.1, 0.1] from a generator seeded with `seed`.
MlpNetwork init_network(const MlpTopology& topology, std::uint64_t seed);

std::vector<double> forward(const MlpNetwork& net, std::span<const double> input);

/// Index of the largest output; ties resolve to the lowest index.
std::size_t classify(const MlpNetwork& net, std::span<const double> input);
std::size_t argmax(std::span<const double> values);

double loss(const MlpNetwork& net, std::span<const double> input, std::span<const double> target,
            Loss kind);

/// Backpropagated d(loss)/d(weights) for one pattern.
Gradient backprop(const MlpNetwork& net, std::span<const double> input,
                  std::span<const double> target, Loss kind);

/// max over patterns and output units of |target - output|.
double max_bit_error(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                     std::span<const std::vector<double>> targets);

double accuracy(const MlpNetwork& net, std::span<const std::vector<double>> inputs,
                std::span<const std::vector<double>> targets);

/// Per-pattern gradient descent in presentation order; stops after max_epochs
/// or once the max bit error reaches the configured target.
TrainResult train(MlpNetwork net, std::span<const std::vector<double>> inputs,
                  std::span<const std::vector<double>> targets, const TrainConfig& cfg);

/// One training run per seed (concurrently); the mean curve pads shorter runs
/// with their final value.
RepeatedResult train_repeated(const MlpTopology& topology,
                              std::span<const std::vector<double>> inputs,
                              std::span<const std::vector<double>> targets, const TrainConfig& cfg,
                              std::span<const std::uint64_t> seeds);

/// One-hot rows for class indices in [0, n_classes).
std::vector<std::vector<double>> one_hot_targets(std::span<const std::size_t> classes,
                                                 std::size_t n_classes);

}  // namespace infospec

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uucc/matrix.hpp"

namespace uucc {

/// Either a linear-in-input model g(x) = w.x + b or a fully connected ReLU network.
/// Both are stored as a list of layer widths; a linear model is the list {d, 1}.
class Architecture {
 public:
  static Architecture linear(std::size_t input_dim);
  /// widths = {d, h1, ..., 1}; throws ConfigError unless size >= 2, all positive, last == 1.
  static Architecture mlp(std::vector<std::size_t> widths);

  /// "linear", "mlp" (desk default d-32-32-1) or "mlp:<d>,<h1>,...,1".
  static Architecture parse(std::string_view text, std::size_t input_dim);

  bool is_linear() const noexcept { return linear_; }
  const std::vector<std::size_t>& widths() const noexcept { return widths_; }
  std::size_t input_dim() const noexcept { return widths_.front(); }
  /// Number of weight matrices.
  std::size_t depth() const noexcept { return widths_.size() - 1; }
  std::string describe() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;

 private:
  Architecture(bool linear, std::vector<std::size_t> widths) : linear_(linear), widths_(std::move(widths)) {}

  bool linear_ = true;
  std::vector<std::size_t> widths_;
};

struct Layer {
  Matrix weight;  // out x in
  std::vector<double> bias;
  Matrix weight_grad;
  std::vector<double> bias_grad;
};

/// Intermediate values of one forward pass, tied to the parameter version it was computed with.
struct BatchCache {
  std::uint64_t version = 0;
  Matrix input;
  std::vector<Matrix> pre_activations;  // one per hidden layer
  std::vector<Matrix> activations;      // ReLU outputs, one per hidden layer
};

struct ForwardPass {
  std::vector<double> outputs;
  BatchCache cache;
};

/// One contiguous parameter block and its gradient.
struct ParamBlock {
  std::span<double> values;
  std::span<double> grads;
};

class Model {
 public:
  /// Weights ~ U(-1, 1) / sqrt(fan_in), biases zero.
  static Model init(const Architecture& arch, std::uint64_t seed);

  const Architecture& architecture() const noexcept { return arch_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  /// Throws ShapeError if inputs.cols() != input_dim.
  ForwardPass forward(const Matrix& inputs) const;
  /// Outputs only, no cache.
  std::vector<double> outputs(const Matrix& inputs) const;

  /// Accumulates d(sum_i output_grads[i] * g(x_i)) / d params into the gradients.
  /// Throws ContractViolation for a stale cache and ShapeError for a length mismatch.
  void backward(const BatchCache& cache, std::span<const double> output_grads);

  /// Layer order, weights before biases.
  std::vector<ParamBlock> parameter_blocks();
  std::size_t parameter_count() const noexcept;
  double parameter(std::size_t flat_index) const;
  void set_parameter(std::size_t flat_index, double value);
  /// Sets layer weights/biases directly (shapes must match).
  void set_layer(std::size_t index, const Matrix& weight, std::span<const double> bias);

  void zero_grads() noexcept;
  bool has_fresh_grads() const noexcept { return fresh_grads_; }
  /// Call after parameters were changed in place through parameter_blocks().
  void mark_updated() noexcept;
  std::uint64_t version() const noexcept { return version_; }

  void save(std::ostream& out) const;
  static Model load(std::istream& in);

 private:
  Model(Architecture arch);

  Architecture arch_;
  std::vector<Layer> layers_;
  std::uint64_t version_ = 0;
  bool fresh_grads_ = false;
};

/// +1 iff g(x) > 0, otherwise -1.
std::vector<int> labels_from_outputs(std::span<const double> outputs);
std::vector<int> predict_labels(const Model& model, const Matrix& inputs);

/// sqrt of the sum of squared weight entries, per layer; biases excluded.
std::vector<double> frobenius_norms(const Model& model);

}  // namespace uucc

#include "uucc/model.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "uucc/errors.hpp"
#include "uucc/rng.hpp"

namespace uucc {
namespace {

std::atomic<std::uint64_t> g_version{0};

std::uint64_t next_version() noexcept { return g_version.fetch_add(1, std::memory_order_relaxed) + 1; }

constexpr char kMagic[4] = {'U', 'U', 'M', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

template <typename T>
T read_pod(std::istream& in, std::size_t& offset) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("truncated checkpoint", offset);
  offset += sizeof v;
  return v;
}

// out[i, :] = bias + W * in[i, :], computed with W transposed so the inner loop is an axpy.
void affine(const Matrix& in, const Layer& layer, Matrix& out) {
  const std::size_t n_in = layer.weight.cols();
  const std::size_t n_out = layer.weight.rows();
  Matrix wt(n_in, n_out);
  for (std::size_t j = 0; j < n_out; ++j)
    for (std::size_t k = 0; k < n_in; ++k) wt(k, j) = layer.weight(j, k);

  out = Matrix(in.rows(), n_out);
  for (std::size_t i = 0; i < in.rows(); ++i) {
    double* z = out.row(i).data();
    const double* x = in.row(i).data();
    std::copy(layer.bias.begin(), layer.bias.end(), z);
    for (std::size_t k = 0; k < n_in; ++k) {
      const double xk = x[k];
      const double* w = wt.row(k).data();
      for (std::size_t j = 0; j < n_out; ++j) z[j] += w[j] * xk;
    }
  }
}

void relu_inplace(Matrix& m) {
  for (double& v : m.flat()) v = v > 0.0 ? v : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Architecture

Architecture Architecture::linear(std::size_t input_dim) {
  if (input_dim == 0) throw ConfigError("linear model needs input dimension >= 1");
  return Architecture(true, {input_dim, 1});
}

Architecture Architecture::mlp(std::vector<std::size_t> widths) {
  if (widths.size() < 2) throw ConfigError("mlp needs at least two layer widths");
  if (std::any_of(widths.begin(), widths.end(), [](std::size_t w) { return w == 0; }))
    throw ConfigError("mlp layer widths must be positive");
  if (widths.back() != 1) throw ConfigError("mlp output width must be 1");
  return Architecture(false, std::move(widths));
}

Architecture Architecture::parse(std::string_view text, std::size_t input_dim) {
  if (text == "linear") return linear(input_dim);
  if (text == "mlp") return mlp({input_dim, 32, 32, 1});
  if (!text.starts_with("mlp:")) throw ConfigError("model must be 'linear', 'mlp' or 'mlp:<widths>'");
  std::vector<std::size_t> widths;
  std::string_view rest = text.substr(4);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto token = rest.substr(0, comma);
    std::size_t w = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), w);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw ConfigError("bad mlp width '" + std::string(token) + "'");
    widths.push_back(w);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (!widths.empty() && widths.front() != input_dim)
    throw ConfigError("mlp input width " + std::to_string(widths.front()) + " does not match data dimension " +
                      std::to_string(input_dim));
  return mlp(std::move(widths));
}

std::string Architecture::describe() const {
  if (linear_) return "linear";
  std::string s = "mlp:";
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(widths_[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(Architecture arch) : arch_(std::move(arch)), version_(next_version()) {
  const auto& w = arch_.widths();
  layers_.reserve(w.size() - 1);
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    Layer layer;
    layer.weight = Matrix(w[l + 1], w[l]);
    layer.bias.assign(w[l + 1], 0.0);
    layer.weight_grad = Matrix(w[l + 1], w[l]);
    layer.bias_grad.assign(w[l + 1], 0.0);
    layers_.push_back(std::move(layer));
  }
}

Model Model::init(const Architecture& arch, std::uint64_t seed) {
  Model model(arch);
  Rng rng(seed);
  for (auto& layer : model.layers_) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (double& v : layer.weight.flat()) v = scale * rng.uniform(-1.0, 1.0);
  }
  return model;
}

ForwardPass Model::forward(const Matrix& inputs) const {
  if (inputs.cols() != arch_.input_dim()) {
    throw ShapeError("input dimension " + std::to_string(inputs.cols()) + " does not match model input " +
                     std::to_string(arch_.input_dim()));
  }
  ForwardPass pass;
  pass.cache.version = version_;
  pass.cache.input = inputs;
  const Matrix* current = &pass.cache.input;
  Matrix last;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z;
    affine(*current, layers_[l], z);
    if (l + 1 == layers_.size()) {
      last = std::move(z);
      break;
    }
    pass.cache.pre_activations.push_back(z);
    relu_inplace(z);
    pass.cache.activations.push_back(std::move(z));
    current = &pass.cache.activations.back();
  }
  pass.outputs.assign(last.flat().begin(), last.flat().end());
  return pass;
}

std::vector<double> Model::outputs(const Matrix& inputs) const {
  if (inputs.cols() != arch_.input_dim()) {
    throw ShapeError("input dimension " + std::to_string(inputs.cols()) + " does not match model input " +
                     std::to_string(arch_.input_dim()));
  }
  Matrix current;
  const Matrix* in = &inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z;
    affine(*in, layers_[l], z);
    if (l + 1 < layers_.size()) relu_inplace(z);
    current = std::move(z);
    in = &current;
  }
  return {current.flat().begin(), current.flat().end()};
}

void Model::backward(const BatchCache& cache, std::span<const double> output_grads) {
  if (cache.version != version_) {
    throw ContractViolation("forward cache is stale: parameters changed since the forward pass");
  }
  const std::size_t batch = cache.input.rows();
  if (output_grads.size() != batch) {
    throw ShapeError("output gradient length " + std::to_string(output_grads.size()) + " != batch size " +
                     std::to_string(batch));
  }

  Matrix delta(batch, 1);
  std::copy(output_grads.begin(), output_grads.end(), delta.flat().begin());

  for (std::size_t l = layers_.size(); l-- > 0;) {
    Layer& layer = layers_[l];
    const Matrix& in = l == 0 ? cache.input : cache.activations[l - 1];
    const std::size_t n_out = layer.weight.rows();
    const std::size_t n_in = layer.weight.cols();

    for (std::size_t i = 0; i < batch; ++i) {
      const double* dz = delta.row(i).data();
      const double* x = in.row(i).data();
      for (std::size_t j = 0; j < n_out; ++j) {
        const double g = dz[j];
        if (g == 0.0) continue;
        double* gw = layer.weight_grad.row(j).data();
        for (std::size_t k = 0; k < n_in; ++k) gw[k] += g * x[k];
        layer.bias_grad[j] += g;
      }
    }
    if (l == 0) break;

    const Matrix& pre = cache.pre_activations[l - 1];
    Matrix prev(batch, n_in);
    for (std::size_t i = 0; i < batch; ++i) {
      const double* dz = delta.row(i).data();
      double* dx = prev.row(i).data();
      for (std::size_t j = 0; j < n_out; ++j) {
        const double g = dz[j];
        if (g == 0.0) continue;
        const double* w = layer.weight.row(j).data();
        for (std::size_t k = 0; k < n_in; ++k) dx[k] += g * w[k];
      }
      const double* z = pre.row(i).data();
      for (std::size_t k = 0; k < n_in; ++k)
        if (!(z[k] > 0.0)) dx[k] = 0.0;
    }
    delta = std::move(prev);
  }
  fresh_grads_ = true;
}

std::vector<ParamBlock> Model::parameter_blocks() {
  std::vector<ParamBlock> blocks;
  blocks.reserve(2 * layers_.size());
  for (auto& layer : layers_) {
    blocks.push_back({layer.weight.flat(), layer.weight_grad.flat()});
    blocks.push_back({layer.bias, layer.bias_grad});
  }
  return blocks;
}

std::size_t Model::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

double Model::parameter(std::size_t flat_index) const {
  for (const auto& layer : layers_) {
    if (flat_index < layer.weight.size()) return layer.weight.flat()[flat_index];
    flat_index -= layer.weight.size();
    if (flat_index < layer.bias.size()) return layer.bias[flat_index];
    flat_index -= layer.bias.size();
  }
  throw ShapeError("parameter index out of range");
}

void Model::set_parameter(std::size_t flat_index, double value) {
  for (auto& layer : layers_) {
    if (flat_index < layer.weight.size()) {
      layer.weight.flat()[flat_index] = value;
      mark_updated();
      return;
    }
    flat_index -= layer.weight.size();
    if (flat_index < layer.bias.size()) {
      layer.bias[flat_index] = value;
      mark_updated();
      return;
    }
    flat_index -= layer.bias.size();
  }
  throw ShapeError("parameter index out of range");
}

void Model::set_layer(std::size_t index, const Matrix& weight, std::span<const double> bias) {
  if (index >= layers_.size()) throw ShapeError("layer index out of range");
  Layer& layer = layers_[index];
  if (weight.rows() != layer.weight.rows() || weight.cols() != layer.weight.cols() ||
      bias.size() != layer.bias.size()) {
    throw ShapeError("layer " + std::to_string(index) + " shape mismatch");
  }
  layer.weight = weight;
  layer.bias.assign(bias.begin(), bias.end());
  mark_updated();
}

void Model::zero_grads() noexcept {
  for (auto& layer : layers_) {
    std::fill(layer.weight_grad.flat().begin(), layer.weight_grad.flat().end(), 0.0);
    std::fill(layer.bias_grad.begin(), layer.bias_grad.end(), 0.0);
  }
  fresh_grads_ = false;
}

void Model::mark_updated() noexcept { version_ = next_version(); }

// Layout: "UUML", u32 format version, u32 kind (0 linear, 1 mlp), u32 width count,
// u32 widths..., then per layer the row-major weights followed by the biases as f64.
void Model::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  write_u32(out, kFormatVersion);
  write_u32(out, arch_.is_linear() ? 0u : 1u);
  write_u32(out, static_cast<std::uint32_t>(arch_.widths().size()));
  for (std::size_t w : arch_.widths()) write_u32(out, static_cast<std::uint32_t>(w));
  for (const auto& layer : layers_) {
    for (double v : layer.weight.flat()) write_f64(out, v);
    for (double v : layer.bias) write_f64(out, v);
  }
}

Model Model::load(std::istream& in) {
  std::size_t offset = 0;
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError("bad checkpoint magic", 0);
  offset = 4;
  const auto version = read_pod<std::uint32_t>(in, offset);
  if (version != kFormatVersion) throw FormatError("unsupported checkpoint version", 4);
  const auto kind = read_pod<std::uint32_t>(in, offset);
  if (kind > 1) throw FormatError("unknown architecture kind", 8);
  const auto count = read_pod<std::uint32_t>(in, offset);
  if (count < 2 || count > 1024) throw FormatError("implausible layer count", 12);
  std::vector<std::size_t> widths;
  for (std::uint32_t i = 0; i < count; ++i) widths.push_back(read_pod<std::uint32_t>(in, offset));

  Architecture arch = kind == 0 ? Architecture::linear(widths.front()) : Architecture::mlp(widths);
  if (arch.widths() != widths) throw FormatError("linear checkpoint must have widths {d, 1}", 16);
  Model model(arch);
  for (auto& layer : model.layers_) {
    for (double& v : layer.weight.flat()) v = read_pod<double>(in, offset);
    for (double& v : layer.bias) v = read_pod<double>(in, offset);
  }
  return model;
}

std::vector<int> labels_from_outputs(std::span<const double> outputs) {
  std::vector<int> labels(outputs.size());
  std::transform(outputs.begin(), outputs.end(), labels.begin(), [](double g) { return g > 0.0 ? 1 : -1; });
  return labels;
}

std::vector<int> predict_labels(const Model& model, const Matrix& inputs) {
  return labels_from_outputs(model.outputs(inputs));
}

std::vector<double> frobenius_norms(const Model& model) {
  std::vector<double> norms;
  for (const auto& layer : model.layers()) {
    double sq = 0.0;
    for (double v : layer.weight.flat()) sq += v * v;
    norms.push_back(std::sqrt(sq));
  }
  return norms;
}

}  // namespace uucc

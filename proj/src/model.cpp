// SPDX-License-Identifier: Apache-2.0
#include "sepred/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sepred/jsonio.hpp"

namespace sepred {

std::string to_string(ModelVariant v) {
  return v == ModelVariant::Dpnn ? "dpnn" : "conv1d";
}

ModelVariant variant_from_string(const std::string& name) {
  if (name == "dpnn") return ModelVariant::Dpnn;
  if (name == "conv1d") return ModelVariant::Conv1d;
  throw ConfigError("unknown model variant: '" + name + "' (expected dpnn or conv1d)");
}

void ModelSpec::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be a positive integer");
  };
  positive(hidden_units, "hidden_units");
  positive(hidden_layers, "hidden_layers");
  positive(conv_filters, "conv_filters");
  positive(conv_kernel_width, "conv_kernel_width");
  positive(epochs, "epochs");
  positive(batch_size, "batch_size");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must be in (0,1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must be in (0,1)");
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be positive");
}

std::vector<std::vector<std::size_t>> parameter_shapes(const ModelSpec& spec,
                                                       std::size_t input_width) {
  std::vector<std::vector<std::size_t>> shapes;
  if (spec.variant == ModelVariant::Dpnn) {
    std::size_t in = input_width;
    for (std::size_t l = 0; l < spec.hidden_layers; ++l) {
      shapes.push_back({in, spec.hidden_units});
      shapes.push_back({spec.hidden_units});
      in = spec.hidden_units;
    }
    shapes.push_back({in, ModelSpec::output_units});
    shapes.push_back({ModelSpec::output_units});
  } else {
    const std::size_t out_len = input_width - spec.conv_kernel_width + 1;
    shapes.push_back({spec.conv_filters, spec.conv_kernel_width, 1});
    shapes.push_back({spec.conv_filters});
    shapes.push_back({out_len * spec.conv_filters, ModelSpec::output_units});
    shapes.push_back({ModelSpec::output_units});
  }
  return shapes;
}

TrainedModel::TrainedModel(ModelSpec spec, std::size_t input_width,
                           std::vector<Tensor> params)
    : spec_(std::move(spec)), input_width_(input_width), params_(std::move(params)) {
  const auto expected = parameter_shapes(spec_, input_width_);
  if (params_.size() != expected.size()) {
    throw ShapeError("model: expected " + std::to_string(expected.size()) +
                     " parameter blocks, got " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (params_[i].shape() != expected[i]) {
      throw ShapeError("model: parameter block " + std::to_string(i) + " has shape " +
                       params_[i].shape_string() + ", expected " +
                       Tensor(expected[i]).shape_string());
    }
  }
}

namespace {

Tensor glorot_uniform(const std::vector<std::size_t>& shape, std::size_t fan_in,
                      std::size_t fan_out, SeededRng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(shape);
  for (double& v : w.values()) v = rng.next_uniform(-limit, limit);
  return w;
}

// m += row vector b on every row
void add_bias_rows(Tensor& m, const Tensor& b) {
  for (std::size_t i = 0; i < m.dim(0); ++i)
    for (std::size_t j = 0; j < m.dim(1); ++j) m(i, j) += b(j);
}

Tensor column_sums(const Tensor& m) {
  Tensor out({m.dim(1)});
  for (std::size_t i = 0; i < m.dim(0); ++i)
    for (std::size_t j = 0; j < m.dim(1); ++j) out(j) += m(i, j);
  return out;
}

void multiply_inplace(Tensor& a, const Tensor& b) {
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] *= bv[i];
}

// Activations kept alongside the forward pass so backward can reuse them.
struct ForwardTrace {
  std::vector<Tensor> hidden_pre;  // Dpnn: pre-activation per hidden layer
  std::vector<Tensor> hidden_act;  // Dpnn: input, then each relu output
  std::vector<Tensor> conv_pre;    // Conv1d: per-sample TxF pre-activation
  Tensor flat;                     // Conv1d: B x (T*F) relu output
  Tensor probs;
};

Tensor sample_as_signal(const Tensor& batch, std::size_t row) {
  Tensor s({batch.dim(1), 1});
  for (std::size_t j = 0; j < batch.dim(1); ++j) s(j, 0) = batch(row, j);
  return s;
}

ForwardTrace run_forward(const TrainedModel& model, const Tensor& batch) {
  if (batch.rank() != 2 || batch.dim(1) != model.input_width()) {
    throw ShapeError("forward: batch shape " + batch.shape_string() +
                     " does not match model input width " +
                     std::to_string(model.input_width()));
  }
  const auto& spec = model.spec();
  const auto& params = model.params();
  ForwardTrace trace;

  Tensor logits;
  if (spec.variant == ModelVariant::Dpnn) {
    trace.hidden_act.push_back(batch);
    for (std::size_t l = 0; l < spec.hidden_layers; ++l) {
      Tensor z = matmul(trace.hidden_act.back(), params[2 * l]);
      add_bias_rows(z, params[2 * l + 1]);
      trace.hidden_pre.push_back(z);
      trace.hidden_act.push_back(relu(z));
    }
    logits = matmul(trace.hidden_act.back(), params[2 * spec.hidden_layers]);
    add_bias_rows(logits, params[2 * spec.hidden_layers + 1]);
  } else {
    const std::size_t batch_n = batch.dim(0);
    const std::size_t out_len = model.input_width() - spec.conv_kernel_width + 1;
    const std::size_t flat_width = out_len * spec.conv_filters;
    trace.flat = Tensor({batch_n, flat_width});
    for (std::size_t i = 0; i < batch_n; ++i) {
      Tensor pre = conv1d_forward(sample_as_signal(batch, i), params[0], params[1]);
      Tensor act = relu(pre);
      auto flat_row = act.values();
      for (std::size_t j = 0; j < flat_width; ++j) trace.flat(i, j) = flat_row[j];
      trace.conv_pre.push_back(std::move(pre));
    }
    logits = matmul(trace.flat, params[2]);
    add_bias_rows(logits, params[3]);
  }
  trace.probs = softmax(logits);
  return trace;
}

}  // namespace

TrainedModel build_model(const ModelSpec& spec, std::size_t input_width, SeededRng& rng) {
  spec.validate();
  if (input_width == 0) throw ConfigError("input_width must be positive");
  if (spec.variant == ModelVariant::Conv1d && input_width < spec.conv_kernel_width) {
    throw ConfigError("input width " + std::to_string(input_width) +
                      " is smaller than the conv kernel width " +
                      std::to_string(spec.conv_kernel_width));
  }
  std::vector<Tensor> params;
  if (spec.variant == ModelVariant::Dpnn) {
    std::size_t in = input_width;
    for (std::size_t l = 0; l < spec.hidden_layers; ++l) {
      params.push_back(glorot_uniform({in, spec.hidden_units}, in, spec.hidden_units, rng));
      params.push_back(Tensor({spec.hidden_units}));
      in = spec.hidden_units;
    }
    params.push_back(
        glorot_uniform({in, ModelSpec::output_units}, in, ModelSpec::output_units, rng));
    params.push_back(Tensor({ModelSpec::output_units}));
  } else {
    const std::size_t width = spec.conv_kernel_width;
    const std::size_t out_len = input_width - width + 1;
    const std::size_t flat_width = out_len * spec.conv_filters;
    // Keras-style conv fan counts: fan_in = Cin*K, fan_out = F*K.
    params.push_back(
        glorot_uniform({spec.conv_filters, width, 1}, width, spec.conv_filters * width, rng));
    params.push_back(Tensor({spec.conv_filters}));
    params.push_back(glorot_uniform({flat_width, ModelSpec::output_units}, flat_width,
                                    ModelSpec::output_units, rng));
    params.push_back(Tensor({ModelSpec::output_units}));
  }
  return TrainedModel(spec, input_width, std::move(params));
}

Tensor forward(const TrainedModel& model, const Tensor& batch) {
  return run_forward(model, batch).probs;
}

double cross_entropy(const Tensor& probs, const Tensor& onehot) {
  if (probs.rank() != 2 || !probs.same_shape(onehot)) {
    throw ShapeError("cross_entropy: probs " + probs.shape_string() + " vs targets " +
                     onehot.shape_string());
  }
  const std::size_t batch_n = probs.dim(0);
  if (batch_n == 0) throw ContractError("cross_entropy: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < batch_n; ++i) {
    for (std::size_t j = 0; j < probs.dim(1); ++j) {
      const double t = onehot(i, j);
      if (t == 0.0) continue;
      const double p = std::clamp(probs(i, j), 1e-12, 1.0);
      total -= t * std::log(p);
    }
  }
  return total / static_cast<double>(batch_n);
}

std::vector<Tensor> backward(const TrainedModel& model, const Tensor& batch,
                             const Tensor& target) {
  ForwardTrace trace = run_forward(model, batch);
  if (!trace.probs.same_shape(target)) {
    throw ShapeError("backward: target shape " + target.shape_string() +
                     " does not match output " + trace.probs.shape_string());
  }
  const auto& spec = model.spec();
  const auto& params = model.params();
  const std::size_t batch_n = batch.dim(0);
  if (batch_n == 0) throw ContractError("backward: empty batch");

  // Softmax + cross-entropy fused at the output.
  Tensor dlogits = trace.probs;
  for (std::size_t i = 0; i < dlogits.size(); ++i) {
    dlogits.values()[i] =
        (dlogits.values()[i] - target.values()[i]) / static_cast<double>(batch_n);
  }

  std::vector<Tensor> grads(params.size());
  if (spec.variant == ModelVariant::Dpnn) {
    const std::size_t out_block = 2 * spec.hidden_layers;
    grads[out_block] = matmul(transpose(trace.hidden_act.back()), dlogits);
    grads[out_block + 1] = column_sums(dlogits);
    Tensor dact = matmul(dlogits, transpose(params[out_block]));
    for (std::size_t l = spec.hidden_layers; l-- > 0;) {
      Tensor dz = std::move(dact);
      multiply_inplace(dz, relu_grad(trace.hidden_pre[l]));
      grads[2 * l] = matmul(transpose(trace.hidden_act[l]), dz);
      grads[2 * l + 1] = column_sums(dz);
      if (l > 0) dact = matmul(dz, transpose(params[2 * l]));
    }
  } else {
    const std::size_t out_len = model.input_width() - spec.conv_kernel_width + 1;
    grads[2] = matmul(transpose(trace.flat), dlogits);
    grads[3] = column_sums(dlogits);
    Tensor dflat = matmul(dlogits, transpose(params[2]));
    grads[0] = Tensor({spec.conv_filters, spec.conv_kernel_width, 1});
    grads[1] = Tensor({spec.conv_filters});
    for (std::size_t i = 0; i < batch_n; ++i) {
      Tensor dpre({out_len, spec.conv_filters});
      for (std::size_t j = 0; j < dpre.size(); ++j) dpre.values()[j] = dflat(i, j);
      multiply_inplace(dpre, relu_grad(trace.conv_pre[i]));
      Conv1dGrads g = conv1d_backward(sample_as_signal(batch, i), params[0], dpre);
      for (std::size_t j = 0; j < grads[0].size(); ++j)
        grads[0].values()[j] += g.kernels.values()[j];
      for (std::size_t j = 0; j < grads[1].size(); ++j)
        grads[1].values()[j] += g.bias.values()[j];
    }
  }
  return grads;
}

AdamState make_adam_state(const std::vector<Tensor>& params) {
  AdamState state;
  for (const auto& p : params) {
    state.m.emplace_back(p.shape());
    state.v.emplace_back(p.shape());
  }
  return state;
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state, std::size_t step, const ModelSpec& spec) {
  if (step == 0) throw ContractError("adam_step: step index counts from 1");
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw ShapeError("adam_step: parameter/gradient/state block counts disagree");
  }
  const double b1 = spec.adam_beta1, b2 = spec.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i])) {
      throw ShapeError("adam_step: gradient block " + std::to_string(i) + " has shape " +
                       grads[i].shape_string() + ", expected " + params[i].shape_string());
    }
    auto p = params[i].values();
    auto g = grads[i].values();
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= spec.learning_rate * mhat / (std::sqrt(vhat) + spec.adam_epsilon);
    }
  }
}

Tensor onehot_labels(const std::vector<int>& y) {
  Tensor out({y.size(), ModelSpec::output_units});
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw ContractError("labels must be 0 or 1, got " + std::to_string(y[i]) +
                          " at index " + std::to_string(i));
    }
    out(i, static_cast<std::size_t>(y[i])) = 1.0;
  }
  return out;
}

TrainResult train(const ModelSpec& spec, const Tensor& x, const std::vector<int>& y,
                  SeededRng& rng) {
  spec.validate();
  if (x.rank() != 2) throw ShapeError("train: x must be NxF, got " + x.shape_string());
  const std::size_t n = x.dim(0);
  if (n == 0) throw ContractError("train: empty training set");
  if (y.size() != n) {
    throw ShapeError("train: " + std::to_string(n) + " rows vs " +
                     std::to_string(y.size()) + " labels");
  }
  const Tensor onehot = onehot_labels(y);

  TrainedModel model = build_model(spec, x.dim(1), rng);
  AdamState state = make_adam_state(model.params());
  TrainHistory history;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += spec.batch_size) {
      const std::size_t size = std::min(spec.batch_size, n - start);
      Tensor bx({size, x.dim(1)});
      Tensor bt({size, ModelSpec::output_units});
      for (std::size_t r = 0; r < size; ++r) {
        const std::size_t src = order[start + r];
        for (std::size_t c = 0; c < x.dim(1); ++c) bx(r, c) = x(src, c);
        bt(r, 0) = onehot(src, 0);
        bt(r, 1) = onehot(src, 1);
      }
      const auto grads = backward(model, bx, bt);
      adam_step(model.params(), grads, state, ++step, spec);
    }
    const Tensor probs = forward(model, x);
    history.per_epoch_loss.push_back(cross_entropy(probs, onehot));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int predicted = probs(i, 1) >= 0.5 ? 1 : 0;
      if (predicted == y[i]) ++correct;
    }
    history.per_epoch_accuracy.push_back(static_cast<double>(correct) /
                                         static_cast<double>(n));
  }
  return TrainResult{std::move(model), std::move(history)};
}

double grad_check(const ModelSpec& spec, const Tensor& x, const std::vector<int>& y,
                  double epsilon, double corruption) {
  if (x.dim(0) == 0 || x.dim(0) > 8) {
    throw ContractError("grad_check: batch size must be in [1, 8]");
  }
  const Tensor onehot = onehot_labels(y);
  SeededRng rng(spec.seed);
  TrainedModel model = build_model(spec, x.dim(1), rng);

  std::vector<Tensor> analytic = backward(model, x, onehot);
  if (corruption != 0.0) analytic[0].values()[0] += corruption;

  double max_rel = 0.0;
  auto& params = model.params();
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto block = params[b].values();
    for (std::size_t j = 0; j < block.size(); ++j) {
      const double saved = block[j];
      block[j] = saved + epsilon;
      const double loss_hi = cross_entropy(forward(model, x), onehot);
      block[j] = saved - epsilon;
      const double loss_lo = cross_entropy(forward(model, x), onehot);
      block[j] = saved;
      const double numeric = (loss_hi - loss_lo) / (2.0 * epsilon);
      const double a = analytic[b].values()[j];
      const double rel =
          std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

std::string TrainedModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = "sepred-model";
  doc["format_version"] = 1;
  doc["input_width"] = input_width_;
  doc["spec"] = {
      {"variant", to_string(spec_.variant)},
      {"hidden_units", spec_.hidden_units},
      {"hidden_layers", spec_.hidden_layers},
      {"output_units", ModelSpec::output_units},
      {"conv_filters", spec_.conv_filters},
      {"conv_kernel_width", spec_.conv_kernel_width},
      {"epochs", spec_.epochs},
      {"batch_size", spec_.batch_size},
      {"learning_rate", spec_.learning_rate},
      {"adam_beta1", spec_.adam_beta1},
      {"adam_beta2", spec_.adam_beta2},
      {"adam_epsilon", spec_.adam_epsilon},
      {"seed", spec_.seed},
  };
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& p : params_) {
    nlohmann::json block;
    block["shape"] = p.shape();
    block["values"] = std::vector<double>(p.values().begin(), p.values().end());
    layers.push_back(std::move(block));
  }
  doc["layers"] = std::move(layers);
  return dump_json(doc);
}

void TrainedModel::save_json(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << to_json() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TrainedModel TrainedModel::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  try {
    if (doc.at("format") != "sepred-model") {
      throw SchemaError("model document: unexpected format tag");
    }
    if (doc.at("format_version") != 1) {
      throw SchemaError("model document: unsupported format_version");
    }
    const auto& sj = doc.at("spec");
    ModelSpec spec;
    spec.variant = variant_from_string(sj.at("variant").get<std::string>());
    spec.hidden_units = sj.at("hidden_units").get<std::size_t>();
    spec.hidden_layers = sj.at("hidden_layers").get<std::size_t>();
    spec.conv_filters = sj.at("conv_filters").get<std::size_t>();
    spec.conv_kernel_width = sj.at("conv_kernel_width").get<std::size_t>();
    spec.epochs = sj.at("epochs").get<std::size_t>();
    spec.batch_size = sj.at("batch_size").get<std::size_t>();
    spec.learning_rate = sj.at("learning_rate").get<double>();
    spec.adam_beta1 = sj.at("adam_beta1").get<double>();
    spec.adam_beta2 = sj.at("adam_beta2").get<double>();
    spec.adam_epsilon = sj.at("adam_epsilon").get<double>();
    spec.seed = sj.at("seed").get<std::uint64_t>();
    spec.validate();
    const auto input_width = doc.at("input_width").get<std::size_t>();
    std::vector<Tensor> params;
    for (const auto& block : doc.at("layers")) {
      params.emplace_back(block.at("shape").get<std::vector<std::size_t>>(),
                          block.at("values").get<std::vector<double>>());
    }
    for (const auto& p : params) {
      for (double v : p.values()) {
        if (!std::isfinite(v)) throw ParseError("model document: non-finite parameter");
      }
    }
    return TrainedModel(spec, input_width, std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model document: ") + e.what());
  }
}

TrainedModel TrainedModel::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace sepred

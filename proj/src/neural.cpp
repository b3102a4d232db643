#include "fastcar/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace fastcar {

void MlpSpec::validate() const {
  if (layer_widths.size() < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "an MLP needs input, at least one hidden layer and output");
  }
  for (const auto w : layer_widths) {
    if (w == 0) {
      throw Error(ErrorCode::InvalidArgument, "layer widths must be >= 1");
    }
  }
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  std::size_t total = 0;
  const auto& w = spec_.layer_widths;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    offsets_.push_back(total);
    total += w[l] * w[l + 1] + w[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::zeros(const MlpSpec& spec) { return Mlp(spec); }

Mlp Mlp::initialize(const MlpSpec& spec, std::uint64_t seed) {
  Mlp model(spec);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto fan_in = static_cast<double>(spec.layer_widths[l]);
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& x : model.layer_weights(l)) x = dist(rng);
  }
  return model;
}

LayerView Mlp::layer(std::size_t i) const {
  const std::size_t in = spec_.layer_widths.at(i);
  const std::size_t out = spec_.layer_widths.at(i + 1);
  const std::span<const double> all(params_);
  return {in, out, all.subspan(offsets_[i], in * out),
          all.subspan(offsets_[i] + in * out, out)};
}

std::span<double> Mlp::layer_weights(std::size_t i) {
  const std::size_t in = spec_.layer_widths.at(i);
  const std::size_t out = spec_.layer_widths.at(i + 1);
  return std::span<double>(params_).subspan(offsets_[i], in * out);
}

std::span<double> Mlp::layer_bias(std::size_t i) {
  const std::size_t in = spec_.layer_widths.at(i);
  const std::size_t out = spec_.layer_widths.at(i + 1);
  return std::span<double>(params_).subspan(offsets_[i] + in * out, out);
}

namespace {

void affine(const LayerView& layer, std::span<const double> in,
            std::vector<double>& out) {
  out.resize(layer.out);
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double* row = layer.weights.data() + r * layer.in;
    double acc = layer.bias[r];
    for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * in[c];
    out[r] = acc;
  }
}

void check_input(const MlpSpec& spec, std::size_t dim) {
  if (dim != spec.input_dim()) {
    throw Error(ErrorCode::DimMismatch,
                "input has " + std::to_string(dim) + " features, model expects " +
                    std::to_string(spec.input_dim()));
  }
}

}  // namespace

std::vector<double> Mlp::forward(std::span<const double> input) const {
  check_input(spec_, input.size());
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    affine(layer(l), current, next);
    if (l + 1 < layer_count()) {
      for (auto& v : next) v = std::max(v, 0.0);
    }
    current.swap(next);
  }
  return current;
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json doc;
  doc["spec"] = {{"layer_widths", spec_.layer_widths}, {"activation", "relu"}};
  auto layers = nlohmann::json::array();
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto view = layer(l);
    layers.push_back(
        {{"in", view.in},
         {"out", view.out},
         {"weights", std::vector<double>(view.weights.begin(), view.weights.end())},
         {"bias", std::vector<double>(view.bias.begin(), view.bias.end())}});
  }
  doc["layers"] = std::move(layers);
  return doc;
}

Mlp Mlp::from_json(const nlohmann::json& doc) {
  try {
    MlpSpec spec{doc.at("spec").at("layer_widths").get<std::vector<std::size_t>>()};
    if (doc["spec"].value("activation", "relu") != "relu") {
      throw Error(ErrorCode::Parse, "only relu activations are supported");
    }
    Mlp model(spec);
    const auto& layers = doc.at("layers");
    if (layers.size() != model.layer_count()) {
      throw Error(ErrorCode::Parse, "layer count disagrees with spec");
    }
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      const auto w = layers[l].at("weights").get<std::vector<double>>();
      const auto b = layers[l].at("bias").get<std::vector<double>>();
      auto dw = model.layer_weights(l);
      auto db = model.layer_bias(l);
      if (w.size() != dw.size() || b.size() != db.size()) {
        throw Error(ErrorCode::Parse,
                    "layer " + std::to_string(l) + " has the wrong shape");
      }
      std::copy(w.begin(), w.end(), dw.begin());
      std::copy(b.begin(), b.end(), db.begin());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("checkpoint: ") + e.what());
  }
}

void LossSpec::check_against(const MlpSpec& spec) const {
  if (kind == LossKind::Mse && spec.output_dim() != 1) {
    throw Error(ErrorCode::DimMismatch, "MSE loss expects a single output");
  }
  if (kind == LossKind::TwoHead && spec.output_dim() != n_classes + 1) {
    throw Error(ErrorCode::DimMismatch,
                "two-head loss expects n_classes + 1 outputs");
  }
}

namespace {

// Per-sample loss parts and d(loss)/d(output), unscaled by batch size.
struct SampleLoss {
  double classification = 0.0;
  double regression = 0.0;
};

SampleLoss sample_loss(std::span<const double> out, const Target& target,
                       const LossSpec& loss, std::vector<double>* d_out) {
  SampleLoss parts;
  if (d_out) d_out->assign(out.size(), 0.0);
  if (loss.kind == LossKind::Mse) {
    const double r = out[0] - target.value;
    parts.regression = r * r;
    if (d_out) (*d_out)[0] = loss.regression_weight * 2.0 * r;
    return parts;
  }
  const std::size_t n = loss.n_classes;
  if (target.class_index < 1 || static_cast<std::size_t>(target.class_index) > n) {
    throw Error(ErrorCode::ClassOutOfRange,
                "target class " + std::to_string(target.class_index));
  }
  const auto c = static_cast<std::size_t>(target.class_index - 1);
  const double peak = *std::max_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n));
  double norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) norm += std::exp(out[j] - peak);
  const double log_norm = std::log(norm) + peak;
  parts.classification = log_norm - out[c];
  const double r = out[n] - target.value;
  parts.regression = r * r;
  if (d_out) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::exp(out[j] - log_norm);
      (*d_out)[j] = loss.class_weight * (p - (j == c ? 1.0 : 0.0));
    }
    (*d_out)[n] = loss.regression_weight * 2.0 * r;
  }
  return parts;
}

LossBreakdown combine(const LossSpec& loss, double cls_sum, double reg_sum,
                      std::size_t count) {
  LossBreakdown out;
  const auto b = static_cast<double>(count);
  out.classification = cls_sum / b;
  out.regression = reg_sum / b;
  out.data = loss.regression_weight * out.regression;
  if (loss.kind == LossKind::TwoHead) {
    out.data += loss.class_weight * out.classification;
  }
  return out;
}

double decay_term(std::span<const double> params, double weight_decay) {
  if (weight_decay == 0.0) return 0.0;
  double sq = 0.0;
  for (const double p : params) sq += p * p;
  return 0.5 * weight_decay * sq;
}

void check_batch(const Mlp& model, const TrainingData& data,
                 std::span<const std::size_t> batch, const LossSpec& loss) {
  loss.check_against(model.spec());
  if (batch.empty()) throw Error(ErrorCode::EmptyInput, "empty batch");
  if (data.targets.size() != data.features.size()) {
    throw Error(ErrorCode::LengthMismatch, "features and targets differ");
  }
  for (const auto i : batch) {
    if (i >= data.size()) {
      throw Error(ErrorCode::InvalidArgument, "batch index out of range");
    }
  }
}

}  // namespace

LossBreakdown evaluate_loss(const Mlp& model, const TrainingData& data,
                            std::span<const std::size_t> batch,
                            const LossSpec& loss, double weight_decay) {
  check_batch(model, data, batch, loss);
  double cls_sum = 0.0;
  double reg_sum = 0.0;
  for (const auto i : batch) {
    const auto out = model.forward(data.features[i]);
    const auto parts = sample_loss(out, data.targets[i], loss, nullptr);
    cls_sum += parts.classification;
    reg_sum += parts.regression;
  }
  auto result = combine(loss, cls_sum, reg_sum, batch.size());
  result.decay = decay_term(model.params(), weight_decay);
  return result;
}

LossBreakdown backward(const Mlp& model, const TrainingData& data,
                       std::span<const std::size_t> batch,
                       const LossSpec& loss, double weight_decay,
                       std::vector<double>& grad) {
  check_batch(model, data, batch, loss);
  const std::size_t n_layers = model.layer_count();
  grad.assign(model.param_count(), 0.0);

  // acts[l] is the input to layer l; pre[l] its affine output.
  std::vector<std::vector<double>> acts(n_layers + 1);
  std::vector<std::vector<double>> pre(n_layers);
  std::vector<double> delta;
  std::vector<double> delta_prev;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  double cls_sum = 0.0;
  double reg_sum = 0.0;
  for (const auto idx : batch) {
    const auto& x = data.features[idx];
    check_input(model.spec(), x.size());
    acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
      affine(model.layer(l), acts[l], pre[l]);
      acts[l + 1] = pre[l];
      if (l + 1 < n_layers) {
        for (auto& v : acts[l + 1]) v = std::max(v, 0.0);
      }
    }
    const auto parts = sample_loss(acts[n_layers], data.targets[idx], loss, &delta);
    cls_sum += parts.classification;
    reg_sum += parts.regression;
    for (auto& d : delta) d *= inv_batch;

    std::size_t offset = model.param_count();
    for (std::size_t l = n_layers; l-- > 0;) {
      const auto view = model.layer(l);
      offset -= view.in * view.out + view.out;
      double* gw = grad.data() + offset;
      double* gb = gw + view.in * view.out;
      const auto& a = acts[l];
      for (std::size_t r = 0; r < view.out; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        double* row = gw + r * view.in;
        for (std::size_t c = 0; c < view.in; ++c) row[c] += d * a[c];
        gb[r] += d;
      }
      if (l == 0) break;
      delta_prev.assign(view.in, 0.0);
      for (std::size_t r = 0; r < view.out; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        const double* row = view.weights.data() + r * view.in;
        for (std::size_t c = 0; c < view.in; ++c) delta_prev[c] += row[c] * d;
      }
      const auto& z = pre[l - 1];
      for (std::size_t c = 0; c < view.in; ++c) {
        if (!(z[c] > 0.0)) delta_prev[c] = 0.0;
      }
      delta.swap(delta_prev);
    }
  }

  auto result = combine(loss, cls_sum, reg_sum, batch.size());
  if (weight_decay != 0.0) {
    const auto params = model.params();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] += weight_decay * params[i];
    }
    result.decay = decay_term(params, weight_decay);
  }
  return result;
}

Adam::Adam(std::size_t n_params, double learning_rate, double beta1,
           double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      m_(n_params, 0.0),
      v_(n_params, 0.0) {
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  }
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw Error(ErrorCode::LengthMismatch, "Adam state size mismatch");
  }
  ++t_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

PlateauScheduler::PlateauScheduler(double initial_lr, PlateauConfig config)
    : lr_(initial_lr),
      config_(config),
      best_(std::numeric_limits<double>::infinity()) {
  if (!(config.factor > 0.0 && config.factor < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "plateau factor must be in (0, 1)");
  }
  if (config.patience < 1) {
    throw Error(ErrorCode::InvalidArgument, "plateau patience must be >= 1");
  }
}

double PlateauScheduler::step(double val_loss) {
  if (val_loss < best_ - config_.threshold) {
    best_ = val_loss;
    bad_epochs_ = 0;
  } else {
    ++bad_epochs_;
  }
  if (bad_epochs_ > config_.patience) {
    lr_ *= config_.factor;
    ++reductions_;
    bad_epochs_ = 0;
  }
  return lr_;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  }
  if (!(weight_decay >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "weight_decay must be >= 0");
  }
  if (!(scheduler.factor > 0.0 && scheduler.factor < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "factor must be in (0, 1)");
  }
  if (scheduler.patience < 1) {
    throw Error(ErrorCode::InvalidArgument, "patience must be >= 1");
  }
  if (max_epochs < 1 || batch_size < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "max_epochs and batch_size must be >= 1");
  }
  if (hidden_widths.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one hidden layer");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"weight_decay", weight_decay},
          {"factor", scheduler.factor},
          {"patience", scheduler.patience},
          {"max_epochs", max_epochs},
          {"batch_size", batch_size},
          {"seed", seed},
          {"hidden", hidden_widths}};
}

nlohmann::json TrainTrace::to_json() const {
  auto doc = nlohmann::json::array();
  for (const auto& e : epochs) {
    doc.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"val_loss", e.val_loss},
                   {"mean_abs_gradient", e.mean_abs_gradient},
                   {"learning_rate", e.learning_rate}});
  }
  return doc;
}

TrainResult train(Mlp model, const TrainingData& train_data,
                  const TrainingData& val_data, const LossSpec& loss,
                  const TrainConfig& config) {
  config.validate();
  loss.check_against(model.spec());
  if (model.spec().input_dim() == 0) {
    throw Error(ErrorCode::DimMismatch, "cannot train on zero features");
  }
  if (train_data.size() == 0) {
    throw Error(ErrorCode::EmptyInput, "no training records");
  }

  Adam optimizer(model.param_count(), config.learning_rate);
  PlateauScheduler scheduler(config.learning_rate, config.scheduler);
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> val_all(val_data.size());
  std::iota(val_all.begin(), val_all.end(), std::size_t{0});

  TrainTrace trace;
  std::vector<double> grad;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = optimizer.learning_rate();

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const auto parts =
          backward(model, train_data, batch, loss, config.weight_decay, grad);
      if (!std::isfinite(parts.data)) {
        throw TrainingAborted("loss became non-finite in epoch " +
                                  std::to_string(epoch),
                              std::move(trace));
      }
      loss_sum += parts.data * static_cast<double>(batch.size());
      optimizer.step(model.params(), grad);
      if (stop == order.size()) {
        double abs_sum = 0.0;
        for (const double g : grad) abs_sum += std::abs(g);
        stats.mean_abs_gradient = abs_sum / static_cast<double>(grad.size());
      }
    }
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    stats.val_loss = val_data.size() > 0
                         ? evaluate_loss(model, val_data, val_all, loss, 0.0).data
                         : stats.train_loss;
    if (!std::isfinite(stats.val_loss)) {
      throw TrainingAborted("validation loss became non-finite in epoch " +
                                std::to_string(epoch),
                            std::move(trace));
    }
    trace.epochs.push_back(stats);
    optimizer.set_learning_rate(scheduler.step(stats.val_loss));
  }
  return {std::move(model), std::move(trace)};
}

nlohmann::json GuidelineVerdict::to_json() const {
  return {{"passed", passed()},
          {"loss_condition", loss_condition},
          {"gradient_condition", gradient_condition},
          {"min_loss_ratio", min_loss_ratio},
          {"max_gradient_ratio", max_gradient_ratio},
          {"epochs_checked", epochs_checked}};
}

namespace {

double ratio(double value, double reference) {
  if (reference == 0.0) {
    return value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return value / reference;
}

}  // namespace

GuidelineVerdict guideline_check(const TrainTrace& trace) {
  if (trace.epochs.size() < 2) {
    throw Error(ErrorCode::InsufficientEpochs,
                "guideline needs at least 2 epochs, trace has " +
                    std::to_string(trace.epochs.size()));
  }
  const std::size_t last = std::min<std::size_t>(20, trace.epochs.size());
  const auto& first = trace.epochs.front();
  GuidelineVerdict verdict;
  verdict.epochs_checked = last;
  verdict.min_loss_ratio = std::numeric_limits<double>::infinity();
  verdict.max_gradient_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < last; ++i) {
    const auto& e = trace.epochs[i];
    verdict.min_loss_ratio =
        std::min(verdict.min_loss_ratio, ratio(e.val_loss, first.val_loss));
    verdict.max_gradient_ratio = std::max(
        verdict.max_gradient_ratio,
        ratio(e.mean_abs_gradient, first.mean_abs_gradient));
  }
  verdict.loss_condition = verdict.min_loss_ratio <= 0.5;
  verdict.gradient_condition = verdict.max_gradient_ratio >= 2.0;
  return verdict;
}

}  // namespace fastcar

#include "fairgen/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fairgen/text_io.hpp"

namespace fairgen {

void AdamState::update(std::vector<double>& params, const std::vector<double>& grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= cfg_.step * mhat / (std::sqrt(vhat) + cfg_.epsilon);
  }
}

MlpModel::MlpModel(int input_dim, int num_classes, MlpConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)) {
  if (input_dim < 1 || num_classes < 2)
    throw std::invalid_argument("MLP needs input_dim >= 1 and num_classes >= 2");
  if (cfg_.dropout < 0.0 || cfg_.dropout >= 1.0)
    throw std::invalid_argument("dropout must be in [0, 1)");
  dims_.push_back(input_dim);
  for (int h : cfg_.hidden) {
    if (h < 1)
      throw std::invalid_argument("hidden layer size must be >= 1");
    dims_.push_back(h);
  }
  dims_.push_back(num_classes);

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const int fan_in = dims_[l];
    const int fan_out = dims_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (double& v : w)
      v = (2.0 * rng.uniform() - 1.0) * bound;
    weights.push_back(std::move(w));
    biases.emplace_back(fan_out, 0.0);
  }
}

namespace {

void affine(const std::vector<double>& w, const std::vector<double>& b,
            const double* in, int in_dim, double* out, int out_dim) {
  for (int o = 0; o < out_dim; ++o) {
    double acc = b[o];
    const double* row = w.data() + static_cast<std::size_t>(o) * in_dim;
    for (int i = 0; i < in_dim; ++i)
      acc += row[i] * in[i];
    out[o] = acc;
  }
}

// Full forward pass keeping every activation; `multipliers` may be null
// (eval) or hold one vector per hidden layer.
struct ForwardCache {
  std::vector<std::vector<double>> act;  // act[0] = input copy
};

ForwardCache forward_cached(const MlpModel& model, const float* x,
                            const std::vector<std::vector<double>>* multipliers) {
  const auto& dims = model.dims();
  ForwardCache cache;
  cache.act.resize(dims.size());
  cache.act[0].assign(x, x + dims[0]);
  for (double v : cache.act[0])
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite input to forward pass");
  const std::size_t n_hidden = dims.size() - 2;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    cache.act[l + 1].resize(dims[l + 1]);
    affine(model.weights[l], model.biases[l], cache.act[l].data(), dims[l],
           cache.act[l + 1].data(), dims[l + 1]);
    if (l < n_hidden) {
      for (double& v : cache.act[l + 1])
        v = v > 0.0 ? v : 0.0;
      if (multipliers) {
        const std::vector<double>& m = (*multipliers)[l];
        for (int i = 0; i < dims[l + 1]; ++i)
          cache.act[l + 1][i] *= m[i];
      }
    }
  }
  return cache;
}

std::vector<std::vector<double>> draw_masks(const MlpModel& model, Rng& rng) {
  const auto& dims = model.dims();
  const double p = model.dropout();
  const double scale = 1.0 / (1.0 - p);
  std::vector<std::vector<double>> masks(dims.size() - 2);
  for (std::size_t l = 0; l < masks.size(); ++l) {
    masks[l].resize(dims[l + 1]);
    for (double& m : masks[l])
      m = rng.uniform() >= p ? scale : 0.0;
  }
  return masks;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out)
    v /= sum;
  return out;
}

}  // namespace

std::vector<double> MlpModel::forward(const float* x, Mode mode, Rng* rng) const {
  if (mode == Mode::Eval)
    return forward_cached(*this, x, nullptr).act.back();
  if (!rng)
    throw std::invalid_argument("train-mode forward needs an rng");
  auto masks = draw_masks(*this, *rng);
  return forward_cached(*this, x, &masks).act.back();
}

std::vector<double> MlpModel::forward_with_masks(
    const float* x, const std::vector<std::vector<double>>& multipliers) const {
  if (multipliers.size() != dims_.size() - 2)
    throw std::invalid_argument("need one multiplier vector per hidden layer");
  return forward_cached(*this, x, &multipliers).act.back();
}

int MlpModel::predict(const float* x) const {
  std::vector<double> logits = forward(x, Mode::Eval, nullptr);
  int best = 0;
  for (int k = 1; k < num_classes(); ++k)
    if (logits[k] > logits[best])
      best = k;
  return best;
}

void MlpModel::save(const std::filesystem::path& path) const {
  std::string body = "layers";
  for (int d : dims_)
    body += " " + std::to_string(d);
  body += "\ndropout " + format_g9(cfg_.dropout) + "\n";
  for (std::size_t l = 0; l < weights.size(); ++l) {
    body += "weights " + std::to_string(l);
    for (double v : weights[l])
      body += " " + format_g9(v);
    body += "\nbiases " + std::to_string(l);
    for (double v : biases[l])
      body += " " + format_g9(v);
    body += "\n";
  }
  write_text_file(path, body);
}

MlpModel MlpModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::string tag;
  MlpModel model;
  if (!(in >> tag) || tag != "layers")
    throw std::runtime_error(path.string() + ": expected 'layers' header");
  {
    std::string rest;
    std::getline(in, rest);
    for (const std::string& tok : split(trim(rest), ' '))
      if (!tok.empty())
        model.dims_.push_back(static_cast<int>(parse_int(tok, "layer dim")));
  }
  if (model.dims_.size() < 2)
    throw std::runtime_error(path.string() + ": needs at least input and output dims");
  if (!(in >> tag) || tag != "dropout")
    throw std::runtime_error(path.string() + ": expected 'dropout'");
  in >> model.cfg_.dropout;
  model.cfg_.hidden.assign(model.dims_.begin() + 1, model.dims_.end() - 1);
  for (std::size_t l = 0; l + 1 < model.dims_.size(); ++l) {
    std::size_t idx;
    if (!(in >> tag >> idx) || tag != "weights" || idx != l)
      throw std::runtime_error(path.string() + ": expected 'weights " +
                               std::to_string(l) + "'");
    std::vector<double> w(static_cast<std::size_t>(model.dims_[l + 1]) * model.dims_[l]);
    for (double& v : w)
      if (!(in >> v))
        throw std::runtime_error(path.string() + ": truncated weights");
    std::vector<double> b(model.dims_[l + 1]);
    if (!(in >> tag >> idx) || tag != "biases" || idx != l)
      throw std::runtime_error(path.string() + ": expected 'biases " +
                               std::to_string(l) + "'");
    for (double& v : b)
      if (!(in >> v))
        throw std::runtime_error(path.string() + ": truncated biases");
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

Gradients ce_loss_and_grad(
    const MlpModel& model, const std::vector<const float*>& xs,
    const std::vector<int>& ys,
    const std::vector<std::vector<std::vector<double>>>* masks) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("batch must be nonempty and aligned");
  const auto& dims = model.dims();
  Gradients g;
  g.w.resize(model.weights.size());
  g.b.resize(model.biases.size());
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    g.w[l].assign(model.weights[l].size(), 0.0);
    g.b[l].assign(model.biases[l].size(), 0.0);
  }
  const std::size_t n_hidden = dims.size() - 2;
  const double inv_n = 1.0 / static_cast<double>(xs.size());

  for (std::size_t s = 0; s < xs.size(); ++s) {
    const std::vector<std::vector<double>>* mask = masks ? &(*masks)[s] : nullptr;
    ForwardCache cache = forward_cached(model, xs[s], mask);
    std::vector<double> probs = softmax(cache.act.back());
    g.loss -= inv_n * std::log(std::max(probs[ys[s]], 1e-300));

    // delta for the output layer (softmax + NLL)
    std::vector<double> delta = probs;
    delta[ys[s]] -= 1.0;

    for (std::size_t l = dims.size() - 1; l-- > 0;) {
      const std::vector<double>& below = cache.act[l];
      for (int o = 0; o < dims[l + 1]; ++o) {
        const double d = delta[o] * inv_n;
        double* wrow = g.w[l].data() + static_cast<std::size_t>(o) * dims[l];
        for (int i = 0; i < dims[l]; ++i)
          wrow[i] += d * below[i];
        g.b[l][o] += d;
      }
      if (l == 0)
        break;
      std::vector<double> next(dims[l], 0.0);
      for (int i = 0; i < dims[l]; ++i) {
        double acc = 0.0;
        for (int o = 0; o < dims[l + 1]; ++o)
          acc += model.weights[l][static_cast<std::size_t>(o) * dims[l] + i] * delta[o];
        next[i] = acc;
      }
      // Backprop through dropout multiplier, then ReLU (act > 0 implies
      // pre-activation > 0 since the multiplier never flips sign).
      if (l - 1 < n_hidden) {
        for (int i = 0; i < dims[l]; ++i) {
          double mult = mask ? (*mask)[l - 1][i] : 1.0;
          next[i] *= (mult > 0.0 && cache.act[l][i] > 0.0) ? mult : 0.0;
        }
      }
      delta = std::move(next);
    }
  }
  return g;
}

FitHistory fit(MlpModel& model, const Dataset& train, const Dataset& valid,
               const FitConfig& cfg) {
  if (train.size() == 0)
    throw std::invalid_argument("training set is empty");
  if (cfg.epochs < 1 || cfg.batch < 1)
    throw std::invalid_argument("epochs and batch must be >= 1");

  Rng rng(cfg.seed);
  std::vector<AdamState> adam_w, adam_b;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    adam_w.emplace_back(model.weights[l].size(), cfg.adam);
    adam_b.emplace_back(model.biases[l].size(), cfg.adam);
  }

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;

  FitHistory history;
  double best_ba = -1.0;
  std::vector<std::vector<double>> best_w = model.weights, best_b = model.biases;
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch)) {
      std::size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<const float*> xs;
      std::vector<int> ys;
      std::vector<std::vector<std::vector<double>>> masks;
      for (std::size_t i = start; i < end; ++i) {
        const Record& r = train.record(order[i]);
        xs.push_back(r.features.data());
        ys.push_back(r.label);
        masks.push_back(draw_masks(model, rng));
      }
      Gradients g = ce_loss_and_grad(model, xs, ys, &masks);
      if (!std::isfinite(g.loss))
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batches));
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        adam_w[l].update(model.weights[l], g.w[l]);
        adam_b[l].update(model.biases[l], g.b[l]);
      }
      epoch_loss += g.loss;
      ++batches;
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(batches));

    double ba = balanced_accuracy(model, valid);
    history.valid_balanced_accuracy.push_back(ba);
    if (ba > best_ba) {
      best_ba = ba;
      best_w = model.weights;
      best_b = model.biases;
      history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  model.weights = std::move(best_w);
  model.biases = std::move(best_b);
  return history;
}

double balanced_accuracy(const MlpModel& model, const Dataset& ds) {
  std::vector<std::int64_t> correct(ds.num_labels(), 0), total(ds.num_labels(), 0);
  for (const Record& r : ds.records()) {
    ++total[r.label];
    if (model.predict(r.features.data()) == r.label)
      ++correct[r.label];
  }
  double sum = 0.0;
  for (int k = 0; k < ds.num_labels(); ++k) {
    if (total[k] == 0)
      throw std::invalid_argument("label " + std::to_string(k) +
                                  " has no examples; balanced accuracy undefined");
    sum += static_cast<double>(correct[k]) / static_cast<double>(total[k]);
  }
  return sum / ds.num_labels();
}

}  // namespace fairgen

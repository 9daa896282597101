#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lumen/core/rng.hpp"

namespace lumen {

/// Per-epoch mean task losses, appended once per epoch by the training loop.
struct LossHistory {
  std::vector<double> sl;
  std::vector<double> disp;

  void append(double l_sl, double l_disp) {
    sl.push_back(l_sl);
    disp.push_back(l_disp);
  }
  std::size_t epochs() const { return sl.size(); }
};

struct TaskWeights {
  double sl = 1.0;
  double disp = 1.0;
};

/// Constant scaling of the structured-light term: lambda2 * L_sl + L_disp.
inline double combine_constant(double l_sl, double l_disp, double lambda2) {
  if (l_sl < 0.0 || l_disp < 0.0)
    throw std::invalid_argument("combine_constant: losses must be nonnegative");
  return lambda2 * l_sl + l_disp;
}

/// Epoch-ratio weights: omega_k = L_k(t-1)/L_k(t-2), then a softmax over
/// omega*zeta2 gained by zeta1, so the weights always sum to zeta1. The
/// literal_denominator flag divides by zeta2*(omega_sl+omega_disp) instead,
/// for comparison with the non-softmax reading.
inline TaskWeights epoch_ratio_weights(const LossHistory& history, double zeta1 = 2.0,
                                       double zeta2 = 2.0, bool literal_denominator = false) {
  if (zeta1 <= 0.0 || zeta2 <= 0.0)
    throw std::invalid_argument("epoch_ratio_weights: zeta1 and zeta2 must be positive");
  double w_sl = 1.0, w_disp = 1.0;  // cold start for the first two epochs
  if (history.epochs() >= 2) {
    std::size_t last = history.epochs() - 1;
    double sl1 = history.sl[last], sl2 = history.sl[last - 1];
    double d1 = history.disp[last], d2 = history.disp[last - 1];
    if (sl1 <= 0.0 || sl2 <= 0.0 || d1 <= 0.0 || d2 <= 0.0)
      throw std::invalid_argument("epoch_ratio_weights: history losses must be positive");
    w_sl = sl1 / sl2;
    w_disp = d1 / d2;
  }
  if (literal_denominator) {
    double den = zeta2 * (w_sl + w_disp);
    return {zeta1 * std::exp(w_sl * zeta2) / den, zeta1 * std::exp(w_disp * zeta2) / den};
  }
  // softmax evaluated stably around the max exponent
  double m = std::max(w_sl, w_disp) * zeta2;
  double e_sl = std::exp(w_sl * zeta2 - m);
  double e_disp = std::exp(w_disp * zeta2 - m);
  double den = e_sl + e_disp;
  return {zeta1 * e_sl / den, zeta1 * e_disp / den};
}

inline double combine_epoch_ratio(double l_sl, double l_disp, const TaskWeights& w) {
  return w.sl * l_sl + w.disp * l_disp;
}

/// Homoscedastic-uncertainty combination with eta = log(sigma^2):
///   (lambda5/2) e^{-eta_sl} L_sl + (1/2) e^{-eta_disp} L_disp + eta_sl/2 + eta_disp/2.
inline double combine_uncertainty(double l_sl, double l_disp, double eta_sl, double eta_disp,
                                  double lambda5 = 0.5) {
  return 0.5 * lambda5 * std::exp(-eta_sl) * l_sl + 0.5 * std::exp(-eta_disp) * l_disp +
         0.5 * eta_sl + 0.5 * eta_disp;
}

/// Analytic gradient of combine_uncertainty w.r.t. (eta_sl, eta_disp).
inline std::pair<double, double> uncertainty_eta_grad(double l_sl, double l_disp, double eta_sl,
                                                      double eta_disp, double lambda5 = 0.5) {
  double g_sl = -0.5 * lambda5 * std::exp(-eta_sl) * l_sl + 0.5;
  double g_disp = -0.5 * std::exp(-eta_disp) * l_disp + 0.5;
  return {g_sl, g_disp};
}

struct UncertaintyState {
  double eta_sl = 0.0;    // log sigma_sl^2
  double eta_disp = 0.0;  // log sigma_disp^2
};

/// One gradient-descent step on the log-variance parameters.
inline UncertaintyState uncertainty_grad_step(const UncertaintyState& state, double l_sl,
                                              double l_disp, double lr, double lambda5 = 0.5) {
  auto [g_sl, g_disp] = uncertainty_eta_grad(l_sl, l_disp, state.eta_sl, state.eta_disp, lambda5);
  return {state.eta_sl - lr * g_sl, state.eta_disp - lr * g_disp};
}

// ---------------------------------------------------------------------------
// Scheduler configuration

struct ConstantScheduler {
  double lambda2 = 10.0;
};

// published constant-gain presets
inline ConstantScheduler constant_preset_a() { return {10.0}; }
inline ConstantScheduler constant_preset_b() { return {0.5}; }

struct EpochRatioScheduler {
  double zeta1 = 2.0;
  double zeta2 = 2.0;
  bool literal_denominator = false;
};

struct UncertaintyScheduler {
  double lambda5 = 0.5;
  double eta_sl = 0.0;
  double eta_disp = 0.0;
  double lr = 0.5;  // step size for the eta parameters
};

using Scheduler = std::variant<ConstantScheduler, EpochRatioScheduler, UncertaintyScheduler>;

inline void validate(const Scheduler& s) {
  if (auto* c = std::get_if<ConstantScheduler>(&s)) {
    if (c->lambda2 < 0.0) throw std::invalid_argument("scheduler: lambda2 must be >= 0");
  } else if (auto* e = std::get_if<EpochRatioScheduler>(&s)) {
    if (e->zeta1 <= 0.0 || e->zeta2 <= 0.0)
      throw std::invalid_argument("scheduler: zeta1 and zeta2 must be positive");
  } else if (auto* u = std::get_if<UncertaintyScheduler>(&s)) {
    if (u->lr <= 0.0) throw std::invalid_argument("scheduler: lr must be positive");
  }
}

// ---------------------------------------------------------------------------
// Toy two-task learner: two quadratics L_k(w) = scale_k * ||A_k w - y_k||^2 / m
// over a shared parameter vector, stepped with analytic gradients. A desk-scale
// stand-in that exercises the schedulers' dynamics end to end.

struct QuadraticTask {
  std::vector<double> design;  // m x dim, row-major
  std::vector<double> target;  // m
  double scale = 1.0;
  int rows = 0;
  int dim = 0;
};

/// Random overdetermined least-squares task; the inconsistent target keeps the
/// minimum loss strictly positive so uncertainty weights have a finite optimum.
inline QuadraticTask make_random_task(Rng& rng, int rows, int dim, double scale) {
  QuadraticTask t;
  t.rows = rows;
  t.dim = dim;
  t.scale = scale;
  t.design.resize(static_cast<std::size_t>(rows) * dim);
  t.target.resize(rows);
  for (auto& a : t.design) a = rng.normal();
  for (auto& y : t.target) y = rng.normal();
  return t;
}

inline double task_loss(const QuadraticTask& t, const std::vector<double>& w) {
  double acc = 0.0;
  for (int i = 0; i < t.rows; ++i) {
    double r = -t.target[i];
    const double* row = t.design.data() + static_cast<std::size_t>(i) * t.dim;
    for (int j = 0; j < t.dim; ++j) r += row[j] * w[j];
    acc += r * r;
  }
  return t.scale * acc / t.rows;
}

inline std::vector<double> task_grad(const QuadraticTask& t, const std::vector<double>& w) {
  std::vector<double> g(t.dim, 0.0);
  for (int i = 0; i < t.rows; ++i) {
    double r = -t.target[i];
    const double* row = t.design.data() + static_cast<std::size_t>(i) * t.dim;
    for (int j = 0; j < t.dim; ++j) r += row[j] * w[j];
    double c = 2.0 * t.scale * r / t.rows;
    for (int j = 0; j < t.dim; ++j) g[j] += c * row[j];
  }
  return g;
}

struct ToyTaskConfig {
  int dim = 8;
  QuadraticTask task_sl;
  QuadraticTask task_disp;
  int epochs = 200;
  double lr = 0.05;
  Scheduler scheduler = UncertaintyScheduler{};
  std::uint64_t rng_seed = 1;
};

/// Default pair of random tasks plus a seeded parameter initialization.
inline ToyTaskConfig make_toy_config(std::uint64_t seed, const Scheduler& scheduler,
                                     int epochs = 200) {
  ToyTaskConfig cfg;
  cfg.rng_seed = seed;
  cfg.scheduler = scheduler;
  cfg.epochs = epochs;
  Rng rng(seed);
  cfg.task_sl = make_random_task(rng, 32, cfg.dim, 1.0);
  cfg.task_disp = make_random_task(rng, 32, cfg.dim, 1.0);
  return cfg;
}

struct EpochRecord {
  int epoch = 0;
  double loss_sl = 0.0;
  double loss_disp = 0.0;
  double lambda_sl = 0.0;   // effective linear coefficient on L_sl
  double lambda_disp = 0.0; // effective linear coefficient on L_disp
  double eta_sl = 0.0;
  double eta_disp = 0.0;
  double total = 0.0;
};

struct TrainingCurves {
  std::vector<EpochRecord> epochs;
  std::vector<double> final_params;
  LossHistory history;
};

/// Run the toy learner: per epoch, evaluate both task losses, combine them via
/// the scheduler, take one gradient step on the shared parameters (and on the
/// eta parameters for the uncertainty scheduler), then append to the history.
inline TrainingCurves toy_two_task_train(const ToyTaskConfig& cfg) {
  validate(cfg.scheduler);
  if (cfg.task_sl.scale <= 0.0 || cfg.task_disp.scale <= 0.0)
    throw std::invalid_argument("toy_two_task_train: task scales must be positive");
  if (cfg.lr <= 0.0) throw std::invalid_argument("toy_two_task_train: lr must be positive");

  Rng rng(cfg.rng_seed + 0x9e3779b97f4a7c15ull);  // decouple init from task generation
  std::vector<double> w(cfg.dim);
  for (auto& v : w) v = rng.normal() / std::sqrt(static_cast<double>(cfg.dim));

  TrainingCurves out;
  Scheduler sched = cfg.scheduler;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double l_sl = task_loss(cfg.task_sl, w);
    double l_disp = task_loss(cfg.task_disp, w);
    if (l_sl > 1e12 || l_disp > 1e12 || !std::isfinite(l_sl) || !std::isfinite(l_disp))
      throw std::runtime_error("toy_two_task_train: diverged at epoch " + std::to_string(epoch));

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss_sl = l_sl;
    rec.loss_disp = l_disp;

    if (auto* c = std::get_if<ConstantScheduler>(&sched)) {
      rec.lambda_sl = c->lambda2;
      rec.lambda_disp = 1.0;
      rec.total = combine_constant(l_sl, l_disp, c->lambda2);
    } else if (auto* e = std::get_if<EpochRatioScheduler>(&sched)) {
      TaskWeights tw =
          epoch_ratio_weights(out.history, e->zeta1, e->zeta2, e->literal_denominator);
      rec.lambda_sl = tw.sl;
      rec.lambda_disp = tw.disp;
      rec.total = combine_epoch_ratio(l_sl, l_disp, tw);
    } else {
      auto* u = std::get_if<UncertaintyScheduler>(&sched);
      rec.lambda_sl = 0.5 * u->lambda5 * std::exp(-u->eta_sl);
      rec.lambda_disp = 0.5 * std::exp(-u->eta_disp);
      rec.eta_sl = u->eta_sl;
      rec.eta_disp = u->eta_disp;
      rec.total = combine_uncertainty(l_sl, l_disp, u->eta_sl, u->eta_disp, u->lambda5);
    }

    // shared-parameter step; all combiners are linear in the task losses
    std::vector<double> g_sl = task_grad(cfg.task_sl, w);
    std::vector<double> g_disp = task_grad(cfg.task_disp, w);
    for (int j = 0; j < cfg.dim; ++j)
      w[j] -= cfg.lr * (rec.lambda_sl * g_sl[j] + rec.lambda_disp * g_disp[j]);

    if (auto* u = std::get_if<UncertaintyScheduler>(&sched)) {
      UncertaintyState st{u->eta_sl, u->eta_disp};
      st = uncertainty_grad_step(st, l_sl, l_disp, u->lr, u->lambda5);
      u->eta_sl = st.eta_sl;
      u->eta_disp = st.eta_disp;
    }

    out.history.append(l_sl, l_disp);
    out.epochs.push_back(rec);
  }
  out.final_params = w;
  return out;
}

}  // namespace lumen

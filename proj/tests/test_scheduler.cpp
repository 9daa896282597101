#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lumen/core/rng.hpp"
#include "lumen/mtl/scheduler.hpp"

using namespace lumen;

TEST_CASE("constant combiner scales only the structured-light term", "[scheduler]") {
  CHECK(combine_constant(0.1, 1.0, 10.0) == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(combine_constant(0.3, 0.7, 0.0) == Catch::Approx(0.7).epsilon(1e-15));
  CHECK(constant_preset_a().lambda2 == 10.0);
  CHECK(constant_preset_b().lambda2 == 0.5);
  CHECK_THROWS_AS(combine_constant(-0.1, 1.0, 10.0), std::invalid_argument);
}

TEST_CASE("epoch-ratio weights cold-start at (1,1)", "[scheduler]") {
  LossHistory empty;
  TaskWeights w = epoch_ratio_weights(empty);
  CHECK(w.sl == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(w.disp == Catch::Approx(1.0).epsilon(1e-15));

  LossHistory one;
  one.append(0.8, 0.9);
  w = epoch_ratio_weights(one);
  CHECK(w.sl == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(w.disp == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("epoch-ratio weights reproduce the softmax oracle", "[scheduler]") {
  // omega_sl = 2, omega_disp = 1: frozen from 2*exp(4)/(exp(4)+exp(2))
  LossHistory h;
  h.append(0.5, 0.8);
  h.append(1.0, 0.8);  // ratios 2 and 1
  TaskWeights w = epoch_ratio_weights(h);
  CHECK(w.sl == Catch::Approx(1.7615941559557649).epsilon(1e-12));
  CHECK(w.disp == Catch::Approx(0.2384058440442351).epsilon(1e-12));
  CHECK(combine_epoch_ratio(0.3, 0.7, {1.0, 1.0}) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(combine_epoch_ratio(0.5, 123.0, {2.0, 0.0}) == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("epoch-ratio weights always sum to zeta1", "[scheduler]") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    LossHistory h;
    h.append(rng.uniform(1e-3, 10.0), rng.uniform(1e-3, 10.0));
    h.append(rng.uniform(1e-3, 10.0), rng.uniform(1e-3, 10.0));
    TaskWeights w = epoch_ratio_weights(h);
    CHECK(w.sl > 0.0);
    CHECK(w.disp > 0.0);
    CHECK(w.sl + w.disp == Catch::Approx(2.0).margin(1e-12));
  }
}

TEST_CASE("the faster-improving task gets the smaller weight", "[scheduler]") {
  LossHistory h;
  h.append(1.0, 1.0);
  h.append(0.5, 0.9);  // sl improved faster: omega_sl < omega_disp
  TaskWeights w = epoch_ratio_weights(h);
  CHECK(w.sl < w.disp);
}

TEST_CASE("epoch-ratio rejects nonpositive history and parameters", "[scheduler]") {
  LossHistory h;
  h.append(0.0, 1.0);
  h.append(1.0, 1.0);
  CHECK_THROWS_AS(epoch_ratio_weights(h), std::invalid_argument);

  LossHistory ok;
  CHECK_THROWS_AS(epoch_ratio_weights(ok, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(epoch_ratio_weights(ok, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("the literal printed denominator is available behind the flag", "[scheduler]") {
  LossHistory h;  // cold start: omega = (1,1), zeta2 = 2
  TaskWeights w = epoch_ratio_weights(h, 2.0, 2.0, true);
  const double want = 2.0 * std::exp(2.0) / (2.0 * (1.0 + 1.0));  // e^2/2
  CHECK(w.sl == Catch::Approx(want).epsilon(1e-12));
  CHECK(w.disp == Catch::Approx(want).epsilon(1e-12));
  CHECK(w.sl + w.disp != Catch::Approx(2.0).margin(1e-6));  // not a softmax
}

TEST_CASE("uncertainty combiner matches the closed form", "[scheduler]") {
  CHECK(combine_uncertainty(1.0, 1.0, 0.0, 0.0, 0.5) == Catch::Approx(0.75).epsilon(1e-15));

  // eta_disp large: data part vanishes, regularizer dominates
  double big = combine_uncertainty(0.0, 5.0, 0.0, 40.0, 0.5);
  CHECK(big == Catch::Approx(0.5 * 5.0 * std::exp(-40.0) + 20.0).epsilon(1e-12));
}

TEST_CASE("eta gradient step is a no-op at stationarity", "[scheduler]") {
  const double l_sl = 0.7, l_disp = 1.9, lambda5 = 0.5;
  UncertaintyState st{std::log(lambda5 * l_sl), std::log(l_disp)};
  UncertaintyState next = uncertainty_grad_step(st, l_sl, l_disp, 0.3, lambda5);
  CHECK(next.eta_sl == Catch::Approx(st.eta_sl).margin(1e-12));
  CHECK(next.eta_disp == Catch::Approx(st.eta_disp).margin(1e-12));
}

TEST_CASE("eta gradient step matches the worked example", "[scheduler]") {
  UncertaintyState st{0.0, 0.0};
  UncertaintyState next = uncertainty_grad_step(st, 1.0, 0.0, 0.1, 0.5);
  CHECK(next.eta_sl == Catch::Approx(-0.025).epsilon(1e-12));
}

TEST_CASE("analytic eta gradient matches central differences", "[scheduler]") {
  Rng rng(7);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    double l_sl = rng.uniform(0.05, 5.0);
    double l_disp = rng.uniform(0.05, 5.0);
    double eta_sl = rng.uniform(-2.0, 2.0);
    double eta_disp = rng.uniform(-2.0, 2.0);
    double lambda5 = rng.uniform(0.1, 2.0);

    auto [g_sl, g_disp] = uncertainty_eta_grad(l_sl, l_disp, eta_sl, eta_disp, lambda5);
    double fd_sl = (combine_uncertainty(l_sl, l_disp, eta_sl + h, eta_disp, lambda5) -
                    combine_uncertainty(l_sl, l_disp, eta_sl - h, eta_disp, lambda5)) /
                   (2 * h);
    double fd_disp = (combine_uncertainty(l_sl, l_disp, eta_sl, eta_disp + h, lambda5) -
                      combine_uncertainty(l_sl, l_disp, eta_sl, eta_disp - h, lambda5)) /
                     (2 * h);
    CHECK(g_sl == Catch::Approx(fd_sl).epsilon(1e-5));
    CHECK(g_disp == Catch::Approx(fd_disp).epsilon(1e-5));
  }
}

TEST_CASE("combiners are linear in the task losses", "[scheduler]") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
    double c = rng.uniform(0.0, 3.0), d = rng.uniform(0.0, 3.0);
    double lambda2 = rng.uniform(0.0, 5.0);
    CHECK(combine_constant(a + c, b + d, lambda2) ==
          Catch::Approx(combine_constant(a, b, lambda2) + combine_constant(c, d, lambda2))
              .margin(1e-12));
    TaskWeights w{rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)};
    CHECK(combine_epoch_ratio(a + c, b + d, w) ==
          Catch::Approx(combine_epoch_ratio(a, b, w) + combine_epoch_ratio(c, d, w))
              .margin(1e-12));
  }
}

TEST_CASE("toy training with identical tasks never increases the loss", "[scheduler]") {
  ToyTaskConfig cfg = make_toy_config(5, ConstantScheduler{1.0}, 120);
  cfg.task_disp = cfg.task_sl;  // identical quadratics
  TrainingCurves curves = toy_two_task_train(cfg);
  REQUIRE(curves.epochs.size() == 120);
  for (std::size_t e = 1; e < curves.epochs.size(); ++e) {
    CHECK(curves.epochs[e].loss_sl <= curves.epochs[e - 1].loss_sl + 1e-9);
    CHECK(curves.epochs[e].loss_disp <= curves.epochs[e - 1].loss_disp + 1e-9);
  }
}

TEST_CASE("toy training under epoch-ratio keeps the weight sum at zeta1", "[scheduler]") {
  ToyTaskConfig cfg = make_toy_config(6, EpochRatioScheduler{}, 100);
  TrainingCurves curves = toy_two_task_train(cfg);
  for (const EpochRecord& rec : curves.epochs)
    CHECK(rec.lambda_sl + rec.lambda_disp == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("toy training under uncertainty reaches the stationarity relation", "[scheduler]") {
  ToyTaskConfig cfg = make_toy_config(1, UncertaintyScheduler{}, 200);
  TrainingCurves curves = toy_two_task_train(cfg);
  const EpochRecord& last = curves.epochs.back();
  CHECK(std::exp(last.eta_sl) ==
        Catch::Approx(0.5 * last.loss_sl).epsilon(0.10));
  CHECK(std::exp(last.eta_disp) == Catch::Approx(last.loss_disp).epsilon(0.10));
}

TEST_CASE("toy training reports divergence with the epoch", "[scheduler]") {
  ToyTaskConfig cfg = make_toy_config(9, ConstantScheduler{1.0}, 400);
  cfg.lr = 5.0;  // way past the stability threshold for these quadratics
  CHECK_THROWS_WITH(toy_two_task_train(cfg), Catch::Matchers::ContainsSubstring("diverged at epoch"));
}

TEST_CASE("scheduler validation rejects bad parameters", "[scheduler]") {
  CHECK_THROWS_AS(validate(Scheduler{ConstantScheduler{-1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Scheduler{EpochRatioScheduler{0.0, 2.0}}), std::invalid_argument);
  UncertaintyScheduler u;
  u.lr = 0.0;
  CHECK_THROWS_AS(validate(Scheduler{u}), std::invalid_argument);
}

#include <doctest.h>

#include "holonet/error.hpp"
#include "holonet/experiments.hpp"
#include "holonet/train.hpp"
#include "support.hpp"

using namespace holonet;
using holonet::testing::random_complex;

namespace {

NodeTask regression_task(const ModelSpec& spec, std::mt19937_64& rng, Eigen::Index n = 7) {
  const DiGraph g = holonet::testing::random_digraph(n, 0.35, rng);
  NodeTask t{prepare_banks(g, spec), CMat(), {}, holonet::testing::random_real(n, spec.output_dim, rng), {}};
  t.x = random_complex(n, spec.widths.front(), rng);
  if (spec.field == ScalarField::Real) t.x = t.x.real().cast<cplx>();
  return t;
}

void randomise_biases(HoloNetModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto& layer : m.layers) {
    for (Eigen::Index k = 0; k < layer.bias.size(); ++k) {
      layer.bias(k) = {u(rng), m.spec.field == ScalarField::Complex ? u(rng) : 0.0};
    }
  }
}

}  // namespace

TEST_CASE("loss names") {
  CHECK(loss_from_string("mae") == Loss::MeanAbsoluteError);
  CHECK(loss_from_string(to_string(Loss::CrossEntropy)) == Loss::CrossEntropy);
  CHECK_THROWS_AS(loss_from_string("hinge"), InputError);
  CHECK(optimizer_from_string("sgd") == OptimizerKind::GradientDescent);
}

TEST_CASE("loss values against hand formulas") {
  std::mt19937_64 rng(1);
  const ModelSpec spec = fabernet_spec({2}, 2);  // depth 0: outputs are the readout of x
  HoloNetModel m = init_model(spec, rng);
  NodeTask t = regression_task(spec, rng, 4);
  const Mat out = node_outputs(t.x, m.readout);

  CHECK(node_loss(m, t, Loss::MeanSquaredError) == doctest::Approx((out - t.targets).squaredNorm() / 8.0));
  CHECK(node_loss(m, t, Loss::MeanAbsoluteError) == doctest::Approx((out - t.targets).cwiseAbs().sum() / 8.0));

  t.labels = {0, 1, 1, 0};
  double ce = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double lse = std::log(std::exp(out(i, 0)) + std::exp(out(i, 1)));
    ce += lse - out(i, t.labels[static_cast<std::size_t>(i)]);
  }
  CHECK(node_loss(m, t, Loss::CrossEntropy) == doctest::Approx(ce / 4.0));

  t.nodes = {1, 3};
  const double selected = (std::log(std::exp(out(1, 0)) + std::exp(out(1, 1))) - out(1, 1) +
                           std::log(std::exp(out(3, 0)) + std::exp(out(3, 1))) - out(3, 0)) /
                          2.0;
  CHECK(node_loss(m, t, Loss::CrossEntropy) == doctest::Approx(selected));
}

TEST_CASE("parameter flattening round trip") {
  std::mt19937_64 rng(2);
  const ModelSpec spec = dir_resolvnet_spec({2, 3, 2}, 1, 2, {-1.0, 0.0}, 0.5, Nonlinearity::SplitReLU,
                                            ScalarField::Complex);
  HoloNetModel m = init_model(spec, rng);
  const auto layout = parameter_layout(m);
  std::vector<double> flat = flatten_parameters(m);
  REQUIRE(layout.back().offset + layout.back().size == flat.size());
  CHECK(layout.front().name == "layer0.fwd0");
  for (double& v : flat) v += 1.0;
  assign_parameters(m, flat);
  CHECK(flatten_parameters(m) == flat);
}

TEST_CASE("gradcheck on small models") {
  std::mt19937_64 rng(3);

  SUBCASE("depth 0 is exact up to rounding") {
    const ModelSpec spec = fabernet_spec({3}, 2);
    const HoloNetModel m = init_model(spec, rng);
    const NodeTask t = regression_task(spec, rng);
    CHECK(gradcheck(m, t, Loss::MeanSquaredError).max_error <= 1e-8);
  }

  SUBCASE("linear layer with quadratic loss") {
    ModelSpec spec = fabernet_spec({2, 3}, 1, 1);
    spec.rho = Nonlinearity::SplitAbs;
    HoloNetModel m = init_model(spec, rng);
    randomise_biases(m, rng);
    NodeTask t = regression_task(spec, rng);
    t.x = jitter_inputs(m, t.banks, t.x, rng);
    CHECK(gradcheck(m, t, Loss::MeanSquaredError).max_error <= 1e-5);
  }

  SUBCASE("real FaberNet of depth 2, both objectives") {
    const ModelSpec spec = fabernet_spec({2, 4, 3}, 2);
    HoloNetModel m = init_model(spec, rng);
    randomise_biases(m, rng);
    NodeTask t = regression_task(spec, rng);
    t.x = jitter_inputs(m, t.banks, t.x, rng);
    CHECK(gradcheck(m, t, Loss::MeanSquaredError).max_error <= 1e-5);
    t.labels = {0, 1, 0, 1, 1, 0, 0};
    CHECK(gradcheck(m, t, Loss::CrossEntropy).max_error <= 1e-5);
  }

  SUBCASE("complex Dir-ResolvNet, graph-level") {
    const ModelSpec spec = dir_resolvnet_spec({2, 3, 3}, 1, 2, {-1.0, 0.3}, 0.6, Nonlinearity::SplitReLU,
                                              ScalarField::Complex);
    HoloNetModel m = init_model(spec, rng);
    randomise_biases(m, rng);
    std::vector<GraphSample> data;
    for (int k = 0; k < 3; ++k) {
      NodeTask t = regression_task(spec, rng, 5 + k);
      data.push_back({t.banks, jitter_inputs(m, t.banks, t.x, rng), Vec::Constant(1, 0.5 * k)});
    }
    const GradcheckReport r = gradcheck(m, data, Loss::MeanAbsoluteError);
    CHECK(r.max_error <= 1e-5);
    CHECK(r.per_tensor.size() == parameter_layout(m).size());
  }
}

TEST_CASE("jitter moves pre-activations off the kink") {
  std::mt19937_64 rng(4);
  const ModelSpec spec = fabernet_spec({2, 3}, 1);
  const HoloNetModel m = init_model(spec, rng);
  const NodeTask t = regression_task(spec, rng);
  const CMat x = jitter_inputs(m, t.banks, CMat::Zero(t.x.rows(), t.x.cols()), rng);
  CHECK(min_kink_distance(m, t.banks, x) >= 1e-4);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  std::mt19937_64 rng(5);
  const ModelSpec spec = fabernet_spec({2, 4}, 2);
  HoloNetModel m = init_model(spec, rng);
  const NodeTask t = regression_task(spec, rng);
  const auto before = flatten_parameters(m);
  for (const OptimizerKind kind : {OptimizerKind::GradientDescent, OptimizerKind::Adam}) {
    const TrainResult r = train(m, t, Loss::MeanSquaredError, {kind, 0.0, 20});
    CHECK(r.loss_curve.size() == 21);
    CHECK(flatten_parameters(m) == before);
  }
}

TEST_CASE("training lowers the loss") {
  std::mt19937_64 rng(6);
  const ModelSpec spec = dir_resolvnet_spec({2, 6}, 1, 2);
  HoloNetModel m = init_model(spec, rng);
  const NodeTask t = regression_task(spec, rng, 10);
  const TrainResult r = train(m, t, Loss::MeanSquaredError, {OptimizerKind::Adam, 0.02, 100});
  CHECK(r.loss_curve.back() < r.loss_curve.front());
}

TEST_CASE("divergence raises NonFiniteLoss") {
  std::mt19937_64 rng(7);
  const ModelSpec spec = fabernet_spec({2, 4}, 1);
  HoloNetModel m = init_model(spec, rng);
  const NodeTask t = regression_task(spec, rng);
  CHECK_THROWS_AS(train(m, t, Loss::MeanSquaredError, {OptimizerKind::GradientDescent, 1e300, 5}), NonFiniteLoss);
}

TEST_CASE("FaberNet learns the direction task") {
  SyntheticTaskSpec task;
  task.n_nodes = 100;
  task.seed = 3;
  const DirectionDataset d = gen_direction_task(task);
  const ModelSpec spec = fabernet_spec({1, 16, 16}, 2);
  std::mt19937_64 rng(3);
  HoloNetModel m = init_model(spec, rng);
  const NodeTask t{prepare_banks(d.graph, spec), d.features.cast<cplx>(), d.labels, {}, {}};
  train(m, t, Loss::CrossEntropy, {OptimizerKind::Adam, 0.01, 300});
  CHECK(accuracy(m, t) >= 0.9);
}

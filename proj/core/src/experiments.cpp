#include "holonet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "holonet/error.hpp"

namespace holonet {

DirectionDataset gen_direction_task(const SyntheticTaskSpec& spec) {
  const std::size_t n = spec.n_nodes;
  if (n < 2 || n % 2 != 0) throw InputError("direction task needs an even number of nodes >= 2");
  if (spec.cycles < 0) throw InputError("direction task: cycles must be non-negative");
  if (spec.feature_dim < 1) throw InputError("direction task: feature_dim must be positive");
  std::mt19937_64 rng(spec.seed);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < n / 2; ++k) edges.push_back({order[k], order[n / 2 + k], 1.0});
  for (int c = 0; c < spec.cycles; ++c) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t u = order[k];
      const std::size_t v = order[(k + 1) % n];
      edges.push_back({u, v, 0.5});
      edges.push_back({v, u, 0.5});
    }
  }

  DirectionDataset d{build_graph(n, edges), Mat::Ones(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(spec.feature_dim)),
                     {}};
  if (spec.noise > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise);
    for (Eigen::Index k = 0; k < d.features.size(); ++k) d.features.data()[k] += noise(rng);
  }
  const Vec in = d.graph.in_degrees();
  const Vec out = d.graph.out_degrees();
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.labels[i] = out(static_cast<Eigen::Index>(i)) > in(static_cast<Eigen::Index>(i)) ? 1 : 0;
  }

  const DiGraph sym = symmetrized(d.graph);
  Mat sym_features(static_cast<Eigen::Index>(n), 2);
  sym_features << sym.in_degrees(), sym.out_degrees();
  Mat dir_features(static_cast<Eigen::Index>(n), 2);
  dir_features << in, out;
  d.symmetrized_probe_accuracy = logistic_probe_accuracy(sym_features, d.labels);
  d.directed_probe_accuracy = logistic_probe_accuracy(dir_features, d.labels);
  return d;
}

double logistic_probe_accuracy(const Mat& features, const std::vector<int>& labels, int epochs,
                               double learning_rate) {
  const Eigen::Index n = features.rows();
  if (n == 0 || static_cast<std::size_t>(n) != labels.size()) {
    throw ShapeMismatch("logistic probe: one label per row required");
  }
  Mat x = features;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
    x.col(j).array() -= mean;
    if (sd > 1e-12) x.col(j) /= sd;
  }
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];
  Vec w = Vec::Zero(x.cols());
  double b = 0.0;
  for (int e = 0; e < epochs; ++e) {
    const Vec z = (x * w).array() + b;
    const Vec r = (1.0 + (-z.array()).exp()).inverse().matrix() - y;
    w -= learning_rate * x.transpose() * r / static_cast<double>(n);
    b -= learning_rate * r.mean();
  }
  const Vec logits = (x * w).array() + b;
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((logits(i) > 0.0 ? 1 : 0) == labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

Mat charge_one_hot(const Vec& charges) {
  Mat x = Mat::Zero(charges.size(), kChargeClasses);
  for (Eigen::Index i = 0; i < charges.size(); ++i) {
    const int z = static_cast<int>(std::lround(charges(i)));
    const Eigen::Index col = z == 1 ? 0 : z == 6 ? 1 : z == 7 ? 2 : z == 8 ? 3 : -1;
    if (col < 0) throw InputError("charge " + std::to_string(z) + " has no one-hot class");
    x(i, col) = 1.0;
  }
  return x;
}

namespace {

Eigen::Vector3d random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {g(rng), g(rng), g(rng)};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace

TwoScaleGraph random_molecule(std::size_t n_heavy, double scale, std::mt19937_64& rng) {
  if (n_heavy < 1) throw InputError("molecule needs at least one heavy node");
  std::uniform_int_distribution<int> heavy_charge(6, 8);
  std::uniform_int_distribution<int> satellites(0, 3);
  std::uniform_real_distribution<double> bond(0.9, 1.2);

  std::vector<Eigen::Vector3d> pos;
  std::vector<double> charge;
  std::vector<std::size_t> cloud;
  std::vector<bool> heavy;
  Eigen::Vector3d at = Eigen::Vector3d::Zero();
  for (std::size_t h = 0; h < n_heavy; ++h) {
    if (h > 0) at += 1.5 * random_direction(rng);
    pos.push_back(at);
    charge.push_back(heavy_charge(rng));
    cloud.push_back(h);
    heavy.push_back(true);
    const int s = satellites(rng);
    for (int k = 0; k < s; ++k) {
      pos.push_back(at + bond(rng) * random_direction(rng));
      charge.push_back(1.0);
      cloud.push_back(h);
      heavy.push_back(false);
    }
  }

  const auto n = static_cast<Eigen::Index>(pos.size());
  Mat reg = Mat::Zero(n, n);
  Mat high = Mat::Zero(n, n);
  Vec mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    mu(i) = charge[si];
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (i == j) continue;
      const double d = std::max((pos[si] - pos[sj]).norm(), 0.5);
      if (cloud[si] == cloud[sj]) {
        high(i, j) = charge[si] * charge[sj] / d;
      } else {
        reg(i, j) = charge[si] * (charge[sj] - (heavy[sj] ? 1.0 : 0.0)) / d;
      }
    }
  }
  return TwoScaleGraph(std::move(mu), std::move(reg), std::move(high), scale);
}

TwoScaleGraph random_two_scale_graph(std::size_t max_nodes, std::mt19937_64& rng) {
  if (max_nodes < 2) throw InputError("random two-scale graph needs at least 2 nodes");
  std::uniform_int_distribution<std::size_t> size_dist(std::max<std::size_t>(2, max_nodes / 2), max_nodes);
  const std::size_t n = size_dist(rng);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> cluster_size(1, 5);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const auto nn = static_cast<Eigen::Index>(n);
  Mat high = Mat::Zero(nn, nn);
  for (std::size_t start = 0; start < n;) {
    const std::size_t len = std::min(cluster_size(rng), n - start);
    if (len >= 2) {
      const double w = weight(rng);
      for (std::size_t k = 0; k < len; ++k) {
        const auto u = static_cast<Eigen::Index>(order[start + k]);
        const auto v = static_cast<Eigen::Index>(order[start + (k + 1) % len]);
        high(v, u) += w;
      }
      for (std::size_t a = 0; a < len; ++a) {
        for (std::size_t b = a + 1; b < len; ++b) {
          if (unit(rng) < 0.3) {
            const double c = weight(rng);
            const auto u = static_cast<Eigen::Index>(order[start + a]);
            const auto v = static_cast<Eigen::Index>(order[start + b]);
            high(u, v) += c;
            high(v, u) += c;
          }
        }
      }
    }
    start += len;
  }

  std::uniform_real_distribution<double> reg_weight(0.1, 1.0);
  Mat reg = Mat::Zero(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      if (i != j && high(i, j) == 0.0 && unit(rng) < 0.2) reg(i, j) = reg_weight(rng);
    }
  }
  std::uniform_real_distribution<double> node_weight(0.5, 2.0);
  Vec mu(nn);
  for (Eigen::Index i = 0; i < nn; ++i) mu(i) = node_weight(rng);
  return TwoScaleGraph(std::move(mu), std::move(reg), std::move(high), 1.0);
}

HoloNetModel teacher_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ModelSpec spec = dir_resolvnet_spec({kChargeClasses, 8}, 1, 2, {-1.0, 0.0}, 1.0);
  return init_model(spec, rng);
}

std::vector<TwoScaleSample> gen_two_scale_regression(const SyntheticTaskSpec& spec, const HoloNetModel& teacher,
                                                     double c_min, double c_max) {
  if (!(c_min > 0.0 && c_max >= c_min)) throw InputError("scale range must satisfy 0 < c_min <= c_max");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> heavy_count(2, 5);
  std::uniform_real_distribution<double> log_scale(std::log(c_min), std::log(c_max));
  std::normal_distribution<double> noise(0.0, spec.noise > 0.0 ? spec.noise : 1.0);
  std::vector<TwoScaleSample> out;
  out.reserve(spec.n_graphs);
  for (std::size_t k = 0; k < spec.n_graphs; ++k) {
    const std::size_t h = heavy_count(rng);
    const double c = std::exp(log_scale(rng));
    TwoScaleGraph g = random_molecule(h, c, rng);
    Mat x = charge_one_hot(g.node_weights());
    const LimitGraph lg = build_limit_graph(g);
    const GraphBanks banks = prepare_banks(lg.graph, teacher.spec);
    const CMat xl = project_down(CMat(x.cast<cplx>()), lg, g.node_weights());
    Vec target = graph_output(model_features(xl, teacher, banks), lg.graph.node_weights(), teacher.readout);
    if (spec.noise > 0.0) {
      for (Eigen::Index i = 0; i < target.size(); ++i) target(i) += noise(rng);
    }
    out.push_back({std::move(g), std::move(x), std::move(target)});
  }
  return out;
}

GraphSample fine_sample(const TwoScaleSample& s, const ModelSpec& spec) {
  return {prepare_banks(s.graph.graph(), spec), s.features.cast<cplx>(), s.target};
}

GraphSample coarse_sample(const TwoScaleSample& s, const ModelSpec& spec) {
  const LimitGraph lg = build_limit_graph(s.graph);
  return {prepare_banks(lg.graph, spec),
          project_down(CMat(s.features.cast<cplx>()), lg, s.graph.node_weights()), s.target};
}

std::vector<double> DeflectionFamily::scales() const {
  std::vector<double> out;
  for (double d : deflections) out.push_back(1.0 / d);
  return out;
}

TwoScaleGraph DeflectionFamily::at(std::size_t i) const { return base.with_scale(1.0 / deflections.at(i)); }

DeflectionFamily default_deflection_family(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DeflectionFamily f{random_molecule(4, 1.0, rng), {}};
  for (double c : default_scale_grid()) f.deflections.push_back(1.0 / c);
  return f;
}

std::vector<TheoremRow> theorem_gaps(const TwoScaleGraph& g, const std::vector<double>& c_grid,
                                     const TheoremSuiteConfig& config) {
  std::mt19937_64 rng(config.seed);
  HoloNetModel model = init_model(config.model, rng);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (auto& layer : model.layers) {
    for (Eigen::Index k = 0; k < layer.bias.size(); ++k) {
      layer.bias(k) = {unit(rng), config.model.field == ScalarField::Complex ? unit(rng) : 0.0};
    }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> theta;
  for (int k = 0; k < config.filter_order; ++k) theta.emplace_back(normal(rng), 0.0);
  CMat x(static_cast<Eigen::Index>(g.n_nodes()), config.model.widths.front());
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = {normal(rng), 0.0};

  const auto resolvent_gaps = resolvent_convergence_gap(g, config.pole, c_grid);
  const auto filter_gaps = filter_convergence_gap(g, config.pole, theta, c_grid);
  std::vector<TheoremRow> rows;
  for (std::size_t k = 0; k < c_grid.size(); ++k) {
    const TwoScaleGraph scaled = g.with_scale(c_grid[k]);
    const LimitGraph lg = build_limit_graph(scaled);
    const Vec& mu = scaled.node_weights();
    const CMat phi = model_features(x, model, prepare_banks(scaled.graph(), model.spec));
    const CMat phi_lim = model_features(project_down(x, lg, mu), model, prepare_banks(lg.graph, model.spec));
    TheoremRow row;
    row.scale = c_grid[k];
    row.resolvent_gap = resolvent_gaps[k].gap;
    row.filter_gap = filter_gaps[k].gap;
    row.node_gap = weighted_norm(phi - interpolate_up(phi_lim, lg), mu);
    row.graph_gap = (aggregate(phi, mu) - aggregate(phi_lim, lg.graph.node_weights())).norm();
    rows.push_back(row);
  }
  return rows;
}

std::vector<TheoremRow> run_theorem_suite(const DeflectionFamily& family, const TheoremSuiteConfig& config) {
  return theorem_gaps(family.base, family.scales(), config);
}

void write_theorem_csv(std::ostream& out, const std::vector<TheoremRow>& rows) {
  const auto old = out.precision(17);
  out << "c,resolvent_gap,filter_gap,node_gap,graph_gap\n";
  for (const auto& r : rows) {
    out << r.scale << ',' << r.resolvent_gap << ',' << r.filter_gap << ',' << r.node_gap << ',' << r.graph_gap
        << '\n';
  }
  out.precision(old);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return true;
}

CoarseInferenceReport run_coarse_inference(const HoloNetModel& m, const std::vector<TwoScaleSample>& test) {
  std::vector<GraphSample> fine;
  std::vector<GraphSample> coarse;
  for (const auto& s : test) {
    fine.push_back(fine_sample(s, m.spec));
    coarse.push_back(coarse_sample(s, m.spec));
  }
  return {mean_absolute_error(m, fine), mean_absolute_error(m, coarse)};
}

TwoScaleSplit make_two_scale_split(const SyntheticTaskSpec& task, std::size_t n_test, double c_min,
                                   double c_max) {
  TwoScaleSplit split{teacher_model(task.seed ^ 0x9e3779b97f4a7c15ULL), {}, {}};
  SyntheticTaskSpec all = task;
  all.kind = TaskKind::TwoScaleRegression;
  all.n_graphs = task.n_graphs + n_test;
  std::vector<TwoScaleSample> samples = gen_two_scale_regression(all, split.teacher, c_min, c_max);
  const auto cut = samples.begin() + static_cast<long>(task.n_graphs);
  split.train.assign(std::make_move_iterator(samples.begin()), std::make_move_iterator(cut));
  split.test.assign(std::make_move_iterator(cut), std::make_move_iterator(samples.end()));
  return split;
}

ScaleExperimentResult run_scale_experiment(const ScaleExperimentConfig& config) {
  const TwoScaleSplit split = make_two_scale_split(config.task, config.n_test, config.c_min, config.c_max);
  const auto& train_set = split.train;
  const auto& test_set = split.test;

  std::vector<Eigen::Index> widths{kChargeClasses};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());

  auto fit = [&](const ModelSpec& spec, std::uint64_t salt) {
    std::mt19937_64 rng(config.task.seed + salt);
    HoloNetModel m = init_model(spec, rng);
    std::vector<GraphSample> data;
    for (const auto& s : train_set) data.push_back(fine_sample(s, spec));
    train(m, data, Loss::MeanAbsoluteError, config.optimizer);
    return run_coarse_inference(m, test_set);
  };
  ScaleExperimentResult r;
  r.resolvnet = fit(dir_resolvnet_spec(widths, 1, 2, {-1.0, 0.0}, 1.0), 1);
  r.fabernet = fit(fabernet_spec(widths, 1, 2, true, 1.0), 2);
  return r;
}

}  // namespace holonet

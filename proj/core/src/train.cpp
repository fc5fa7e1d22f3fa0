#include "holonet/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "holonet/error.hpp"

namespace holonet {

std::string_view to_string(Loss loss) {
  switch (loss) {
    case Loss::CrossEntropy: return "cross_entropy";
    case Loss::MeanAbsoluteError: return "mae";
    case Loss::MeanSquaredError: return "mse";
  }
  return "cross_entropy";
}

Loss loss_from_string(std::string_view name) {
  if (name == "cross_entropy") return Loss::CrossEntropy;
  if (name == "mae") return Loss::MeanAbsoluteError;
  if (name == "mse") return Loss::MeanSquaredError;
  throw InputError("unknown loss '" + std::string(name) + "' (expected cross_entropy, mae or mse)");
}

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd") return OptimizerKind::GradientDescent;
  throw InputError("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

namespace {

struct LayerCache {
  CMat input;
  std::vector<CMat> ax_fwd;
  std::vector<CMat> ax_bwd;
  CMat pre;
};

CMat forward_cached(const CMat& x, const HoloNetModel& m, const GraphBanks& banks,
                    std::vector<LayerCache>& caches) {
  if (x.cols() != m.spec.widths.front()) throw ShapeMismatch("model input width mismatch");
  if (x.rows() != banks.n_nodes()) throw ShapeMismatch("feature rows do not match graph");
  const double alpha = m.spec.alpha;
  caches.clear();
  CMat h = x;
  for (const auto& p : m.layers) {
    LayerCache c;
    c.input = h;
    c.pre = p.bias_matrix(h.rows());
    if (alpha > 0.0) {
      for (std::size_t i = 0; i < p.w_fwd.size(); ++i) {
        c.ax_fwd.push_back(banks.fwd.atoms[i] * h);
        c.pre.noalias() += alpha * c.ax_fwd.back() * p.w_fwd[i];
      }
    }
    if (alpha < 1.0) {
      for (std::size_t i = 0; i < p.w_bwd.size(); ++i) {
        c.ax_bwd.push_back(banks.bwd.atoms[i] * h);
        c.pre.noalias() += (1.0 - alpha) * c.ax_bwd.back() * p.w_bwd[i];
      }
    }
    h = apply_nonlinearity(c.pre, m.spec.rho);
    caches.push_back(std::move(c));
  }
  return h;
}

double kink_slope(double a, Nonlinearity rho) {
  if (rho == Nonlinearity::SplitReLU) return a > 0.0 ? 1.0 : 0.0;
  return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
}

ModelGradient zero_gradient(const HoloNetModel& m) {
  ModelGradient g;
  for (const auto& p : m.layers) {
    LayerParams q;
    for (const auto& w : p.w_fwd) q.w_fwd.push_back(CMat::Zero(w.rows(), w.cols()));
    for (const auto& w : p.w_bwd) q.w_bwd.push_back(CMat::Zero(w.rows(), w.cols()));
    q.bias = RowCVec::Zero(p.bias.size());
    g.layers.push_back(std::move(q));
  }
  g.readout.weight = Mat::Zero(m.readout.weight.rows(), m.readout.weight.cols());
  g.readout.bias = Vec::Zero(m.readout.bias.size());
  return g;
}

// Reverse pass through the layers given dL/dPhi (as dRe + i dIm).
void backward_layers(const HoloNetModel& m, const GraphBanks& banks,
                     const std::vector<LayerCache>& caches, CMat g, ModelGradient& grad) {
  const double alpha = m.spec.alpha;
  for (std::size_t l = caches.size(); l-- > 0;) {
    const auto& c = caches[l];
    const auto& p = m.layers[l];
    auto& gp = grad.layers[l];
    CMat gz(g.rows(), g.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        gz(i, j) = {kink_slope(c.pre(i, j).real(), m.spec.rho) * g(i, j).real(),
                    kink_slope(c.pre(i, j).imag(), m.spec.rho) * g(i, j).imag()};
      }
    }
    gp.bias += gz.colwise().sum();
    const bool need_input_grad = l > 0;
    CMat gx;
    if (need_input_grad) gx = CMat::Zero(c.input.rows(), c.input.cols());
    if (alpha > 0.0) {
      for (std::size_t i = 0; i < p.w_fwd.size(); ++i) {
        gp.w_fwd[i].noalias() += alpha * c.ax_fwd[i].adjoint() * gz;
        if (need_input_grad) gx.noalias() += alpha * banks.fwd.atoms[i].adjoint() * (gz * p.w_fwd[i].adjoint());
      }
    }
    if (alpha < 1.0) {
      for (std::size_t i = 0; i < p.w_bwd.size(); ++i) {
        gp.w_bwd[i].noalias() += (1.0 - alpha) * c.ax_bwd[i].adjoint() * gz;
        if (need_input_grad) {
          gx.noalias() += (1.0 - alpha) * banks.bwd.atoms[i].adjoint() * (gz * p.w_bwd[i].adjoint());
        }
      }
    }
    g = std::move(gx);
  }
}

CMat unstack_gradient(const Mat& gs, Eigen::Index f) {
  CMat g(gs.rows(), f);
  g.real() = gs.leftCols(f);
  g.imag() = gs.rightCols(f);
  return g;
}

void project_to_field(const HoloNetModel& m, ModelGradient& grad) {
  if (m.spec.field != ScalarField::Real) return;
  for (auto& p : grad.layers) {
    for (auto& w : p.w_fwd) w.imag().setZero();
    for (auto& w : p.w_bwd) w.imag().setZero();
    p.bias.imag().setZero();
  }
}

// Loss of one output row block against its targets; fills dL/doutput.
double output_loss(const Mat& out, const NodeTask* node_task, const Vec* target,
                   const std::vector<Eigen::Index>& rows, Loss loss, double scale, Mat* g_out) {
  double total = 0.0;
  if (loss == Loss::CrossEntropy) {
    if (node_task == nullptr) throw InputError("cross-entropy needs class labels");
    for (Eigen::Index r : rows) {
      const auto label = node_task->labels[static_cast<std::size_t>(r)];
      if (label < 0 || label >= out.cols()) throw InputError("class label outside readout range");
      const double mx = out.row(r).maxCoeff();
      const Eigen::RowVectorXd e = (out.row(r).array() - mx).exp().matrix();
      const double z = e.sum();
      total += -(out(r, label) - mx - std::log(z));
      if (g_out) {
        g_out->row(r) += scale * e / z;
        (*g_out)(r, label) -= scale;
      }
    }
    return total * scale;
  }
  for (Eigen::Index r : rows) {
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
      const double t = node_task ? node_task->targets(r, k) : (*target)(k);
      const double d = out(r, k) - t;
      if (loss == Loss::MeanAbsoluteError) {
        total += std::abs(d);
        if (g_out) (*g_out)(r, k) += scale * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
      } else {
        total += d * d;
        if (g_out) (*g_out)(r, k) += scale * 2.0 * d;
      }
    }
  }
  return total * scale;
}

std::vector<Eigen::Index> selected_nodes(const NodeTask& task) {
  if (!task.nodes.empty()) return task.nodes;
  std::vector<Eigen::Index> all(static_cast<std::size_t>(task.x.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
  return all;
}

}  // namespace

double node_loss(const HoloNetModel& m, const NodeTask& task, Loss loss, ModelGradient* grad) {
  const auto rows = selected_nodes(task);
  if (rows.empty()) throw InputError("node task selects no nodes");
  if (loss == Loss::CrossEntropy && task.labels.size() != static_cast<std::size_t>(task.x.rows())) {
    throw ShapeMismatch("node task needs one label per node");
  }
  if (loss != Loss::CrossEntropy &&
      (task.targets.rows() != task.x.rows() || task.targets.cols() != m.spec.output_dim)) {
    throw ShapeMismatch("node regression targets must be N x output_dim");
  }
  std::vector<LayerCache> caches;
  const CMat phi = forward_cached(task.x, m, task.banks, caches);
  const Mat s = stack_real_imag(phi);
  Mat out = s * m.readout.weight;
  out.rowwise() += m.readout.bias.transpose();

  double scale = 1.0 / static_cast<double>(rows.size());
  if (loss != Loss::CrossEntropy) scale /= static_cast<double>(m.spec.output_dim);
  Mat g_out;
  if (grad) g_out = Mat::Zero(out.rows(), out.cols());
  const double value = output_loss(out, &task, nullptr, rows, loss, scale, grad ? &g_out : nullptr);
  if (!grad) return value;

  *grad = zero_gradient(m);
  grad->readout.weight = s.transpose() * g_out;
  grad->readout.bias = g_out.colwise().sum().transpose();
  const Mat gs = g_out * m.readout.weight.transpose();
  backward_layers(m, task.banks, caches, unstack_gradient(gs, phi.cols()), *grad);
  project_to_field(m, *grad);
  return value;
}

double graph_loss(const HoloNetModel& m, const std::vector<GraphSample>& data, Loss loss,
                  ModelGradient* grad) {
  if (data.empty()) throw InputError("graph task has no samples");
  if (loss == Loss::CrossEntropy) throw InputError("graph tasks are regression tasks");
  const double scale = 1.0 / static_cast<double>(data.size() * static_cast<std::size_t>(m.spec.output_dim));
  if (grad) *grad = zero_gradient(m);
  double value = 0.0;
  std::vector<LayerCache> caches;
  for (const auto& sample : data) {
    if (sample.target.size() != m.spec.output_dim) throw ShapeMismatch("graph target has wrong length");
    const CMat phi = forward_cached(sample.x, m, sample.banks, caches);
    const Mat s = stack_real_imag(phi);
    const Vec& mu = sample.banks.node_weights;
    const Vec pooled = s.cwiseAbs().transpose() * mu;
    const Mat pred = (m.readout.weight.transpose() * pooled + m.readout.bias).transpose();
    Mat g_pred;
    if (grad) g_pred = Mat::Zero(1, pred.cols());
    value += output_loss(pred, nullptr, &sample.target, {0}, loss, scale, grad ? &g_pred : nullptr);
    if (!grad) continue;

    const Vec gp = g_pred.row(0).transpose();
    grad->readout.weight += pooled * gp.transpose();
    grad->readout.bias += gp;
    const Vec g_pooled = m.readout.weight * gp;
    Mat gs(s.rows(), s.cols());
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const double v = s(i, j);
        const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        gs(i, j) = sign * mu(i) * g_pooled(j);
      }
    }
    backward_layers(m, sample.banks, caches, unstack_gradient(gs, phi.cols()), *grad);
  }
  if (grad) project_to_field(m, *grad);
  return value;
}

namespace {

template <class Visit>
void visit_parameters(const HoloNetModel& m, Visit&& visit) {
  const bool complex = m.spec.field == ScalarField::Complex;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& p = m.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (std::size_t i = 0; i < p.w_fwd.size(); ++i) visit(prefix + "fwd" + std::to_string(i), p.w_fwd[i].size(), complex);
    for (std::size_t i = 0; i < p.w_bwd.size(); ++i) visit(prefix + "bwd" + std::to_string(i), p.w_bwd[i].size(), complex);
    visit(prefix + "bias", p.bias.size(), complex);
  }
  visit(std::string("readout.weight"), m.readout.weight.size(), false);
  visit(std::string("readout.bias"), m.readout.bias.size(), false);
}

template <class Complex>
void put_complex(std::vector<double>& out, const Complex& w, bool complex) {
  for (Eigen::Index k = 0; k < w.size(); ++k) out.push_back(w.data()[k].real());
  if (complex) {
    for (Eigen::Index k = 0; k < w.size(); ++k) out.push_back(w.data()[k].imag());
  }
}

template <class Complex>
void take_complex(const std::vector<double>& in, std::size_t& pos, Complex& w, bool complex) {
  const auto n = static_cast<std::size_t>(w.size());
  for (std::size_t k = 0; k < n; ++k) {
    w.data()[k] = {in[pos + k], complex ? in[pos + n + k] : 0.0};
  }
  pos += complex ? 2 * n : n;
}

template <class Params>
std::vector<double> flatten(const HoloNetModel& m, const std::vector<LayerParams>& layers, const Params& readout) {
  const bool complex = m.spec.field == ScalarField::Complex;
  std::vector<double> out;
  for (const auto& p : layers) {
    for (const auto& w : p.w_fwd) put_complex(out, w, complex);
    for (const auto& w : p.w_bwd) put_complex(out, w, complex);
    put_complex(out, p.bias, complex);
  }
  out.insert(out.end(), readout.weight.data(), readout.weight.data() + readout.weight.size());
  out.insert(out.end(), readout.bias.data(), readout.bias.data() + readout.bias.size());
  return out;
}

}  // namespace

std::vector<ParameterTensor> parameter_layout(const HoloNetModel& m) {
  std::vector<ParameterTensor> out;
  std::size_t offset = 0;
  visit_parameters(m, [&](const std::string& name, Eigen::Index n, bool complex) {
    const auto size = static_cast<std::size_t>(n) * (complex ? 2 : 1);
    out.push_back({name, offset, size});
    offset += size;
  });
  return out;
}

std::vector<double> flatten_parameters(const HoloNetModel& m) { return flatten(m, m.layers, m.readout); }

std::vector<double> flatten_gradient(const HoloNetModel& m, const ModelGradient& g) {
  return flatten(m, g.layers, g.readout);
}

void assign_parameters(HoloNetModel& m, const std::vector<double>& flat) {
  const bool complex = m.spec.field == ScalarField::Complex;
  const auto layout = parameter_layout(m);
  const std::size_t total = layout.empty() ? 0 : layout.back().offset + layout.back().size;
  if (flat.size() != total) throw ShapeMismatch("parameter vector has the wrong length");
  std::size_t pos = 0;
  for (auto& p : m.layers) {
    for (auto& w : p.w_fwd) take_complex(flat, pos, w, complex);
    for (auto& w : p.w_bwd) take_complex(flat, pos, w, complex);
    take_complex(flat, pos, p.bias, complex);
  }
  std::copy_n(flat.begin() + static_cast<long>(pos), m.readout.weight.size(), m.readout.weight.data());
  pos += static_cast<std::size_t>(m.readout.weight.size());
  std::copy_n(flat.begin() + static_cast<long>(pos), m.readout.bias.size(), m.readout.bias.data());
}

namespace {

template <class LossFn>
TrainResult run_optimizer(HoloNetModel& m, const OptimizerConfig& opt, LossFn loss_fn) {
  if (opt.epochs < 0) throw InputError("epochs must be non-negative");
  if (!(opt.learning_rate >= 0.0)) throw InputError("learning rate must be non-negative");
  TrainResult result;
  std::vector<double> params = flatten_parameters(m);
  std::vector<double> first(params.size(), 0.0);
  std::vector<double> second(params.size(), 0.0);
  auto checked = [](double v, int epoch) {
    if (!std::isfinite(v)) {
      throw NonFiniteLoss("loss became non-finite at epoch " + std::to_string(epoch) +
                          "; lower the learning rate");
    }
    return v;
  };
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    ModelGradient grad;
    const double value = checked(loss_fn(m, &grad), epoch);
    result.loss_curve.push_back(value);
    const std::vector<double> g = flatten_gradient(m, grad);
    const double b1t = 1.0 - std::pow(opt.beta1, epoch + 1);
    const double b2t = 1.0 - std::pow(opt.beta2, epoch + 1);
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double gk = checked(g[k], epoch) + opt.weight_decay * params[k];
      if (opt.kind == OptimizerKind::GradientDescent) {
        params[k] -= opt.learning_rate * gk;
      } else {
        first[k] = opt.beta1 * first[k] + (1.0 - opt.beta1) * gk;
        second[k] = opt.beta2 * second[k] + (1.0 - opt.beta2) * gk * gk;
        params[k] -= opt.learning_rate * (first[k] / b1t) / (std::sqrt(second[k] / b2t) + opt.epsilon);
      }
    }
    assign_parameters(m, params);
  }
  result.loss_curve.push_back(checked(loss_fn(m, nullptr), opt.epochs));
  return result;
}

template <class LossFn>
GradcheckReport finite_difference_check(const HoloNetModel& m, double step, LossFn loss_fn) {
  ModelGradient grad;
  loss_fn(m, &grad);
  const std::vector<double> analytic = flatten_gradient(m, grad);
  const std::vector<double> base = flatten_parameters(m);
  HoloNetModel probe = m;
  std::vector<double> params = base;
  std::vector<double> numeric(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    params[k] = base[k] + step;
    assign_parameters(probe, params);
    const double plus = loss_fn(probe, nullptr);
    params[k] = base[k] - step;
    assign_parameters(probe, params);
    const double minus = loss_fn(probe, nullptr);
    params[k] = base[k];
    numeric[k] = (plus - minus) / (2.0 * step);
  }
  GradcheckReport report;
  for (const auto& t : parameter_layout(m)) {
    double diff = 0.0;
    double scale_a = 0.0;
    double scale_n = 0.0;
    for (std::size_t k = t.offset; k < t.offset + t.size; ++k) {
      diff = std::max(diff, std::abs(analytic[k] - numeric[k]));
      scale_a = std::max(scale_a, std::abs(analytic[k]));
      scale_n = std::max(scale_n, std::abs(numeric[k]));
    }
    const double scale = std::max(scale_a, scale_n);
    const double err = scale < 1e-7 ? diff : diff / scale;
    report.per_tensor.emplace_back(t.name, err);
    report.max_error = std::max(report.max_error, err);
  }
  return report;
}

}  // namespace

TrainResult train(HoloNetModel& m, const NodeTask& task, Loss loss, const OptimizerConfig& opt) {
  m.validate();
  return run_optimizer(m, opt, [&](const HoloNetModel& model, ModelGradient* g) {
    return node_loss(model, task, loss, g);
  });
}

TrainResult train(HoloNetModel& m, const std::vector<GraphSample>& data, Loss loss,
                  const OptimizerConfig& opt) {
  m.validate();
  return run_optimizer(m, opt, [&](const HoloNetModel& model, ModelGradient* g) {
    return graph_loss(model, data, loss, g);
  });
}

double accuracy(const HoloNetModel& m, const NodeTask& task) {
  const auto rows = selected_nodes(task);
  const Mat out = model_forward(task.x, m, task.banks).node_outputs;
  std::size_t hits = 0;
  for (Eigen::Index r : rows) {
    Eigen::Index best = 0;
    out.row(r).maxCoeff(&best);
    if (best == task.labels[static_cast<std::size_t>(r)]) ++hits;
  }
  return rows.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(rows.size());
}

double mean_absolute_error(const HoloNetModel& m, const std::vector<GraphSample>& data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : data) {
    const Vec pred = graph_output(model_features(s.x, m, s.banks), s.banks.node_weights, m.readout);
    total += (pred - s.target).cwiseAbs().mean();
  }
  return total / static_cast<double>(data.size());
}

GradcheckReport gradcheck(const HoloNetModel& m, const NodeTask& task, Loss loss, double step) {
  m.validate();
  return finite_difference_check(m, step, [&](const HoloNetModel& model, ModelGradient* g) {
    return node_loss(model, task, loss, g);
  });
}

GradcheckReport gradcheck(const HoloNetModel& m, const std::vector<GraphSample>& data, Loss loss,
                          double step) {
  m.validate();
  return finite_difference_check(m, step, [&](const HoloNetModel& model, ModelGradient* g) {
    return graph_loss(model, data, loss, g);
  });
}

double min_kink_distance(const HoloNetModel& m, const GraphBanks& banks, const CMat& x) {
  std::vector<LayerCache> caches;
  forward_cached(x, m, banks, caches);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : caches) {
    best = std::min(best, c.pre.real().cwiseAbs().minCoeff());
    if (!is_purely_real(c.pre)) best = std::min(best, c.pre.imag().cwiseAbs().minCoeff());
  }
  return best;
}

CMat jitter_inputs(const HoloNetModel& m, const GraphBanks& banks, CMat x, std::mt19937_64& rng,
                   double margin) {
  const bool real = is_purely_real(x);
  const double scale = 1e-2 * std::max(1.0, x.cwiseAbs().maxCoeff());
  std::normal_distribution<double> noise(0.0, scale);
  for (int attempt = 0; attempt < 1000 && min_kink_distance(m, banks, x) < margin; ++attempt) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      x.data()[k] += cplx(noise(rng), real ? 0.0 : noise(rng));
    }
  }
  return x;
}

}  // namespace holonet

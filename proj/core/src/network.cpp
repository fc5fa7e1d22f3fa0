#include "holonet/network.hpp"

#include <cmath>
#include <string>

#include "holonet/error.hpp"

namespace holonet {

std::string_view to_string(Nonlinearity rho) {
  return rho == Nonlinearity::SplitReLU ? "split_relu" : "split_abs";
}

std::string_view to_string(ScalarField field) {
  return field == ScalarField::Real ? "real" : "complex";
}

Nonlinearity nonlinearity_from_string(std::string_view name) {
  if (name == "split_relu" || name == "relu") return Nonlinearity::SplitReLU;
  if (name == "split_abs" || name == "abs") return Nonlinearity::SplitAbs;
  throw InputError("unknown nonlinearity '" + std::string(name) + "' (expected split_relu or split_abs)");
}

ScalarField scalar_field_from_string(std::string_view name) {
  if (name == "real") return ScalarField::Real;
  if (name == "complex") return ScalarField::Complex;
  throw InputError("unknown scalar field '" + std::string(name) + "' (expected real or complex)");
}

CMat apply_nonlinearity(const CMat& z, Nonlinearity rho) {
  CMat out(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double a = z(i, j).real();
      const double b = z(i, j).imag();
      out(i, j) = rho == Nonlinearity::SplitReLU ? cplx(std::max(a, 0.0), std::max(b, 0.0))
                                                 : cplx(std::abs(a), std::abs(b));
    }
  }
  return out;
}

Eigen::Index LayerParams::in_width() const {
  if (!w_fwd.empty()) return w_fwd.front().rows();
  if (!w_bwd.empty()) return w_bwd.front().rows();
  return 0;
}

CMat LayerParams::bias_matrix(Eigen::Index n_nodes) const { return bias.replicate(n_nodes, 1); }

void ModelSpec::validate() const {
  fwd_bank.validate();
  bwd_bank.validate();
  if (widths.empty()) throw InputError("model needs at least an input width");
  for (auto w : widths) {
    if (w < 1) throw InputError("layer widths must be positive");
  }
  if (output_dim < 1) throw InputError("output dimension must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  if (op == OperatorKind::InDegreeLaplacian) {
    for (const auto* bank : {&fwd_bank, &bwd_bank}) {
      if (!bank->is_resolvent()) {
        throw InputError("Laplacian models use resolvent banks (Dir-ResolvNet)");
      }
    }
  }
}

ModelSpec fabernet_spec(std::vector<Eigen::Index> widths, Eigen::Index output_dim, int max_order,
                        bool include_order_zero, double alpha, Nonlinearity rho, ScalarField field,
                        double gamma) {
  ModelSpec s;
  s.op = OperatorKind::FaberNetNormalized;
  s.fwd_bank = FilterBankSpec::faber(max_order, gamma, include_order_zero);
  s.bwd_bank = s.fwd_bank;
  s.widths = std::move(widths);
  s.alpha = alpha;
  s.rho = rho;
  s.field = field;
  s.output_dim = output_dim;
  s.validate();
  return s;
}

ModelSpec dir_resolvnet_spec(std::vector<Eigen::Index> widths, Eigen::Index output_dim,
                             int max_power, cplx pole, double alpha, Nonlinearity rho,
                             ScalarField field) {
  ModelSpec s;
  s.op = OperatorKind::InDegreeLaplacian;
  s.fwd_bank = FilterBankSpec::resolvent(max_power, pole);
  s.bwd_bank = s.fwd_bank;
  s.widths = std::move(widths);
  s.alpha = alpha;
  s.rho = rho;
  s.field = field;
  s.output_dim = output_dim;
  s.validate();
  return s;
}

void HoloNetModel::validate() const {
  spec.validate();
  if (static_cast<int>(layers.size()) != spec.depth()) {
    throw ShapeMismatch("model has " + std::to_string(layers.size()) + " layers but spec depth " +
                        std::to_string(spec.depth()));
  }
  const bool real = spec.field == ScalarField::Real;
  auto check = [&](const CMat& w, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (w.rows() != rows || w.cols() != cols) {
      throw ShapeMismatch(what + " has shape " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                          ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (real && !is_purely_real(w)) throw InputError(what + " has imaginary entries in a real model");
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& p = layers[l];
    const Eigen::Index fin = spec.widths[l];
    const Eigen::Index fout = spec.widths[l + 1];
    const std::string tag = "layer " + std::to_string(l);
    if (static_cast<int>(p.w_fwd.size()) != spec.fwd_bank.atom_count() ||
        static_cast<int>(p.w_bwd.size()) != spec.bwd_bank.atom_count()) {
      throw ShapeMismatch(tag + ": weight count does not match bank sizes");
    }
    for (std::size_t i = 0; i < p.w_fwd.size(); ++i) check(p.w_fwd[i], fin, fout, tag + " fwd weight " + std::to_string(i));
    for (std::size_t i = 0; i < p.w_bwd.size(); ++i) check(p.w_bwd[i], fin, fout, tag + " bwd weight " + std::to_string(i));
    check(p.bias, 1, fout, tag + " bias");
  }
  const Eigen::Index f_last = spec.widths.back();
  if (readout.weight.rows() != 2 * f_last || readout.weight.cols() != spec.output_dim ||
      readout.bias.size() != spec.output_dim) {
    throw ShapeMismatch("readout shape does not match final width and output dimension");
  }
}

HoloNetModel init_model(const ModelSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  HoloNetModel m;
  m.spec = spec;
  const bool complex = spec.field == ScalarField::Complex;
  const int atoms = spec.fwd_bank.atom_count() + spec.bwd_bank.atom_count();
  auto draw = [&](Eigen::Index rows, Eigen::Index cols, double s) {
    std::uniform_real_distribution<double> u(-s, s);
    CMat w(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double re = u(rng);
        const double im = complex ? u(rng) : 0.0;
        w(i, j) = {re, im};
      }
    }
    return w;
  };
  for (int l = 0; l < spec.depth(); ++l) {
    const Eigen::Index fin = spec.widths[static_cast<std::size_t>(l)];
    const Eigen::Index fout = spec.widths[static_cast<std::size_t>(l) + 1];
    const double s = 1.0 / std::sqrt(static_cast<double>(fin * atoms));
    LayerParams p;
    for (int i = 0; i < spec.fwd_bank.atom_count(); ++i) p.w_fwd.push_back(draw(fin, fout, s));
    for (int i = 0; i < spec.bwd_bank.atom_count(); ++i) p.w_bwd.push_back(draw(fin, fout, s));
    p.bias = RowCVec::Zero(fout);
    m.layers.push_back(std::move(p));
  }
  const Eigen::Index f2 = 2 * spec.widths.back();
  std::uniform_real_distribution<double> u(-1.0 / std::sqrt(static_cast<double>(f2)),
                                           1.0 / std::sqrt(static_cast<double>(f2)));
  m.readout.weight.resize(f2, spec.output_dim);
  for (Eigen::Index j = 0; j < f2 * spec.output_dim; ++j) m.readout.weight.data()[j] = u(rng);
  m.readout.bias = Vec::Zero(spec.output_dim);
  return m;
}

GraphBanks prepare_banks(const DiGraph& g, const ModelSpec& spec) {
  const CMat t = characteristic_operator(g, spec.op).matrix.cast<cplx>();
  GraphBanks b;
  b.fwd = build_bank(t, spec.fwd_bank);
  b.bwd = build_bank(weighted_adjoint(t, g.node_weights()), spec.bwd_bank);
  b.node_weights = g.node_weights();
  return b;
}

CMat layer_forward(const CMat& x, const LayerParams& p, const GraphBanks& banks, double alpha,
                   Nonlinearity rho) {
  const Eigen::Index n = banks.n_nodes();
  if (x.rows() != n) throw ShapeMismatch("layer_forward: feature rows do not match graph");
  if (p.w_fwd.size() != banks.fwd.size() || p.w_bwd.size() != banks.bwd.size()) {
    throw ShapeMismatch("layer_forward: weight count does not match bank size");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("layer_forward: alpha must lie in [0, 1]");
  const Eigen::Index fout = p.out_width();
  auto check = [&](const CMat& w) {
    if (w.rows() != x.cols() || w.cols() != fout) throw ShapeMismatch("layer_forward: weight shape mismatch");
  };
  CMat z = p.bias_matrix(n);
  // A direction with zero mixing weight is skipped entirely, so its weights
  // never touch the result.
  if (alpha > 0.0) {
    for (std::size_t i = 0; i < p.w_fwd.size(); ++i) {
      check(p.w_fwd[i]);
      z.noalias() += alpha * (banks.fwd.atoms[i] * x) * p.w_fwd[i];
    }
  }
  if (alpha < 1.0) {
    for (std::size_t i = 0; i < p.w_bwd.size(); ++i) {
      check(p.w_bwd[i]);
      z.noalias() += (1.0 - alpha) * (banks.bwd.atoms[i] * x) * p.w_bwd[i];
    }
  }
  return apply_nonlinearity(z, rho);
}

CMat model_features(const CMat& x, const HoloNetModel& m, const GraphBanks& banks) {
  if (x.cols() != m.spec.widths.front()) throw ShapeMismatch("model input width mismatch");
  CMat h = x;
  for (const auto& layer : m.layers) h = layer_forward(h, layer, banks, m.spec.alpha, m.spec.rho);
  return h;
}

Vec aggregate(const CMat& x, const Vec& mu) {
  if (x.rows() != mu.size()) throw ShapeMismatch("aggregate: feature rows do not match node weights");
  return x.cwiseAbs().transpose() * mu;
}

Mat stack_real_imag(const CMat& x) {
  Mat out(x.rows(), 2 * x.cols());
  out.leftCols(x.cols()) = x.real();
  out.rightCols(x.cols()) = x.imag();
  return out;
}

Mat node_outputs(const CMat& features, const Readout& r) {
  if (2 * features.cols() != r.weight.rows()) throw ShapeMismatch("readout width mismatch");
  Mat out = stack_real_imag(features) * r.weight;
  out.rowwise() += r.bias.transpose();
  return out;
}

Vec graph_output(const CMat& features, const Vec& mu, const Readout& r) {
  if (2 * features.cols() != r.weight.rows()) throw ShapeMismatch("readout width mismatch");
  const Mat stacked = stack_real_imag(features);
  const Vec pooled = stacked.cwiseAbs().transpose() * mu;
  return r.weight.transpose() * pooled + r.bias;
}

ModelOutput model_forward(const CMat& x, const HoloNetModel& m, const GraphBanks& banks) {
  ModelOutput out;
  out.features = model_features(x, m, banks);
  out.node_outputs = node_outputs(out.features, m.readout);
  out.graph_output = graph_output(out.features, banks.node_weights, m.readout);
  return out;
}

namespace {

CMat expand_weight(const CMat& w) {
  const Eigen::Index r = w.rows();
  const Eigen::Index c = w.cols();
  Mat e(2 * r, 2 * c);
  e.topLeftCorner(r, c) = w.real();
  e.topRightCorner(r, c) = w.imag();
  e.bottomLeftCorner(r, c) = -w.imag();
  e.bottomRightCorner(r, c) = w.real();
  return e.cast<cplx>();
}

}  // namespace

HoloNetModel expand_complex_to_real(const HoloNetModel& m) {
  m.validate();
  for (const auto* bank : {&m.spec.fwd_bank, &m.spec.bwd_bank}) {
    if (!bank->real_on_real_operators()) {
      throw NonRealBank("bank has a non-real resolvent pole; its atoms are complex");
    }
  }
  HoloNetModel e;
  e.spec = m.spec;
  e.spec.field = ScalarField::Real;
  for (auto& w : e.spec.widths) w *= 2;
  for (const auto& p : m.layers) {
    LayerParams q;
    for (const auto& w : p.w_fwd) q.w_fwd.push_back(expand_weight(w));
    for (const auto& w : p.w_bwd) q.w_bwd.push_back(expand_weight(w));
    const Eigen::Index f = p.bias.size();
    q.bias.resize(2 * f);
    q.bias.head(f) = p.bias.real().cast<cplx>();
    q.bias.tail(f) = p.bias.imag().cast<cplx>();
    e.layers.push_back(std::move(q));
  }
  const Eigen::Index f2 = m.readout.weight.rows();
  e.readout.weight = Mat::Zero(2 * f2, m.readout.weight.cols());
  e.readout.weight.topRows(f2) = m.readout.weight;
  e.readout.bias = m.readout.bias;
  return e;
}

HoloNetModel expand_complex_to_real(const HoloNetModel& m, const GraphBanks& banks) {
  for (const auto* bank : {&banks.fwd, &banks.bwd}) {
    for (const auto& a : bank->atoms) {
      if (!is_purely_real(a)) throw NonRealBank("bank atom has imaginary entries");
    }
  }
  return expand_complex_to_real(m);
}

}  // namespace holonet

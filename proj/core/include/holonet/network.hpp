#pragma once

#include <random>
#include <string_view>
#include <vector>

#include "holonet/digraph.hpp"
#include "holonet/holocalc.hpp"

namespace holonet {

// rho(a + ib) = f(a) + i f(b) with f = ReLU or |.|.
enum class Nonlinearity { SplitReLU, SplitAbs };
enum class ScalarField { Real, Complex };

std::string_view to_string(Nonlinearity rho);
std::string_view to_string(ScalarField field);
Nonlinearity nonlinearity_from_string(std::string_view name);
ScalarField scalar_field_from_string(std::string_view name);

CMat apply_nonlinearity(const CMat& z, Nonlinearity rho);

// Parameters of one layer
//   X' = rho(alpha sum_i Psi_i(T) X W_i + (1 - alpha) sum_i Psi_i(T*) X V_i + B).
// The bias is a row broadcast over nodes, so B = 1 b: every column is a
// multiple of the constant vector.
struct LayerParams {
  std::vector<CMat> w_fwd;  // one F_in x F_out matrix per forward atom
  std::vector<CMat> w_bwd;  // one F_in x F_out matrix per backward atom
  RowCVec bias;             // 1 x F_out

  Eigen::Index in_width() const;
  Eigen::Index out_width() const { return bias.size(); }
  CMat bias_matrix(Eigen::Index n_nodes) const;
};

// Real affine map from [Re X | Im X] (2F features) to outputs.
struct Readout {
  Mat weight;  // 2F x n_out
  Vec bias;    // n_out
};

struct ModelSpec {
  OperatorKind op = OperatorKind::FaberNetNormalized;
  FilterBankSpec fwd_bank = FilterBankSpec::faber(2);
  FilterBankSpec bwd_bank = FilterBankSpec::faber(2);
  std::vector<Eigen::Index> widths{1};  // F_0, F_1, ..., F_L
  double alpha = 0.5;
  Nonlinearity rho = Nonlinearity::SplitReLU;
  ScalarField field = ScalarField::Real;
  Eigen::Index output_dim = 1;

  int depth() const { return static_cast<int>(widths.size()) - 1; }
  // Throws InputError on an inconsistent spec.
  void validate() const;
};

// FaberNet: T = D_in^{-1/4} W D_out^{-1/4} with Faber (monomial) banks.
ModelSpec fabernet_spec(std::vector<Eigen::Index> widths, Eigen::Index output_dim, int max_order = 2,
                        bool include_order_zero = true, double alpha = 0.5,
                        Nonlinearity rho = Nonlinearity::SplitReLU,
                        ScalarField field = ScalarField::Real, double gamma = 0.5);

// Dir-ResolvNet: T = L_in with resolvent banks (powers 1..K, no order-zero atom).
ModelSpec dir_resolvnet_spec(std::vector<Eigen::Index> widths, Eigen::Index output_dim,
                             int max_power = 2, cplx pole = {-1.0, 0.0}, double alpha = 0.5,
                             Nonlinearity rho = Nonlinearity::SplitReLU,
                             ScalarField field = ScalarField::Real);

struct HoloNetModel {
  ModelSpec spec;
  std::vector<LayerParams> layers;
  Readout readout;

  int depth() const { return static_cast<int>(layers.size()); }
  // Checks widths chain, atom counts, real-field parameters and the
  // Dir-ResolvNet no-order-zero rule. Throws InputError / ShapeMismatch.
  void validate() const;
};

// Uniform init in [-s, s], s = (fan_in * atom_count)^{-1/2}; real and
// imaginary parts drawn independently for complex models. Biases start at 0.
HoloNetModel init_model(const ModelSpec& spec, std::mt19937_64& rng);

// Forward and backward banks of one graph: Psi_i(T) and Psi_i(T*) with T* the
// adjoint in the node-weighted inner product.
struct GraphBanks {
  PrecomputedBank fwd;
  PrecomputedBank bwd;
  Vec node_weights;

  Eigen::Index n_nodes() const { return node_weights.size(); }
};

GraphBanks prepare_banks(const DiGraph& g, const ModelSpec& spec);

CMat layer_forward(const CMat& x, const LayerParams& p, const GraphBanks& banks, double alpha,
                   Nonlinearity rho);

// Node features Phi(X) after all layers.
CMat model_features(const CMat& x, const HoloNetModel& m, const GraphBanks& banks);

// Omega(X)_j = sum_i |X_ij| mu_i.
Vec aggregate(const CMat& x, const Vec& mu);

// [Re X | Im X] as an N x 2F real matrix.
Mat stack_real_imag(const CMat& x);

// Readout applied per node: [Re X | Im X] R + b.
Mat node_outputs(const CMat& features, const Readout& r);
// Graph-level path: Omega([Re X | Im X]) R + b.
Vec graph_output(const CMat& features, const Vec& mu, const Readout& r);

struct ModelOutput {
  CMat features;
  Mat node_outputs;
  Vec graph_output;
};

ModelOutput model_forward(const CMat& x, const HoloNetModel& m, const GraphBanks& banks);

// Real network of doubled widths that reproduces a complex one on real banks.
// Inputs are fed as [Re X | Im X]; each complex weight W becomes
//   [ W_re  W_im ]
//   [-W_im  W_re ]
// acting from the right on row features, the bias becomes [b_re | b_im], and
// the readout keeps the original rows for the first 2F inputs and zeros for
// the (vanishing) imaginary half. Throws NonRealBank if a bank spec can
// produce complex atoms on a real operator.
HoloNetModel expand_complex_to_real(const HoloNetModel& m);
// Same, additionally checking the precomputed atoms of one graph.
HoloNetModel expand_complex_to_real(const HoloNetModel& m, const GraphBanks& banks);

}  // namespace holonet

#pragma once

#include <random>
#include <string>
#include <vector>

#include "holonet/network.hpp"

namespace holonet {

enum class Loss { CrossEntropy, MeanAbsoluteError, MeanSquaredError };

std::string_view to_string(Loss loss);
Loss loss_from_string(std::string_view name);

// Node-level task on one graph. Classification uses `labels` (one class index
// per node); regression uses `targets` (N x output_dim). `nodes` selects the
// nodes that enter the loss; empty means all.
struct NodeTask {
  GraphBanks banks;
  CMat x;
  std::vector<int> labels;
  Mat targets;
  std::vector<Eigen::Index> nodes;
};

// One graph of a graph-level regression task.
struct GraphSample {
  GraphBanks banks;
  CMat x;
  Vec target;
};

// Gradients in the model's own shapes. Complex entries hold
// dL/dRe + i dL/dIm; for real models the imaginary parts are zero.
struct ModelGradient {
  std::vector<LayerParams> layers;
  Readout readout;
};

// Mean loss over the selected nodes (or graphs), with the analytic gradient
// written to `grad` when given.
double node_loss(const HoloNetModel& m, const NodeTask& task, Loss loss, ModelGradient* grad = nullptr);
double graph_loss(const HoloNetModel& m, const std::vector<GraphSample>& data, Loss loss,
                  ModelGradient* grad = nullptr);

// Flat real parameter vector: per layer the forward weights, backward weights
// and bias (column-major real plane, then the imaginary plane for complex
// models), followed by the readout weight and bias.
struct ParameterTensor {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

std::vector<ParameterTensor> parameter_layout(const HoloNetModel& m);
std::vector<double> flatten_parameters(const HoloNetModel& m);
void assign_parameters(HoloNetModel& m, const std::vector<double>& flat);
std::vector<double> flatten_gradient(const HoloNetModel& m, const ModelGradient& g);

enum class OptimizerKind { GradientDescent, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.01;
  int epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

struct TrainResult {
  // Loss before every update, plus the final loss.
  std::vector<double> loss_curve;
};

// Full-batch training. Throws NonFiniteLoss when the loss or a gradient
// stops being finite.
TrainResult train(HoloNetModel& m, const NodeTask& task, Loss loss, const OptimizerConfig& opt);
TrainResult train(HoloNetModel& m, const std::vector<GraphSample>& data, Loss loss,
                  const OptimizerConfig& opt);

// Fraction of selected nodes whose arg-max readout matches the label.
double accuracy(const HoloNetModel& m, const NodeTask& task);
double mean_absolute_error(const HoloNetModel& m, const std::vector<GraphSample>& data);

struct GradcheckReport {
  double max_error = 0.0;
  std::vector<std::pair<std::string, double>> per_tensor;
};

// Central finite differences against the analytic gradient, per parameter
// tensor. The error of a tensor is max|analytic - numeric| divided by the
// larger of the two max-norms; tensors whose gradient vanishes (both norms
// below 1e-7) report the absolute deviation instead.
GradcheckReport gradcheck(const HoloNetModel& m, const NodeTask& task, Loss loss, double step = 1e-6);
GradcheckReport gradcheck(const HoloNetModel& m, const std::vector<GraphSample>& data, Loss loss,
                          double step = 1e-6);

// Smallest |Re| or |Im| of any pre-activation. Imaginary parts that vanish
// identically (real pipelines) are ignored.
double min_kink_distance(const HoloNetModel& m, const GraphBanks& banks, const CMat& x);

// Adds small noise to x until every pre-activation is at least `margin` away
// from the nonlinearity's kink.
CMat jitter_inputs(const HoloNetModel& m, const GraphBanks& banks, CMat x, std::mt19937_64& rng,
                   double margin = 1e-4);

}  // namespace holonet

#pragma once

#include <Eigen/Core>
#include <vector>

#include "cmaml/numkit/rng.hpp"

namespace cmaml::numkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation { Tanh, Relu };
enum class OutputHead { ScalarValue, GaussianPolicy, CategoricalPolicy };

// Gaussian heads clamp the state-independent log-std to this interval.
constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;
constexpr double kLogStdInit = -0.5;

/// Shape of a fully connected network. `layer_sizes` includes the input and
/// output layers; hidden layers use `activation`, the output layer is linear.
/// A GaussianPolicy head appends one free log-std parameter per output
/// dimension at the tail of the flat parameter vector.
struct MlpSpec {
  std::vector<int> layer_sizes;
  Activation activation = Activation::Tanh;
  OutputHead head = OutputHead::ScalarValue;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int param_count() const;
  /// Size of the distribution-parameter vector produced by mlp_forward:
  /// 1 for scalar, 2*dim for gaussian (mean then log-std), dim for categorical.
  int dist_param_count() const;

  void validate() const;  // throws ShapeError on malformed specs

  bool operator==(const MlpSpec&) const = default;
};

/// Caches from a forward pass, required by mlp_backward / mlp_jvp.
struct MlpWorkspace {
  std::vector<Vec> inputs;  // inputs[l] = input to layer l (inputs[0] = x)
  std::vector<Vec> outputs; // outputs[l] = post-activation output of layer l
};

/// Evaluates the network. For GaussianPolicy the result is [mean, log_std]
/// with log_std clamped; for CategoricalPolicy the raw logits; for
/// ScalarValue a length-1 vector.
Vec mlp_forward(const MlpSpec& spec, const Vec& params, const Vec& input,
                MlpWorkspace* ws = nullptr);

/// Reverse-mode: gradient of <out_grad, output> with respect to the flat
/// parameter vector. `ws` must come from mlp_forward on the same
/// (params, input). Clamped log-std entries receive zero gradient.
Vec mlp_backward(const MlpSpec& spec, const Vec& params, const MlpWorkspace& ws,
                 const Vec& out_grad);

/// Forward-mode: directional derivative of the output along the parameter
/// tangent `tangent`, evaluated with caches from mlp_forward.
Vec mlp_jvp(const MlpSpec& spec, const Vec& params, const MlpWorkspace& ws,
            const Vec& tangent);

/// Uniform fan-in-scaled initialization; biases zero, log-std at kLogStdInit.
Vec mlp_init_params(const MlpSpec& spec, Rng& rng);

}  // namespace cmaml::numkit

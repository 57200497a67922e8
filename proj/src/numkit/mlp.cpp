#include "cmaml/numkit/mlp.hpp"

#include <string>

#include "cmaml/errors.hpp"

namespace cmaml::numkit {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;
using RowMajorMutMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;

Vec activate(const MlpSpec& spec, const Vec& z) {
  if (spec.activation == Activation::Tanh) return z.array().tanh();
  return z.array().max(0.0);
}

// Derivative expressed through the activation output.
Vec activate_deriv(const MlpSpec& spec, const Vec& a) {
  if (spec.activation == Activation::Tanh)
    return (1.0 - a.array().square()).matrix();
  return (a.array() > 0.0).cast<double>().matrix();
}

}  // namespace

int MlpSpec::param_count() const {
  int n = 0;
  for (int l = 0; l + 1 < static_cast<int>(layer_sizes.size()); ++l)
    n += layer_sizes[l + 1] * (layer_sizes[l] + 1);
  if (head == OutputHead::GaussianPolicy) n += output_dim();
  return n;
}

int MlpSpec::dist_param_count() const {
  switch (head) {
    case OutputHead::ScalarValue: return 1;
    case OutputHead::GaussianPolicy: return 2 * output_dim();
    case OutputHead::CategoricalPolicy: return output_dim();
  }
  return 0;
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2)
    throw ShapeError("MlpSpec: need at least input and output layer");
  for (int s : layer_sizes)
    if (s < 1) throw ShapeError("MlpSpec: all layer sizes must be >= 1");
  if (head == OutputHead::ScalarValue && output_dim() != 1)
    throw ShapeError("MlpSpec: scalar_value head requires output size 1");
}

Vec mlp_forward(const MlpSpec& spec, const Vec& params, const Vec& input,
                MlpWorkspace* ws) {
  spec.validate();
  if (params.size() != spec.param_count())
    throw ShapeError("mlp_forward: params length " +
                     std::to_string(params.size()) + " != expected " +
                     std::to_string(spec.param_count()));
  if (input.size() != spec.input_dim())
    throw ShapeError("mlp_forward: input length mismatch");

  const int layers = spec.layer_count();
  if (ws) {
    ws->inputs.assign(layers, Vec());
    ws->outputs.assign(layers, Vec());
  }

  Vec h = input;
  int off = 0;
  for (int l = 0; l < layers; ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    RowMajorMap w(params.data() + off, out, in);
    off += out * in;
    Eigen::Map<const Vec> b(params.data() + off, out);
    off += out;
    if (ws) ws->inputs[l] = h;
    Vec z = w * h + b;
    h = (l + 1 < layers) ? activate(spec, z) : z;
    if (ws) ws->outputs[l] = h;
  }

  if (spec.head == OutputHead::GaussianPolicy) {
    const int dim = spec.output_dim();
    Vec out(2 * dim);
    out.head(dim) = h;
    Eigen::Map<const Vec> log_std(params.data() + off, dim);
    out.tail(dim) =
        log_std.array().min(kLogStdMax).max(kLogStdMin).matrix();
    return out;
  }
  return h;
}

Vec mlp_backward(const MlpSpec& spec, const Vec& params, const MlpWorkspace& ws,
                 const Vec& out_grad) {
  if (out_grad.size() != spec.dist_param_count())
    throw ShapeError("mlp_backward: output gradient length mismatch");
  const int layers = spec.layer_count();
  Vec grad = Vec::Zero(params.size());

  Vec delta;
  if (spec.head == OutputHead::GaussianPolicy) {
    const int dim = spec.output_dim();
    delta = out_grad.head(dim);
    const int tail_off = params.size() - dim;
    for (int i = 0; i < dim; ++i) {
      const double ls = params[tail_off + i];
      // clamped entries are flat, no gradient flows
      grad[tail_off + i] =
          (ls > kLogStdMin && ls < kLogStdMax) ? out_grad[dim + i] : 0.0;
    }
  } else {
    delta = out_grad;
  }

  // layer parameter offsets
  std::vector<int> offsets(layers);
  int off = 0;
  for (int l = 0; l < layers; ++l) {
    offsets[l] = off;
    off += spec.layer_sizes[l + 1] * (spec.layer_sizes[l] + 1);
  }

  for (int l = layers - 1; l >= 0; --l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    if (l + 1 < layers)
      delta = delta.cwiseProduct(activate_deriv(spec, ws.outputs[l]));
    RowMajorMutMap dw(grad.data() + offsets[l], out, in);
    dw = delta * ws.inputs[l].transpose();
    Eigen::Map<Vec>(grad.data() + offsets[l] + out * in, out) = delta;
    if (l > 0) {
      RowMajorMap w(params.data() + offsets[l], out, in);
      delta = w.transpose() * delta;
    }
  }
  return grad;
}

Vec mlp_jvp(const MlpSpec& spec, const Vec& params, const MlpWorkspace& ws,
            const Vec& tangent) {
  if (tangent.size() != params.size())
    throw ShapeError("mlp_jvp: tangent length mismatch");
  const int layers = spec.layer_count();

  Vec t = Vec::Zero(spec.input_dim());
  int off = 0;
  for (int l = 0; l < layers; ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    RowMajorMap w(params.data() + off, out, in);
    RowMajorMap wv(tangent.data() + off, out, in);
    off += out * in;
    Eigen::Map<const Vec> bv(tangent.data() + off, out);
    off += out;
    Vec tz = wv * ws.inputs[l] + w * t + bv;
    t = (l + 1 < layers) ? tz.cwiseProduct(activate_deriv(spec, ws.outputs[l]))
                         : tz;
  }

  if (spec.head == OutputHead::GaussianPolicy) {
    const int dim = spec.output_dim();
    Vec out(2 * dim);
    out.head(dim) = t;
    const int tail_off = params.size() - dim;
    for (int i = 0; i < dim; ++i) {
      const double ls = params[tail_off + i];
      out[dim + i] =
          (ls > kLogStdMin && ls < kLogStdMax) ? tangent[tail_off + i] : 0.0;
    }
    return out;
  }
  return t;
}

Vec mlp_init_params(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  Vec params = Vec::Zero(spec.param_count());
  int off = 0;
  for (int l = 0; l < spec.layer_count(); ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < out * in; ++i)
      params[off + i] = rng.uniform(-scale, scale);
    off += out * in;
    off += out;  // biases stay zero
  }
  if (spec.head == OutputHead::GaussianPolicy)
    params.tail(spec.output_dim()).setConstant(kLogStdInit);
  return params;
}

}  // namespace cmaml::numkit

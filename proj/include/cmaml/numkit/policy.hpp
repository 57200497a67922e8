#pragma once

#include <Eigen/Core>

#include "cmaml/numkit/distributions.hpp"
#include "cmaml/numkit/mlp.hpp"
#include "cmaml/numkit/rng.hpp"

namespace cmaml::numkit {

/// Stochastic policy backed by an MLP. Continuous policies use a diagonal
/// Gaussian head (state-independent log-std); discrete policies a softmax
/// head. Actions are carried as vectors: for discrete policies a length-1
/// vector holding the action index.
class Policy {
 public:
  Policy() = default;
  explicit Policy(MlpSpec spec);

  const MlpSpec& spec() const { return spec_; }
  int obs_dim() const { return spec_.input_dim(); }
  bool discrete() const {
    return spec_.head == OutputHead::CategoricalPolicy;
  }
  /// Width of action vectors in trajectories (1 for discrete).
  int action_dim() const { return discrete() ? 1 : spec_.output_dim(); }
  int action_count() const { return spec_.output_dim(); }
  int param_count() const { return spec_.param_count(); }

  Vec init_params(Rng& rng) const { return mlp_init_params(spec_, rng); }

  /// Distribution parameters at one observation: [mean, log_std] or logits.
  Vec dist_params(const Vec& params, const Vec& obs) const;

  Vec sample_action(const Vec& params, const Vec& obs, Rng& rng,
                    double* log_prob = nullptr) const;
  double log_prob(const Vec& params, const Vec& obs, const Vec& action) const;

  /// Sum_i weights[i] * grad_params log pi(a_i | s_i). Observations and
  /// actions as matrix rows.
  Vec score_weighted_sum(const Vec& params, const Mat& obs, const Mat& actions,
                         const Vec& weights) const;

  /// Importance-ratio surrogate mean_i exp(logp_i(params) - old_logp[i]) * adv[i].
  double surrogate(const Vec& params, const Mat& obs, const Mat& actions,
                   const Vec& old_log_probs, const Vec& adv) const;

  /// Mean over rows of KL(pi_new(s) || pi_old(s)).
  double mean_kl(const Vec& params_new, const Vec& params_old,
                 const Mat& obs) const;

  /// (F + damping I) v with F the average Fisher over the given states,
  /// computed exactly as J^T F_dist J per state (JVP -> distribution Fisher
  /// -> VJP), equal to the KL Hessian at the current parameters.
  Vec fisher_vector_product(const Vec& params, const Mat& obs, const Vec& v,
                            double damping) const;

 private:
  MlpSpec spec_;
};

}  // namespace cmaml::numkit

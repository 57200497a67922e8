#include <doctest.h>

#include <cmath>

#include "cmaml/errors.hpp"
#include "cmaml/numkit/cg.hpp"
#include "cmaml/numkit/distributions.hpp"
#include "cmaml/numkit/gae.hpp"
#include "cmaml/numkit/mlp.hpp"
#include "cmaml/numkit/policy.hpp"
#include "test_oracles.hpp"

using namespace cmaml::numkit;
namespace oracles = test_oracles;

namespace {

MlpSpec scalar_spec(std::vector<int> sizes) {
  MlpSpec spec;
  spec.layer_sizes = std::move(sizes);
  spec.head = OutputHead::ScalarValue;
  return spec;
}

MlpSpec gaussian_spec(std::vector<int> sizes) {
  MlpSpec spec;
  spec.layer_sizes = std::move(sizes);
  spec.head = OutputHead::GaussianPolicy;
  return spec;
}

Vec random_vec(int n, Rng& rng, double scale = 1.0) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("mlp_forward: single linear layer with identity weights") {
  MlpSpec spec;
  spec.layer_sizes = {2, 2};
  spec.head = OutputHead::CategoricalPolicy;  // raw linear output
  Vec params = Vec::Zero(spec.param_count());
  params[0] = 1.0;  // W(0,0)
  params[3] = 1.0;  // W(1,1)
  Vec input(2);
  input << 0.3, -0.2;
  const Vec out = mlp_forward(spec, params, input);
  CHECK(out[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("mlp_forward: all-zero params with scalar head give 0") {
  const auto spec = scalar_spec({4, 8, 1});
  const Vec params = Vec::Zero(spec.param_count());
  Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    const Vec input = random_vec(4, rng, 2.0);
    CHECK(mlp_forward(spec, params, input)[0] == 0.0);
  }
}

TEST_CASE("mlp_forward matches the naive dense oracle to 1e-12") {
  Rng rng(11);
  const std::vector<MlpSpec> specs = {
      scalar_spec({3, 5, 1}), gaussian_spec({4, 8, 8, 2}),
      [] {
        MlpSpec s;
        s.layer_sizes = {6, 4};
        s.head = OutputHead::CategoricalPolicy;
        return s;
      }()};
  for (const auto& spec : specs) {
    for (int k = 0; k < 10; ++k) {
      const Vec params = random_vec(spec.param_count(), rng);
      const Vec input = random_vec(spec.input_dim(), rng, 1.5);
      const Vec got = mlp_forward(spec, params, input);
      const Vec want = oracles::naive_mlp_forward(spec, params, input);
      REQUIRE(got.size() == want.size());
      CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("mlp_forward rejects bad shapes") {
  const auto spec = scalar_spec({3, 1});
  CHECK_THROWS_AS(mlp_forward(spec, Vec::Zero(2), Vec::Zero(3)),
                  cmaml::ShapeError);
  CHECK_THROWS_AS(mlp_forward(spec, Vec::Zero(spec.param_count()), Vec::Zero(4)),
                  cmaml::ShapeError);
  MlpSpec bad;
  bad.layer_sizes = {3};
  CHECK_THROWS_AS(bad.validate(), cmaml::ShapeError);
}

TEST_CASE("mlp_backward: zero output gradient gives zero parameter gradient") {
  const auto spec = gaussian_spec({3, 6, 2});
  Rng rng(5);
  const Vec params = random_vec(spec.param_count(), rng);
  MlpWorkspace ws;
  mlp_forward(spec, params, random_vec(3, rng), &ws);
  const Vec grad = mlp_backward(spec, params, ws, Vec::Zero(4));
  CHECK(grad.norm() == 0.0);
}

TEST_CASE("mlp_backward is linear in the output gradient") {
  const auto spec = gaussian_spec({3, 5, 2});
  Rng rng(7);
  const Vec params = random_vec(spec.param_count(), rng);
  MlpWorkspace ws;
  mlp_forward(spec, params, random_vec(3, rng), &ws);
  const Vec g1 = random_vec(4, rng);
  const Vec g2 = random_vec(4, rng);
  const Vec lhs = mlp_backward(spec, params, ws, (g1 + g2).eval());
  const Vec rhs =
      mlp_backward(spec, params, ws, g1) + mlp_backward(spec, params, ws, g2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("mlp_backward matches central finite differences (50 seeds)") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed * 131 + 1);
    const auto spec = scalar_spec({1 + static_cast<int>(seed % 3),
                                   3 + static_cast<int>(seed % 4), 1});
    const Vec params = random_vec(spec.param_count(), rng);
    const Vec input = random_vec(spec.input_dim(), rng, 1.5);
    MlpWorkspace ws;
    mlp_forward(spec, params, input, &ws);
    Vec one(1);
    one[0] = 1.0;
    const Vec analytic = mlp_backward(spec, params, ws, one);
    const Vec fd = oracles::fd_gradient(
        [&](const Vec& p) { return mlp_forward(spec, p, input)[0]; }, params);
    CHECK(oracles::rel_err_inf(analytic, fd) <= 1e-4);
  }
}

TEST_CASE("policy log-prob gradient matches finite differences (50 seeds)") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed * 977 + 13);
    const bool discrete = (seed % 2 == 0);
    MlpSpec spec;
    spec.layer_sizes = {3, 4, discrete ? 3 : 2};
    spec.head = discrete ? OutputHead::CategoricalPolicy
                         : OutputHead::GaussianPolicy;
    const Policy policy(spec);
    const Vec params = random_vec(spec.param_count(), rng);
    const Vec obs = random_vec(3, rng, 1.5);
    Vec action;
    if (discrete) {
      action = Vec(1);
      action[0] = static_cast<double>(seed % 3);
    } else {
      action = random_vec(2, rng, 1.0);
    }
    Mat obs_m(1, 3), act_m(1, action.size());
    obs_m.row(0) = obs.transpose();
    act_m.row(0) = action.transpose();
    Vec w(1);
    w[0] = 1.0;
    const Vec analytic = policy.score_weighted_sum(params, obs_m, act_m, w);
    const Vec fd = oracles::fd_gradient(
        [&](const Vec& p) { return policy.log_prob(p, obs, action); }, params);
    CHECK(oracles::rel_err_inf(analytic, fd) <= 1e-4);
  }
}

TEST_CASE("gaussian_log_prob closed-form anchors") {
  GaussianPolicyOut std_normal{Vec::Zero(1), Vec::Zero(1)};
  CHECK(gaussian_log_prob(std_normal, Vec::Zero(1)) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-12));

  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const int dim = 1 + rng.uniform_int(4);
    GaussianPolicyOut out{random_vec(dim, rng, 2.0), random_vec(dim, rng, 1.0)};
    // density at the mean is -sum(log_std) - d/2 * ln(2*pi)
    const double at_mean = gaussian_log_prob(out, out.mean);
    CHECK(at_mean == doctest::Approx(-out.log_std.sum() -
                                     0.5 * dim * std::log(2.0 * M_PI))
                         .epsilon(1e-12));
    // random case against the separately coded density formula
    const Vec x = random_vec(dim, rng, 3.0);
    CHECK(gaussian_log_prob(out, x) ==
          doctest::Approx(oracles::naive_gaussian_log_density(out.mean,
                                                              out.log_std, x))
              .epsilon(1e-12));
  }
}

TEST_CASE("gaussian_kl: exact values and nonnegativity") {
  GaussianPolicyOut p{Vec::Zero(1), Vec::Zero(1)};
  GaussianPolicyOut q{Vec::Ones(1), Vec::Zero(1)};
  CHECK(gaussian_kl(p, p) == 0.0);
  CHECK(gaussian_kl(p, q) == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(19);
  for (int k = 0; k < 200; ++k) {
    const int dim = 1 + rng.uniform_int(3);
    GaussianPolicyOut a{random_vec(dim, rng, 2.0), random_vec(dim, rng, 0.8)};
    GaussianPolicyOut b{random_vec(dim, rng, 2.0), random_vec(dim, rng, 0.8)};
    CHECK(gaussian_kl(a, b) >= 0.0);
    CHECK(gaussian_kl(a, a) == 0.0);
  }
}

TEST_CASE("gaussian_kl agrees with a Monte-Carlo estimate within 3 SE") {
  Rng rng(23);
  GaussianPolicyOut p{random_vec(2, rng, 1.0), random_vec(2, rng, 0.5)};
  GaussianPolicyOut q{random_vec(2, rng, 1.0), random_vec(2, rng, 0.5)};
  const double exact = gaussian_kl(p, q);

  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec x = gaussian_sample(p, rng);
    const double diff = gaussian_log_prob(p, x) - gaussian_log_prob(q, x);
    sum += diff;
    sum_sq += diff * diff;
  }
  const double mean = sum / n;
  const double var = (sum_sq / n - mean * mean) / n;
  const double se = std::sqrt(var);
  CHECK(std::abs(exact - mean) <= 3.0 * se);
}

TEST_CASE("categorical distribution basics") {
  Vec logits(3);
  logits << 0.2, -1.0, 0.7;
  const Vec p = categorical_probs(logits);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(categorical_kl(logits, logits) == doctest::Approx(0.0).epsilon(1e-12));
  double total = 0.0;
  for (int a = 0; a < 3; ++a)
    total += std::exp(categorical_log_prob(logits, a));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conjugate_gradient: identity solves in one iteration") {
  Rng rng(31);
  const Vec b = random_vec(6, rng);
  const auto res =
      conjugate_gradient([](const Vec& v) { return v; }, b, 10, 1e-10);
  CHECK(res.iterations == 1);
  CHECK((res.x - b).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("conjugate_gradient: zero rhs gives zero solution") {
  const auto res = conjugate_gradient([](const Vec& v) { return 2.0 * v; },
                                      Vec::Zero(4), 10, 1e-10);
  CHECK(res.x.norm() == 0.0);
}

TEST_CASE("conjugate_gradient matches an explicit 3x3 inverse") {
  Mat a(3, 3);
  a << 4.0, 1.0, 0.3, 1.0, 3.0, -0.2, 0.3, -0.2, 5.0;  // SPD
  Vec b(3);
  b << 1.0, -2.0, 0.5;
  const auto res = conjugate_gradient(
      [&](const Vec& v) { return (a * v).eval(); }, b, 50, 1e-14);
  const Vec exact = oracles::inverse3(a) * b;
  CHECK((res.x - exact).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("conjugate_gradient residuals are nonincreasing on damped SPD systems") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    // damped Gram matrix, conditioning similar to the damped Fisher systems
    const Mat a = m.transpose() * m / n + 0.1 * Mat::Identity(n, n);
    const Vec b = random_vec(n, rng);
    const auto res = conjugate_gradient(
        [&](const Vec& v) { return (a * v).eval(); }, b, n * 2, 0.0);
    double prev = b.norm();
    for (const double r : res.residual_history) {
      CHECK(r <= prev + 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("fisher_vector_product: zero vector and positive definiteness") {
  Rng rng(53);
  MlpSpec spec = gaussian_spec({3, 4, 2});
  const Policy policy(spec);
  const Vec params = random_vec(spec.param_count(), rng, 0.8);
  Mat obs(5, 3);
  for (int i = 0; i < 5; ++i) obs.row(i) = random_vec(3, rng, 1.5).transpose();

  CHECK(policy.fisher_vector_product(params, obs, Vec::Zero(params.size()), 0.1)
            .norm() == 0.0);
  for (int k = 0; k < 20; ++k) {
    const Vec v = random_vec(static_cast<int>(params.size()), rng);
    const double quad =
        v.dot(policy.fisher_vector_product(params, obs, v, 0.1));
    CHECK(quad >= 0.1 * v.squaredNorm() - 1e-10);
  }
}

TEST_CASE("fisher_vector_product matches the finite-difference KL Hessian") {
  // tiny nets (<= 20 params) so the full Hessian oracle stays cheap
  Rng rng(61);
  MlpSpec specs[2];
  specs[0] = gaussian_spec({2, 2});  // 2*2+2+2 = 8 params
  specs[1].layer_sizes = {2, 3};
  specs[1].head = OutputHead::CategoricalPolicy;  // 9 params

  for (const auto& spec : specs) {
    const Policy policy(spec);
    const Vec params = random_vec(spec.param_count(), rng, 0.7);
    REQUIRE(spec.param_count() <= 20);
    Mat obs(3, 2);
    for (int i = 0; i < 3; ++i)
      obs.row(i) = random_vec(2, rng, 1.0).transpose();

    const double damping = 0.1;
    // mean KL(old || theta) as a function of theta, old fixed at params
    const auto mean_kl = [&](const Vec& theta) {
      return policy.mean_kl(theta, params, obs);
    };
    // note: mean_kl(new, old) computes KL(new||old); the Hessian at
    // new == old equals the Fisher for either argument order, so we check
    // against the spec's KL(old || new) Hessian via the symmetric form
    const auto mean_kl_old_first = [&](const Vec& theta) {
      double acc = 0.0;
      for (int i = 0; i < obs.rows(); ++i) {
        const Vec obs_i = obs.row(i).transpose();
        const Vec d_old = policy.dist_params(params, obs_i);
        const Vec d_new = policy.dist_params(theta, obs_i);
        if (spec.head == OutputHead::CategoricalPolicy) {
          acc += categorical_kl(d_old, d_new);
        } else {
          const int dim = spec.output_dim();
          acc += gaussian_kl({d_old.head(dim), d_old.tail(dim)},
                             {d_new.head(dim), d_new.tail(dim)});
        }
      }
      return acc / static_cast<double>(obs.rows());
    };
    (void)mean_kl;
    const Mat hess = oracles::fd_hessian(mean_kl_old_first, params);
    for (int k = 0; k < 5; ++k) {
      const Vec v = random_vec(static_cast<int>(params.size()), rng);
      const Vec analytic = policy.fisher_vector_product(params, obs, v, damping);
      const Vec reference = hess * v + damping * v;
      CHECK((analytic - reference).cwiseAbs().maxCoeff() <=
            1e-6 * std::max(1.0, reference.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("gae: returns-to-go with lambda = 1 and zero values") {
  Vec rewards(3);
  rewards << 1.0, 1.0, 1.0;
  const auto res = cmaml::numkit::gae(rewards, Vec::Zero(3), 0.0, {0, 0, 1},
                                      0.5, 1.0);
  CHECK(res.advantages[0] == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(res.advantages[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(res.advantages[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gae: zero rewards give zero advantages") {
  const auto res = cmaml::numkit::gae(Vec::Zero(5), Vec::Zero(5), 0.0,
                                      {0, 0, 0, 0, 0}, 0.9, 0.95);
  CHECK(res.advantages.norm() == 0.0);
}

TEST_CASE("gae: lambda = 0 reduces to the TD residual per element") {
  Rng rng(71);
  const int t_len = 7;
  Vec rewards(t_len), values(t_len);
  for (int t = 0; t < t_len; ++t) {
    rewards[t] = rng.uniform(-1.0, 1.0);
    values[t] = rng.uniform(-1.0, 1.0);
  }
  const double bootstrap = rng.uniform(-1.0, 1.0);
  const double gamma = 0.9;
  const auto res = cmaml::numkit::gae(rewards, values, bootstrap,
                                      std::vector<uint8_t>(t_len, 0), gamma, 0.0);
  for (int t = 0; t < t_len; ++t) {
    const double next = (t + 1 < t_len) ? values[t + 1] : bootstrap;
    const double td = rewards[t] + gamma * next - values[t];
    CHECK(res.advantages[t] == doctest::Approx(td).epsilon(1e-12));
  }
}

TEST_CASE("gae: constant reward closed form at truncation") {
  const int t_len = 25;
  const double r = 0.7, gamma = 0.93;
  const auto res =
      cmaml::numkit::gae(Vec::Constant(t_len, r), Vec::Zero(t_len), 0.0,
                         std::vector<uint8_t>(t_len, 0), gamma, 1.0);
  const double expected = r * (1.0 - std::pow(gamma, t_len)) / (1.0 - gamma);
  CHECK(std::abs(res.advantages[0] - expected) <= 1e-10);
}

TEST_CASE("normalize_advantages: mean 0 std 1") {
  Rng rng(83);
  Vec adv = random_vec(64, rng, 5.0);
  normalize_advantages(adv);
  CHECK(std::abs(adv.mean()) <= 1e-6);
  const double var = (adv.array() - adv.mean()).square().sum() / adv.size();
  CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-6);
}

TEST_CASE("mlp_init_params: finite, fan-in bounded, log-std at init value") {
  Rng rng(91);
  const auto spec = gaussian_spec({10, 32, 32, 2});
  const Vec params = mlp_init_params(spec, rng);
  CHECK(params.allFinite());
  CHECK(params.tail(2)[0] == kLogStdInit);
  CHECK(params.cwiseAbs().maxCoeff() <= 1.0);  // 1/sqrt(fan_in) <= 1
}

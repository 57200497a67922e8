#include "cmaml/numkit/gae.hpp"

#include <cmath>

#include "cmaml/errors.hpp"

namespace cmaml::numkit {

GaeResult gae(const Vec& signal, const Vec& values, double bootstrap_value,
              const std::vector<uint8_t>& done, double gamma, double lambda) {
  const int t_len = static_cast<int>(signal.size());
  if (values.size() != t_len || static_cast<int>(done.size()) != t_len)
    throw ShapeError("gae: signal/values/done length mismatch");
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0)
    throw ShapeError("gae: gamma and lambda must lie in [0, 1]");

  GaeResult res;
  res.advantages = Vec::Zero(t_len);
  double next_adv = 0.0;
  for (int t = t_len - 1; t >= 0; --t) {
    const double nonterminal = done[t] ? 0.0 : 1.0;
    const double next_value = (t + 1 < t_len) ? values[t + 1] : bootstrap_value;
    const double delta =
        signal[t] + gamma * next_value * nonterminal - values[t];
    next_adv = delta + gamma * lambda * nonterminal * next_adv;
    res.advantages[t] = next_adv;
  }
  res.returns = res.advantages + values;
  return res;
}

void normalize_advantages(Vec& adv) {
  const int n = static_cast<int>(adv.size());
  if (n < 2) return;
  const double mean = adv.mean();
  const double var = (adv.array() - mean).square().sum() / n;
  if (var <= 0.0) return;
  adv = ((adv.array() - mean) / std::sqrt(var)).matrix();
}

}  // namespace cmaml::numkit

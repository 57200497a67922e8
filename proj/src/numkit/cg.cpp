#include "cmaml/numkit/cg.hpp"

#include <cmath>

#include "cmaml/errors.hpp"

namespace cmaml::numkit {

// Conjugate gradient with minimal-residual smoothing: the returned iterate is
// the smoothed sequence y_k whose residual norm is provably nonincreasing
// (plain CG residuals can oscillate). At convergence the smoothed and raw
// iterates coincide.
CgResult conjugate_gradient(const std::function<Vec(const Vec&)>& matvec,
                            const Vec& b, int max_iters, double tol) {
  CgResult res;
  res.x = Vec::Zero(b.size());
  const double b_norm = b.norm();
  res.residual_norm = b_norm;
  if (b_norm == 0.0) return res;

  const double threshold = tol * b_norm;
  Vec x = Vec::Zero(b.size());
  Vec r = b;
  Vec p = b;
  double rs = r.squaredNorm();

  Vec y = x;  // smoothed iterate
  Vec s = r;  // its residual: s = b - A y

  for (int k = 0; k < max_iters; ++k) {
    const Vec ap = matvec(p);
    if (!ap.allFinite())
      throw NumericError("conjugate_gradient: non-finite operator output");
    const double p_ap = p.dot(ap);
    if (p_ap <= 0.0) break;  // operator not SPD along p; keep current iterate
    const double alpha = rs / p_ap;
    x += alpha * p;
    r -= alpha * ap;
    if (!x.allFinite() || !r.allFinite())
      throw NumericError("conjugate_gradient: non-finite iterate");

    // minimal-residual smoothing step
    const Vec dr = r - s;
    const double dr_sq = dr.squaredNorm();
    const double eta = (dr_sq > 0.0) ? -s.dot(dr) / dr_sq : 1.0;
    y += eta * (x - y);
    s += eta * dr;

    const double rs_new = r.squaredNorm();
    res.iterations = k + 1;
    res.residual_norm = s.norm();
    res.residual_history.push_back(res.residual_norm);
    if (res.residual_norm <= threshold) break;
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  res.x = y;
  return res;
}

}  // namespace cmaml::numkit

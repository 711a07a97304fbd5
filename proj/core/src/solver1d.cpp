#include "robinfb/solver1d.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace robinfb {

namespace {

// Golden-section bracketing followed by one parabolic refinement step.
// The refinement recovers the vertex exactly for quadratic objectives, where
// pure value comparisons bottom out near sqrt(machine eps).
template <class F>
double minimize_scalar(F&& f, double lo, double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  // parabola through (a, f(a)), (xm, f(xm)), (b, f(b))
  const double fa = f(a), fm = f(xm), fb = f(b);
  const double d1 = (fm - fa) / (xm - a);
  const double d2 = (fb - fm) / (b - xm);
  const double curv = (d2 - d1) / (b - a) * 2.0;
  if (curv > 0.0) {
    double xv = 0.5 * (a + xm) - d1 / curv;
    xv = std::clamp(xv, lo, hi);
    if (f(xv) <= fm) xm = xv;
  }
  return xm;
}

// Energy of a nonnegative piecewise-linear profile given by breakpoints
// (x, u): Dirichlet part plus the exact measure of the positivity set.
double pl_energy(const std::vector<double>& xs, const std::vector<double>& us) {
  double dirichlet = 0.0;
  double positive = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double dx = xs[k + 1] - xs[k];
    if (dx <= 0.0) continue;
    const double du = us[k + 1] - us[k];
    dirichlet += du * du / dx;
    if (us[k] > 0.0 || us[k + 1] > 0.0) positive += dx;
  }
  return dirichlet + positive;
}

}  // namespace

double disjoint_energy() { return 4.0; }

double bridged_energy(double beta, double eps, double ell) {
  return 2.0 * (1.0 - ell) * (1.0 - ell) / (1.0 + eps) + beta * ell * ell +
         2.0 + 2.0 * eps;
}

double optimal_ell(double beta, double eps) {
  return 2.0 / (2.0 + beta + eps * beta);
}

double bridged_energy_optimal(double beta, double eps) {
  return bridged_energy(beta, eps, optimal_ell(beta, eps));
}

double bridged_energy_optimal_expanded(double beta, double eps) {
  const double den = 2.0 + beta + eps * beta;
  return 2.0 * (1.0 + eps) * beta * beta / (den * den) +
         beta * (2.0 / den) * (2.0 / den) + 2.0 + 2.0 * eps;
}

double interface_threshold(double beta) {
  if (beta <= 0.0) throw InputError("beta", "beta must be > 0");
  auto excess = [beta](double eps) {
    return bridged_energy_optimal(beta, eps) - 4.0;
  };
  double lo = 0.0;
  if (excess(lo) >= 0.0)
    throw SolverError("bridged energy not below 4 at eps=0; no bracket");
  double hi = 1.0;
  while (excess(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e18) throw SolverError("interface_threshold bracket failure");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Solve1DResult solve_1d_numeric(double beta, double eps, int n) {
  if (beta <= 0.0) throw InputError("beta", "beta must be > 0");
  if (eps < 0.0) throw InputError("eps", "eps must be >= 0");
  if (n < 64) throw InputError("n", "grid size must be >= 64");
  if (n % 2 != 0) ++n;  // keep a node at the candidate interface point

  const double L = 1.0 + eps;
  const double dx = 2.0 * L / n;
  std::vector<double> xs(n + 1);
  for (int j = 0; j <= n; ++j) xs[j] = -L + j * dx;

  // Disjoint family: symmetric wedges vanishing on (-a, a).
  auto disjoint_of = [&](double a) {
    std::vector<double> px, pu;
    px.reserve(n + 3);
    pu.reserve(n + 3);
    auto profile = [&](double x) {
      if (x <= -a) return (-x - a) / (L - a);
      if (x >= a) return (x - a) / (L - a);
      return 0.0;
    };
    for (int j = 0; j <= n; ++j) {
      // insert the wedge tips as exact breakpoints
      if (j > 0 && xs[j - 1] < -a && -a < xs[j]) {
        px.push_back(-a);
        pu.push_back(0.0);
      }
      if (j > 0 && xs[j - 1] < a && a < xs[j]) {
        px.push_back(a);
        pu.push_back(0.0);
      }
      px.push_back(xs[j]);
      pu.push_back(profile(xs[j]));
    }
    return pl_energy(px, pu);
  };

  // Bridged family: linear from 1 down to ell at 0 and back, interface
  // measure at the single point x = 0.
  auto bridged_of = [&](double ell) {
    std::vector<double> pu(n + 1);
    for (int j = 0; j <= n; ++j) {
      const double t = std::abs(xs[j]) / L;
      pu[j] = ell + (1.0 - ell) * t;
    }
    return pl_energy(xs, pu) + beta * ell * ell;
  };

  Solve1DResult res;
  const double a_hat =
      minimize_scalar(disjoint_of, 0.0, L - dx, 1e-10 * L);
  res.energy_disjoint = disjoint_of(a_hat);
  res.ell_hat = minimize_scalar(bridged_of, 0.0, 1.0, 1e-10);
  res.energy_bridged = bridged_of(res.ell_hat);
  if (res.energy_bridged < res.energy_disjoint) {
    res.winner = Winner1D::Bridged;
    res.energy = res.energy_bridged;
  } else {
    res.winner = Winner1D::Disjoint;
    res.energy = res.energy_disjoint;
  }
  return res;
}

}  // namespace robinfb

#include "sepsim/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace sepsim::theory {

namespace {

/// Poisson weight exp(-a) a^j / j!, computed by recurrence.
double poisson_pmf(uint32_t j, double a) {
  double term = std::exp(-a);
  for (uint32_t i = 1; i <= j; ++i) term *= a / i;
  return term;
}

void require_positive_g(double g) {
  if (!(g > 0.0)) throw std::invalid_argument("measurement rate g must be positive");
}

}  // namespace

double regularized_gamma_q(uint32_t k, double a) {
  if (k == 0) throw std::invalid_argument("regularized_gamma_q: k must be >= 1");
  if (a < 0.0) throw std::invalid_argument("regularized_gamma_q: a must be >= 0");
  double term = std::exp(-a);
  double sum = term;
  for (uint32_t j = 1; j < k; ++j) {
    term *= a / j;
    sum += term;
  }
  return sum > 1.0 ? 1.0 : sum;
}

double steady_state_sk(double g, uint32_t k) {
  require_positive_g(g);
  return g * (1.0 - regularized_gamma_q(k, 1.0 / g));
}

double sk_at_time(double g, uint32_t k, double tau) {
  require_positive_g(g);
  if (k == 0) throw std::invalid_argument("sk_at_time: k must be >= 1");
  if (tau < 0.0) throw std::invalid_argument("sk_at_time: tau must be >= 0");
  const double alpha = -std::expm1(-g * tau) / g;  // (1 - e^{-g tau}) / g
  return g * (1.0 - regularized_gamma_q(k, alpha)) +
         std::exp(-g * tau) * poisson_pmf(k - 1, alpha);
}

double single_spin_entropy(double g, double mt) {
  require_positive_g(g);
  if (mt < 0.0) throw std::invalid_argument("single_spin_entropy: mt must be >= 0");
  const double e = std::exp(-mt);
  // g e^{-(1-e)/g} (1 - e/g) grouped as e^{-(1-e)/g} (g - e), exact at mt = 0
  return 1.0 - g + std::exp(-(1.0 - e) / g) * (g - e);
}

double steady_spin_entropy(double g) {
  require_positive_g(g);
  return 1.0 + g * std::expm1(-1.0 / g);
}

double generating_function(double g, double z, double tau) {
  require_positive_g(g);
  if (std::abs(z) > 1.0) throw std::invalid_argument("generating_function: need |z| <= 1");
  if (z == 1.0) return 1.0;  // normalization sum_k s_k = 1
  const double u = 1.0 - z;
  const double decay = std::exp(-g * tau);
  const double b = u * decay / g;
  const double c = u * (1.0 - decay) / g;
  // 1 - (1 - b) e^{-c}, written to survive u -> 0.
  const double bracket = -std::expm1(-c) + b * std::exp(-c);
  return z * g / u * bracket;
}

double generating_function_steady(double g, double z) {
  require_positive_g(g);
  if (std::abs(z) > 1.0) throw std::invalid_argument("generating_function_steady: need |z| <= 1");
  if (z == 1.0) return 1.0;
  const double u = 1.0 - z;
  return z * g / u * -std::expm1(-u / g);
}

std::optional<double> mean_cluster_size(double g) {
  require_positive_g(g);
  if (g <= kGCritical) return std::nullopt;
  return 1.0 / (1.0 - kGCritical / g);
}

namespace {

/// Left side of the implicit equation for q, evaluated through u = 1 - q with
/// expm1 so the triple root at q = 1 is resolved near criticality.
double q_equation(double g, double q) {
  const double u = 1.0 - q;
  return q * u * u + 2.0 * g * (g * std::expm1(-u / g) + u * std::exp(-u / g));
}

}  // namespace

double solve_root_q(double g) {
  require_positive_g(g);
  if (g >= kGCritical) return 1.0;

  // Bracket the smallest root by ascending grid scan, then refine by
  // bisection with secant acceleration.
  constexpr int kGrid = 4096;
  constexpr double kDelta = 1e-12;
  double lo = 0.0;
  double flo = q_equation(g, lo);
  if (flo == 0.0) return 0.0;
  double hi = 0.0, fhi = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= kGrid; ++i) {
    hi = (1.0 - kDelta) * i / kGrid;
    fhi = q_equation(g, hi);
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) != (fhi < 0.0)) {
      bracketed = true;
      break;
    }
    lo = hi;
    flo = fhi;
  }
  if (!bracketed) return 1.0;

  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    // Secant proposal, kept only if it lands strictly inside the bracket.
    const double denom = fhi - flo;
    if (denom != 0.0) {
      const double sec = lo - flo * (hi - lo) / denom;
      if (sec > lo && sec < hi) mid = sec;
    }
    const double fmid = q_equation(g, mid);
    if (fmid == 0.0 || hi - lo < 1e-16) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  if (hi - lo > 1e-12)
    throw std::runtime_error("solve_root_q: root refinement did not converge");
  return 0.5 * (lo + hi);
}

double giant_mass(double g) {
  require_positive_g(g);
  if (g >= kGCritical) return 0.0;
  const double q = solve_root_q(g);
  const double u = 1.0 - q;
  // m = 1 - (g/u)(1 - e^{-u/g})
  return 1.0 + g / u * std::expm1(-u / g);
}

double entanglement_upper_bound(double q_frac, double g, double mt) {
  require_positive_g(g);
  if (q_frac < 0.0 || q_frac > 0.5)
    throw std::invalid_argument("entanglement_upper_bound: stated for 0 <= q <= 1/2");
  if (mt < 0.0) throw std::invalid_argument("entanglement_upper_bound: mt must be >= 0");
  const double mean_degree = -std::expm1(-mt) / (2.0 * g);
  return q_frac * -std::expm1(-mean_degree * (1.0 - q_frac));
}

NeighborDistributions neighbor_distributions(double g, double tail_tol) {
  require_positive_g(g);
  NeighborDistributions out;
  for (uint32_t k = 0;; ++k) {
    const double s = steady_state_sk(g, k + 1);
    out.q.push_back(s);
    out.p.push_back(2.0 * g * k * s);
    if (k > 2 && s < tail_tol) break;
    if (k > 100000) throw std::runtime_error("neighbor_distributions: tail did not decay");
  }
  return out;
}

}  // namespace sepsim::theory

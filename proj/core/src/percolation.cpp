#include "sepsim/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sepsim {

namespace {

struct UnionFind {
  std::vector<uint32_t> parent, size;
  explicit UnionFind(uint32_t n) : parent(n), size(n, 1) {
    for (uint32_t i = 0; i < n; ++i) parent[i] = i;
  }
  uint32_t find(uint32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

}  // namespace

ClusterStats cluster_statistics(const EvolvedState& state) {
  const uint32_t n = state.num_qubits();
  UnionFind uf(n);
  state.for_each_edge([&](uint32_t i, uint32_t j) { uf.unite(i, j); });

  std::vector<uint32_t> sizes;
  for (uint32_t v = 0; v < n; ++v) {
    if (uf.find(v) == v) sizes.push_back(uf.size[v]);
  }
  const auto largest_it = std::max_element(sizes.begin(), sizes.end());
  ClusterStats stats;
  stats.largest_size = *largest_it;
  stats.m = static_cast<double>(stats.largest_size) / n;
  stats.nk.assign(n + 1, 0.0);
  const double per_node = 1.0 / n;
  bool skipped_largest = false;
  for (uint32_t s : sizes) {
    if (!skipped_largest && s == stats.largest_size) {
      skipped_largest = true;  // exactly one largest cluster is excluded
      continue;
    }
    stats.nk[s] += per_node;
  }
  for (uint32_t k = 1; k <= n; ++k) {
    stats.chi += static_cast<double>(k) * k * stats.nk[k];
  }
  return stats;
}

namespace {

struct LogBin {
  double x, y;
};

/// Quadratic coefficient of ly ~ c0 + c1 u + c2 u^2, u centered; pronounced
/// concavity (c2 << 0) marks the exponential-cutoff regime.
double loglog_curvature(std::span<const LogBin> bins) {
  const size_t nb = bins.size();
  double mean_x = 0.0;
  for (const auto& b : bins) mean_x += std::log(b.x);
  mean_x /= nb;
  double s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (const auto& b : bins) {
    const double u = std::log(b.x) - mean_x;
    const double ly = std::log(b.y);
    s2 += u * u;
    s3 += u * u * u;
    s4 += u * u * u * u;
    t0 += ly;
    t1 += u * ly;
    t2 += u * u * ly;
  }
  const double denom = s4 - s2 * s2 / nb - s3 * s3 / s2;
  if (denom <= 0.0) return 0.0;
  return (t2 - s2 * t0 / nb - s3 * t1 / s2) / denom;
}

PowerLawFit linear_fit(std::span<const LogBin> bins) {
  const size_t nb = bins.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& b : bins) {
    const double lx = std::log(b.x), ly = std::log(b.y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double mean_x = sx / nb, mean_y = sy / nb;
  const double var_x = sxx / nb - mean_x * mean_x;
  const double slope = (sxy / nb - mean_x * mean_y) / var_x;
  const double intercept = mean_y - slope * mean_x;
  double rss = 0.0;
  for (const auto& b : bins) {
    const double r = std::log(b.y) - (intercept + slope * std::log(b.x));
    rss += r * r;
  }
  PowerLawFit fit;
  fit.tau_hat = -slope;
  fit.tau_stderr = nb > 2 ? std::sqrt(rss / (nb - 2) / (nb * var_x)) : 0.0;
  fit.bins_used = static_cast<uint32_t>(nb);
  return fit;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> nk, uint32_t k_min, double bin_base,
                          uint32_t min_bins) {
  if (bin_base <= 1.0) throw std::invalid_argument("fit_power_law: bin base must exceed 1");
  std::vector<LogBin> bins;
  double lo = k_min;
  while (static_cast<size_t>(lo) < nk.size()) {
    double hi = lo * bin_base;
    if (std::floor(hi) <= std::floor(lo)) hi = std::floor(lo) + 1.0;
    const uint32_t k_lo = static_cast<uint32_t>(std::ceil(lo));
    const uint32_t k_hi =
        std::min(static_cast<uint32_t>(std::ceil(hi)), static_cast<uint32_t>(nk.size()));
    double mass = 0.0;
    for (uint32_t k = k_lo; k < k_hi; ++k) mass += nk[k];
    if (k_hi > k_lo) {
      if (mass <= 0.0) break;  // tail exhausted; stop at the first empty bin
      bins.push_back({std::sqrt(lo * hi), mass / (k_hi - k_lo)});
    }
    lo = hi;
  }
  if (bins.size() < min_bins)
    throw std::runtime_error("fit_power_law: insufficient populated bins for a fit");

  // Exclude the exponential-cutoff region: shrink the window from the right
  // while the log-log curvature stays strongly concave.
  constexpr double kConcave = -0.05;
  size_t used = bins.size();
  while (used > min_bins && loglog_curvature({bins.data(), used}) < kConcave) --used;

  PowerLawFit fit = linear_fit({bins.data(), used});
  fit.cutoff_dominated = loglog_curvature({bins.data(), used}) < kConcave;
  return fit;
}

std::vector<CollapsePoint> collapse_points(std::span<const CollapseObs> data, double a, double b,
                                           double g_c) {
  std::vector<CollapsePoint> out;
  out.reserve(data.size());
  for (const auto& d : data) {
    CollapsePoint p;
    p.x = std::pow(d.n, a) * std::abs(d.g - g_c);
    p.y = std::pow(d.n, b) * d.y;
    p.n = d.n;
    p.g = d.g;
    out.push_back(p);
  }
  return out;
}

namespace {

/// Clamped uniform cubic B-spline basis evaluated by Cox-de Boor recursion.
class CubicSplineBasis {
 public:
  CubicSplineBasis(double lo, double hi, uint32_t segments)
      : lo_(lo), hi_(hi), segments_(segments) {
    const uint32_t nb = segments + 3;
    knots_.assign(nb + 4, 0.0);
    for (uint32_t i = 0; i < knots_.size(); ++i) {
      if (i < 4)
        knots_[i] = lo;
      else if (i >= nb)
        knots_[i] = hi;
      else
        knots_[i] = lo + (hi - lo) * (i - 3) / segments;
    }
  }
  uint32_t size() const { return segments_ + 3; }
  double eval(uint32_t i, double x) const { return cox_de_boor(i, 3, x); }

 private:
  double cox_de_boor(uint32_t i, int d, double x) const {
    if (d == 0) {
      const bool last = i + 1 == knots_.size() - 1 || knots_[i + 1] >= hi_;
      if (x >= knots_[i] && (x < knots_[i + 1] || (last && x <= knots_[i + 1]))) return 1.0;
      return 0.0;
    }
    double acc = 0.0;
    const double den1 = knots_[i + d] - knots_[i];
    if (den1 > 0) acc += (x - knots_[i]) / den1 * cox_de_boor(i, d - 1, x);
    const double den2 = knots_[i + d + 1] - knots_[i + 1];
    if (den2 > 0) acc += (knots_[i + d + 1] - x) / den2 * cox_de_boor(i + 1, d - 1, x);
    return acc;
  }

  double lo_, hi_;
  uint32_t segments_;
  std::vector<double> knots_;
};

/// Solves A c = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) continue;
    for (size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = a[r][r] != 0.0 ? acc / a[r][r] : 0.0;
  }
  return x;
}

}  // namespace

double collapse_quality(std::span<const CollapseObs> data, double a, double b, double g_c) {
  std::set<double> sizes;
  for (const auto& d : data) sizes.insert(d.n);
  if (sizes.size() < 3)
    throw std::invalid_argument("collapse_quality: need data from at least three system sizes");

  const auto pts = collapse_points(data, a, b, g_c);
  double lo = pts[0].x, hi = pts[0].x;
  for (const auto& p : pts) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  if (!(hi > lo)) throw std::invalid_argument("collapse_quality: degenerate x range");

  const uint32_t segments =
      std::clamp<uint32_t>(static_cast<uint32_t>(pts.size() / 6), 2, 8);
  CubicSplineBasis basis(lo, hi, segments);
  const uint32_t nb = basis.size();

  std::vector<std::vector<double>> normal(nb, std::vector<double>(nb, 0.0));
  std::vector<double> rhs(nb, 0.0);
  for (const auto& p : pts) {
    for (uint32_t i = 0; i < nb; ++i) {
      const double bi = basis.eval(i, p.x);
      if (bi == 0.0) continue;
      rhs[i] += bi * p.y;
      for (uint32_t j = 0; j < nb; ++j) {
        const double bj = basis.eval(j, p.x);
        if (bj != 0.0) normal[i][j] += bi * bj;
      }
    }
  }
  for (uint32_t i = 0; i < nb; ++i) normal[i][i] += 1e-12;  // ridge against empty spans
  const auto coeff = solve_dense(std::move(normal), std::move(rhs));

  double score = 0.0;
  for (const auto& p : pts) {
    double fit = 0.0;
    for (uint32_t i = 0; i < nb; ++i) fit += coeff[i] * basis.eval(i, p.x);
    const double r = p.y - fit;
    score += r * r;
  }
  return score / pts.size();
}

}  // namespace sepsim

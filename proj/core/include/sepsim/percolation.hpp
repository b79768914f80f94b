#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sepsim/evolved_state.hpp"
#include "sepsim/theory.hpp"

namespace sepsim {

/// Cluster-size statistics of the support graph with the (one) largest
/// cluster excluded from the finite-cluster sums, so m + sum_k k n_k = 1.
struct ClusterStats {
  std::vector<double> nk;    // nk[k] = finite clusters of size k, per node
  uint32_t largest_size = 0;
  double m = 0.0;            // largest_size / N
  double chi = 0.0;          // sum_k k^2 nk[k]
};

ClusterStats cluster_statistics(const EvolvedState& state);

struct PowerLawFit {
  double tau_hat = 0.0;
  double tau_stderr = 0.0;
  uint32_t bins_used = 0;
  bool cutoff_dominated = false;  // log-log curvature consistent with an exponential cutoff
};

/// Log-log linear fit of n_k ~ k^{-tau} over logarithmically binned k >= k_min.
/// Throws when fewer than min_bins populated bins are available.
PowerLawFit fit_power_law(std::span<const double> nk, uint32_t k_min = 4,
                          double bin_base = 1.25, uint32_t min_bins = 10);

struct CollapseObs {
  double g = 0.0;
  double n = 0.0;
  double y = 0.0;
};

struct CollapsePoint {
  double x = 0.0;  // N^a |g - g_c|
  double y = 0.0;  // N^b * observable
  double n = 0.0;
  double g = 0.0;
};

std::vector<CollapsePoint> collapse_points(std::span<const CollapseObs> data, double a, double b,
                                           double g_c = theory::kGCritical);

/// Finite-size-scaling collapse score: rescale x = N^a |g-g_c|, y' = N^b y,
/// pool all points, fit a least-squares cubic spline through the cloud and
/// return the mean squared vertical deviation. Lower is better.
/// Requires data from at least three system sizes.
double collapse_quality(std::span<const CollapseObs> data, double a, double b,
                        double g_c = theory::kGCritical);

}  // namespace sepsim

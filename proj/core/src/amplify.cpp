#include "qfg/amplify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qfg/errors.hpp"

namespace qfg {

PermutationOperator diag_extraction_perm(std::uint64_t dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw InvalidArgumentError("dimension must be a power of two, at least 2");
  }
  if (dim > (1ULL << (kMaxBlockQubits / 2))) {
    throw ResourceError("diagonal-extraction permutation exceeds the block cap");
  }
  const std::uint64_t total = dim * dim;
  std::vector<std::uint64_t> mapping;
  mapping.reserve(total);
  for (std::uint64_t j = 0; j < dim; ++j) {
    mapping.push_back(j * (dim + 1));  // joint index of (j, j)
  }
  for (std::uint64_t in = 0; in < total; ++in) {
    if (in % (dim + 1) != 0) mapping.push_back(in);
  }
  return PermutationOperator(std::move(mapping));
}

AmplifyStepResult amplify_step(const StateVector& state) {
  if (std::abs(state.squared_norm() - 1.0) > kNormTolerance) {
    throw InvalidArgumentError("amplify_step requires a normalized state");
  }
  double p_a = 0.0;
  for (const Complex& a : state.amps()) {
    const double m = std::norm(a);
    p_a += m * m;
  }
  if (p_a < kImpossibleOutcomeThreshold) {
    throw ImpossibleOutcomeError("amplification success probability below 1e-15");
  }
  const double scale = 1.0 / std::sqrt(p_a);
  std::vector<Complex> amps(state.dim());
  for (std::uint64_t v = 0; v < state.dim(); ++v) {
    amps[v] = state.amps()[v] * state.amps()[v] * scale;
  }
  return AmplifyStepResult{p_a, StateVector(state.qubit_ids(), std::move(amps))};
}

namespace {

// log(a^(2^k) + b^(2^k)) without overflow or 0/0, for nonnegative a, b.
double log_r(double log_hi, double log_lo, double two_k) {
  if (log_hi == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double lead = two_k * log_hi;
  if (log_lo == -std::numeric_limits<double>::infinity()) return lead;
  return lead + std::log1p(std::exp(two_k * (log_lo - log_hi)));
}

}  // namespace

AmplificationProfile gamma_profile(double alpha_sq, int k_max) {
  if (alpha_sq < 0.0 || alpha_sq > 1.0) {
    throw InvalidArgumentError("alpha^2 must lie in [0, 1]");
  }
  if (k_max < 0 || k_max > 1000) {
    throw InvalidArgumentError("k_max must lie in [0, 1000]");
  }
  const double alpha = std::sqrt(alpha_sq);
  const double beta = std::sqrt(1.0 - alpha_sq);
  const double hi = std::max(alpha, beta);
  const double lo = std::min(alpha, beta);
  const double log_hi = std::log(hi);  // hi >= sqrt(0.5) > 0
  const double log_lo = lo > 0.0 ? std::log(lo)
                                 : -std::numeric_limits<double>::infinity();

  // lr[k] = log r_k for k = 0 .. k_max + 2.
  std::vector<double> lr(k_max + 3);
  for (int k = 0; k <= k_max + 2; ++k) {
    lr[k] = log_r(log_hi, log_lo, std::exp2(k));
  }

  AmplificationProfile profile;
  profile.alpha_sq = alpha_sq;
  double log_gamma = 0.0;  // gamma_0 = 1
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      // gamma_k = gamma_{k-1}^2 r_{k+1} / r_k^2, evaluated in logs.
      log_gamma = 2.0 * log_gamma + lr[k + 1] - 2.0 * lr[k];
    }
    AmplificationStep step;
    step.k = k;
    step.gamma = std::exp(log_gamma);
    step.r = std::exp(lr[k]);
    step.p_a = std::exp(lr[k + 2] - 2.0 * lr[k + 1]);
    // P_Mk = alpha^(2^(k+1)) / (alpha^(2^(k+1)) + beta^(2^(k+1)))
    if (alpha == beta) {
      step.p_ml = 0.5;
    } else if (alpha_sq == 0.0) {
      step.p_ml = 0.0;
    } else if (alpha_sq == 1.0) {
      step.p_ml = 1.0;
    } else {
      const double hi_share =
          1.0 / (1.0 + std::exp(std::exp2(k + 1) * (log_lo - log_hi)));
      step.p_ml = alpha > beta ? hi_share : 1.0 - hi_share;
    }
    profile.steps.push_back(step);
  }
  return profile;
}

double expected_copies(const StateVector& state, int k) {
  if (k < 0) {
    throw InvalidArgumentError("amplification level must be nonnegative");
  }
  double copies = 1.0;
  StateVector current = state;
  for (int j = 0; j < k; ++j) {
    AmplifyStepResult step = amplify_step(current);
    copies *= 2.0 / step.p_a;
    current = std::move(step.amplified);
  }
  return copies;
}

}  // namespace qfg

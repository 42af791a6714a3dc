#include "qfg/sched_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "qfg/errors.hpp"
#include "qfg/oracle.hpp"
#include "qfg/qpa_engine.hpp"
#include "qfg/rng.hpp"

namespace qfg {

namespace {

constexpr int kMaxPartitionK = 60;
constexpr int kMaxCurveT = 200;

void partitions_rec(int remaining, int max_part, std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    current.push_back(part);
    partitions_rec(remaining - part, part, current, out);
    current.pop_back();
  }
}

// 1 - prod_i (1 - x_i) accumulated without cancellation (x_i small).
double one_minus_prod_complements(const std::vector<double>& xs) {
  double c = 0.0;
  for (double x : xs) c = c + x - c * x;
  return c;
}

// a(q) = 1 - prod_i F_i(q), the survival of the parallel phase at attempt q.
double parallel_survival(const TwoPhaseSpec& spec, int q) {
  if (q <= 0) return 1.0;
  std::vector<double> tails;
  tails.reserve(spec.parallel_probs.size());
  for (double p : spec.parallel_probs) {
    tails.push_back(std::pow(1.0 - p, q));
  }
  return one_minus_prod_complements(tails);
}

void validate_spec(const TwoPhaseSpec& spec) {
  if (spec.parallel_probs.empty()) {
    throw InvalidArgumentError("two-phase spec needs at least one parallel node");
  }
  for (double p : spec.parallel_probs) {
    if (p < 0.0 || p > 1.0) {
      throw InvalidArgumentError("parallel probabilities must lie in [0, 1]");
    }
  }
  if (spec.final_conditional < 0.0 || spec.final_conditional > 1.0 + 1e-12) {
    throw InvalidArgumentError("final conditional probability must lie in [0, 1]");
  }
}

}  // namespace

std::vector<std::vector<int>> integer_partitions(int k) {
  if (k < 0) throw InvalidArgumentError("partitions of a negative integer");
  if (k > kMaxPartitionK) {
    throw ResourceError("partition enumeration is capped at k = " +
                        std::to_string(kMaxPartitionK));
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  partitions_rec(k, k == 0 ? 1 : k, current, out);
  return out;
}

double parallel_exact_at(const TwoPhaseSpec& spec, int q) {
  validate_spec(spec);
  if (q <= 0) return 0.0;
  const double diff = parallel_survival(spec, q - 1) - parallel_survival(spec, q);
  return std::max(0.0, diff);
}

CompletionCurve completion_curve(const TwoPhaseSpec& spec, int t_max) {
  validate_spec(spec);
  if (t_max < 0 || t_max > kMaxCurveT) {
    throw InvalidArgumentError("t_max must lie in [0, " + std::to_string(kMaxCurveT) +
                               "]");
  }
  const double p_close = spec.final_conditional;

  // Round-resolution weights: a round whose parallel phase ends at attempt
  // q resolves at tick q + 1, successfully with density g, failing with f.
  std::vector<double> g(t_max + 1, 0.0);
  std::vector<double> f(t_max + 1, 0.0);
  for (int t = 2; t <= t_max; ++t) {
    const double par = parallel_exact_at(spec, t - 1);
    g[t] = par * p_close;
    f[t] = par * (1.0 - p_close);
  }

  // Partition form: failure runs weighted over unordered partitions.
  // W[n] = sum over multisets of failure durations summing to n; computed by
  // the coin-change recurrence rather than enumeration.
  std::vector<double> w(t_max + 1, 0.0);
  w[0] = 1.0;
  for (int u = 1; u <= t_max; ++u) {
    if (f[u] == 0.0) continue;
    for (int n = u; n <= t_max; ++n) w[n] += f[u] * w[n - u];
  }
  std::vector<double> e_paper(t_max + 1, 0.0);
  for (int t = 2; t <= t_max; ++t) {
    double acc = 0.0;
    for (int q = 2; q <= t; ++q) acc += g[q] * w[t - q];
    e_paper[t] = acc;
  }

  // Ordered renewal convolution: failure runs are sequences, not multisets.
  std::vector<double> e_renewal(t_max + 1, 0.0);
  for (int t = 2; t <= t_max; ++t) {
    double acc = g[t];
    for (int u = 2; u + 2 <= t; ++u) acc += f[u] * e_renewal[t - u];
    e_renewal[t] = acc;
  }

  // Survival form of the same renewal process, free of 1 - (sum near 1)
  // cancellation: S(t) = U(t) + sum_u f(u) S(t-u), with U(t) the probability
  // that the first round is still unresolved at t.
  std::vector<double> survival(t_max + 1, 1.0);
  for (int t = 1; t <= t_max; ++t) {
    double acc = parallel_survival(spec, t - 1);
    for (int u = 2; u <= t; ++u) acc += f[u] * survival[t - u];
    survival[t] = std::min(1.0, acc);
  }

  const double q_nondist = 1.0 - spec.joint_prob;

  CompletionCurve curve;
  curve.spec = spec;
  double pm_paper = 0.0;
  double pm_renewal = 0.0;
  double surv_nondist = 1.0;
  for (int t = 1; t <= t_max; ++t) {
    pm_paper += e_paper[t];
    pm_renewal += e_renewal[t];
    surv_nondist *= q_nondist;
    CompletionPoint pt;
    pt.t = t;
    pt.p_e_paper = e_paper[t];
    pt.p_e_renewal = e_renewal[t];
    pt.p_m_paper = std::min(pm_paper, 1.0);
    pt.p_m_renewal = std::min(pm_renewal, 1.0);
    pt.survival_renewal = survival[t];
    pt.survival_nondist = surv_nondist;
    pt.p_nondist = 1.0 - surv_nondist;
    curve.points.push_back(pt);
  }
  return curve;
}

TwoPhaseSpec spec_from_graph(const FactorGraph& graph) {
  const ScheduleSpec& sched = graph.schedule();
  if (sched.kind != ScheduleKind::kPhased || sched.phases.size() < 2) {
    throw InvalidArgumentError(
        "two-phase analysis needs a phased schedule with a closing phase");
  }
  if (sched.phases.back().size() != 1) {
    throw InvalidArgumentError("the closing phase must hold exactly one function");
  }
  for (const VariableNode& v : graph.variables()) {
    if (v.alpha.imag() != 0.0 || v.beta.imag() != 0.0 || v.alpha.real() < 0.0 ||
        v.beta.real() < 0.0) {
      throw InvalidArgumentError(
          "two-phase analysis expects real nonnegative prior amplitudes");
    }
  }

  TwoPhaseSpec spec;
  std::set<QubitId> touched;
  for (std::size_t ph = 0; ph + 1 < sched.phases.size(); ++ph) {
    for (const std::string& fid : sched.phases[ph]) {
      const FunctionNode& fn = graph.function(fid);
      StateVector priors;
      for (const QubitId& q : fn.scope) {
        if (!touched.insert(q).second) {
          throw InvalidArgumentError("parallel nodes must have disjoint scopes (\"" + q +
                                     "\" is shared)");
        }
        priors = tensor_product(priors, graph.variable(q).prior_state());
      }
      spec.parallel_probs.push_back(
          apply_diagonal(priors, fn.f_diag, fn.scope).squared_norm());
    }
  }
  double prod = 1.0;
  for (double p : spec.parallel_probs) prod *= p;
  if (prod < 1e-15) {
    throw ContradictoryGraphError("a parallel node has no success mass");
  }
  spec.joint_prob = brute_force_posterior(graph).p_total;
  spec.final_conditional = spec.joint_prob / prod;
  return spec;
}

EmpiricalCurve monte_carlo_completion(const FactorGraph& graph, int t_max, int trials,
                                      std::uint64_t master_seed, int num_workers) {
  if (trials < 1) throw InvalidArgumentError("need at least one trial");
  if (t_max < 1) throw InvalidArgumentError("t_max must be positive");

  if (num_workers <= 0) {
    num_workers = static_cast<int>(
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 8u));
  }
  num_workers = std::min(num_workers, trials);

  // Each worker owns a contiguous trial range and a private histogram, so
  // the merged counts are identical for any worker count.
  std::vector<std::vector<std::uint64_t>> histograms(
      num_workers, std::vector<std::uint64_t>(t_max + 1, 0));
  const RunOptions options{t_max, false};
  auto work = [&](int w, int lo, int hi) {
    for (int trial = lo; trial < hi; ++trial) {
      Rng rng = make_trial_rng(master_seed, static_cast<std::uint64_t>(trial));
      RunReport report = run_schedule_sampled(graph, rng, options);
      if (report.completed) ++histograms[w][report.completion_tick];
    }
  };

  if (num_workers == 1) {
    work(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (trials + num_workers - 1) / num_workers;
    for (int w = 0; w < num_workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, w, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }

  std::vector<std::uint64_t> counts(t_max + 1, 0);
  for (const auto& h : histograms) {
    for (int t = 0; t <= t_max; ++t) counts[t] += h[t];
  }

  EmpiricalCurve curve;
  curve.trials = trials;
  curve.master_seed = master_seed;
  const double n = static_cast<double>(trials);
  std::uint64_t cum = 0;
  for (int t = 1; t <= t_max; ++t) {
    cum += counts[t];
    EmpiricalPoint pt;
    pt.t = t;
    pt.completions_at = counts[t];
    pt.p_e = counts[t] / n;
    pt.p_m = cum / n;
    pt.stderr_m = std::sqrt(std::max(0.0, pt.p_m * (1.0 - pt.p_m)) / n);
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace qfg

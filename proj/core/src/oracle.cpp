#include "qfg/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qfg/errors.hpp"

namespace qfg {

namespace {
constexpr int kMaxOracleVariables = 20;
constexpr double kZeroMass = 1e-300;
constexpr double kMlTieRel = 1e-9;
}  // namespace

bool PosteriorTable::is_ml(std::uint64_t assignment) const {
  return std::binary_search(ml_assignments.begin(), ml_assignments.end(), assignment);
}

std::pair<double, double> PosteriorTable::marginal(int index) const {
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::uint64_t v = 0; v < distribution.size(); ++v) {
    if ((v >> index) & 1ULL) {
      p1 += distribution[v];
    } else {
      p0 += distribution[v];
    }
  }
  return {p0, p1};
}

PosteriorTable brute_force_posterior(const FactorGraph& graph) {
  const int n = static_cast<int>(graph.variables().size());
  if (n > kMaxOracleVariables) {
    throw ResourceError("brute-force oracle is capped at " +
                        std::to_string(kMaxOracleVariables) + " variables");
  }

  // Per-variable classical priors and per-function bit positions.
  std::vector<std::array<double, 2>> prior(n);
  for (int i = 0; i < n; ++i) {
    prior[i] = {graph.variables()[i].prob0(), graph.variables()[i].prob1()};
  }
  struct FnView {
    std::vector<int> positions;
    const DiagonalOperator* diag;
  };
  std::vector<FnView> fns;
  for (const FunctionNode& f : graph.functions()) {
    FnView view;
    for (const QubitId& q : f.scope) view.positions.push_back(graph.variable_index(q));
    view.diag = &f.f_diag;
    fns.push_back(std::move(view));
  }

  PosteriorTable table;
  table.num_variables = n;
  table.mass.assign(std::size_t{1} << n, 0.0);
  for (std::uint64_t v = 0; v < table.mass.size(); ++v) {
    double m = 1.0;
    for (int i = 0; i < n; ++i) m *= prior[i][(v >> i) & 1ULL];
    for (const FnView& f : fns) {
      std::uint64_t k = 0;
      for (std::size_t i = 0; i < f.positions.size(); ++i) {
        k |= ((v >> f.positions[i]) & 1ULL) << i;
      }
      m *= std::norm(f.diag->entries[k]);
      if (m == 0.0) break;
    }
    table.mass[v] = m;
    table.p_total += m;
  }

  if (table.p_total < kZeroMass) {
    throw ContradictoryGraphError("graph assigns zero mass to every assignment");
  }

  table.distribution.resize(table.mass.size());
  double best = 0.0;
  for (std::uint64_t v = 0; v < table.mass.size(); ++v) {
    table.distribution[v] = table.mass[v] / table.p_total;
    best = std::max(best, table.distribution[v]);
  }
  for (std::uint64_t v = 0; v < table.mass.size(); ++v) {
    if (table.distribution[v] >= best * (1.0 - kMlTieRel)) {
      table.ml_assignments.push_back(v);
    }
  }
  return table;
}

std::string assignment_bits(std::uint64_t assignment, int num_variables) {
  std::string s(num_variables, '0');
  for (int i = 0; i < num_variables; ++i) {
    if ((assignment >> i) & 1ULL) s[i] = '1';
  }
  return s;
}

}  // namespace qfg

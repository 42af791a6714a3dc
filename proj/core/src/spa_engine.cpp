#include "qfg/spa_engine.hpp"

#include <cmath>

#include "qfg/errors.hpp"

namespace qfg {

namespace {

constexpr double kMessageFloor = 1e-300;

// Normalize in place; a message with no mass left (hard contradiction)
// becomes uniform so the tables stay probability-valued.
void normalize(std::array<double, 2>& m) {
  const double s = m[0] + m[1];
  if (s < kMessageFloor) {
    m = {0.5, 0.5};
    return;
  }
  m[0] /= s;
  m[1] /= s;
}

}  // namespace

BeliefState run_spa(const FactorGraph& graph, int max_iters, double tol) {
  const int nv = static_cast<int>(graph.variables().size());
  const int nf = static_cast<int>(graph.functions().size());

  // Incidence: for each variable, the (function, slot) pairs touching it.
  std::vector<std::vector<std::pair<int, int>>> edges_of(nv);
  for (int fi = 0; fi < nf; ++fi) {
    const FunctionNode& fn = graph.functions()[fi];
    for (std::size_t s = 0; s < fn.scope.size(); ++s) {
      edges_of[graph.variable_index(fn.scope[s])].push_back({fi, static_cast<int>(s)});
    }
  }

  // Classical weights |f_k|^2 per function.
  std::vector<std::vector<double>> weight(nf);
  for (int fi = 0; fi < nf; ++fi) {
    for (const Complex& e : graph.functions()[fi].f_diag.entries) {
      weight[fi].push_back(std::norm(e));
    }
  }

  BeliefState st;
  st.var_to_fn.resize(nf);
  st.fn_to_var.resize(nf);
  for (int fi = 0; fi < nf; ++fi) {
    st.var_to_fn[fi].assign(graph.functions()[fi].scope.size(), {0.5, 0.5});
    st.fn_to_var[fi].assign(graph.functions()[fi].scope.size(), {0.5, 0.5});
  }

  for (int iter = 1; iter <= max_iters; ++iter) {
    double delta = 0.0;

    // All variable -> function messages, recomputed from scratch.
    for (int fi = 0; fi < nf; ++fi) {
      const FunctionNode& fn = graph.functions()[fi];
      for (std::size_t s = 0; s < fn.scope.size(); ++s) {
        const int vi = graph.variable_index(fn.scope[s]);
        const VariableNode& var = graph.variables()[vi];
        std::array<double, 2> msg = {var.prob0(), var.prob1()};
        for (const auto& [fj, sj] : edges_of[vi]) {
          if (fj == fi && sj == static_cast<int>(s)) continue;
          msg[0] *= st.fn_to_var[fj][sj][0];
          msg[1] *= st.fn_to_var[fj][sj][1];
        }
        normalize(msg);
        delta = std::max({delta, std::abs(msg[0] - st.var_to_fn[fi][s][0]),
                          std::abs(msg[1] - st.var_to_fn[fi][s][1])});
        st.var_to_fn[fi][s] = msg;
      }
    }

    // All function -> variable messages.
    for (int fi = 0; fi < nf; ++fi) {
      const FunctionNode& fn = graph.functions()[fi];
      const std::size_t m = fn.scope.size();
      for (std::size_t s = 0; s < m; ++s) {
        std::array<double, 2> msg = {0.0, 0.0};
        for (std::uint64_t k = 0; k < weight[fi].size(); ++k) {
          const double w = weight[fi][k];
          if (w == 0.0) continue;
          double p = w;
          for (std::size_t j = 0; j < m; ++j) {
            if (j == s) continue;
            p *= st.var_to_fn[fi][j][(k >> j) & 1ULL];
          }
          msg[(k >> s) & 1ULL] += p;
        }
        normalize(msg);
        delta = std::max({delta, std::abs(msg[0] - st.fn_to_var[fi][s][0]),
                          std::abs(msg[1] - st.fn_to_var[fi][s][1])});
        st.fn_to_var[fi][s] = msg;
      }
    }

    st.iterations = iter;
    st.residual = delta;
    if (delta < tol) {
      st.converged = true;
      break;
    }
  }

  st.beliefs.resize(nv);
  for (int vi = 0; vi < nv; ++vi) {
    const VariableNode& var = graph.variables()[vi];
    std::array<double, 2> b = {var.prob0(), var.prob1()};
    for (const auto& [fj, sj] : edges_of[vi]) {
      b[0] *= st.fn_to_var[fj][sj][0];
      b[1] *= st.fn_to_var[fj][sj][1];
    }
    normalize(b);
    st.beliefs[vi] = b;
  }
  return st;
}

std::string hard_decision(const BeliefState& beliefs) {
  std::string s;
  s.reserve(beliefs.beliefs.size());
  for (const auto& b : beliefs.beliefs) {
    const bool tie = std::abs(b[0] - b[1]) < 1e-12;
    s.push_back(!tie && b[1] > b[0] ? '1' : '0');
  }
  return s;
}

}  // namespace qfg

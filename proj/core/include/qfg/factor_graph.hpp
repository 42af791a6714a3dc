#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qfg/state_vector.hpp"

namespace qfg {

// Variable node with a-priori amplitudes (alpha, beta), |a|^2 + |b|^2 = 1.
struct VariableNode {
  QubitId id;
  Complex alpha;
  Complex beta;

  StateVector prior_state() const { return StateVector::single(id, alpha, beta); }
  // Classical prior, magnitude-squared of the amplitudes.
  double prob0() const { return std::norm(alpha); }
  double prob1() const { return std::norm(beta); }

  bool operator==(const VariableNode&) const = default;
};

// Function node: diagonal sieve f over an ordered scope, plus the derived
// complement g that completes it to a unitary block operator.
struct FunctionNode {
  std::string id;
  std::vector<QubitId> scope;
  DiagonalOperator f_diag;
  DiagonalOperator g_diag;

  bool operator==(const FunctionNode&) const = default;
};

enum class ScheduleKind { kFree, kPhased };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kFree;
  // Phased only: function ids per phase, covering every function exactly once.
  std::vector<std::vector<std::string>> phases;
  // Consecutive failed activations after which a qubit's prior is reset to
  // (sqrt(.5), sqrt(.5)).
  std::optional<int> bad_qubit_timeout;

  bool operator==(const ScheduleSpec&) const = default;
};

class FactorGraph {
 public:
  FactorGraph(std::vector<VariableNode> variables, std::vector<FunctionNode> functions,
              ScheduleSpec schedule);

  const std::vector<VariableNode>& variables() const { return variables_; }
  const std::vector<FunctionNode>& functions() const { return functions_; }
  const ScheduleSpec& schedule() const { return schedule_; }

  const VariableNode& variable(const QubitId& id) const;
  const FunctionNode& function(const std::string& id) const;
  int variable_index(const QubitId& id) const;

  // Deterministic activation order: phases flattened for phased schedules,
  // declaration order otherwise.
  std::vector<std::string> activation_order() const;

  bool operator==(const FactorGraph& other) const {
    return variables_ == other.variables_ && functions_ == other.functions_ &&
           schedule_ == other.schedule_;
  }

 private:
  std::vector<VariableNode> variables_;
  std::vector<FunctionNode> functions_;
  ScheduleSpec schedule_;
  std::unordered_map<std::string, int> variable_index_;
  std::unordered_map<std::string, int> function_index_;
};

// XOR sieve: entries[k] = 1 when popcount(k) is even, else 0.
DiagonalOperator xor_diag(int arity);

// Complement diagonal g of f: g_k = 1 at f_k = 0, otherwise
// i f_k sqrt(1 - |f_k|^2) / |f_k|, which satisfies |f|^2 + |g|^2 = 1 and
// f*g + fg* = 0 entrywise.
DiagonalOperator complement_diag(const DiagonalOperator& f);

// Parses the JSON graph document format (see README). Priors given as
// classical probabilities are converted to nonnegative real amplitudes by
// square root; g diagonals are derived via complement_diag.
FactorGraph parse_graph(const std::string& json_text);
FactorGraph load_graph(const std::filesystem::path& file);

// Canonical JSON form (amplitude priors, explicit diagonals);
// parse(serialize(g)) == g structurally.
std::string serialize_graph(const FactorGraph& graph);

}  // namespace qfg

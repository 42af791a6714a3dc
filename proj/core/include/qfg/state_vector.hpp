#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfg/rng.hpp"

namespace qfg {

using Complex = std::complex<double>;
using QubitId = std::string;

// Hard cap on the size of one entangled block.
inline constexpr int kMaxBlockQubits = 24;
// Tolerance for "this state is normalized" checks.
inline constexpr double kNormTolerance = 1e-9;
// Below this Born probability an outcome cannot be forced.
inline constexpr double kImpossibleOutcomeThreshold = 1e-15;

// Diagonal operator on m qubits, stored as its 2^m diagonal entries.
// Entry k applies to the basis state whose scope bits spell k
// (scope[0] = bit 0 of k).
struct DiagonalOperator {
  std::vector<Complex> entries;

  DiagonalOperator() = default;
  explicit DiagonalOperator(std::vector<Complex> diag_entries);

  int arity() const;
  static DiagonalOperator identity(int arity);

  bool operator==(const DiagonalOperator&) const = default;
};

// Permutation on 2^m basis states: mapping[out] = in.
struct PermutationOperator {
  std::vector<std::uint64_t> mapping;

  PermutationOperator() = default;
  explicit PermutationOperator(std::vector<std::uint64_t> out_to_in);

  int arity() const;
  static PermutationOperator identity(int arity);

  bool operator==(const PermutationOperator&) const = default;
};

// Dense complex amplitude vector over an ordered list of qubits.
//
// Index convention is little-endian throughout: basis index v encodes
// qubit_ids[i] as bit i, so the first listed qubit varies fastest and
// (a0,b0) x (a1,b1) lays out as (a0a1, b0a1, a0b1, b0b1).
class StateVector {
 public:
  // Scalar state: zero qubits, one amplitude fixed at 1.
  StateVector();
  StateVector(std::vector<QubitId> qubit_ids, std::vector<Complex> amps);

  static StateVector single(QubitId id, Complex amp0, Complex amp1);

  const std::vector<QubitId>& qubit_ids() const { return qubit_ids_; }
  const std::vector<Complex>& amps() const { return amps_; }
  std::size_t dim() const { return amps_.size(); }
  int num_qubits() const { return static_cast<int>(qubit_ids_.size()); }

  bool has_qubit(const QubitId& id) const;
  // Bit position of `id` in basis indices; throws InvalidArgumentError if absent.
  int bit_position(const QubitId& id) const;

  double squared_norm() const;
  // Unit-norm copy; throws ImpossibleOutcomeError when the norm is ~zero.
  StateVector normalized() const;

  bool operator==(const StateVector&) const = default;

 private:
  std::vector<QubitId> qubit_ids_;
  std::vector<Complex> amps_;
};

// Joint state of two disjoint registers; a's qubits keep the low bits.
StateVector tensor_product(const StateVector& a, const StateVector& b);

// Multiplies each amplitude by the diagonal entry selected by the scope bits.
// The result is generally unnormalized; callers renormalize after measuring.
StateVector apply_diagonal(const StateVector& state, const DiagonalOperator& op,
                           std::span<const QubitId> scope);

// Rearranges amplitudes by the permutation restricted to the scope bits.
// Norm (indeed the multiset of magnitudes) is preserved exactly.
StateVector apply_permutation(const StateVector& state, const PermutationOperator& op,
                              std::span<const QubitId> scope);

struct MeasurementResult {
  std::vector<int> outcome;  // one bit per target, in target order
  double probability;        // Born probability of that outcome
  StateVector collapsed;     // renormalized, with targets removed
};

// Born-rule projective measurement of a subset of qubits.
// The input must be normalized within kNormTolerance.
MeasurementResult measure_sample(const StateVector& state, std::span<const QubitId> targets,
                                 Rng& rng);
MeasurementResult measure_force(const StateVector& state, std::span<const QubitId> targets,
                                std::span<const int> outcome);

// Full outcome distribution without collapsing; index o spells the target
// bits with targets[0] as bit 0.
std::vector<double> outcome_distribution(const StateVector& state,
                                         std::span<const QubitId> targets);

// (p0, p1) of a single qubit under the Born rule.
std::pair<double, double> marginal(const StateVector& state, const QubitId& target);

}  // namespace qfg

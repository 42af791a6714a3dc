#include "qfg/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

#include "qfg/errors.hpp"

namespace qfg {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw InvalidArgumentError("operator size must be a power of two, got " +
                               std::to_string(n));
  }
  return std::countr_zero(n);
}

// Positions of the scope qubits inside the state, validating presence and
// pairwise distinctness.
std::vector<int> scope_positions(const StateVector& state, std::span<const QubitId> scope) {
  std::vector<int> pos;
  pos.reserve(scope.size());
  std::unordered_set<std::string_view> seen;
  for (const QubitId& id : scope) {
    if (!seen.insert(id).second) {
      throw InvalidArgumentError("scope lists qubit \"" + id + "\" twice");
    }
    pos.push_back(state.bit_position(id));
  }
  return pos;
}

std::uint64_t gather_bits(std::uint64_t v, const std::vector<int>& positions) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    k |= ((v >> positions[i]) & 1ULL) << i;
  }
  return k;
}

std::uint64_t scatter_bits(std::uint64_t v, std::uint64_t k, const std::vector<int>& positions) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::uint64_t bit = (k >> i) & 1ULL;
    v = (v & ~(1ULL << positions[i])) | (bit << positions[i]);
  }
  return v;
}

void require_normalized(const StateVector& state, const char* what) {
  if (std::abs(state.squared_norm() - 1.0) > kNormTolerance) {
    throw InvalidArgumentError(std::string(what) + " requires a normalized state");
  }
}

MeasurementResult collapse_to(const StateVector& state, const std::vector<int>& positions,
                              std::span<const QubitId> targets, std::uint64_t outcome_index,
                              double probability) {
  std::vector<QubitId> remaining;
  remaining.reserve(state.num_qubits() - targets.size());
  std::vector<int> keep;
  {
    std::vector<bool> is_target(state.num_qubits(), false);
    for (int p : positions) is_target[p] = true;
    for (int p = 0; p < state.num_qubits(); ++p) {
      if (!is_target[p]) {
        keep.push_back(p);
        remaining.push_back(state.qubit_ids()[p]);
      }
    }
  }

  const double scale = 1.0 / std::sqrt(probability);
  std::vector<Complex> amps(std::size_t{1} << keep.size(), Complex{0.0, 0.0});
  for (std::uint64_t v = 0; v < state.dim(); ++v) {
    if (gather_bits(v, positions) != outcome_index) continue;
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      w |= ((v >> keep[i]) & 1ULL) << i;
    }
    amps[w] = state.amps()[v] * scale;
  }

  std::vector<int> bits(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    bits[i] = static_cast<int>((outcome_index >> i) & 1ULL);
  }
  return MeasurementResult{std::move(bits), probability,
                           StateVector(std::move(remaining), std::move(amps))};
}

}  // namespace

DiagonalOperator::DiagonalOperator(std::vector<Complex> diag_entries)
    : entries(std::move(diag_entries)) {
  log2_exact(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (std::abs(entries[k]) > 1.0 + 1e-12) {
      throw InvalidArgumentError("diagonal entry " + std::to_string(k) +
                                 " has magnitude > 1");
    }
  }
}

int DiagonalOperator::arity() const { return log2_exact(entries.size()); }

DiagonalOperator DiagonalOperator::identity(int arity) {
  return DiagonalOperator(
      std::vector<Complex>(std::size_t{1} << arity, Complex{1.0, 0.0}));
}

PermutationOperator::PermutationOperator(std::vector<std::uint64_t> out_to_in)
    : mapping(std::move(out_to_in)) {
  log2_exact(mapping.size());
  std::vector<bool> hit(mapping.size(), false);
  for (std::uint64_t in : mapping) {
    if (in >= mapping.size() || hit[in]) {
      throw InvalidArgumentError("permutation mapping is not a bijection");
    }
    hit[in] = true;
  }
}

int PermutationOperator::arity() const { return log2_exact(mapping.size()); }

PermutationOperator PermutationOperator::identity(int arity) {
  std::vector<std::uint64_t> m(std::size_t{1} << arity);
  for (std::uint64_t i = 0; i < m.size(); ++i) m[i] = i;
  return PermutationOperator(std::move(m));
}

StateVector::StateVector() : amps_{Complex{1.0, 0.0}} {}

StateVector::StateVector(std::vector<QubitId> qubit_ids, std::vector<Complex> amps)
    : qubit_ids_(std::move(qubit_ids)), amps_(std::move(amps)) {
  if (qubit_ids_.size() > kMaxBlockQubits) {
    throw ResourceError("state over " + std::to_string(qubit_ids_.size()) +
                        " qubits exceeds the " + std::to_string(kMaxBlockQubits) +
                        "-qubit block cap");
  }
  if (amps_.size() != (std::size_t{1} << qubit_ids_.size())) {
    throw InvalidArgumentError("amplitude vector has length " +
                               std::to_string(amps_.size()) + ", expected 2^" +
                               std::to_string(qubit_ids_.size()));
  }
  std::unordered_set<std::string_view> seen;
  for (const QubitId& id : qubit_ids_) {
    if (!seen.insert(id).second) {
      throw InvalidArgumentError("duplicate qubit id \"" + id + "\"");
    }
  }
}

StateVector StateVector::single(QubitId id, Complex amp0, Complex amp1) {
  return StateVector({std::move(id)}, {amp0, amp1});
}

bool StateVector::has_qubit(const QubitId& id) const {
  return std::find(qubit_ids_.begin(), qubit_ids_.end(), id) != qubit_ids_.end();
}

int StateVector::bit_position(const QubitId& id) const {
  auto it = std::find(qubit_ids_.begin(), qubit_ids_.end(), id);
  if (it == qubit_ids_.end()) {
    throw InvalidArgumentError("qubit \"" + id + "\" is not part of this state");
  }
  return static_cast<int>(it - qubit_ids_.begin());
}

double StateVector::squared_norm() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return s;
}

StateVector StateVector::normalized() const {
  const double sn = squared_norm();
  if (sn < kImpossibleOutcomeThreshold) {
    throw ImpossibleOutcomeError("cannot normalize a state with ~zero norm");
  }
  const double scale = 1.0 / std::sqrt(sn);
  std::vector<Complex> amps(amps_);
  for (Complex& a : amps) a *= scale;
  return StateVector(qubit_ids_, std::move(amps));
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  for (const QubitId& id : b.qubit_ids()) {
    if (a.has_qubit(id)) {
      throw InvalidArgumentError("tensor factors share qubit \"" + id + "\"");
    }
  }
  if (a.num_qubits() + b.num_qubits() > kMaxBlockQubits) {
    throw ResourceError("tensor product would exceed the block qubit cap");
  }

  std::vector<QubitId> ids(a.qubit_ids());
  ids.insert(ids.end(), b.qubit_ids().begin(), b.qubit_ids().end());

  std::vector<Complex> amps(a.dim() * b.dim());
  for (std::uint64_t vb = 0; vb < b.dim(); ++vb) {
    const Complex bb = b.amps()[vb];
    const std::uint64_t base = vb << a.num_qubits();
    for (std::uint64_t va = 0; va < a.dim(); ++va) {
      amps[base | va] = a.amps()[va] * bb;
    }
  }
  return StateVector(std::move(ids), std::move(amps));
}

StateVector apply_diagonal(const StateVector& state, const DiagonalOperator& op,
                           std::span<const QubitId> scope) {
  if (op.arity() != static_cast<int>(scope.size())) {
    throw InvalidArgumentError("diagonal arity " + std::to_string(op.arity()) +
                               " does not match scope size " +
                               std::to_string(scope.size()));
  }
  const std::vector<int> pos = scope_positions(state, scope);
  std::vector<Complex> amps(state.amps());
  for (std::uint64_t v = 0; v < amps.size(); ++v) {
    amps[v] *= op.entries[gather_bits(v, pos)];
  }
  return StateVector(state.qubit_ids(), std::move(amps));
}

StateVector apply_permutation(const StateVector& state, const PermutationOperator& op,
                              std::span<const QubitId> scope) {
  if (op.arity() != static_cast<int>(scope.size())) {
    throw InvalidArgumentError("permutation arity " + std::to_string(op.arity()) +
                               " does not match scope size " +
                               std::to_string(scope.size()));
  }
  const std::vector<int> pos = scope_positions(state, scope);
  std::vector<Complex> amps(state.dim());
  for (std::uint64_t v = 0; v < amps.size(); ++v) {
    const std::uint64_t k_out = gather_bits(v, pos);
    const std::uint64_t k_in = op.mapping[k_out];
    amps[v] = state.amps()[scatter_bits(v, k_in, pos)];
  }
  return StateVector(state.qubit_ids(), std::move(amps));
}

std::vector<double> outcome_distribution(const StateVector& state,
                                         std::span<const QubitId> targets) {
  const std::vector<int> pos = scope_positions(state, targets);
  std::vector<double> dist(std::size_t{1} << targets.size(), 0.0);
  for (std::uint64_t v = 0; v < state.dim(); ++v) {
    dist[gather_bits(v, pos)] += std::norm(state.amps()[v]);
  }
  return dist;
}

MeasurementResult measure_sample(const StateVector& state, std::span<const QubitId> targets,
                                 Rng& rng) {
  require_normalized(state, "measure_sample");
  const std::vector<int> pos = scope_positions(state, targets);
  const std::vector<double> dist = outcome_distribution(state, targets);

  const double u = uniform_double(rng);
  double acc = 0.0;
  std::uint64_t chosen = 0;
  bool found = false;
  for (std::uint64_t o = 0; o < dist.size(); ++o) {
    if (dist[o] <= 0.0) continue;
    acc += dist[o];
    chosen = o;
    if (u < acc) {
      found = true;
      break;
    }
  }
  if (!found && acc == 0.0) {
    throw ImpossibleOutcomeError("state has no measurable mass");
  }
  return collapse_to(state, pos, targets, chosen, dist[chosen]);
}

MeasurementResult measure_force(const StateVector& state, std::span<const QubitId> targets,
                                std::span<const int> outcome) {
  require_normalized(state, "measure_force");
  if (outcome.size() != targets.size()) {
    throw InvalidArgumentError("forced outcome length does not match target count");
  }
  const std::vector<int> pos = scope_positions(state, targets);
  std::uint64_t o = 0;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (outcome[i] != 0 && outcome[i] != 1) {
      throw InvalidArgumentError("forced outcome bits must be 0 or 1");
    }
    o |= static_cast<std::uint64_t>(outcome[i]) << i;
  }
  const std::vector<double> dist = outcome_distribution(state, targets);
  if (dist[o] < kImpossibleOutcomeThreshold) {
    throw ImpossibleOutcomeError("forced outcome has probability below 1e-15");
  }
  return collapse_to(state, pos, targets, o, dist[o]);
}

std::pair<double, double> marginal(const StateVector& state, const QubitId& target) {
  const int p = state.bit_position(target);
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::uint64_t v = 0; v < state.dim(); ++v) {
    if ((v >> p) & 1ULL) {
      p1 += std::norm(state.amps()[v]);
    } else {
      p0 += std::norm(state.amps()[v]);
    }
  }
  return {p0, p1};
}

}  // namespace qfg

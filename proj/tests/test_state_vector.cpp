#include "qfg/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <doctest.h>

#include "qfg/errors.hpp"
#include "test_helpers.hpp"

using namespace qfg;
using qfg::test::near;
using qfg::test::random_state;

namespace {

const double kR04 = std::sqrt(0.4);
const double kR06 = std::sqrt(0.6);

StateVector fig1_joint_with_ancilla() {
  const StateVector x0 = StateVector::single("x0", kR04, kR06);
  const StateVector x1 = StateVector::single("x1", kR06, kR04);
  const StateVector z = StateVector::single("z", 1.0, 0.0);
  return tensor_product(tensor_product(x0, x1), z);
}

// S_f of the worked two-qubit example: (1, 0, 0, sqrt 2) / sqrt 3.
StateVector s_f() {
  const double r3 = std::sqrt(3.0);
  return StateVector({"x0", "x1"}, {1.0 / r3, 0.0, 0.0, std::sqrt(2.0) / r3});
}

std::string diag_bits(const StateVector& s) {
  std::string bits;
  for (const Complex& a : s.amps()) bits += std::abs(a) > 0.1 ? '1' : '0';
  return bits;
}

}  // namespace

TEST_CASE("tensor product reproduces the worked-example three-qubit product state") {
  const StateVector a = fig1_joint_with_ancilla();
  REQUIRE(a.dim() == 8);
  CHECK(a.qubit_ids() == std::vector<QubitId>{"x0", "x1", "z"});
  const double r24 = std::sqrt(0.24);
  const std::vector<double> expected{r24, 0.6, 0.4, r24, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t v = 0; v < 8; ++v) {
    CHECK(near(a.amps()[v].real(), expected[v], 1e-12));
    CHECK(near(a.amps()[v].imag(), 0.0, 1e-12));
  }
  CHECK(near(a.squared_norm(), 1.0, 1e-12));
}

TEST_CASE("tensor with the scalar state is the identity") {
  const StateVector s = s_f();
  const StateVector left = tensor_product(StateVector(), s);
  const StateVector right = tensor_product(s, StateVector());
  CHECK(left == s);
  CHECK(right == s);
}

TEST_CASE("tensor product norm is multiplicative") {
  Rng rng(11);
  for (int i = 0; i < 10; ++i) {
    const StateVector a = random_state(rng, 1 + int(rng() % 3), "a");
    const StateVector b = random_state(rng, 1 + int(rng() % 3), "b");
    CHECK(near(tensor_product(a, b).squared_norm(), 1.0, 1e-9));
  }
}

TEST_CASE("tensor product rejects overlapping registers and oversized blocks") {
  const StateVector s = s_f();
  CHECK_THROWS_AS(tensor_product(s, s), InvalidArgumentError);
  Rng rng(1);
  const StateVector big1 = random_state(rng, 13, "a");
  const StateVector big2 = random_state(rng, 13, "b");
  CHECK_THROWS_AS(tensor_product(big1, big2), ResourceError);
}

TEST_CASE("diagonal embedding follows the scope bits across a register") {
  // Uniform four-qubit register: every amplitude 1/4, so after sieving the
  // amplitude pattern spells out the embedded diagonal.
  std::vector<Complex> uniform(16, Complex{0.25, 0.0});
  const StateVector reg({"x0", "x1", "x2", "x3"}, uniform);

  std::vector<Complex> xor3(8);
  for (int k = 0; k < 8; ++k) xor3[k] = (std::popcount(unsigned(k)) % 2) ? 0.0 : 1.0;
  const DiagonalOperator op{xor3};

  const std::vector<QubitId> low{"x0", "x1", "x2"};
  const std::vector<QubitId> high{"x1", "x2", "x3"};
  const StateVector s_low = apply_diagonal(reg, op, low);
  const StateVector s_high = apply_diagonal(reg, op, high);
  CHECK(diag_bits(s_low) == "1001011010010110");
  CHECK(diag_bits(s_high) == "1100001100111100");

  const StateVector s_both = apply_diagonal(s_low, op, high);
  CHECK(diag_bits(s_both) == "1000001000010100");
}

TEST_CASE("identity diagonal leaves the state untouched") {
  Rng rng(3);
  const StateVector s = random_state(rng, 3);
  const StateVector t = apply_diagonal(s, DiagonalOperator::identity(2),
                                       std::vector<QubitId>{"q2", "q0"});
  CHECK(t == s);
}

TEST_CASE("zero/one diagonals are idempotent up to normalization") {
  Rng rng(4);
  std::vector<Complex> proj{1.0, 0.0, 0.0, 1.0};
  const DiagonalOperator op{proj};
  const std::vector<QubitId> scope{"q0", "q1"};
  const StateVector s = random_state(rng, 3);
  const StateVector once = apply_diagonal(s, op, scope).normalized();
  const StateVector twice = apply_diagonal(once, op, scope).normalized();
  for (std::size_t v = 0; v < s.dim(); ++v) {
    CHECK(near(std::abs(once.amps()[v] - twice.amps()[v]), 0.0, 1e-12));
  }
}

TEST_CASE("diagonal application validates scope") {
  const StateVector s = s_f();
  CHECK_THROWS_AS(
      apply_diagonal(s, DiagonalOperator::identity(2), std::vector<QubitId>{"x0", "x9"}),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      apply_diagonal(s, DiagonalOperator::identity(1), std::vector<QubitId>{"x0", "x1"}),
      InvalidArgumentError);
}

TEST_CASE("diagonal entries above unit magnitude are rejected") {
  CHECK_THROWS_AS(DiagonalOperator({1.0, Complex{1.0, 0.1}}), InvalidArgumentError);
}

TEST_CASE("the two-qubit extraction permutation pulls the diagonal forward") {
  // Q = (1000; 0001; 0100; 0010): output (0,1,2,3) reads input (0,3,1,2).
  const PermutationOperator q{{0, 3, 1, 2}};
  const double r2 = std::sqrt(2.0);
  const StateVector v0({"a", "b"}, {1.0 / 3, r2 / 3, r2 / 3, 2.0 / 3});
  const StateVector qv0 = apply_permutation(v0, q, std::vector<QubitId>{"a", "b"});
  CHECK(near(qv0.amps()[0].real(), 1.0 / 3, 1e-12));
  CHECK(near(qv0.amps()[1].real(), 2.0 / 3, 1e-12));
  CHECK(near(qv0.amps()[2].real(), r2 / 3, 1e-12));
  CHECK(near(qv0.amps()[3].real(), r2 / 3, 1e-12));
}

TEST_CASE("the sixteen-dimensional extraction permutation and postselection") {
  // Row r of P has its one at these input positions.
  const std::vector<std::uint64_t> p_rows{0, 5, 10, 15, 1, 2, 3, 4, 6, 7, 8, 9, 11, 12, 13, 14};
  const PermutationOperator p{p_rows};
  const StateVector v0 = tensor_product(s_f(), StateVector({"y0", "y1"}, s_f().amps()));
  const std::vector<QubitId> all{"x0", "x1", "y0", "y1"};
  const StateVector pv0 = apply_permutation(v0, p, all);
  const double r2 = std::sqrt(2.0);
  const std::vector<double> expected{1, 0, 0, 2, 0, 0, r2, 0, 0, 0, 0, 0, 0, r2, 0, 0};
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(near(pv0.amps()[i].real(), expected[i] / 3.0, 1e-12));
  }

  // Measuring the second pair to 00 succeeds with probability 5/9 and leaves
  // the element-square of S_f on the first pair.
  const std::vector<QubitId> pair2{"y0", "y1"};
  const std::vector<int> zeros{0, 0};
  const MeasurementResult m = measure_force(pv0, pair2, zeros);
  CHECK(near(m.probability, 5.0 / 9.0, 1e-12));
  CHECK(m.collapsed.qubit_ids() == std::vector<QubitId>{"x0", "x1"});
  const double r5 = std::sqrt(5.0);
  CHECK(near(m.collapsed.amps()[0].real(), 1.0 / r5, 1e-12));
  CHECK(near(m.collapsed.amps()[3].real(), 2.0 / r5, 1e-12));
}

TEST_CASE("identity permutation and bijection validation") {
  Rng rng(5);
  const StateVector s = random_state(rng, 2);
  CHECK(apply_permutation(s, PermutationOperator::identity(2),
                          std::vector<QubitId>{"q0", "q1"}) == s);
  CHECK_THROWS_AS(PermutationOperator({0, 0, 1, 2}), InvalidArgumentError);
}

TEST_CASE("permutations preserve the multiset of amplitude magnitudes exactly") {
  Rng rng(6);
  const StateVector s = random_state(rng, 3);
  std::vector<std::uint64_t> mapping{0, 1, 2, 3, 4, 5, 6, 7};
  std::shuffle(mapping.begin(), mapping.end(), rng);
  const StateVector t = apply_permutation(s, PermutationOperator{mapping},
                                          std::vector<QubitId>{"q0", "q1", "q2"});
  auto mags = [](const StateVector& v) {
    std::vector<double> m;
    for (const Complex& a : v.amps()) m.push_back(std::abs(a));
    std::sort(m.begin(), m.end());
    return m;
  };
  CHECK(mags(s) == mags(t));
  // The amplitude multiset is identical, so the norm can differ only by
  // summation order.
  CHECK(near(t.squared_norm(), s.squared_norm(), 1e-15));
}

TEST_CASE("measuring the ancilla of the worked-example product state reads zero") {
  const StateVector a = fig1_joint_with_ancilla();
  Rng rng(7);
  const std::vector<QubitId> z{"z"};
  const MeasurementResult m = measure_sample(a, z, rng);
  CHECK(m.outcome == std::vector<int>{0});
  CHECK(near(m.probability, 1.0, 1e-12));
  CHECK(m.collapsed.num_qubits() == 2);
}

TEST_CASE("measuring the four-qubit posterior returns the two ML codewords") {
  std::vector<Complex> amps(16, Complex{0.0, 0.0});
  amps[0] = std::sqrt(216.0 / 2040.0);
  amps[6] = std::sqrt(96.0 / 2040.0);
  amps[11] = std::sqrt(864.0 / 2040.0);
  amps[13] = std::sqrt(864.0 / 2040.0);
  const StateVector s_f_big({"x0", "x1", "x2", "x3"}, amps);
  const std::vector<QubitId> all{"x0", "x1", "x2", "x3"};

  const std::vector<double> dist = outcome_distribution(s_f_big, all);
  double sum = 0.0;
  for (double p : dist) sum += p;
  CHECK(near(sum, 1.0, 1e-9));
  // Outcome index spells target bits: 1101 reads x0=1,x1=1,x2=0,x3=1 = index 11.
  CHECK(near(dist[11], 864.0 / 2040.0, 1e-12));
  CHECK(near(dist[13], 864.0 / 2040.0, 1e-12));

  const std::vector<int> onezero{1, 1, 0, 1};
  CHECK(near(measure_force(s_f_big, all, onezero).probability, 864.0 / 2040.0, 1e-12));
}

TEST_CASE("forcing a zero-probability outcome is impossible") {
  const StateVector a = fig1_joint_with_ancilla();
  const std::vector<QubitId> z{"z"};
  const std::vector<int> one{1};
  CHECK_THROWS_AS(measure_force(a, z, one), ImpossibleOutcomeError);
}

TEST_CASE("measurement requires a normalized state") {
  const StateVector bad({"a"}, {0.5, 0.0});
  Rng rng(8);
  const std::vector<QubitId> t{"a"};
  CHECK_THROWS_AS(measure_sample(bad, t, rng), InvalidArgumentError);
}

TEST_CASE("sampled measurement frequencies follow the Born distribution") {
  Rng state_rng(20240917);
  const StateVector s = random_state(state_rng, 3);
  const std::vector<QubitId> all{"q0", "q1", "q2"};
  const std::vector<double> dist = outcome_distribution(s, all);

  Rng rng(99);
  const int n = 100000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < n; ++i) {
    const MeasurementResult m = measure_sample(s, all, rng);
    std::uint64_t o = 0;
    for (int b = 0; b < 3; ++b) o |= std::uint64_t(m.outcome[b]) << b;
    ++counts[o];
  }
  double chi_sq = 0.0;
  for (int o = 0; o < 8; ++o) {
    const double expected = dist[o] * n;
    const double sigma = std::sqrt(dist[o] * (1.0 - dist[o]) * n);
    CHECK(std::abs(counts[o] - expected) <= 4.0 * sigma + 1e-9);
    if (expected > 0) chi_sq += (counts[o] - expected) * (counts[o] - expected) / expected;
  }
  CHECK(chi_sq < 26.02);  // chi^2_{0.9995, df=7}
}

TEST_CASE("collapse removes the measured qubits and renormalizes") {
  Rng rng(10);
  const StateVector s = random_state(rng, 4);
  const std::vector<QubitId> targets{"q1", "q3"};
  const MeasurementResult m = measure_sample(s, targets, rng);
  CHECK(m.collapsed.qubit_ids() == std::vector<QubitId>{"q0", "q2"});
  CHECK(near(m.collapsed.squared_norm(), 1.0, 1e-9));
}

TEST_CASE("marginal of the worked example state matches the classical summary") {
  const auto [p0, p1] = marginal(s_f(), "x0");
  CHECK(near(p0, 1.0 / 3.0, 1e-12));
  CHECK(near(p1, 2.0 / 3.0, 1e-12));
  const auto [q0, q1] = marginal(s_f(), "x1");
  CHECK(near(q0, 1.0 / 3.0, 1e-12));
  CHECK(near(q1, 2.0 / 3.0, 1e-12));
}

TEST_CASE("marginals of a product state recover each factor") {
  Rng rng(12);
  for (int i = 0; i < 8; ++i) {
    const StateVector a = random_state(rng, 1, "a");
    const StateVector b = random_state(rng, 2, "b");
    const StateVector joint = tensor_product(a, b);
    const auto [p0, p1] = marginal(joint, "a0");
    CHECK(near(p0, std::norm(a.amps()[0]), 1e-12));
    CHECK(near(p1, std::norm(a.amps()[1]), 1e-12));
    CHECK(near(p0 + p1, 1.0, 1e-9));
  }
}

TEST_CASE("uniform state has an even marginal, unknown qubits are rejected") {
  const StateVector u({"a", "b"}, {0.5, 0.5, 0.5, 0.5});
  const auto [p0, p1] = marginal(u, "b");
  CHECK(near(p0, 0.5, 1e-12));
  CHECK(near(p1, 0.5, 1e-12));
  CHECK_THROWS_AS(marginal(u, "c"), InvalidArgumentError);
}

TEST_CASE("state construction validates shape") {
  CHECK_THROWS_AS(StateVector({"a", "b"}, {1.0, 0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(StateVector({"a", "a"}, {1.0, 0.0, 0.0, 0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(StateVector({"a"}, std::vector<Complex>{0.0, 0.0}).normalized(),
                  ImpossibleOutcomeError);
}

#include "qfg/oracle.hpp"

#include <cmath>

#include <doctest.h>

#include "qfg/errors.hpp"
#include "test_helpers.hpp"

using namespace qfg;
using qfg::test::near;
using qfg::test::preset_path;

TEST_CASE("enumeration of the cyclic four-qubit graph matches the known posterior") {
  const FactorGraph g = load_graph(preset_path("fig2"));
  const PosteriorTable table = brute_force_posterior(g);

  CHECK(near(table.p_total, 0.204, 1e-12));
  // Codewords as x0-first strings: 0000, 0110, 1101, 1011.
  CHECK(near(table.distribution[0b0000], 216.0 / 2040.0, 1e-12));
  CHECK(near(table.distribution[0b0110], 96.0 / 2040.0, 1e-12));
  CHECK(near(table.distribution[0b1011], 864.0 / 2040.0, 1e-12));  // "1101"
  CHECK(near(table.distribution[0b1101], 864.0 / 2040.0, 1e-12));  // "1011"
  double off_code = 0.0;
  for (std::uint64_t v = 0; v < 16; ++v) {
    if (v == 0b0000 || v == 0b0110 || v == 0b1011 || v == 0b1101) continue;
    off_code += table.mass[v];
  }
  CHECK(off_code == 0.0);

  CHECK(table.ml_assignments == std::vector<std::uint64_t>{0b1011, 0b1101});
  CHECK(table.is_ml(0b1011));
  CHECK(!table.is_ml(0));
  CHECK(assignment_bits(0b1011, 4) == "1101");
  CHECK(assignment_bits(0b1101, 4) == "1011");
}

TEST_CASE("the tree example decodes to the known two-word distribution") {
  const FactorGraph g = load_graph(preset_path("fig1-alt"));
  const PosteriorTable table = brute_force_posterior(g);
  CHECK(near(table.p_total, 0.5, 1e-12));
  CHECK(near(table.distribution[0b00], 1.0 / 3.0, 1e-12));
  CHECK(near(table.distribution[0b11], 2.0 / 3.0, 1e-12));
  CHECK(table.ml_assignments == std::vector<std::uint64_t>{0b11});
}

TEST_CASE("the extended graph pins the added parity qubit to zero") {
  const FactorGraph g = load_graph(preset_path("fig3"));
  const PosteriorTable table = brute_force_posterior(g);
  CHECK(near(table.p_total, 0.102, 1e-12));
  const auto [p0, p1] = table.marginal(4);
  CHECK(near(p0, 1.0, 1e-12));
  CHECK(p1 == 0.0);
}

TEST_CASE("a contradictory graph has no posterior") {
  std::vector<VariableNode> vars{{"x0", 0.0, 1.0}, {"x1", 1.0, 0.0}};
  std::vector<FunctionNode> fns{
      {"eq", {"x0", "x1"}, xor_diag(2), complement_diag(xor_diag(2))}};
  const FactorGraph g(std::move(vars), std::move(fns), ScheduleSpec{});
  CHECK_THROWS_AS(brute_force_posterior(g), ContradictoryGraphError);
}

TEST_CASE("the oracle refuses graphs beyond its enumeration cap") {
  std::vector<VariableNode> vars;
  for (int i = 0; i < 21; ++i) {
    vars.push_back({"x" + std::to_string(i), std::sqrt(0.5), std::sqrt(0.5)});
  }
  const FactorGraph g(std::move(vars), {}, ScheduleSpec{});
  CHECK_THROWS_AS(brute_force_posterior(g), ResourceError);
}

TEST_CASE("distribution always sums to one") {
  Rng rng(77);
  for (int i = 0; i < 10; ++i) {
    const FactorGraph g = qfg::test::random_graph(rng, 6);
    const PosteriorTable table = brute_force_posterior(g);
    double sum = 0.0;
    for (double p : table.distribution) sum += p;
    CHECK(near(sum, 1.0, 1e-12));
    for (std::uint64_t ml : table.ml_assignments) {
      for (double p : table.distribution) CHECK(p <= table.distribution[ml] * (1 + 1e-9));
    }
  }
}

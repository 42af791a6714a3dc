#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = QFG_CLI_PATH;
const std::string kPresets = QFG_PRESET_DIR;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "qfg_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const std::string& extra_env = "") {
  const fs::path out = scratch_dir() / "stdout.txt";
  std::string cmd = extra_env + kCli + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string last_stdout() {
  std::ifstream in(scratch_dir() / "stdout.txt");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string preset(const std::string& name) { return kPresets + "/" + name + ".json"; }

}  // namespace

TEST_CASE("posterior emits the expected table for the cyclic preset") {
  const fs::path out = scratch_dir() / "posterior.csv";
  fs::remove(out);
  const int rc = run_cli("posterior --graph " + preset("fig2") + " --out " + out.string());
  CHECK(rc == 0);
  CHECK(last_stdout().find("p_total=0.204") != std::string::npos);
  const std::string csv = slurp(out);
  CHECK(csv.find("assignment,mass,probability,is_ml") != std::string::npos);
  CHECK(csv.find("1101,") != std::string::npos);
  CHECK(csv.find("TOTAL,0.204") != std::string::npos);
  // Four codeword rows + header + total.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("outputs are byte-identical across repeated seeded runs") {
  const fs::path a = scratch_dir() / "run_a.csv";
  const fs::path b = scratch_dir() / "run_b.csv";
  fs::remove(a);
  fs::remove(b);
  const std::string base =
      "run --graph " + preset("fig2") + " --trials 200 --seed 42 --max-ticks 25 --out ";
  CHECK(run_cli(base + a.string()) == 0);
  CHECK(run_cli(base + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));

  const fs::path sa = scratch_dir() / "sched_a.csv";
  const fs::path sb = scratch_dir() / "sched_b.csv";
  fs::remove(sa);
  fs::remove(sb);
  const std::string sched = "sched --preset chain4 --presets-dir " + kPresets +
                            " --w2 0.9 --tmax 20 --trials 3000 --seed 9 --out ";
  CHECK(run_cli(sched + sa.string()) == 0);
  CHECK(run_cli(sched + sb.string()) == 0);
  CHECK(slurp(sa) == slurp(sb));
  CHECK(slurp(sa).find("mc_p_m") != std::string::npos);
}

TEST_CASE("QFG_SEED is used when --seed is absent") {
  const fs::path a = scratch_dir() / "seed_env.csv";
  const fs::path b = scratch_dir() / "seed_flag.csv";
  fs::remove(a);
  fs::remove(b);
  CHECK(run_cli("run --graph " + preset("fig2") + " --trials 100 --out " + a.string(),
                "QFG_SEED=31 ") == 0);
  CHECK(run_cli("run --graph " + preset("fig2") + " --trials 100 --seed 31 --out " +
                b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("exit codes distinguish usage, document, and numeric failures") {
  CHECK(run_cli("") == 1);                    // no subcommand
  CHECK(run_cli("posterior") == 1);           // missing required --graph
  CHECK(run_cli("nonsense --graph x") == 1);  // unknown subcommand
  CHECK(run_cli("posterior --graph /no/such/file.json") == 2);

  const fs::path bad = scratch_dir() / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run_cli("posterior --graph " + bad.string()) == 2);

  const fs::path contradiction = scratch_dir() / "contradiction.json";
  std::ofstream(contradiction) << R"({
    "variables": [{"id": "x0", "prior": [0, 1]}, {"id": "x1", "prior": [1, 0]}],
    "functions": [{"id": "eq", "scope": ["x0", "x1"], "kind": "xor"}]
  })";
  CHECK(run_cli("posterior --graph " + contradiction.string()) == 3);

  CHECK(run_cli("--help") == 0);
}

TEST_CASE("existing outputs are not clobbered without --force") {
  const fs::path out = scratch_dir() / "precious.csv";
  std::ofstream(out) << "do not overwrite\n";
  const std::string cmd = "posterior --graph " + preset("fig1") + " --out " + out.string();
  CHECK(run_cli(cmd) == 1);
  CHECK(slurp(out) == "do not overwrite\n");
  CHECK(run_cli(cmd + " --force") == 0);
  CHECK(slurp(out).find("assignment") == 0);
}

TEST_CASE("a zero-length sched sweep yields an empty curve and exit 0") {
  const fs::path out = scratch_dir() / "empty.csv";
  fs::remove(out);
  CHECK(run_cli("sched --preset chain4 --presets-dir " + kPresets +
                " --w2 0.9 --tmax 0 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv == "t,p_e_paper,p_e_renewal,p_m_paper,p_m_renewal,P_nondist\n");
}

TEST_CASE("sched accepts the figure parameterizations") {
  CHECK(run_cli("sched --preset nine --presets-dir " + kPresets +
                " --w2 0.9 --u2 0.2,0.4 --uvars x0,x8 --tmax 5") == 0);
  CHECK(run_cli("sched --preset chain4 --presets-dir " + kPresets +
                " --w2 0.9 --u2 0 --tmax 5") == 0);
  // --uvars without --u2 is a usage error.
  CHECK(run_cli("sched --preset chain4 --presets-dir " + kPresets +
                " --w2 0.9 --uvars x0 --tmax 5") == 1);
}

TEST_CASE("every bundled preset runs its applicable subcommands") {
  const std::vector<std::string> presets{"fig1", "fig1-alt", "fig2", "fig3", "chain4",
                                         "nine"};
  for (const std::string& name : presets) {
    CAPTURE(name);
    CHECK(run_cli("posterior --graph " + preset(name)) == 0);
    CHECK(run_cli("spa --graph " + preset(name)) == 0);
    CHECK(run_cli("run --graph " + preset(name) + " --trials 20 --seed 1") == 0);
    CHECK(run_cli("amplify-state --graph " + preset(name) +
                  " --k 1 --trials 50 --seed 1") == 0);
    CHECK(run_cli("decode --graph " + preset(name) +
                  " --amplify-k 1 --trials 50 --seed 1") == 0);
  }
  for (const std::string& name : {std::string("chain4"), std::string("nine")}) {
    CHECK(run_cli("sched --preset " + name + " --presets-dir " + kPresets +
                  " --w2 0.9 --tmax 10") == 0);
  }
  CHECK(run_cli("amplify --alpha2 0.62 --k 3") == 0);
  CHECK(run_cli("amplify --alpha2 0.5 --k 5") == 0);
}

TEST_CASE("decode reports an end-to-end success rate and codeword counts") {
  const fs::path out = scratch_dir() / "decode.csv";
  fs::remove(out);
  CHECK(run_cli("decode --graph " + preset("fig1-alt") +
                " --amplify-k 1 --trials 2000 --seed 5 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("codeword,frequency") != std::string::npos);
  CHECK(csv.find("TOTAL,") != std::string::npos);
  CHECK(last_stdout().find("successes=") != std::string::npos);
}

TEST_CASE("amplify CSV carries the gamma anchor value") {
  const fs::path out = scratch_dir() / "amplify.csv";
  fs::remove(out);
  CHECK(run_cli("amplify --alpha2 0.62 --k 3 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("k,gamma_k,p_Mk,p_ak,expected_copies") == 0);
  CHECK(csv.find("\n3,0.02226878977233") != std::string::npos);
}

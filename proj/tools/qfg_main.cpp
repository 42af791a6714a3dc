// qfg: experiment driver for the quantum product algorithm toolkit.
//
// Subcommands load a JSON graph document (or a bundled preset), run the
// engines, print a one-line summary to stdout, and optionally write a CSV
// artifact. All sampled output is reproducible from --seed (or QFG_SEED).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csv.hpp"
#include "qfg/amplify.hpp"
#include "qfg/errors.hpp"
#include "qfg/factor_graph.hpp"
#include "qfg/oracle.hpp"
#include "qfg/qpa_engine.hpp"
#include "qfg/rng.hpp"
#include "qfg/sched_analysis.hpp"
#include "qfg/spa_engine.hpp"
#include "qfg/state_vector.hpp"

namespace {

using namespace qfg;
using cli::csv_double;
using cli::csv_int;
using cli::CsvFile;

struct OutputOpts {
  std::string path;
  bool force = false;
  bool wanted() const { return !path.empty(); }
};

void add_output_opts(CLI::App* cmd, OutputOpts& out) {
  cmd->add_option("--out", out.path, "CSV output path");
  cmd->add_flag("--force", out.force, "overwrite an existing output file");
}

FactorGraph load_graph_arg(const std::string& path) { return load_graph(path); }

std::string ml_set_string(const PosteriorTable& table) {
  std::string s = "{";
  for (std::size_t i = 0; i < table.ml_assignments.size(); ++i) {
    if (i) s += ",";
    s += assignment_bits(table.ml_assignments[i], table.num_variables);
  }
  return s + "}";
}

int cmd_posterior(const std::string& graph_path, const OutputOpts& out) {
  const FactorGraph graph = load_graph_arg(graph_path);
  const PosteriorTable table = brute_force_posterior(graph);

  std::size_t support = 0;
  for (double m : table.mass) support += m > 0.0 ? 1 : 0;

  if (out.wanted()) {
    CsvFile csv(out.path, out.force, "assignment,mass,probability,is_ml");
    for (std::uint64_t v = 0; v < table.mass.size(); ++v) {
      if (table.mass[v] <= 0.0) continue;
      csv.row({assignment_bits(v, table.num_variables), csv_double(table.mass[v]),
               csv_double(table.distribution[v]), table.is_ml(v) ? "1" : "0"});
    }
    csv.row({"TOTAL", csv_double(table.p_total), csv_double(1.0), ""});
  }
  std::cout << "posterior: p_total=" << csv_double(table.p_total)
            << " support=" << support << " ml=" << ml_set_string(table) << "\n";
  return 0;
}

int cmd_spa(const std::string& graph_path, int max_iters, double tol,
            const OutputOpts& out) {
  const FactorGraph graph = load_graph_arg(graph_path);
  const BeliefState beliefs = run_spa(graph, max_iters, tol);

  if (out.wanted()) {
    CsvFile csv(out.path, out.force, "variable,p0,p1");
    for (std::size_t i = 0; i < graph.variables().size(); ++i) {
      csv.row({graph.variables()[i].id, csv_double(beliefs.beliefs[i][0]),
               csv_double(beliefs.beliefs[i][1])});
    }
    csv.row({"converged", beliefs.converged ? "1" : "0", csv_int(beliefs.iterations)});
  }
  std::cout << "spa: converged=" << (beliefs.converged ? 1 : 0)
            << " iterations=" << beliefs.iterations
            << " residual=" << csv_double(beliefs.residual)
            << " decision=" << hard_decision(beliefs) << "\n";
  return 0;
}

int cmd_run(const std::string& graph_path, int trials, std::uint64_t seed, int max_ticks,
            const OutputOpts& out) {
  const FactorGraph graph = load_graph_arg(graph_path);

  std::optional<CsvFile> csv;
  if (out.wanted()) csv.emplace(out.path, out.force, "trial,completed,ticks");

  const RunOptions options{max_ticks, false};
  long long completed = 0;
  long long completed_ticks = 0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(trial));
    RunReport report = run_schedule_sampled(graph, rng, options);
    if (report.completed) {
      ++completed;
      completed_ticks += report.completion_tick;
    }
    if (csv) {
      csv->row({csv_int(trial), report.completed ? "1" : "0",
                csv_int(report.completed ? report.completion_tick : report.total_ticks)});
    }
  }
  const double mean_ticks =
      completed > 0 ? static_cast<double>(completed_ticks) / completed : 0.0;
  if (csv) csv->row({"TOTAL", csv_int(completed), csv_double(mean_ticks)});
  std::cout << "run: trials=" << trials << " completed=" << completed
            << " rate=" << csv_double(trials > 0 ? double(completed) / trials : 0.0)
            << " mean_ticks=" << csv_double(mean_ticks) << "\n";
  return 0;
}

int cmd_amplify(double alpha2, int k_max, const OutputOpts& out) {
  const AmplificationProfile profile = gamma_profile(alpha2, k_max);

  std::optional<CsvFile> csv;
  if (out.wanted()) {
    csv.emplace(out.path, out.force, "k,gamma_k,p_Mk,p_ak,expected_copies");
  }
  double copies = 1.0;
  for (const AmplificationStep& step : profile.steps) {
    if (csv) {
      csv->row({csv_int(step.k), csv_double(step.gamma), csv_double(step.p_ml),
                csv_double(step.p_a), csv_double(copies)});
    }
    copies *= 2.0 / step.p_a;
  }
  const AmplificationStep& last = profile.steps.back();
  std::cout << "amplify: alpha2=" << csv_double(alpha2) << " k=" << last.k
            << " gamma=" << csv_double(last.gamma) << " p_ml=" << csv_double(last.p_ml)
            << "\n";
  return 0;
}

int cmd_amplify_state(const std::string& graph_path, int k_max, int trials,
                      std::uint64_t seed, const OutputOpts& out) {
  const FactorGraph graph = load_graph_arg(graph_path);
  const auto [p_total, posterior] = exact_posterior(graph);
  const PosteriorTable oracle = brute_force_posterior(graph);

  // Level states and per-level step probabilities are deterministic; the
  // Monte Carlo only decides how far each trial survives.
  std::vector<StateVector> levels{posterior};
  std::vector<double> step_prob;  // step_prob[j]: level j -> j+1
  for (int j = 0; j < k_max; ++j) {
    AmplifyStepResult step = amplify_step(levels.back());
    step_prob.push_back(step.p_a);
    levels.push_back(std::move(step.amplified));
  }

  std::vector<QubitId> targets;
  for (const VariableNode& v : graph.variables()) targets.push_back(v.id);

  std::vector<long long> reached(k_max + 1, 0);
  std::vector<long long> ml_hits(k_max + 1, 0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(trial));
    int level = 0;
    for (int j = 0; j < k_max; ++j) {
      if (!bernoulli(rng, step_prob[j])) break;
      level = j + 1;
    }
    for (int k = 0; k <= level; ++k) {
      ++reached[k];
      MeasurementResult m = measure_sample(levels[k], targets, rng);
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < m.outcome.size(); ++i) {
        bits |= static_cast<std::uint64_t>(m.outcome[i]) << i;
      }
      if (oracle.is_ml(bits)) ++ml_hits[k];
    }
  }

  std::optional<CsvFile> csv;
  if (out.wanted()) {
    csv.emplace(out.path, out.force,
                "k,empirical_success,analytic_success,ml_read_frequency");
  }
  double analytic = 1.0;
  double last_emp = 1.0, last_ml = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) analytic *= step_prob[k - 1];
    const double emp = trials > 0 ? double(reached[k]) / trials : 0.0;
    const double ml = reached[k] > 0 ? double(ml_hits[k]) / reached[k] : 0.0;
    if (csv) {
      csv->row({csv_int(k), csv_double(emp), csv_double(analytic), csv_double(ml)});
    }
    last_emp = emp;
    last_ml = ml;
  }
  std::cout << "amplify-state: k=" << k_max << " empirical=" << csv_double(last_emp)
            << " analytic=" << csv_double(analytic) << " ml_read=" << csv_double(last_ml)
            << "\n";
  return 0;
}

struct SchedArgs {
  std::string preset;
  std::string graph_path;
  std::string presets_dir;
  double w2 = -1.0;
  std::vector<double> u2;
  std::vector<std::string> uvars;
  int t_max = 50;
  int trials = 0;
  std::uint64_t seed = 0;
};

FactorGraph sched_graph(const SchedArgs& args) {
  std::filesystem::path path;
  if (!args.preset.empty()) {
    std::filesystem::path dir = args.presets_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("QFG_PRESETS_DIR")) {
        dir = env;
      } else {
        dir = "presets";
      }
    }
    path = dir / (args.preset + ".json");
  } else {
    path = args.graph_path;
  }
  FactorGraph base = load_graph(path);
  if (args.w2 < 0.0 && args.uvars.empty()) return base;

  std::vector<VariableNode> variables = base.variables();
  if (args.w2 >= 0.0) {
    for (VariableNode& v : variables) {
      v.alpha = Complex{std::sqrt(args.w2), 0.0};
      v.beta = Complex{std::sqrt(1.0 - args.w2), 0.0};
    }
  }
  for (std::size_t i = 0; i < args.uvars.size(); ++i) {
    const double u2 = args.u2[std::min(i, args.u2.size() - 1)];
    const int idx = base.variable_index(args.uvars[i]);
    variables[idx].alpha = Complex{std::sqrt(u2), 0.0};
    variables[idx].beta = Complex{std::sqrt(1.0 - u2), 0.0};
  }
  return FactorGraph(std::move(variables), base.functions(), base.schedule());
}

int cmd_sched(const SchedArgs& args, const OutputOpts& out) {
  const FactorGraph graph = sched_graph(args);
  const TwoPhaseSpec spec = spec_from_graph(graph);
  const CompletionCurve curve = completion_curve(spec, args.t_max);

  EmpiricalCurve mc;
  const bool with_mc = args.trials > 0;
  if (with_mc && args.t_max > 0) {
    mc = monte_carlo_completion(graph, args.t_max, args.trials, args.seed);
  }

  if (out.wanted()) {
    std::string header = "t,p_e_paper,p_e_renewal,p_m_paper,p_m_renewal,P_nondist";
    if (with_mc) header += ",mc_p_m,mc_stderr";
    CsvFile csv(out.path, out.force, header);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const CompletionPoint& pt = curve.points[i];
      std::vector<std::string> row{csv_int(pt.t),           csv_double(pt.p_e_paper),
                                   csv_double(pt.p_e_renewal), csv_double(pt.p_m_paper),
                                   csv_double(pt.p_m_renewal), csv_double(pt.p_nondist)};
      if (with_mc) {
        row.push_back(csv_double(mc.points[i].p_m));
        row.push_back(csv_double(mc.points[i].stderr_m));
      }
      csv.row(row);
    }
  }

  std::ostringstream probs;
  for (std::size_t i = 0; i < spec.parallel_probs.size(); ++i) {
    probs << (i ? "," : "") << csv_double(spec.parallel_probs[i]);
  }
  std::cout << "sched: nodes=" << spec.parallel_probs.size() << " p=[" << probs.str()
            << "] p_close=" << csv_double(spec.final_conditional)
            << " joint=" << csv_double(spec.joint_prob) << " tmax=" << args.t_max;
  if (with_mc) std::cout << " trials=" << args.trials;
  std::cout << "\n";
  return 0;
}

int cmd_decode(const std::string& graph_path, int amplify_k, int trials,
               std::uint64_t seed, const OutputOpts& out) {
  const FactorGraph graph = load_graph_arg(graph_path);

  std::vector<QubitId> targets;
  for (const VariableNode& v : graph.variables()) targets.push_back(v.id);
  const std::vector<std::string> order = graph.activation_order();

  std::map<std::string, long long> counts;
  long long successes = 0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(trial));

    // Stage 1: a-priori initialisation, one shot per qubit.
    bool ok = true;
    for (const VariableNode& v : graph.variables()) {
      if (!init_variable_qpa(v.id, v.alpha, v.beta, rng).success) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    // Stage 2: entangle, one activation per function in schedule order.
    EntanglementRegistry reg(graph);
    for (const std::string& fid : order) {
      if (!reg.activate(fid, ActivationMode::kSample, &rng).success) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    // Stage 3: amplify the joint state k times, one shot per level.
    StateVector state;
    for (const VariableNode& v : graph.variables()) {
      if (state.has_qubit(v.id)) continue;
      state = tensor_product(state, reg.block_of(v.id));
    }
    for (int j = 0; j < amplify_k && ok; ++j) {
      AmplifyStepResult step = amplify_step(state);
      if (!bernoulli(rng, step.p_a)) {
        ok = false;
        break;
      }
      state = std::move(step.amplified);
    }
    if (!ok) continue;

    // Stage 4: measure everything.
    MeasurementResult m = measure_sample(state, targets, rng);
    std::string bits(m.outcome.size(), '0');
    for (std::size_t i = 0; i < m.outcome.size(); ++i) {
      if (m.outcome[i]) bits[i] = '1';
    }
    ++successes;
    ++counts[bits];
  }

  const double rate = trials > 0 ? double(successes) / trials : 0.0;
  if (out.wanted()) {
    CsvFile csv(out.path, out.force, "codeword,frequency");
    for (const auto& [bits, count] : counts) {
      csv.row({bits, csv_double(successes > 0 ? double(count) / successes : 0.0)});
    }
    csv.row({"TOTAL", csv_double(rate)});
  }
  std::string top = "-";
  long long top_count = -1;
  for (const auto& [bits, count] : counts) {
    if (count > top_count) {
      top = bits;
      top_count = count;
    }
  }
  std::cout << "decode: trials=" << trials << " successes=" << successes
            << " rate=" << csv_double(rate) << " top=" << top << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum product algorithm simulator and analysis toolkit"};
  app.require_subcommand(1);

  // posterior
  std::string posterior_graph;
  OutputOpts posterior_out;
  CLI::App* posterior = app.add_subcommand("posterior", "exact posterior table");
  posterior->add_option("--graph", posterior_graph, "graph document")->required();
  add_output_opts(posterior, posterior_out);

  // spa
  std::string spa_graph;
  int spa_iters = 200;
  double spa_tol = 1e-9;
  OutputOpts spa_out;
  CLI::App* spa = app.add_subcommand("spa", "classical sum-product beliefs");
  spa->add_option("--graph", spa_graph, "graph document")->required();
  spa->add_option("--max-iters", spa_iters, "iteration cap")->check(CLI::PositiveNumber);
  spa->add_option("--tol", spa_tol, "convergence tolerance");
  add_output_opts(spa, spa_out);

  // run
  std::string run_graph;
  int run_trials = 1;
  int run_max_ticks = 1000;
  std::uint64_t run_seed = 0;
  OutputOpts run_out;
  CLI::App* run = app.add_subcommand("run", "sampled schedule execution");
  run->add_option("--graph", run_graph, "graph document")->required();
  run->add_option("--trials", run_trials, "trial count")
      ->required()
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", run_seed, "master seed")->envname("QFG_SEED");
  run->add_option("--max-ticks", run_max_ticks, "tick budget per trial")
      ->check(CLI::PositiveNumber);
  add_output_opts(run, run_out);

  // amplify
  double amp_alpha2 = 0.5;
  int amp_k = 0;
  OutputOpts amp_out;
  CLI::App* amp = app.add_subcommand("amplify", "analytic amplification curves");
  amp->add_option("--alpha2", amp_alpha2, "base probability alpha^2")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  amp->add_option("--k", amp_k, "amplification levels")
      ->required()
      ->check(CLI::Range(0, 60));
  add_output_opts(amp, amp_out);

  // amplify-state
  std::string amps_graph;
  int amps_k = 1;
  int amps_trials = 1;
  std::uint64_t amps_seed = 0;
  OutputOpts amps_out;
  CLI::App* amps = app.add_subcommand("amplify-state",
                                      "operational amplification of the posterior");
  amps->add_option("--graph", amps_graph, "graph document")->required();
  amps->add_option("--k", amps_k, "amplification levels")
      ->required()
      ->check(CLI::Range(0, 60));
  amps->add_option("--trials", amps_trials, "trial count")
      ->required()
      ->check(CLI::PositiveNumber);
  amps->add_option("--seed", amps_seed, "master seed")->envname("QFG_SEED");
  add_output_opts(amps, amps_out);

  // sched
  SchedArgs sched_args;
  OutputOpts sched_out;
  CLI::App* sched = app.add_subcommand("sched", "two-phase completion curves");
  CLI::Option* preset_opt =
      sched->add_option("--preset", sched_args.preset, "bundled preset")
          ->check(CLI::IsMember({"chain4", "nine"}));
  sched->add_option("--graph", sched_args.graph_path, "phased graph document")
      ->excludes(preset_opt);
  sched->add_option("--presets-dir", sched_args.presets_dir,
                    "preset directory (default: $QFG_PRESETS_DIR or ./presets)");
  sched->add_option("--w2", sched_args.w2, "prior P(0) for every variable")
      ->check(CLI::Range(0.0, 1.0));
  sched->add_option("--u2", sched_args.u2, "override priors for --uvars")
      ->delimiter(',');
  sched->add_option("--uvars", sched_args.uvars, "variables taking the --u2 priors")
      ->delimiter(',');
  sched->add_option("--tmax", sched_args.t_max, "curve length")
      ->required()
      ->check(CLI::Range(0, 200));
  sched->add_option("--trials", sched_args.trials, "Monte Carlo trials (0 = closed form only)")
      ->check(CLI::NonNegativeNumber);
  sched->add_option("--seed", sched_args.seed, "master seed")->envname("QFG_SEED");
  add_output_opts(sched, sched_out);

  // decode
  std::string dec_graph;
  int dec_k = 0;
  int dec_trials = 1;
  std::uint64_t dec_seed = 0;
  OutputOpts dec_out;
  CLI::App* dec = app.add_subcommand("decode", "init -> entangle -> amplify -> measure");
  dec->add_option("--graph", dec_graph, "graph document")->required();
  dec->add_option("--amplify-k", dec_k, "amplification levels")->check(CLI::Range(0, 60));
  dec->add_option("--trials", dec_trials, "trial count")
      ->required()
      ->check(CLI::PositiveNumber);
  dec->add_option("--seed", dec_seed, "master seed")->envname("QFG_SEED");
  add_output_opts(dec, dec_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  try {
    if (*posterior) return cmd_posterior(posterior_graph, posterior_out);
    if (*spa) return cmd_spa(spa_graph, spa_iters, spa_tol, spa_out);
    if (*run) return cmd_run(run_graph, run_trials, run_seed, run_max_ticks, run_out);
    if (*amp) return cmd_amplify(amp_alpha2, amp_k, amp_out);
    if (*amps) {
      return cmd_amplify_state(amps_graph, amps_k, amps_trials, amps_seed, amps_out);
    }
    if (*sched) {
      if (sched_args.preset.empty() && sched_args.graph_path.empty()) {
        std::cerr << "sched: give --preset or --graph\n";
        return 1;
      }
      if (!sched_args.uvars.empty() && sched_args.u2.empty()) {
        std::cerr << "sched: --uvars requires --u2\n";
        return 1;
      }
      if (sched_args.uvars.empty() && !sched_args.u2.empty()) {
        sched_args.uvars = {"x0"};
      }
      return cmd_sched(sched_args, sched_out);
    }
    if (*dec) return cmd_decode(dec_graph, dec_k, dec_trials, dec_seed, dec_out);
  } catch (const cli::OutputExistsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

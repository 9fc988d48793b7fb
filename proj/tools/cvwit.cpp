// Command-line front end: state generation, single-state witness evaluation,
// structure certification, declarative experiment sweeps, and report
// extraction from persisted run records.
#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "cvwit/criteria.hpp"
#include "cvwit/harness.hpp"
#include "cvwit/io.hpp"
#include "cvwit/stategen.hpp"
#include "cvwit/witness.hpp"

using namespace cvwit;

namespace {

int cmd_gen(int n, int d, const std::string& structure_text, int rank,
            std::uint64_t seed, double eta, bool spdc,
            const std::vector<double>& chi, const std::string& out) {
  const ModeRegister reg(n, d == 0 ? default_cutoff(n) : d);
  DensityMatrix dm;
  if (spdc) {
    if (reg.num_modes != 3)
      throw ConfigError("--spdc requires exactly 3 modes");
    SpdcSpec spec;
    if (!chi.empty()) {
      if (chi.size() != 3) throw ConfigError("--chi takes three couplings");
      std::copy(chi.begin(), chi.end(), spec.chi_t.begin());
    } else {
      Rng rng(seed);
      spec = draw_spdc_spec(rng);
    }
    dm = density_from_pure(spdc_state(spec, reg), reg);
  } else {
    const Partition structure = structure_text.empty()
                                    ? Partition::single_block(n)
                                    : Partition::parse(structure_text);
    std::optional<LossSpec> loss;
    if (eta < 1.0) loss = LossSpec::uniform(n, eta);
    dm = random_structured_state(reg, structure, rank, loss, seed);
  }
  save_density(dm, out);
  std::cout << "wrote " << out << " (N=" << reg.num_modes
            << ", d=" << reg.cutoff << ", pure=" << (dm.pure ? "yes" : "no")
            << ")\n";
  return 0;
}

int cmd_witness(const std::string& in, int order,
                const std::string& partition_text) {
  const DensityMatrix dm = load_density(in);
  const Partition k = Partition::parse(partition_text);
  const auto set = build_observable_set(dm.reg, order);
  const StatePipeline pipe(dm, set);
  const RealMatrix m = pipe.witness(k);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  const long top = es.eigenvalues().size() - 1;
  const RealVector c = es.eigenvectors().col(top);

  nlohmann::json j;
  j["partition"] = k.to_string();
  j["order"] = order;
  j["lambda_max"] = es.eigenvalues()(top);
  j["threshold"] = tol::certification_rel * pipe.qfi_spectral_norm();
  j["inseparable"] =
      es.eigenvalues()(top) > tol::certification_rel * pipe.qfi_spectral_norm();
  const auto labels = coefficient_labels(set);
  nlohmann::json coeffs = nlohmann::json::object();
  for (long i = 0; i < c.size(); ++i) coeffs[labels[i]] = c(i);
  j["c_top"] = std::move(coeffs);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_structure(const std::string& in, const std::string& structure_text,
                  std::vector<int> orders, bool with_van_loock) {
  const DensityMatrix dm = load_density(in);
  const Partition structure = structure_text.empty()
                                  ? Partition::single_block(dm.reg.num_modes)
                                  : Partition::parse(structure_text);
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());

  nlohmann::json out;
  out["input"] = in;
  nlohmann::json per_order = nlohmann::json::object();
  WitnessOptions opts;
  RealVector prev_c;
  int prev_order = 0;
  for (int k : orders) {
    const auto set = build_observable_set(dm.reg, k);
    RealVector warm;
    if (prev_order > 0) {
      warm = pad_coefficients(prev_c, prev_order, k, dm.reg.num_modes);
      opts.warm_start = &warm;
    }
    const auto cert = certify_structure(dm, set, structure, opts);
    per_order["order" + std::to_string(k)] = certificate_to_json(cert, set);
    if (cert.has_candidate()) {
      prev_c = cert.c_opt;
      prev_order = k;
    }
  }
  out["certificates"] = std::move(per_order);
  if (with_van_loock) {
    const auto vl = van_loock_V(dm);
    out["van_loock"] = {{"v", vl.v},
                        {"u_variance", vl.u_variance},
                        {"v_variance", vl.v_variance}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path,
              const std::optional<std::uint64_t>& seed,
              const std::optional<std::string>& out,
              const std::optional<int>& samples) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  if (seed) cfg.seed = *seed;
  if (out) cfg.out = *out;
  if (samples) cfg.sample_count = *samples;
  cfg.validate();

  const RunResult result = run_experiment(cfg);
  std::cerr << "records: " << result.records_path
            << "\nsummary: " << result.summary_path << "\n";
  for (const auto& row : result.summary.rows)
    std::cerr << row.cell << " " << row.criterion << ": " << row.detections
              << "/" << row.samples << " (rate " << row.rate << " +- "
              << row.std10 << ")\n";
  if (result.degenerate_states > cfg.degenerate_budget) {
    std::cerr << "degenerate states: " << result.degenerate_states
              << " (budget " << cfg.degenerate_budget << ")\n";
    return 3;
  }
  return 0;
}

int cmd_report(const std::string& in, const std::string& out_prefix) {
  const ReportResult result = report_records(in, out_prefix);
  std::cerr << "records: " << result.records << ", corrupt lines skipped: "
            << result.skipped << "\n"
            << "rates:   " << result.rates_path << "\n"
            << "scatter: " << result.scatter_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QFI-based entanglement-structure witnesses on truncated Fock "
               "spaces"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a state and save it (CVDM)");
  int gen_n = 3, gen_d = 0, gen_rank = 2;
  std::uint64_t gen_seed = 12345;
  double gen_eta = 1.0;
  bool gen_spdc = false;
  std::string gen_structure, gen_out;
  std::vector<double> gen_chi;
  gen->add_option("--N", gen_n, "Number of modes")->check(CLI::Range(2, 8));
  gen->add_option("--d", gen_d, "Fock cutoff (0 = default for N)");
  gen->add_option("--structure", gen_structure,
                  "Structure partition, e.g. [[0,1],[2]] (default one block)");
  gen->add_option("--rank", gen_rank, "Stellar rank of the core states")
      ->check(CLI::Range(0, 2));
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--eta", gen_eta, "Uniform loss efficiency in (0,1]")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_flag("--spdc", gen_spdc, "Three-mode SPDC state instead");
  gen->add_option("--chi", gen_chi, "SPDC couplings (three values)")
      ->expected(3);
  gen->add_option("--out", gen_out, "Output path")->required();

  // witness
  auto* witness = app.add_subcommand(
      "witness", "Witness matrix of one partition: top eigenvalue/direction");
  std::string wit_in, wit_partition;
  int wit_order = 2;
  witness->add_option("--in", wit_in, "CVDM state file")->required();
  witness->add_option("--order", wit_order, "Observable order")
      ->check(CLI::Range(1, 4));
  witness->add_option("--partition", wit_partition, "Partition K")->required();

  // structure
  auto* structure = app.add_subcommand(
      "structure", "Full certification pipeline for one state");
  std::string str_in, str_structure;
  std::vector<int> str_orders = {1, 2};
  bool str_vl = false;
  structure->add_option("--in", str_in, "CVDM state file")->required();
  structure->add_option("--structure", str_structure,
                        "Hypothesized structure (default one block)");
  structure->add_option("--orders", str_orders, "Observable orders");
  structure->add_flag("--van-loock", str_vl, "Also report the van Loock V");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a declarative experiment");
  std::string sweep_config;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<std::string> sweep_out;
  std::optional<int> sweep_samples;
  sweep->add_option("--config", sweep_config, "Experiment JSON config")
      ->required();
  sweep->add_option("--seed", sweep_seed, "Override config seed");
  sweep->add_option("--out", sweep_out, "Override output prefix");
  sweep->add_option("--samples", sweep_samples, "Override sample count");

  // report
  auto* report = app.add_subcommand(
      "report", "Rate and scatter CSVs from persisted run records");
  std::string rep_in, rep_out = "report";
  report->add_option("--in", rep_in, "JSONL records file")->required();
  report->add_option("--out", rep_out, "Output prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return cmd_gen(gen_n, gen_d, gen_structure, gen_rank, gen_seed, gen_eta,
                     gen_spdc, gen_chi, gen_out);
    if (*witness) return cmd_witness(wit_in, wit_order, wit_partition);
    if (*structure)
      return cmd_structure(str_in, str_structure, str_orders, str_vl);
    if (*sweep) return cmd_sweep(sweep_config, sweep_seed, sweep_out,
                                 sweep_samples);
    if (*report) return cmd_report(rep_in, rep_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

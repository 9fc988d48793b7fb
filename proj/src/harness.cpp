#include "cvwit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "cvwit/criteria.hpp"
#include "cvwit/rng.hpp"
#include "cvwit/stategen.hpp"

namespace cvwit {

namespace {

constexpr const char* kRecordSchema = "cvwit-run/1";

double now_ms() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clk::now().time_since_epoch())
      .count();
}

// Sample standard deviation of the per-batch rates over 10 consecutive
// splits (batches that would be empty for n < 10 are dropped).
double ten_split_std(const std::vector<bool>& flags) {
  const int n = static_cast<int>(flags.size());
  if (n < 2) return 0.0;
  std::vector<double> rates;
  int start = 0;
  for (int b = 0; b < 10; ++b) {
    const int len = n / 10 + (b < n % 10 ? 1 : 0);
    if (len == 0) continue;
    int hits = 0;
    for (int i = start; i < start + len; ++i) hits += flags[i] ? 1 : 0;
    rates.push_back(double(hits) / len);
    start += len;
  }
  if (rates.size() < 2) return 0.0;
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= double(rates.size());
  double acc = 0.0;
  for (double r : rates) acc += (r - mean) * (r - mean);
  return std::sqrt(acc / double(rates.size() - 1));
}

struct Cell {
  int id = 0;
  std::string label;
  Partition structure;
  std::optional<double> eta;
  bool spdc = false;
};

std::vector<Cell> build_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  auto add = [&](std::string label, Partition s, std::optional<double> eta,
                 bool spdc) {
    cells.push_back(Cell{static_cast<int>(cells.size()), std::move(label),
                         std::move(s), eta, spdc});
  };

  switch (cfg.experiment) {
    case ExperimentKind::structure_scan: {
      auto structures = cfg.structures.empty()
                            ? default_structures(cfg.num_modes)
                            : cfg.structures;
      for (auto& s : structures) {
        std::string label = "structure=" + s.to_string();
        add(std::move(label), std::move(s), std::nullopt, false);
      }
      break;
    }
    case ExperimentKind::full_insep_scan:
    case ExperimentKind::baseline_compare: {
      Partition s = cfg.structures.empty() ? Partition::single_block(cfg.num_modes)
                                           : cfg.structures.front();
      std::string label = "structure=" + s.to_string();
      add(std::move(label), std::move(s), std::nullopt, false);
      break;
    }
    case ExperimentKind::loss_sweep: {
      Partition s = cfg.structures.empty() ? Partition::single_block(cfg.num_modes)
                                           : cfg.structures.front();
      for (double eta : cfg.loss_grid) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "eta=%g", eta);
        add(buf, s, eta, false);
      }
      break;
    }
    case ExperimentKind::spdc_scan:
      add("spdc", Partition::single_block(3), std::nullopt, true);
      break;
  }
  return cells;
}

nlohmann::json cert_to_record(const StructureCertificate& cert) {
  nlohmann::json j;
  j["g"] = cert.has_candidate() ? nlohmann::json(cert.g) : nlohmann::json();
  j["certified"] = cert.certified();
  j["threshold"] = cert.threshold;
  j["status"] = cert.status;
  j["intersection_dim"] = cert.intersection_dim;
  j["full_space_fallback"] = cert.full_space_fallback;
  j["per_target"] = cert.per_target;
  return j;
}

}  // namespace

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "structure_scan") return ExperimentKind::structure_scan;
  if (name == "full_insep_scan") return ExperimentKind::full_insep_scan;
  if (name == "loss_sweep") return ExperimentKind::loss_sweep;
  if (name == "spdc_scan") return ExperimentKind::spdc_scan;
  if (name == "baseline_compare") return ExperimentKind::baseline_compare;
  throw ConfigError("unknown experiment: " + name);
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::structure_scan: return "structure_scan";
    case ExperimentKind::full_insep_scan: return "full_insep_scan";
    case ExperimentKind::loss_sweep: return "loss_sweep";
    case ExperimentKind::spdc_scan: return "spdc_scan";
    case ExperimentKind::baseline_compare: return "baseline_compare";
  }
  throw ConfigError("invalid experiment kind");
}

std::vector<Partition> default_structures(int num_modes) {
  // Integer partitions of num_modes in descending lexicographic order,
  // skipping the all-ones class (no internally entangled block to certify).
  std::vector<Partition> out;
  std::vector<int> sizes;
  auto recurse = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      if (sizes.front() >= 2) {
        std::vector<std::vector<int>> blocks;
        int next = 0;
        for (int s : sizes) {
          std::vector<int> block(s);
          for (int i = 0; i < s; ++i) block[i] = next++;
          blocks.push_back(std::move(block));
        }
        out.push_back(Partition::from_blocks(std::move(blocks)));
      }
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      sizes.push_back(part);
      self(self, remaining - part, part);
      sizes.pop_back();
    }
  };
  recurse(recurse, num_modes, num_modes);
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "experiment", "num_modes", "N", "cutoff", "d", "stellar_rank",
      "orders", "structures", "sample_count", "samples", "seed",
      "loss_grid", "chi_max", "out", "max_resamples", "cert_rel",
      "van_loock", "degenerate_budget"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);

  ExperimentConfig cfg;
  try {
    cfg.experiment =
        experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("num_modes")) cfg.num_modes = j["num_modes"].get<int>();
    if (j.contains("N")) cfg.num_modes = j["N"].get<int>();
    if (j.contains("cutoff")) cfg.cutoff = j["cutoff"].get<int>();
    if (j.contains("d")) cfg.cutoff = j["d"].get<int>();
    if (j.contains("stellar_rank"))
      cfg.stellar_rank = j["stellar_rank"].get<int>();
    if (j.contains("orders")) cfg.orders = j["orders"].get<std::vector<int>>();
    if (j.contains("structures")) {
      cfg.structures.clear();
      for (const auto& s : j["structures"]) {
        if (s.is_string())
          cfg.structures.push_back(Partition::parse(s.get<std::string>()));
        else
          cfg.structures.push_back(
              Partition::from_blocks(s.get<std::vector<std::vector<int>>>()));
      }
    }
    if (j.contains("sample_count"))
      cfg.sample_count = j["sample_count"].get<int>();
    if (j.contains("samples")) cfg.sample_count = j["samples"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("loss_grid"))
      cfg.loss_grid = j["loss_grid"].get<std::vector<double>>();
    if (j.contains("chi_max")) cfg.chi_max = j["chi_max"].get<double>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("max_resamples"))
      cfg.max_resamples = j["max_resamples"].get<int>();
    if (j.contains("cert_rel")) cfg.cert_rel = j["cert_rel"].get<double>();
    if (j.contains("van_loock")) cfg.van_loock = j["van_loock"].get<bool>();
    if (j.contains("degenerate_budget"))
      cfg.degenerate_budget = j["degenerate_budget"].get<int>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = cvwit::to_string(experiment);
  j["num_modes"] = num_modes;
  j["cutoff"] = cutoff;
  j["stellar_rank"] = stellar_rank;
  j["orders"] = orders;
  nlohmann::json structs = nlohmann::json::array();
  for (const auto& s : structures) structs.push_back(s.to_string());
  j["structures"] = std::move(structs);
  j["sample_count"] = sample_count;
  j["seed"] = seed;
  j["loss_grid"] = loss_grid;
  j["chi_max"] = chi_max;
  j["out"] = out;
  j["max_resamples"] = max_resamples;
  j["cert_rel"] = cert_rel;
  j["van_loock"] = van_loock;
  j["degenerate_budget"] = degenerate_budget;
  return j;
}

std::string ExperimentConfig::hash() const {
  const std::string dump = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  if (num_modes < 2 || num_modes > 8)
    throw ConfigError("num_modes must be in 2..8");
  const int d = cutoff == 0 ? default_cutoff(num_modes) : cutoff;
  if (d < 2 || std::pow(double(d), num_modes) > 2e5)
    throw ConfigError("cutoff out of range (d^N too large)");
  if (stellar_rank < 0 || stellar_rank > 2)
    throw ConfigError("stellar_rank must be 0, 1 or 2");
  if (orders.empty()) throw ConfigError("orders must be nonempty");
  for (int k : orders)
    if (k < 1 || k > 4) throw ConfigError("orders must lie in 1..4");
  if (sample_count < 0) throw ConfigError("sample_count must be >= 0");
  if (max_resamples < 0) throw ConfigError("max_resamples must be >= 0");
  if (cert_rel <= 0.0) throw ConfigError("cert_rel must be positive");
  if (degenerate_budget < 0)
    throw ConfigError("degenerate_budget must be >= 0");
  for (const auto& s : structures)
    if (s.num_modes() != num_modes)
      throw ConfigError("structure " + s.to_string() +
                        " does not match num_modes");
  if (experiment == ExperimentKind::loss_sweep) {
    if (loss_grid.empty())
      throw ConfigError("loss_sweep requires a nonempty loss_grid");
    for (double eta : loss_grid)
      if (eta <= 0.0 || eta > 1.0)
        throw ConfigError("loss_grid entries must lie in (0, 1]");
  }
  if (experiment == ExperimentKind::spdc_scan) {
    if (num_modes != 3) throw ConfigError("spdc_scan requires num_modes = 3");
    if (chi_max <= 0.0 || chi_max > 0.04)
      throw ConfigError("chi_max must lie in (0, 0.04]");
  }
  if ((experiment == ExperimentKind::full_insep_scan ||
       experiment == ExperimentKind::baseline_compare ||
       experiment == ExperimentKind::loss_sweep) &&
      structures.size() > 1)
    throw ConfigError("this experiment takes at most one structure");
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const ModeRegister reg(cfg.num_modes,
                         cfg.cutoff == 0 ? default_cutoff(cfg.num_modes)
                                         : cfg.cutoff);
  const bool want_van_loock =
      cfg.van_loock || cfg.experiment == ExperimentKind::loss_sweep ||
      cfg.experiment == ExperimentKind::baseline_compare;

  std::vector<int> orders = cfg.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());

  std::map<int, ObservableSet> sets;
  for (int k : orders) sets.emplace(k, build_observable_set(reg, k));

  RunResult result;
  result.records_path = cfg.out + ".jsonl";
  result.summary_path = cfg.out + ".summary.csv";
  std::ofstream records(result.records_path);
  if (!records)
    throw ConfigError("cannot open output file: " + result.records_path);

  const std::string config_hash = cfg.hash();
  const auto cells = build_cells(cfg);

  // flags[cell][criterion] -> per-state detection indicators, in index order
  std::map<std::pair<int, std::string>, std::vector<bool>> flags;
  std::map<int, int> degenerate_per_cell;

  for (const auto& cell : cells) {
    for (int i = 0; i < cfg.sample_count; ++i) {
      const std::uint64_t state_seed =
          derive_seed(cfg.seed, static_cast<std::uint64_t>(cell.id), i);
      const double t0 = now_ms();

      nlohmann::json rec;
      rec["schema"] = kRecordSchema;
      rec["config_hash"] = config_hash;
      rec["experiment"] = to_string(cfg.experiment);
      rec["cell"] = cell.label;
      rec["cell_id"] = cell.id;
      rec["index"] = i;
      rec["state_seed"] = state_seed;

      DensityMatrix dm;
      nlohmann::json state;
      state["N"] = reg.num_modes;
      state["d"] = reg.cutoff;
      try {
        if (cell.spdc) {
          Rng rng(state_seed);
          const SpdcSpec spec = draw_spdc_spec(rng, cfg.chi_max);
          dm = density_from_pure(spdc_state(spec, reg), reg);
          state["kind"] = "spdc";
          state["chi"] = spec.chi_t;
        } else {
          std::optional<LossSpec> loss;
          if (cell.eta && *cell.eta < 1.0)
            loss = LossSpec::uniform(reg.num_modes, *cell.eta);
          int resamples = 0;
          dm = random_structured_state(reg, cell.structure, cfg.stellar_rank,
                                       loss, state_seed, true,
                                       cfg.max_resamples, &resamples);
          state["kind"] = "structured";
          state["structure"] = cell.structure.to_string();
          state["stellar_rank"] = cfg.stellar_rank;
          if (cell.eta) state["eta"] = *cell.eta;
          state["resamples"] = resamples;
        }
      } catch (const GenerationError& e) {
        ++degenerate_per_cell[cell.id];
        ++result.degenerate_states;
        rec["degenerate"] = true;
        rec["error"] = e.what();
        rec["wall_time_ms"] = now_ms() - t0;
        records << rec.dump() << "\n";
        continue;
      }
      rec["state"] = std::move(state);

      // PPT report (pure states only; the Schmidt shortcut keeps it cheap).
      if (dm.pure) {
        nlohmann::json ppt = nlohmann::json::array();
        bool all_npt = true;
        for (const auto& cut : bipartitions(reg.num_modes)) {
          const double mineig =
              pure_pt_min_eig(*dm.pure, reg, cut.blocks.front());
          ppt.push_back({{"bipartition", cut.to_string()},
                         {"min_eigenvalue", mineig}});
          if (mineig >= -tol::ppt) all_npt = false;
        }
        rec["ppt"] = {{"bipartitions", std::move(ppt)},
                      {"all_cuts_npt", all_npt}};
      } else {
        rec["ppt"] = nullptr;
      }

      WitnessOptions opts;
      opts.cert_rel = cfg.cert_rel;
      nlohmann::json per_order = nlohmann::json::object();
      RealVector prev_c;
      int prev_order = 0;
      for (int k : orders) {
        RealVector warm;
        if (prev_order > 0 && prev_c.size() > 0) {
          warm = pad_coefficients(prev_c, prev_order, k, reg.num_modes);
          opts.warm_start = &warm;
        } else {
          opts.warm_start = nullptr;
        }
        const auto cert =
            certify_structure(dm, sets.at(k), cell.structure, opts);
        per_order["order" + std::to_string(k)] = cert_to_record(cert);
        flags[{cell.id, "order" + std::to_string(k)}].push_back(
            cert.certified());
        if (cert.has_candidate()) {
          prev_c = cert.c_opt;
          prev_order = k;
        }
      }
      rec["results"] = std::move(per_order);

      if (want_van_loock) {
        const auto vl = van_loock_V(dm);
        rec["van_loock"] = {{"v", vl.v},
                            {"u_variance", vl.u_variance},
                            {"v_variance", vl.v_variance}};
        flags[{cell.id, "van_loock"}].push_back(vl.v > 0.0);
      }

      rec["wall_time_ms"] = now_ms() - t0;
      records << rec.dump() << "\n";
    }
  }
  records.flush();
  if (!records)
    throw ConfigError("write failed for " + result.records_path);

  std::ofstream summary(result.summary_path);
  if (!summary)
    throw ConfigError("cannot open output file: " + result.summary_path);
  summary.precision(17);
  summary << "experiment,cell,criterion,samples,detections,rate,std10,"
             "degenerate\n";
  for (const auto& cell : cells) {
    std::vector<std::string> criteria;
    for (int k : orders) criteria.push_back("order" + std::to_string(k));
    if (want_van_loock) criteria.push_back("van_loock");
    for (const auto& crit : criteria) {
      const auto it = flags.find({cell.id, crit});
      if (it == flags.end()) continue;
      const auto& f = it->second;
      SummaryRow row;
      row.cell = cell.label;
      row.criterion = crit;
      row.samples = static_cast<int>(f.size());
      row.detections = static_cast<int>(std::count(f.begin(), f.end(), true));
      row.degenerate = degenerate_per_cell.count(cell.id)
                           ? degenerate_per_cell.at(cell.id)
                           : 0;
      row.rate = f.empty() ? 0.0 : double(row.detections) / row.samples;
      row.std10 = ten_split_std(f);
      summary << to_string(cfg.experiment) << ",\"" << row.cell << "\","
              << row.criterion << "," << row.samples << "," << row.detections
              << "," << row.rate << "," << row.std10 << "," << row.degenerate
              << "\n";
      result.summary.rows.push_back(std::move(row));
    }
  }
  summary.flush();
  if (!summary)
    throw ConfigError("write failed for " + result.summary_path);
  return result;
}

ReportResult report_records(const std::string& records_path,
                            const std::string& out_prefix) {
  std::ifstream is(records_path);
  if (!is) throw ConfigError("cannot open records file: " + records_path);

  ReportResult result;
  result.rates_path = out_prefix + ".rates.csv";
  result.scatter_path = out_prefix + ".scatter.csv";

  struct Entry {
    int index;
    double g;
    bool has_g;
    bool certified;
  };
  // (experiment, cell, criterion) -> entries in file order
  std::map<std::tuple<std::string, std::string, std::string>,
           std::vector<Entry>>
      groups;

  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
      if (!rec.is_object() || !rec.contains("cell") || !rec.contains("index"))
        throw ConfigError("missing fields");
      if (rec.value("degenerate", false)) {
        ++result.records;
        continue;
      }
      const std::string experiment = rec.value("experiment", "");
      const std::string cell = rec.at("cell").get<std::string>();
      const int index = rec.at("index").get<int>();
      for (const auto& [crit, c] : rec.at("results").items()) {
        Entry e;
        e.index = index;
        e.has_g = !c.at("g").is_null();
        e.g = e.has_g ? c.at("g").get<double>() : 0.0;
        e.certified = c.at("certified").get<bool>();
        groups[{experiment, cell, crit}].push_back(e);
      }
      if (rec.contains("van_loock") && !rec.at("van_loock").is_null()) {
        const double v = rec.at("van_loock").at("v").get<double>();
        groups[{experiment, cell, "van_loock"}].push_back(
            Entry{index, v, true, v > 0.0});
      }
      ++result.records;
    } catch (const std::exception&) {
      ++result.skipped;
    }
  }

  std::ofstream rates(result.rates_path);
  std::ofstream scatter(result.scatter_path);
  if (!rates || !scatter)
    throw ConfigError("cannot open report outputs under " + out_prefix);
  rates.precision(17);
  scatter.precision(17);
  rates << "experiment,cell,criterion,samples,detections,rate,std10\n";
  scatter << "experiment,cell,criterion,index,value,detected\n";

  for (const auto& [key, entries] : groups) {
    const auto& [experiment, cell, crit] = key;
    std::vector<bool> f;
    f.reserve(entries.size());
    int detections = 0;
    for (const auto& e : entries) {
      f.push_back(e.certified);
      detections += e.certified ? 1 : 0;
      scatter << experiment << ",\"" << cell << "\"," << crit << ","
              << e.index << ",";
      if (e.has_g)
        scatter << e.g;
      scatter << "," << (e.certified ? 1 : 0) << "\n";
    }
    rates << experiment << ",\"" << cell << "\"," << crit << "," << f.size()
          << "," << detections << ","
          << (f.empty() ? 0.0 : double(detections) / f.size()) << ","
          << ten_split_std(f) << "\n";
  }
  rates.flush();
  scatter.flush();
  if (!rates || !scatter)
    throw ConfigError("write failed for report outputs under " + out_prefix);
  return result;
}

}  // namespace cvwit

#include "misvqa/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "misvqa/errors.hpp"
#include "misvqa/random.hpp"
#include "misvqa/record.hpp"

namespace misvqa {

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  if (algorithm != "qaoa_plus" && algorithm != "qao" && algorithm != "dqva") {
    fail("algorithm must be qaoa_plus, qao or dqva, got '" + algorithm + "'");
  }
  if (depths.empty() || lambdas.empty() || vector_beta.empty() || initials.empty() || budgets.empty()) {
    fail("list-valued knobs must not be empty");
  }
  for (int p : depths) {
    if (p < 1) fail("p must be >= 1");
  }
  for (double l : lambdas) {
    if (!(l >= 0.0)) fail("lambda must be >= 0");
  }
  for (const auto& s : initials) {
    if (s != "zero" && s != "w") fail("initial must be 'zero' or 'w', got '" + s + "'");
  }
  for (int b : budgets) {
    if (b < 1) fail("budget must be >= 1");
  }
  if (rounds < 1) fail("m must be >= 1");
  if (greedy_starts < 0) fail("greedy_starts must be >= 0");
  if (algorithm == "dqva" && !zero_start && greedy_starts == 0) fail("dqva needs zero_start or greedy_starts");
  if (graph_file.empty()) {
    if (n < 1 || n > kMaxQubits) fail("graph n out of range");
    if (edge_probabilities.empty()) fail("graph P list must not be empty");
    for (double p : edge_probabilities) {
      if (!(p >= 0.0 && p <= 1.0)) fail("graph P must be in [0, 1]");
    }
    if (graph_count < 1) fail("graph count must be >= 1");
  }
  if (measurement.mode == MeasurementMode::Sampled && measurement.shots < 1) fail("shots must be >= 1");
  try {
    optimizer.validate();
  } catch (const ParameterError& e) {
    fail(e.what());
  }
}

namespace {

template <typename T>
std::vector<T> as_list(const YAML::Node& node) {
  if (node.IsSequence()) return node.as<std::vector<T>>();
  return {node.as<T>()};
}

void reject_unknown(const YAML::Node& node, const std::set<std::string>& known, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& yaml_text) {
  ExperimentConfig cfg;
  try {
    const YAML::Node root = YAML::Load(yaml_text);
    if (!root.IsMap()) throw ConfigError("experiment config must be a mapping");
    reject_unknown(root, {"experiment", "seed", "repetitions", "workers", "output_dir", "algorithm", "graph",
                          "optimizer", "measurement"},
                   "top level");
    if (root["experiment"]) cfg.id = root["experiment"].as<std::string>();
    if (root["seed"]) cfg.seed = root["seed"].as<std::uint64_t>();
    if (root["repetitions"]) cfg.repetitions = root["repetitions"].as<int>();
    if (root["workers"]) cfg.workers = root["workers"].as<int>();
    if (root["output_dir"]) cfg.output_dir = root["output_dir"].as<std::string>();

    if (const auto a = root["algorithm"]) {
      reject_unknown(a, {"name", "p", "lambda", "vector_beta", "initial", "budget", "m", "zero_start",
                         "greedy_starts"},
                     "algorithm");
      if (a["name"]) cfg.algorithm = a["name"].as<std::string>();
      if (a["p"]) cfg.depths = as_list<int>(a["p"]);
      if (a["lambda"]) cfg.lambdas = as_list<double>(a["lambda"]);
      if (a["vector_beta"]) cfg.vector_beta = as_list<bool>(a["vector_beta"]);
      if (a["initial"]) cfg.initials = as_list<std::string>(a["initial"]);
      if (a["budget"]) cfg.budgets = as_list<int>(a["budget"]);
      if (a["m"]) cfg.rounds = a["m"].as<int>();
      if (a["zero_start"]) cfg.zero_start = a["zero_start"].as<bool>();
      if (a["greedy_starts"]) cfg.greedy_starts = a["greedy_starts"].as<int>();
    }
    if (const auto g = root["graph"]) {
      reject_unknown(g, {"n", "P", "count", "connected_only", "file"}, "graph");
      if (g["n"]) cfg.n = g["n"].as<int>();
      if (g["P"]) cfg.edge_probabilities = as_list<double>(g["P"]);
      if (g["count"]) cfg.graph_count = g["count"].as<int>();
      if (g["connected_only"]) cfg.connected_only = g["connected_only"].as<bool>();
      if (g["file"]) cfg.graph_file = g["file"].as<std::string>();
    }
    if (const auto o = root["optimizer"]) {
      reject_unknown(o, {"method", "max_evals", "xtol", "ftol", "restarts", "initial_step"}, "optimizer");
      if (o["method"]) cfg.optimizer.method = parse_optimizer_method(o["method"].as<std::string>());
      if (o["max_evals"]) cfg.optimizer.max_evals = o["max_evals"].as<int>();
      if (o["xtol"]) cfg.optimizer.xtol = o["xtol"].as<double>();
      if (o["ftol"]) cfg.optimizer.ftol = o["ftol"].as<double>();
      if (o["restarts"]) cfg.optimizer.restarts = o["restarts"].as<int>();
      if (o["initial_step"]) cfg.optimizer.initial_step = o["initial_step"].as<double>();
    }
    if (const auto m = root["measurement"]) {
      reject_unknown(m, {"mode", "shots", "support_cutoff"}, "measurement");
      if (m["mode"]) {
        const auto mode = m["mode"].as<std::string>();
        if (mode == "exact") {
          cfg.measurement.mode = MeasurementMode::Exact;
        } else if (mode == "sampled") {
          cfg.measurement.mode = MeasurementMode::Sampled;
        } else {
          throw ConfigError("measurement mode must be exact or sampled");
        }
      }
      if (m["shots"]) cfg.measurement.shots = m["shots"].as<std::int64_t>();
      if (m["support_cutoff"]) cfg.measurement.support_cutoff = m["support_cutoff"].as<double>();
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string to_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "experiment" << YAML::Value << cfg.id;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "repetitions" << YAML::Value << cfg.repetitions;
  out << YAML::Key << "workers" << YAML::Value << cfg.workers;
  out << YAML::Key << "output_dir" << YAML::Value << cfg.output_dir;

  out << YAML::Key << "algorithm" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << cfg.algorithm;
  out << YAML::Key << "p" << YAML::Value << YAML::Flow << cfg.depths;
  out << YAML::Key << "lambda" << YAML::Value << YAML::Flow << cfg.lambdas;
  out << YAML::Key << "vector_beta" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (bool b : cfg.vector_beta) out << b;
  out << YAML::EndSeq;
  out << YAML::Key << "initial" << YAML::Value << YAML::Flow << cfg.initials;
  out << YAML::Key << "budget" << YAML::Value << YAML::Flow << cfg.budgets;
  out << YAML::Key << "m" << YAML::Value << cfg.rounds;
  out << YAML::Key << "zero_start" << YAML::Value << cfg.zero_start;
  out << YAML::Key << "greedy_starts" << YAML::Value << cfg.greedy_starts;
  out << YAML::EndMap;

  out << YAML::Key << "graph" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << cfg.n;
  out << YAML::Key << "P" << YAML::Value << YAML::Flow << cfg.edge_probabilities;
  out << YAML::Key << "count" << YAML::Value << cfg.graph_count;
  out << YAML::Key << "connected_only" << YAML::Value << cfg.connected_only;
  out << YAML::Key << "file" << YAML::Value << cfg.graph_file;
  out << YAML::EndMap;

  out << YAML::Key << "optimizer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value << to_string(cfg.optimizer.method);
  out << YAML::Key << "max_evals" << YAML::Value << cfg.optimizer.max_evals;
  out << YAML::Key << "xtol" << YAML::Value << cfg.optimizer.xtol;
  out << YAML::Key << "ftol" << YAML::Value << cfg.optimizer.ftol;
  out << YAML::Key << "restarts" << YAML::Value << cfg.optimizer.restarts;
  out << YAML::Key << "initial_step" << YAML::Value << cfg.optimizer.initial_step;
  out << YAML::EndMap;

  out << YAML::Key << "measurement" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value
      << (cfg.measurement.mode == MeasurementMode::Exact ? "exact" : "sampled");
  out << YAML::Key << "shots" << YAML::Value << cfg.measurement.shots;
  out << YAML::Key << "support_cutoff" << YAML::Value << cfg.measurement.support_cutoff;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

namespace {

enum : std::uint64_t { kTagGraph = 1, kTagRun = 2 };

struct GraphJob {
  Graph graph;
  GraphInfo info;
};

struct Cell {
  std::string key;  // human-readable cell label used in run ids
  int depth = 1;
  double lambda = 0.0;
  bool vector_beta = false;
  std::string initial = "zero";
  int budget = 1;
};

struct Job {
  const Cell* cell = nullptr;
  const GraphJob* graph = nullptr;
  int repetition = 0;
  std::string run_id;
  std::uint64_t seed = 0;
};

std::vector<Cell> grid(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  if (cfg.algorithm == "qaoa_plus") {
    for (int p : cfg.depths) {
      for (double l : cfg.lambdas) {
        Cell c;
        c.depth = p;
        c.lambda = l;
        c.key = "p" + std::to_string(p) + "-lambda" + format_number(l);
        cells.push_back(c);
      }
    }
  } else if (cfg.algorithm == "qao") {
    for (int p : cfg.depths) {
      for (bool vb : cfg.vector_beta) {
        for (const auto& init : cfg.initials) {
          Cell c;
          c.depth = p;
          c.vector_beta = vb;
          c.initial = init;
          c.key = "p" + std::to_string(p) + (vb ? "-vector" : "-scalar") + "-" + init;
          cells.push_back(c);
        }
      }
    }
  } else {
    for (int b : cfg.budgets) {
      Cell c;
      c.budget = b;
      c.key = "budget" + std::to_string(b);
      cells.push_back(c);
    }
  }
  return cells;
}

std::vector<GraphJob> make_graphs(const ExperimentConfig& cfg) {
  std::vector<GraphJob> graphs;
  if (!cfg.graph_file.empty()) {
    GraphJob job{Graph::load(cfg.graph_file), {}};
    job.info.n = job.graph.node_count();
    job.info.edges = static_cast<int>(job.graph.edge_count());
    job.info.source = cfg.graph_file;
    graphs.push_back(std::move(job));
    return graphs;
  }
  for (double p : cfg.edge_probabilities) {
    for (int i = 0; i < cfg.graph_count; ++i) {
      const std::uint64_t seed = derive_seed(
          cfg.seed, {kTagGraph, static_cast<std::uint64_t>(cfg.n), std::bit_cast<std::uint64_t>(p),
                     static_cast<std::uint64_t>(i)});
      GraphJob job{cfg.connected_only ? erdos_renyi_connected(cfg.n, p, seed) : erdos_renyi(cfg.n, p, seed), {}};
      job.info.n = cfg.n;
      job.info.edges = static_cast<int>(job.graph.edge_count());
      job.info.edge_probability = p;
      job.info.seed = seed;
      job.info.index = i;
      graphs.push_back(std::move(job));
    }
  }
  return graphs;
}

RunRecord run_job(const ExperimentConfig& cfg, const Job& job) {
  const Cell& cell = *job.cell;
  const Graph& g = job.graph->graph;
  RunRecord rec;
  if (cfg.algorithm == "dqva") {
    DqvaConfig d;
    d.mixer_budget = cell.budget;
    d.rounds = cfg.rounds;
    d.zero_start = cfg.zero_start;
    d.greedy_starts = cfg.greedy_starts;
    d.optimizer = cfg.optimizer;
    d.measurement = cfg.measurement;
    d.seed = job.seed;
    rec = solve_dqva(g, d);
  } else {
    SolveConfig s;
    s.optimizer = cfg.optimizer;
    s.measurement = cfg.measurement;
    s.seed = job.seed;
    if (cfg.algorithm == "qaoa_plus") {
      rec = solve_qaoa_plus(g, cell.depth, cell.lambda, s);
    } else {
      const InitialState init = cell.initial == "w" ? InitialState::w() : InitialState::zero(g.node_count());
      rec = solve_qao(g, cell.depth, cell.vector_beta, init, s);
    }
  }
  rec.run_id = job.run_id;
  rec.graph = job.graph->info;
  if (!std::isnan(rec.graph.edge_probability)) rec.config["P"] = format_number(rec.graph.edge_probability);
  rec.config["repetition"] = std::to_string(job.repetition);
  rec.config["seed"] = std::to_string(job.seed);
  return rec;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> summary_keys(const ExperimentConfig& cfg) {
  if (cfg.algorithm == "qaoa_plus") return {"P", "p", "lambda"};
  if (cfg.algorithm == "qao") return {"P", "p", "vector_beta", "initial"};
  return {"P", "budget"};
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file(dir / "config.yaml", to_yaml(cfg));

  std::string csv = csv_header() + "\n";
  std::string jsonl;
  std::string trace = "run_id,warm_start,round,update,incumbent_weight,objective,active_mixers,layers,evals\n";
  for (const auto& rec : result.records) {
    csv += csv_row(rec) + "\n";
    jsonl += to_json(rec).dump() + "\n";
    for (const auto& t : rec.trace) {
      trace += rec.run_id + "," + std::to_string(t.warm_start) + "," + std::to_string(t.round) + "," +
               std::to_string(t.update) + "," + std::to_string(t.incumbent_weight) + "," +
               format_number(t.objective) + "," + std::to_string(t.active_mixers) + "," +
               std::to_string(t.layers) + "," + std::to_string(t.evals) + "\n";
    }
  }
  write_file(dir / "runs.csv", csv);
  write_file(dir / "runs.jsonl", jsonl);
  write_file(dir / "trace.csv", trace);
  if (!result.records.empty()) {
    write_file(dir / "summary.csv", emit_plot_data(result.records, summary_keys(cfg)).to_csv());
    if (cfg.algorithm == "dqva") {
      write_file(dir / "rounds.csv", emit_plot_data(result.records, {"P", "budget", "round"}).to_csv());
    }
  }
  if (!result.errors.empty()) {
    std::string errors;
    for (const auto& e : result.errors) errors += e + "\n";
    write_file(dir / "errors.txt", errors);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<Cell> cells = grid(cfg);
  const std::vector<GraphJob> graphs = make_graphs(cfg);

  std::vector<Job> jobs;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        Job job;
        job.cell = &cells[ci];
        job.graph = &graphs[gi];
        job.repetition = rep;
        const GraphInfo& info = graphs[gi].info;
        job.seed = derive_seed(cfg.seed, {kTagRun, info.seed, static_cast<std::uint64_t>(rep)});
        std::string p_label = std::isnan(info.edge_probability) ? "file" : "P" + format_number(info.edge_probability);
        job.run_id = cfg.id + "-" + p_label + "-g" + std::to_string(info.index) + "-" + cells[ci].key + "-r" +
                     std::to_string(rep);
        jobs.push_back(std::move(job));
      }
    }
  }

  std::vector<std::optional<RunRecord>> slots(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        slots[i] = run_job(cfg, jobs[i]);
      } catch (const std::exception& e) {
        failures[i] = jobs[i].run_id + ": " + e.what();
      }
    }
  };
  const int threads = std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (slots[i]) {
      result.records.push_back(std::move(*slots[i]));
    } else {
      result.errors.push_back(failures[i]);
    }
  }
  if (!cfg.output_dir.empty()) write_outputs(cfg, result);
  return result;
}

namespace {

std::string group_value(const RunRecord& rec, const std::string& key) {
  if (key == "algorithm") return rec.algorithm;
  if (key == "n") return std::to_string(rec.graph.n);
  if (key == "P") return std::isnan(rec.graph.edge_probability) ? "" : format_number(rec.graph.edge_probability);
  if (key == "graph_index") return std::to_string(rec.graph.index);
  auto it = rec.config.find(key);
  return it == rec.config.end() ? std::string() : it->second;
}

std::optional<double> record_metric(const RunRecord& rec, const std::string& metric) {
  if (metric == "ratio") return rec.approximation_ratio;
  if (metric == "pruned_expectation") return rec.pruned_expectation;
  if (metric == "sp_opt") return rec.sp_opt;
  if (metric == "sp_subopt") return rec.sp_subopt;
  if (metric == "best_weight") return rec.best_weight;
  if (metric == "best_ratio") return rec.e_max > 0 ? static_cast<double>(rec.best_weight) / rec.e_max : 0.0;
  if (metric == "infeasible_mass") return rec.infeasible_mass;
  if (metric == "toffolis") return rec.resources.multi_controlled_toffolis;
  if (metric == "free_parameters") return rec.resources.free_parameters;
  if (metric == "evals") return rec.evals;
  return std::nullopt;
}

int round_count(const RunRecord& rec) {
  auto it = rec.config.find("m");
  int m = it == rec.config.end() ? 1 : std::stoi(it->second);
  for (const auto& t : rec.trace) m = std::max(m, t.round);
  return m;
}

}  // namespace

PlotTable emit_plot_data(const std::vector<RunRecord>& records, const std::vector<std::string>& group_keys,
                         const std::vector<std::string>& metrics_in) {
  if (records.empty()) throw ParameterError("cannot aggregate an empty record set");
  const bool by_round = std::find(group_keys.begin(), group_keys.end(), "round") != group_keys.end();
  std::vector<std::string> metrics = metrics_in;
  if (metrics.empty()) {
    metrics = by_round ? std::vector<std::string>{"incumbent", "incumbent_ratio"}
                       : std::vector<std::string>{"ratio", "sp_opt", "sp_subopt", "best_weight", "best_ratio"};
  }

  struct Acc {
    std::vector<double> values;
    std::vector<std::string> run_ids;
  };
  // Keyed by (group values, metric index) so output order is deterministic.
  std::map<std::pair<std::vector<std::string>, std::size_t>, Acc> groups;

  auto add = [&](const std::vector<std::string>& key, std::size_t mi, double v, const std::string& run_id) {
    auto& acc = groups[{key, mi}];
    acc.values.push_back(v);
    acc.run_ids.push_back(run_id);
  };

  for (const auto& rec : records) {
    if (!by_round) {
      std::vector<std::string> key;
      for (const auto& k : group_keys) key.push_back(group_value(rec, k));
      for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
        const auto v = record_metric(rec, metrics[mi]);
        if (!v) throw ParameterError("unknown metric '" + metrics[mi] + "'");
        add(key, mi, *v, rec.run_id);
      }
      continue;
    }
    int incumbent = rec.trace.empty() ? rec.best_weight : 0;
    std::size_t t = 0;
    for (int r = 1; r <= round_count(rec); ++r) {
      while (t < rec.trace.size() && rec.trace[t].round <= r) {
        incumbent = std::max(incumbent, rec.trace[t].incumbent_weight);
        ++t;
      }
      std::vector<std::string> key;
      for (const auto& k : group_keys) key.push_back(k == "round" ? std::to_string(r) : group_value(rec, k));
      for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
        double v = 0.0;
        if (metrics[mi] == "incumbent") {
          v = incumbent;
        } else if (metrics[mi] == "incumbent_ratio") {
          v = rec.e_max > 0 ? static_cast<double>(incumbent) / rec.e_max : 0.0;
        } else {
          throw ParameterError("metric '" + metrics[mi] + "' is not available per round");
        }
        add(key, mi, v, rec.run_id);
      }
    }
  }

  PlotTable table;
  table.group_keys = group_keys;
  for (auto& [key, acc] : groups) {
    PlotTable::Row row;
    row.group_values = key.first;
    row.metric = metrics[key.second];
    row.count = static_cast<int>(acc.values.size());
    double sum = 0.0;
    for (double v : acc.values) sum += v;
    row.mean = sum / row.count;
    double ss = 0.0;
    for (double v : acc.values) ss += (v - row.mean) * (v - row.mean);
    row.std = row.count > 1 ? std::sqrt(ss / (row.count - 1)) : 0.0;
    row.run_ids = std::move(acc.run_ids);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string PlotTable::to_csv() const {
  std::string out;
  for (const auto& k : group_keys) out += k + ",";
  out += "metric,mean,std,count,runs\n";
  for (const auto& row : rows) {
    for (const auto& v : row.group_values) out += v + ",";
    out += row.metric + "," + format_number(row.mean) + "," + format_number(row.std) + "," +
           std::to_string(row.count) + ",";
    for (std::size_t i = 0; i < row.run_ids.size(); ++i) out += (i ? ";" : "") + row.run_ids[i];
    out += "\n";
  }
  return out;
}

std::vector<RunRecord> load_records(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw ParameterError("cannot open " + jsonl_path);
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError(std::string("bad JSON line in ") + jsonl_path + ": " + e.what());
    }
  }
  return records;
}

}  // namespace misvqa

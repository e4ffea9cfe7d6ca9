#include "misvqa/record.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "misvqa/errors.hpp"

namespace misvqa {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw ParameterError("cannot format number");
  return std::string(buf, end);
}

nlohmann::json plan_summary(const AnsatzPlan& plan) {
  nlohmann::json j;
  j["kind"] = to_string(plan.kind);
  j["p"] = plan.depth;
  j["lambda"] = plan.lambda;
  j["initial"] = plan.initial.to_string();
  j["order"] = plan.mixer_order;
  nlohmann::json masked = nlohmann::json::array();
  for (int k = 0; k < plan.depth; ++k) {
    nlohmann::json layer = nlohmann::json::array();
    for (int v = 0; v < plan.node_count(); ++v) {
      if (plan.masked(k, v)) layer.push_back(v);
    }
    masked.push_back(layer);
  }
  j["masked"] = masked;
  return j;
}

namespace {

nlohmann::json resources_json(const ResourceCount& rc) {
  return {{"multi_controlled_toffolis", rc.multi_controlled_toffolis},
          {"control_arities", rc.control_arities},
          {"free_parameters", rc.free_parameters},
          {"mixer_applications", rc.mixer_applications}};
}

}  // namespace

nlohmann::json to_json(const RunRecord& rec) {
  nlohmann::json j;
  j["schema_version"] = RunRecord::kSchemaVersion;
  j["run_id"] = rec.run_id;
  j["algorithm"] = rec.algorithm;
  j["graph"] = {{"n", rec.graph.n},
                {"edges", rec.graph.edges},
                {"P", std::isnan(rec.graph.edge_probability) ? nlohmann::json(nullptr)
                                                             : nlohmann::json(rec.graph.edge_probability)},
                {"seed", rec.graph.seed},
                {"index", rec.graph.index},
                {"source", rec.graph.source}};
  j["config"] = rec.config;
  j["best_bitstring"] = rec.best_bitstring.to_string();
  j["best_weight"] = rec.best_weight;
  j["e_max"] = rec.e_max;
  j["approximation_ratio"] = rec.approximation_ratio;
  j["pruned_expectation"] = rec.pruned_expectation;
  j["objective"] = rec.objective_value;
  j["sp_table"] = rec.sp_table;
  j["sp_opt"] = rec.sp_opt;
  j["sp_subopt"] = rec.sp_subopt;
  j["infeasible_mass"] = rec.infeasible_mass;
  j["resources"] = resources_json(rec.resources);
  j["evals"] = rec.evals;
  j["optimizer_calls"] = rec.optimizer_calls;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : rec.trace) {
    trace.push_back({{"warm_start", t.warm_start},
                     {"round", t.round},
                     {"update", t.update},
                     {"incumbent_weight", t.incumbent_weight},
                     {"objective", t.objective},
                     {"active_mixers", t.active_mixers},
                     {"layers", t.layers},
                     {"evals", t.evals}});
  }
  j["trace"] = trace;
  j["wall_time_s"] = rec.wall_time_s;
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != RunRecord::kSchemaVersion) {
      throw ParameterError("unsupported run record schema version");
    }
    RunRecord rec;
    rec.run_id = j.at("run_id").get<std::string>();
    rec.algorithm = j.at("algorithm").get<std::string>();
    const auto& g = j.at("graph");
    rec.graph.n = g.at("n").get<int>();
    rec.graph.edges = g.at("edges").get<int>();
    rec.graph.edge_probability =
        g.at("P").is_null() ? std::numeric_limits<double>::quiet_NaN() : g.at("P").get<double>();
    rec.graph.seed = g.at("seed").get<std::uint64_t>();
    rec.graph.index = g.at("index").get<int>();
    rec.graph.source = g.at("source").get<std::string>();
    rec.config = j.at("config").get<std::map<std::string, std::string>>();
    rec.best_bitstring = BitString::parse(j.at("best_bitstring").get<std::string>());
    rec.best_weight = j.at("best_weight").get<int>();
    rec.e_max = j.at("e_max").get<int>();
    rec.approximation_ratio = j.at("approximation_ratio").get<double>();
    rec.pruned_expectation = j.at("pruned_expectation").get<double>();
    rec.objective_value = j.at("objective").get<double>();
    rec.sp_table = j.at("sp_table").get<std::vector<double>>();
    rec.sp_opt = j.at("sp_opt").get<double>();
    rec.sp_subopt = j.at("sp_subopt").get<double>();
    rec.infeasible_mass = j.at("infeasible_mass").get<double>();
    const auto& rc = j.at("resources");
    rec.resources.multi_controlled_toffolis = rc.at("multi_controlled_toffolis").get<int>();
    rec.resources.control_arities = rc.at("control_arities").get<std::vector<int>>();
    rec.resources.free_parameters = rc.at("free_parameters").get<int>();
    rec.resources.mixer_applications = rc.at("mixer_applications").get<int>();
    rec.evals = j.at("evals").get<int>();
    rec.optimizer_calls = j.at("optimizer_calls").get<int>();
    for (const auto& t : j.at("trace")) {
      TraceEntry e;
      e.warm_start = t.at("warm_start").get<int>();
      e.round = t.at("round").get<int>();
      e.update = t.at("update").get<int>();
      e.incumbent_weight = t.at("incumbent_weight").get<int>();
      e.objective = t.at("objective").get<double>();
      e.active_mixers = t.at("active_mixers").get<int>();
      e.layers = t.at("layers").get<int>();
      e.evals = t.at("evals").get<int>();
      rec.trace.push_back(e);
    }
    rec.wall_time_s = j.value("wall_time_s", 0.0);
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed run record: ") + e.what());
  }
}

namespace {

const char* const kConfigColumns[] = {"p", "lambda", "vector_beta", "initial", "budget", "m"};

std::string config_value(const RunRecord& rec, const std::string& key) {
  auto it = rec.config.find(key);
  return it == rec.config.end() ? std::string() : it->second;
}

}  // namespace

std::string csv_header() {
  std::string h = "run_id,algorithm,n,edges,P,graph_seed,graph_index";
  for (const char* key : kConfigColumns) h += std::string(",") + key;
  h +=
      ",best_bitstring,best_weight,e_max,approximation_ratio,pruned_expectation,objective,sp_opt,sp_subopt,"
      "infeasible_mass,toffolis,mixer_applications,free_parameters,evals,optimizer_calls,rounds_to_best,"
      "calls_to_best";
  return h;
}

std::string csv_row(const RunRecord& rec) {
  std::ostringstream os;
  os << rec.run_id << ',' << rec.algorithm << ',' << rec.graph.n << ',' << rec.graph.edges << ','
     << (std::isnan(rec.graph.edge_probability) ? std::string() : format_number(rec.graph.edge_probability)) << ','
     << rec.graph.seed << ',' << rec.graph.index;
  for (const char* key : kConfigColumns) os << ',' << config_value(rec, key);
  os << ',' << rec.best_bitstring.to_string() << ',' << rec.best_weight << ',' << rec.e_max << ','
     << format_number(rec.approximation_ratio) << ',' << format_number(rec.pruned_expectation) << ','
     << format_number(rec.objective_value) << ',' << format_number(rec.sp_opt) << ','
     << format_number(rec.sp_subopt) << ',' << format_number(rec.infeasible_mass) << ','
     << rec.resources.multi_controlled_toffolis << ',' << rec.resources.mixer_applications << ','
     << rec.resources.free_parameters << ',' << rec.evals << ',' << rec.optimizer_calls << ','
     << rec.first_round_reaching(rec.best_weight) << ',' << rec.first_call_reaching(rec.best_weight);
  return os.str();
}

}  // namespace misvqa

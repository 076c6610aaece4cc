#include "restop/io.hpp"

#include <json.hpp>
#include <sstream>

#include "restop/errors.hpp"
#include "restop/format.hpp"

namespace restop {

namespace {

using nlohmann::json;

json delay_to_json(const DelayLaw& delay) {
  json j;
  switch (delay.kind()) {
    case DelayKind::DiracAtZero:
      j["kind"] = "dirac_at_zero";
      break;
    case DelayKind::Dirac:
      j["kind"] = "dirac";
      j["t0"] = delay.t0();
      break;
    case DelayKind::Exponential:
      j["kind"] = "exponential";
      j["lambda"] = delay.lambda();
      break;
    case DelayKind::CappedExponential:
      j["kind"] = "capped_exponential";
      j["lambda"] = delay.lambda();
      j["t0"] = delay.t0();
      break;
    case DelayKind::MixtureWithAtom:
      j["kind"] = "mixture_with_atom";
      j["w0"] = delay.w0();
      j["inner"] = delay_to_json(*delay.inner());
      break;
  }
  return j;
}

json model_json(const Model& model) {
  const auto& p = model.params();
  json j;
  j["mu1"] = p.mu1;
  j["mu2"] = p.mu2;
  j["sigma1"] = p.sigma1;
  j["sigma2"] = p.sigma2;
  j["nu"] = p.nu;
  j["r"] = p.r;
  j["p"] = p.p;
  j["gamma"] = p.gamma;
  j["delay"] = delay_to_json(model.delay());
  return j;
}

json options_json(const SolverOptions& o) {
  json j;
  j["zmin"] = o.zmin;
  j["zmax"] = o.zmax;
  j["grid_n"] = o.grid_n;
  j["fp_tol"] = o.fp_tol;
  j["max_iter"] = o.max_iter;
  j["hermite_n"] = o.hermite_n;
  j["parallel"] = o.parallel;
  return j;
}

json path_config_json(const PathConfig& c, bool oneoff_style) {
  json j;
  j["dt"] = c.dt;
  j["t_max"] = c.t_max;
  j["n_paths"] = c.n_paths;
  j["seed"] = c.master_seed;
  j["s0"] = c.s0;
  j["k0"] = c.k0;
  j["parallel"] = c.parallel;
  j["record_events"] = c.record_events;
  j["style"] = oneoff_style ? "oneoff" : "recursive";
  return j;
}

json parse_or_throw(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(where + ": JSON parse error: " + e.what());
  }
}

double need_number(const json& j, const std::string& key,
                   const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw DomainError(where + ": missing numeric key '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

std::string model_to_json_text(const Model& model) {
  return model_json(model).dump();
}

std::string options_to_json_text(const SolverOptions& options) {
  return options_json(options).dump();
}

SolverOptions options_from_json_text(const std::string& text) {
  const json j = parse_or_throw(text, "options");
  if (!j.is_object()) throw DomainError("options: must be an object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "zmin" && k != "zmax" && k != "grid_n" && k != "fp_tol" &&
        k != "max_iter" && k != "hermite_n" && k != "parallel")
      throw DomainError("options: unknown key '" + k + "'");
  }
  SolverOptions o;
  o.zmin = need_number(j, "zmin", "options");
  o.zmax = need_number(j, "zmax", "options");
  o.grid_n = static_cast<int>(need_number(j, "grid_n", "options"));
  o.fp_tol = need_number(j, "fp_tol", "options");
  o.max_iter = static_cast<int>(need_number(j, "max_iter", "options"));
  o.hermite_n = static_cast<int>(need_number(j, "hermite_n", "options"));
  if (!j.contains("parallel") || !j.at("parallel").is_boolean())
    throw DomainError("options: missing boolean key 'parallel'");
  o.parallel = j.at("parallel").get<bool>();
  return o;
}

std::string solve_result_to_json_text(const SolveResult& result) {
  json j;
  j["version"] = kVersionString;
  j["config"]["model"] = model_json(result.model);
  j["config"]["options"] = options_json(result.options);
  j["a_star"] = result.a_star;
  j["b_star"] = result.b_star;
  j["z0"] = result.z0;
  j["C1"] = result.C1;
  j["C2"] = result.C2;
  j["iterations"] = result.iterations;
  j["residual"] = result.residual;
  j["history"] = result.history;
  json bh = json::array();
  for (const auto& [a, b] : result.boundary_history)
    bh.push_back(json::array({a, b}));
  j["boundary_history"] = std::move(bh);
  j["closed_form"] = result.closed_form;
  return j.dump(2) + "\n";
}

SolveSummary solve_summary_from_json_text(const std::string& text) {
  const json j = parse_or_throw(text, "solve result");
  if (!j.is_object() || !j.contains("config") ||
      !j.at("config").contains("model") ||
      !j.at("config").contains("options"))
    throw DomainError("solve result: missing config echo");
  Model model = load_model_text(j.at("config").at("model").dump());
  SolverOptions options =
      options_from_json_text(j.at("config").at("options").dump());
  SolveSummary s{std::move(model), options, 0.0, 0.0, 0.0, false};
  s.a_star = need_number(j, "a_star", "solve result");
  s.b_star = need_number(j, "b_star", "solve result");
  s.z0 = need_number(j, "z0", "solve result");
  if (!j.contains("closed_form") || !j.at("closed_form").is_boolean())
    throw DomainError("solve result: missing boolean key 'closed_form'");
  s.closed_form = j.at("closed_form").get<bool>();
  return s;
}

std::string oracle_json_text(const SolveSummary& reference,
                             const BermudanConfig& config,
                             const RichardsonResult& sweep, double tol_a,
                             double tol_b, bool a_ok, bool b_ok) {
  json j;
  j["version"] = kVersionString;
  j["config"]["model"] = model_json(reference.model);
  j["config"]["options"] = options_json(reference.options);
  j["config"]["oracle"]["dt"] = config.dt;
  j["config"]["oracle"]["hermite_n"] = config.hermite_n;
  j["config"]["oracle"]["refresh_tol"] = config.refresh_tol;
  j["config"]["oracle"]["policy_iteration"] = config.use_policy_iteration;
  j["reference"]["a_star"] = reference.a_star;
  j["reference"]["b_star"] = reference.b_star;
  j["dts"] = sweep.dts;
  j["a_raw"] = sweep.a_raw;
  j["b_raw"] = sweep.b_raw;
  j["a"] = sweep.a;
  j["b"] = sweep.b;
  j["order_a"] = sweep.order_a;
  j["order_b"] = sweep.order_b;
  j["tol_a"] = tol_a;
  j["tol_b"] = tol_b;
  j["a_ok"] = a_ok;
  j["b_ok"] = b_ok;
  return j.dump(2) + "\n";
}

namespace {

json sim_fields(const SimReport& report) {
  json j;
  j["mean"] = report.mean;
  j["stderr"] = report.stderr_;
  j["ci_low"] = report.ci_low;
  j["ci_high"] = report.ci_high;
  j["lit_fills"] = report.lit_fills;
  j["dark_fills"] = report.dark_fills;
  j["dark_failures"] = report.dark_failures;
  j["truncations"] = report.truncations;
  j["mean_dark_attempts"] = report.mean_dark_attempts;
  j["mean_stop_time"] = report.mean_stop_time;
  j["n_paths"] = report.n_paths;
  return j;
}

}  // namespace

std::string sim_report_json_text(const Model& model,
                                 const SolverOptions& options,
                                 const TradingRule& rule,
                                 const PathConfig& path_config,
                                 bool oneoff_style, const SimReport& report,
                                 double value_benchmark, double diff_sigmas,
                                 const SimReport* oneoff_report,
                                 const CrnDiff* crn) {
  json j = sim_fields(report);
  j["version"] = kVersionString;
  j["config"]["model"] = model_json(model);
  j["config"]["options"] = options_json(options);
  j["config"]["simulation"] = path_config_json(path_config, oneoff_style);
  j["rule"]["a_star"] = rule.a_star;
  j["rule"]["b_star"] = rule.b_star;
  j["value_benchmark"] = value_benchmark;
  j["diff_sigmas"] = diff_sigmas;
  if (oneoff_report) j["oneoff"] = sim_fields(*oneoff_report);
  if (crn) {
    j["crn_diff"]["mean"] = crn->mean;
    j["crn_diff"]["stderr"] = crn->stderr_;
  }
  return j.dump(2) + "\n";
}

std::string comparator_json_text(const SolveResult& recursive,
                                 const ComparatorResult& oneoff,
                                 const OrderingReport& ordering) {
  json j;
  j["version"] = kVersionString;
  j["config"]["model"] = model_json(recursive.model);
  j["config"]["options"] = options_json(recursive.options);
  j["a_hat"] = oneoff.a_hat;
  j["b_hat"] = oneoff.b_hat;
  j["z0_hat"] = oneoff.z0_hat;
  j["closed_form"] = oneoff.closed_form;
  j["a_star"] = recursive.a_star;
  j["b_star"] = recursive.b_star;
  j["z0"] = recursive.z0;
  j["a_gap"] = ordering.a_gap;
  j["b_gap"] = ordering.b_gap;
  j["z0_gap"] = ordering.z0_gap;
  j["max_value_gap"] = ordering.max_value_gap;
  return j.dump(2) + "\n";
}

std::string u_csv(const SolveResult& result) {
  const TradingRule rule{result.a_star, result.b_star};
  const LogGrid& grid = result.u.grid();
  std::ostringstream out;
  out << "z,u,u_prime,region\n";
  for (int i = 0; i < grid.size(); ++i) {
    const double z = grid.z(i);
    out << g17(z) << ',' << g17(result.eval(z)) << ','
        << g17(result.eval_prime(z)) << ','
        << region_name(classify(rule, 1.0, z)) << "\n";
  }
  return out.str();
}

std::string compare_csv(const SolveResult& recursive,
                        const ComparatorResult& oneoff) {
  const LogGrid& grid = recursive.u.grid();
  std::ostringstream out;
  out << "z,u,u_hat,premium\n";
  for (int i = 0; i < grid.size(); ++i) {
    const double z = grid.z(i);
    const double ur = recursive.eval(z);
    const double uo = oneoff.eval(z);
    out << g17(z) << ',' << g17(ur) << ',' << g17(uo) << ','
        << g17(ur - uo) << "\n";
  }
  return out.str();
}

std::string events_csv(const std::vector<PathEvent>& events) {
  std::ostringstream out;
  out << "path,t,s,k,event\n";
  for (const auto& e : events)
    out << e.path << ',' << g17(e.t) << ',' << g17(e.s) << ',' << g17(e.k)
        << ',' << event_name(e.kind) << "\n";
  return out.str();
}

std::string csv_config_header(const std::string& config_json_text) {
  return std::string("# ") + kVersionString + "\n# config: " +
         config_json_text + "\n";
}

}  // namespace restop

#include "arsgs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "arsgs/diagnostics.hpp"
#include "arsgs/io.hpp"
#include "json.hpp"

namespace arsgs {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
  for (const std::string& k : required)
    if (!obj.contains(k))
      throw ConfigError(where + ": missing key '" + k + "'");
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.at(key).is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return obj.at(key).get<double>();
}

long get_integer(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.at(key).is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return obj.at(key).get<long>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.at(key).is_string())
    throw ConfigError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

Vec get_vector(const json& obj, const std::string& where, const std::string& key) {
  const json& arr = obj.at(key);
  if (!arr.is_array() || arr.empty())
    throw ConfigError(where + "." + key + ": expected a non-empty array");
  Vec v;
  for (const json& x : arr) {
    if (!x.is_number()) throw ConfigError(where + "." + key + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

BlockPartition parse_partition(const json& target, const std::string& where, int d) {
  if (!target.contains("partition")) return BlockPartition::coordinatewise(d);
  const json& arr = target.at("partition");
  if (!arr.is_array()) throw ConfigError(where + ".partition: expected an array");
  std::vector<int> sizes;
  int total = 0;
  for (const json& x : arr) {
    if (!x.is_number_integer() || x.get<int>() < 1)
      throw ConfigError(where + ".partition: sizes must be positive integers");
    sizes.push_back(x.get<int>());
    total += x.get<int>();
  }
  if (total != d)
    throw ConfigError(where + ".partition: sizes must sum to the dimension");
  return BlockPartition::from_sizes(std::move(sizes));
}

std::shared_ptr<Target> build_target(const json& t, const std::string& base_dir,
                                     std::string* emit_sigma_csv) {
  const std::string where = "target";
  if (!t.is_object() || !t.contains("type"))
    throw ConfigError("target: missing 'type'");
  const std::string type = get_string(t, where, "type");

  if (type == "gaussian") {
    require_keys(t, where,
                 {"type", "precision_csv", "covariance_csv", "mean", "partition"},
                 {"type"});
    const bool has_q = t.contains("precision_csv");
    const bool has_s = t.contains("covariance_csv");
    if (has_q == has_s)
      throw ConfigError("target: give exactly one of precision_csv/covariance_csv");
    SymMatrix q = has_q
        ? read_sym_matrix_csv(resolve(base_dir, get_string(t, where, "precision_csv")))
        : invert_spd(read_sym_matrix_csv(
              resolve(base_dir, get_string(t, where, "covariance_csv"))));
    const int d = q.dim();
    Vec mean(d, 0.0);
    if (t.contains("mean")) {
      mean = get_vector(t, where, "mean");
      if (static_cast<int>(mean.size()) != d)
        throw ConfigError("target.mean: dimension mismatch");
    }
    return std::make_shared<GaussianTarget>(std::move(mean), std::move(q),
                                            parse_partition(t, where, d));
  }
  if (type == "example1") {
    require_keys(t, where, {"type", "rho", "partition"}, {"type", "rho"});
    SymMatrix q = make_example1(get_vector(t, where, "rho"));
    const int d = q.dim();
    return std::make_shared<GaussianTarget>(Vec(d, 0.0), std::move(q),
                                            parse_partition(t, where, d));
  }
  if (type == "example2") {
    require_keys(t, where, {"type", "d", "c", "partition"}, {"type", "d", "c"});
    const int d = static_cast<int>(get_integer(t, where, "d"));
    SymMatrix sigma = make_example2(d, get_number(t, where, "c"));
    return std::make_shared<GaussianTarget>(Vec(d, 0.0), invert_spd(sigma),
                                            parse_partition(t, where, d));
  }
  if (type == "tmvn") {
    require_keys(t, where, {"type", "sigma_csv", "lower", "upper"},
                 {"type", "sigma_csv", "lower", "upper"});
    SymMatrix sigma = read_sym_matrix_csv(resolve(base_dir, get_string(t, where, "sigma_csv")));
    return std::make_shared<TmvnTarget>(std::move(sigma),
                                        get_vector(t, where, "lower"),
                                        get_vector(t, where, "upper"));
  }
  if (type == "tmvn_generated") {
    require_keys(t, where,
                 {"type", "d", "variant", "gen_seed", "lower", "upper",
                  "emit_sigma_csv"},
                 {"type", "d", "variant", "gen_seed", "lower", "upper"});
    const int d = static_cast<int>(get_integer(t, where, "d"));
    SymMatrix sigma = make_tmvn_sigma(d, static_cast<int>(get_integer(t, where, "variant")),
                                      static_cast<std::uint64_t>(get_integer(t, where, "gen_seed")));
    if (t.contains("emit_sigma_csv"))
      *emit_sigma_csv = resolve(base_dir, get_string(t, where, "emit_sigma_csv"));
    const double lo = get_number(t, where, "lower");
    const double hi = get_number(t, where, "upper");
    return std::make_shared<TmvnTarget>(std::move(sigma), Vec(d, lo), Vec(d, hi));
  }
  if (type == "msm") {
    require_keys(t, where,
                 {"type", "observations_csv", "a1", "a2", "sigma0_sq",
                  "sigma1_sq", "beta_sq"},
                 {"type", "observations_csv", "a1", "a2", "sigma0_sq",
                  "sigma1_sq", "beta_sq"});
    return std::make_shared<MsmTarget>(
        read_vector_csv(resolve(base_dir, get_string(t, where, "observations_csv"))),
        get_number(t, where, "a1"), get_number(t, where, "a2"),
        get_number(t, where, "sigma0_sq"), get_number(t, where, "sigma1_sq"),
        get_number(t, where, "beta_sq"));
  }
  throw ConfigError("target.type: unknown target '" + type + "'");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "rsgs") return Algorithm::Rsgs;
  if (name == "arsgs") return Algorithm::Arsgs;
  if (name == "arsgs_ergodic") return Algorithm::ArsgsErgodic;
  if (name == "rwmwg") return Algorithm::Rwmwg;
  if (name == "arwmwg") return Algorithm::Arwmwg;
  if (name == "arwmwag") return Algorithm::Arwmwag;
  throw ConfigError("algorithm: unknown algorithm '" + name + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir,
                                         bool require_outputs) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  std::set<std::string> required = {"seed", "algorithm", "total_samples", "target"};
  if (require_outputs) required.insert("outputs");
  require_keys(doc, "config",
               {"seed", "algorithm", "total_samples", "thinning", "target",
                "schedule", "proposal", "gate_region", "ridge", "parallel",
                "exact_sigma", "variant", "p0", "outputs", "diagnostics"},
               required);

  ExperimentConfig cfg;
  cfg.config_hash = fnv1a_hex(json_text);
  cfg.run.seed = static_cast<std::uint64_t>(get_integer(doc, "config", "seed"));
  cfg.run.algorithm = parse_algorithm(get_string(doc, "config", "algorithm"));
  cfg.run.total_samples = get_integer(doc, "config", "total_samples");
  if (cfg.run.total_samples < 1)
    throw ConfigError("total_samples: must be >= 1");
  if (doc.contains("thinning")) {
    cfg.run.thinning = static_cast<int>(get_integer(doc, "config", "thinning"));
    if (cfg.run.thinning < 1) throw ConfigError("thinning: must be >= 1");
  }

  cfg.target = build_target(doc.at("target"), base_dir, &cfg.emit_sigma_csv);
  const int d = cfg.target->dim();

  cfg.run.schedule = Schedule::defaults(d);
  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    require_keys(s, "schedule",
                 {"epoch_length", "eps", "a_scale", "b_scale", "pace"}, {});
    if (s.contains("epoch_length")) {
      cfg.run.schedule.epoch_length = get_integer(s, "schedule", "epoch_length");
      if (cfg.run.schedule.epoch_length < 1)
        throw ConfigError("schedule.epoch_length: must be >= 1");
    }
    if (s.contains("eps")) {
      cfg.run.schedule.eps = get_number(s, "schedule", "eps");
      const int ns = cfg.target->partition().s();
      if (!(cfg.run.schedule.eps > 0.0) ||
          cfg.run.schedule.eps >= 1.0 / (ns + 1))
        throw ConfigError("schedule.eps: need 0 < eps < 1/(s+1)");
    }
    if (s.contains("a_scale")) cfg.run.schedule.a_scale = get_number(s, "schedule", "a_scale");
    if (s.contains("b_scale")) cfg.run.schedule.b_scale = get_number(s, "schedule", "b_scale");
    if (s.contains("pace")) cfg.run.schedule.pace = get_number(s, "schedule", "pace");
    if (cfg.run.schedule.a_scale < 0.0 || cfg.run.schedule.b_scale < 0.0)
      throw ConfigError("schedule: scales must be >= 0");
  }

  if (doc.contains("proposal")) {
    const json& pr = doc.at("proposal");
    require_keys(pr, "proposal", {"beta0", "q_mix", "sigma_fallback"}, {});
    if (pr.contains("beta0")) {
      if (pr.at("beta0").is_number()) {
        cfg.run.proposal.beta.assign(d, pr.at("beta0").get<double>());
      } else {
        cfg.run.proposal.beta = get_vector(pr, "proposal", "beta0");
      }
      for (double b : cfg.run.proposal.beta)
        if (!(b > 0.0)) throw ConfigError("proposal.beta0: must be positive");
    }
    if (pr.contains("q_mix")) {
      cfg.run.proposal.q_mix = get_number(pr, "proposal", "q_mix");
      if (!(cfg.run.proposal.q_mix > 0.0 && cfg.run.proposal.q_mix <= 1.0))
        throw ConfigError("proposal.q_mix: need 0 < q <= 1");
    }
    if (pr.contains("sigma_fallback")) {
      cfg.run.proposal.sigma_fallback = get_number(pr, "proposal", "sigma_fallback");
      if (!(cfg.run.proposal.sigma_fallback > 0.0))
        throw ConfigError("proposal.sigma_fallback: must be positive");
    }
  }

  if (doc.contains("gate_region")) {
    const json& g = doc.at("gate_region");
    require_keys(g, "gate_region", {"lower", "upper"}, {"lower", "upper"});
    GateRegion region{get_vector(g, "gate_region", "lower"),
                      get_vector(g, "gate_region", "upper")};
    if (static_cast<int>(region.lower.size()) != d ||
        static_cast<int>(region.upper.size()) != d)
      throw ConfigError("gate_region: bounds must have the target dimension");
    cfg.run.gate_region = std::move(region);
  }
  if (cfg.run.algorithm == Algorithm::ArsgsErgodic && !cfg.run.gate_region)
    throw ConfigError("gate_region: required for arsgs_ergodic");

  if (doc.contains("ridge")) {
    cfg.run.ridge = get_number(doc, "config", "ridge");
    if (cfg.run.ridge < 0.0) throw ConfigError("ridge: must be >= 0");
  } else if (dynamic_cast<const MsmTarget*>(cfg.target.get())) {
    const double dd = static_cast<double>(d);
    cfg.run.ridge = 1.0 / (dd * dd * dd);
  }

  if (doc.contains("parallel")) {
    if (!doc.at("parallel").is_boolean())
      throw ConfigError("parallel: expected a boolean");
    cfg.run.parallel = doc.at("parallel").get<bool>();
  }
  if (doc.contains("exact_sigma")) {
    if (!doc.at("exact_sigma").is_boolean())
      throw ConfigError("exact_sigma: expected a boolean");
    cfg.run.exact_sigma = doc.at("exact_sigma").get<bool>();
  }
  if (doc.contains("variant")) {
    const std::string v = get_string(doc, "config", "variant");
    if (v == "z") cfg.run.variant = Variant::Z;
    else if (v == "y") cfg.run.variant = Variant::Y;
    else throw ConfigError("variant: expected 'z' or 'y'");
  }
  if (doc.contains("p0")) {
    Vec p0 = get_vector(doc, "config", "p0");
    if (static_cast<int>(p0.size()) != cfg.target->partition().s())
      throw ConfigError("p0: must have one entry per block");
    cfg.run.p0 = std::move(p0);
  }

  if (doc.contains("outputs")) {
    const json& outs = doc.at("outputs");
    require_keys(outs, "outputs",
                 {"chain_csv", "trace_csv", "summary_json", "timings_json"},
                 {"chain_csv", "trace_csv", "summary_json"});
    cfg.chain_csv = resolve(base_dir, get_string(outs, "outputs", "chain_csv"));
    cfg.trace_csv = resolve(base_dir, get_string(outs, "outputs", "trace_csv"));
    cfg.summary_json = resolve(base_dir, get_string(outs, "outputs", "summary_json"));
    if (outs.contains("timings_json"))
      cfg.timings_json = resolve(base_dir, get_string(outs, "outputs", "timings_json"));
  }

  if (doc.contains("diagnostics")) {
    const json& dg = doc.at("diagnostics");
    require_keys(dg, "diagnostics", {"report_json", "acf_coords", "max_lag", "acf_csv"},
                 {"report_json"});
    DiagnosticsRequest req;
    req.report_json = resolve(base_dir, get_string(dg, "diagnostics", "report_json"));
    if (dg.contains("acf_coords")) {
      for (const json& x : dg.at("acf_coords")) {
        if (!x.is_number_integer() || x.get<int>() < 1)
          throw ConfigError("diagnostics.acf_coords: 1-based indices expected");
        req.acf_coords.push_back(x.get<int>());
      }
    }
    if (dg.contains("max_lag")) {
      req.max_lag = static_cast<int>(get_integer(dg, "diagnostics", "max_lag"));
      if (req.max_lag < 1) throw ConfigError("diagnostics.max_lag: must be >= 1");
    }
    if (dg.contains("acf_csv"))
      req.acf_csv = resolve(base_dir, get_string(dg, "diagnostics", "acf_csv"));
    cfg.diagnostics = std::move(req);
  }
  return cfg;
}

ExperimentResult run_experiment_in_memory(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.run = run(*cfg.target, cfg.run);
  res.d = cfg.target->dim() - cfg.target->regime_count();
  res.n_regimes = cfg.target->regime_count();
  res.s = cfg.target->partition().s();
  return res;
}

std::string summary_json_text(const ExperimentConfig& cfg,
                              const ExperimentResult& res) {
  JsonWriter w;
  w.begin_object();
  w.key_value("version", std::string(kVersion));
  w.key_value("config_hash", cfg.config_hash);
  w.key_value("total_steps", res.run.total_steps);
  w.key_value("recorded_states", static_cast<long>(res.run.chain.size()));
  w.key_value("epochs", static_cast<long>(res.run.trace.size()));
  w.key_value("skipped_epochs", res.run.skipped_epochs);
  w.key_array("final_p", res.run.final_p);
  w.key_value("pg_estimate", res.run.final_pg);
  if (!res.run.final_beta.empty()) {
    w.key_array("final_beta", res.run.final_beta);
    Vec mean_alpha(res.run.accept.alpha_sum.size(), 0.0);
    Vec accept_rate(res.run.accept.alpha_sum.size(), 0.0);
    for (std::size_t i = 0; i < mean_alpha.size(); ++i) {
      const long n = std::max<long>(1, res.run.accept.proposals[i]);
      mean_alpha[i] = res.run.accept.alpha_sum[i] / static_cast<double>(n);
      accept_rate[i] = static_cast<double>(res.run.accept.accepts[i]) /
                       static_cast<double>(n);
    }
    w.key_array("mean_alpha", mean_alpha);
    w.key_array("accept_rate", accept_rate);
  }
  w.end_object();
  return w.str() + "\n";
}

namespace {

void write_diagnostics(const ExperimentConfig& cfg, const ExperimentResult& res) {
  const DiagnosticsRequest& req = *cfg.diagnostics;
  // columns: continuous coordinates then regimes
  const int total_cols = res.d + res.n_regimes;
  std::vector<Vec> columns(total_cols);
  for (const ChainRecord& rec : res.run.chain) {
    for (int i = 0; i < res.d; ++i) columns[i].push_back(rec.x[i]);
    for (int i = 0; i < res.n_regimes; ++i)
      columns[res.d + i].push_back(static_cast<double>(rec.regimes[i]));
  }
  const AsvarReport rep = worst_linear_asvar(columns);

  JsonWriter w;
  w.begin_object();
  w.key_value("version", std::string(kVersion));
  w.key_value("config_hash", cfg.config_hash);
  w.key_array("asvar", rep.per_coordinate);
  w.key_value("max_asvar", rep.max_value);
  w.key_value("max_index", static_cast<long>(rep.max_index + 1));
  {
    std::vector<long> excluded(rep.excluded.begin(), rep.excluded.end());
    for (long& e : excluded) ++e;
    w.key_array("excluded", excluded);
  }
  // advisory bound check against the run's own gap estimate, when one exists
  if (!std::isnan(res.run.final_pg) && res.run.final_pg > 0.0 &&
      res.run.final_pg < 1.0) {
    w.key_object("kv_check");
    w.key_value("gap", res.run.final_pg);
    w.key_value("rhs", (2.0 - res.run.final_pg) / res.run.final_pg);
    w.key_value("slack", 0.2);
    std::vector<long> ok;
    bool all = true;
    for (double v : rep.per_coordinate) {
      if (std::isnan(v)) continue;
      const KvCheck c = kv_bound_check(v, res.run.final_pg, 1.0, 0.2);
      ok.push_back(c.satisfied ? 1 : 0);
      all = all && c.satisfied;
    }
    w.key_array("satisfied", ok);
    w.key_value("all_satisfied", all);
    w.end_object();
  }
  std::string acf_csv_text = "lag";
  std::vector<AcfResult> curves;
  if (!req.acf_coords.empty()) {
    w.key_object("acf");
    for (int coord : req.acf_coords) {
      if (coord < 1 || coord > total_cols)
        throw ConfigError("diagnostics.acf_coords: coordinate out of range");
      const AcfResult r = acf(columns[coord - 1], req.max_lag);
      w.key_array("x_" + std::to_string(coord), r.values);
      curves.push_back(r);
      acf_csv_text += ",x_" + std::to_string(coord);
    }
    w.end_object();
  }
  w.end_object();
  write_text_file(req.report_json, w.str() + "\n");

  if (!req.acf_csv.empty() && !curves.empty()) {
    acf_csv_text += "\n";
    for (int k = 0; k <= req.max_lag; ++k) {
      acf_csv_text += std::to_string(k);
      for (const AcfResult& r : curves)
        acf_csv_text += "," + format_double(r.values[k]);
      acf_csv_text += "\n";
    }
    write_text_file(req.acf_csv, acf_csv_text);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.emit_sigma_csv.empty()) {
    const TmvnTarget* tmvn = dynamic_cast<const TmvnTarget*>(cfg.target.get());
    if (tmvn) write_matrix_csv(cfg.emit_sigma_csv, tmvn->sigma0());
  }
  ExperimentResult res = run_experiment_in_memory(cfg);

  const std::string comment = std::string("arsgs ") + kVersion +
                              " config=" + cfg.config_hash;
  write_chain_csv(cfg.chain_csv, comment, res.d, res.n_regimes, res.run.chain);
  write_trace_csv(cfg.trace_csv, comment, res.s, res.run.trace);
  write_text_file(cfg.summary_json, summary_json_text(cfg, res));

  if (!cfg.timings_json.empty()) {
    JsonWriter w;
    w.begin_object();
    w.key_value("seconds_sampling", res.run.seconds_sampling);
    w.key_value("seconds_adaptation", res.run.seconds_adaptation);
    const long epochs = std::max<long>(1, static_cast<long>(res.run.trace.size()));
    w.key_value("mean_epoch_sampling",
                res.run.seconds_sampling / static_cast<double>(epochs));
    w.key_value("mean_epoch_adaptation",
                res.run.seconds_adaptation / static_cast<double>(epochs));
    w.end_object();
    write_text_file(cfg.timings_json, w.str() + "\n");
  }
  if (cfg.diagnostics) write_diagnostics(cfg, res);
  return res;
}

}  // namespace arsgs

#include "eal/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eal/config.hpp"
#include "eal/funclass.hpp"
#include "eal/limits.hpp"

namespace eal::runner {

namespace {

using config::json;
using engine::ConfigError;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunContext {
  std::string command;
  std::string out_dir;
  std::uint64_t config_hash = 0;
  std::vector<std::string> decisions;
  std::vector<std::string> outputs;

  std::string meta_columns() const {
    std::string d;
    for (const std::string& s : decisions) {
      if (!d.empty()) d += ';';
      d += s;
    }
    return hex64(config_hash) + "," + version() + "," + d;
  }

  void write_file(const std::string& name, const std::string& bytes) {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    out << bytes;
    const_cast<RunContext*>(this)->outputs.push_back(name);
  }

  void write_meta(std::uint64_t seed) {
    json meta;
    meta["command"] = command;
    meta["config_hash"] = hex64(config_hash);
    meta["version"] = version();
    meta["seed"] = seed;
    meta["decisions"] = decisions;
    meta["outputs"] = outputs;
    write_file("meta.json", meta.dump(2) + "\n");
  }
};

std::string load_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- classify

json verdict_to_json(const funclass::ClassVerdict& cv) {
  json v;
  v["class"] = cv.class_name;
  v["verdict"] = funclass::to_string(cv.verdict);
  v["reason"] = cv.reason;
  if (cv.estimated_limit) v["estimated_limit"] = *cv.estimated_limit;
  json w = json::array();
  for (auto [x, y] : cv.witness) w.push_back({x, y});
  v["witness"] = w;
  return v;
}

int run_classify(const RunOptions& opts, RunContext& ctx) {
  std::vector<std::string> functions = opts.functions;
  std::vector<std::string> classes = opts.classes;
  std::uint64_t seed = 0;
  if (!opts.config_path.empty()) {
    json root = config::load_config_file(opts.config_path);
    if (functions.empty() && root.contains("functions"))
      for (const json& f : root.at("functions")) functions.push_back(f.get<std::string>());
    if (classes.empty() && root.contains("classes"))
      for (const json& c : root.at("classes")) classes.push_back(c.get<std::string>());
  }
  if (functions.empty())
    throw ConfigError("classify needs --function or a config with 'functions'");
  if (classes.empty()) classes = {"SL", "F", "T", "S"};

  json out = json::array();
  for (const std::string& dsl : functions) {
    expr::FunctionSpec f;
    try {
      f = expr::make_function(dsl);
    } catch (const expr::ParseError& e) {
      throw ConfigError("function '" + dsl + "': " + e.what());
    }
    funclass::ClassifyResult res = funclass::classify(f, classes);
    json rec;
    rec["function"] = dsl;
    rec["domain_start"] = f.domain_start;
    json vs = json::array();
    for (const funclass::ClassVerdict& cv : res.verdicts) vs.push_back(verdict_to_json(cv));
    rec["verdicts"] = vs;
    rec["config_hash"] = hex64(ctx.config_hash);
    rec["version"] = version();
    rec["decisions"] = ctx.decisions;
    out.push_back(rec);
  }
  std::string bytes = out.dump(2) + "\n";
  ctx.write_file("verdicts.json", bytes);
  std::cout << bytes;
  ctx.write_meta(seed);
  return kExitOk;
}

// ----------------------------------------------------------------- average

int run_average(const RunOptions& opts, RunContext& ctx) {
  json root = config::load_config_file(opts.config_path);
  config::ExperimentConfig cfg = config::build_experiment(root);
  config::SplitMix64 stream(cfg.seed);

  std::string csv = "run,N,re,im,abs,config_hash,version,decisions\n";
  for (int run = 0; run < cfg.runs; ++run) {
    config::assign_starts(cfg, stream);
    cfg.spec.validate();
    engine::AverageTrace tr = engine::trace(cfg.spec, opts.workers);
    for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
      csv += std::to_string(run) + "," + std::to_string(tr.checkpoints[i]) + "," +
             fmt(tr.values[i].real()) + "," + fmt(tr.values[i].imag()) + "," +
             fmt(std::abs(tr.values[i])) + "," + ctx.meta_columns() + "\n";
    }
  }
  ctx.write_file("average.csv", csv);
  ctx.write_meta(cfg.seed);
  return kExitOk;
}

// -------------------------------------------------------------- invariance

int run_invariance(const RunOptions& opts, RunContext& ctx) {
  json root = config::load_config_file(opts.config_path);
  config::ExperimentConfig cfg = config::build_experiment(root);
  if (!root.contains("g")) throw ConfigError("invariance needs a test observable 'g'");
  systems::Observable g = config::build_observable(root.at("g"));
  std::int64_t r = root.contains("r") ? root.at("r").get<std::int64_t>() : 0;
  config::SplitMix64 stream(cfg.seed);

  std::string csv = "run,N,defect,r,config_hash,version,decisions\n";
  for (int run = 0; run < cfg.runs; ++run) {
    config::assign_starts(cfg, stream);
    cfg.spec.validate();
    std::int64_t r_eff = r != 0 ? r : engine::default_invariance_power(cfg.spec);
    for (std::int64_t N : cfg.spec.checkpoints) {
      double defect = engine::invariance_defect(cfg.spec, N, g, opts.workers, r_eff);
      csv += std::to_string(run) + "," + std::to_string(N) + "," + fmt(defect) + "," +
             std::to_string(r_eff) + "," + ctx.meta_columns() + "\n";
    }
  }
  ctx.write_file("invariance.csv", csv);
  ctx.write_meta(cfg.seed);
  return kExitOk;
}

// --------------------------------------------------------------- occupancy

int run_occupancy(const RunOptions& opts, RunContext& ctx) {
  json root = config::load_config_file(opts.config_path);
  if (!root.contains("iterates")) throw ConfigError("occupancy needs 'iterates'");
  std::vector<engine::IterateSequence> its;
  for (const json& ij : root.at("iterates")) its.push_back(config::build_iterate(ij));
  auto N = root.contains("n") ? root.at("n").get<std::int64_t>() : 100000;

  engine::OccupancyTable table = engine::occupancy(its, N);
  engine::TermDecomposition td = engine::term_decomposition(its, N);

  std::string csv;
  for (std::size_t i = 0; i < its.size(); ++i) csv += "b" + std::to_string(i + 1) + ",";
  csv += "count,config_hash,version,decisions\n";
  for (const auto& [key, count] : table.counts) {
    for (std::int64_t b : key.b) csv += std::to_string(b) + ",";
    csv += std::to_string(count) + "," + ctx.meta_columns() + "\n";
  }
  ctx.write_file("occupancy.csv", csv);

  json summary;
  summary["N"] = N;
  summary["boxes"] = table.counts.size();
  summary["total"] = table.total;
  summary["matched"] = td.matched;
  summary["appearing"] = td.appearing;
  summary["disappearing"] = td.disappearing;
  ctx.write_file("occupancy_summary.json", summary.dump(2) + "\n");
  ctx.write_meta(root.contains("seed") ? root.at("seed").get<std::uint64_t>() : 0);
  return kExitOk;
}

// ------------------------------------------------------------------- limit

int run_limit(const RunOptions& opts, RunContext& ctx) {
  json root = config::load_config_file(opts.config_path);
  std::string kind = root.contains("kind") ? root.at("kind").get<std::string>() : "auto";
  json out;
  std::uint64_t seed = root.contains("seed") ? root.at("seed").get<std::uint64_t>() : 0;

  if (kind == "window_oracle" || kind == "suspension") {
    DD gamma = config::resolve_real(root.at("gamma"));
    DD ell = root.contains("ell") ? config::resolve_real(root.at("ell")) : DD(0.0);
    double x = root.contains("x") ? root.at("x").get<double>() : 0.0;
    systems::Observable fobs = config::build_observable(root.at("f"));
    const auto* poly = std::get_if<systems::TrigPoly>(&fobs.v);
    if (!poly) throw ConfigError("limit oracle needs a trigpoly observable");
    if (kind == "window_oracle") {
      std::int64_t cal_n =
          root.contains("calibration_n") ? root.at("calibration_n").get<std::int64_t>() : 100000;
      limits::WindowOracleResult res =
          limits::sliding_window_oracle(gamma, ell, *poly, x, cal_n);
      out["value_re"] = res.value.real();
      out["value_im"] = res.value.imag();
      out["provenance"] = "window integral for T x = x + 1/gamma";
      out["normalization"] =
          res.selected == limits::WindowNormalization::GammaScaled ? "gamma-scaled" : "printed";
      out["calibration_error"] = res.calibration_error;
      out["cross_check_error"] = res.cross_check_error;
      ctx.decisions.push_back(std::string("window-normalization=") +
                              (res.selected == limits::WindowNormalization::GammaScaled
                                   ? "gamma-scaled"
                                   : "printed"));
    } else {
      systems::SystemSpec base = config::build_system(root.at("base"));
      limits::Complex v = limits::suspension_limit(base, gamma, ell, *poly, x);
      out["value_re"] = v.real();
      out["value_im"] = v.imag();
      out["provenance"] = "suspension invariant projection series";
    }
  } else {
    config::ExperimentConfig cfg = config::build_experiment(root);
    config::SplitMix64 stream(cfg.seed);
    config::assign_starts(cfg, stream);
    cfg.spec.validate();
    seed = cfg.seed;
    limits::LimitPrediction pred;
    const auto* lin =
        std::get_if<engine::LinearIterate>(&cfg.spec.tracks.front().iterate.v);
    if (!lin) {
      pred = limits::predicted_limit_sublinear(cfg.spec);
    } else if (lin->is_rational) {
      pred = limits::predicted_limit_linear_rational(cfg.spec);
    } else {
      pred = limits::predicted_limit_linear_irrational(cfg.spec);
    }
    out["value_re"] = pred.value.real();
    out["value_im"] = pred.value.imag();
    out["provenance"] = pred.provenance;
    out["mode_range"] = pred.mode_range;
    json ms = json::array();
    for (auto [k, m] : pred.matches) ms.push_back({k, m});
    out["matches"] = ms;
  }
  out["config_hash"] = hex64(ctx.config_hash);
  out["version"] = version();
  out["decisions"] = ctx.decisions;
  std::string bytes = out.dump(2) + "\n";
  ctx.write_file("limit.json", bytes);
  std::cout << bytes;
  ctx.write_meta(seed);
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const RunOptions& opts, RunContext& ctx) {
  json root = config::load_config_file(opts.config_path);
  std::string kind = root.contains("kind") ? root.at("kind").get<std::string>() : "exponents";
  double tolerance = root.contains("tolerance") ? root.at("tolerance").get<double>() : -1.0;
  bool breach = false;

  std::string csv;
  std::uint64_t seed = root.contains("seed") ? root.at("seed").get<std::uint64_t>() : 0;

  if (kind == "exponents") {
    // per-track exponent lists; cells are the cartesian product
    const json& lists = root.at("exponents");
    std::vector<std::vector<double>> cs;
    for (const json& l : lists) {
      std::vector<double> one;
      for (const json& x : l) one.push_back(x.get<double>());
      cs.push_back(one);
    }
    config::ExperimentConfig base = config::build_experiment(root);
    if (cs.size() != base.spec.tracks.size())
      throw ConfigError("exponent lists must match the track count");

    for (std::size_t i = 0; i < cs.size(); ++i)
      csv += "c" + std::to_string(i + 1) + ",";
    csv += "run,N,re,im,abs,config_hash,version,decisions\n";

    std::vector<std::size_t> idx(cs.size(), 0);
    for (;;) {
      config::ExperimentConfig cfg = base;
      std::string cell;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        cfg.spec.tracks[i].iterate = engine::IterateSequence::power(cs[i][idx[i]]);
        cell += fmt(cs[i][idx[i]]) + ",";
      }
      config::SplitMix64 stream(seed);
      for (int run = 0; run < cfg.runs; ++run) {
        config::assign_starts(cfg, stream);
        cfg.spec.validate();
        engine::AverageTrace tr = engine::trace(cfg.spec, opts.workers);
        std::size_t last = tr.checkpoints.size() - 1;
        double final_abs = std::abs(tr.values[last]);
        if (tolerance >= 0.0 && final_abs > tolerance) breach = true;
        csv += cell + std::to_string(run) + "," + std::to_string(tr.checkpoints[last]) +
               "," + fmt(tr.values[last].real()) + "," + fmt(tr.values[last].imag()) +
               "," + fmt(final_abs) + "," + ctx.meta_columns() + "\n";
      }
      // odometer
      std::size_t d = 0;
      while (d < idx.size() && ++idx[d] == cs[d].size()) idx[d++] = 0;
      if (d == idx.size()) break;
    }
  } else if (kind == "linear") {
    const json& gammas = root.at("gammas");
    const json& ells = root.at("ells");
    config::ExperimentConfig base = config::build_experiment(root);
    csv += "gamma,ell,run,N,re,im,abs,config_hash,version,decisions\n";
    for (const json& gj : gammas) {
      for (const json& ej : ells) {
        config::ExperimentConfig cfg = base;
        DD gamma = config::resolve_real(gj);
        DD ell = config::resolve_real(ej);
        cfg.spec.tracks[0].iterate = engine::IterateSequence::linear_irrational(gamma, ell);
        config::SplitMix64 stream(seed);
        for (int run = 0; run < cfg.runs; ++run) {
          config::assign_starts(cfg, stream);
          cfg.spec.validate();
          engine::AverageTrace tr = engine::trace(cfg.spec, opts.workers);
          std::size_t last = tr.checkpoints.size() - 1;
          double final_abs = std::abs(tr.values[last]);
          if (tolerance >= 0.0 && final_abs > tolerance) breach = true;
          csv += fmt(gamma.to_double()) + "," + fmt(ell.to_double()) + "," +
                 std::to_string(run) + "," + std::to_string(tr.checkpoints[last]) + "," +
                 fmt(tr.values[last].real()) + "," + fmt(tr.values[last].imag()) + "," +
                 fmt(final_abs) + "," + ctx.meta_columns() + "\n";
        }
      }
    }
  } else {
    throw ConfigError("unknown sweep kind '" + kind + "'");
  }

  ctx.write_file("sweep.csv", csv);
  ctx.write_meta(seed);
  return breach ? kExitTolerance : kExitOk;
}

}  // namespace

const char* version() { return EAL_VERSION; }

int run_command(const std::string& command, const RunOptions& opts) {
  RunContext ctx;
  ctx.command = command;
  ctx.out_dir = opts.out_dir;
  ctx.decisions = {"floors-before-domain=0", "summation=block-kahan-pairwise-4096"};
  try {
    if (!opts.config_path.empty())
      ctx.config_hash = config::fnv1a64(load_raw(opts.config_path));
    else {
      std::string synthetic;
      for (const std::string& f : opts.functions) synthetic += f + "\n";
      ctx.config_hash = config::fnv1a64(synthetic);
    }
    if (command == "classify") return run_classify(opts, ctx);
    if (command == "average") return run_average(opts, ctx);
    if (command == "invariance") return run_invariance(opts, ctx);
    if (command == "occupancy") return run_occupancy(opts, ctx);
    if (command == "limit") return run_limit(opts, ctx);
    if (command == "sweep") return run_sweep(opts, ctx);
    std::cerr << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const limits::OracleMismatch& e) {
    std::cerr << "oracle mismatch: " << e.what() << "\n";
    return kExitOracle;
  } catch (const engine::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const config::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const expr::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const expr::RootFindError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const systems::SystemError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace eal::runner

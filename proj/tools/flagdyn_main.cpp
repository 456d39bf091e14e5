// flagdyn: command-line front end.  Talks to the shared library through the
// C API only; JSON goes to stdout, point clouds to --out.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flagdyn.h"
#include "json.hpp"

using nlohmann::json;

namespace {

// Built-in example group: the diagonal/rotation-conjugate pair used
// throughout the docs.  Subcommands that need a group fall back to it
// when no --config is given.
const char* kDefaultGroup =
    R"({"generators":[{"sl2":[[2,0],[0,0.5]]},{"sl2":[[1.25,0.75],[0.75,1.25]]}]})";

[[noreturn]] void die(int status) {
  std::cerr << "error: " << flagdyn_status_name(status) << ": " << flagdyn_last_error()
            << std::endl;
  std::exit(status == FLAGDYN_ERR_NO_CERTIFICATE_FOUND ? 2 : 1);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  flagdyn_string_free(s);
  return out;
}

std::vector<double> nums(const std::string& s) {
  std::vector<double> out;
  std::string buf;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == ';') {
      if (!buf.empty()) out.push_back(std::stod(buf));
      buf.clear();
    } else {
      buf += c;
    }
  }
  if (!buf.empty()) out.push_back(std::stod(buf));
  return out;
}

json slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << std::endl;
    std::exit(1);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << std::endl;
    std::exit(1);
  }
}

void spill(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << std::endl;
    std::exit(1);
  }
  out << body;
}

struct ElementOpts {
  std::string pgl3, sl2, config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--pgl3", pgl3, "3x3 matrix, row-major, comma separated");
    cmd->add_option("--sl2", sl2, "2x2 matrix, row-major, comma separated");
    cmd->add_option("--config", config, "JSON file with {\"pgl3\":...} or {\"sl2\":...}");
  }

  json request() const {
    if (!config.empty()) return slurp(config);
    json req;
    if (!pgl3.empty())
      req["pgl3"] = nums(pgl3);
    else if (!sl2.empty())
      req["sl2"] = nums(sl2);
    else {
      std::cerr << "error: need --pgl3, --sl2 or --config" << std::endl;
      std::exit(1);
    }
    return req;
  }
};

struct TargetOpts {
  std::string point, line, flag;

  void attach(CLI::App* cmd) {
    cmd->add_option("--point", point, "target point, 3 coords");
    cmd->add_option("--line", line, "target line normal, 3 coords");
    cmd->add_option("--flag", flag, "target flag, 6 coords (point, line normal)");
  }

  void fill(json& req) const {
    if (!point.empty())
      req["target"]["point"] = nums(point);
    else if (!line.empty())
      req["target"]["line"] = nums(line);
    else if (!flag.empty())
      req["target"]["flag"] = nums(flag);
    else {
      std::cerr << "error: need a --point, --line or --flag target" << std::endl;
      std::exit(1);
    }
  }
};

struct GroupOpts {
  std::string config, exponents, out;
  double density = 0.15, radius = 0.0;
  int rmax = 16;
  long long seed = 0;

  void attach(CLI::App* cmd, bool with_out = true) {
    cmd->add_option("--config", config, "group JSON (defaults to the built-in pair)");
    cmd->add_option("--density", density, "boundary sample density");
    cmd->add_option("--rmax", rmax, "largest exponent tried by the search");
    cmd->add_option("--radius", radius, "tube radius (with --exponents: certify exactly this)");
    cmd->add_option("--exponents", exponents, "comma-separated exponents, one per generator");
    cmd->add_option("--seed", seed, "seed recorded in the run config");
    if (with_out) cmd->add_option("--out", out, "CSV / report output path");
  }

  // Create the handle and make sure it carries a certificate.  Exits 2 when
  // no certificate can be found, mirroring the library's NoCertificateFound.
  flagdyn_group* open(std::string* cert_reply = nullptr) const {
    json cfg = config.empty() ? json::parse(kDefaultGroup) : slurp(config);
    cfg["seed"] = seed;
    cfg["density"] = density;
    flagdyn_group* g = nullptr;
    if (int st = flagdyn_group_create(cfg.dump().c_str(), &g)) die(st);

    json req;
    req["density"] = density;
    if (!exponents.empty() && radius > 0) {
      json exps = json::array();
      for (double e : nums(exponents)) exps.push_back(int(e));
      req["exponents"] = exps;
      req["tube_radius"] = radius;
    } else {
      req["rmax"] = rmax;
      if (radius > 0) req["radius_grid"] = {radius};
    }
    char* reply = nullptr;
    int st = flagdyn_group_certify(g, req.dump().c_str(), &reply);
    std::string body = take(reply);
    if (st) {
      flagdyn_group_destroy(g);
      die(st);
    }
    if (cert_reply) *cert_reply = body;
    if (!json::parse(body).value("certified", false)) {
      std::cout << body << std::endl;
      flagdyn_group_destroy(g);
      std::exit(2);
    }
    return g;
  }
};

std::string invoke(int (*fn)(const char*, char**), const json& req) {
  char* reply = nullptr;
  int st = fn(req.dump().c_str(), &reply);
  std::string body = take(reply);
  if (st) die(st);
  return body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamics on the flag space of the projective plane"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker pool size (default: hardware)");

  // classify ----------------------------------------------------------------
  auto* c_classify = app.add_subcommand("classify", "asymptotic type of a matrix's iterates");
  ElementOpts classify_el;
  classify_el.attach(c_classify);
  bool classify_seq = false;
  int classify_nprobe = 5;
  c_classify->add_flag("--sequence", classify_seq, "probe the power sequence instead");
  c_classify->add_option("--nprobe", classify_nprobe, "number of probe exponents");

  // lox-objects ---------------------------------------------------------------
  auto* c_lox = app.add_subcommand("lox-objects", "fixed points and invariant lines");
  ElementOpts lox_el;
  lox_el.attach(c_lox);

  // predict -------------------------------------------------------------------
  auto* c_predict = app.add_subcommand("predict", "dynamic set of the iterates at a target");
  ElementOpts predict_el;
  TargetOpts predict_tgt;
  predict_el.attach(c_predict);
  predict_tgt.attach(c_predict);
  double predict_delta = -1;
  int predict_nprobe = 5;
  c_predict->add_option("--delta", predict_delta, "locus decision band");
  c_predict->add_option("--nprobe", predict_nprobe, "probes for unbalanced limits");

  // verify-dynamics -------------------------------------------------------------
  auto* c_verify = app.add_subcommand("verify-dynamics", "compare prediction with sampled orbits");
  ElementOpts verify_el;
  TargetOpts verify_tgt;
  verify_el.attach(c_verify);
  verify_tgt.attach(c_verify);
  int verify_trials = 200, verify_nmax = 30, verify_samples = 64;
  long long verify_seed = 12345;
  c_verify->add_option("--trials", verify_trials, "perturbation trials per scale");
  c_verify->add_option("--nmax", verify_nmax, "largest iterate");
  c_verify->add_option("--samples", verify_samples, "prediction sample count");
  c_verify->add_option("--seed", verify_seed, "oracle seed");

  // certify ---------------------------------------------------------------------
  auto* c_certify = app.add_subcommand("certify", "ping-pong certificate for a generator list");
  GroupOpts certify_grp;
  certify_grp.attach(c_certify);

  // limitset ----------------------------------------------------------------------
  auto* c_limitset = app.add_subcommand("limitset", "enumerate attractive bouquets");
  GroupOpts limitset_grp;
  limitset_grp.attach(c_limitset);
  int limitset_depth = 3, limitset_samples = 32;
  bool limitset_components = false;
  c_limitset->add_option("--depth", limitset_depth, "word length");
  c_limitset->add_option("--samples", limitset_samples, "samples per circle");
  c_limitset->add_flag("--components", limitset_components, "count components at tube_radius/4");

  // reduce --------------------------------------------------------------------------
  auto* c_reduce = app.add_subcommand("reduce", "pull a flag into the fundamental domain");
  GroupOpts reduce_grp;
  reduce_grp.attach(c_reduce, false);
  std::string reduce_flag;
  int reduce_steps = 100;
  c_reduce->add_option("--flag", reduce_flag, "flag, 6 coords")->required();
  c_reduce->add_option("--steps", reduce_steps, "maximum reduction steps");

  // fate ----------------------------------------------------------------------------
  auto* c_fate = app.add_subcommand("fate", "escaping vs recurrent under the geodesic flow");
  GroupOpts fate_grp;
  fate_grp.attach(c_fate);
  std::string fate_flag;
  double fate_eps = 0.05, fate_t = 60.0, fate_dt = 0.1;
  int fate_depth = 6, fate_steps = 200;
  bool fate_backward = false;
  c_fate->add_option("--flag", fate_flag, "flag, 6 coords")->required();
  c_fate->add_option("--eps", fate_eps, "decision band");
  c_fate->add_option("--depth", fate_depth, "limit-set depth for the distance test");
  c_fate->add_flag("--backward", fate_backward, "flow backwards");
  c_fate->add_option("--steps", fate_steps, "reduction step cap");
  c_fate->add_option("--t", fate_t, "trajectory horizon for --out");
  c_fate->add_option("--dt", fate_dt, "trajectory step for --out");

  // lyapunov ---------------------------------------------------------------------------
  auto* c_lyap = app.add_subcommand("lyapunov", "finite-difference exponents along the flow");
  std::string lyap_point, lyap_coords;
  double lyap_t = 40.0, lyap_dt = 0.05;
  int lyap_chart = 1;
  bool lyap_backward = false;
  c_lyap->add_option("--point", lyap_point, "oriented flag, 6 coords (direction, conormal)");
  c_lyap->add_option("--chart", lyap_chart, "chart for --coords");
  c_lyap->add_option("--coords", lyap_coords, "chart coordinates, 3 numbers");
  c_lyap->add_option("--t", lyap_t, "horizon");
  c_lyap->add_option("--dt", lyap_dt, "renormalization step");
  c_lyap->add_flag("--backward", lyap_backward, "flow backwards");

  // charts -------------------------------------------------------------------------------
  auto* c_charts = app.add_subcommand("charts", "chart maps and transition functions");
  std::string charts_coords;
  int charts_chart = 1;
  c_charts->add_option("--chart", charts_chart, "chart index, 1 or 2");
  c_charts->add_option("--coords", charts_coords, "chart coordinates, 3 numbers")->required();

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) setenv("FLAGDYN_THREADS", std::to_string(threads).c_str(), 1);

  if (*c_classify) {
    json req = classify_el.request();
    if (classify_seq) {
      req["sequence"] = true;
      req["n_probe"] = classify_nprobe;
    }
    std::string body = invoke(flagdyn_classify, req);
    std::cout << body << std::endl;
    if (classify_seq && json::parse(body)["type"].is_null()) return 2;
    return 0;
  }

  if (*c_lox) {
    std::cout << invoke(flagdyn_lox_objects, lox_el.request()) << std::endl;
    return 0;
  }

  if (*c_predict) {
    json req = predict_el.request();
    predict_tgt.fill(req);
    req["n_probe"] = predict_nprobe;
    if (predict_delta > 0) req["delta"] = predict_delta;
    std::cout << invoke(flagdyn_predict, req) << std::endl;
    return 0;
  }

  if (*c_verify) {
    json req = verify_el.request();
    verify_tgt.fill(req);
    req["trials"] = verify_trials;
    req["n_max"] = verify_nmax;
    req["samples"] = verify_samples;
    req["seed"] = verify_seed;
    std::cout << invoke(flagdyn_verify_dynamics, req) << std::endl;
    return 0;
  }

  if (*c_certify) {
    std::string cert;
    flagdyn_group* g = certify_grp.open(&cert);
    std::cout << cert << std::endl;
    if (!certify_grp.out.empty()) spill(certify_grp.out, cert + "\n");
    flagdyn_group_destroy(g);
    return 0;
  }

  if (*c_limitset) {
    flagdyn_group* g = limitset_grp.open();
    json req;
    req["depth"] = limitset_depth;
    req["samples_per_circle"] = limitset_samples;
    req["components"] = limitset_components;
    char *reply = nullptr, *csv = nullptr;
    int st = flagdyn_group_limit_set(g, req.dump().c_str(), &reply, &csv);
    std::string body = take(reply), cloud = take(csv);
    flagdyn_group_destroy(g);
    if (st) die(st);
    std::cout << body << std::endl;
    if (!limitset_grp.out.empty()) spill(limitset_grp.out, cloud);
    return 0;
  }

  if (*c_reduce) {
    flagdyn_group* g = reduce_grp.open();
    json req;
    req["flag"] = nums(reduce_flag);
    req["max_steps"] = reduce_steps;
    char* reply = nullptr;
    int st = flagdyn_group_reduce(g, req.dump().c_str(), &reply);
    std::string body = take(reply);
    flagdyn_group_destroy(g);
    if (st) die(st);
    std::cout << body << std::endl;
    return json::parse(body).value("in_omega", false) ? 0 : 2;
  }

  if (*c_fate) {
    flagdyn_group* g = fate_grp.open();
    json req;
    req["flag"] = nums(fate_flag);
    req["depth"] = fate_depth;
    req["eps"] = fate_eps;
    req["forward"] = !fate_backward;
    req["max_steps"] = fate_steps;
    char* reply = nullptr;
    int st = flagdyn_group_fate(g, req.dump().c_str(), &reply);
    std::string body = take(reply);
    if (st) {
      flagdyn_group_destroy(g);
      die(st);
    }
    std::cout << body << std::endl;
    if (!fate_grp.out.empty()) {
      json oreq;
      oreq["flag"] = nums(fate_flag);
      oreq["t_max"] = fate_t;
      oreq["dt"] = fate_dt;
      char *oreply = nullptr, *csv = nullptr;
      st = flagdyn_group_orbit(g, oreq.dump().c_str(), &oreply, &csv);
      std::string traj = take(csv);
      take(oreply);
      if (st) {
        flagdyn_group_destroy(g);
        die(st);
      }
      spill(fate_grp.out, traj);
    }
    flagdyn_group_destroy(g);
    return json::parse(body)["kind"] == "undetermined" ? 2 : 0;
  }

  if (*c_lyap) {
    json req;
    if (!lyap_point.empty()) {
      req["point"] = nums(lyap_point);
    } else if (!lyap_coords.empty()) {
      json creq;
      creq["chart"] = lyap_chart;
      creq["coords"] = nums(lyap_coords);
      json chart = json::parse(invoke(flagdyn_charts, creq));
      std::vector<double> p = chart["dir"].get<std::vector<double>>();
      std::vector<double> n = chart["conormal"].get<std::vector<double>>();
      p.insert(p.end(), n.begin(), n.end());
      req["point"] = p;
    }
    req["t"] = lyap_t;
    req["dt"] = lyap_dt;
    req["forward"] = !lyap_backward;
    std::cout << invoke(flagdyn_lyapunov, req) << std::endl;
    return 0;
  }

  if (*c_charts) {
    json req;
    req["chart"] = charts_chart;
    req["coords"] = nums(charts_coords);
    std::cout << invoke(flagdyn_charts, req) << std::endl;
    return 0;
  }

  return 0;
}

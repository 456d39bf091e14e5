#include "flagdyn.h"

#include <cstdlib>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "flagdyn/format.hpp"
#include "flagdyn/geodesic_flow.hpp"
#include "flagdyn/limit_objects.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace flagdyn;

namespace {

thread_local std::string t_last_error;

int set_err(int code, const std::string& msg) {
  t_last_error = msg;
  return code;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// ---- reply writer: insertion-ordered objects, doubles at 17 digits --------

std::string jesc(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string jnum(double v) { return g17(v); }

std::string jarr(const double* v, int n) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) {
    if (i) s += ',';
    s += jnum(v[i]);
  }
  return s + "]";
}

std::string jarr(const Vec3& v) { return jarr(v.data(), 3); }

std::string jarr_int(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s + "]";
}

struct Jo {
  std::string body;
  Jo& f(const char* k, const std::string& raw) {
    if (!body.empty()) body += ',';
    body += '"';
    body += k;
    body += "\":";
    body += raw;
    return *this;
  }
  Jo& s(const char* k, const std::string& v) { return f(k, jesc(v)); }
  Jo& d(const char* k, double v) { return f(k, jnum(v)); }
  Jo& i(const char* k, long long v) { return f(k, std::to_string(v)); }
  Jo& b(const char* k, bool v) { return f(k, v ? "true" : "false"); }
  std::string str() const { return "{" + body + "}"; }
};

std::string enc_flag(const Flag& x) {
  const double v[6] = {x.point.rep[0], x.point.rep[1], x.point.rep[2],
                       x.line.normal[0], x.line.normal[1], x.line.normal[2]};
  return jarr(v, 6);
}

std::string enc_oriented(const OrientedFlag& x) {
  const double v[6] = {x.dir[0], x.dir[1], x.dir[2], x.conormal[0], x.conormal[1], x.conormal[2]};
  return jarr(v, 6);
}

// ---- request parsing -------------------------------------------------------

std::vector<double> numbers(const json& a, std::size_t need, const char* what) {
  std::vector<double> out;
  std::function<void(const json&)> flat = [&](const json& v) {
    if (v.is_array())
      for (const auto& e : v) flat(e);
    else
      out.push_back(v.get<double>());
  };
  flat(a);
  if (out.size() != need)
    fail(Err::BadConfig, std::string(what) + ": expected " + std::to_string(need) + " numbers");
  return out;
}

Mat3 parse_mat3(const json& a) {
  auto v = numbers(a, 9, "pgl3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[3 * r + c];
  return m;
}

Mat2 parse_mat2(const json& a) {
  auto v = numbers(a, 4, "sl2 matrix");
  Mat2 m;
  m << v[0], v[1], v[2], v[3];
  return m;
}

GroupElement parse_element(const json& req) {
  if (req.contains("pgl3")) return GroupElement(parse_mat3(req.at("pgl3")));
  if (req.contains("sl2")) {
    Mat2 h = parse_mat2(req.at("sl2"));
    double det = h.determinant();
    if (det <= 1e-12) fail(Err::SingularInput, "sl2 determinant not positive");
    return embed_j(Mat2(h / std::sqrt(det)));
  }
  fail(Err::BadConfig, "need \"pgl3\" or \"sl2\"");
}

Flag parse_flag(const json& a) {
  auto v = numbers(a, 6, "flag");
  return Flag(ProjPoint(Vec3(v[0], v[1], v[2])), ProjLine(Vec3(v[3], v[4], v[5])), 1e-6);
}

OrientedFlag parse_oriented(const json& a) {
  auto v = numbers(a, 6, "oriented flag");
  return OrientedFlag(Vec3(v[0], v[1], v[2]).normalized(), Vec3(v[3], v[4], v[5]).normalized(),
                      1e-6);
}

template <typename F>
int run(char** reply, F&& fn) {
  if (reply) *reply = nullptr;
  try {
    std::string out = fn();
    if (reply) *reply = dup(out);
    return FLAGDYN_OK;
  } catch (const Error& e) {
    return set_err(static_cast<int>(e.code()) + 1, e.what());
  } catch (const json::exception& e) {
    return set_err(FLAGDYN_ERR_JSON, e.what());
  } catch (const std::exception& e) {
    return set_err(FLAGDYN_ERR_UNKNOWN, e.what());
  }
}

const char* asym_name(AsymptoticType t) {
  switch (t) {
    case AsymptoticType::UnbalancedAlpha: return "alpha";
    case AsymptoticType::UnbalancedBeta: return "beta";
    case AsymptoticType::Balanced: return "balanced";
  }
  return "?";
}

// attracting objects of the power sequence of g
DynObjects objects_for(const GroupElement& g, int n_probe) {
  IterateClassification c = classify_iterates(g);
  if (c.kind == IterateClassification::Kind::Bounded)
    fail(Err::DomainViolation, "bounded iterates have no attracting objects");
  if (c.kind == IterateClassification::Kind::NotSimple)
    fail(Err::DomainViolation, "iterates of mixed sign are not simple");
  auto seq = [g](int n) { return g.pow(n); };
  switch (c.type) {
    case AsymptoticType::Balanced: return lox_objects(g).balanced();
    case AsymptoticType::UnbalancedAlpha: return alpha_objects_of_sequence(seq, n_probe);
    case AsymptoticType::UnbalancedBeta: return beta_objects_of_sequence(seq, n_probe);
  }
  fail(Err::DomainViolation, "unclassified iterates");
}

std::string descriptor_json(const LimitSetDescriptor& d) {
  using K = LimitSetDescriptor::Kind;
  Jo jo;
  jo.s("kind", descriptor_kind_name(d.kind));
  switch (d.kind) {
    case K::PointP:
    case K::DualPencil:
    case K::CircleAlpha:
    case K::SurfaceAB: jo.f("point", jarr(d.point.rep)); break;
    case K::LineP:
    case K::PointDual:
    case K::CircleBeta:
    case K::SurfaceBA: jo.f("line", jarr(d.line.normal)); break;
    case K::PointX: jo.f("flag", enc_flag(d.flag)); break;
    default: break;
  }
  return jo.str();
}

struct Target {
  enum class Kind { Point, Line, FlagT } kind;
  ProjPoint point;
  ProjLine line;
  Flag flag;
};

Target parse_target(const json& req) {
  const json& t = req.at("target");
  Target out{};
  if (t.contains("point")) {
    auto v = numbers(t.at("point"), 3, "target point");
    out.kind = Target::Kind::Point;
    out.point = ProjPoint(Vec3(v[0], v[1], v[2]));
  } else if (t.contains("line")) {
    auto v = numbers(t.at("line"), 3, "target line");
    out.kind = Target::Kind::Line;
    out.line = ProjLine(Vec3(v[0], v[1], v[2]));
  } else if (t.contains("flag")) {
    out.kind = Target::Kind::FlagT;
    out.flag = parse_flag(t.at("flag"));
  } else {
    fail(Err::BadConfig, "target needs \"point\", \"line\" or \"flag\"");
  }
  return out;
}

}  // namespace

extern "C" {

const char* flagdyn_status_name(int status) {
  switch (status) {
    case FLAGDYN_OK: return "ok";
    case FLAGDYN_ERR_JSON: return "JsonError";
    case FLAGDYN_ERR_UNKNOWN: return "Unknown";
    default:
      if (status >= 1 && status <= 20) return err_name(static_cast<Err>(status - 1));
      return "Unknown";
  }
}

const char* flagdyn_last_error(void) { return t_last_error.c_str(); }

void flagdyn_string_free(char* s) { std::free(s); }

int flagdyn_classify(const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    json req = json::parse(request);
    if (req.value("sequence", false)) {
      GroupElement g = parse_element(req);
      int n_probe = req.value("n_probe", 5);
      SequenceClassification sc =
          classify_sequence([g](int n) { return g.pow(n); }, n_probe);
      Jo jo;
      if (sc.type)
        jo.s("type", asym_name(*sc.type));
      else
        jo.f("type", "null");
      jo.f("probes", jarr_int(sc.probes));
      jo.f("ratio_ab", jarr(sc.ratio_ab.data(), int(sc.ratio_ab.size())));
      jo.f("ratio_bc", jarr(sc.ratio_bc.data(), int(sc.ratio_bc.size())));
      return jo.str();
    }
    IterateClassification c = classify_iterates(parse_element(req));
    Jo jo;
    using K = IterateClassification::Kind;
    if (c.kind == K::Bounded)
      jo.s("type", "bounded");
    else if (c.kind == K::NotSimple)
      jo.s("type", "not_simple");
    else
      jo.s("type", asym_name(c.type));
    jo.b("loxodromic", c.loxodromic());
    return jo.str();
  });
}

int flagdyn_lox_objects(const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    json req = json::parse(request);
    LoxObjects o = lox_objects(parse_element(req));
    Jo jo;
    jo.f("p_plus", jarr(o.p_plus.rep));
    jo.f("p_saddle", jarr(o.p_saddle.rep));
    jo.f("p_minus", jarr(o.p_minus.rep));
    jo.f("d_plus", jarr(o.d_plus.normal));
    jo.f("d_minus", jarr(o.d_minus.normal));
    const double lam[3] = {o.lam_plus, o.lam_saddle, o.lam_minus};
    jo.f("eigenvalues", jarr(lam, 3));
    return jo.str();
  });
}

int flagdyn_predict(const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    json req = json::parse(request);
    DynObjects obj = objects_for(parse_element(req), req.value("n_probe", 5));
    double delta = req.value("delta", kLocusDelta);
    Target t = parse_target(req);
    LimitSetDescriptor d = t.kind == Target::Kind::Point ? predict_dynamic_set(obj, t.point, delta)
                           : t.kind == Target::Kind::Line
                               ? predict_dynamic_set(obj, t.line, delta)
                               : predict_dynamic_set(obj, t.flag, delta);
    return descriptor_json(d);
  });
}

int flagdyn_verify_dynamics(const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    json req = json::parse(request);
    GroupElement g = parse_element(req);
    DynObjects obj = objects_for(g, req.value("n_probe", 5));
    double delta = req.value("delta", kLocusDelta);
    Target t = parse_target(req);

    OracleConfig cfg;
    cfg.trials = req.value("trials", cfg.trials);
    cfg.n_max = req.value("n_max", cfg.n_max);
    cfg.seed = req.value("seed", cfg.seed);
    int m = req.value("samples", 64);
    auto seq = [g](int n) { return g.pow(n); };

    LimitSetDescriptor d;
    SampledCompact oracle;
    if (t.kind == Target::Kind::Point) {
      d = predict_dynamic_set(obj, t.point, delta);
      oracle = empirical_dynamic_set(seq, t.point, cfg);
    } else if (t.kind == Target::Kind::Line) {
      d = predict_dynamic_set(obj, t.line, delta);
      oracle = empirical_dynamic_set(seq, t.line, cfg);
    } else {
      d = predict_dynamic_set(obj, t.flag, delta);
      oracle = empirical_dynamic_set(seq, t.flag, cfg);
    }
    SampledCompact pred = sample_descriptor(d, m);
    double to_pred = directed_hausdorff(oracle, pred);
    double from_pred = directed_hausdorff(pred, oracle);
    Jo jo;
    jo.f("prediction", descriptor_json(d));
    jo.d("oracle_to_prediction", to_pred);
    jo.d("prediction_to_oracle", from_pred);
    jo.i("oracle_points", long(oracle.size()));
    jo.i("prediction_points", long(pred.size()));
    return jo.str();
  });
}

int flagdyn_lyapunov(const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    json req = json::parse(request);
    OrientedFlag p =
        req.contains("point")
            ? parse_oriented(req.at("point"))
            : chart_map(ChartPoint{1, Vec3(0.3, 0.2, 0.1)});
    double T = req.value("t", 40.0);
    double dt = req.value("dt", 0.05);
    bool forward = req.value("forward", true);
    ExponentTriple e = lyapunov(p, T, dt, forward);
    Jo jo;
    jo.f("point", enc_oriented(p));
    jo.d("t", T);
    jo.d("dt", dt);
    jo.b("forward", forward);
    jo.d("lambda_c", e.lambda_c);
    jo.d("lambda_alpha", e.lambda_alpha);
    jo.d("lambda_beta", e.lambda_beta);
    return jo.str();
  });
}

int flagdyn_charts(const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    json req = json::parse(request);
    int chart = req.value("chart", 1);
    auto v = numbers(req.at("coords"), 3, "coords");
    ChartPoint c{chart, Vec3(v[0], v[1], v[2])};
    OrientedFlag f = chart_map(c);
    ChartPoint back = chart_inverse(chart, f);
    Jo jo;
    jo.i("chart", chart);
    jo.f("coords", jarr(c.coords));
    jo.f("dir", jarr(f.dir));
    jo.f("conormal", jarr(f.conormal));
    jo.f("roundtrip", jarr(back.coords));
    try {
      Vec3 other = chart == 1 ? transition_12(c.coords) : transition_21(c.coords);
      jo.f("other_coords", jarr(other));
      ChartPoint via = chart_inverse(chart == 1 ? 2 : 1, f);
      jo.f("other_via_flag", jarr(via.coords));
    } catch (const Error& e) {
      if (e.code() != Err::OutOfChartDomain) throw;
      jo.f("other_coords", "null");
    }
    return jo.str();
  });
}

}  // extern "C"

struct flagdyn_group {
  ValidatedGenerators validated;
  std::optional<SchottkyGroup> built;
  double density = 0.15;
  long long seed = 0;
};

namespace {

SchottkyGroup& need_built(flagdyn_group* g) {
  if (!g || !g->built) fail(Err::BadConfig, "group not assembled; run certify first");
  return *g->built;
}

SchottkyGroup& need_certified(flagdyn_group* g) {
  SchottkyGroup& s = need_built(g);
  if (!s.certificate) fail(Err::BadConfig, "group not certified");
  return s;
}

std::string certificate_json(const SchottkyGroup& g) {
  const PingPongCertificate& c = *g.certificate;
  Jo jo;
  jo.b("certified", true);
  jo.d("margin", c.margin);
  jo.f("exponents", jarr_int(c.exponents));
  jo.d("tube_radius", g.tube_radius);
  jo.d("density", c.sample_density);
  jo.i("checked", c.checked_pairs);
  return jo.str();
}

}  // namespace

extern "C" {

int flagdyn_group_create(const char* config, flagdyn_group** out) {
  if (out) *out = nullptr;
  return run(nullptr, [&]() -> std::string {
    if (!out) fail(Err::BadConfig, "null output handle");
    json cfg = json::parse(config);
    std::vector<GeneratorInput> inputs;
    for (const json& g : cfg.at("generators")) {
      if (g.contains("sl2"))
        inputs.push_back(GeneratorInput::from_sl2(parse_mat2(g.at("sl2"))));
      else if (g.contains("pgl3"))
        inputs.push_back(GeneratorInput::from_pgl3(parse_mat3(g.at("pgl3"))));
      else
        fail(Err::BadConfig, "generator needs \"sl2\" or \"pgl3\"");
    }
    auto h = std::make_unique<flagdyn_group>();
    h->validated = validate_generators(inputs);
    h->density = cfg.value("density", 0.15);
    h->seed = cfg.value("seed", 0LL);
    if (cfg.contains("exponents") && cfg.contains("tube_radius")) {
      std::vector<int> exps = cfg.at("exponents").get<std::vector<int>>();
      h->built = build_group(h->validated, exps, cfg.at("tube_radius").get<double>(), h->density);
    }
    *out = h.release();
    return std::string();
  });
}

void flagdyn_group_destroy(flagdyn_group* g) { delete g; }

int flagdyn_group_describe(const flagdyn_group* g, char** reply) {
  return run(reply, [&]() -> std::string {
    if (!g) fail(Err::BadConfig, "null group");
    Jo jo;
    jo.i("generators", g->validated.d());
    jo.b("all_sl2", g->validated.all_sl2);
    jo.b("assembled", bool(g->built));
    if (g->built) {
      jo.f("exponents", jarr_int(g->built->exponents));
      jo.d("tube_radius", g->built->tube_radius);
      jo.b("certified", bool(g->built->certificate));
      if (g->built->certificate) jo.d("margin", g->built->certificate->margin);
    }
    return jo.str();
  });
}

int flagdyn_group_certify(flagdyn_group* g, const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    if (!g) fail(Err::BadConfig, "null group");
    json req = request && *request ? json::parse(request) : json::object();
    double density = req.value("density", g->density);
    if (req.contains("exponents") && req.contains("tube_radius")) {
      std::vector<int> exps = req.at("exponents").get<std::vector<int>>();
      double rho = req.at("tube_radius").get<double>();
      CertifyResult res = certify_pingpong(g->validated, exps, rho, density);
      g->built = build_group(g->validated, exps, rho, density);
      if (const auto* fr = std::get_if<FailureReport>(&res)) {
        Jo jo;
        jo.b("certified", false);
        jo.s("what", fr->what);
        jo.d("slack", fr->slack);
        jo.f("sample", enc_flag(fr->sample));
        return jo.str();
      }
      return certificate_json(*g->built);
    }
    int rmax = req.value("rmax", 16);
    std::vector<double> grid = req.contains("radius_grid")
                                   ? req.at("radius_grid").get<std::vector<double>>()
                                   : default_radius_grid();
    SearchResult sr = search_exponents(g->validated, rmax, grid, density);
    g->built = build_group(g->validated, sr.exponents, sr.tube_radius, density);
    return certificate_json(*g->built);
  });
}

int flagdyn_group_limit_set(flagdyn_group* g, const char* request, char** reply, char** csv) {
  if (csv) *csv = nullptr;
  return run(reply, [&]() -> std::string {
    SchottkyGroup& sg = need_certified(g);
    json req = json::parse(request);
    int depth = req.at("depth").get<int>();
    int m = req.value("samples_per_circle", 32);
    LimitSetCloud cloud = limit_set(sg, depth, m);
    int converged = 0;
    for (const LimitEntry& e : cloud.entries) converged += e.converged ? 1 : 0;
    Jo jo;
    jo.i("depth", depth);
    jo.i("entries", long(cloud.entries.size()));
    jo.i("converged", converged);
    jo.i("samples", long(cloud.cloud.size()));
    jo.b("all_sl2", sg.all_sl2);
    if (req.value("components", false)) {
      jo.i("components", cloud.component_count_at(sg.tube_radius / 4));
      jo.d("component_scale", sg.tube_radius / 4);
    }
    if (csv) *csv = dup(cloud.to_csv());
    return jo.str();
  });
}

int flagdyn_group_reduce(flagdyn_group* g, const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    SchottkyGroup& sg = need_certified(g);
    json req = json::parse(request);
    Flag x = parse_flag(req.at("flag"));
    int max_steps = req.value("max_steps", 100);
    Jo jo;
    try {
      ReduceOutcome r = reduce_to_fundamental_domain(sg, x, max_steps);
      jo.b("in_omega", true);
      jo.s("word", r.word.str());
      jo.f("flag", enc_flag(r.flag));
      jo.i("steps", r.steps);
    } catch (const Error& e) {
      if (e.code() != Err::NearLimitSet) throw;
      jo.b("in_omega", false);
      jo.i("steps", max_steps);
    }
    return jo.str();
  });
}

int flagdyn_group_fate(flagdyn_group* g, const char* request, char** reply) {
  return run(reply, [&]() -> std::string {
    SchottkyGroup& sg = need_certified(g);
    json req = json::parse(request);
    Flag x = parse_flag(req.at("flag"));
    FateResult r = geodesic_fate(sg, x, req.value("depth", 6), req.value("eps", 0.05),
                                 req.value("forward", true), req.value("max_steps", 200));
    Jo jo;
    using K = FateResult::Kind;
    jo.s("kind", r.kind == K::Escapes     ? "escapes"
                 : r.kind == K::Recurrent ? "recurrent"
                                          : "undetermined");
    jo.f("limit", enc_flag(r.limit));
    jo.d("dist_to_limit_set", r.dist_to_limit_set);
    return jo.str();
  });
}

int flagdyn_group_orbit(flagdyn_group* g, const char* request, char** reply, char** csv) {
  if (csv) *csv = nullptr;
  return run(reply, [&]() -> std::string {
    SchottkyGroup& sg = need_certified(g);
    json req = json::parse(request);
    Flag x = parse_flag(req.at("flag"));
    double t_max = req.at("t_max").get<double>();
    double dt = req.value("dt", 0.1);
    std::vector<OrbitPoint> orbit = quotient_orbit(sg, x, t_max, dt);
    if (csv) {
      std::string body;
      for (const OrbitPoint& p : orbit) {
        body += g17(p.t);
        const double v[6] = {p.flag.point.rep[0],  p.flag.point.rep[1],  p.flag.point.rep[2],
                             p.flag.line.normal[0], p.flag.line.normal[1], p.flag.line.normal[2]};
        for (double w : v) {
          body += ',';
          body += g17(w);
        }
        body += ',';
        body += p.word.str();
        body += '\n';
      }
      *csv = dup(body);
    }
    Jo jo;
    jo.i("rows", long(orbit.size()));
    jo.s("final_word", orbit.back().word.str());
    jo.f("final_flag", enc_flag(orbit.back().flag));
    return jo.str();
  });
}

}  // extern "C"

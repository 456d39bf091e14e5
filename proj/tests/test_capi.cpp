#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "flagdyn.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Reply {
  char* s = nullptr;
  ~Reply() { flagdyn_string_free(s); }
  json parse() const { return json::parse(s); }
};

flagdyn_group* certified_pair() {
  static flagdyn_group* g = [] {
    flagdyn_group* h = nullptr;
    const char* cfg =
        R"({"generators":[{"sl2":[[2,0],[0,0.5]]},{"sl2":[[1.25,0.75],[0.75,1.25]]}]})";
    REQUIRE(flagdyn_group_create(cfg, &h) == FLAGDYN_OK);
    Reply r;
    REQUIRE(flagdyn_group_certify(h, "{}", &r.s) == FLAGDYN_OK);
    REQUIRE(r.parse().at("certified") == true);
    return h;
  }();
  return g;
}

}  // namespace

TEST_CASE("status names cover library, json, and unknown errors") {
  CHECK(std::string(flagdyn_status_name(FLAGDYN_OK)) == "ok");
  CHECK(std::string(flagdyn_status_name(FLAGDYN_ERR_SINGULAR_INPUT)) == "SingularInput");
  CHECK(std::string(flagdyn_status_name(FLAGDYN_ERR_NOT_HYPERBOLIC)) == "NotHyperbolic");
  CHECK(std::string(flagdyn_status_name(FLAGDYN_ERR_BAD_CONFIG)) == "BadConfig");
  CHECK(std::string(flagdyn_status_name(FLAGDYN_ERR_JSON)) == "JsonError");
  CHECK(std::string(flagdyn_status_name(9999)) == "Unknown");
}

TEST_CASE("classify: matrix path matches the documented shape exactly") {
  Reply r;
  REQUIRE(flagdyn_classify(R"({"pgl3":[4,0,0,0,2,0,0,0,1]})", &r.s) == FLAGDYN_OK);
  CHECK(std::string(r.s) == R"({"type":"balanced","loxodromic":true})");

  Reply r2;
  REQUIRE(flagdyn_classify(R"({"sl2":[2,0,0,0.5]})", &r2.s) == FLAGDYN_OK);
  CHECK(std::string(r2.s) == R"({"type":"balanced","loxodromic":true})");

  Reply rb;
  REQUIRE(flagdyn_classify(R"({"pgl3":[2,0,0,0,2,0,0,0,1]})", &rb.s) == FLAGDYN_OK);
  CHECK(rb.parse().at("type") == "beta");
  CHECK(rb.parse().at("loxodromic") == false);

  Reply ra;
  REQUIRE(flagdyn_classify(R"({"pgl3":[4,0,0,0,2,0,0,0,2]})", &ra.s) == FLAGDYN_OK);
  CHECK(ra.parse().at("type") == "alpha");

  Reply ri;
  REQUIRE(flagdyn_classify(R"({"pgl3":[1,0,0,0,1,0,0,0,1]})", &ri.s) == FLAGDYN_OK);
  CHECK(ri.parse().at("type") == "bounded");

  Reply rn;
  REQUIRE(flagdyn_classify(R"({"pgl3":[-4,0,0,0,2,0,0,0,1]})", &rn.s) == FLAGDYN_OK);
  CHECK(rn.parse().at("type") == "not_simple");

  // identical requests produce byte-identical replies
  Reply again;
  REQUIRE(flagdyn_classify(R"({"pgl3":[4,0,0,0,2,0,0,0,1]})", &again.s) == FLAGDYN_OK);
  CHECK(std::strcmp(r.s, again.s) == 0);
}

TEST_CASE("classify: sequence path reports ratio fates") {
  Reply r;
  REQUIRE(flagdyn_classify(R"({"pgl3":[4,0,0,0,2,0,0,0,1],"sequence":true})", &r.s) ==
          FLAGDYN_OK);
  json j = r.parse();
  CHECK(j.at("type") == "balanced");
  REQUIRE(j.at("probes").is_array());
  CHECK(j.at("probes").size() >= 2);
  CHECK(j.at("ratio_ab").size() == j.at("probes").size());
  CHECK(j.at("ratio_bc").size() == j.at("probes").size());

  Reply rc;
  REQUIRE(flagdyn_classify(R"({"pgl3":[1,0,0,0,1,0,0,0,1],"sequence":true})", &rc.s) ==
          FLAGDYN_OK);
  CHECK(rc.parse().at("type").is_null());
}

TEST_CASE("error paths set status, message, and null reply") {
  Reply r;
  CHECK(flagdyn_classify(R"({"pgl3":[0,0,0,0,0,0,0,0,0]})", &r.s) ==
        FLAGDYN_ERR_SINGULAR_INPUT);
  CHECK(r.s == nullptr);
  CHECK(std::strlen(flagdyn_last_error()) > 0);

  Reply rj;
  CHECK(flagdyn_classify("{нот json", &rj.s) == FLAGDYN_ERR_JSON);
  CHECK(rj.s == nullptr);

  Reply rl;
  CHECK(flagdyn_lox_objects(R"({"pgl3":[2,0,0,0,2,0,0,0,1]})", &rl.s) ==
        FLAGDYN_ERR_NOT_LOXODROMIC);

  Reply rm;
  CHECK(flagdyn_classify(R"({"sl2":[1,2,3]})", &rm.s) != FLAGDYN_OK);
}

TEST_CASE("lox objects of a diagonal element") {
  Reply r;
  REQUIRE(flagdyn_lox_objects(R"({"pgl3":[4,0,0,0,2,0,0,0,1]})", &r.s) == FLAGDYN_OK);
  json j = r.parse();
  CHECK(j.at("p_plus")[0].get<double>() == 1.0);
  CHECK(j.at("p_plus")[1].get<double>() == 0.0);
  CHECK(j.at("p_saddle")[1].get<double>() == 1.0);
  CHECK(j.at("p_minus")[2].get<double>() == 1.0);
  CHECK(j.at("d_plus")[2].get<double>() == 1.0);   // line [e1,e2]
  CHECK(j.at("d_minus")[0].get<double>() == 1.0);  // line [e2,e3]
  // eigenvalues of the det-normalized representative
  CHECK(j.at("eigenvalues")[0].get<double>() == doctest::Approx(2.0));
  CHECK(j.at("eigenvalues")[2].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("predict covers point, line, and flag targets") {
  Reply r;
  REQUIRE(flagdyn_predict(
              R"({"pgl3":[4,0,0,0,2,0,0,0,1],"target":{"point":[1,1,1]}})", &r.s) ==
          FLAGDYN_OK);
  json j = r.parse();
  CHECK(j.at("kind") == "point");
  CHECK(j.at("point")[0].get<double>() == 1.0);

  Reply rw;
  REQUIRE(flagdyn_predict(
              R"({"pgl3":[4,0,0,0,2,0,0,0,1],"target":{"point":[0,0,1]}})", &rw.s) ==
          FLAGDYN_OK);
  CHECK(rw.parse().at("kind") == "whole_rp2");

  // alpha-type iterates send a generic line to a single dual point
  Reply ra;
  REQUIRE(flagdyn_predict(
              R"({"pgl3":[4,0,0,0,2,0,0,0,2],"target":{"line":[1,1,1]}})", &ra.s) ==
          FLAGDYN_OK);
  json ja = ra.parse();
  CHECK(ja.at("kind") == "dual_point");
  CHECK(std::abs(ja.at("line")[0].get<double>()) < 1e-12);  // passes through [e1]

  // beta-type iterates project points onto the attracting line
  Reply rp;
  REQUIRE(flagdyn_predict(
              R"({"pgl3":[2,0,0,0,2,0,0,0,1],"target":{"point":[1,0,1]}})", &rp.s) ==
          FLAGDYN_OK);
  json jp = rp.parse();
  CHECK(jp.at("kind") == "point");
  CHECK(jp.at("point")[0].get<double>() == 1.0);
  CHECK(jp.at("point")[2].get<double>() == 0.0);

  Reply rf;
  REQUIRE(flagdyn_predict(
              R"({"pgl3":[4,0,0,0,2,0,0,0,1],"target":{"flag":[1,0,1,0,1,0]}})", &rf.s) ==
          FLAGDYN_OK);
  CHECK(rf.parse().at("kind") == "circle_alpha");

  Reply rerr;
  CHECK(flagdyn_predict(R"({"pgl3":[4,0,0,0,2,0,0,0,1]})", &rerr.s) != FLAGDYN_OK);
}

TEST_CASE("verify_dynamics reports two-sided oracle gaps") {
  Reply r;
  REQUIRE(flagdyn_verify_dynamics(
              R"({"pgl3":[4,0,0,0,2,0,0,0,1],"target":{"point":[1,1,1]},)"
              R"("trials":20,"samples":16})",
              &r.s) == FLAGDYN_OK);
  json j = r.parse();
  CHECK(j.at("prediction").at("kind") == "point");
  CHECK(j.at("oracle_to_prediction").get<double>() < 0.01);
  CHECK(j.at("prediction_to_oracle").get<double>() < 0.01);
  CHECK(j.at("oracle_points").get<int>() > 0);
  CHECK(j.at("prediction_points").get<int>() > 0);
}

TEST_CASE("lyapunov endpoint uses the documented defaults") {
  Reply r;
  REQUIRE(flagdyn_lyapunov("{}", &r.s) == FLAGDYN_OK);
  json j = r.parse();
  CHECK(j.at("t").get<double>() == 40.0);
  CHECK(j.at("dt").get<double>() == 0.05);
  CHECK(j.at("forward") == true);
  CHECK(j.at("lambda_c").get<double>() == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(j.at("lambda_alpha").get<double>() == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(std::abs(j.at("lambda_beta").get<double>()) < 0.05);

  Reply rb;
  REQUIRE(flagdyn_lyapunov(R"({"forward":false,"t":30})", &rb.s) == FLAGDYN_OK);
  json jb = rb.parse();
  CHECK(jb.at("lambda_c").get<double>() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::abs(jb.at("lambda_alpha").get<double>()) < 0.05);
  CHECK(jb.at("lambda_beta").get<double>() == doctest::Approx(1.0).epsilon(0.05));

  Reply re;
  CHECK(flagdyn_lyapunov(R"({"point":[1,0,0,0,0,1]})", &re.s) == FLAGDYN_ERR_ON_FIXED_SET);
}

TEST_CASE("charts reply includes transition where defined") {
  Reply r;
  REQUIRE(flagdyn_charts(R"({"chart":1,"coords":[1,2,3]})", &r.s) == FLAGDYN_OK);
  json j = r.parse();
  CHECK(j.at("roundtrip")[0].get<double>() == doctest::Approx(1.0));
  CHECK(j.at("roundtrip")[2].get<double>() == doctest::Approx(3.0));
  CHECK(j.at("other_coords")[0].get<double>() == doctest::Approx(0.5));
  CHECK(j.at("other_coords")[1].get<double>() == doctest::Approx(0.5));
  CHECK(j.at("other_coords")[2].get<double>() == doctest::Approx(3.0));
  CHECK(j.at("other_via_flag")[0].get<double>() == doctest::Approx(0.5));

  Reply rn;
  REQUIRE(flagdyn_charts(R"({"chart":1,"coords":[1,0,3]})", &rn.s) == FLAGDYN_OK);
  CHECK(rn.parse().at("other_coords").is_null());

  Reply re;
  CHECK(flagdyn_charts(R"({"chart":7,"coords":[0,0,0]})", &re.s) == FLAGDYN_ERR_BAD_CONFIG);
}

TEST_CASE("group lifecycle: create, certify, describe") {
  flagdyn_group* g = certified_pair();
  Reply d;
  REQUIRE(flagdyn_group_describe(g, &d.s) == FLAGDYN_OK);
  json j = d.parse();
  CHECK(j.at("generators") == 2);
  CHECK(j.at("all_sl2") == true);
  CHECK(j.at("assembled") == true);
  CHECK(j.at("certified") == true);
  CHECK(j.at("exponents").size() == 2);
  CHECK(j.at("margin").get<double>() > 0);
  CHECK(j.at("tube_radius").get<double>() > 0);

  // invalid generators are rejected at creation
  flagdyn_group* bad = reinterpret_cast<flagdyn_group*>(0x1);
  CHECK(flagdyn_group_create(R"({"generators":[{"sl2":[[1,1],[0,1]]}]})", &bad) ==
        FLAGDYN_ERR_NOT_HYPERBOLIC);
  CHECK(bad == nullptr);

  // operations before assembly are refused
  flagdyn_group* fresh = nullptr;
  REQUIRE(flagdyn_group_create(R"({"generators":[{"sl2":[[2,0],[0,0.5]]}]})", &fresh) ==
          FLAGDYN_OK);
  Reply lim;
  CHECK(flagdyn_group_limit_set(fresh, R"({"depth":2})", &lim.s, nullptr) ==
        FLAGDYN_ERR_BAD_CONFIG);
  flagdyn_group_destroy(fresh);

  // a failed explicit certification is a reply, not an error
  flagdyn_group* weak = nullptr;
  REQUIRE(flagdyn_group_create(R"({"generators":[{"sl2":[[1.05,0],[0,0.9523809523809523]]}]})",
                               &weak) == FLAGDYN_OK);
  Reply w;
  REQUIRE(flagdyn_group_certify(weak, R"({"exponents":[1],"tube_radius":0.2,"density":0.3})",
                                &w.s) == FLAGDYN_OK);
  json jw = w.parse();
  CHECK(jw.at("certified") == false);
  CHECK(jw.at("slack").get<double>() <= 0);
  flagdyn_group_destroy(weak);
}

TEST_CASE("limit set reply and csv are deterministic") {
  flagdyn_group* g = certified_pair();
  Reply r;
  char* csv = nullptr;
  REQUIRE(flagdyn_group_limit_set(g, R"({"depth":3,"components":true})", &r.s, &csv) ==
          FLAGDYN_OK);
  REQUIRE(csv != nullptr);
  json j = r.parse();
  CHECK(j.at("depth") == 3);
  CHECK(j.at("entries") == 36);
  CHECK(j.at("converged") == 36);
  CHECK(j.at("samples") == 36 * 64);
  // quarter-radius linkage merges sibling bouquets within each generator tube
  CHECK(j.at("components") == 4);
  CHECK(j.at("all_sl2") == true);

  std::string body(csv);
  CHECK(body.rfind("1+1+1+,", 0) == 0);  // lexicographically first word
  CHECK(std::count(body.begin(), body.end(), '\n') == 36 * 64);

  Reply r2;
  char* csv2 = nullptr;
  REQUIRE(flagdyn_group_limit_set(g, R"({"depth":3,"components":true})", &r2.s, &csv2) ==
          FLAGDYN_OK);
  CHECK(std::strcmp(r.s, r2.s) == 0);
  CHECK(std::strcmp(csv, csv2) == 0);
  flagdyn_string_free(csv);
  flagdyn_string_free(csv2);
}

TEST_CASE("reduce, fate, and orbit on the certified pair") {
  flagdyn_group* g = certified_pair();

  Reply red;
  REQUIRE(flagdyn_group_reduce(g, R"({"flag":[1,0,1,-1,0,1]})", &red.s) == FLAGDYN_OK);
  json jr = red.parse();
  CHECK(jr.at("in_omega") == true);
  CHECK(jr.at("word").is_string());
  CHECK(jr.at("steps").get<int>() >= 0);
  CHECK(jr.at("flag").size() == 6);

  // the attracting flag of the first generator never reduces
  Reply stick;
  REQUIRE(flagdyn_group_reduce(g, R"({"flag":[1,0,0,0,0,1],"max_steps":25})", &stick.s) ==
          FLAGDYN_OK);
  CHECK(stick.parse().at("in_omega") == false);
  CHECK(stick.parse().at("steps") == 25);

  // endpoint in a gap of the limit set escapes
  json freq;
  double c = std::cos(3.14159265358979 / 8), s = std::sin(3.14159265358979 / 8);
  // line through the lifted point and (0.2, 0.1, -0.3)
  double p[3] = {c, s, 0.5}, q[3] = {0.2, 0.1, -0.3};
  double n[3] = {p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2],
                 p[0] * q[1] - p[1] * q[0]};
  freq["flag"] = {p[0], p[1], p[2], n[0], n[1], n[2]};
  freq["depth"] = 4;
  freq["eps"] = 0.05;
  Reply fate;
  REQUIRE(flagdyn_group_fate(g, freq.dump().c_str(), &fate.s) == FLAGDYN_OK);
  json jf = fate.parse();
  CHECK(jf.at("kind") == "escapes");
  CHECK(jf.at("dist_to_limit_set").get<double>() > 0.02);
  CHECK(jf.at("limit").size() == 6);

  json oreq;
  oreq["flag"] = {p[0], p[1], p[2], n[0], n[1], n[2]};
  oreq["t_max"] = 1.0;
  oreq["dt"] = 0.5;
  Reply orb;
  char* ocsv = nullptr;
  REQUIRE(flagdyn_group_orbit(g, oreq.dump().c_str(), &orb.s, &ocsv) == FLAGDYN_OK);
  REQUIRE(ocsv != nullptr);
  json jo = orb.parse();
  CHECK(jo.at("rows") == 3);
  CHECK(std::count(ocsv, ocsv + std::strlen(ocsv), '\n') == 3);
  CHECK(jo.at("final_flag").size() == 6);
  flagdyn_string_free(ocsv);

  Reply err;
  CHECK(flagdyn_group_fate(g, R"({"flag":[1,1,0,0,0,1],"depth":3})", &err.s) ==
        FLAGDYN_ERR_NOT_IN_DOMAIN);
}

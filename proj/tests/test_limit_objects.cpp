#include <cmath>

#include "doctest.h"
#include "flagdyn/limit_objects.hpp"
#include "helpers.hpp"

using namespace flagdyn;
using flagdyn::testing::thrown;

namespace {

const Vec3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);

GroupElement diag(double a, double b, double c) {
  return GroupElement(Vec3(a, b, c).asDiagonal().toDenseMatrix());
}

// the three model sequences, in standard position
GroupElement balanced_seq(int n) { return diag(1, std::pow(2.0, -n), std::pow(4.0, -n)); }
GroupElement alpha_seq(int n) { return diag(1, 1.0 / n, 1.0 / (2 * n)); }
GroupElement beta_seq(int n) { return diag(std::exp(double(n)), std::exp(double(n)), 1); }

using K = LimitSetDescriptor::Kind;

}  // namespace

TEST_CASE("eigen objects of a loxodromic element") {
  LoxObjects o = lox_objects(diag(4, 2, 1));
  CHECK(dist(o.p_plus, ProjPoint(e1)) < 1e-12);
  CHECK(dist(o.p_saddle, ProjPoint(e2)) < 1e-12);
  CHECK(dist(o.p_minus, ProjPoint(e3)) < 1e-12);
  CHECK(dist(o.d_minus, ProjLine(e1)) < 1e-12);  // [e2,e3]
  CHECK(dist(o.d_plus, ProjLine(e3)) < 1e-12);   // [e1,e2]

  Mat2 h;
  h << 1.25, 0.75, 0.75, 1.25;
  LoxObjects oj = lox_objects(embed_j(h));
  CHECK(dist(oj.p_plus, ProjPoint(Vec3(1, 1, 0))) < 1e-12);
  CHECK(dist(oj.p_minus, ProjPoint(Vec3(1, -1, 0))) < 1e-12);
  CHECK(dist(oj.p_saddle, ProjPoint(e3)) < 1e-12);

  CHECK(thrown([] { lox_objects(diag(2, 1, 1)); }) == Err::NotLoxodromic);
  CHECK(thrown([] { lox_objects(diag(-4, 2, 1)); }) == Err::NotLoxodromic);
}

TEST_CASE("inverse swaps attractive and repulsive objects") {
  Rng rng(211);
  for (int i = 0; i < 20; ++i) {
    GroupElement h = random_group(rng);
    GroupElement g = h * diag(5, 2, 0.4) * h.inverse();
    LoxObjects o = lox_objects(g), oi = lox_objects(g.inverse());
    CHECK(dist(o.p_plus, oi.p_minus) < 1e-9);
    CHECK(dist(o.p_minus, oi.p_plus) < 1e-9);
    CHECK(dist(o.d_plus, oi.d_minus) < 1e-9);
    CHECK(dist(o.d_minus, oi.d_plus) < 1e-9);
    CHECK(dist(o.p_saddle, oi.p_saddle) < 1e-9);
  }
}

TEST_CASE("balanced objects from the power sequence match eigendata") {
  GroupElement g = diag(4, 2, 1);
  BalancedObjects ref = lox_objects(g).balanced();
  BalancedObjects est = balanced_objects_of_sequence([g](int n) { return g.pow(n); });
  CHECK(dist(est.p_plus, ref.p_plus) < 1e-6);
  CHECK(dist(est.p_minus, ref.p_minus) < 1e-6);
  CHECK(dist(est.d_plus, ref.d_plus) < 1e-6);
  CHECK(dist(est.d_minus, ref.d_minus) < 1e-6);

  BalancedObjects std_pos = balanced_objects_of_sequence(balanced_seq);
  CHECK(dist(std_pos.p_plus, ProjPoint(e1)) < 1e-12);
  CHECK(dist(std_pos.d_plus, ProjLine(e3)) < 1e-12);
  CHECK(dist(std_pos.p_minus, ProjPoint(e3)) < 1e-12);
  CHECK(dist(std_pos.d_minus, ProjLine(e1)) < 1e-12);

  // left rotation translates the attractive objects only
  GroupElement k0(rotation_about(Vec3(0, 1, 1).normalized(), 0.6));
  BalancedObjects moved = balanced_objects_of_sequence([&](int n) { return k0 * g.pow(n); });
  CHECK(dist(moved.p_plus, act(k0, ref.p_plus)) < 1e-6);
  CHECK(dist(moved.d_plus, act(k0, ref.d_plus)) < 1e-6);
  CHECK(dist(moved.p_minus, ref.p_minus) < 1e-6);

  // probes that keep moving are refused
  CHECK(thrown([&] {
          balanced_objects_of_sequence(
              [&](int n) { return GroupElement(rotation_about(e3, 0.1 * n)) * g.pow(5); });
        }) == Err::NonConvergent);
}

TEST_CASE("unbalanced objects of the model sequences") {
  UnbalancedBetaObjects b = beta_objects_of_sequence(beta_seq);
  CHECK(dist(b.p_minus, ProjPoint(e3)) < 1e-12);
  CHECK(dist(b.d_plus, ProjLine(e3)) < 1e-12);
  CHECK(std::abs(b.lambda_inf - 1.0) < 1e-9);

  UnbalancedAlphaObjects a = alpha_objects_of_sequence(alpha_seq, 19);
  CHECK(dist(a.p_plus, ProjPoint(e1)) < 1e-12);
  CHECK(dist(a.d_minus, ProjLine(e1)) < 1e-12);
  CHECK(std::abs(a.lambda_inf - 0.5) < 1e-9);

  // duality: repulsive data of the inverse sequence are the attractive data
  UnbalancedAlphaObjects ai =
      alpha_objects_of_sequence([](int n) { return beta_seq(n).inverse(); });
  CHECK(dist(ai.p_plus, b.p_minus) < 1e-9);
  CHECK(dist(ai.d_minus, b.d_plus) < 1e-9);
}

TEST_CASE("limit maps on the exceptional loci") {
  UnbalancedAlphaObjects a = alpha_objects_of_sequence(alpha_seq, 19);
  // point on d_minus maps to the line joining p_plus and a_inf * p
  ProjLine l = ghat_infty(a, ProjPoint(Vec3(0, 1, 1)));
  CHECK(dist(l, join(ProjPoint(e1), ProjPoint(Vec3(0, 2, 1)))) < 1e-9);
  CHECK(thrown([&] { ghat_infty(a, ProjPoint(Vec3(1, 1, 1))); }) == Err::DomainViolation);

  UnbalancedBetaObjects b = beta_objects_of_sequence(beta_seq);
  ProjPoint q = gbar_infty(b, ProjPoint(Vec3(1, 0, 1)));
  CHECK(dist(q, ProjPoint(e1)) < 1e-9);
  CHECK(thrown([&] { gbar_infty(b, ProjPoint(e3)); }) == Err::DomainViolation);
}

TEST_CASE("fibration onto the attracting circle") {
  UnbalancedBetaObjects b = beta_objects_of_sequence(beta_seq);
  Flag x{ProjPoint(Vec3(1, 0, 1)), join(ProjPoint(Vec3(1, 0, 1)), ProjPoint(e2))};
  Flag px = phi_fibration(b, x);
  CHECK(dist(px, Flag{ProjPoint(e1), ProjLine(e3)}) < 1e-9);

  // on the exceptional circle the line of the flag decides the target
  Flag xc{ProjPoint(e3), join(ProjPoint(e3), ProjPoint(Vec3(1, 1, 0)))};
  Flag pxc = phi_fibration(b, xc);
  CHECK(dist(pxc, Flag{ProjPoint(Vec3(1, 1, 0)), ProjLine(e3)}) < 1e-9);

  // constant along fibers: same projected point => same image
  for (double t : {0.1, 0.7, 2.0}) {
    ProjPoint p(Vec3(1, 0, 1));
    Flag y{p, join(p, ProjPoint(Vec3(std::cos(t), std::sin(t), 0.3)))};
    CHECK(dist(phi_fibration(b, y), px) < 1e-9);
  }

  // alpha-type fibration lands on the circle of flags through p_plus
  UnbalancedAlphaObjects a = alpha_objects_of_sequence(alpha_seq, 19);
  Rng zr(3);
  Flag z = random_flag(zr);
  Flag pz = phi_fibration(a, z);
  CHECK(dist(pz.point, a.p_plus) < 1e-9);
}

TEST_CASE("theta dual transports beta objects to alpha objects") {
  UnbalancedBetaObjects b = beta_objects_of_sequence(beta_seq);
  UnbalancedAlphaObjects d = theta_dual(b);
  CHECK(dist(d.p_plus, tau_inv(b.d_plus)) < 1e-9);
  CHECK(dist(d.d_minus, tau(b.p_minus)) < 1e-9);
  CHECK(std::abs(d.lambda_inf - b.lambda_inf) < 1e-9);

  BalancedObjects bo = lox_objects(diag(4, 2, 1)).balanced();
  BalancedObjects dualo = theta_dual(bo);
  CHECK(dist(dualo.p_plus, tau_inv(bo.d_plus)) < 1e-12);
  CHECK(dist(dualo.d_plus, tau(bo.p_plus)) < 1e-12);
}

TEST_CASE("predicted dynamic sets: balanced case table") {
  DynObjects o = lox_objects(diag(4, 2, 1)).balanced();

  // points of the projective plane
  CHECK(predict_dynamic_set(o, ProjPoint(Vec3(1, 1, 1))).kind == K::PointP);
  CHECK(dist(predict_dynamic_set(o, ProjPoint(Vec3(1, 1, 1))).point, ProjPoint(e1)) < 1e-12);
  LimitSetDescriptor on_dm = predict_dynamic_set(o, ProjPoint(Vec3(0, 1, 1)));
  CHECK(on_dm.kind == K::LineP);
  CHECK(dist(on_dm.line, ProjLine(e3)) < 1e-12);
  CHECK(predict_dynamic_set(o, ProjPoint(e3)).kind == K::WholeRP2);

  // lines
  LimitSetDescriptor generic_line = predict_dynamic_set(o, ProjLine(Vec3(1, 1, 1)));
  CHECK(generic_line.kind == K::PointDual);
  CHECK(dist(generic_line.line, ProjLine(e3)) < 1e-12);
  LimitSetDescriptor through_pm = predict_dynamic_set(o, ProjLine(Vec3(1, 1, 0)));
  CHECK(through_pm.kind == K::DualPencil);
  CHECK(dist(through_pm.point, ProjPoint(e1)) < 1e-12);
  CHECK(predict_dynamic_set(o, ProjLine(e1)).kind == K::WholeRP2Dual);

  // flags: all six clauses
  Flag generic{ProjPoint(Vec3(1, 2, 3)), join(ProjPoint(Vec3(1, 2, 3)), ProjPoint(Vec3(-1, 1, 1)))};
  LimitSetDescriptor dgen = predict_dynamic_set(o, generic);
  CHECK(dgen.kind == K::PointX);
  CHECK(dist(dgen.flag, Flag{ProjPoint(e1), ProjLine(e3)}) < 1e-12);

  Flag in_sab{ProjPoint(Vec3(1, 0, 1)), join(ProjPoint(Vec3(1, 0, 1)), ProjPoint(e3))};
  CHECK(predict_dynamic_set(o, in_sab).kind == K::CircleAlpha);

  Flag in_sba{ProjPoint(Vec3(0, 1, 1)), join(ProjPoint(Vec3(0, 1, 1)), ProjPoint(Vec3(1, 1, 1)))};
  LimitSetDescriptor dsba = predict_dynamic_set(o, in_sba);
  CHECK(dsba.kind == K::CircleBeta);
  CHECK(dist(dsba.line, ProjLine(e3)) < 1e-12);

  Flag on_ca{ProjPoint(e3), join(ProjPoint(e3), ProjPoint(Vec3(1, 1, 0)))};
  LimitSetDescriptor dca = predict_dynamic_set(o, on_ca);
  CHECK(dca.kind == K::SurfaceAB);
  CHECK(dist(dca.point, ProjPoint(e1)) < 1e-12);

  Flag on_cb{ProjPoint(Vec3(0, 1, 1)), ProjLine(e1)};
  LimitSetDescriptor dcb = predict_dynamic_set(o, on_cb);
  CHECK(dcb.kind == K::SurfaceBA);
  CHECK(dist(dcb.line, ProjLine(e3)) < 1e-12);

  Flag x_minus{ProjPoint(e3), ProjLine(e1)};
  CHECK(predict_dynamic_set(o, x_minus).kind == K::WholeX);
}

TEST_CASE("predicted dynamic sets: unbalanced cases") {
  UnbalancedAlphaObjects ao = alpha_objects_of_sequence(alpha_seq, 19);
  DynObjects a = ao;
  CHECK(predict_dynamic_set(a, ProjPoint(Vec3(1, 1, 1))).kind == K::PointP);
  CHECK(predict_dynamic_set(a, ProjPoint(Vec3(0, 1, 1))).kind == K::LineP);
  // a generic line crosses d_minus; its dual limit is the single line through
  // p_plus and the frozen image of the crossing point
  LimitSetDescriptor dl = predict_dynamic_set(a, ProjLine(Vec3(1, 1, 1)));
  CHECK(dl.kind == K::PointDual);
  CHECK(std::abs(dl.line.normal.dot(e1)) < 1e-12);
  CHECK(dist(dl.line, ghat_infty(ao, meet(ProjLine(Vec3(1, 1, 1)), ao.d_minus))) < 1e-12);
  CHECK(predict_dynamic_set(a, ao.d_minus).kind == K::WholeRP2Dual);

  Flag gen{ProjPoint(Vec3(1, 1, 1)), join(ProjPoint(Vec3(1, 1, 1)), ProjPoint(e1))};
  LimitSetDescriptor dx = predict_dynamic_set(a, gen);
  CHECK(dx.kind == K::PointX);
  CHECK(dist(dx.flag.point, ProjPoint(e1)) < 1e-9);
  // point on d_minus, line transverse: the beta circle over the crossing image
  Flag crit{ProjPoint(Vec3(0, 1, 1)), join(ProjPoint(Vec3(0, 1, 1)), ProjPoint(Vec3(1, 1, 1)))};
  LimitSetDescriptor dcrit = predict_dynamic_set(a, crit);
  CHECK(dcrit.kind == K::CircleBeta);
  CHECK(std::abs(dcrit.line.normal.dot(e1)) < 1e-12);
  // line equal to d_minus as well: the full surface
  Flag deep{ProjPoint(Vec3(0, 1, 1)), ao.d_minus};
  CHECK(predict_dynamic_set(a, deep).kind == K::SurfaceBA);

  DynObjects b = beta_objects_of_sequence(beta_seq);
  CHECK(predict_dynamic_set(b, ProjPoint(Vec3(1, 0, 1))).kind == K::PointP);
  CHECK(predict_dynamic_set(b, ProjPoint(e3)).kind == K::WholeRP2);
  LimitSetDescriptor bl = predict_dynamic_set(b, ProjLine(Vec3(1, 1, 1)));
  CHECK(bl.kind == K::PointDual);
  CHECK(dist(bl.line, ProjLine(e3)) < 1e-12);
  Flag bgen{ProjPoint(Vec3(1, 0, 1)), join(ProjPoint(Vec3(1, 0, 1)), ProjPoint(e2))};
  CHECK(predict_dynamic_set(b, bgen).kind == K::PointX);
  Flag bcrit{ProjPoint(e3), join(ProjPoint(e3), ProjPoint(Vec3(1, 1, 0)))};
  CHECK(predict_dynamic_set(b, bcrit).kind == K::SurfaceAB);
}

TEST_CASE("ambiguous locus is reported, and the band is adjustable") {
  DynObjects o = lox_objects(diag(4, 2, 1)).balanced();
  ProjPoint near_dm(Vec3(1e-10, 1, 1));  // residual against d_minus sits inside the default band
  CHECK(thrown([&] { predict_dynamic_set(o, near_dm); }) == Err::AmbiguousLocus);
  CHECK(predict_dynamic_set(o, near_dm, 1e-11).kind == K::PointP);   // narrow band: off
  // the locus test is scale-aware: far points never trip it
  CHECK(predict_dynamic_set(o, ProjPoint(Vec3(1, 1, 1)), 1e-3).kind == K::PointP);
}

TEST_CASE("oracle matches prediction on representative clauses") {
  OracleConfig cfg;
  cfg.trials = 60;
  cfg.n_max = 30;

  DynObjects o = lox_objects(diag(4, 2, 1)).balanced();
  auto seq = [](int n) { return diag(4, 2, 1).pow(n); };

  // generic flag -> point
  Flag gen{ProjPoint(Vec3(1, 2, 3)), join(ProjPoint(Vec3(1, 2, 3)), ProjPoint(Vec3(-1, 1, 1)))};
  SampledCompact cloud = empirical_dynamic_set(seq, gen, cfg);
  SampledCompact pred = sample_descriptor(predict_dynamic_set(o, gen), 64);
  CHECK(hausdorff(cloud, pred) < 0.05);

  // point on the repulsive line -> the attractive line
  SampledCompact pcloud = empirical_dynamic_set(seq, ProjPoint(Vec3(0, 1, 1)), cfg);
  SampledCompact ppred = sample_descriptor(predict_dynamic_set(o, ProjPoint(Vec3(0, 1, 1))), 128);
  CHECK(directed_hausdorff(pcloud, ppred) < 0.02);
  CHECK(directed_hausdorff(ppred, pcloud) < 0.05);

  // beta-type generic flag -> fibration image
  DynObjects b = beta_objects_of_sequence(beta_seq);
  Flag bgen{ProjPoint(Vec3(1, 0, 1)), join(ProjPoint(Vec3(1, 0, 1)), ProjPoint(e2))};
  SampledCompact bcloud = empirical_dynamic_set(beta_seq, bgen, cfg);
  SampledCompact bpred = sample_descriptor(predict_dynamic_set(b, bgen), 64);
  CHECK(hausdorff(bcloud, bpred) < 0.05);
}

TEST_CASE("descriptor samplers populate the advertised sets") {
  LimitSetDescriptor d;
  d.kind = K::SurfaceBA;
  d.line = ProjLine(e3);
  SampledCompact s = sample_descriptor(d, 12);
  CHECK(s.flags.size() == 144);
  for (const Flag& f : s.flags) CHECK(std::abs(f.point.rep.dot(e3)) < 1e-9);

  d.kind = K::CircleAlpha;
  d.point = ProjPoint(e1);
  for (const Flag& f : sample_descriptor(d, 16).flags) CHECK(dist(f.point, ProjPoint(e1)) < 1e-12);
}

TEST_CASE("bouquet distance and samples") {
  Bouquet b{Flag{ProjPoint(e1), ProjLine(e3)}};
  CHECK(dist_to_bouquet(Flag{ProjPoint(e1), ProjLine(e3)}, b) < 1e-12);
  // a flag on the alpha circle of the center
  Flag on_alpha{ProjPoint(e1), join(ProjPoint(e1), ProjPoint(e3))};
  CHECK(dist_to_bouquet(on_alpha, b) < 1e-12);
  // closed form lower-bounds the sampled distance
  Rng rng(223);
  for (int i = 0; i < 30; ++i) {
    Flag x = random_flag(rng);
    double closed = dist_to_bouquet(x, b);
    double sampled = 1e9;
    for (const Flag& f : sample_bouquet(b, 2048)) sampled = std::min(sampled, dist(x, f));
    CHECK(closed <= sampled + 1e-9);
    CHECK(sampled <= closed + 5e-3);
  }
}

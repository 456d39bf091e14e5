#include "flagdyn/limit_objects.hpp"

#include <cmath>

#include "flagdyn/parallel.hpp"

namespace flagdyn {

double dist_to_bouquet(const Flag& x, const Bouquet& b) {
  return std::min(dist_to_circle_alpha(x, b.center.point),
                  dist_to_circle_beta(x, b.center.line));
}

std::vector<Flag> sample_bouquet(const Bouquet& b, int m) {
  std::vector<Flag> out = sample_circle_alpha(b.center.point, m);
  std::vector<Flag> beta = sample_circle_beta(b.center.line, m);
  out.insert(out.end(), beta.begin(), beta.end());
  out.push_back(b.center);
  return out;
}

Flag BalancedObjects::x_plus() const { return Flag(p_plus, d_plus, 1e-9); }
Flag BalancedObjects::x_minus() const { return Flag(p_minus, d_minus, 1e-9); }

BalancedObjects LoxObjects::balanced() const {
  return BalancedObjects{p_plus, p_minus, d_plus, d_minus};
}

LoxObjects lox_objects(const GroupElement& g) {
  IterateClassification c = classify_iterates(g);
  if (!c.loxodromic()) fail(Err::NotLoxodromic, "need three distinct moduli, same sign");
  LoxObjects o;
  // eigenvalues sorted by descending modulus
  o.p_plus = ProjPoint(c.eigenvectors.col(0));
  o.p_saddle = ProjPoint(c.eigenvectors.col(1));
  o.p_minus = ProjPoint(c.eigenvectors.col(2));
  o.lam_plus = c.eigenvalues[0];
  o.lam_saddle = c.eigenvalues[1];
  o.lam_minus = c.eigenvalues[2];
  o.d_plus = join(o.p_saddle, o.p_plus);
  o.d_minus = join(o.p_minus, o.p_saddle);
  return o;
}

namespace {

const ProjPoint kE1{Vec3(1, 0, 0)};
const ProjPoint kE3{Vec3(0, 0, 1)};
const ProjLine kLineE12{Vec3(0, 0, 1)};  // the plane z = 0
const ProjLine kLineE23{Vec3(1, 0, 0)};  // the plane x = 0

struct ProbeObjects {
  ProjPoint p_plus, p_minus;
  ProjLine d_plus, d_minus;
  double lam_ba = 1.0;  // a2/a1
  double lam_cb = 1.0;  // a3/a2
  GroupElement k, l;
};

ProbeObjects probe_objects(const GroupElement& g) {
  CartanTriple c = cartan(g);
  // only the dominant singular direction is reliable once the singular spread
  // saturates double range, so the minus-side objects come from the dominant
  // side of the inverse instead of the bottom columns of k and l
  CartanTriple ci = cartan(g.inverse());
  ProbeObjects o;
  o.p_plus = act(c.k, kE1);
  o.d_plus = act(ci.l.inverse(), kLineE23);
  o.p_minus = act(ci.k, kE1);
  o.d_minus = act(c.l.inverse(), kLineE23);
  o.lam_ba = c.a[1] / c.a[0];
  o.lam_cb = c.a[2] / c.a[1];
  o.k = c.k;
  o.l = c.l;
  return o;
}

std::pair<ProbeObjects, ProbeObjects> last_two_probes(const SequenceFn& seq, int n_probe) {
  int count = std::max(n_probe, 2);
  int n = 4;
  for (int k = 0; k + 1 < count && n <= (1 << 29); ++k) n *= 2;
  ProbeObjects last = probe_objects(seq(n));
  ProbeObjects prev = probe_objects(seq(n / 2));
  return {prev, last};
}

// positioned conjugate h * diag * h^-1 with prescribed fixed point / plane
GroupElement positioned(const Vec3& diag, const Vec3& fixed_rep, const Vec3& plane_normal,
                        bool fixed_first) {
  Vec3 u, w;
  orthonormal_complement(plane_normal, u, w);
  Mat3 h;
  if (fixed_first) {
    h.col(0) = fixed_rep;
    h.col(1) = u;
    h.col(2) = w;
  } else {
    h.col(0) = u;
    h.col(1) = w;
    h.col(2) = fixed_rep;
  }
  Mat3 m = h * diag.asDiagonal() * h.inverse();
  return GroupElement(m);
}

}  // namespace

BalancedObjects balanced_objects_of_sequence(const SequenceFn& seq, int n_probe) {
  auto [prev, last] = last_two_probes(seq, n_probe);
  double err = std::max(std::max(dist(prev.p_plus, last.p_plus), dist(prev.p_minus, last.p_minus)),
                        std::max(dist(prev.d_plus, last.d_plus), dist(prev.d_minus, last.d_minus)));
  if (err > 1e-4) fail(Err::NonConvergent, "objects still moving between probes");
  return BalancedObjects{last.p_plus, last.p_minus, last.d_plus, last.d_minus};
}

UnbalancedAlphaObjects alpha_objects_of_sequence(const SequenceFn& seq, int n_probe) {
  auto [prev, last] = last_two_probes(seq, n_probe);
  double err = std::max({dist(prev.p_plus, last.p_plus), dist(prev.d_minus, last.d_minus),
                         std::abs(prev.lam_cb - last.lam_cb)});
  if (err > 1e-4) fail(Err::NonConvergent, "objects still moving between probes");
  UnbalancedAlphaObjects o;
  o.p_plus = last.p_plus;
  o.d_minus = last.d_minus;
  o.lambda_inf = last.lam_cb;
  o.k_lim = last.k;
  o.l_lim = last.l;
  o.a_inf = positioned(Vec3(1, 1, o.lambda_inf), o.p_plus.rep, o.d_minus.normal, true);
  return o;
}

UnbalancedBetaObjects beta_objects_of_sequence(const SequenceFn& seq, int n_probe) {
  auto [prev, last] = last_two_probes(seq, n_probe);
  double err = std::max({dist(prev.p_minus, last.p_minus), dist(prev.d_plus, last.d_plus),
                         std::abs(prev.lam_ba - last.lam_ba)});
  if (err > 1e-4) fail(Err::NonConvergent, "objects still moving between probes");
  UnbalancedBetaObjects o;
  o.p_minus = last.p_minus;
  o.d_plus = last.d_plus;
  o.lambda_inf = last.lam_ba;
  o.k_lim = last.k;
  o.l_lim = last.l;
  o.a_inf = positioned(Vec3(1, o.lambda_inf, 1), o.p_minus.rep, o.d_plus.normal, false);
  return o;
}

ProjLine ghat_infty(const UnbalancedAlphaObjects& o, const ProjPoint& p) {
  if (std::abs(p.rep.dot(o.d_minus.normal)) > 1e-8)
    fail(Err::DomainViolation, "point off d_minus");
  // standard position: q -> join(e1, diag(1,1,lambda) q), transported by (k,l)
  Vec3 q = o.l_lim.mat * p.rep;
  q[2] *= o.lambda_inf;
  ProjLine std_line = join(kE1, ProjPoint(q));
  return act(o.k_lim, std_line);
}

ProjPoint gbar_infty(const UnbalancedBetaObjects& o, const ProjPoint& p) {
  if (dist(p, o.p_minus) < 1e-10) fail(Err::DomainViolation, "p equals p_minus");
  // standard position: q -> diag(1,lambda,1) ([e3, q] meet [e1,e2])
  Vec3 q = o.l_lim.mat * p.rep;
  ProjPoint m = meet(join(kE3, ProjPoint(q)), kLineE12);
  Vec3 r = m.rep;
  r[1] *= o.lambda_inf;
  return act(o.k_lim, ProjPoint(r));
}

Flag phi_fibration(const UnbalancedAlphaObjects& o, const Flag& x) {
  double on_cbeta = dist(x.line, o.d_minus);
  ProjPoint arg = (on_cbeta <= 1e-10) ? x.point : meet(x.line, o.d_minus);
  return Flag(o.p_plus, ghat_infty(o, arg), 1e-9);
}

Flag phi_fibration(const UnbalancedBetaObjects& o, const Flag& x) {
  double on_calpha = dist(x.point, o.p_minus);
  ProjPoint arg = (on_calpha <= 1e-10) ? meet(x.line, tau(o.p_minus)) : x.point;
  return Flag(gbar_infty(o, arg), o.d_plus, 1e-9);
}

namespace {

const Mat3 kAntidiag = (Mat3() << 0, 0, 1, 0, 1, 0, 1, 0, 0).finished();

}  // namespace

UnbalancedAlphaObjects theta_dual(const UnbalancedBetaObjects& o) {
  UnbalancedAlphaObjects d;
  d.p_plus = tau_inv(o.d_plus);
  d.d_minus = tau(o.p_minus);
  d.lambda_inf = o.lambda_inf;
  GroupElement I;
  I.mat = kAntidiag;
  d.k_lim = o.k_lim * I;
  d.l_lim = I * o.l_lim;
  d.a_inf = positioned(Vec3(1, 1, d.lambda_inf), d.p_plus.rep, d.d_minus.normal, true);
  return d;
}

BalancedObjects theta_dual(const BalancedObjects& o) {
  return BalancedObjects{tau_inv(o.d_plus), tau_inv(o.d_minus), tau(o.p_plus), tau(o.p_minus)};
}

const char* descriptor_kind_name(LimitSetDescriptor::Kind k) {
  using K = LimitSetDescriptor::Kind;
  switch (k) {
    case K::PointP: return "point";
    case K::LineP: return "line";
    case K::WholeRP2: return "whole_rp2";
    case K::PointDual: return "dual_point";
    case K::DualPencil: return "dual_pencil";
    case K::WholeRP2Dual: return "whole_rp2dual";
    case K::PointX: return "flag";
    case K::CircleAlpha: return "circle_alpha";
    case K::CircleBeta: return "circle_beta";
    case K::SurfaceAB: return "surface_ab";
    case K::SurfaceBA: return "surface_ba";
    case K::WholeX: return "whole_flag_space";
  }
  return "?";
}

Space descriptor_space(const LimitSetDescriptor& d) {
  using K = LimitSetDescriptor::Kind;
  switch (d.kind) {
    case K::PointP:
    case K::LineP:
    case K::WholeRP2: return Space::RP2;
    case K::PointDual:
    case K::DualPencil:
    case K::WholeRP2Dual: return Space::RP2Dual;
    default: return Space::FlagSpace;
  }
}

namespace {

// locus membership with the ambiguity band (1e-12, delta)
bool on_locus(double residual, double delta, const char* what) {
  if (residual <= 1e-12) return true;
  if (residual >= delta) return false;
  fail(Err::AmbiguousLocus, what);
}

using K = LimitSetDescriptor::Kind;

LimitSetDescriptor make_point(const ProjPoint& p) {
  LimitSetDescriptor d;
  d.kind = K::PointP;
  d.point = p;
  return d;
}
LimitSetDescriptor make_line(const ProjLine& l) {
  LimitSetDescriptor d;
  d.kind = K::LineP;
  d.line = l;
  return d;
}
LimitSetDescriptor make_kind(K kind) {
  LimitSetDescriptor d;
  d.kind = kind;
  return d;
}
LimitSetDescriptor make_point_kind(K kind, const ProjPoint& p) {
  LimitSetDescriptor d;
  d.kind = kind;
  d.point = p;
  return d;
}
LimitSetDescriptor make_line_kind(K kind, const ProjLine& l) {
  LimitSetDescriptor d;
  d.kind = kind;
  d.line = l;
  return d;
}
LimitSetDescriptor make_flag(const Flag& x) {
  LimitSetDescriptor d;
  d.kind = K::PointX;
  d.flag = x;
  return d;
}

}  // namespace

LimitSetDescriptor predict_dynamic_set(const DynObjects& o, const ProjPoint& p, double delta) {
  if (const auto* b = std::get_if<BalancedObjects>(&o)) {
    bool on_dm = on_locus(std::abs(p.rep.dot(b->d_minus.normal)), delta, "p near d_minus");
    if (!on_dm) return make_point(b->p_plus);
    if (!on_locus(dist(p, b->p_minus), delta, "p near p_minus")) return make_line(b->d_plus);
    return make_kind(K::WholeRP2);
  }
  if (const auto* a = std::get_if<UnbalancedAlphaObjects>(&o)) {
    bool on_dm = on_locus(std::abs(p.rep.dot(a->d_minus.normal)), delta, "p near d_minus");
    if (!on_dm) return make_point(a->p_plus);
    return make_line(ghat_infty(*a, p));
  }
  const auto& ub = std::get<UnbalancedBetaObjects>(o);
  if (!on_locus(dist(p, ub.p_minus), delta, "p near p_minus"))
    return make_point(gbar_infty(ub, p));
  return make_kind(K::WholeRP2);
}

LimitSetDescriptor predict_dynamic_set(const DynObjects& o, const ProjLine& d, double delta) {
  if (const auto* b = std::get_if<BalancedObjects>(&o)) {
    bool through = on_locus(std::abs(d.normal.dot(b->p_minus.rep)), delta, "d near (p_minus)*");
    if (!through) return make_line_kind(K::PointDual, b->d_plus);
    if (!on_locus(dist(d, b->d_minus), delta, "d near d_minus"))
      return make_point_kind(K::DualPencil, b->p_plus);
    return make_kind(K::WholeRP2Dual);
  }
  if (const auto* a = std::get_if<UnbalancedAlphaObjects>(&o)) {
    if (!on_locus(dist(d, a->d_minus), delta, "d near d_minus"))
      return make_line_kind(K::PointDual, ghat_infty(*a, meet(d, a->d_minus)));
    return make_kind(K::WholeRP2Dual);
  }
  // beta type on the dual plane: conjugate by tau through the duality
  // representation, which is alpha type
  const auto& ub = std::get<UnbalancedBetaObjects>(o);
  UnbalancedAlphaObjects dual = theta_dual(ub);
  LimitSetDescriptor inner = predict_dynamic_set(DynObjects{dual}, tau_inv(d), delta);
  switch (inner.kind) {
    case K::PointP: return make_line_kind(K::PointDual, tau(inner.point));
    case K::LineP: return make_point_kind(K::DualPencil, tau_inv(inner.line));
    case K::WholeRP2: return make_kind(K::WholeRP2Dual);
    default: fail(Err::DomainViolation, "unexpected dual descriptor");
  }
}

LimitSetDescriptor predict_dynamic_set(const DynObjects& o, const Flag& x, double delta) {
  if (const auto* b = std::get_if<BalancedObjects>(&o)) {
    bool in_sab = on_locus(std::abs(x.line.normal.dot(b->p_minus.rep)), delta, "line near p_minus");
    bool in_sba = on_locus(std::abs(x.point.rep.dot(b->d_minus.normal)), delta, "point near d_minus");
    bool is_ca = in_sab && on_locus(dist(x.point, b->p_minus), delta, "point near p_minus");
    bool is_cb = in_sba && on_locus(dist(x.line, b->d_minus), delta, "line near d_minus");
    if (is_ca && is_cb) return make_kind(K::WholeX);
    if (is_ca) return make_point_kind(K::SurfaceAB, b->p_plus);
    if (is_cb) return make_line_kind(K::SurfaceBA, b->d_plus);
    if (in_sab && in_sba) fail(Err::AmbiguousLocus, "inconsistent locus membership");
    if (in_sab) return make_point_kind(K::CircleAlpha, b->p_plus);
    if (in_sba) return make_line_kind(K::CircleBeta, b->d_plus);
    return make_flag(b->x_plus());
  }
  if (const auto* a = std::get_if<UnbalancedAlphaObjects>(&o)) {
    bool in_sba = on_locus(std::abs(x.point.rep.dot(a->d_minus.normal)), delta, "point near d_minus");
    if (!in_sba) return make_flag(phi_fibration(*a, x));
    if (on_locus(dist(x.line, a->d_minus), delta, "line near d_minus"))
      return make_line_kind(K::SurfaceBA, ghat_infty(*a, x.point));
    return make_line_kind(K::CircleBeta, ghat_infty(*a, meet(x.line, a->d_minus)));
  }
  const auto& ub = std::get<UnbalancedBetaObjects>(o);
  bool in_sab = on_locus(std::abs(x.line.normal.dot(ub.p_minus.rep)), delta, "line near p_minus");
  if (!in_sab) return make_flag(phi_fibration(ub, x));
  if (on_locus(dist(x.point, ub.p_minus), delta, "point near p_minus"))
    return make_point_kind(K::SurfaceAB, gbar_infty(ub, meet(x.line, tau(ub.p_minus))));
  return make_point_kind(K::CircleAlpha, gbar_infty(ub, x.point));
}

SampledCompact sample_descriptor(const LimitSetDescriptor& d, int m, double whole_scale) {
  switch (d.kind) {
    case K::PointP: return SampledCompact::of_points({d.point});
    case K::LineP: return SampledCompact::of_points(sample_line_points(d.line, m));
    case K::WholeRP2: return SampledCompact::of_points(net_rp2(whole_scale));
    case K::PointDual: return SampledCompact::of_lines({d.line});
    case K::DualPencil: return SampledCompact::of_lines(sample_pencil(d.point, m));
    case K::WholeRP2Dual: return SampledCompact::of_lines(net_rp2_dual(whole_scale));
    case K::PointX: return SampledCompact::of_flags({d.flag});
    case K::CircleAlpha: return SampledCompact::of_flags(sample_circle_alpha(d.point, m));
    case K::CircleBeta: return SampledCompact::of_flags(sample_circle_beta(d.line, m));
    case K::SurfaceAB: return SampledCompact::of_flags(sample_surface_ab(d.point, m));
    case K::SurfaceBA: return SampledCompact::of_flags(sample_surface_ba(d.line, m));
    case K::WholeX: return SampledCompact::of_flags(net_flags(whole_scale));
  }
  return {};
}

namespace {

// one oracle draw: per-direction sign * log-uniform magnitude below bound/3
template <typename Object, typename Perturb, typename Act>
SampledCompact oracle_cloud(const SequenceFn& seq, const OracleConfig& cfg, int dirs,
                            const Perturb& perturb, const Act& act_fn, Space space) {
  std::size_t per_item = std::size_t(cfg.n_window);
  std::size_t items = cfg.scales.size() * std::size_t(cfg.trials);
  std::vector<std::vector<Object>> slots(items);

  // group elements reused across items
  std::vector<GroupElement> gs;
  for (int w = 0; w < cfg.n_window; ++w) gs.push_back(seq(cfg.n_max - cfg.n_window + 1 + w));

  parallel_for(items, [&](std::size_t it) {
    Rng rng(Rng::mix(cfg.seed, it));
    double s = cfg.scales[it / cfg.trials];
    double e[3] = {0, 0, 0};
    double u[3], sg[3];
    for (int d = 0; d < 3; ++d) {
      u[d] = rng.uniform();
      sg[d] = rng.coin() ? 1.0 : -1.0;
    }
    auto& out = slots[it];
    out.reserve(per_item);
    for (int w = 0; w < cfg.n_window; ++w) {
      int n = cfg.n_max - cfg.n_window + 1 + w;
      double bound = s / std::pow(double(n), cfg.theta_power) / 3.0;
      for (int d = 0; d < dirs; ++d)
        e[d] = sg[d] * bound * std::pow(10.0, -cfg.decades * u[d]);
      out.push_back(act_fn(gs[w], perturb(e[0], e[1], e[2])));
    }
  });

  SampledCompact cloud;
  cloud.space = space;
  for (auto& v : slots)
    for (auto& obj : v) {
      if constexpr (std::is_same_v<Object, ProjPoint>) cloud.points.push_back(obj);
      else if constexpr (std::is_same_v<Object, ProjLine>) cloud.lines.push_back(obj);
      else cloud.flags.push_back(obj);
    }
  return cloud;
}

}  // namespace

SampledCompact empirical_dynamic_set(const SequenceFn& seq, const ProjPoint& p,
                                     const OracleConfig& cfg) {
  return oracle_cloud<ProjPoint>(
      seq, cfg, 2, [&](double a, double b, double) { return perturb_point(p, a, b); },
      [](const GroupElement& g, const ProjPoint& q) { return act(g, q); }, Space::RP2);
}

SampledCompact empirical_dynamic_set(const SequenceFn& seq, const ProjLine& d,
                                     const OracleConfig& cfg) {
  return oracle_cloud<ProjLine>(
      seq, cfg, 2, [&](double a, double b, double) { return perturb_line(d, a, b); },
      [](const GroupElement& g, const ProjLine& l) { return act(g, l); }, Space::RP2Dual);
}

SampledCompact empirical_dynamic_set(const SequenceFn& seq, const Flag& x,
                                     const OracleConfig& cfg) {
  return oracle_cloud<Flag>(
      seq, cfg, 3, [&](double a, double b, double c) { return perturb_flag(x, a, b, c); },
      [](const GroupElement& g, const Flag& f) { return act(g, f); }, Space::FlagSpace);
}

}  // namespace flagdyn

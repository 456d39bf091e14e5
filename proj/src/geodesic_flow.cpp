#include "flagdyn/geodesic_flow.hpp"

#include <cmath>

namespace flagdyn {

namespace {

const ProjPoint kE3{Vec3(0, 0, 1)};
const ProjLine kLineE12{Vec3(0, 0, 1)};

}  // namespace

GroupElement psi(double t) {
  // |det| = 1 representative of Diag(e^t, e^t, 1), overflow-safe
  GroupElement g;
  double a = std::exp(t / 3.0), c = std::exp(-2.0 * t / 3.0);
  g.mat = Vec3(a, a, c).asDiagonal();
  return g;
}

Flag flow(double t, const Flag& x) { return act(psi(t), x); }
OrientedFlag flow(double t, const OrientedFlag& x) { return act(psi(t), x); }

FlowPoint flow(double t, const FlowPoint& p) {
  if (const auto* f = std::get_if<Flag>(&p)) return flow(t, *f);
  return flow(t, std::get<OrientedFlag>(p));
}

std::vector<Flag> FixedSet::sample_c(int m) const {
  std::vector<Flag> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    double th = M_PI * k / m;
    ProjPoint p(Vec3(std::cos(th), std::sin(th), 0));
    out.emplace_back(p, join(p, kE3), 1e-12);
  }
  return out;
}

FixedSet fixed_circles() { return FixedSet{kE3, kLineE12}; }

double dist_to_circle_c(const Flag& x) {
  // members (p(th), D(th)), p = (cos,sin,0), normal m = (sin,-cos,0);
  // angle(n, m(th)) = angle(w, p(th)) with w = Rz(pi/2) n.  The min over th of
  // max(angle(q,p), angle(w,p)) is attained at a minimum of either term or at
  // a crossing, four candidates in all.
  const Vec3& q = x.point.rep;
  const Vec3& n = x.line.normal;
  Vec3 w(-n[1], n[0], n[2]);
  const double cand[4] = {std::atan2(q[1], q[0]), std::atan2(w[1], w[0]),
                          std::atan2(q[0] - w[0], -(q[1] - w[1])),
                          std::atan2(q[0] + w[0], -(q[1] + w[1]))};
  double best = M_PI;
  for (double th : cand) {
    Vec3 p(std::cos(th), std::sin(th), 0);
    Vec3 m(std::sin(th), -std::cos(th), 0);
    best = std::min(best, std::max(angle_abs(q, p), angle_abs(n, m)));
  }
  return best;
}

double dist_to_fixed_set(const Flag& x) {
  return std::min({dist_to_circle_alpha(x, kE3), dist_to_circle_beta(x, kLineE12),
                   dist_to_circle_c(x)});
}

bool is_fixed(const Flag& x, double t) { return dist(flow(t, x), x) < 1e-9; }
bool is_fixed(const OrientedFlag& x, double t) { return dist(flow(t, x), x) < 1e-9; }

Flag phi_plus(const Flag& x) {
  ProjPoint q = (dist(x.point, kE3) <= 1e-10) ? meet(x.line, kLineE12)
                                              : meet(join(kE3, x.point), kLineE12);
  return Flag(q, kLineE12, 1e-9);
}

Flag phi_minus(const Flag& x) {
  ProjLine d = (dist(x.line, kLineE12) <= 1e-10) ? join(kE3, x.point)
                                                 : join(kE3, meet(x.line, kLineE12));
  return Flag(kE3, d, 1e-9);
}

OrientedFlag chart_map(const ChartPoint& c) {
  double x = c.coords[0], y = c.coords[1], z = c.coords[2];
  if (c.chart == 1)
    return OrientedFlag(Vec3(1, x, y).normalized(), Vec3(x * z - y, -z, 1).normalized(), 1e-9);
  if (c.chart == 2)
    return OrientedFlag(Vec3(x, y, 1).normalized(), Vec3(-1, z, x - y * z).normalized(), 1e-9);
  fail(Err::BadConfig, "chart must be 1 or 2");
}

ChartPoint chart_inverse(int chart, const OrientedFlag& f) {
  const Vec3& u = f.dir;
  const Vec3& c = f.conormal;
  ChartPoint out;
  out.chart = chart;
  if (chart == 1) {
    if (std::abs(u[0]) <= 1e-14 || std::abs(c[2]) <= 1e-14)
      fail(Err::OutOfChartDomain, "chart 1 needs dir_1 != 0 and conormal_3 != 0");
    out.coords = Vec3(u[1] / u[0], u[2] / u[0], -c[1] / c[2]);
    return out;
  }
  if (chart == 2) {
    if (std::abs(u[2]) <= 1e-14 || std::abs(c[0]) <= 1e-14)
      fail(Err::OutOfChartDomain, "chart 2 needs dir_3 != 0 and conormal_1 != 0");
    out.coords = Vec3(u[0] / u[2], u[1] / u[2], -c[1] / c[0]);
    return out;
  }
  fail(Err::BadConfig, "chart must be 1 or 2");
}

Vec3 transition_12(const Vec3& v) {
  double x = v[0], y = v[1], z = v[2];
  if (std::abs(y) <= 1e-14 || std::abs(z * x - y) <= 1e-14)
    fail(Err::OutOfChartDomain, "need y != 0 and zx != y");
  return Vec3(1 / y, x / y, z / (z * x - y));
}

Vec3 transition_21(const Vec3& v) {
  double x = v[0], y = v[1], z = v[2];
  if (std::abs(x) <= 1e-14 || std::abs(z * y - x) <= 1e-14)
    fail(Err::OutOfChartDomain, "need x != 0 and zy != x");
  return Vec3(y / x, 1 / x, z / (z * y - x));
}

Mat3 conjugated_flow_in_chart(int chart, double t) {
  if (chart == 1) return Vec3(1, std::exp(-t), std::exp(-t)).asDiagonal();
  if (chart == 2) return Vec3(std::exp(t), std::exp(t), 1).asDiagonal();
  fail(Err::BadConfig, "chart must be 1 or 2");
}

namespace {

// L2 combination of the two sphere angles; any norm gives the same exponents
double tangent_dist(const OrientedFlag& a, const OrientedFlag& b) {
  double du = angle_signed(a.dir, b.dir);
  double dc = angle_signed(a.conormal, b.conormal);
  return std::sqrt(du * du + dc * dc);
}

// projective speed of the flow at f: the generator acts as diag(1,1,0) on the
// point sphere and as -diag(1,1,0) on the conormal sphere
double flow_speed(const OrientedFlag& f) {
  const Vec3& u = f.dir;
  const Vec3& c = f.conormal;
  Vec3 au(u[0], u[1], 0.0);
  Vec3 vu = au - u.dot(au) * u;
  Vec3 bc(c[0], c[1], 0.0);
  Vec3 vc = c.dot(bc) * c - bc;
  return std::sqrt(vu.squaredNorm() + vc.squaredNorm());
}

}  // namespace

ExponentTriple lyapunov(const OrientedFlag& p, double T, double dt, bool forward) {
  if (T <= 0 || dt <= 0 || dt > T) fail(Err::BadConfig, "need 0 < dt <= T");
  if (dist_to_fixed_set(project_pi(p)) <= 0.01)
    fail(Err::OnFixedSet, "basepoint within 0.01 of the fixed circles");
  const double h = 1e-7;
  double tau = forward ? dt : -dt;
  int n = std::max(1, int(std::lround(T / dt)));
  GroupElement step = psi(tau);

  OrientedFlag base = p;
  if (flow_speed(base) < 1e-12) fail(Err::OnFixedSet, "flow speed vanishes at the basepoint");

  // The pencil of lines through the point (alpha fiber) and the pencil of
  // points along the line (beta fiber) are flow-invariant line fields, so
  // one-step contraction factors, re-anchored at the current base, multiply
  // into the exponent of the corresponding sub-bundle.  The flow direction is
  // measured by the closed-form speed, which stays accurate long after finite
  // differences along the orbit collapse below rounding.
  // the leading half of the orbit is discarded as transient
  int burn = n / 2;
  double sa = 0, sb = 0, sc = 0;
  for (int i = 0; i < n; ++i) {
    OrientedFlag oa(base.dir, rotation_about(base.dir, h) * base.conormal, 1e-9);
    OrientedFlag ob(rotation_about(base.conormal, h) * base.dir, base.conormal, 1e-9);
    OrientedFlag nb = act(step, base);
    if (i >= burn) {
      sa += std::log(tangent_dist(nb, act(step, oa)) / h);
      sb += std::log(tangent_dist(nb, act(step, ob)) / h);
      sc += std::log(flow_speed(nb) / flow_speed(base));
    }
    base = nb;
  }
  double total = (n - burn) * tau;  // signed flow time in the averaging window
  return ExponentTriple{sc / total, sa / total, sb / total};
}

FateResult geodesic_fate(const SchottkyGroup& g, const Flag& x, int depth, double eps,
                         bool forward, int max_steps) {
  if (!g.certificate) fail(Err::BadConfig, "group not certified");
  if (eps <= 0) fail(Err::BadConfig, "eps must be positive");
  if (std::abs(x.point.rep[2]) <= 1e-10 || std::abs(x.line.normal[2]) <= 1e-10)
    fail(Err::NotInDomain, "flag not in the open orbit");
  OmegaResult om = omega_membership(g, x, max_steps);
  if (!om.in_omega) fail(Err::NotInDomain, "does not reduce to the fundamental domain");

  FateResult out;
  out.limit = forward ? phi_plus(x) : phi_minus(x);
  LimitSetCloud cloud = limit_set(g, depth, 4);
  double dmin = M_PI;
  for (const LimitEntry& e : cloud.entries) {
    double d;
    if (forward) {
      d = dist(out.limit.point, e.p_plus);
    } else {
      if (std::abs(e.p_plus.rep.cross(kE3.rep).norm()) < 1e-12) continue;
      d = dist(out.limit.line, join(kE3, e.p_plus));
    }
    dmin = std::min(dmin, d);
  }
  out.dist_to_limit_set = dmin;
  out.kind = dmin > eps              ? FateResult::Kind::Escapes
             : dmin < eps / 4        ? FateResult::Kind::Recurrent
                                     : FateResult::Kind::Undetermined;
  return out;
}

std::vector<OrbitPoint> quotient_orbit(const SchottkyGroup& g, const Flag& x, double t_max,
                                       double dt) {
  if (!g.certificate) fail(Err::BadConfig, "group not certified");
  if (dt <= 0 || t_max < 0) fail(Err::BadConfig, "need dt > 0 and t_max >= 0");
  std::vector<OrbitPoint> out;
  ReduceOutcome r = reduce_to_fundamental_domain(g, x, 200);
  Word w = r.word;
  Flag y = r.flag;
  out.push_back(OrbitPoint{0.0, y, w});
  int n = int(std::floor(t_max / dt + 1e-9));
  for (int i = 1; i <= n; ++i) {
    ReduceOutcome s = reduce_to_fundamental_domain(g, flow(dt, y), 200);
    std::vector<int> letters = s.word.letters;
    letters.insert(letters.end(), w.letters.begin(), w.letters.end());
    w = reduce(Word{letters});
    y = s.flag;
    out.push_back(OrbitPoint{i * dt, y, w});
  }
  return out;
}

}  // namespace flagdyn

#include "flagdyn/projgeo.hpp"

#include <cmath>
#include <limits>

namespace flagdyn {

Vec3 canonical_rep(const Vec3& v) {
  double n = v.norm();
  if (!(n > 0) || !std::isfinite(n)) fail(Err::SingularInput, "zero or non-finite vector");
  // keep already-canonical vectors bit-identical (idempotence)
  Vec3 u = std::abs(n - 1.0) < 4 * std::numeric_limits<double>::epsilon() ? v : Vec3(v / n);
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(u[i]) > std::abs(u[best])) best = i;
  if (u[best] < 0) u = -u;
  return u;
}

void orthonormal_complement(const Vec3& v, Vec3& u, Vec3& w) {
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) < std::abs(v[least])) least = i;
  Vec3 e = Vec3::Zero();
  e[least] = 1.0;
  u = (e - v[least] * v).normalized();
  w = v.cross(u);
}

ProjPoint::ProjPoint(const Vec3& v) : rep(canonical_rep(v)) {}

ProjLine::ProjLine(const Vec3& n) : normal(canonical_rep(n)) {}

ProjLine join(const ProjPoint& p, const ProjPoint& q) {
  Vec3 c = p.rep.cross(q.rep);
  if (c.norm() < 1e-10) fail(Err::DegenerateJoin, "points coincide");
  return ProjLine(c);
}

ProjPoint meet(const ProjLine& d, const ProjLine& e) {
  Vec3 c = d.normal.cross(e.normal);
  if (c.norm() < 1e-10) fail(Err::DegenerateMeet, "lines coincide");
  return ProjPoint(c);
}

Flag::Flag() : point(Vec3(1, 0, 0)), line(Vec3(0, 0, 1)) {}

Flag::Flag(const ProjPoint& p, const ProjLine& d, double tol) : point(p), line(d) {
  double r = std::abs(p.rep.dot(d.normal));
  if (r > tol) fail(Err::IncidenceViolation, "point off the line");
  if (r != 0.0) {
    Vec3 fixed = p.rep - p.rep.dot(d.normal) * d.normal;
    point = ProjPoint(fixed);
  }
}

OrientedFlag::OrientedFlag() : dir(1, 0, 0), conormal(0, 0, 1) {}

OrientedFlag::OrientedFlag(const Vec3& d, const Vec3& c, double tol) {
  double dn = d.norm(), cn = c.norm();
  if (!(dn > 0) || !(cn > 0)) fail(Err::SingularInput, "zero vector");
  dir = d / dn;
  Vec3 cu = c / cn;
  if (std::abs(dir.dot(cu)) > tol) fail(Err::IncidenceViolation, "conormal not orthogonal");
  cu -= cu.dot(dir) * dir;
  conormal = cu.normalized();
}

GroupElement::GroupElement(const Mat3& m) {
  // Divergent sequences legitimately pass through matrices with tiny or huge
  // determinants (the class representative is what matters), so the only
  // rejects are exact singularity and numeric blow-up.
  double d = m.determinant();
  if (d == 0.0 || !std::isfinite(d)) fail(Err::SingularInput, "matrix not invertible");
  mat = m / std::cbrt(std::abs(d));
  if (!mat.allFinite()) fail(Err::SingularInput, "matrix numerically singular");
}

GroupElement GroupElement::inverse() const {
  GroupElement r;
  r.mat = mat.inverse();
  double d = r.mat.determinant();
  r.mat /= std::cbrt(std::abs(d));
  return r;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  GroupElement r;
  r.mat = mat * o.mat;
  double d = r.mat.determinant();
  r.mat /= std::cbrt(std::abs(d));
  return r;
}

GroupElement GroupElement::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  GroupElement acc;  // identity
  GroupElement base = *this;
  while (n) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

GroupElement GroupElement::theta() const {
  GroupElement r;
  r.mat = mat.inverse().transpose();
  double d = r.mat.determinant();
  r.mat /= std::cbrt(std::abs(d));
  return r;
}

GroupElement embed_j(const Mat2& h) {
  Mat3 m = Mat3::Identity();
  m.topLeftCorner<2, 2>() = h;
  return GroupElement(m);
}

ProjPoint act(const GroupElement& g, const ProjPoint& p) { return ProjPoint(g.mat * p.rep); }

ProjLine act(const GroupElement& g, const ProjLine& d) {
  return ProjLine(g.mat.inverse().transpose() * d.normal);
}

Flag act(const GroupElement& g, const Flag& x) {
  ProjPoint q = act(g, x.point);
  ProjLine e = act(g, x.line);
  // restore exact incidence: project the image point onto the image plane
  Vec3 fixed = q.rep - q.rep.dot(e.normal) * e.normal;
  return Flag(ProjPoint(fixed), e, 1.0);
}

OrientedFlag act(const GroupElement& g, const OrientedFlag& x) {
  Mat3 s = g.sl3();
  Vec3 d = s * x.dir;
  // (su) x (sv) = det(s) s^-T (u x v), det = +1
  Vec3 c = s.inverse().transpose() * x.conormal;
  return OrientedFlag(d, c, 1.0);
}

ProjPoint tau_inv(const ProjLine& d) {
  ProjPoint p;
  p.rep = d.normal;
  return p;
}

ProjLine tau(const ProjPoint& m) {
  ProjLine d;
  d.normal = m.rep;
  return d;
}

Flag kappa(const Flag& x) {
  Flag r;
  r.point.rep = x.line.normal;
  r.line.normal = x.point.rep;
  return r;
}

Flag project_pi(const OrientedFlag& x) {
  return Flag(ProjPoint(x.dir), ProjLine(x.conormal), 1e-9);
}

double dist(const ProjPoint& a, const ProjPoint& b) { return angle_abs(a.rep, b.rep); }
double dist(const ProjLine& a, const ProjLine& b) { return angle_abs(a.normal, b.normal); }
double dist(const Flag& a, const Flag& b) {
  return std::max(dist(a.point, b.point), dist(a.line, b.line));
}
double dist(const OrientedFlag& a, const OrientedFlag& b) {
  return std::max(angle_signed(a.dir, b.dir), angle_signed(a.conormal, b.conormal));
}

bool incident(const ProjPoint& p, const ProjLine& d, double tol) {
  return std::abs(p.rep.dot(d.normal)) <= tol;
}

std::vector<Flag> sample_circle_alpha(const ProjPoint& p, int m) {
  Vec3 u, w;
  orthonormal_complement(p.rep, u, w);
  std::vector<Flag> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    double t = M_PI * double(k) / double(m);
    Vec3 n = std::cos(t) * u + std::sin(t) * w;  // normal through p: n | p
    out.emplace_back(p, ProjLine(n), 1.0);
  }
  return out;
}

std::vector<Flag> sample_circle_beta(const ProjLine& d, int m) {
  Vec3 u, w;
  orthonormal_complement(d.normal, u, w);
  std::vector<Flag> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    double t = M_PI * double(k) / double(m);
    Vec3 q = std::cos(t) * u + std::sin(t) * w;
    out.emplace_back(ProjPoint(q), d, 1.0);
  }
  return out;
}

std::vector<ProjPoint> sample_line_points(const ProjLine& d, int m) {
  Vec3 u, w;
  orthonormal_complement(d.normal, u, w);
  std::vector<ProjPoint> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    double t = M_PI * double(k) / double(m);
    out.emplace_back(Vec3(std::cos(t) * u + std::sin(t) * w));
  }
  return out;
}

std::vector<ProjLine> sample_pencil(const ProjPoint& p, int m) {
  Vec3 u, w;
  orthonormal_complement(p.rep, u, w);
  std::vector<ProjLine> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    double t = M_PI * double(k) / double(m);
    out.emplace_back(Vec3(std::cos(t) * u + std::sin(t) * w));
  }
  return out;
}

std::vector<Flag> sample_surface_ab(const ProjPoint& p, int m) {
  std::vector<Flag> out;
  out.reserve(std::size_t(m) * m);
  for (const ProjLine& e : sample_pencil(p, m))
    for (const ProjPoint& q : sample_line_points(e, m)) out.emplace_back(q, e, 1.0);
  return out;
}

std::vector<Flag> sample_surface_ba(const ProjLine& d, int m) {
  std::vector<Flag> out;
  out.reserve(std::size_t(m) * m);
  for (const ProjPoint& q : sample_line_points(d, m))
    for (const ProjLine& e : sample_pencil(q, m)) out.emplace_back(q, e, 1.0);
  return out;
}

double dist_to_circle_alpha(const Flag& x, const ProjPoint& p) {
  double dp = angle_abs(x.point.rep, p.rep);
  double s = std::abs(x.line.normal.dot(p.rep));
  double dl = std::asin(std::min(1.0, s));  // best line through p
  return std::max(dp, dl);
}

double dist_to_circle_beta(const Flag& x, const ProjLine& d) {
  double dl = angle_abs(x.line.normal, d.normal);
  double s = std::abs(x.point.rep.dot(d.normal));
  double dp = std::asin(std::min(1.0, s));  // best point on d
  return std::max(dp, dl);
}

Mat3 rotation_about(const Vec3& axis, double theta) {
  Mat3 K;
  K << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Mat3::Identity() + std::sin(theta) * K + (1 - std::cos(theta)) * K * K;
}

Flag perturb_flag(const Flag& x, double ea, double eb, double et) {
  Vec3 p = x.point.rep, n = x.line.normal;
  Mat3 r = rotation_about(n.cross(p), et) * rotation_about(n, eb) * rotation_about(p, ea);
  Vec3 p2 = r * p, n2 = r * n;
  n2.normalize();
  p2 -= p2.dot(n2) * n2;
  return Flag(ProjPoint(p2), ProjLine(n2), 1.0);
}

OrientedFlag perturb_oriented(const OrientedFlag& x, double e1, double e2, double e3) {
  Vec3 d = x.dir, c = x.conormal;
  Mat3 r = rotation_about(c.cross(d), e3) * rotation_about(c, e2) * rotation_about(d, e1);
  return OrientedFlag(r * d, r * c, 1.0);
}

ProjPoint perturb_point(const ProjPoint& p, double e1, double e2) {
  Vec3 u, w;
  orthonormal_complement(p.rep, u, w);
  return ProjPoint(p.rep + e1 * u + e2 * w);
}

ProjLine perturb_line(const ProjLine& d, double e1, double e2) {
  Vec3 u, w;
  orthonormal_complement(d.normal, u, w);
  return ProjLine(d.normal + e1 * u + e2 * w);
}

}  // namespace flagdyn

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "flagdyn/errors.hpp"

namespace flagdyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

// angle between rays/lines, numerically stable near 0 and pi/2
inline double angle_abs(const Vec3& u, const Vec3& v) {
  return std::atan2(u.cross(v).norm(), std::abs(u.dot(v)));
}
// oriented angle in [0, pi]
inline double angle_signed(const Vec3& u, const Vec3& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

// Canonical representative of a ray through +-v: unit norm, the coordinate of
// largest absolute value made positive (ties broken by lowest index).
Vec3 canonical_rep(const Vec3& v);

// Deterministic orthonormal basis {u, w} of the plane orthogonal to unit v,
// with u x w = +-v consistent (w = v x u).
void orthonormal_complement(const Vec3& v, Vec3& u, Vec3& w);

// point of RP^2, stored as canonical unit representative
struct ProjPoint {
  Vec3 rep;
  ProjPoint() : rep(1, 0, 0) {}
  explicit ProjPoint(const Vec3& v);
};

// line of RP^2 = point of the dual plane, stored by canonical unit normal
struct ProjLine {
  Vec3 normal;
  ProjLine() : normal(0, 0, 1) {}
  explicit ProjLine(const Vec3& n);
};

ProjLine join(const ProjPoint& p, const ProjPoint& q);   // DegenerateJoin
ProjPoint meet(const ProjLine& d, const ProjLine& e);    // DegenerateMeet

// incident pair (p, D), p on D
struct Flag {
  ProjPoint point;
  ProjLine line;
  Flag();
  // enforces incidence within tol (after an exact re-projection of the point
  // onto the line's plane); IncidenceViolation otherwise
  Flag(const ProjPoint& p, const ProjLine& d, double tol = 1e-12);
};

// flag with both the line and the ambient plane oriented: unit direction plus
// unit conormal (the oriented plane's normal via the right-hand rule),
// orthogonal pair on S^2, no sign canonicalization
struct OrientedFlag {
  Vec3 dir;
  Vec3 conormal;
  OrientedFlag();
  OrientedFlag(const Vec3& d, const Vec3& c, double tol = 1e-12);
};

// element of PGL(3,R), representative normalized to |det| = 1
struct GroupElement {
  Mat3 mat;
  GroupElement() : mat(Mat3::Identity()) {}
  explicit GroupElement(const Mat3& m);  // SingularInput

  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& o) const;
  GroupElement pow(int n) const;
  // transpose-inverse (the duality representation)
  GroupElement theta() const;
  // the det = +1 representative
  Mat3 sl3() const { return mat.determinant() < 0 ? Mat3(-mat) : mat; }
};

GroupElement embed_j(const Mat2& h);  // h in GL(2) -> [[h,0],[0,1]]

ProjPoint act(const GroupElement& g, const ProjPoint& p);
ProjLine act(const GroupElement& g, const ProjLine& d);
Flag act(const GroupElement& g, const Flag& x);  // exact incidence restoration
OrientedFlag act(const GroupElement& g, const OrientedFlag& x);

// duality m -> [m^perp] and its inverse
ProjLine tau(const ProjPoint& m);
ProjPoint tau_inv(const ProjLine& d);

// kappa(m, D) = (D^perp, m^perp); involutive, swaps the two circle families
Flag kappa(const Flag& x);

// covering projection X^ -> X
Flag project_pi(const OrientedFlag& x);

double dist(const ProjPoint& a, const ProjPoint& b);  // [0, pi/2]
double dist(const ProjLine& a, const ProjLine& b);    // [0, pi/2]
double dist(const Flag& a, const Flag& b);            // max of the two
double dist(const OrientedFlag& a, const OrientedFlag& b);  // [0, pi]

bool incident(const ProjPoint& p, const ProjLine& d, double tol = 1e-10);

// alpha circle C_alpha(p): flags (p, D), D running through p.
std::vector<Flag> sample_circle_alpha(const ProjPoint& p, int m);
// beta circle C_beta(D): flags (q, D), q running along D.
std::vector<Flag> sample_circle_beta(const ProjLine& d, int m);
// points along a projective line
std::vector<ProjPoint> sample_line_points(const ProjLine& d, int m);
// lines through a point (the dual pencil)
std::vector<ProjLine> sample_pencil(const ProjPoint& p, int m);

// S_{alpha,beta}(p): flags whose line passes through p; m x m grid
std::vector<Flag> sample_surface_ab(const ProjPoint& p, int m);
// S_{beta,alpha}(d): flags whose point lies on d; m x m grid
std::vector<Flag> sample_surface_ba(const ProjLine& d, int m);

// closed-form distance from a flag to the circles (used by tubes and tests)
double dist_to_circle_alpha(const Flag& x, const ProjPoint& p);
double dist_to_circle_beta(const Flag& x, const ProjLine& d);

// rotation by theta about a unit axis
Mat3 rotation_about(const Vec3& axis, double theta);

// Rigid tangent moves of a flag: rotations about the point rep (alpha move:
// line turns, point fixed), about the line normal (beta move: point slides),
// and about their cross product (transverse).  Exact incidence is preserved.
Flag perturb_flag(const Flag& x, double eps_alpha, double eps_beta, double eps_trans);
OrientedFlag perturb_oriented(const OrientedFlag& x, double e1, double e2, double e3);
ProjPoint perturb_point(const ProjPoint& p, double e1, double e2);
ProjLine perturb_line(const ProjLine& d, double e1, double e2);

}  // namespace flagdyn

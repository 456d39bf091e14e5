#pragma once

#include <variant>

#include "flagdyn/schottky.hpp"

namespace flagdyn {

// the compactified geodesic flow, projectively Diag(e^t, e^t, 1)
GroupElement psi(double t);

using FlowPoint = std::variant<Flag, OrientedFlag>;

Flag flow(double t, const Flag& x);
OrientedFlag flow(double t, const OrientedFlag& x);
FlowPoint flow(double t, const FlowPoint& p);

// the flow fixes C_alpha([e3]), C_beta([e1,e2]) and the circle
// C = {(p, D) : p in [e1,e2], [e3] in D} pointwise
struct FixedSet {
  ProjPoint alpha_center;  // [e3]
  ProjLine beta_line;      // [e1,e2]
  std::vector<Flag> sample_c(int m) const;
};
FixedSet fixed_circles();

double dist_to_circle_c(const Flag& x);  // closed form (4 candidate angles)
double dist_to_fixed_set(const Flag& x);

bool is_fixed(const Flag& x, double t);
bool is_fixed(const OrientedFlag& x, double t);

// forward limit retraction onto C_beta([e1,e2]) (unbalanced beta type of the
// flow, lambda = 1) and its backward twin onto C_alpha([e3])
Flag phi_plus(const Flag& x);
Flag phi_minus(const Flag& x);

struct ChartPoint {
  int chart = 1;
  Vec3 coords = Vec3::Zero();
};

// chart 1: (x,y,z) -> dir (1,x,y), conormal (xz-y, -z, 1)
// chart 2: (x,y,z) -> dir (x,y,1), conormal (-1, z, x-yz)
OrientedFlag chart_map(const ChartPoint& c);
// projective inverse: accepts either lift of the chart image; OutOfChartDomain
// when the normalizing coordinate vanishes
ChartPoint chart_inverse(int chart, const OrientedFlag& x);

// chart-1 coords -> chart-2 coords: (1/y, x/y, z/(zx-y)); inverse twin
Vec3 transition_12(const Vec3& v);
Vec3 transition_21(const Vec3& v);

// the flow read in a chart is linear: chart 1 -> Diag(1, e^-t, e^-t),
// chart 2 -> Diag(e^t, e^t, 1)
Mat3 conjugated_flow_in_chart(int chart, double t);

struct ExponentTriple {
  double lambda_c = 0;      // along the flow direction
  double lambda_alpha = 0;  // vary the plane, fix the line
  double lambda_beta = 0;   // vary the line inside the plane
};

// per-step contraction of the invariant alpha/beta fiber fields plus the
// closed-form flow speed, averaged over the trailing half of the orbit (the
// leading half is discarded as transient); OnFixedSet if the basepoint starts
// within 0.01 of the fixed set
ExponentTriple lyapunov(const OrientedFlag& p, double T, double dt, bool forward = true);

struct FateResult {
  enum class Kind { Escapes, Recurrent, Undetermined } kind = Kind::Undetermined;
  Flag limit;                  // phi_plus(x) (phi_minus backward)
  double dist_to_limit_set = 0;
};

// compares the endpoint of x against the depth-n attractive point cloud;
// NotInDomain unless x is in the open orbit and reduces to the fundamental
// domain
FateResult geodesic_fate(const SchottkyGroup& g, const Flag& x, int depth, double eps,
                         bool forward = true, int max_steps = 200);

struct OrbitPoint {
  double t = 0;
  Flag flag;  // fundamental-domain representative
  Word word;  // evaluate(word) * psi(t) * x stays in the domain
};

std::vector<OrbitPoint> quotient_orbit(const SchottkyGroup& g, const Flag& x, double t_max,
                                       double dt);

}  // namespace flagdyn

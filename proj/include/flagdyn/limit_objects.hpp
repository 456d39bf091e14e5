#pragma once

#include <variant>

#include "flagdyn/asymptotics.hpp"
#include "flagdyn/compactsets.hpp"
#include "flagdyn/projgeo.hpp"

namespace flagdyn {

// wedge of the alpha circle at the point and the beta circle at the line
struct Bouquet {
  Flag center;
};

double dist_to_bouquet(const Flag& x, const Bouquet& b);
// both circles plus the wedge point; 2m+1 flags
std::vector<Flag> sample_bouquet(const Bouquet& b, int m);

// attracting/repelling data of a balanced (loxodromic-like) limit
struct BalancedObjects {
  ProjPoint p_plus, p_minus;
  ProjLine d_plus, d_minus;
  Flag x_plus() const;
  Flag x_minus() const;
  Bouquet bouquet_plus() const { return Bouquet{x_plus()}; }
  Bouquet bouquet_minus() const { return Bouquet{x_minus()}; }
};

// eigendata of a loxodromic element
struct LoxObjects {
  ProjPoint p_minus, p_saddle, p_plus;
  ProjLine d_minus, d_plus;
  double lam_minus = 0, lam_saddle = 0, lam_plus = 0;
  BalancedObjects balanced() const;
};

LoxObjects lox_objects(const GroupElement& g);  // NotLoxodromic

// alpha-type limit: attracting point, repulsive line, contraction factor, the
// limit map data.  k_lim/l_lim transport the standard-position formulas.
struct UnbalancedAlphaObjects {
  ProjPoint p_plus;
  ProjLine d_minus;
  double lambda_inf = 1.0;  // lim a3/a2, in (0,1]
  GroupElement a_inf;       // Diag(1,1,lambda) conjugated into position
  GroupElement k_lim, l_lim;
};

struct UnbalancedBetaObjects {
  ProjPoint p_minus;
  ProjLine d_plus;
  double lambda_inf = 1.0;  // lim a2/a1, in (0,1]
  GroupElement a_inf;       // Diag(1,lambda,1) conjugated into position
  GroupElement k_lim, l_lim;
};

// estimated from Cartan factors at the probe schedule; NonConvergent when the
// last two probes disagree by more than 1e-4
BalancedObjects balanced_objects_of_sequence(const SequenceFn& seq, int n_probe = 5);
UnbalancedAlphaObjects alpha_objects_of_sequence(const SequenceFn& seq, int n_probe = 5);
UnbalancedBetaObjects beta_objects_of_sequence(const SequenceFn& seq, int n_probe = 5);

// limit map of an alpha-type sequence: point on d_minus -> line through p_plus
ProjLine ghat_infty(const UnbalancedAlphaObjects& o, const ProjPoint& p);
// limit map of a beta-type sequence: point != p_minus -> point on d_plus
ProjPoint gbar_infty(const UnbalancedBetaObjects& o, const ProjPoint& p);

// fibration of the flag space over the attracting circle
Flag phi_fibration(const UnbalancedAlphaObjects& o, const Flag& x);  // onto C_alpha(p_plus)
Flag phi_fibration(const UnbalancedBetaObjects& o, const Flag& x);   // onto C_beta(d_plus)

// the beta-type objects seen through the duality representation (alpha-type)
UnbalancedAlphaObjects theta_dual(const UnbalancedBetaObjects& o);
BalancedObjects theta_dual(const BalancedObjects& o);

using DynObjects = std::variant<BalancedObjects, UnbalancedAlphaObjects, UnbalancedBetaObjects>;

// closed description of a dynamic set (the attainable limits of g_n(x_n),
// x_n -> x)
struct LimitSetDescriptor {
  enum class Kind {
    PointP,       // one point of RP2
    LineP,        // a projective line inside RP2
    WholeRP2,
    PointDual,    // one point of RP2*, i.e. a line
    DualPencil,   // all lines through a point
    WholeRP2Dual,
    PointX,       // one flag
    CircleAlpha,  // C_alpha(point)
    CircleBeta,   // C_beta(line)
    SurfaceAB,    // flags whose line passes through the point
    SurfaceBA,    // flags whose point lies on the line
    WholeX,
  };
  Kind kind = Kind::PointP;
  ProjPoint point;
  ProjLine line;
  Flag flag;
};

const char* descriptor_kind_name(LimitSetDescriptor::Kind k);
Space descriptor_space(const LimitSetDescriptor& d);

// membership tolerance for the exceptional loci; AmbiguousLocus when the input
// sits between the exact-incidence threshold (1e-12) and delta
inline constexpr double kLocusDelta = 1e-8;

LimitSetDescriptor predict_dynamic_set(const DynObjects& o, const ProjPoint& p,
                                       double delta = kLocusDelta);
LimitSetDescriptor predict_dynamic_set(const DynObjects& o, const ProjLine& d,
                                       double delta = kLocusDelta);
LimitSetDescriptor predict_dynamic_set(const DynObjects& o, const Flag& x,
                                       double delta = kLocusDelta);

// dense sample of a predicted set; m controls per-dimension resolution,
// whole_scale the net scale used for whole-space answers
SampledCompact sample_descriptor(const LimitSetDescriptor& d, int m, double whole_scale = 0.1);

// brute-force oracle: perturbs x at scales s * theta(n) with independent
// per-direction log-uniform magnitudes, pushes forward by seq(n) for n near
// n_max, and accumulates the image cloud
struct OracleConfig {
  int trials = 200;
  int n_max = 30;
  std::vector<double> scales = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  int n_window = 5;        // uses n_max - n_window + 1 .. n_max
  double decades = 16.0;   // log-uniform magnitude range below each bound
  double theta_power = 1.0;  // theta(n) = n^-power; any power > 0 vanishes
  uint64_t seed = 12345;
};

SampledCompact empirical_dynamic_set(const SequenceFn& seq, const ProjPoint& p,
                                     const OracleConfig& cfg);
SampledCompact empirical_dynamic_set(const SequenceFn& seq, const ProjLine& d,
                                     const OracleConfig& cfg);
SampledCompact empirical_dynamic_set(const SequenceFn& seq, const Flag& x,
                                     const OracleConfig& cfg);

}  // namespace flagdyn

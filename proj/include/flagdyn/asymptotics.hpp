#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "flagdyn/projgeo.hpp"

namespace flagdyn {

// g = k * diag(a) * l with k, l orthogonal and a descending, product 1
struct CartanTriple {
  GroupElement k;
  Vec3 a;
  GroupElement l;
};

CartanTriple cartan(const GroupElement& g);

enum class AsymptoticType { UnbalancedAlpha, UnbalancedBeta, Balanced };

AsymptoticType invert_type(AsymptoticType t);

// how the cyclic group generated by g escapes (or not)
struct IterateClassification {
  enum class Kind { Bounded, NotSimple, Simple };
  Kind kind = Kind::Bounded;
  AsymptoticType type = AsymptoticType::Balanced;  // meaningful for Simple
  // real eigenvalues sorted by descending modulus, with matching unit
  // eigenvector columns
  Vec3 eigenvalues = Vec3::Zero();
  Mat3 eigenvectors = Mat3::Identity();
  bool loxodromic() const {
    return kind == Kind::Simple && type == AsymptoticType::Balanced;
  }
};

// relative tolerance for eigenvalue coincidence
inline constexpr double kEigTol = 1e-8;

IterateClassification classify_iterates(const GroupElement& g);  // NotRealDiagonalizable

using SequenceFn = std::function<GroupElement(int)>;

struct SequenceClassification {
  std::optional<AsymptoticType> type;  // empty = undetermined
  std::vector<int> probes;
  std::vector<double> ratio_ab;  // a1/a2 at each probe
  std::vector<double> ratio_bc;  // a2/a3 at each probe
};

// Probes the Cartan projection on the geometric schedule n = 4 * 2^k,
// k < n_probe.  A ratio counts as divergent when it exceeds 1e6 and grew over
// the last three probes, bounded when the last three agree within 1%.
SequenceClassification classify_sequence(const SequenceFn& seq, int n_probe = 5);

}  // namespace flagdyn

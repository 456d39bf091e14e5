#include "flagdyn/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace flagdyn {

CartanTriple cartan(const GroupElement& g) {
  Eigen::JacobiSVD<Mat3> svd(g.mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CartanTriple out;
  out.k.mat = svd.matrixU();
  out.l.mat = svd.matrixV().transpose();
  out.a = svd.singularValues();  // descending
  return out;
}

AsymptoticType invert_type(AsymptoticType t) {
  switch (t) {
    case AsymptoticType::UnbalancedAlpha: return AsymptoticType::UnbalancedBeta;
    case AsymptoticType::UnbalancedBeta: return AsymptoticType::UnbalancedAlpha;
    case AsymptoticType::Balanced: return AsymptoticType::Balanced;
  }
  return AsymptoticType::Balanced;
}

IterateClassification classify_iterates(const GroupElement& g) {
  Eigen::EigenSolver<Mat3> es(g.mat);
  Eigen::Vector3cd vals = es.eigenvalues();
  double scale = 0;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(vals[i]));
  for (int i = 0; i < 3; ++i) {
    if (std::abs(vals[i].imag()) > kEigTol * scale)
      fail(Err::NotRealDiagonalizable, "complex eigenvalues");
  }

  double lam[3];
  Vec3 vecs[3];
  for (int i = 0; i < 3; ++i) {
    lam[i] = vals[i].real();
    vecs[i] = es.eigenvectors().col(i).real();
    vecs[i].normalize();
  }
  // repeated eigenvalues: require matching geometric multiplicity
  bool used[3] = {false, false, false};
  for (int i = 0; i < 3; ++i) {
    if (used[i]) continue;
    std::vector<int> cluster{i};
    for (int j = i + 1; j < 3; ++j) {
      if (!used[j] && std::abs(lam[j] - lam[i]) <= kEigTol * scale) {
        cluster.push_back(j);
        used[j] = true;
      }
    }
    if (cluster.size() >= 2) {
      double mean = 0;
      for (int c : cluster) mean += lam[c];
      mean /= double(cluster.size());
      Mat3 shifted = g.mat - mean * Mat3::Identity();
      Eigen::JacobiSVD<Mat3> svd(shifted);
      Vec3 s = svd.singularValues();
      int null_dim = 0;
      for (int d = 0; d < 3; ++d)
        if (s[d] <= 1e-7 * scale) ++null_dim;
      if (null_dim < int(cluster.size()))
        fail(Err::NotRealDiagonalizable, "defective matrix");
    }
  }

  int order[3] = {0, 1, 2};
  std::sort(order, order + 3,
            [&](int x, int y) { return std::abs(lam[x]) > std::abs(lam[y]); });

  IterateClassification out;
  for (int i = 0; i < 3; ++i) {
    out.eigenvalues[i] = lam[order[i]];
    out.eigenvectors.col(i) = vecs[order[i]];
  }
  double a = std::abs(out.eigenvalues[0]);
  double b = std::abs(out.eigenvalues[1]);
  double c = std::abs(out.eigenvalues[2]);

  if (a - c <= kEigTol * a) {
    out.kind = IterateClassification::Kind::Bounded;
    return out;
  }
  bool pos = out.eigenvalues[0] > 0;
  for (int i = 1; i < 3; ++i) {
    if ((out.eigenvalues[i] > 0) != pos) {
      out.kind = IterateClassification::Kind::NotSimple;
      return out;
    }
  }
  out.kind = IterateClassification::Kind::Simple;
  bool gap_ab = (a - b) > kEigTol * a;
  bool gap_bc = (b - c) > kEigTol * b;
  if (gap_ab && gap_bc)
    out.type = AsymptoticType::Balanced;
  else if (gap_ab)
    out.type = AsymptoticType::UnbalancedAlpha;
  else
    out.type = AsymptoticType::UnbalancedBeta;
  return out;
}

namespace {

enum class RatioFate { Diverges, Bounded, Unclear };

RatioFate ratio_fate(const std::vector<double>& r) {
  size_t n = r.size();
  if (n < 3) return RatioFate::Unclear;
  double last = r[n - 1];
  if (last > 1e6 && r[n - 1] > r[n - 2] && r[n - 2] > r[n - 3]) return RatioFate::Diverges;
  bool stable = std::abs(r[n - 2] - last) <= 0.01 * last &&
                std::abs(r[n - 3] - last) <= 0.01 * last;
  if (stable) return RatioFate::Bounded;
  return RatioFate::Unclear;
}

}  // namespace

SequenceClassification classify_sequence(const SequenceFn& seq, int n_probe) {
  SequenceClassification out;
  int count = std::max(n_probe, 4);
  int n = 4;
  RatioFate ab = RatioFate::Unclear, bc = RatioFate::Unclear;
  for (int k = 0; k < count; ++k) {
    CartanTriple c = cartan(seq(n));
    out.probes.push_back(n);
    out.ratio_ab.push_back(c.a[0] / c.a[1]);
    out.ratio_bc.push_back(c.a[1] / c.a[2]);
    ab = ratio_fate(out.ratio_ab);
    bc = ratio_fate(out.ratio_bc);
    // stop once both fates are settled; late probes of fast sequences only
    // push doubles toward overflow
    if (ab != RatioFate::Unclear && bc != RatioFate::Unclear) break;
    if (n > (1 << 29)) break;
    n *= 2;
  }
  if (ab == RatioFate::Diverges && bc == RatioFate::Bounded)
    out.type = AsymptoticType::UnbalancedAlpha;
  else if (ab == RatioFate::Bounded && bc == RatioFate::Diverges)
    out.type = AsymptoticType::UnbalancedBeta;
  else if (ab == RatioFate::Diverges && bc == RatioFate::Diverges)
    out.type = AsymptoticType::Balanced;
  return out;
}

}  // namespace flagdyn

#include "flagdyn/compactsets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flagdyn/format.hpp"

namespace flagdyn {

const char* space_name(Space s) {
  switch (s) {
    case Space::RP2: return "rp2";
    case Space::RP2Dual: return "rp2dual";
    case Space::FlagSpace: return "flag";
    case Space::OrientedFlagSpace: return "oflag";
  }
  return "?";
}

SampledCompact SampledCompact::of_points(std::vector<ProjPoint> v) {
  SampledCompact s;
  s.space = Space::RP2;
  s.points = std::move(v);
  return s;
}
SampledCompact SampledCompact::of_lines(std::vector<ProjLine> v) {
  SampledCompact s;
  s.space = Space::RP2Dual;
  s.lines = std::move(v);
  return s;
}
SampledCompact SampledCompact::of_flags(std::vector<Flag> v) {
  SampledCompact s;
  s.space = Space::FlagSpace;
  s.flags = std::move(v);
  return s;
}
SampledCompact SampledCompact::of_oriented(std::vector<OrientedFlag> v) {
  SampledCompact s;
  s.space = Space::OrientedFlagSpace;
  s.oflags = std::move(v);
  return s;
}

std::size_t SampledCompact::size() const {
  switch (space) {
    case Space::RP2: return points.size();
    case Space::RP2Dual: return lines.size();
    case Space::FlagSpace: return flags.size();
    case Space::OrientedFlagSpace: return oflags.size();
  }
  return 0;
}

void SampledCompact::append(const SampledCompact& other) {
  if (other.space != space) fail(Err::DomainViolation, "mismatched spaces");
  points.insert(points.end(), other.points.begin(), other.points.end());
  lines.insert(lines.end(), other.lines.begin(), other.lines.end());
  flags.insert(flags.end(), other.flags.begin(), other.flags.end());
  oflags.insert(oflags.end(), other.oflags.begin(), other.oflags.end());
}

namespace {

// closeness key: larger = closer; dist = acos(clamped key)
inline double key(const SampledCompact& a, std::size_t i, const SampledCompact& b,
                  std::size_t j) {
  switch (a.space) {
    case Space::RP2: return std::abs(a.points[i].rep.dot(b.points[j].rep));
    case Space::RP2Dual: return std::abs(a.lines[i].normal.dot(b.lines[j].normal));
    case Space::FlagSpace: {
      double kp = std::abs(a.flags[i].point.rep.dot(b.flags[j].point.rep));
      double kl = std::abs(a.flags[i].line.normal.dot(b.flags[j].line.normal));
      return std::min(kp, kl);
    }
    case Space::OrientedFlagSpace: {
      double kd = a.oflags[i].dir.dot(b.oflags[j].dir);
      double kc = a.oflags[i].conormal.dot(b.oflags[j].conormal);
      return std::min(kd, kc);
    }
  }
  return 0;
}

inline double key_to_dist(double k) { return std::acos(std::clamp(k, -1.0, 1.0)); }

void check_pair(const SampledCompact& a, const SampledCompact& b) {
  if (a.space != b.space) fail(Err::DomainViolation, "mismatched spaces");
  if (a.size() == 0 || b.size() == 0) fail(Err::DomainViolation, "empty sample");
}

}  // namespace

double sample_dist(const SampledCompact& a, std::size_t i, const SampledCompact& b,
                   std::size_t j) {
  return key_to_dist(key(a, i, b, j));
}

double directed_hausdorff(const SampledCompact& a, const SampledCompact& b) {
  check_pair(a, b);
  double worst_key = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      double k = key(a, i, b, j);
      if (k > best) best = k;
      if (best >= worst_key) break;  // cannot affect the max-min
    }
    if (best < worst_key) worst_key = best;
  }
  return key_to_dist(worst_key);
}

double hausdorff(const SampledCompact& a, const SampledCompact& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

bool covers(const SampledCompact& a, const SampledCompact& targets, double eps) {
  check_pair(a, targets);
  double need = std::cos(eps);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    bool hit = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (key(targets, t, a, i) >= need) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t(0));
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;  // keep the smallest index as root
    else parent[a] = b;
  }
};

}  // namespace

Components components(const SampledCompact& a, double delta) {
  std::size_t n = a.size();
  UnionFind uf(n);
  double need = std::cos(delta);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uf.find(i) == uf.find(j)) continue;
      if (key(a, i, a, j) >= need) uf.unite(i, j);
    }
  }
  Components out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = uf.find(i);
  std::vector<std::size_t> roots(out.labels);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  out.count = roots.size();
  return out;
}

std::string to_csv(const SampledCompact& a) {
  std::string out;
  auto row3 = [&](const Vec3& v) {
    out += ',';
    out += g17(v[0]);
    out += ',';
    out += g17(v[1]);
    out += ',';
    out += g17(v[2]);
  };
  const char* tag = space_name(a.space);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out += tag;
    switch (a.space) {
      case Space::RP2: row3(a.points[i].rep); break;
      case Space::RP2Dual: row3(a.lines[i].normal); break;
      case Space::FlagSpace:
        row3(a.flags[i].point.rep);
        row3(a.flags[i].line.normal);
        break;
      case Space::OrientedFlagSpace:
        row3(a.oflags[i].dir);
        row3(a.oflags[i].conormal);
        break;
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> out;
  out.reserve(n);
  const double golden = 2.399963229728653;  // 2*pi*(1 - 1/phi)
  for (int k = 0; k < n; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / double(n);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * k;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

}  // namespace

std::vector<ProjPoint> net_rp2(double scale) {
  int n = int(std::ceil(6.0 / (scale * scale)));
  std::vector<ProjPoint> out;
  out.reserve(n);
  for (const Vec3& v : fibonacci_sphere(n)) out.emplace_back(v);
  return out;
}

std::vector<ProjLine> net_rp2_dual(double scale) {
  int n = int(std::ceil(6.0 / (scale * scale)));
  std::vector<ProjLine> out;
  out.reserve(n);
  for (const Vec3& v : fibonacci_sphere(n)) out.emplace_back(v);
  return out;
}

std::vector<Flag> net_flags(double scale) {
  double sp = 0.5 * scale;                       // point part
  int m = int(std::ceil(M_PI / (0.8 * scale)));  // pencil angles
  int n = int(std::ceil(6.0 / (sp * sp)));
  std::vector<Flag> out;
  out.reserve(std::size_t(n) * m);
  for (const Vec3& v : fibonacci_sphere(n)) {
    ProjPoint p(v);
    Vec3 u, w;
    orthonormal_complement(p.rep, u, w);
    for (int k = 0; k < m; ++k) {
      double t = M_PI * double(k) / double(m);
      out.emplace_back(p, ProjLine(std::cos(t) * u + std::sin(t) * w), 1.0);
    }
  }
  return out;
}

std::vector<OrientedFlag> net_oriented(double scale) {
  double sp = 0.5 * scale;
  int m = int(std::ceil(2.0 * M_PI / (0.8 * scale)));
  int n = int(std::ceil(12.0 / (sp * sp)));
  std::vector<OrientedFlag> out;
  out.reserve(std::size_t(n) * m);
  for (const Vec3& v : fibonacci_sphere(n)) {
    Vec3 u, w;
    orthonormal_complement(v, u, w);
    for (int k = 0; k < m; ++k) {
      double t = 2.0 * M_PI * double(k) / double(m);
      out.emplace_back(v, std::cos(t) * u + std::sin(t) * w, 1.0);
    }
  }
  return out;
}

ProjPoint random_point(Rng& rng) {
  return ProjPoint(Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian()));
}

ProjLine random_line(Rng& rng) {
  return ProjLine(Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian()));
}

Flag random_flag(Rng& rng) {
  ProjPoint p = random_point(rng);
  Vec3 u, w;
  orthonormal_complement(p.rep, u, w);
  double t = rng.uniform(0.0, M_PI);
  return Flag(p, ProjLine(std::cos(t) * u + std::sin(t) * w), 1.0);
}

OrientedFlag random_oriented(Rng& rng) {
  Vec3 d(rng.gaussian(), rng.gaussian(), rng.gaussian());
  d.normalize();
  Vec3 u, w;
  orthonormal_complement(d, u, w);
  double t = rng.uniform(0.0, 2.0 * M_PI);
  return OrientedFlag(d, std::cos(t) * u + std::sin(t) * w, 1.0);
}

GroupElement random_group(Rng& rng) {
  for (;;) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
    if (std::abs(m.determinant()) >= 0.1) return GroupElement(m);
  }
}

GroupElement random_rotation(Rng& rng) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Mat3> qr(m);
  Mat3 q = qr.householderQ();
  Mat3 rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i)
    if (rr(i, i) < 0) q.col(i) = -q.col(i);
  if (q.determinant() < 0) q.col(2) = -q.col(2);
  GroupElement g;
  g.mat = q;
  return g;
}

}  // namespace flagdyn

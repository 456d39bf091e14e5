#include "flagdyn/schottky.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "flagdyn/format.hpp"

namespace flagdyn {

std::string Word::str() const {
  std::string s;
  for (int l : letters) {
    s += std::to_string(std::abs(l));
    s += (l > 0) ? '+' : '-';
  }
  return s;
}

bool Word::is_reduced() const {
  for (std::size_t i = 0; i + 1 < letters.size(); ++i)
    if (letters[i] == -letters[i + 1]) return false;
  return true;
}

Word Word::inverse() const {
  Word w;
  w.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(-*it);
  return w;
}

Word parse_word(const std::string& s) {
  Word w;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      fail(Err::InvalidWord, "expected generator index at '" + s.substr(i) + "'");
    int idx = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
      idx = idx * 10 + (s[i++] - '0');
    if (idx == 0) fail(Err::InvalidWord, "generator indices are 1-based");
    if (i >= s.size() || (s[i] != '+' && s[i] != '-'))
      fail(Err::InvalidWord, "expected sign after index " + std::to_string(idx));
    w.letters.push_back(s[i] == '+' ? idx : -idx);
    ++i;
  }
  return w;
}

Word reduce(Word w) {
  std::vector<int> out;
  for (int l : w.letters) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  w.letters = std::move(out);
  return w;
}

namespace {

// alphabet order (1,+) < (1,-) < (2,+) < ...
inline int letter_at(int slot) { return (slot % 2 == 0) ? slot / 2 + 1 : -(slot / 2 + 1); }

}  // namespace

long long count_reduced(int d, int n) {
  if (n <= 0) return 1;
  long long c = 2 * d;
  for (int i = 1; i < n; ++i) c *= 2 * d - 1;
  return c;
}

std::vector<Word> enumerate_reduced(int d, int n) {
  if (d < 1) fail(Err::BadConfig, "need at least one generator");
  long long total = count_reduced(d, n);
  if (total > 20'000'000) fail(Err::WordTooLong, "depth " + std::to_string(n));
  std::vector<Word> out;
  out.reserve(std::size_t(total));
  Word cur;
  auto rec = [&](auto&& self, int len) -> void {
    if (len == n) {
      out.push_back(cur);
      return;
    }
    for (int slot = 0; slot < 2 * d; ++slot) {
      int l = letter_at(slot);
      if (!cur.letters.empty() && cur.letters.back() == -l) continue;
      cur.letters.push_back(l);
      self(self, len + 1);
      cur.letters.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

GroupElement evaluate(const std::vector<GroupElement>& gens, const Word& w) {
  GroupElement g;
  for (int l : w.letters) {
    int idx = std::abs(l);
    if (idx < 1 || idx > int(gens.size()))
      fail(Err::InvalidWord, "letter index " + std::to_string(idx) + " out of range");
    g = g * (l > 0 ? gens[idx - 1] : gens[idx - 1].inverse());
  }
  return g;
}

GeneratorInput GeneratorInput::from_sl2(const Mat2& h) {
  GeneratorInput g;
  g.is_sl2 = true;
  g.sl2 = h;
  return g;
}

GeneratorInput GeneratorInput::from_pgl3(const Mat3& m) {
  GeneratorInput g;
  g.pgl3 = m;
  return g;
}

ValidatedGenerators validate_generators(const std::vector<GeneratorInput>& in) {
  if (in.empty()) fail(Err::BadConfig, "no generators");
  ValidatedGenerators v;
  v.all_sl2 = true;
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::string tag = "generator " + std::to_string(i + 1);
    GroupElement g;
    if (in[i].is_sl2) {
      Mat2 h = in[i].sl2;
      double det = h.determinant();
      if (det <= 1e-12) fail(Err::SingularInput, tag + ": 2x2 determinant not positive");
      h /= std::sqrt(det);
      double tr = h.trace();
      if (std::abs(tr) <= 2 + 1e-12) fail(Err::NotHyperbolic, tag + ": |trace| <= 2");
      if (tr < 0) fail(Err::NegativeEigenvalues, tag + ": negative hyperbolic eigenvalues");
      g = embed_j(h);
    } else {
      v.all_sl2 = false;
      g = GroupElement(in[i].pgl3);
      IterateClassification c;
      try {
        c = classify_iterates(g);
      } catch (const Error& e) {
        if (e.code() == Err::NotRealDiagonalizable)
          fail(Err::NotHyperbolic, tag + ": complex or defective spectrum");
        throw;
      }
      if (c.kind == IterateClassification::Kind::NotSimple)
        fail(Err::NegativeEigenvalues, tag + ": mixed eigenvalue signs");
      if (!c.loxodromic())
        fail(Err::NotHyperbolic, tag + ": eigenvalue moduli not pairwise distinct");
    }
    v.gens.push_back(g);
    v.objects.push_back(lox_objects(g));
  }

  // pairwise general position of the 2d fixed flags: p not on D', p' not on D
  std::vector<Flag> flags;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < v.objects.size(); ++i) {
    flags.push_back(v.objects[i].balanced().x_minus());
    names.push_back("x-(g" + std::to_string(i + 1) + ")");
    flags.push_back(v.objects[i].balanced().x_plus());
    names.push_back("x+(g" + std::to_string(i + 1) + ")");
  }
  for (std::size_t a = 0; a < flags.size(); ++a)
    for (std::size_t b = a + 1; b < flags.size(); ++b) {
      double pa_on_db = std::abs(flags[a].point.rep.dot(flags[b].line.normal));
      double pb_on_da = std::abs(flags[b].point.rep.dot(flags[a].line.normal));
      if (pa_on_db <= 1e-8 || pb_on_da <= 1e-8)
        fail(Err::NotGeneralPosition, names[a] + " and " + names[b]);
    }
  return v;
}

namespace {

// perturbation directions for the boundary shell of a tube
const double kInvSqrt3 = 0.5773502691896258;
const double kShellDirs[14][3] = {
    {1, 0, 0},  {-1, 0, 0}, {0, 1, 0},  {0, -1, 0}, {0, 0, 1},  {0, 0, -1},
    {kInvSqrt3, kInvSqrt3, kInvSqrt3},    {kInvSqrt3, kInvSqrt3, -kInvSqrt3},
    {kInvSqrt3, -kInvSqrt3, kInvSqrt3},   {kInvSqrt3, -kInvSqrt3, -kInvSqrt3},
    {-kInvSqrt3, kInvSqrt3, kInvSqrt3},   {-kInvSqrt3, kInvSqrt3, -kInvSqrt3},
    {-kInvSqrt3, -kInvSqrt3, kInvSqrt3},  {-kInvSqrt3, -kInvSqrt3, -kInvSqrt3}};

std::vector<Flag> shell_cloud(const Bouquet& b, double radius, int m) {
  std::vector<Flag> curve = sample_bouquet(b, m);
  std::vector<Flag> out;
  out.reserve(curve.size() * 14);
  for (const Flag& x : curve)
    for (const auto& u : kShellDirs)
      out.push_back(perturb_flag(x, radius * u[0], radius * u[1], radius * u[2]));
  return out;
}

struct CertifyContext {
  const ValidatedGenerators* v = nullptr;
  double density = 0;
  int curve_m = 0;
  std::vector<Bouquet> bm, bp;
  std::vector<std::vector<Flag>> curve;  // 2i = B_i^-, 2i+1 = B_i^+
  double min_sep = 0;                    // min pairwise bouquet separation
  Flag sep_witness;
  std::vector<Flag> net;

  const Bouquet& bouquet(int i, int sign) const { return sign > 0 ? bp[i] : bm[i]; }
};

CertifyContext make_context(const ValidatedGenerators& v, double density) {
  CertifyContext c;
  c.v = &v;
  c.density = density;
  c.curve_m = std::max(16, int(std::ceil(3.2 / density)));
  int d = v.d();
  for (int i = 0; i < d; ++i) {
    BalancedObjects b = v.objects[i].balanced();
    c.bm.push_back(Bouquet{b.x_minus()});
    c.bp.push_back(Bouquet{b.x_plus()});
  }
  for (int i = 0; i < 2 * d; ++i)
    c.curve.push_back(sample_bouquet(i % 2 ? c.bp[i / 2] : c.bm[i / 2], c.curve_m));

  c.min_sep = M_PI;
  for (int a = 0; a < 2 * d; ++a)
    for (int b = a + 1; b < 2 * d; ++b) {
      const Bouquet& ba = a % 2 ? c.bp[a / 2] : c.bm[a / 2];
      const Bouquet& bb = b % 2 ? c.bp[b / 2] : c.bm[b / 2];
      for (const Flag& x : c.curve[a]) {
        double s = dist_to_bouquet(x, bb);
        if (s < c.min_sep) { c.min_sep = s; c.sep_witness = x; }
      }
      for (const Flag& x : c.curve[b]) {
        double s = dist_to_bouquet(x, ba);
        if (s < c.min_sep) { c.min_sep = s; c.sep_witness = x; }
      }
    }
  c.net = net_flags(density);
  return c;
}

CertifyResult certify_with(const CertifyContext& c, const std::vector<int>& exponents,
                           double tube_radius, bool fail_fast) {
  const ValidatedGenerators& v = *c.v;
  int d = v.d();
  if (int(exponents.size()) != d) fail(Err::BadConfig, "need one exponent per generator");
  for (int r : exponents)
    if (r < 1) fail(Err::BadConfig, "exponents must be positive");
  if (tube_radius <= 0) fail(Err::BadConfig, "tube radius must be positive");

  double margin = c.min_sep - 2 * tube_radius;
  Flag worst = c.sep_witness;
  std::string worst_what = "tube separation";
  if (fail_fast && margin <= 0)
    return FailureReport{worst_what, worst, margin};

  // sample pool: quasi-uniform net, all bouquet curves, all boundary shells
  std::vector<Flag> pool = c.net;
  for (const auto& cv : c.curve) pool.insert(pool.end(), cv.begin(), cv.end());
  for (int i = 0; i < 2 * d; ++i) {
    const Bouquet& b = i % 2 ? c.bp[i / 2] : c.bm[i / 2];
    std::vector<Flag> shell = shell_cloud(b, tube_radius, c.curve_m);
    pool.insert(pool.end(), shell.begin(), shell.end());
  }

  long long checked = 0;
  for (int i = 0; i < d; ++i)
    for (int sign : {+1, -1}) {
      GroupElement h = v.gens[i].pow(sign * exponents[i]);
      const Bouquet& src = c.bouquet(i, -sign);
      const Bouquet& tgt = c.bouquet(i, sign);
      std::string what = "inclusion g" + std::to_string(i + 1) + (sign > 0 ? "^+r" : "^-r");
      for (const Flag& x : pool) {
        if (dist_to_bouquet(x, src) < tube_radius) continue;  // interior of H_i^{-sign}
        double slack = tube_radius - dist_to_bouquet(act(h, x), tgt);
        ++checked;
        if (slack < margin) {
          margin = slack;
          worst = x;
          worst_what = what;
          if (fail_fast && margin <= 0) return FailureReport{worst_what, worst, margin};
        }
      }
    }

  if (margin <= 0) return FailureReport{worst_what, worst, margin};
  PingPongCertificate cert;
  cert.margin = margin;
  cert.sample_density = c.density;
  cert.exponents = exponents;
  cert.checked_pairs = checked;
  return cert;
}

}  // namespace

CertifyResult certify_pingpong(const ValidatedGenerators& v, const std::vector<int>& exponents,
                               double tube_radius, double density) {
  CertifyContext c = make_context(v, density);
  return certify_with(c, exponents, tube_radius, false);
}

SchottkyGroup build_group(const ValidatedGenerators& v, const std::vector<int>& exponents,
                          double tube_radius, double density) {
  SchottkyGroup g;
  g.gens_base = v.gens;
  g.exponents = exponents;
  for (int i = 0; i < v.d(); ++i) g.gens.push_back(v.gens[i].pow(exponents[i]));
  CertifyContext c = make_context(v, density);
  g.bouquet_minus = c.bm;
  g.bouquet_plus = c.bp;
  g.tube_radius = tube_radius;
  for (int i = 0; i < 2 * v.d(); ++i) {
    const Bouquet& b = i % 2 ? c.bp[i / 2] : c.bm[i / 2];
    g.boundary_samples.push_back(shell_cloud(b, tube_radius, c.curve_m));
  }
  CertifyResult r = certify_with(c, exponents, tube_radius, false);
  if (const auto* cert = std::get_if<PingPongCertificate>(&r)) g.certificate = *cert;
  g.all_sl2 = v.all_sl2;
  return g;
}

std::vector<double> default_radius_grid() {
  return {0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
}

SearchResult search_exponents(const ValidatedGenerators& v, int r_max,
                              const std::vector<double>& radius_grid, double density) {
  if (r_max < 1 || radius_grid.empty()) fail(Err::BadConfig, "empty search space");
  CertifyContext c = make_context(v, density);
  std::vector<double> grid = radius_grid;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  for (int r = 1; r <= r_max; ++r) {
    std::vector<int> exps(v.d(), r);
    for (double rho : grid) {
      if (c.min_sep - 2 * rho <= 0) continue;  // tubes can never separate
      CertifyResult res = certify_with(c, exps, rho, true);
      if (const auto* cert = std::get_if<PingPongCertificate>(&res))
        return SearchResult{exps, rho, *cert};
    }
  }
  fail(Err::NoCertificateFound, "no certificate up to r_max = " + std::to_string(r_max));
}

namespace {

Flag cartan_attracting_flag(const GroupElement& g) {
  CartanTriple c = cartan(g);
  ProjPoint p = act(c.k, ProjPoint(Vec3(1, 0, 0)));
  ProjLine d = act(c.k, ProjLine(Vec3(0, 0, 1)));
  return Flag(p, d, 1e-9);
}

}  // namespace

LimitSetCloud limit_set(const SchottkyGroup& g, int depth, int samples_per_circle) {
  if (!g.certificate) fail(Err::BadConfig, "group not certified");
  if (depth < 1) fail(Err::BadConfig, "depth must be >= 1");
  long long total = count_reduced(g.d(), depth);
  if (total > 1'000'000) fail(Err::WordTooLong, "depth " + std::to_string(depth));
  int m = std::max(4, samples_per_circle);

  LimitSetCloud out;
  out.depth = depth;
  out.entries.reserve(std::size_t(total));
  out.cloud.space = Space::FlagSpace;
  out.cloud.flags.reserve(std::size_t(total) * 2 * m);
  out.sample_entry.reserve(std::size_t(total) * 2 * m);
  out.sample_tag.reserve(std::size_t(total) * 2 * m);
  out.sample_param.reserve(std::size_t(total) * 2 * m);

  double conv_tol = std::max(0.05, g.tube_radius / 4);
  Word cur;
  auto rec = [&](auto&& self, const GroupElement& prefix, const Flag& parent_est,
                 int len) -> void {
    for (int slot = 0; slot < 2 * g.d(); ++slot) {
      int l = letter_at(slot);
      if (!cur.letters.empty() && cur.letters.back() == -l) continue;
      GroupElement next = prefix * (l > 0 ? g.gens[std::abs(l) - 1]
                                          : g.gens[std::abs(l) - 1].inverse());
      // at depth 1 compare against the generator's exact fixed flag
      Flag base = (len == 0) ? g.bouquet(std::abs(l) - 1, l > 0 ? +1 : -1).center : parent_est;
      Flag est = cartan_attracting_flag(next);
      cur.letters.push_back(l);
      if (len + 1 == depth) {
        LimitEntry e;
        e.word = cur;
        e.p_plus = est.point;
        e.d_plus = est.line;
        e.bouquet = Bouquet{est};
        e.prefix_gap = dist(est, base);
        e.converged = e.prefix_gap <= conv_tol;
        int idx = int(out.entries.size());
        std::vector<Flag> ca = sample_circle_alpha(est.point, m);
        std::vector<Flag> cb = sample_circle_beta(est.line, m);
        for (int k = 0; k < m; ++k) {
          out.cloud.flags.push_back(ca[k]);
          out.sample_entry.push_back(idx);
          out.sample_tag.push_back('a');
          out.sample_param.push_back(M_PI * k / m);
        }
        for (int k = 0; k < m; ++k) {
          out.cloud.flags.push_back(cb[k]);
          out.sample_entry.push_back(idx);
          out.sample_tag.push_back('b');
          out.sample_param.push_back(M_PI * k / m);
        }
        out.entries.push_back(std::move(e));
      } else {
        self(self, next, est, len + 1);
      }
      cur.letters.pop_back();
    }
  };
  GroupElement id;
  Flag dummy;
  rec(rec, id, dummy, 0);
  return out;
}

int LimitSetCloud::component_count_at(double delta) const {
  int n = int(entries.size());
  if (n == 0) return 0;
  std::size_t per = cloud.flags.size() / std::size_t(n);
  std::vector<int> root(n);
  for (int i = 0; i < n; ++i) root[i] = i;
  auto find = [&](int i) {
    while (root[i] != i) { root[i] = root[root[i]]; i = root[i]; }
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int ri = find(i), rj = find(j);
      if (ri == rj) continue;
      // min over i's samples of the exact distance to j's bouquet
      for (std::size_t s = per * i; s < per * (i + 1); ++s) {
        if (dist_to_bouquet(cloud.flags[s], entries[j].bouquet) <= delta) {
          if (ri < rj) root[rj] = ri; else root[ri] = rj;
          break;
        }
      }
    }
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (find(i) == i) ++count;
  return count;
}

std::string LimitSetCloud::to_csv() const {
  std::string s;
  for (std::size_t i = 0; i < cloud.flags.size(); ++i) {
    const Flag& f = cloud.flags[i];
    s += entries[sample_entry[i]].word.str();
    const double vals[6] = {f.point.rep[0], f.point.rep[1], f.point.rep[2],
                            f.line.normal[0], f.line.normal[1], f.line.normal[2]};
    for (double x : vals) { s += ','; s += g17(x); }
    s += ',';
    s += (sample_tag[i] == 'a') ? "alpha" : "beta";
    s += ',';
    s += g17(sample_param[i]);
    s += '\n';
  }
  return s;
}

ReduceOutcome reduce_to_fundamental_domain(const SchottkyGroup& g, const Flag& x, int max_steps) {
  if (!g.certificate) fail(Err::BadConfig, "group not certified");
  ReduceOutcome out;
  out.flag = x;
  for (int step = 0; step < max_steps; ++step) {
    int best = -1, best_sign = 0;
    double best_pen = 0;
    for (int i = 0; i < g.d(); ++i)
      for (int sign : {+1, -1}) {
        double pen = g.tube_radius - dist_to_bouquet(out.flag, g.bouquet(i, sign));
        if (pen > best_pen) { best_pen = pen; best = i; best_sign = sign; }
      }
    if (best < 0) {
      out.steps = step;
      return out;
    }
    // inside H_i^+ the first letter is g_i^{+r} only if undoing it lands
    // outside H_i^-: the metric tubes overshoot the true first-letter
    // cylinders, so a peel that bounces into the opposite tube means the
    // point is already as reduced as the tubes can certify
    GroupElement h = best_sign > 0 ? g.gens[best].inverse() : g.gens[best];
    Flag peeled = act(h, out.flag);
    if (dist_to_bouquet(peeled, g.bouquet(best, -best_sign)) < g.tube_radius) {
      out.steps = step;
      return out;
    }
    out.flag = peeled;
    out.word.letters.insert(out.word.letters.begin(), best_sign > 0 ? -(best + 1) : best + 1);
  }
  fail(Err::NearLimitSet, "no exit after " + std::to_string(max_steps) + " steps");
}

OmegaResult omega_membership(const SchottkyGroup& g, const Flag& x, int max_steps) {
  try {
    ReduceOutcome r = reduce_to_fundamental_domain(g, x, max_steps);
    return OmegaResult{true, r.word, r.steps};
  } catch (const Error& e) {
    if (e.code() != Err::NearLimitSet) throw;
    return OmegaResult{false, Word{}, max_steps};
  }
}

}  // namespace flagdyn

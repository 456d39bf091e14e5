#pragma once

#include <optional>
#include <string>
#include <variant>

#include "flagdyn/limit_objects.hpp"

namespace flagdyn {

// word in the free group on d generators; letter +i means g_i, -i means
// g_i^{-1} (i is 1-based)
struct Word {
  std::vector<int> letters;
  std::string str() const;  // "1+2-1+"
  int length() const { return int(letters.size()); }
  bool is_reduced() const;
  Word inverse() const;
};

Word parse_word(const std::string& s);  // InvalidWord
Word reduce(Word w);
// all reduced words of length n, lexicographic in (index, sign with + first)
std::vector<Word> enumerate_reduced(int d, int n);
long long count_reduced(int d, int n);  // 2d(2d-1)^{n-1}
GroupElement evaluate(const std::vector<GroupElement>& gens, const Word& w);

// either a 2x2 (embedded via j after hyperbolicity checks) or a 3x3 matrix
struct GeneratorInput {
  bool is_sl2 = false;
  Mat2 sl2 = Mat2::Identity();
  Mat3 pgl3 = Mat3::Identity();
  static GeneratorInput from_sl2(const Mat2& h);
  static GeneratorInput from_pgl3(const Mat3& m);
};

struct ValidatedGenerators {
  std::vector<GroupElement> gens;    // PGL(3) representatives
  std::vector<LoxObjects> objects;   // fixed flags and eigenvalues
  bool all_sl2 = false;
  int d() const { return int(gens.size()); }
};

// NotHyperbolic / NegativeEigenvalues / NotGeneralPosition (message names the
// offending pair); general-position tolerance 1e-8
ValidatedGenerators validate_generators(const std::vector<GeneratorInput>& in);

struct PingPongCertificate {
  double margin = 0;          // min slack over all sampled checks
  double sample_density = 0;  // net scale used
  std::vector<int> exponents;
  long long checked_pairs = 0;
};

struct FailureReport {
  std::string what;  // which check failed
  Flag sample;       // worst offending sample
  double slack = 0;  // <= 0
};

using CertifyResult = std::variant<PingPongCertificate, FailureReport>;

// Sampled ping-pong certification with tube handlebodies H_i^± = {dist to
// bouquet B_i^± <= tube_radius}: (a) the 2d bouquets pairwise separated by
// more than 2*tube_radius; (b) g_i^{r_i} maps every sample outside Int(H_i^-)
// into H_i^+ with positive slack; (c) same for g_i^{-r_i} with +/- swapped.
CertifyResult certify_pingpong(const ValidatedGenerators& v, const std::vector<int>& exponents,
                               double tube_radius, double density);

struct SchottkyGroup {
  std::vector<GroupElement> gens_base;  // validated g_i
  std::vector<int> exponents;           // r_i
  std::vector<GroupElement> gens;       // g_i^{r_i}, the actual generators
  std::vector<Bouquet> bouquet_minus, bouquet_plus;
  double tube_radius = 0;
  // shell clouds near each handlebody boundary; index 2i = H_i^-, 2i+1 = H_i^+
  std::vector<std::vector<Flag>> boundary_samples;
  std::optional<PingPongCertificate> certificate;
  bool all_sl2 = false;
  int d() const { return int(gens.size()); }
  const Bouquet& bouquet(int i, int sign) const {
    return sign > 0 ? bouquet_plus[i] : bouquet_minus[i];
  }
};

// assembles the group and attaches the certificate when certification passes
SchottkyGroup build_group(const ValidatedGenerators& v, const std::vector<int>& exponents,
                          double tube_radius, double density);

struct SearchResult {
  std::vector<int> exponents;
  double tube_radius = 0;
  PingPongCertificate certificate;
};

// smallest uniform r <= r_max, radius grid scanned descending per r; first
// passing pair wins.  NoCertificateFound if the sweep is exhausted.
SearchResult search_exponents(const ValidatedGenerators& v, int r_max,
                              const std::vector<double>& radius_grid, double density);

// the grid used when the caller does not supply one
std::vector<double> default_radius_grid();

struct LimitEntry {
  Word word;
  ProjPoint p_plus;  // attractive point estimate (dominant singular direction)
  ProjLine d_plus;
  Bouquet bouquet;
  double prefix_gap = 0;  // flag distance to the parent prefix estimate
  bool converged = true;
};

struct LimitSetCloud {
  int depth = 0;
  std::vector<LimitEntry> entries;  // one per reduced word, lexicographic
  SampledCompact cloud;             // all bouquets sampled, in X
  std::vector<int> sample_entry;    // per cloud flag: owning entry
  std::vector<char> sample_tag;     // 'a' | 'b'
  std::vector<double> sample_param; // circle parameter in [0, pi)

  // single-linkage component count at scale delta, entries linked through the
  // exact bouquet distance
  int component_count_at(double delta) const;
  std::string to_csv() const;  // word, 6 flag coords, tag, parameter
};

LimitSetCloud limit_set(const SchottkyGroup& g, int depth, int samples_per_circle = 32);

struct ReduceOutcome {
  Word word;  // evaluate(gens, word) maps the input to the returned flag
  Flag flag;
  int steps = 0;
};

// greedy descent out of the tubes (deepest-penetration first); a peel whose
// undo would land in the opposite tube is rejected, so the outcome is a fixed
// point of reduction for every flag off the limit set; NearLimitSet after
// max_steps of accepted peels
ReduceOutcome reduce_to_fundamental_domain(const SchottkyGroup& g, const Flag& x, int max_steps);

struct OmegaResult {
  bool in_omega = false;  // reduction terminated
  Word word;
  int steps = 0;
};

OmegaResult omega_membership(const SchottkyGroup& g, const Flag& x, int max_steps);

}  // namespace flagdyn

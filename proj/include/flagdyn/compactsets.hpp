#pragma once

#include <string>
#include <vector>

#include "flagdyn/projgeo.hpp"
#include "flagdyn/rng.hpp"

namespace flagdyn {

enum class Space { RP2, RP2Dual, FlagSpace, OrientedFlagSpace };

const char* space_name(Space s);

// finite sample of a compact subset of one of the four ambient spaces
struct SampledCompact {
  Space space = Space::RP2;
  std::vector<ProjPoint> points;
  std::vector<ProjLine> lines;
  std::vector<Flag> flags;
  std::vector<OrientedFlag> oflags;

  static SampledCompact of_points(std::vector<ProjPoint> v);
  static SampledCompact of_lines(std::vector<ProjLine> v);
  static SampledCompact of_flags(std::vector<Flag> v);
  static SampledCompact of_oriented(std::vector<OrientedFlag> v);

  std::size_t size() const;
  void append(const SampledCompact& other);  // same space
};

// distance between sample i of a and sample j of b (same space)
double sample_dist(const SampledCompact& a, std::size_t i, const SampledCompact& b,
                   std::size_t j);

// exact symmetric Hausdorff distance between the two samples
double hausdorff(const SampledCompact& a, const SampledCompact& b);

// directed: sup over a of dist to b
double directed_hausdorff(const SampledCompact& a, const SampledCompact& b);

// true iff every target sample lies within eps of a
bool covers(const SampledCompact& a, const SampledCompact& targets, double eps);

// single-linkage connected components at scale delta; labels[i] = index of the
// lexicographically smallest member of i's component
struct Components {
  std::vector<std::size_t> labels;
  std::size_t count = 0;
};
Components components(const SampledCompact& a, double delta);

std::string to_csv(const SampledCompact& a);

// quasi-uniform nets (deterministic)
std::vector<ProjPoint> net_rp2(double scale);
std::vector<ProjLine> net_rp2_dual(double scale);
std::vector<Flag> net_flags(double scale);
std::vector<OrientedFlag> net_oriented(double scale);

// random draws for tests and sampling-based checks
ProjPoint random_point(Rng& rng);
ProjLine random_line(Rng& rng);
Flag random_flag(Rng& rng);
OrientedFlag random_oriented(Rng& rng);
GroupElement random_group(Rng& rng);    // well-conditioned random class
GroupElement random_rotation(Rng& rng); // uniform-ish SO(3)

}  // namespace flagdyn

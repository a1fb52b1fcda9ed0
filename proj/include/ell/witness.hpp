#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ell/structures.hpp"

namespace ell {

// The locality-gap experiment: A is a depth-n model, B is as many disjoint
// copies of the depth-(n-1) model as fit, padded with isolated elements to
// |A|. B shares A's local statistics below the top level but sits far from
// the zig-zag property, certified through the spectral expansion of U(A).
struct WitnessReport {
  int32_t D = 0;
  int depth = 0;
  uint64_t seed = 0;
  int trials = 0;

  int64_t n = 0;            // |A| = |B|
  int64_t copies = 0;       // of the depth-(n-1) model inside B
  int64_t padding = 0;      // isolated elements in B
  int64_t d = 0;            // 2D^2 + D^4 + 1
  double epsilon = 0.0;     // 1/(144 D^2)

  double lambda_u = 0.0;        // lambda(U(A))
  double cheeger_h = 0.0;       // (D^2+D^4+1) * (1 - lambda_u) / 2
  int64_t witness_set_size = 0; // |S|, balanced union of B components
  int64_t measured_cut = 0;     // |<S, S~>| in U(A)
  double certified_lower_bound = 0.0;  // (n/4) * cheeger_h
  double threshold = 0.0;              // epsilon * d * n

  // per-radius sampling distances; entries beyond ball caps are flagged
  std::vector<double> delta_per_radius;
  std::vector<bool> delta_computed;
  int64_t support_a_r1 = 0;  // distinct radius-1 types in A and B
  int64_t support_b_r1 = 0;
  double delta1 = 0.0;             // sampling distance at radius 1
  double farness_normalized = 0.0; // certified bound / (d n)

  bool farness_certified = false;  // certified bound >= threshold
  bool locality_gap = false;       // delta1 < farness_normalized
  bool exhibited = false;          // both
};

WitnessReport run_witness(int32_t D, int depth, uint64_t seed, int trials = 64,
                          int r_max = 3, int64_t tuple_cap = 1000000);

std::string witness_to_json(const WitnessReport& rep);

}  // namespace ell

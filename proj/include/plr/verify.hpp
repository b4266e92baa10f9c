#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plr/denoise.hpp"

namespace plr::verify {

// Tally of one randomized self-check suite.
struct SuiteResult {
  std::string name;
  int passed = 0;
  int failed = 0;
  int skipped = 0;  // excluded draws (threshold too close to a singular value)

  bool ok() const { return failed == 0; }
};

// Largest relative mismatch, over all components k, between the coefficient
// variance (1/m)·Σ_l ⟨s_l, g_k⟩² computed from the group columns and
// eigenvalue_k/m reported by the eigendecomposition of the scatter matrix.
double variance_identity_error(const denoise::SimilarityGroup& group);

// Hard-thresholded SVD against brute-force rank enumeration on random
// matrices (four penalty levels per matrix).
SuiteResult eckart_young_suite(int trials, std::uint64_t seed);

// PCA-basis shrinkage against SVD shrinkage on random similarity groups.
SuiteResult path_equivalence_suite(int trials, std::uint64_t seed);

// Coefficient-variance identity on random similarity groups.
SuiteResult variance_identity_suite(int trials, std::uint64_t seed);

// The three suites sized for a single --trials budget: `trials` rank-penalty
// matrices plus `trials / 2` groups for each group-level suite.
std::vector<SuiteResult> run_all(int trials, std::uint64_t seed);

}  // namespace plr::verify

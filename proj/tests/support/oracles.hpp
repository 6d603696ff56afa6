#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "defectscope/features.hpp"
#include "defectscope/forest.hpp"
#include "defectscope/image.hpp"
#include "defectscope/ingest.hpp"

namespace dscope::testing {

// Independent reference implementations used to freeze expected values.
// They deliberately avoid the production code paths they check.

struct OracleComponent {
  int class_id = 0;
  std::vector<Point> pixels;  // sorted by (y, x)
};

// Queue-based flood fill over 8-connected same-class regions.
std::vector<OracleComponent> oracle_components(const MaskImage& mask);

// Naive pixel-loop recomputation of all 18 characteristics (gift-wrapping
// hull, brute-force contrast ring, its own HSV conversion).
DCVector oracle_dc(const RgbImage& image, const DefectInstance& defect);

struct OracleSplit {
  int dc_index = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exhaustive enumeration of every (feature, midpoint) candidate with the
// same tie rules as the production split search.
std::optional<OracleSplit> oracle_best_split(const DCMatrix& matrix,
                                             const std::vector<std::uint32_t>& samples,
                                             const std::vector<int>& candidate_dcs,
                                             const std::vector<std::uint8_t>& target,
                                             double weight0, double weight1);

// Mean-decrease-impurity totals per characteristic, read straight off the
// trained trees.
std::vector<double> oracle_mdi(const Forest& forest);

}  // namespace dscope::testing

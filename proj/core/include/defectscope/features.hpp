#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "defectscope/image.hpp"
#include "defectscope/ingest.hpp"

namespace dscope {

inline constexpr std::size_t kFeatureCount = 18;

// Fixed characteristic order; matrix columns, CSV columns, and chart file
// names all follow it.
const std::array<std::string, kFeatureCount>& feature_names();

enum FeatureIndex : std::size_t {
  kAreaRatio = 0,
  kPerimeterRatio,
  kCompactness,
  kSolidity,
  kExtent,
  kAspectRatio,
  kEccentricity,
  kVertexCountNorm,
  kCentroidX,
  kCentroidY,
  kBorderDistance,
  kHueMean,
  kHueStd,
  kSatMean,
  kSatStd,
  kValMean,
  kValStd,
  kContrast,
};

using DCVector = std::array<double, kFeatureCount>;

struct DCMatrix {
  std::vector<std::string> feature_list;  // always feature_names()
  std::vector<std::string> id_list;
  std::vector<std::string> image_stems;   // aligned with id_list
  std::vector<DCVector> rows;

  std::size_t size() const { return rows.size(); }
};

struct FeatureRange {
  std::array<std::pair<double, double>, kFeatureCount> min_max;
};

// Dilation radius for the contrast ring, from the image diagonal.
int contrast_ring_radius(int width, int height);

// Douglas-Peucker tolerance used for vertex_count_norm.
double simplify_epsilon(int width, int height);

// All 18 characteristics for one defect. Every value lands in [0, 1].
DCVector extract_dc(const RgbImage& image, const DefectInstance& defect);

// Per-image batched extraction for the whole dataset; rows align with
// result.defects order regardless of thread count.
std::vector<DCVector> extract_all_features(const IngestResult& ingest, int threads = 0);

// Ordered target vectors: {"detected","undetected"} in detection mode plus
// {"correctly_classified","misclassified"} otherwise.
using TargetVectors = std::vector<std::pair<std::string, std::vector<std::uint8_t>>>;

struct AssembledData {
  DCMatrix matrix;
  TargetVectors targets;
};

// Joins defects, characteristic vectors, and targets into array form.
// Values are canonicalized to 9 significant digits (the CSV precision), so
// a matrix round-tripped through dc_matrix.csv is bit-identical.
AssembledData assemble_matrix(const std::vector<DefectInstance>& defects,
                              const std::vector<DCVector>& vectors,
                              const ReasoningTargets& targets);

FeatureRange compute_feature_range(const DCMatrix& matrix);

void write_dc_matrix_csv(const std::filesystem::path& path, const DCMatrix& matrix);
DCMatrix read_dc_matrix_csv(const std::filesystem::path& path);

// 9-significant-digit canonical form shared by the matrix and its CSV.
double quantize_dc(double value);

}  // namespace dscope

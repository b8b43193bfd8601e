#pragma once

#include "wxbs/pipeline.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace wxbs {

struct GroundTruthPair {
    std::string id;
    std::string imagePath1;
    std::string imagePath2;
    std::string category;
    ModelKind modelKind = ModelKind::Fund;
    std::vector<PointPair> gtCorrespondences;          // Fund-type pairs
    std::optional<Eigen::Matrix3d> gtHomography;       // Hom-type pairs
};

struct RecallCurve {
    std::vector<double> thresholds;  // ascending, px
    std::vector<double> recall;      // in [0,1], nondecreasing
};

// 0.25 px steps from 0 to 20 px.
std::vector<double> defaultThresholdGrid();

// Fraction of annotated correspondences with residual strictly below each
// threshold.
RecallCurve pairRecall(const GroundTruthPair& gt, const TwoViewModel& model,
                       const std::vector<double>& thresholds);

// Arithmetic mean of per-pair recalls over a category.
RecallCurve categoryRecall(const std::vector<RecallCurve>& curves);

// Maps image-1 LAFs to image 2 through the ground-truth homography using the
// local affine approximation; pairs whose mapped center leaves the image-2
// bounds (20 px margin) are discarded.
std::vector<std::pair<Laf, Laf>> descEvalPrepare(const GroundTruthPair& gt,
                                                 const std::vector<Laf>& detections,
                                                 int img2Width, int img2Height);

struct PrCurve {
    std::vector<double> ratios;
    std::vector<double> precision;
    std::vector<double> recall;
    double meanAveragePrecision = 0.0;
};

// Second-NN ratio sweep over precomputed descriptors; query i is correct iff
// its nearest neighbor is entry i of the second list.
PrCurve descPrecisionRecallFromDescriptors(const std::vector<Descriptor>& desc1,
                                           const std::vector<Descriptor>& desc2,
                                           const std::vector<double>& ratioGrid);

PrCurve descPrecisionRecall(const std::vector<std::pair<Laf, Laf>>& pairs,
                            const GrayImage& img1, const GrayImage& img2, DescriptorKind kind,
                            const std::vector<double>& ratioGrid,
                            bool photometricNormalization = true);

Descriptor describeLaf(const GrayImage& img, const Laf& laf, DescriptorKind kind,
                       bool photometricNormalization = true);

// Indices whose nearest neighbor is the aligned entry and whose second-NN
// ratio is at most maxRatio. Feeds the complementarity ranking.
std::set<int> correctMatchSet(const std::vector<Descriptor>& desc1,
                              const std::vector<Descriptor>& desc2, double maxRatio = 0.8);

struct DescriptorPairing {
    std::string first;
    std::string second;
    size_t unionSize = 0;
};

// Ranks descriptor pairs by the union of correctly matched GT pairs.
std::vector<DescriptorPairing> complementarityPairs(
    const std::map<std::string, std::set<int>>& resultsPerDescriptor);

// Manifest: JSON array of pair entries with image paths, category, model
// kind, and either a GT correspondence CSV (x1,y1,x2,y2 lines) or a GT
// homography file. Relative paths resolve against the manifest directory.
std::vector<GroundTruthPair> loadManifest(const std::string& path);

void writeRecallCsv(std::ostream& out, const RecallCurve& curve);
void writePrCsv(std::ostream& out, const PrCurve& curve);

}  // namespace wxbs

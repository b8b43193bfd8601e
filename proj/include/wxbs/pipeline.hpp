#pragma once

#include "wxbs/ransac.hpp"

#include <optional>
#include <string>

namespace wxbs {

struct MatcherConfig {
    SynthSchedule schedule = defaultSchedule();
    int thetaM = 15;  // minimum required matches
    int sMax = 3;     // maximum iterations
    DetectorConfig detector;
    MatchingConfig matching;
    RansacConfig ransac;
    WantModel wantModel = WantModel::Auto;
    bool photometricNormalization = true;
    bool useRootSift = true;
    bool useHalfRootSift = true;
    // Per-view keypoint budget, scaled by the view's area relative to the
    // original image. Keeps the accumulated matching cost bounded.
    int maxFeaturesPerView = 400;
    double lafFilterFactor = 3.0;  // LAF consistency threshold, x RANSAC threshold
    int threads = 0;               // 0 = available parallelism
};

MatcherConfig matcherConfigFromJson(const std::string& jsonText);
std::string matcherConfigToJson(const MatcherConfig& cfg);

struct IterationStats {
    int viewCount = 0;       // views synthesized this iteration (both images)
    int featureCount1 = 0;   // accumulated features, image 1
    int featureCount2 = 0;
    int tcCount = 0;         // tentative correspondences after dedup
    int inlierCount = 0;     // post LAF filter
    double elapsedSeconds = 0.0;
};

struct MatchReport {
    std::optional<TwoViewModel> model;
    std::vector<Correspondence> finalCorrespondences;
    std::vector<IterationStats> perIteration;
    bool succeeded = false;
};

// JSON report; timing is kept out of the serialization so identical runs
// produce identical bytes.
std::string matchReportToJson(const MatchReport& report);

// Samples a patch for every LAF from the view image, photometrically
// normalizes it and emits a RootSIFT and a HalfRootSIFT record per LAF,
// with the LAF stored in original image coordinates. The HalfRootSIFT patch
// is sampled at the orientation folded into [0, pi) so that the descriptor
// stays invariant to gradient reversal. Degenerate patches are skipped.
std::vector<FeatureRecord> describeFeatures(const SynthView& view, const std::vector<Laf>& lafs,
                                            int origWidth, int origHeight, int viewId,
                                            DetectorKind detector, const MatcherConfig& cfg,
                                            int* degenerateCount = nullptr);

// The iterative matcher loop: synthesize views, detect with adaptive
// thresholds, describe, match per channel with FGINN, filter duplicates,
// verify with DEGENSAC-RANSAC and LAF-filter the inliers, accumulating
// features until thetaM matches are found or iterations run out.
MatchReport matchPair(const GrayImage& img1, const GrayImage& img2, const MatcherConfig& cfg);

}  // namespace wxbs

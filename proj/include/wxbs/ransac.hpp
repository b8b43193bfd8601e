#pragma once

#include "wxbs/matching.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wxbs {

struct RansacConfig {
    double inlierThreshold = 2.0;  // px
    double confidence = 0.99;
    int maxSamples = 10000;
    int loIterations = 3;
    uint64_t seed = 42;
    bool degeneracyCheck = true;  // DEGENSAC dominant-plane handling
};

enum class WantModel { Fund, Hom, Auto };

struct VerificationResult {
    TwoViewModel model;
    std::vector<Correspondence> inliers;
    bool degenerate = false;  // dominant plane detected, H returned instead of F
    int samplesUsed = 0;
};

struct PointPair {
    Point2 u;
    Point2 v;
};

// Normalized DLT from exactly 4 correspondences. Throws on collinear triples.
Homography estimateHomography4pt(const std::vector<PointPair>& pts);

// Least-squares DLT over >= 4 correspondences.
Homography estimateHomographyDlt(const std::vector<PointPair>& pts);

// Seven-point solver: 1-3 real solutions, rank-2 enforced.
std::vector<FundamentalMatrix> estimateFundamental7pt(const std::vector<PointPair>& pts);

// Eight-point least squares over >= 8 correspondences.
FundamentalMatrix estimateFundamental8pt(const std::vector<PointPair>& pts);

// DEGENSAC core test: a 7-point sample is H-degenerate when 5 of its points
// are consistent with a homography fitted from one of three canonical
// subsets. Returns the homography refit on all consistent sample points.
std::optional<Homography> checkSampleHDegeneracy(const std::vector<PointPair>& sample,
                                                 const FundamentalMatrix& f, double threshold);

// Seeded uniform RANSAC with local optimization and the DEGENSAC
// dominant-plane branch (plane-and-parallax F re-estimation, or an H model
// with degenerate=true when fewer than 2 off-plane inliers exist).
VerificationResult ransacVerify(const std::vector<Correspondence>& tcs, WantModel want,
                                const RansacConfig& cfg);

// Keeps a correspondence iff all three LAF point-triple pairs satisfy the
// epipolar constraint within `threshold`.
std::vector<Correspondence> lafConsistencyFilter(const std::vector<Correspondence>& inliers,
                                                 const FundamentalMatrix& f, double threshold);

// JSON result: model kind, matrix, inlier indices into the TC list,
// degeneracy flag, samplesUsed.
std::string verificationResultToJson(const VerificationResult& result,
                                     const std::vector<Correspondence>& tcs);

}  // namespace wxbs

#pragma once

#include "wxbs/image.hpp"
#include "wxbs/view_synthesis.hpp"

#include <iosfwd>
#include <vector>

namespace wxbs {

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double sigma = 1.0;
    double response = 0.0;
    DetectorKind detector = DetectorKind::DoG;
};

struct DetectorConfig {
    double initialThreshold = 0.01;
    int minFeatures = 1500;
    double thresholdFloor = 1e-5;
    double decayFactor = 0.5;
    int octaves = 0;  // 0 = until the min dimension drops below 32
    int scalesPerOctave = 3;
    double edgeRatio = 10.0;
    double initialSigma = 1.6;
};

// Scale-space extrema of |DoG| or of the scale-normalized Hessian determinant
// with sub-pixel refinement. If fewer than cfg.minFeatures survive, the
// threshold is multiplied by cfg.decayFactor and detection repeats until the
// quota is reached or the threshold hits cfg.thresholdFloor. Result is sorted
// by |response| descending.
std::vector<Keypoint> detect(const GrayImage& img, const DetectorConfig& cfg, DetectorKind kind);

struct OrientedKeypoint {
    Keypoint keypoint;
    double orientation = 0.0;  // radians in [0, 2*pi)
};

// 36-bin gradient-orientation histogram over a Gaussian window of
// sigma 1.5 * keypoint sigma; the dominant peak and all peaks >= 0.8x of it
// each yield one copy. Keypoints too close to the border yield an empty list.
std::vector<OrientedKeypoint> assignOrientations(const GrayImage& img, const Keypoint& k);

// Similarity frame: center (x, y), shape = sigma * R(orientation).
Laf keypointToLaf(const Keypoint& k, double orientation);

void writeKeypointsCsv(std::ostream& out, const std::vector<OrientedKeypoint>& keypoints);

}  // namespace wxbs

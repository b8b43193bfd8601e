#pragma once

#include "wxbs/image.hpp"

#include <string>
#include <vector>

namespace wxbs {

enum class DetectorKind { DoG, Hessian };

std::string detectorKindName(DetectorKind kind);
DetectorKind detectorKindFromName(const std::string& name);

struct SynthView {
    GrayImage image;
    Eigen::Matrix3d transform = Eigen::Matrix3d::Identity();  // original -> view
    double tilt = 1.0;
    double rotation = 0.0;
    double scale = 1.0;
};

struct ScheduleEntry {
    std::vector<DetectorKind> detectors{DetectorKind::DoG, DetectorKind::Hessian};
    std::vector<double> scales{1.0};
    std::vector<double> tilts{1.0};
    double rotationStep = 2.0 * 3.14159265358979323846 / 5.0;
};

struct SynthSchedule {
    std::vector<ScheduleEntry> iterations;
};

// Three-tier default: plain detection, then tilts up to 2, then tilts up to 4
// with an extra quarter-scale pass.
SynthSchedule defaultSchedule();

SynthSchedule scheduleFromJson(const std::string& jsonText);
std::string scheduleToJson(const SynthSchedule& schedule);

struct ViewParams {
    double scale = 1.0;
    double tilt = 1.0;
    double rotation = 0.0;
};

// The (scale, tilt, rotation) triples an entry expands to, in emission order:
// for tilt t the rotations are {0, step/t, 2*step/t, ...} < pi; tilt 1 only
// gets the upright view.
std::vector<ViewParams> viewParams(const ScheduleEntry& entry);

SynthView synthesizeView(const GrayImage& img, const ViewParams& params);

// One view per triple of viewParams(entry).
std::vector<SynthView> synthesizeViews(const GrayImage& img, const ScheduleEntry& entry);

// Number of views synthesizeViews emits for an entry.
int viewCount(const ScheduleEntry& entry);

// Maps LAFs detected in view coordinates back to the original image; LAFs
// whose center falls outside the original bounds are discarded.
std::vector<Laf> backproject(const SynthView& view, int origWidth, int origHeight,
                             const std::vector<Laf>& lafs);

}  // namespace wxbs

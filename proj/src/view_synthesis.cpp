#include "wxbs/view_synthesis.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wxbs {

namespace {

using nlohmann::json;

Eigen::Matrix3d composeViewTransform(const GrayImage& img, double scale, double tilt,
                                     double rotation, int* outW, int* outH) {
    Eigen::Matrix2d linear;
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    Eigen::Matrix2d rot;
    rot << c, -s, s, c;
    linear = Eigen::Vector2d(scale, scale / tilt).asDiagonal() * rot;

    // Shift so the transformed bounding box starts at the origin.
    double minX = 0.0, minY = 0.0, maxX = 0.0, maxY = 0.0;
    const double corners[4][2] = {{0.0, 0.0},
                                  {static_cast<double>(img.width - 1), 0.0},
                                  {0.0, static_cast<double>(img.height - 1)},
                                  {static_cast<double>(img.width - 1),
                                   static_cast<double>(img.height - 1)}};
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d q = linear * Eigen::Vector2d(corners[i][0], corners[i][1]);
        minX = std::min(minX, q.x());
        minY = std::min(minY, q.y());
        maxX = std::max(maxX, q.x());
        maxY = std::max(maxY, q.y());
    }

    Eigen::Matrix3d transform = Eigen::Matrix3d::Identity();
    transform.topLeftCorner<2, 2>() = linear;
    transform(0, 2) = -minX;
    transform(1, 2) = -minY;
    *outW = static_cast<int>(std::floor(maxX - minX)) + 1;
    *outH = static_cast<int>(std::floor(maxY - minY)) + 1;
    return transform;
}

void validateEntry(const ScheduleEntry& entry) {
    if (entry.detectors.empty() || entry.scales.empty() || entry.tilts.empty()) {
        throw std::invalid_argument("schedule entry must name detectors, scales and tilts");
    }
    if (entry.rotationStep <= 0.0) {
        throw std::invalid_argument("schedule rotation step must be positive");
    }
    for (double t : entry.tilts) {
        if (t < 1.0) throw std::invalid_argument("tilts must be >= 1");
    }
    for (double s : entry.scales) {
        if (s <= 0.0) throw std::invalid_argument("scales must be positive");
    }
}

}  // namespace

std::string detectorKindName(DetectorKind kind) {
    return kind == DetectorKind::DoG ? "DoG" : "Hessian";
}

DetectorKind detectorKindFromName(const std::string& name) {
    std::string lower(name);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "dog") return DetectorKind::DoG;
    if (lower == "hessian") return DetectorKind::Hessian;
    throw std::invalid_argument("unknown detector kind: " + name);
}

SynthSchedule defaultSchedule() {
    constexpr double kStep = 2.0 * std::numbers::pi / 5.0;
    const double sqrt2 = std::numbers::sqrt2;

    SynthSchedule schedule;
    ScheduleEntry plain;
    plain.scales = {1.0};
    plain.tilts = {1.0};
    schedule.iterations.push_back(plain);

    ScheduleEntry medium;
    medium.scales = {1.0};
    medium.tilts = {1.0, sqrt2, 2.0};
    medium.rotationStep = kStep;
    schedule.iterations.push_back(medium);

    ScheduleEntry full;
    full.scales = {1.0, 0.25};
    full.tilts = {1.0, sqrt2, 2.0, 2.0 * sqrt2, 4.0};
    full.rotationStep = kStep;
    schedule.iterations.push_back(full);

    return schedule;
}

SynthSchedule scheduleFromJson(const std::string& jsonText) {
    const json root = json::parse(jsonText);
    SynthSchedule schedule;
    for (const json& it : root.at("iterations")) {
        ScheduleEntry entry;
        if (it.contains("detectors")) {
            entry.detectors.clear();
            for (const json& d : it.at("detectors")) {
                entry.detectors.push_back(detectorKindFromName(d.get<std::string>()));
            }
        }
        if (it.contains("scales")) {
            entry.scales = it.at("scales").get<std::vector<double>>();
        }
        if (it.contains("tilts")) {
            entry.tilts = it.at("tilts").get<std::vector<double>>();
        }
        if (it.contains("rotation_step")) {
            entry.rotationStep = it.at("rotation_step").get<double>();
        }
        validateEntry(entry);
        schedule.iterations.push_back(entry);
    }
    if (schedule.iterations.empty()) {
        throw std::invalid_argument("schedule must contain at least one iteration");
    }
    return schedule;
}

std::string scheduleToJson(const SynthSchedule& schedule) {
    json iterations = json::array();
    for (const ScheduleEntry& entry : schedule.iterations) {
        json detectors = json::array();
        for (DetectorKind d : entry.detectors) detectors.push_back(detectorKindName(d));
        iterations.push_back({{"detectors", detectors},
                              {"scales", entry.scales},
                              {"tilts", entry.tilts},
                              {"rotation_step", entry.rotationStep}});
    }
    return json{{"iterations", iterations}}.dump(2);
}

std::vector<ViewParams> viewParams(const ScheduleEntry& entry) {
    validateEntry(entry);
    std::vector<ViewParams> params;
    for (double scale : entry.scales) {
        for (double tilt : entry.tilts) {
            if (tilt == 1.0) {
                params.push_back({scale, tilt, 0.0});
                continue;
            }
            const double delta = entry.rotationStep / tilt;
            const int n = static_cast<int>(std::ceil(std::numbers::pi / delta - 1e-12));
            for (int k = 0; k < n; ++k) {
                params.push_back({scale, tilt, k * delta});
            }
        }
    }
    return params;
}

SynthView synthesizeView(const GrayImage& img, const ViewParams& params) {
    SynthView view;
    view.scale = params.scale;
    view.tilt = params.tilt;
    view.rotation = params.rotation;
    int outW = 0, outH = 0;
    view.transform =
        composeViewTransform(img, params.scale, params.tilt, params.rotation, &outW, &outH);
    if (params.scale == 1.0 && params.tilt == 1.0 && params.rotation == 0.0) {
        view.image = img;  // identity tier, skip the resampling
    } else {
        view.image = warpAffine(img, view.transform, outW, outH);
    }
    return view;
}

std::vector<SynthView> synthesizeViews(const GrayImage& img, const ScheduleEntry& entry) {
    std::vector<SynthView> views;
    for (const ViewParams& params : viewParams(entry)) {
        views.push_back(synthesizeView(img, params));
    }
    return views;
}

int viewCount(const ScheduleEntry& entry) {
    int count = 0;
    for (size_t i = 0; i < entry.scales.size(); ++i) {
        for (double tilt : entry.tilts) {
            if (tilt == 1.0) {
                ++count;
            } else {
                count += static_cast<int>(
                    std::ceil(std::numbers::pi * tilt / entry.rotationStep - 1e-12));
            }
        }
    }
    return count;
}

std::vector<Laf> backproject(const SynthView& view, int origWidth, int origHeight,
                             const std::vector<Laf>& lafs) {
    const Eigen::Matrix3d inv = view.transform.inverse();
    std::vector<Laf> out;
    out.reserve(lafs.size());
    for (const Laf& laf : lafs) {
        Laf mapped = transformLaf(inv, laf);
        if (mapped.center.x() < 0.0 || mapped.center.y() < 0.0 ||
            mapped.center.x() > origWidth - 1 || mapped.center.y() > origHeight - 1) {
            continue;
        }
        out.push_back(mapped);
    }
    return out;
}

}  // namespace wxbs

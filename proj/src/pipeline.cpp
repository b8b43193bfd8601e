#include "wxbs/pipeline.hpp"

#include "wxbs/parallel.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

namespace wxbs {

namespace {

using nlohmann::json;

std::string wantModelName(WantModel w) {
    switch (w) {
        case WantModel::Fund: return "F";
        case WantModel::Hom: return "H";
        case WantModel::Auto: return "auto";
    }
    return "auto";
}

WantModel wantModelFromName(const std::string& name) {
    if (name == "F") return WantModel::Fund;
    if (name == "H") return WantModel::Hom;
    if (name == "auto") return WantModel::Auto;
    throw std::invalid_argument("unknown model kind: " + name);
}

double lafOrientation(const Laf& laf) {
    return std::atan2(laf.shape(1, 0), laf.shape(0, 0));
}

// Rotates the sampling frame by pi when the orientation is in [pi, 2*pi),
// canonicalizing it into [0, pi).
Laf foldOrientation(const Laf& laf) {
    double theta = lafOrientation(laf);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    if (theta < std::numbers::pi) {
        return laf;
    }
    Laf folded = laf;
    folded.shape = laf.shape * (-Eigen::Matrix2d::Identity());
    return folded;
}

// Padding outside the warped image footprint creates artificial edges; a
// detection closer than `margin` to the footprint boundary is an artifact.
bool insideFootprint(const Eigen::Matrix3d& transform, int w, int h, double x, double y,
                     double margin) {
    const Eigen::Vector3d corners[4] = {
        transform * Eigen::Vector3d(0, 0, 1), transform * Eigen::Vector3d(w - 1, 0, 1),
        transform * Eigen::Vector3d(w - 1, h - 1, 1), transform * Eigen::Vector3d(0, h - 1, 1)};
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d a = corners[i].head<2>();
        const Eigen::Vector2d d = corners[(i + 1) % 4].head<2>() - a;
        const double len = d.norm();
        if (len < 1e-9) return false;
        if (std::abs(d.x() * (y - a.y()) - d.y() * (x - a.x())) / len < margin) return false;
    }
    return true;
}

struct ViewKey {
    int64_t scale, tilt, rotation;
    auto operator<=>(const ViewKey&) const = default;
};

ViewKey makeViewKey(const ViewParams& p) {
    const auto q = [](double v) { return static_cast<int64_t>(std::llround(v * 1e9)); };
    return {q(p.scale), q(p.tilt), q(p.rotation)};
}

struct PerImageState {
    std::vector<FeatureRecord> features;
    std::set<ViewKey> seenViews;
    int nextViewId = 0;
};

void processIteration(const GrayImage& img, const ScheduleEntry& entry,
                      const MatcherConfig& cfg, PerImageState* state, int* viewsSynthesized) {
    std::vector<ViewParams> fresh;
    for (const ViewParams& params : viewParams(entry)) {
        if (state->seenViews.insert(makeViewKey(params)).second) {
            fresh.push_back(params);
        }
    }
    *viewsSynthesized += static_cast<int>(fresh.size());

    const int firstViewId = state->nextViewId;
    state->nextViewId += static_cast<int>(fresh.size());

    const double origArea = static_cast<double>(img.width) * img.height;
    std::vector<std::vector<FeatureRecord>> slots(fresh.size());

    parallelFor(static_cast<int>(fresh.size()), cfg.threads, [&](int vi) {
        const SynthView view = synthesizeView(img, fresh[vi]);
        if (view.image.width < 32 || view.image.height < 32) {
            return;
        }
        const double areaRatio =
            static_cast<double>(view.image.width) * view.image.height / origArea;
        const int cap = std::max(100, static_cast<int>(std::lround(cfg.maxFeaturesPerView *
                                                                   std::min(areaRatio, 1.0))));
        for (DetectorKind detector : entry.detectors) {
            std::vector<Keypoint> keypoints = detect(view.image, cfg.detector, detector);
            std::erase_if(keypoints, [&](const Keypoint& kp) {
                return !insideFootprint(view.transform, img.width, img.height, kp.x, kp.y,
                                        3.0 * kp.sigma);
            });
            if (static_cast<int>(keypoints.size()) > cap) {
                keypoints.resize(cap);
            }
            std::vector<Laf> lafs;
            for (const Keypoint& kp : keypoints) {
                for (const OrientedKeypoint& ok : assignOrientations(view.image, kp)) {
                    lafs.push_back(keypointToLaf(ok.keypoint, ok.orientation));
                }
            }
            auto records = describeFeatures(view, lafs, img.width, img.height,
                                            firstViewId + vi, detector, cfg);
            slots[vi].insert(slots[vi].end(), records.begin(), records.end());
        }
    });

    for (auto& slot : slots) {
        state->features.insert(state->features.end(), slot.begin(), slot.end());
    }
}

json modelToJson(const TwoViewModel& model) {
    json matrix = json::array();
    for (int r = 0; r < 3; ++r) {
        matrix.push_back({model.matrix(r, 0), model.matrix(r, 1), model.matrix(r, 2)});
    }
    return {{"kind", model.kind == ModelKind::Fund ? "F" : "H"}, {"matrix", matrix}};
}

}  // namespace

MatcherConfig matcherConfigFromJson(const std::string& jsonText) {
    const json root = json::parse(jsonText);
    MatcherConfig cfg;
    if (root.contains("schedule")) {
        cfg.schedule = scheduleFromJson(root.at("schedule").dump());
    }
    cfg.thetaM = root.value("theta_m", cfg.thetaM);
    cfg.sMax = root.value("s_max", cfg.sMax);
    if (root.contains("detector")) {
        const json& d = root.at("detector");
        cfg.detector.initialThreshold = d.value("initial_threshold", cfg.detector.initialThreshold);
        cfg.detector.minFeatures = d.value("min_features", cfg.detector.minFeatures);
        cfg.detector.thresholdFloor = d.value("threshold_floor", cfg.detector.thresholdFloor);
        cfg.detector.decayFactor = d.value("decay_factor", cfg.detector.decayFactor);
        cfg.detector.octaves = d.value("octaves", cfg.detector.octaves);
        cfg.detector.scalesPerOctave = d.value("scales_per_octave", cfg.detector.scalesPerOctave);
        cfg.detector.edgeRatio = d.value("edge_ratio", cfg.detector.edgeRatio);
        cfg.detector.initialSigma = d.value("initial_sigma", cfg.detector.initialSigma);
    }
    if (root.contains("matching")) {
        const json& m = root.at("matching");
        cfg.matching.fginnRadius = m.value("fginn_radius", cfg.matching.fginnRadius);
        cfg.matching.maxRatio = m.value("max_ratio", cfg.matching.maxRatio);
        cfg.matching.neighborCap = m.value("neighbor_cap", cfg.matching.neighborCap);
        cfg.matching.duplicateRadius = m.value("duplicate_radius", cfg.matching.duplicateRadius);
    }
    if (root.contains("ransac")) {
        const json& r = root.at("ransac");
        cfg.ransac.inlierThreshold = r.value("inlier_threshold", cfg.ransac.inlierThreshold);
        cfg.ransac.confidence = r.value("confidence", cfg.ransac.confidence);
        cfg.ransac.maxSamples = r.value("max_samples", cfg.ransac.maxSamples);
        cfg.ransac.loIterations = r.value("lo_iterations", cfg.ransac.loIterations);
        cfg.ransac.seed = r.value("seed", cfg.ransac.seed);
        cfg.ransac.degeneracyCheck = r.value("degeneracy_check", cfg.ransac.degeneracyCheck);
    }
    if (root.contains("model")) {
        cfg.wantModel = wantModelFromName(root.at("model").get<std::string>());
    }
    cfg.photometricNormalization =
        root.value("photometric_normalization", cfg.photometricNormalization);
    cfg.useRootSift = root.value("use_root_sift", cfg.useRootSift);
    cfg.useHalfRootSift = root.value("use_half_root_sift", cfg.useHalfRootSift);
    cfg.maxFeaturesPerView = root.value("max_features_per_view", cfg.maxFeaturesPerView);
    cfg.lafFilterFactor = root.value("laf_filter_factor", cfg.lafFilterFactor);
    cfg.threads = root.value("threads", cfg.threads);

    if (cfg.thetaM < 4 || cfg.sMax < 1) {
        throw std::invalid_argument("theta_m must be >= 4 and s_max >= 1");
    }
    return cfg;
}

std::string matcherConfigToJson(const MatcherConfig& cfg) {
    json root;
    root["schedule"] = json::parse(scheduleToJson(cfg.schedule));
    root["theta_m"] = cfg.thetaM;
    root["s_max"] = cfg.sMax;
    root["detector"] = {{"initial_threshold", cfg.detector.initialThreshold},
                        {"min_features", cfg.detector.minFeatures},
                        {"threshold_floor", cfg.detector.thresholdFloor},
                        {"decay_factor", cfg.detector.decayFactor},
                        {"octaves", cfg.detector.octaves},
                        {"scales_per_octave", cfg.detector.scalesPerOctave},
                        {"edge_ratio", cfg.detector.edgeRatio},
                        {"initial_sigma", cfg.detector.initialSigma}};
    root["matching"] = {{"fginn_radius", cfg.matching.fginnRadius},
                        {"max_ratio", cfg.matching.maxRatio},
                        {"neighbor_cap", cfg.matching.neighborCap},
                        {"duplicate_radius", cfg.matching.duplicateRadius}};
    root["ransac"] = {{"inlier_threshold", cfg.ransac.inlierThreshold},
                      {"confidence", cfg.ransac.confidence},
                      {"max_samples", cfg.ransac.maxSamples},
                      {"lo_iterations", cfg.ransac.loIterations},
                      {"seed", cfg.ransac.seed},
                      {"degeneracy_check", cfg.ransac.degeneracyCheck}};
    root["model"] = wantModelName(cfg.wantModel);
    root["photometric_normalization"] = cfg.photometricNormalization;
    root["use_root_sift"] = cfg.useRootSift;
    root["use_half_root_sift"] = cfg.useHalfRootSift;
    root["max_features_per_view"] = cfg.maxFeaturesPerView;
    root["laf_filter_factor"] = cfg.lafFilterFactor;
    root["threads"] = cfg.threads;
    return root.dump(2);
}

std::string matchReportToJson(const MatchReport& report) {
    json root;
    root["succeeded"] = report.succeeded;
    root["model"] = report.model ? modelToJson(*report.model) : json(nullptr);
    json iterations = json::array();
    for (const IterationStats& s : report.perIteration) {
        iterations.push_back({{"views", s.viewCount},
                              {"features1", s.featureCount1},
                              {"features2", s.featureCount2},
                              {"tentative", s.tcCount},
                              {"inliers", s.inlierCount}});
    }
    root["iterations"] = iterations;
    json correspondences = json::array();
    for (const Correspondence& c : report.finalCorrespondences) {
        correspondences.push_back({c.a.laf.center.x(), c.a.laf.center.y(), c.b.laf.center.x(),
                                   c.b.laf.center.y(), c.distance, c.ratio});
    }
    root["correspondences"] = correspondences;
    return root.dump(2);
}

std::vector<FeatureRecord> describeFeatures(const SynthView& view, const std::vector<Laf>& lafs,
                                            int origWidth, int origHeight, int viewId,
                                            DetectorKind detector, const MatcherConfig& cfg,
                                            int* degenerateCount) {
    const Eigen::Matrix3d inv = view.transform.inverse();
    std::vector<FeatureRecord> out;
    int degenerate = 0;

    for (const Laf& laf : lafs) {
        const Laf original = transformLaf(inv, laf);
        if (original.center.x() < 0.0 || original.center.y() < 0.0 ||
            original.center.x() > origWidth - 1 || original.center.y() > origHeight - 1) {
            continue;
        }

        bool anyDegenerate = false;
        if (cfg.useRootSift) {
            Patch patch = samplePatch(view.image, laf);
            if (cfg.photometricNormalization) patch = photometricNormalize(patch);
            Descriptor d = rootSift(patch);
            if (d.degenerate()) {
                anyDegenerate = true;
            } else {
                out.push_back({original, std::move(d), detector, viewId});
            }
        }
        if (cfg.useHalfRootSift) {
            Patch patch = samplePatch(view.image, foldOrientation(laf));
            if (cfg.photometricNormalization) patch = photometricNormalize(patch);
            Descriptor d = halfRootSift(patch);
            if (d.degenerate()) {
                anyDegenerate = true;
            } else {
                out.push_back({original, std::move(d), detector, viewId});
            }
        }
        if (anyDegenerate) ++degenerate;
    }
    if (degenerateCount) *degenerateCount = degenerate;
    return out;
}

MatchReport matchPair(const GrayImage& img1, const GrayImage& img2, const MatcherConfig& cfg) {
    if (img1.empty() || img2.empty()) {
        throw std::invalid_argument("matchPair: empty image");
    }

    MatchReport report;
    PerImageState state1, state2;
    std::optional<VerificationResult> bestEffort;

    const int iterations =
        std::min<int>(cfg.sMax, static_cast<int>(cfg.schedule.iterations.size()));
    for (int iter = 0; iter < iterations; ++iter) {
        const auto tic = std::chrono::steady_clock::now();
        const ScheduleEntry& entry = cfg.schedule.iterations[iter];

        IterationStats stats;
        processIteration(img1, entry, cfg, &state1, &stats.viewCount);
        processIteration(img2, entry, cfg, &state2, &stats.viewCount);
        stats.featureCount1 = static_cast<int>(state1.features.size());
        stats.featureCount2 = static_cast<int>(state2.features.size());

        const std::vector<Correspondence> tentative =
            generateTentative(state1.features, state2.features, cfg.matching);
        const std::vector<Correspondence> deduped =
            filterDuplicates(tentative, cfg.matching.duplicateRadius);
        stats.tcCount = static_cast<int>(deduped.size());

        std::vector<Correspondence> verified;
        std::optional<VerificationResult> result;
        try {
            result = ransacVerify(deduped, cfg.wantModel, cfg.ransac);
            if (result->model.kind == ModelKind::Fund) {
                verified = lafConsistencyFilter(
                    result->inliers, FundamentalMatrix(result->model.matrix),
                    cfg.lafFilterFactor * cfg.ransac.inlierThreshold);
            } else {
                verified = result->inliers;
            }
        } catch (const std::runtime_error&) {
            // not enough TCs or no consistent model yet: next iteration
        }
        stats.inlierCount = static_cast<int>(verified.size());
        stats.elapsedSeconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
        report.perIteration.push_back(stats);

        if (result &&
            (!bestEffort || result->inliers.size() > bestEffort->inliers.size())) {
            bestEffort = result;
        }
        if (static_cast<int>(verified.size()) >= cfg.thetaM) {
            report.succeeded = true;
            report.model = result->model;
            report.finalCorrespondences = std::move(verified);
            return report;
        }
    }

    if (bestEffort) {
        report.model = bestEffort->model;
        report.finalCorrespondences = bestEffort->inliers;
    }
    return report;
}

}  // namespace wxbs

#include "wxbs/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wxbs {

namespace {

double safeModelResidual(const TwoViewModel& model, const Point2& u, const Point2& v) {
    try {
        return modelResidual(model, u, v);
    } catch (const std::domain_error&) {
        return std::numeric_limits<double>::infinity();
    }
}

std::vector<PointPair> readCorrespondenceCsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open GT correspondence file: " + path);
    }
    std::vector<PointPair> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        PointPair p;
        if (row >> p.u.x() >> p.u.y() >> p.v.x() >> p.v.y()) {
            out.push_back(p);
        }
    }
    return out;
}

struct MatchInfo {
    int best = -1;
    double ratio = 1.0;
};

std::vector<MatchInfo> nnMatches(const std::vector<Descriptor>& desc1,
                                 const std::vector<Descriptor>& desc2) {
    const size_t n = desc1.size();
    std::vector<MatchInfo> matches(n);
    for (size_t i = 0; i < n; ++i) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        int best = -1;
        for (size_t j = 0; j < desc2.size(); ++j) {
            double dist = 0.0;
            for (size_t k = 0; k < desc1[i].values.size(); ++k) {
                const double diff = desc1[i].values[k] - desc2[j].values[k];
                dist += diff * diff;
            }
            dist = std::sqrt(dist);
            if (dist < d1) {
                d2 = d1;
                d1 = dist;
                best = static_cast<int>(j);
            } else if (dist < d2) {
                d2 = dist;
            }
        }
        matches[i].best = best;
        matches[i].ratio = d2 > 0.0 ? d1 / d2 : (d1 > 0.0 ? 1.0 : 0.0);
    }
    return matches;
}

}  // namespace

std::vector<double> defaultThresholdGrid() {
    std::vector<double> grid;
    for (int i = 0; i <= 80; ++i) {
        grid.push_back(i * 0.25);
    }
    return grid;
}

RecallCurve pairRecall(const GroundTruthPair& gt, const TwoViewModel& model,
                       const std::vector<double>& thresholds) {
    if (gt.gtCorrespondences.empty()) {
        throw std::invalid_argument("pairRecall: no ground-truth correspondences");
    }
    if (model.kind != gt.modelKind) {
        throw std::invalid_argument("pairRecall: model kind does not match the pair");
    }
    std::vector<double> residuals;
    residuals.reserve(gt.gtCorrespondences.size());
    for (const PointPair& c : gt.gtCorrespondences) {
        residuals.push_back(safeModelResidual(model, c.u, c.v));
    }

    RecallCurve curve;
    curve.thresholds = thresholds;
    curve.recall.reserve(thresholds.size());
    for (double theta : thresholds) {
        int confirmed = 0;
        for (double e : residuals) {
            if (e < theta) ++confirmed;  // strict, as the recall definition reads
        }
        curve.recall.push_back(static_cast<double>(confirmed) / residuals.size());
    }
    return curve;
}

RecallCurve categoryRecall(const std::vector<RecallCurve>& curves) {
    if (curves.empty()) {
        throw std::invalid_argument("categoryRecall: needs at least one curve");
    }
    for (const RecallCurve& c : curves) {
        if (c.thresholds != curves[0].thresholds) {
            throw std::invalid_argument("categoryRecall: mismatched threshold grids");
        }
    }
    RecallCurve out;
    out.thresholds = curves[0].thresholds;
    out.recall.assign(out.thresholds.size(), 0.0);
    for (const RecallCurve& c : curves) {
        for (size_t i = 0; i < out.recall.size(); ++i) {
            out.recall[i] += c.recall[i];
        }
    }
    for (double& r : out.recall) {
        r /= static_cast<double>(curves.size());
    }
    return out;
}

std::vector<std::pair<Laf, Laf>> descEvalPrepare(const GroundTruthPair& gt,
                                                 const std::vector<Laf>& detections,
                                                 int img2Width, int img2Height) {
    if (gt.modelKind != ModelKind::Hom || !gt.gtHomography) {
        throw std::invalid_argument("descEvalPrepare: pair must provide a GT homography");
    }
    const Eigen::Matrix3d& h = *gt.gtHomography;
    constexpr double kMargin = 20.0;

    std::vector<std::pair<Laf, Laf>> out;
    for (const Laf& laf : detections) {
        const Eigen::Vector3d q = h * Eigen::Vector3d(laf.center.x(), laf.center.y(), 1.0);
        if (std::abs(q(2)) < 1e-12) continue;
        const Point2 mapped(q(0) / q(2), q(1) / q(2));
        if (mapped.x() < kMargin || mapped.y() < kMargin ||
            mapped.x() > img2Width - 1 - kMargin || mapped.y() > img2Height - 1 - kMargin) {
            continue;
        }

        // Jacobian of the projective map at the LAF center (exact for affine H).
        const double w = q(2);
        Eigen::Matrix2d jac;
        jac(0, 0) = (h(0, 0) * w - h(2, 0) * q(0)) / (w * w);
        jac(0, 1) = (h(0, 1) * w - h(2, 1) * q(0)) / (w * w);
        jac(1, 0) = (h(1, 0) * w - h(2, 0) * q(1)) / (w * w);
        jac(1, 1) = (h(1, 1) * w - h(2, 1) * q(1)) / (w * w);

        Laf mappedLaf;
        mappedLaf.center = mapped;
        mappedLaf.shape = jac * laf.shape;
        out.push_back({laf, mappedLaf});
    }
    return out;
}

Descriptor describeLaf(const GrayImage& img, const Laf& laf, DescriptorKind kind,
                       bool photometricNormalization) {
    Patch patch = samplePatch(img, laf);
    if (photometricNormalization) patch = photometricNormalize(patch);
    switch (kind) {
        case DescriptorKind::Sift: return sift(patch);
        case DescriptorKind::RootSift: return rootSift(patch);
        case DescriptorKind::HalfSift: return halfSift(patch);
        case DescriptorKind::HalfRootSift: return halfRootSift(patch);
        case DescriptorKind::InvSift: return invSiftReorder(sift(patch));
        case DescriptorKind::RawPixels: return rawPixels(patch);
    }
    throw std::invalid_argument("unknown descriptor kind");
}

PrCurve descPrecisionRecallFromDescriptors(const std::vector<Descriptor>& desc1,
                                           const std::vector<Descriptor>& desc2,
                                           const std::vector<double>& ratioGrid) {
    if (desc1.size() != desc2.size() || desc1.size() < 2) {
        throw std::invalid_argument("descPrecisionRecall: needs >= 2 aligned pairs");
    }
    const size_t n = desc1.size();
    const std::vector<MatchInfo> matches = nnMatches(desc1, desc2);

    PrCurve curve;
    for (double t : ratioGrid) {
        int accepted = 0;
        int correct = 0;
        for (size_t i = 0; i < n; ++i) {
            if (matches[i].ratio <= t) {
                ++accepted;
                if (matches[i].best == static_cast<int>(i)) ++correct;
            }
        }
        if (accepted == 0) continue;
        curve.ratios.push_back(t);
        curve.precision.push_back(static_cast<double>(correct) / accepted);
        curve.recall.push_back(static_cast<double>(correct) / n);
    }

    // Trapezoidal area over recall, extended to recall 0 at the leftmost
    // precision.
    std::vector<size_t> order(curve.recall.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return curve.recall[a] < curve.recall[b];
    });
    double area = 0.0;
    double prevRecall = 0.0;
    double prevPrecision = order.empty() ? 0.0 : curve.precision[order[0]];
    for (size_t i : order) {
        area += (curve.recall[i] - prevRecall) * 0.5 * (curve.precision[i] + prevPrecision);
        prevRecall = curve.recall[i];
        prevPrecision = curve.precision[i];
    }
    curve.meanAveragePrecision = area;
    return curve;
}

PrCurve descPrecisionRecall(const std::vector<std::pair<Laf, Laf>>& pairs,
                            const GrayImage& img1, const GrayImage& img2, DescriptorKind kind,
                            const std::vector<double>& ratioGrid,
                            bool photometricNormalization) {
    if (pairs.size() < 2) {
        throw std::invalid_argument("descPrecisionRecall: needs >= 2 pairs");
    }
    std::vector<Descriptor> desc1, desc2;
    desc1.reserve(pairs.size());
    desc2.reserve(pairs.size());
    for (const auto& [laf1, laf2] : pairs) {
        desc1.push_back(describeLaf(img1, laf1, kind, photometricNormalization));
        desc2.push_back(describeLaf(img2, laf2, kind, photometricNormalization));
    }
    return descPrecisionRecallFromDescriptors(desc1, desc2, ratioGrid);
}

std::set<int> correctMatchSet(const std::vector<Descriptor>& desc1,
                              const std::vector<Descriptor>& desc2, double maxRatio) {
    if (desc1.size() != desc2.size()) {
        throw std::invalid_argument("correctMatchSet: lists must be aligned");
    }
    const std::vector<MatchInfo> matches = nnMatches(desc1, desc2);
    std::set<int> correct;
    for (size_t i = 0; i < matches.size(); ++i) {
        if (matches[i].best == static_cast<int>(i) && matches[i].ratio <= maxRatio) {
            correct.insert(static_cast<int>(i));
        }
    }
    return correct;
}

std::vector<DescriptorPairing> complementarityPairs(
    const std::map<std::string, std::set<int>>& resultsPerDescriptor) {
    if (resultsPerDescriptor.size() < 2) {
        throw std::invalid_argument("complementarityPairs: needs >= 2 descriptor result sets");
    }
    std::vector<DescriptorPairing> pairs;
    for (auto a = resultsPerDescriptor.begin(); a != resultsPerDescriptor.end(); ++a) {
        for (auto b = std::next(a); b != resultsPerDescriptor.end(); ++b) {
            std::set<int> unionSet = a->second;
            unionSet.insert(b->second.begin(), b->second.end());
            pairs.push_back({a->first, b->first, unionSet.size()});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const DescriptorPairing& a,
                                             const DescriptorPairing& b) {
        if (a.unionSize != b.unionSize) return a.unionSize > b.unionSize;
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    return pairs;
}

std::vector<GroundTruthPair> loadManifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open manifest: " + path);
    }
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed manifest: " + std::string(e.what()));
    }
    if (!root.is_array()) {
        throw std::runtime_error("manifest must be a JSON array of pairs");
    }

    const std::filesystem::path baseDir = std::filesystem::path(path).parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (baseDir / fp).string();
    };

    std::vector<GroundTruthPair> pairs;
    for (const nlohmann::json& entry : root) {
        GroundTruthPair pair;
        pair.id = entry.at("id").get<std::string>();
        pair.imagePath1 = resolve(entry.at("image1").get<std::string>());
        pair.imagePath2 = resolve(entry.at("image2").get<std::string>());
        pair.category = entry.value("category", std::string("uncategorized"));
        const std::string kind = entry.at("model").get<std::string>();
        if (kind == "F") {
            pair.modelKind = ModelKind::Fund;
            pair.gtCorrespondences =
                readCorrespondenceCsv(resolve(entry.at("gt_correspondences").get<std::string>()));
            if (pair.gtCorrespondences.empty()) {
                throw std::runtime_error("manifest pair " + pair.id +
                                         " has no GT correspondences");
            }
        } else if (kind == "H") {
            pair.modelKind = ModelKind::Hom;
            pair.gtHomography =
                readMatrix3File(resolve(entry.at("gt_homography").get<std::string>()));
        } else {
            throw std::runtime_error("manifest pair " + pair.id + " has unknown model kind");
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

void writeRecallCsv(std::ostream& out, const RecallCurve& curve) {
    out << "threshold,recall\n";
    for (size_t i = 0; i < curve.thresholds.size(); ++i) {
        out << curve.thresholds[i] << ',' << curve.recall[i] << '\n';
    }
}

void writePrCsv(std::ostream& out, const PrCurve& curve) {
    out << "ratio,precision,recall\n";
    for (size_t i = 0; i < curve.ratios.size(); ++i) {
        out << curve.ratios[i] << ',' << curve.precision[i] << ',' << curve.recall[i] << '\n';
    }
}

}  // namespace wxbs

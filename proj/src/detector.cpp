#include "wxbs/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace wxbs {

namespace {

// Response stack for one octave: one image per layer plus the layer->sigma
// mapping shared by the extremum search.
struct ResponseStack {
    std::vector<GrayImage> layers;
    int octave = 0;
};

std::vector<ResponseStack> dogStacks(const GaussianPyramid& pyr) {
    std::vector<ResponseStack> stacks;
    for (size_t o = 0; o < pyr.octaves.size(); ++o) {
        const auto& octave = pyr.octaves[o];
        ResponseStack stack;
        stack.octave = static_cast<int>(o);
        for (size_t i = 0; i + 1 < octave.size(); ++i) {
            const GrayImage& a = octave[i].image;
            const GrayImage& b = octave[i + 1].image;
            GrayImage diff(a.width, a.height);
            for (size_t p = 0; p < diff.pixels.size(); ++p) {
                diff.pixels[p] = b.pixels[p] - a.pixels[p];
            }
            stack.layers.push_back(std::move(diff));
        }
        stacks.push_back(std::move(stack));
    }
    return stacks;
}

std::vector<ResponseStack> hessianStacks(const GaussianPyramid& pyr, double initialSigma,
                                         int scalesPerOctave) {
    const double k = std::pow(2.0, 1.0 / scalesPerOctave);
    std::vector<ResponseStack> stacks;
    for (size_t o = 0; o < pyr.octaves.size(); ++o) {
        const auto& octave = pyr.octaves[o];
        ResponseStack stack;
        stack.octave = static_cast<int>(o);
        for (size_t i = 0; i < octave.size(); ++i) {
            const GrayImage& l = octave[i].image;
            const double sigma = initialSigma * std::pow(k, static_cast<double>(i));
            const double norm = sigma * sigma * sigma * sigma;
            GrayImage det(l.width, l.height);
            for (int y = 1; y < l.height - 1; ++y) {
                for (int x = 1; x < l.width - 1; ++x) {
                    const double lxx = l.at(x + 1, y) - 2.0 * l.at(x, y) + l.at(x - 1, y);
                    const double lyy = l.at(x, y + 1) - 2.0 * l.at(x, y) + l.at(x, y - 1);
                    const double lxy = 0.25 * (l.at(x + 1, y + 1) - l.at(x + 1, y - 1) -
                                               l.at(x - 1, y + 1) + l.at(x - 1, y - 1));
                    det.at(x, y) = static_cast<float>(norm * (lxx * lyy - lxy * lxy));
                }
            }
            stack.layers.push_back(std::move(det));
        }
        stacks.push_back(std::move(stack));
    }
    return stacks;
}

bool isExtremum(const ResponseStack& stack, int layer, int x, int y) {
    const float v = stack.layers[layer].at(x, y);
    bool isMax = true;
    bool isMin = true;
    for (int dl = -1; dl <= 1; ++dl) {
        const GrayImage& img = stack.layers[layer + dl];
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dl == 0 && dx == 0 && dy == 0) continue;
                const float n = img.at(x + dx, y + dy);
                if (n >= v) isMax = false;
                if (n <= v) isMin = false;
                if (!isMax && !isMin) return false;
            }
        }
    }
    return isMax || isMin;
}

struct Refined {
    double ox = 0.0, oy = 0.0, os = 0.0;
    double value = 0.0;
    bool ok = false;
};

Refined refineExtremum(const ResponseStack& stack, int layer, int x, int y) {
    Refined r;
    for (int attempt = 0; attempt < 5; ++attempt) {
        const GrayImage& c = stack.layers[layer];
        const GrayImage& lo = stack.layers[layer - 1];
        const GrayImage& hi = stack.layers[layer + 1];

        const double gx = 0.5 * (c.at(x + 1, y) - c.at(x - 1, y));
        const double gy = 0.5 * (c.at(x, y + 1) - c.at(x, y - 1));
        const double gs = 0.5 * (hi.at(x, y) - lo.at(x, y));

        const double dxx = c.at(x + 1, y) - 2.0 * c.at(x, y) + c.at(x - 1, y);
        const double dyy = c.at(x, y + 1) - 2.0 * c.at(x, y) + c.at(x, y - 1);
        const double dss = hi.at(x, y) - 2.0 * c.at(x, y) + lo.at(x, y);
        const double dxy = 0.25 * (c.at(x + 1, y + 1) - c.at(x + 1, y - 1) -
                                   c.at(x - 1, y + 1) + c.at(x - 1, y - 1));
        const double dxs = 0.25 * (hi.at(x + 1, y) - hi.at(x - 1, y) -
                                   lo.at(x + 1, y) + lo.at(x - 1, y));
        const double dys = 0.25 * (hi.at(x, y + 1) - hi.at(x, y - 1) -
                                   lo.at(x, y + 1) + lo.at(x, y - 1));

        Eigen::Matrix3d hess;
        hess << dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss;
        const Eigen::Vector3d grad(gx, gy, gs);
        if (std::abs(hess.determinant()) < 1e-20) {
            return r;
        }
        const Eigen::Vector3d offset = -hess.inverse() * grad;

        if (std::abs(offset(0)) < 0.5 && std::abs(offset(1)) < 0.5 && std::abs(offset(2)) < 0.5) {
            r.ox = offset(0);
            r.oy = offset(1);
            r.os = offset(2);
            r.value = c.at(x, y) + 0.5 * grad.dot(offset);
            r.ok = true;
            return r;
        }

        x += offset(0) > 0.5 ? 1 : (offset(0) < -0.5 ? -1 : 0);
        y += offset(1) > 0.5 ? 1 : (offset(1) < -0.5 ? -1 : 0);
        layer += offset(2) > 0.5 ? 1 : (offset(2) < -0.5 ? -1 : 0);
        if (layer < 1 || layer > static_cast<int>(stack.layers.size()) - 2 ||
            x < 1 || x > c.width - 2 || y < 1 || y > c.height - 2) {
            return r;
        }
    }
    return r;
}

bool passesEdgeTest(const GrayImage& layer, int x, int y, double edgeRatio) {
    const double dxx = layer.at(x + 1, y) - 2.0 * layer.at(x, y) + layer.at(x - 1, y);
    const double dyy = layer.at(x, y + 1) - 2.0 * layer.at(x, y) + layer.at(x, y - 1);
    const double dxy = 0.25 * (layer.at(x + 1, y + 1) - layer.at(x + 1, y - 1) -
                               layer.at(x - 1, y + 1) + layer.at(x - 1, y - 1));
    const double tr = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    if (det <= 0.0) return false;
    return tr * tr / det < (edgeRatio + 1.0) * (edgeRatio + 1.0) / edgeRatio;
}

std::vector<Keypoint> findExtrema(const std::vector<ResponseStack>& stacks,
                                  const DetectorConfig& cfg, DetectorKind kind,
                                  double threshold) {
    std::vector<Keypoint> keypoints;
    const double k = std::pow(2.0, 1.0 / cfg.scalesPerOctave);
    for (const ResponseStack& stack : stacks) {
        const double octaveScale = std::pow(2.0, stack.octave);
        const int lastLayer = static_cast<int>(stack.layers.size()) - 2;
        for (int layer = 1; layer <= lastLayer; ++layer) {
            const GrayImage& img = stack.layers[layer];
            // Keep the Hessian border margin: its responses are zero there.
            const int margin = kind == DetectorKind::Hessian ? 2 : 1;
            for (int y = margin; y < img.height - margin; ++y) {
                for (int x = margin; x < img.width - margin; ++x) {
                    const float v = img.at(x, y);
                    if (std::abs(v) < 0.8 * threshold) continue;
                    if (!isExtremum(stack, layer, x, y)) continue;

                    const Refined r = refineExtremum(stack, layer, x, y);
                    if (!r.ok || std::abs(r.value) < threshold) continue;
                    if (kind == DetectorKind::DoG &&
                        !passesEdgeTest(img, x, y, cfg.edgeRatio)) {
                        continue;
                    }
                    if (kind == DetectorKind::Hessian && r.value < threshold) {
                        continue;  // blobs only, saddles have negative determinant
                    }

                    Keypoint kp;
                    kp.x = (x + r.ox) * octaveScale;
                    kp.y = (y + r.oy) * octaveScale;
                    kp.sigma = cfg.initialSigma * octaveScale * std::pow(k, layer + r.os);
                    kp.response = r.value;
                    kp.detector = kind;
                    keypoints.push_back(kp);
                }
            }
        }
    }
    return keypoints;
}

}  // namespace

std::vector<Keypoint> detect(const GrayImage& img, const DetectorConfig& cfg, DetectorKind kind) {
    if (img.width < 32 || img.height < 32) {
        throw std::invalid_argument("detect: image must be at least 32x32");
    }
    if (cfg.minFeatures < 1 || cfg.thresholdFloor > cfg.initialThreshold ||
        cfg.decayFactor <= 0.0 || cfg.decayFactor >= 1.0) {
        throw std::invalid_argument("detect: invalid detector config");
    }

    GaussianPyramid pyr = buildGaussianPyramid(img, cfg.scalesPerOctave, cfg.initialSigma, 32);
    if (cfg.octaves > 0 && static_cast<int>(pyr.octaves.size()) > cfg.octaves) {
        pyr.octaves.resize(cfg.octaves);
    }
    const std::vector<ResponseStack> stacks =
        kind == DetectorKind::DoG ? dogStacks(pyr)
                                  : hessianStacks(pyr, cfg.initialSigma, cfg.scalesPerOctave);

    std::vector<Keypoint> keypoints;
    double threshold = cfg.initialThreshold;
    for (;;) {
        keypoints = findExtrema(stacks, cfg, kind, threshold);
        if (static_cast<int>(keypoints.size()) >= cfg.minFeatures ||
            threshold <= cfg.thresholdFloor) {
            break;
        }
        threshold = std::max(threshold * cfg.decayFactor, cfg.thresholdFloor);
    }

    std::sort(keypoints.begin(), keypoints.end(), [](const Keypoint& a, const Keypoint& b) {
        if (std::abs(a.response) != std::abs(b.response)) {
            return std::abs(a.response) > std::abs(b.response);
        }
        return std::tie(a.y, a.x, a.sigma) < std::tie(b.y, b.x, b.sigma);
    });
    return keypoints;
}

std::vector<OrientedKeypoint> assignOrientations(const GrayImage& img, const Keypoint& k) {
    constexpr int kBins = 36;
    constexpr double kTwoPi = 2.0 * std::numbers::pi;

    const double sigmaW = 1.5 * k.sigma;
    const int radius = std::max(1, static_cast<int>(std::round(3.0 * k.sigma)));
    const int cx = static_cast<int>(std::round(k.x));
    const int cy = static_cast<int>(std::round(k.y));
    if (cx - radius < 1 || cy - radius < 1 || cx + radius > img.width - 2 ||
        cy + radius > img.height - 2) {
        return {};
    }

    std::array<double, kBins> hist{};
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const int x = cx + dx;
            const int y = cy + dy;
            const double gx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
            const double gy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
            const double mag = std::hypot(gx, gy);
            if (mag <= 0.0) continue;
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += kTwoPi;
            const double weight = std::exp(-0.5 * (dx * dx + dy * dy) / (sigmaW * sigmaW));
            // bin centers at b * (2*pi / kBins)
            int bin = static_cast<int>(std::lround(theta / kTwoPi * kBins)) % kBins;
            hist[bin] += mag * weight;
        }
    }

    // Two passes of circular box smoothing.
    for (int pass = 0; pass < 2; ++pass) {
        std::array<double, kBins> smoothed;
        for (int b = 0; b < kBins; ++b) {
            smoothed[b] = (hist[(b + kBins - 1) % kBins] + hist[b] + hist[(b + 1) % kBins]) / 3.0;
        }
        hist = smoothed;
    }

    double maxVal = 0.0;
    for (double v : hist) maxVal = std::max(maxVal, v);
    if (maxVal <= 0.0) {
        return {};
    }

    std::vector<OrientedKeypoint> out;
    for (int b = 0; b < kBins; ++b) {
        const double prev = hist[(b + kBins - 1) % kBins];
        const double next = hist[(b + 1) % kBins];
        if (hist[b] <= prev || hist[b] <= next || hist[b] < 0.8 * maxVal) continue;
        // Parabolic peak interpolation.
        const double denom = prev - 2.0 * hist[b] + next;
        const double shift = std::abs(denom) > 1e-12 ? 0.5 * (prev - next) / denom : 0.0;
        double theta = (b + shift) * kTwoPi / kBins;
        if (theta < 0.0) theta += kTwoPi;
        if (theta >= kTwoPi) theta -= kTwoPi;
        out.push_back({k, theta});
    }
    return out;
}

Laf keypointToLaf(const Keypoint& k, double orientation) {
    Laf laf;
    laf.center = Point2(k.x, k.y);
    const double c = std::cos(orientation);
    const double s = std::sin(orientation);
    laf.shape << c, -s, s, c;
    laf.shape *= k.sigma;
    return laf;
}

void writeKeypointsCsv(std::ostream& out, const std::vector<OrientedKeypoint>& keypoints) {
    out << "x,y,sigma,orientation,response,detector\n";
    for (const OrientedKeypoint& ok : keypoints) {
        out << ok.keypoint.x << ',' << ok.keypoint.y << ',' << ok.keypoint.sigma << ','
            << ok.orientation << ',' << ok.keypoint.response << ','
            << detectorKindName(ok.keypoint.detector) << '\n';
    }
}

}  // namespace wxbs

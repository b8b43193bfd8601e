// Shared fixtures for the test suite: deterministic textures, random patches
// and random two-view geometry.
#pragma once

#include "wxbs/image.hpp"
#include "wxbs/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testsupport {

using wxbs::GrayImage;
using wxbs::Patch;
using wxbs::Point2;
using wxbs::PointPair;

// Smooth blob-and-sinusoid texture; plenty of corners for detection.
inline GrayImage texture(int w, int h, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0, w), uy(0, h), us(5, 25), ua(-1, 1);
    struct Blob {
        double x, y, s, a;
    };
    std::vector<Blob> blobs;
    const int count = std::max(10, w * h / 600);
    for (int i = 0; i < count; ++i) blobs.push_back({ux(rng), uy(rng), us(rng), ua(rng)});
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = 0.5 + 0.15 * std::sin(0.09 * x + 2.1) * std::cos(0.07 * y);
            for (const Blob& b : blobs) {
                const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
                if (d2 < 9 * b.s * b.s) v += 0.35 * b.a * std::exp(-d2 / (2 * b.s * b.s));
            }
            img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    // multi-scale detail so detectors find blobs at every pyramid level
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    const double detailSigmas[] = {1.6, 3.2, 6.4};
    float amp = 0.30f;
    for (double sigma : detailSigmas) {
        GrayImage noise(w, h);
        for (float& v : noise.pixels) v = static_cast<float>(un(rng));
        noise = wxbs::gaussianBlur(noise, sigma);
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            img.pixels[i] = std::clamp(img.pixels[i] + amp * noise.pixels[i], 0.0f, 1.0f);
        }
        amp *= 0.85f;
    }
    return img;
}

// Uniform-noise patch in [lo, hi].
inline Patch randomPatch(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Patch p;
    for (float& v : p.values) v = static_cast<float>(u(rng));
    return p;
}

// Smooth low-contrast patch around 0.5 (keeps photometric normalization away
// from the clamp).
inline Patch smoothPatch(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-0.08, 0.08), freq(0.1, 0.5), phase(0, 6.28);
    struct Wave {
        double a, fx, fy, p;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 6; ++i) waves.push_back({amp(rng), freq(rng), freq(rng), phase(rng)});
    Patch p;
    for (int y = 0; y < Patch::kSide; ++y) {
        for (int x = 0; x < Patch::kSide; ++x) {
            double v = 0.5;
            for (const Wave& w : waves) v += w.a * std::sin(w.fx * x + w.fy * y + w.p);
            p.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return p;
}

inline Patch invertPatch(const Patch& p) {
    Patch out;
    for (size_t i = 0; i < p.values.size(); ++i) out.values[i] = 1.0f - p.values[i];
    return out;
}

// Random rank-2 fundamental matrix (unit Frobenius via the constructor).
inline wxbs::FundamentalMatrix randomFundamental(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Eigen::Matrix3d m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = u(rng);
        if (std::abs(m.determinant()) < 1e-6) continue;
        return wxbs::FundamentalMatrix(m);  // constructor enforces rank 2
    }
}

inline wxbs::Homography randomHomography(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.3, 0.3), t(-20.0, 20.0), persp(-1e-4, 1e-4);
    for (;;) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        m(0, 0) += u(rng);
        m(0, 1) += u(rng);
        m(1, 0) += u(rng);
        m(1, 1) += u(rng);
        m(0, 2) = t(rng);
        m(1, 2) = t(rng);
        m(2, 0) = persp(rng);
        m(2, 1) = persp(rng);
        if (std::abs(m.determinant()) < 1e-3) continue;
        return wxbs::Homography(m);
    }
}

// A simple two-camera rig: camera 1 at the origin, camera 2 rotated and
// translated, shared intrinsics. Projects random 3D points in front of both.
struct Rig {
    Eigen::Matrix3d k;
    Eigen::Matrix3d r;
    Eigen::Vector3d t;

    Eigen::Matrix3d fundamental() const {
        Eigen::Matrix3d tx;
        tx << 0, -t.z(), t.y(), t.z(), 0, -t.x(), -t.y(), t.x(), 0;
        return k.inverse().transpose() * tx * r * k.inverse();
    }

    PointPair project(const Eigen::Vector3d& x) const {
        const Eigen::Vector3d p1 = k * x;
        const Eigen::Vector3d p2 = k * (r * x + t);
        return {Point2(p1.x() / p1.z(), p1.y() / p1.z()),
                Point2(p2.x() / p2.z(), p2.y() / p2.z())};
    }
};

inline Rig makeRig(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(-0.25, 0.25), tr(-1.0, 1.0);
    Rig rig;
    rig.k << 500, 0, 320, 0, 500, 240, 0, 0, 1;
    rig.r = (Eigen::AngleAxisd(ang(rng), Eigen::Vector3d::UnitY()) *
             Eigen::AngleAxisd(ang(rng), Eigen::Vector3d::UnitX()))
                .toRotationMatrix();
    rig.t = Eigen::Vector3d(1.0 + 0.2 * tr(rng), 0.3 * tr(rng), 0.1 * tr(rng));
    return rig;
}

inline Eigen::Vector3d randomScenePoint(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), d(4.0, 10.0);
    return {u(rng), u(rng), d(rng)};
}

}  // namespace testsupport

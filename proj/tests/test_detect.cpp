#include "wxbs/detector.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace wxbs;
using testsupport::texture;

namespace {

GrayImage blobImage(int w, int h, double cx, double cy, double sigmaB, double amplitude) {
    GrayImage img(w, h, 0.4f);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            img.at(x, y) += static_cast<float>(amplitude * std::exp(-d2 / (2 * sigmaB * sigmaB)));
        }
    }
    return img;
}

}  // namespace

TEST_CASE("constant image yields no keypoints even at the threshold floor") {
    const GrayImage img(64, 64, 0.37f);
    DetectorConfig cfg;
    cfg.minFeatures = 100;
    cfg.thresholdFloor = 1e-12;
    CHECK(detect(img, cfg, DetectorKind::DoG).empty());
    CHECK(detect(img, cfg, DetectorKind::Hessian).empty());
}

TEST_CASE("single Gaussian blob is located at its center and scale") {
    const double sigmaB = 4.0;
    const GrayImage img = blobImage(96, 96, 48.0, 48.0, sigmaB, 0.5);
    DetectorConfig cfg;
    cfg.minFeatures = 1;
    const auto kps = detect(img, cfg, DetectorKind::DoG);
    REQUIRE(!kps.empty());
    const Keypoint& top = kps.front();
    CHECK(std::hypot(top.x - 48.0, top.y - 48.0) < 1.0);
    CHECK(top.sigma > 0.75 * sigmaB);
    CHECK(top.sigma < 1.25 * sigmaB);
    CHECK(top.detector == DetectorKind::DoG);

    const auto hess = detect(img, cfg, DetectorKind::Hessian);
    REQUIRE(!hess.empty());
    CHECK(std::hypot(hess.front().x - 48.0, hess.front().y - 48.0) < 1.5);
}

TEST_CASE("adaptive thresholding keeps working on low-contrast images") {
    const GrayImage img = texture(160, 120, 401);
    GrayImage dim(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) dim.pixels[i] = 0.1f * img.pixels[i];

    DetectorConfig adaptive;
    adaptive.minFeatures = 200;
    DetectorConfig fixed = adaptive;
    fixed.minFeatures = 1;  // no decay: stay at the initial threshold

    const size_t baseline = detect(img, adaptive, DetectorKind::DoG).size();
    REQUIRE(baseline > 50);
    CHECK(detect(dim, adaptive, DetectorKind::DoG).size() >= baseline / 2);
    CHECK(detect(dim, fixed, DetectorKind::DoG).size() < baseline / 10);
}

TEST_CASE("orientation assignment on intensity ramps") {
    GrayImage rampX(64, 64), rampY(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            rampX.at(x, y) = static_cast<float>(0.2 + 0.008 * x);
            rampY.at(x, y) = static_cast<float>(0.2 + 0.008 * y);
        }
    }
    Keypoint k;
    k.x = 32.0;
    k.y = 32.0;
    k.sigma = 3.0;

    const auto ox = assignOrientations(rampX, k);
    REQUIRE(ox.size() == 1);
    const double a = ox[0].orientation;
    CHECK(std::min(a, 2 * std::numbers::pi - a) < 0.05);

    const auto oy = assignOrientations(rampY, k);
    REQUIRE(oy.size() == 1);
    CHECK(std::abs(oy[0].orientation - std::numbers::pi / 2) < 0.05);
}

TEST_CASE("two equal orthogonal edges produce two orientations") {
    GrayImage img(64, 64, 0.3f);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            if (x > 32) img.at(x, y) += 0.2f;
            if (y > 32) img.at(x, y) += 0.2f;
        }
    }
    img = gaussianBlur(img, 1.2);
    Keypoint k;
    k.x = 32.0;
    k.y = 32.0;
    k.sigma = 5.0;
    const auto oriented = assignOrientations(img, k);
    REQUIRE(oriented.size() == 2);
    std::vector<double> angles = {oriented[0].orientation, oriented[1].orientation};
    std::sort(angles.begin(), angles.end());
    CHECK(std::min(angles[0], 2 * std::numbers::pi - angles[0]) < 0.15);
    CHECK(std::abs(angles[1] - std::numbers::pi / 2) < 0.15);
}

TEST_CASE("keypoints near the border are dropped by orientation assignment") {
    const GrayImage img = texture(64, 64, 402);
    Keypoint k;
    k.x = 2.0;
    k.y = 2.0;
    k.sigma = 4.0;
    CHECK(assignOrientations(img, k).empty());
}

TEST_CASE("similarity frame from keypoint") {
    Keypoint k;
    k.x = 3.0;
    k.y = 7.0;
    k.sigma = 1.0;
    Laf l = keypointToLaf(k, 0.0);
    CHECK((l.center - Point2(3, 7)).norm() == doctest::Approx(0.0));
    CHECK((l.shape - Eigen::Matrix2d::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-12));

    k.sigma = 2.0;
    l = keypointToLaf(k, std::numbers::pi / 2);
    Eigen::Matrix2d expected;
    expected << 0, -2, 2, 0;
    CHECK((l.shape - expected).norm() < 1e-12);

    std::mt19937_64 rng(403);
    std::uniform_real_distribution<double> us(0.5, 8.0), ua(0.0, 6.28);
    for (int i = 0; i < 100; ++i) {
        k.sigma = us(rng);
        l = keypointToLaf(k, ua(rng));
        CHECK(l.shape.determinant() == doctest::Approx(k.sigma * k.sigma).epsilon(1e-9));
    }
}

TEST_CASE("detection is shift-equivariant away from borders") {
    const GrayImage tile = texture(110, 80, 404);
    const int dx = 7, dy = 5;
    GrayImage a(170, 140, 0.5f), b(170, 140, 0.5f);
    for (int y = 0; y < tile.height; ++y) {
        for (int x = 0; x < tile.width; ++x) {
            a.at(x + 20, y + 20) = tile.at(x, y);
            b.at(x + 20 + dx, y + 20 + dy) = tile.at(x, y);
        }
    }
    DetectorConfig cfg;
    cfg.minFeatures = 1;  // fixed threshold keeps the two runs comparable
    cfg.initialThreshold = 0.004;
    const auto ka = detect(a, cfg, DetectorKind::DoG);
    const auto kb = detect(b, cfg, DetectorKind::DoG);
    REQUIRE(ka.size() > 10);

    int interior = 0, matched = 0;
    for (const Keypoint& p : ka) {
        if (p.x < 40 || p.y < 40 || p.x > 110 || p.y > 80) continue;
        ++interior;
        for (const Keypoint& q : kb) {
            if (std::hypot(q.x - p.x - dx, q.y - p.y - dy) <= 0.25) {
                ++matched;
                break;
            }
        }
    }
    REQUIRE(interior > 5);
    CHECK(matched == interior);
}

TEST_CASE("lowering the threshold never removes a keypoint") {
    const GrayImage img = texture(96, 96, 405);
    DetectorConfig high;
    high.minFeatures = 1;
    high.initialThreshold = 0.01;
    DetectorConfig low = high;
    low.initialThreshold = 0.0025;
    for (DetectorKind kind : {DetectorKind::DoG, DetectorKind::Hessian}) {
        const auto strict = detect(img, high, kind);
        const auto lax = detect(img, low, kind);
        REQUIRE(!strict.empty());
        CHECK(lax.size() >= strict.size());
        for (const Keypoint& p : strict) {
            bool found = false;
            for (const Keypoint& q : lax) {
                if (p.x == q.x && p.y == q.y && p.sigma == q.sigma) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("detection is deterministic") {
    const GrayImage img = texture(120, 90, 406);
    DetectorConfig cfg;
    cfg.minFeatures = 300;
    const auto a = detect(img, cfg, DetectorKind::DoG);
    const auto b = detect(img, cfg, DetectorKind::DoG);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].sigma == b[i].sigma);
        CHECK(a[i].response == b[i].response);
    }
}

TEST_CASE("images below the minimum size are rejected") {
    const GrayImage img(31, 40, 0.5f);
    DetectorConfig cfg;
    CHECK_THROWS(detect(img, cfg, DetectorKind::DoG));
}

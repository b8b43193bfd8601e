#include "wxbs/view_synthesis.hpp"

#include "wxbs/detector.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace wxbs;
using testsupport::texture;

TEST_CASE("identity tier emits one untouched view") {
    const GrayImage img = texture(60, 40, 301);
    ScheduleEntry entry;
    entry.scales = {1.0};
    entry.tilts = {1.0};
    const auto views = synthesizeViews(img, entry);
    REQUIRE(views.size() == 1);
    CHECK((views[0].transform - Eigen::Matrix3d::Identity()).norm() == doctest::Approx(0.0));
    REQUIRE(views[0].image.width == img.width);
    REQUIRE(views[0].image.height == img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) CHECK(views[0].image.pixels[i] == img.pixels[i]);
}

TEST_CASE("rotation enumeration density follows the tilt") {
    ScheduleEntry entry;
    entry.scales = {1.0};
    entry.tilts = {2.0};
    entry.rotationStep = std::numbers::pi / 5.0;
    const auto params = viewParams(entry);
    // rotations spaced step/t = pi/10 on [0, pi): 10 views
    REQUIRE(params.size() == 10);
    for (size_t k = 0; k < params.size(); ++k) {
        CHECK(params[k].rotation ==
              doctest::Approx(k * entry.rotationStep / 2.0).epsilon(1e-12));
        CHECK(params[k].rotation < std::numbers::pi);
    }
    CHECK(viewCount(entry) == 10);
    CHECK(static_cast<int>(synthesizeViews(texture(48, 48, 302), entry).size()) == 10);
}

TEST_CASE("view count formula matches enumeration for random entries") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> tiltU(1.0, 4.5), stepU(0.3, 2.0);
    std::uniform_int_distribution<int> nTilts(1, 4), nScales(1, 2);
    for (int trial = 0; trial < 50; ++trial) {
        ScheduleEntry entry;
        entry.scales.assign(nScales(rng), 1.0);
        entry.tilts.clear();
        const int k = nTilts(rng);
        for (int i = 0; i < k; ++i) entry.tilts.push_back(trial % 3 == 0 ? 1.0 : tiltU(rng));
        entry.rotationStep = stepU(rng);
        CHECK(static_cast<int>(viewParams(entry).size()) == viewCount(entry));
    }
}

TEST_CASE("stored transform maps original content onto the view") {
    const GrayImage img = texture(160, 120, 304);
    ScheduleEntry entry;
    entry.scales = {1.0, 0.5};
    entry.tilts = {1.0, 2.0};
    entry.rotationStep = 2.0 * std::numbers::pi / 5.0;
    for (const SynthView& view : synthesizeViews(img, entry)) {
        // correlate original samples against view samples at mapped locations
        double sumA = 0, sumB = 0, sumAA = 0, sumBB = 0, sumAB = 0;
        int n = 0;
        for (int gy = 10; gy < 110; gy += 4) {
            for (int gx = 10; gx < 150; gx += 4) {
                const Eigen::Vector3d q = view.transform * Eigen::Vector3d(gx, gy, 1.0);
                if (q.x() < 1 || q.y() < 1 || q.x() > view.image.width - 2 ||
                    q.y() > view.image.height - 2) {
                    continue;
                }
                const double a = img.at(gx, gy);
                const double b = view.image.sampleClamped(q.x(), q.y());
                sumA += a;
                sumB += b;
                sumAA += a * a;
                sumBB += b * b;
                sumAB += a * b;
                ++n;
            }
        }
        REQUIRE(n > 100);
        const double cov = sumAB / n - (sumA / n) * (sumB / n);
        const double varA = sumAA / n - (sumA / n) * (sumA / n);
        const double varB = sumBB / n - (sumB / n) * (sumB / n);
        CHECK(cov / std::sqrt(varA * varB) > 0.9);
    }
}

TEST_CASE("backproject identity and pure rotation") {
    const GrayImage img = texture(50, 50, 305);
    SynthView identity;
    identity.image = img;
    std::vector<Laf> lafs(1);
    lafs[0].center = Point2(10, 20);
    const auto back = backproject(identity, 50, 50, lafs);
    REQUIRE(back.size() == 1);
    CHECK((back[0].center - Point2(10, 20)).norm() == doctest::Approx(0.0));

    // 90-degree rotation: the view transform maps original (w-1, 0) corner to
    // view (0, 0) up to the bounding-box shift
    const SynthView rot = synthesizeView(img, {1.0, 1.0 + 1e-12, std::numbers::pi / 2});
    std::vector<Laf> corner(1);
    const Eigen::Vector3d viewCorner = rot.transform * Eigen::Vector3d(49, 0, 1);
    corner[0].center = viewCorner.head<2>();
    const auto b2 = backproject(rot, 50, 50, corner);
    REQUIRE(b2.size() == 1);
    CHECK((b2[0].center - Point2(49, 0)).norm() < 1e-9);
}

TEST_CASE("backproject discards out-of-bounds centers") {
    SynthView identity;
    std::vector<Laf> lafs(2);
    lafs[0].center = Point2(5, 5);
    lafs[1].center = Point2(80, 5);
    CHECK(backproject(identity, 50, 50, lafs).size() == 1);
}

TEST_CASE("backproject inverts the view transform") {
    const GrayImage img = texture(64, 64, 306);
    const SynthView view = synthesizeView(img, {1.0, 2.0, 0.7});
    std::mt19937_64 rng(307);
    std::uniform_real_distribution<double> u(5.0, 59.0);
    std::vector<Laf> original(40), inView(40);
    for (int i = 0; i < 40; ++i) {
        original[i].center = Point2(u(rng), u(rng));
        original[i].shape << 2, 0.3, -0.1, 1.5;
        inView[i] = transformLaf(view.transform, original[i]);
    }
    const auto back = backproject(view, 64, 64, inView);
    REQUIRE(back.size() == original.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK((back[i].center - original[i].center).norm() < 1e-9);
        CHECK((back[i].shape - original[i].shape).norm() < 1e-9);
    }
}

TEST_CASE("detections in a synthesized view backproject onto original detections") {
    // Distinct well-separated blobs give unambiguous detections on both sides.
    GrayImage img(240, 180, 0.5f);
    std::mt19937_64 rng(308);
    std::uniform_real_distribution<double> ux(15, 225), uy(15, 165), us(2.0, 5.0);
    std::vector<Eigen::Vector3d> blobs;  // (x, y, sigma)
    while (blobs.size() < 60) {
        const Eigen::Vector3d cand(ux(rng), uy(rng), us(rng));
        bool ok = true;
        for (const auto& b : blobs) {
            if (std::hypot(cand.x() - b.x(), cand.y() - b.y()) < 18.0) ok = false;
        }
        if (ok) blobs.push_back(cand);
    }
    int sign = 1;
    for (const auto& b : blobs) {
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                const double d2 = (x - b.x()) * (x - b.x()) + (y - b.y()) * (y - b.y());
                if (d2 < 25 * b.z() * b.z()) {
                    img.at(x, y) += static_cast<float>(
                        0.4 * sign * std::exp(-d2 / (2 * b.z() * b.z())));
                }
            }
        sign = -sign;
    }
    for (float& v : img.pixels) v = std::clamp(v, 0.0f, 1.0f);

    const SynthView view = synthesizeView(img, {1.0, std::numbers::sqrt2, 0.4});

    DetectorConfig cfg;
    cfg.minFeatures = 150;
    std::vector<Keypoint> kOrig = detect(img, cfg, DetectorKind::DoG);
    std::vector<Keypoint> kView = detect(view.image, cfg, DetectorKind::DoG);
    // compare the strongest view detections (the planted blobs dominate)
    if (kView.size() > blobs.size()) kView.resize(blobs.size());

    std::vector<Laf> viewLafs;
    for (const Keypoint& k : kView) {
        Laf l;
        l.center = Point2(k.x, k.y);
        l.shape = k.sigma * Eigen::Matrix2d::Identity();
        viewLafs.push_back(l);
    }
    const auto back = backproject(view, img.width, img.height, viewLafs);
    REQUIRE(back.size() > 20);

    int hits = 0;
    for (const Laf& l : back) {
        for (const Keypoint& k : kOrig) {
            if (std::hypot(l.center.x() - k.x, l.center.y() - k.y) <= 1.5) {
                ++hits;
                break;
            }
        }
    }
    CHECK(static_cast<double>(hits) / back.size() >= 0.7);
}

TEST_CASE("schedule JSON round trip") {
    const SynthSchedule schedule = defaultSchedule();
    const std::string json = scheduleToJson(schedule);
    const SynthSchedule back = scheduleFromJson(json);
    REQUIRE(back.iterations.size() == schedule.iterations.size());
    for (size_t i = 0; i < schedule.iterations.size(); ++i) {
        CHECK(back.iterations[i].scales == schedule.iterations[i].scales);
        CHECK(back.iterations[i].tilts == schedule.iterations[i].tilts);
        CHECK(back.iterations[i].rotationStep ==
              doctest::Approx(schedule.iterations[i].rotationStep));
    }
    CHECK(scheduleToJson(back) == json);
}

TEST_CASE("schedule validation") {
    CHECK_THROWS(scheduleFromJson("{\"iterations\": []}"));
    CHECK_THROWS(scheduleFromJson("{\"iterations\": [{\"tilts\": [0.5]}]}"));
    CHECK_THROWS(scheduleFromJson("{\"iterations\": [{\"rotation_step\": -1.0}]}"));
}

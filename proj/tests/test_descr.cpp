#include "wxbs/descriptor.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <sstream>

using namespace wxbs;
using testsupport::invertPatch;
using testsupport::randomPatch;
using testsupport::smoothPatch;
using testsupport::texture;

namespace {

Patch rampPatch(double slope, bool vertical = false) {
    Patch p;
    for (int y = 0; y < Patch::kSide; ++y) {
        for (int x = 0; x < Patch::kSide; ++x) {
            p.at(x, y) = static_cast<float>(0.1 + slope * (vertical ? y : x));
        }
    }
    return p;
}

double l2Distance(const Descriptor& a, const Descriptor& b) {
    REQUIRE(a.values.size() == b.values.size());
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double l2Norm(const Descriptor& d) {
    double s = 0.0;
    for (float v : d.values) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

// Root-normalization reference: L1-normalize, then elementwise sqrt.
std::vector<float> rootReference(const std::vector<double>& hist) {
    double sum = 0.0;
    for (double v : hist) sum += v;
    std::vector<float> out(hist.size(), 0.0f);
    if (sum <= 0.0) return out;
    for (size_t i = 0; i < hist.size(); ++i) {
        out[i] = static_cast<float>(std::sqrt(hist[i] / sum));
    }
    return out;
}

Patch rotate180(const Patch& p) {
    Patch out;
    for (size_t i = 0; i < p.values.size(); ++i) {
        out.values[p.values.size() - 1 - i] = p.values[i];
    }
    return out;
}

}  // namespace

TEST_CASE("constant patch yields the flagged all-zero descriptor") {
    Patch p;
    p.values.fill(0.6f);
    const Descriptor d = sift(p);
    REQUIRE(d.values.size() == 128);
    for (float v : d.values) CHECK(v == 0.0f);
    CHECK(d.degenerate());
}

TEST_CASE("horizontal ramp concentrates mass in the orientation-zero bins") {
    const Descriptor d = sift(rampPatch(0.015));
    double zeroMass = 0.0, total = 0.0;
    for (size_t i = 0; i < d.values.size(); ++i) {
        total += d.values[i];
        if (i % 8 == 0) zeroMass += d.values[i];
    }
    REQUIRE(total > 0.0);
    CHECK(zeroMass / total > 0.95);
    CHECK(!d.degenerate());
}

TEST_CASE("a textured patch and its half-turn rotation get distinct descriptors") {
    std::mt19937_64 rng(501);
    Patch p = smoothPatch(rng);
    // add a directional component so the half-turn actually moves mass
    const Patch ramp = rampPatch(0.01);
    for (size_t i = 0; i < p.values.size(); ++i) p.values[i] = 0.5f * (p.values[i] + ramp.values[i]);
    CHECK(l2Distance(sift(p), sift(rotate180(p))) > 0.5);
}

TEST_CASE("root normalization matches the independent reference") {
    // reference arithmetic check: histogram (9, 16, 0, ...) -> (0.6, 0.8, 0, ...)
    std::vector<double> toy(128, 0.0);
    toy[0] = 9.0;
    toy[1] = 16.0;
    const auto toyOut = rootReference(toy);
    CHECK(toyOut[0] == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(toyOut[1] == doctest::Approx(0.8).epsilon(1e-6));
    for (size_t i = 2; i < toyOut.size(); ++i) CHECK(toyOut[i] == 0.0f);

    std::mt19937_64 rng(502);
    for (int trial = 0; trial < 100; ++trial) {
        const Patch p = randomPatch(rng);
        const Descriptor d = rootSift(p);
        const auto expected = rootReference(siftHistogram(p, 8, 2.0 * std::numbers::pi));
        REQUIRE(d.values.size() == expected.size());
        for (size_t i = 0; i < expected.size(); ++i) {
            CHECK(std::abs(d.values[i] - expected[i]) < 1e-9);
        }
        CHECK(l2Norm(d) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("one-hot histogram stays one-hot under root normalization") {
    std::vector<double> hist(128, 0.0);
    hist[37] = 5.0;
    const auto out = rootReference(hist);
    CHECK(out[37] == 1.0f);
    for (size_t i = 0; i < out.size(); ++i) {
        if (i != 37) CHECK(out[i] == 0.0f);
    }
}

TEST_CASE("folded-orientation descriptors ignore intensity inversion") {
    std::mt19937_64 rng(503);
    for (int trial = 0; trial < 50; ++trial) {
        const Patch p = randomPatch(rng);
        const Patch q = invertPatch(p);
        CHECK(l2Distance(halfSift(p), halfSift(q)) < 1e-6);
        CHECK(l2Distance(halfRootSift(p), halfRootSift(q)) < 1e-6);
    }
    const Patch ramp = rampPatch(0.015);
    CHECK(l2Distance(halfSift(ramp), halfSift(invertPatch(ramp))) < 1e-6);
}

TEST_CASE("descriptor dimensions per kind") {
    std::mt19937_64 rng(504);
    const Patch p = randomPatch(rng);
    CHECK(sift(p).values.size() == 128);
    CHECK(rootSift(p).values.size() == 128);
    CHECK(halfSift(p).values.size() == 64);
    CHECK(halfRootSift(p).values.size() == 64);
    CHECK(rawPixels(p).values.size() == static_cast<size_t>(Patch::kArea));
    CHECK(descriptorDim(DescriptorKind::InvSift) == 128);
}

TEST_CASE("half-turn reordering is an involution and shifts bins by four") {
    std::mt19937_64 rng(505);
    const Descriptor d = sift(randomPatch(rng));
    const Descriptor twice = invSiftReorder(invSiftReorder(d));
    CHECK(twice.kind == d.kind);
    CHECK(l2Distance(twice, d) == 0.0);

    Descriptor oneHot;
    oneHot.kind = DescriptorKind::Sift;
    oneHot.values.assign(128, 0.0f);
    oneHot.values[1] = 1.0f;
    const Descriptor shifted = invSiftReorder(oneHot);
    CHECK(shifted.kind == DescriptorKind::InvSift);
    CHECK(shifted.values[5] == 1.0f);
    for (size_t i = 0; i < shifted.values.size(); ++i) {
        if (i != 5) CHECK(shifted.values[i] == 0.0f);
    }

    Descriptor wrong;
    wrong.kind = DescriptorKind::RawPixels;
    wrong.values.assign(128, 0.0f);
    CHECK_THROWS(invSiftReorder(wrong));
    Descriptor shortOne;
    shortOne.kind = DescriptorKind::Sift;
    shortOne.values.assign(64, 0.0f);
    CHECK_THROWS(invSiftReorder(shortOne));
}

TEST_CASE("half-turn reordering emulates describing the inverted patch") {
    std::mt19937_64 rng(506);
    int tested = 0;
    for (int trial = 0; trial < 50 || tested < 20; ++trial) {
        const Patch pn = photometricNormalize(smoothPatch(rng));
        const Patch qn = photometricNormalize(invertPatch(pn));
        float lo = 1.0f, hi = 0.0f;
        for (float v : pn.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo <= 0.0f || hi >= 1.0f) continue;  // normalization clamp active
        ++tested;
        CHECK(l2Distance(invSiftReorder(sift(pn)), sift(qn)) < 0.1);
    }
    CHECK(tested >= 20);
}

TEST_CASE("raw-pixel descriptor basics") {
    std::mt19937_64 rng(507);
    const Patch p = smoothPatch(rng);
    const Descriptor a = rawPixels(p);
    const Descriptor b = rawPixels(p);
    CHECK(l2Distance(a, b) == 0.0);
    CHECK(l2Norm(a) == doctest::Approx(1.0).epsilon(1e-6));

    Patch flat;
    flat.values.fill(0.25f);
    CHECK_THROWS_WITH(rawPixels(flat), doctest::Contains("degenerate"));
}

TEST_CASE("raw-pixel descriptor tolerates a one-pixel shift") {
    const GrayImage img = texture(160, 160, 508);
    Laf laf;
    laf.center = Point2(80, 80);
    laf.shape = 3.0 * Eigen::Matrix2d::Identity();
    Laf shifted = laf;
    shifted.center = Point2(81, 80);
    Laf unrelated = laf;
    unrelated.center = Point2(40, 35);

    const Descriptor base = rawPixels(samplePatch(img, laf));
    const double near = l2Distance(base, rawPixels(samplePatch(img, shifted)));
    const double far = l2Distance(base, rawPixels(samplePatch(img, unrelated)));
    CHECK(near / far < 0.5);
}

TEST_CASE("finalized descriptors have unit norm") {
    std::mt19937_64 rng(509);
    for (int trial = 0; trial < 30; ++trial) {
        const Patch p = randomPatch(rng);
        for (const Descriptor& d :
             {sift(p), rootSift(p), halfSift(p), halfRootSift(p), rawPixels(p)}) {
            CHECK(l2Norm(d) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("descriptors follow the sampling orientation") {
    const GrayImage img = texture(220, 220, 510);
    const Point2 c(110, 110);
    const double theta = 0.7;
    const double s = std::sin(theta), co = std::cos(theta);

    Laf rotated;
    rotated.center = c;
    rotated.shape << 4 * co, -4 * s, 4 * s, 4 * co;

    // rotate the image by -theta about the center, then sample axis-aligned
    Eigen::Matrix3d toCenter = Eigen::Matrix3d::Identity(), back = Eigen::Matrix3d::Identity(),
                    rot = Eigen::Matrix3d::Identity();
    toCenter(0, 2) = -c.x();
    toCenter(1, 2) = -c.y();
    back(0, 2) = c.x();
    back(1, 2) = c.y();
    rot(0, 0) = co;
    rot(0, 1) = s;
    rot(1, 0) = -s;
    rot(1, 1) = co;
    const GrayImage imgRot = warpAffine(img, back * rot * toCenter, img.width, img.height);

    Laf axis;
    axis.center = c;
    axis.shape = 4.0 * Eigen::Matrix2d::Identity();

    const Descriptor a = sift(photometricNormalize(samplePatch(img, rotated)));
    const Descriptor b = sift(photometricNormalize(samplePatch(imgRot, axis)));
    CHECK(l2Distance(a, b) < 0.15);
}

TEST_CASE("binary descriptor dump round trips") {
    std::mt19937_64 rng(511);
    std::vector<Descriptor> ds;
    for (int i = 0; i < 5; ++i) ds.push_back(halfRootSift(randomPatch(rng)));

    std::stringstream buf;
    writeDescriptorsBinary(buf, ds);
    const auto back = readDescriptorsBinary(buf);
    REQUIRE(back.size() == ds.size());
    for (size_t i = 0; i < ds.size(); ++i) {
        CHECK(back[i].kind == ds[i].kind);
        REQUIRE(back[i].values.size() == ds[i].values.size());
        for (size_t j = 0; j < ds[i].values.size(); ++j) {
            CHECK(back[i].values[j] == ds[i].values[j]);
        }
    }
}

#pragma once

#include "wxbs/geometry.hpp"

#include <array>
#include <vector>

namespace wxbs {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // row-major, values in [0,1]

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    bool empty() const { return width == 0 || height == 0; }
    float at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    float& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }

    // Bilinear sample with coordinates clamped to the image border.
    float sampleClamped(double x, double y) const;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // row-major, interleaved r,g,b
};

struct Patch {
    static constexpr int kSide = 41;
    static constexpr int kArea = kSide * kSide;

    std::array<float, kArea> values{};

    float at(int x, int y) const { return values[static_cast<size_t>(y) * kSide + x]; }
    float& at(int x, int y) { return values[static_cast<size_t>(y) * kSide + x]; }
};

// Measurement-region magnification used for patch extraction (3*sqrt(3)).
inline constexpr double kDefaultMrScale = 5.196152422706632;

// Channel averaging: out = (r + g + b) / 3.
GrayImage toGray(const RgbImage& rgb);

// Separable Gaussian, kernel radius ceil(3*sigma), L1-normalized, mirrored borders.
GrayImage gaussianBlur(const GrayImage& img, double sigma);

struct GradientField {
    GrayImage magnitude;
    GrayImage orientation;  // atan2(dy, dx) mapped to [0, 2*pi)
};

// Central differences inside, one-sided at borders. Requires width,height >= 3.
GradientField gradients(const GrayImage& img);

// Inverse-mapped bilinear warp; samples outside the source read as 0.
// Downscaling axes are pre-blurred with sigma = 0.8*sqrt(max(s^-2 - 1, 0)).
GrayImage warpAffine(const GrayImage& img, const Eigen::Matrix3d& affine, int outW, int outH);

// The 41x41 grid covers the affine measurement region: patch coordinate
// p in [-1,1]^2 maps to image point center + mrScale * shape * p.
Patch samplePatch(const GrayImage& img, const Laf& laf, double mrScale = kDefaultMrScale);

// Rescale to mean 0.5 and standard deviation 0.2, then clamp to [0,1].
// Zero-variance patches map to the constant 0.5 patch.
Patch photometricNormalize(const Patch& p);

struct PyramidLevel {
    GrayImage image;
    double sigma = 0.0;  // absolute blur relative to the input image
};

struct GaussianPyramid {
    std::vector<std::vector<PyramidLevel>> octaves;
};

// scalesPerOctave + 3 levels per octave; octaves until min dimension < minDim.
GaussianPyramid buildGaussianPyramid(const GrayImage& img, int scalesPerOctave = 3,
                                     double initialSigma = 1.6, int minDim = 32);

}  // namespace wxbs

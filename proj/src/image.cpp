#include "wxbs/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wxbs {

namespace {

int mirrorIndex(int i, int n) {
    // Symmetric reflection: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
    if (n == 1) return 0;
    const int period = 2 * n;
    i = ((i % period) + period) % period;
    return i < n ? i : period - 1 - i;
}

std::vector<float> gaussianKernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<float> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double w = std::exp(-0.5 * k * k / (sigma * sigma));
        kernel[k + radius] = static_cast<float>(w);
        sum += w;
    }
    for (float& w : kernel) w = static_cast<float>(w / sum);
    return kernel;
}

// 1D Gaussian blur along an arbitrary unit direction, clamped sampling.
GrayImage directionalBlur(const GrayImage& img, double dx, double dy, double sigma) {
    const auto kernel = gaussianKernel(sigma);
    const int radius = static_cast<int>(kernel.size()) / 2;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * img.sampleClamped(x + k * dx, y + k * dy);
            }
            out.at(x, y) = static_cast<float>(acc);
        }
    }
    return out;
}

}  // namespace

float GrayImage::sampleClamped(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(x), width - 2 >= 0 ? width - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), height - 2 >= 0 ? height - 2 : 0);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
    const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
    return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

GrayImage toGray(const RgbImage& rgb) {
    if (rgb.width <= 0 || rgb.height <= 0) {
        throw std::invalid_argument("toGray: empty image");
    }
    GrayImage out(rgb.width, rgb.height);
    const size_t n = static_cast<size_t>(rgb.width) * rgb.height;
    for (size_t i = 0; i < n; ++i) {
        out.pixels[i] = (rgb.pixels[3 * i] + rgb.pixels[3 * i + 1] + rgb.pixels[3 * i + 2]) / 3.0f;
    }
    return out;
}

GrayImage gaussianBlur(const GrayImage& img, double sigma) {
    if (sigma <= 0.0) {
        throw std::invalid_argument("gaussianBlur: sigma must be positive");
    }
    const auto kernel = gaussianKernel(sigma);
    const int radius = static_cast<int>(kernel.size()) / 2;

    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * img.at(mirrorIndex(x + k, img.width), y);
            }
            tmp.at(x, y) = static_cast<float>(acc);
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * tmp.at(x, mirrorIndex(y + k, img.height));
            }
            out.at(x, y) = static_cast<float>(acc);
        }
    }
    return out;
}

GradientField gradients(const GrayImage& img) {
    if (img.width < 3 || img.height < 3) {
        throw std::invalid_argument("gradients: image must be at least 3x3");
    }
    GradientField field{GrayImage(img.width, img.height), GrayImage(img.width, img.height)};
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double dx, dy;
            if (x == 0) {
                dx = img.at(1, y) - img.at(0, y);
            } else if (x == img.width - 1) {
                dx = img.at(x, y) - img.at(x - 1, y);
            } else {
                dx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
            }
            if (y == 0) {
                dy = img.at(x, 1) - img.at(x, 0);
            } else if (y == img.height - 1) {
                dy = img.at(x, y) - img.at(x, y - 1);
            } else {
                dy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
            }
            field.magnitude.at(x, y) = static_cast<float>(std::hypot(dx, dy));
            double theta = std::atan2(dy, dx);
            if (theta < 0.0) theta += kTwoPi;
            if (theta >= kTwoPi) theta = 0.0;
            field.orientation.at(x, y) = static_cast<float>(theta);
        }
    }
    return field;
}

GrayImage warpAffine(const GrayImage& img, const Eigen::Matrix3d& affine, int outW, int outH) {
    Eigen::Matrix2d linear = affine.topLeftCorner<2, 2>();
    if (std::abs(linear.determinant()) < 1e-12) {
        throw std::invalid_argument("warpAffine: singular transform");
    }

    // Anti-alias along source directions that the warp compresses.
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(linear, Eigen::ComputeFullV);
    const GrayImage* src = &img;
    GrayImage blurred;
    for (int i = 0; i < 2; ++i) {
        const double s = svd.singularValues()(i);
        const double sigma = 0.8 * std::sqrt(std::max(1.0 / (s * s) - 1.0, 0.0));
        if (sigma > 0.01) {
            const Eigen::Vector2d dir = svd.matrixV().col(i);
            blurred = directionalBlur(*src, dir.x(), dir.y(), sigma);
            src = &blurred;
        }
    }

    Eigen::Matrix3d inv = affine.inverse();
    GrayImage out(outW, outH);
    for (int y = 0; y < outH; ++y) {
        for (int x = 0; x < outW; ++x) {
            const double sx = inv(0, 0) * x + inv(0, 1) * y + inv(0, 2);
            const double sy = inv(1, 0) * x + inv(1, 1) * y + inv(1, 2);
            if (sx < 0.0 || sy < 0.0 || sx > src->width - 1 || sy > src->height - 1) {
                continue;  // outside source reads as 0
            }
            out.at(x, y) = src->sampleClamped(sx, sy);
        }
    }
    return out;
}

Patch samplePatch(const GrayImage& img, const Laf& laf, double mrScale) {
    if (mrScale <= 0.0) {
        throw std::invalid_argument("samplePatch: mrScale must be positive");
    }
    Patch patch;
    const int half = Patch::kSide / 2;
    for (int i = 0; i < Patch::kSide; ++i) {
        for (int j = 0; j < Patch::kSide; ++j) {
            const Eigen::Vector2d p(static_cast<double>(j - half) / half,
                                    static_cast<double>(i - half) / half);
            const Eigen::Vector2d q = laf.center + mrScale * (laf.shape * p);
            patch.at(j, i) = img.sampleClamped(q.x(), q.y());
        }
    }
    return patch;
}

Patch photometricNormalize(const Patch& p) {
    double mean = 0.0;
    for (float v : p.values) mean += v;
    mean /= Patch::kArea;
    double var = 0.0;
    for (float v : p.values) var += (v - mean) * (v - mean);
    var /= Patch::kArea;
    const double sd = std::sqrt(var);

    Patch out;
    if (sd < 1e-12) {
        out.values.fill(0.5f);
        return out;
    }
    const double gain = 0.2 / sd;
    for (int i = 0; i < Patch::kArea; ++i) {
        const double v = 0.5 + gain * (p.values[i] - mean);
        out.values[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

GaussianPyramid buildGaussianPyramid(const GrayImage& img, int scalesPerOctave,
                                     double initialSigma, int minDim) {
    if (img.width < minDim || img.height < minDim) {
        throw std::invalid_argument("buildGaussianPyramid: image too small");
    }
    constexpr double kNominalSigma = 0.5;  // assumed blur of the input image

    GaussianPyramid pyr;
    const int levelsPerOctave = scalesPerOctave + 3;
    const double k = std::pow(2.0, 1.0 / scalesPerOctave);

    GrayImage base = gaussianBlur(
        img, std::sqrt(std::max(initialSigma * initialSigma - kNominalSigma * kNominalSigma,
                                0.01)));
    double octaveScale = 1.0;

    while (std::min(base.width, base.height) >= minDim) {
        std::vector<PyramidLevel> octave;
        octave.push_back({base, initialSigma * octaveScale});
        for (int level = 1; level < levelsPerOctave; ++level) {
            // Incremental blur relative to the octave base resolution.
            const double target = initialSigma * std::pow(k, level);
            const double prev = initialSigma * std::pow(k, level - 1);
            const double delta = std::sqrt(target * target - prev * prev);
            octave.push_back({gaussianBlur(octave.back().image, delta), target * octaveScale});
        }

        // Next octave base: level with twice the base sigma, every other pixel.
        const GrayImage& down = octave[scalesPerOctave].image;
        GrayImage next(down.width / 2, down.height / 2);
        for (int y = 0; y < next.height; ++y) {
            for (int x = 0; x < next.width; ++x) {
                next.at(x, y) = down.at(2 * x, 2 * y);
            }
        }
        pyr.octaves.push_back(std::move(octave));
        base = std::move(next);
        octaveScale *= 2.0;
    }
    return pyr;
}

}  // namespace wxbs

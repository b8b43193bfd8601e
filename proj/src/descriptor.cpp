#include "wxbs/descriptor.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace wxbs {

namespace {

constexpr int kGridCells = 4;
constexpr double kClamp = 0.2;
constexpr double kNormEps = 1e-12;

std::vector<float> finalizeSift(const std::vector<double>& hist) {
    double norm = 0.0;
    for (double v : hist) norm += v * v;
    norm = std::sqrt(norm);

    std::vector<float> out(hist.size(), 0.0f);
    if (norm < kNormEps) {
        return out;  // flagged-unnormalizable degenerate case
    }
    double clampedNorm = 0.0;
    for (size_t i = 0; i < hist.size(); ++i) {
        const double v = std::min(hist[i] / norm, kClamp);
        out[i] = static_cast<float>(v);
        clampedNorm += v * v;
    }
    clampedNorm = std::sqrt(clampedNorm);
    for (float& v : out) v = static_cast<float>(v / clampedNorm);
    return out;
}

std::vector<float> finalizeRoot(const std::vector<double>& hist) {
    double sum = 0.0;
    for (double v : hist) sum += v;
    std::vector<float> out(hist.size(), 0.0f);
    if (sum < kNormEps) {
        return out;
    }
    for (size_t i = 0; i < hist.size(); ++i) {
        out[i] = static_cast<float>(std::sqrt(hist[i] / sum));
    }
    return out;
}

}  // namespace

std::string descriptorKindName(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::Sift: return "SIFT";
        case DescriptorKind::RootSift: return "RootSIFT";
        case DescriptorKind::HalfSift: return "HalfSIFT";
        case DescriptorKind::HalfRootSift: return "HalfRootSIFT";
        case DescriptorKind::InvSift: return "InvSIFT";
        case DescriptorKind::RawPixels: return "RawPixels";
    }
    throw std::invalid_argument("unknown descriptor kind");
}

DescriptorKind descriptorKindFromName(const std::string& name) {
    if (name == "SIFT") return DescriptorKind::Sift;
    if (name == "RootSIFT") return DescriptorKind::RootSift;
    if (name == "HalfSIFT") return DescriptorKind::HalfSift;
    if (name == "HalfRootSIFT") return DescriptorKind::HalfRootSift;
    if (name == "InvSIFT") return DescriptorKind::InvSift;
    if (name == "RawPixels") return DescriptorKind::RawPixels;
    throw std::invalid_argument("unknown descriptor kind: " + name);
}

int descriptorDim(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::HalfSift:
        case DescriptorKind::HalfRootSift:
            return 64;
        case DescriptorKind::RawPixels:
            return Patch::kArea;
        default:
            return 128;
    }
}

bool Descriptor::degenerate() const {
    for (float v : values) {
        if (v != 0.0f) return false;
    }
    return true;
}

std::vector<double> siftHistogram(const Patch& p, int orientationBins, double period) {
    const int side = Patch::kSide;
    const double half = (side - 1) / 2.0;
    const double spatialSigma = half;  // Gaussian weight, sigma = half patch width
    std::vector<double> hist(kGridCells * kGridCells * orientationBins, 0.0);

    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            double dx, dy;
            if (x == 0) {
                dx = p.at(1, y) - p.at(0, y);
            } else if (x == side - 1) {
                dx = p.at(x, y) - p.at(x - 1, y);
            } else {
                dx = 0.5 * (p.at(x + 1, y) - p.at(x - 1, y));
            }
            if (y == 0) {
                dy = p.at(x, 1) - p.at(x, 0);
            } else if (y == side - 1) {
                dy = p.at(x, y) - p.at(x, y - 1);
            } else {
                dy = 0.5 * (p.at(x, y + 1) - p.at(x, y - 1));
            }
            const double mag = std::hypot(dx, dy);
            if (mag <= 0.0) continue;

            double theta = std::atan2(dy, dx);
            theta = std::fmod(theta, period);
            if (theta < 0.0) theta += period;

            const double weight =
                mag * std::exp(-0.5 * ((x - half) * (x - half) + (y - half) * (y - half)) /
                               (spatialSigma * spatialSigma));

            // Trilinear spread over 2x2 cells and 2 circular orientation bins.
            const double u = x / static_cast<double>(side - 1) * kGridCells - 0.5;
            const double v = y / static_cast<double>(side - 1) * kGridCells - 0.5;
            const double ob = theta / period * orientationBins;
            const int u0 = static_cast<int>(std::floor(u));
            const int v0 = static_cast<int>(std::floor(v));
            const int ob0 = static_cast<int>(std::floor(ob));
            const double fu = u - u0;
            const double fv = v - v0;
            const double fo = ob - ob0;

            for (int du = 0; du <= 1; ++du) {
                const int cu = u0 + du;
                if (cu < 0 || cu >= kGridCells) continue;
                for (int dv = 0; dv <= 1; ++dv) {
                    const int cv = v0 + dv;
                    if (cv < 0 || cv >= kGridCells) continue;
                    for (int db = 0; db <= 1; ++db) {
                        const int cb = ((ob0 + db) % orientationBins + orientationBins) %
                                       orientationBins;
                        const double w = weight * (du ? fu : 1.0 - fu) * (dv ? fv : 1.0 - fv) *
                                         (db ? fo : 1.0 - fo);
                        hist[(cv * kGridCells + cu) * orientationBins + cb] += w;
                    }
                }
            }
        }
    }
    return hist;
}

Descriptor sift(const Patch& p) {
    return {DescriptorKind::Sift, finalizeSift(siftHistogram(p, 8, 2.0 * std::numbers::pi))};
}

Descriptor rootSift(const Patch& p) {
    return {DescriptorKind::RootSift, finalizeRoot(siftHistogram(p, 8, 2.0 * std::numbers::pi))};
}

Descriptor halfSift(const Patch& p) {
    return {DescriptorKind::HalfSift, finalizeSift(siftHistogram(p, 4, std::numbers::pi))};
}

Descriptor halfRootSift(const Patch& p) {
    return {DescriptorKind::HalfRootSift, finalizeRoot(siftHistogram(p, 4, std::numbers::pi))};
}

Descriptor invSiftReorder(const Descriptor& d) {
    if (d.kind != DescriptorKind::Sift && d.kind != DescriptorKind::InvSift) {
        throw std::invalid_argument("invSiftReorder expects a SIFT-layout descriptor");
    }
    if (d.values.size() != 128) {
        throw std::invalid_argument("invSiftReorder expects 128 values");
    }
    Descriptor out;
    out.kind = d.kind == DescriptorKind::Sift ? DescriptorKind::InvSift : DescriptorKind::Sift;
    out.values.resize(128);
    for (int cell = 0; cell < 16; ++cell) {
        for (int bin = 0; bin < 8; ++bin) {
            out.values[cell * 8 + (bin + 4) % 8] = d.values[cell * 8 + bin];
        }
    }
    return out;
}

Descriptor rawPixels(const Patch& p) {
    double mean = 0.0;
    for (float v : p.values) mean += v;
    mean /= Patch::kArea;
    double var = 0.0;
    for (float v : p.values) var += (v - mean) * (v - mean);
    if (var / Patch::kArea < 1e-12) {
        throw std::invalid_argument("degenerate patch");
    }

    const Patch normalized = photometricNormalize(p);
    Descriptor out;
    out.kind = DescriptorKind::RawPixels;
    out.values.assign(normalized.values.begin(), normalized.values.end());
    double norm = 0.0;
    for (float v : out.values) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    for (float& v : out.values) v = static_cast<float>(v / norm);
    return out;
}

void writeDescriptorsBinary(std::ostream& out, const std::vector<Descriptor>& descriptors) {
    const DescriptorKind kind = descriptors.empty() ? DescriptorKind::Sift : descriptors[0].kind;
    const int dim = descriptorDim(kind);
    for (const Descriptor& d : descriptors) {
        if (d.kind != kind || static_cast<int>(d.values.size()) != dim) {
            throw std::invalid_argument("descriptor dump requires a uniform kind");
        }
    }
    nlohmann::json header{{"kind", descriptorKindName(kind)},
                          {"dim", dim},
                          {"count", descriptors.size()}};
    out << header.dump() << '\n';
    for (const Descriptor& d : descriptors) {
        out.write(reinterpret_cast<const char*>(d.values.data()),
                  static_cast<std::streamsize>(d.values.size() * sizeof(float)));
    }
}

std::vector<Descriptor> readDescriptorsBinary(std::istream& in) {
    std::string headerLine;
    if (!std::getline(in, headerLine)) {
        throw std::runtime_error("missing descriptor dump header");
    }
    const nlohmann::json header = nlohmann::json::parse(headerLine);
    const DescriptorKind kind = descriptorKindFromName(header.at("kind").get<std::string>());
    const int dim = header.at("dim").get<int>();
    const size_t count = header.at("count").get<size_t>();

    std::vector<Descriptor> out(count);
    for (Descriptor& d : out) {
        d.kind = kind;
        d.values.resize(dim);
        in.read(reinterpret_cast<char*>(d.values.data()),
                static_cast<std::streamsize>(dim * sizeof(float)));
        if (!in) {
            throw std::runtime_error("truncated descriptor dump");
        }
    }
    return out;
}

void writeDescriptorsCsv(std::ostream& out, const std::vector<Descriptor>& descriptors) {
    for (const Descriptor& d : descriptors) {
        out << descriptorKindName(d.kind);
        for (float v : d.values) out << ',' << v;
        out << '\n';
    }
}

}  // namespace wxbs

#pragma once

#include "wxbs/image.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wxbs {

enum class DescriptorKind { Sift, RootSift, HalfSift, HalfRootSift, InvSift, RawPixels };

std::string descriptorKindName(DescriptorKind kind);
DescriptorKind descriptorKindFromName(const std::string& name);
int descriptorDim(DescriptorKind kind);

struct Descriptor {
    DescriptorKind kind = DescriptorKind::Sift;
    std::vector<float> values;

    // Only the all-zero-gradient SIFT histogram is allowed to stay at norm 0.
    bool degenerate() const;
};

// Raw 4x4-cell gradient histogram with trilinear interpolation and Gaussian
// spatial weighting, before any normalization. orientationBins bins cover
// [0, period) with gradient orientations folded modulo the period.
std::vector<double> siftHistogram(const Patch& p, int orientationBins, double period);

Descriptor sift(const Patch& p);
Descriptor rootSift(const Patch& p);
Descriptor halfSift(const Patch& p);
Descriptor halfRootSift(const Patch& p);

// Shifts every 8-bin orientation group by half a turn; spatial cells unchanged.
Descriptor invSiftReorder(const Descriptor& d);

// Photometric normalization followed by flattening and L2 normalization.
Descriptor rawPixels(const Patch& p);

// Binary dump: one JSON header line (kind, dim, count), then little-endian
// f32 rows.
void writeDescriptorsBinary(std::ostream& out, const std::vector<Descriptor>& descriptors);
std::vector<Descriptor> readDescriptorsBinary(std::istream& in);
void writeDescriptorsCsv(std::ostream& out, const std::vector<Descriptor>& descriptors);

}  // namespace wxbs

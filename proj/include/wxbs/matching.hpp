#pragma once

#include "wxbs/descriptor.hpp"
#include "wxbs/detector.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <vector>

namespace wxbs {

struct FeatureRecord {
    Laf laf;  // in original image coordinates
    Descriptor descriptor;
    DetectorKind detector = DetectorKind::DoG;
    int viewId = 0;
};

struct Correspondence {
    FeatureRecord a;  // image 1
    FeatureRecord b;  // image 2
    double distance = 0.0;
    double ratio = 1.0;
};

struct Neighbor {
    int index = -1;
    double distance = 0.0;
};

// Exact L2 nearest-neighbor index. Queries return the same result as
// brute-force search; ties are broken by ascending index.
class NNIndex {
public:
    explicit NNIndex(const std::vector<FeatureRecord>& features);

    std::vector<Neighbor> knn(const Descriptor& query, int k) const;

    // Batched queries, block-multiplied for throughput.
    std::vector<std::vector<Neighbor>> knnBatch(const std::vector<FeatureRecord>& queries,
                                                int k) const;

    int size() const { return static_cast<int>(data_.cols()); }
    int dim() const { return static_cast<int>(data_.rows()); }

private:
    Eigen::MatrixXf data_;      // dim x n, one column per feature
    Eigen::VectorXf sqNorms_;
};

struct MatchingConfig {
    double fginnRadius = 10.0;  // px, first-geometrically-inconsistent threshold
    double maxRatio = 0.8;
    int neighborCap = 50;
    double duplicateRadius = 3.0;  // px
};

// First-geometrically-inconsistent nearest-neighbor ratio test: the ratio
// denominator is the first neighbor whose image-2 center is at least
// `radius` pixels away from the nearest neighbor's center.
std::optional<Correspondence> fginnMatch(const FeatureRecord& query, const NNIndex& index,
                                         const std::vector<FeatureRecord>& records,
                                         double radius, double maxRatio, int neighborCap = 50);

// Per (detector x descriptor-kind) channel: independent index + FGINN; the
// union over channels is returned sorted by (channel, ratio).
std::vector<Correspondence> generateTentative(const std::vector<FeatureRecord>& f1,
                                              const std::vector<FeatureRecord>& f2,
                                              const MatchingConfig& cfg);

// Correspondences are duplicates when both endpoints lie within `radius` of
// another correspondence's endpoints; the lowest-ratio member of each group
// survives.
std::vector<Correspondence> filterDuplicates(const std::vector<Correspondence>& tcs,
                                             double radius);

// CSV dump: x1,y1,x2,y2,distance,ratio,detector,descriptor,view1,view2
void writeCorrespondencesCsv(std::ostream& out, const std::vector<Correspondence>& tcs);

}  // namespace wxbs

#include "wxbs/matching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace wxbs {

namespace {

std::vector<Neighbor> selectTopK(const Eigen::VectorXf& sqDists, int k) {
    const int n = static_cast<int>(sqDists.size());
    k = std::min(k, n);
    std::vector<Neighbor> all(n);
    for (int i = 0; i < n; ++i) {
        all[i] = {i, static_cast<double>(sqDists(i))};
    }
    const auto better = [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    };
    std::partial_sort(all.begin(), all.begin() + k, all.end(), better);
    all.resize(k);
    for (Neighbor& nb : all) {
        nb.distance = std::sqrt(std::max(nb.distance, 0.0));
    }
    return all;
}

std::optional<Correspondence> fginnDecide(const FeatureRecord& query,
                                          const std::vector<Neighbor>& neighbors,
                                          const std::vector<FeatureRecord>& records,
                                          double radius, double maxRatio) {
    if (neighbors.empty()) {
        return std::nullopt;
    }
    const Neighbor& first = neighbors[0];
    const Point2 firstCenter = records[first.index].laf.center;

    double inconsistentDistance = -1.0;
    for (size_t i = 1; i < neighbors.size(); ++i) {
        if ((records[neighbors[i].index].laf.center - firstCenter).norm() >= radius) {
            inconsistentDistance = neighbors[i].distance;
            break;
        }
    }

    double ratio;
    if (inconsistentDistance < 0.0) {
        // Only co-located duplicates among the scanned neighbors: accept.
        ratio = 1e-12;
    } else if (inconsistentDistance <= 0.0) {
        ratio = 1.0;
    } else {
        ratio = std::max(first.distance / inconsistentDistance, 1e-12);
    }
    if (ratio >= maxRatio) {
        return std::nullopt;
    }
    Correspondence c;
    c.a = query;
    c.b = records[first.index];
    c.distance = first.distance;
    c.ratio = ratio;
    return c;
}

int64_t gridKey(double x, double y, double cell) {
    const int64_t gx = static_cast<int64_t>(std::floor(x / cell));
    const int64_t gy = static_cast<int64_t>(std::floor(y / cell));
    return gx * 1000003 + gy;
}

}  // namespace

NNIndex::NNIndex(const std::vector<FeatureRecord>& features) {
    if (features.empty()) {
        throw std::invalid_argument("NNIndex requires at least one feature");
    }
    const int dim = static_cast<int>(features[0].descriptor.values.size());
    for (const FeatureRecord& f : features) {
        if (static_cast<int>(f.descriptor.values.size()) != dim) {
            throw std::invalid_argument("NNIndex requires a uniform descriptor dimension");
        }
    }
    data_.resize(dim, static_cast<Eigen::Index>(features.size()));
    for (size_t i = 0; i < features.size(); ++i) {
        data_.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXf>(features[i].descriptor.values.data(), dim);
    }
    sqNorms_ = data_.colwise().squaredNorm();
}

std::vector<Neighbor> NNIndex::knn(const Descriptor& query, int k) const {
    if (static_cast<int>(query.values.size()) != dim()) {
        throw std::invalid_argument("query dimension mismatch");
    }
    const Eigen::Map<const Eigen::VectorXf> q(query.values.data(), dim());
    Eigen::VectorXf sqDists = sqNorms_ - 2.0f * (data_.transpose() * q);
    sqDists.array() += q.squaredNorm();
    return selectTopK(sqDists, k);
}

std::vector<std::vector<Neighbor>> NNIndex::knnBatch(const std::vector<FeatureRecord>& queries,
                                                     int k) const {
    std::vector<std::vector<Neighbor>> results(queries.size());
    constexpr int kBlock = 256;
    Eigen::MatrixXf block(dim(), kBlock);
    for (size_t start = 0; start < queries.size(); start += kBlock) {
        const int count = static_cast<int>(std::min<size_t>(kBlock, queries.size() - start));
        for (int j = 0; j < count; ++j) {
            const auto& values = queries[start + j].descriptor.values;
            if (static_cast<int>(values.size()) != dim()) {
                throw std::invalid_argument("query dimension mismatch");
            }
            block.col(j) = Eigen::Map<const Eigen::VectorXf>(values.data(), dim());
        }
        const Eigen::MatrixXf dots = data_.transpose() * block.leftCols(count);
        for (int j = 0; j < count; ++j) {
            Eigen::VectorXf sqDists = sqNorms_ - 2.0f * dots.col(j);
            sqDists.array() += block.col(j).squaredNorm();
            results[start + j] = selectTopK(sqDists, k);
        }
    }
    return results;
}

std::optional<Correspondence> fginnMatch(const FeatureRecord& query, const NNIndex& index,
                                         const std::vector<FeatureRecord>& records,
                                         double radius, double maxRatio, int neighborCap) {
    if (radius <= 0.0 || maxRatio <= 0.0 || maxRatio >= 1.0) {
        throw std::invalid_argument("fginnMatch: invalid radius or ratio threshold");
    }
    return fginnDecide(query, index.knn(query.descriptor, neighborCap), records, radius,
                       maxRatio);
}

std::vector<Correspondence> generateTentative(const std::vector<FeatureRecord>& f1,
                                              const std::vector<FeatureRecord>& f2,
                                              const MatchingConfig& cfg) {
    if (f1.empty() || f2.empty()) {
        return {};
    }

    using ChannelKey = std::pair<DetectorKind, DescriptorKind>;
    std::map<ChannelKey, std::pair<std::vector<int>, std::vector<int>>> channels;
    for (size_t i = 0; i < f1.size(); ++i) {
        channels[{f1[i].detector, f1[i].descriptor.kind}].first.push_back(static_cast<int>(i));
    }
    for (size_t i = 0; i < f2.size(); ++i) {
        channels[{f2[i].detector, f2[i].descriptor.kind}].second.push_back(static_cast<int>(i));
    }

    std::vector<Correspondence> out;
    for (const auto& [key, indices] : channels) {
        const auto& [idx1, idx2] = indices;
        if (idx1.empty() || idx2.empty()) continue;

        std::vector<FeatureRecord> side1, side2;
        side1.reserve(idx1.size());
        side2.reserve(idx2.size());
        for (int i : idx1) side1.push_back(f1[i]);
        for (int i : idx2) side2.push_back(f2[i]);

        const NNIndex index(side2);
        const auto neighbors = index.knnBatch(side1, cfg.neighborCap);
        std::vector<Correspondence> channelOut;
        for (size_t q = 0; q < side1.size(); ++q) {
            auto match = fginnDecide(side1[q], neighbors[q], side2, cfg.fginnRadius,
                                     cfg.maxRatio);
            if (match) {
                channelOut.push_back(std::move(*match));
            }
        }
        std::sort(channelOut.begin(), channelOut.end(),
                  [](const Correspondence& a, const Correspondence& b) {
                      if (a.ratio != b.ratio) return a.ratio < b.ratio;
                      if (a.a.laf.center.x() != b.a.laf.center.x()) {
                          return a.a.laf.center.x() < b.a.laf.center.x();
                      }
                      return a.a.laf.center.y() < b.a.laf.center.y();
                  });
        out.insert(out.end(), channelOut.begin(), channelOut.end());
    }
    return out;
}

std::vector<Correspondence> filterDuplicates(const std::vector<Correspondence>& tcs,
                                             double radius) {
    if (radius <= 0.0) {
        throw std::invalid_argument("filterDuplicates: radius must be positive");
    }
    std::vector<int> order(tcs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return tcs[a].ratio < tcs[b].ratio;
    });

    std::unordered_map<int64_t, std::vector<int>> grid;  // keyed by image-1 endpoint
    std::vector<int> kept;
    for (int idx : order) {
        const Point2& a = tcs[idx].a.laf.center;
        const Point2& b = tcs[idx].b.laf.center;
        bool duplicate = false;
        for (int gx = -1; gx <= 1 && !duplicate; ++gx) {
            for (int gy = -1; gy <= 1 && !duplicate; ++gy) {
                const auto it =
                    grid.find(gridKey(a.x() + gx * radius, a.y() + gy * radius, radius));
                if (it == grid.end()) continue;
                for (int other : it->second) {
                    if ((tcs[other].a.laf.center - a).norm() < radius &&
                        (tcs[other].b.laf.center - b).norm() < radius) {
                        duplicate = true;
                        break;
                    }
                }
            }
        }
        if (!duplicate) {
            grid[gridKey(a.x(), a.y(), radius)].push_back(idx);
            kept.push_back(idx);
        }
    }

    std::sort(kept.begin(), kept.end());
    std::vector<Correspondence> out;
    out.reserve(kept.size());
    for (int idx : kept) out.push_back(tcs[idx]);
    return out;
}

void writeCorrespondencesCsv(std::ostream& out, const std::vector<Correspondence>& tcs) {
    out << "x1,y1,x2,y2,distance,ratio,detector,descriptor,view1,view2\n";
    for (const Correspondence& c : tcs) {
        out << c.a.laf.center.x() << ',' << c.a.laf.center.y() << ',' << c.b.laf.center.x()
            << ',' << c.b.laf.center.y() << ',' << c.distance << ',' << c.ratio << ','
            << detectorKindName(c.a.detector) << ',' << descriptorKindName(c.a.descriptor.kind)
            << ',' << c.a.viewId << ',' << c.b.viewId << '\n';
    }
}

}  // namespace wxbs

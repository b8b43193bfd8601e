#include "wxbs/ransac.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wxbs {

namespace {

struct Normalization {
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
};

// Hartley normalization: centroid at the origin, mean distance sqrt(2).
Normalization normalizePoints(const std::vector<PointPair>& pts, bool second,
                              std::vector<Point2>* out) {
    Point2 centroid = Point2::Zero();
    for (const PointPair& p : pts) centroid += second ? p.v : p.u;
    centroid /= static_cast<double>(pts.size());

    double meanDist = 0.0;
    for (const PointPair& p : pts) meanDist += ((second ? p.v : p.u) - centroid).norm();
    meanDist /= static_cast<double>(pts.size());
    const double scale = meanDist > 1e-12 ? std::sqrt(2.0) / meanDist : 1.0;

    Normalization n;
    n.t << scale, 0.0, -scale * centroid.x(), 0.0, scale, -scale * centroid.y(), 0.0, 0.0, 1.0;
    out->clear();
    out->reserve(pts.size());
    for (const PointPair& p : pts) {
        out->push_back(scale * ((second ? p.v : p.u) - centroid));
    }
    return n;
}

bool collinearTriple(const Point2& a, const Point2& b, const Point2& c) {
    const Eigen::Vector2d ab = b - a;
    const Eigen::Vector2d ac = c - a;
    const double area = std::abs(ab.x() * ac.y() - ab.y() * ac.x());
    const double span = std::max({ab.norm(), ac.norm(), (c - b).norm(), 1e-12});
    return area < 1e-8 * span * span;
}

Eigen::Matrix3d homographyDlt(const std::vector<PointPair>& pts) {
    std::vector<Point2> us, vs;
    const Normalization n1 = normalizePoints(pts, false, &us);
    const Normalization n2 = normalizePoints(pts, true, &vs);

    Eigen::MatrixXd a(2 * pts.size(), 9);
    for (size_t i = 0; i < pts.size(); ++i) {
        const double x = us[i].x(), y = us[i].y();
        const double xp = vs[i].x(), yp = vs[i].y();
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, xp * x, xp * y, xp;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, yp * x, yp * y, yp;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    return n2.t.inverse() * hn * n1.t;
}

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 via the companion matrix,
// falling back to lower degrees when leading coefficients vanish.
std::vector<double> realPolynomialRoots(double c3, double c2, double c1, double c0) {
    const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    if (scale < 1e-300) return {};
    c3 /= scale;
    c2 /= scale;
    c1 /= scale;
    c0 /= scale;

    Eigen::MatrixXd companion;
    if (std::abs(c3) > 1e-12) {
        companion.resize(3, 3);
        companion << 0, 0, -c0 / c3, 1, 0, -c1 / c3, 0, 1, -c2 / c3;
    } else if (std::abs(c2) > 1e-12) {
        companion.resize(2, 2);
        companion << 0, -c0 / c2, 1, -c1 / c2;
    } else if (std::abs(c1) > 1e-12) {
        return {-c0 / c1};
    } else {
        return {};
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
    std::vector<double> roots;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const std::complex<double> r = solver.eigenvalues()(i);
        if (std::abs(r.imag()) < 1e-8 * (1.0 + std::abs(r.real()))) {
            roots.push_back(r.real());
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double safeResidual(const TwoViewModel& model, const Eigen::Matrix3d& hInv, const Point2& u,
                    const Point2& v) {
    try {
        if (model.kind == ModelKind::Fund) {
            return symEpipolarDistance(model.matrix, u, v);
        }
        return symReprojectionError(model.matrix, hInv, u, v);
    } catch (const std::domain_error&) {
        return std::numeric_limits<double>::infinity();
    }
}

std::vector<int> modelInliers(const TwoViewModel& model, const std::vector<PointPair>& pts,
                              double threshold) {
    Eigen::Matrix3d hInv = Eigen::Matrix3d::Identity();
    if (model.kind == ModelKind::Hom) {
        hInv = model.matrix.inverse();
    }
    std::vector<int> inliers;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (safeResidual(model, hInv, pts[i].u, pts[i].v) < threshold) {
            inliers.push_back(static_cast<int>(i));
        }
    }
    return inliers;
}

struct BestModel {
    TwoViewModel model;
    std::vector<int> inliers;
    bool degenerate = false;
    bool valid = false;
};

std::optional<TwoViewModel> leastSquaresRefit(ModelKind kind, const std::vector<PointPair>& pts,
                                              const std::vector<int>& inliers) {
    std::vector<PointPair> subset;
    subset.reserve(inliers.size());
    for (int i : inliers) subset.push_back(pts[i]);
    try {
        if (kind == ModelKind::Fund) {
            if (subset.size() < 8) return std::nullopt;
            return TwoViewModel{ModelKind::Fund, estimateFundamental8pt(subset).matrix()};
        }
        if (subset.size() < 4) return std::nullopt;
        return TwoViewModel{ModelKind::Hom, estimateHomographyDlt(subset).matrix()};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Iterative refit with a decaying threshold multiplier: early rounds fit on a
// generous inlier set to escape biased minimal-sample estimates, later rounds
// tighten to the working threshold. Keeps the best model seen.
void localOptimization(ModelKind kind, const std::vector<PointPair>& pts, double threshold,
                       int rounds, BestModel* best) {
    TwoViewModel current = best->model;
    for (int round = 0; round < rounds; ++round) {
        const double mult =
            rounds > 1 ? 3.0 - 2.0 * round / static_cast<double>(rounds - 1) : 1.0;
        const std::vector<int> fitSet = modelInliers(current, pts, mult * threshold);
        auto refit = leastSquaresRefit(kind, pts, fitSet);
        if (!refit) break;
        current = *refit;
        std::vector<int> inliers = modelInliers(current, pts, threshold);
        if (inliers.size() > best->inliers.size()) {
            best->model = current;
            best->inliers = std::move(inliers);
        }
    }
}

// Plane-and-parallax: the line joining v and H*u passes through the epipole
// for off-plane points; two such lines fix it and F = [e']_x * H.
std::optional<TwoViewModel> planeParallaxF(const Eigen::Matrix3d& h,
                                           const std::vector<PointPair>& pts,
                                           const std::vector<int>& offPlane, double threshold,
                                           std::mt19937_64& rng) {
    BestModel best;
    const int nOff = static_cast<int>(offPlane.size());
    const int draws = std::min(100, nOff * (nOff - 1) / 2);
    std::uniform_int_distribution<int> pick(0, nOff - 1);
    for (int draw = 0; draw < draws; ++draw) {
        int i = pick(rng);
        int j = pick(rng);
        if (draws == 1) {
            i = 0;
            j = 1;
        }
        if (i == j) continue;
        const PointPair& p1 = pts[offPlane[i]];
        const PointPair& p2 = pts[offPlane[j]];
        const Eigen::Vector3d hu1 = h * Eigen::Vector3d(p1.u.x(), p1.u.y(), 1.0);
        const Eigen::Vector3d hu2 = h * Eigen::Vector3d(p2.u.x(), p2.u.y(), 1.0);
        const Eigen::Vector3d l1 = Eigen::Vector3d(p1.v.x(), p1.v.y(), 1.0).cross(hu1);
        const Eigen::Vector3d l2 = Eigen::Vector3d(p2.v.x(), p2.v.y(), 1.0).cross(hu2);
        const Eigen::Vector3d epipole = l1.cross(l2);
        if (epipole.norm() < 1e-12) continue;

        Eigen::Matrix3d cross;
        cross << 0, -epipole(2), epipole(1), epipole(2), 0, -epipole(0), -epipole(1), epipole(0),
            0;
        Eigen::Matrix3d fm = cross * h;
        if (fm.norm() < 1e-12) continue;
        try {
            TwoViewModel candidate{ModelKind::Fund, FundamentalMatrix(fm).matrix()};
            std::vector<int> inliers = modelInliers(candidate, pts, threshold);
            if (inliers.size() > best.inliers.size()) {
                best.model = candidate;
                best.inliers = std::move(inliers);
                best.valid = true;
            }
        } catch (const std::exception&) {
            continue;
        }
    }
    if (!best.valid) return std::nullopt;
    return best.model;
}

// Grows a seed plane homography on the full set, then recovers F from the
// plane plus two clear-parallax points. When there is too little parallax the
// grown homography is offered as `hFallback` instead.
std::optional<BestModel> dominantPlaneRecovery(const Eigen::Matrix3d& hSeed,
                                               const std::vector<PointPair>& pts,
                                               const RansacConfig& cfg, std::mt19937_64& rng,
                                               BestModel* hFallback) {
    const int n = static_cast<int>(pts.size());
    TwoViewModel hModel{ModelKind::Hom, hSeed};
    std::vector<int> hInliers = modelInliers(hModel, pts, cfg.inlierThreshold);
    for (int round = 0; round < 2; ++round) {
        auto refit = leastSquaresRefit(ModelKind::Hom, pts, hInliers);
        if (!refit) break;
        std::vector<int> grown = modelInliers(*refit, pts, cfg.inlierThreshold);
        if (grown.size() <= hInliers.size()) break;
        hModel = *refit;
        hInliers = std::move(grown);
    }

    // Epipole candidates need clear parallax; points barely outside the plane
    // band are mostly noisy plane points.
    std::vector<int> offPlane;
    const Eigen::Matrix3d hInv = hModel.matrix.inverse();
    for (int i = 0; i < n; ++i) {
        if (safeResidual(hModel, hInv, pts[i].u, pts[i].v) >= 2.0 * cfg.inlierThreshold) {
            offPlane.push_back(i);
        }
    }

    if (offPlane.size() >= 2) {
        auto fpp = planeParallaxF(hModel.matrix, pts, offPlane, cfg.inlierThreshold, rng);
        if (fpp) {
            return BestModel{*fpp, modelInliers(*fpp, pts, cfg.inlierThreshold), false, true};
        }
    } else if (hFallback && hInliers.size() > hFallback->inliers.size()) {
        *hFallback = {hModel, hInliers, true, true};
    }
    return std::nullopt;
}

int adaptiveSampleCount(double inlierRatio, int sampleSize, double confidence, int maxSamples) {
    if (inlierRatio <= 0.0) return maxSamples;
    const double wPowM = std::pow(inlierRatio, sampleSize);
    if (wPowM >= 1.0 - 1e-12) return 1;
    const double n = std::log(1.0 - confidence) / std::log(1.0 - wPowM);
    if (!std::isfinite(n) || n > maxSamples) return maxSamples;
    return std::max(1, static_cast<int>(std::ceil(n)));
}

VerificationResult ransacCore(const std::vector<Correspondence>& tcs, ModelKind kind,
                              const RansacConfig& cfg) {
    const int sampleSize = kind == ModelKind::Fund ? 7 : 4;
    const int n = static_cast<int>(tcs.size());
    if (n < sampleSize) {
        throw std::runtime_error("insufficient TCs");
    }

    std::vector<PointPair> pts(n);
    for (int i = 0; i < n; ++i) {
        pts[i] = {tcs[i].a.laf.center, tcs[i].b.laf.center};
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> pick(0, n - 1);

    BestModel best;
    BestModel hFallback;  // dominant plane with too little parallax
    int samplesUsed = 0;
    int target = cfg.maxSamples;

    for (int iter = 0; iter < target; ++iter) {
        samplesUsed = iter + 1;

        std::vector<int> sampleIdx;
        while (static_cast<int>(sampleIdx.size()) < sampleSize) {
            const int idx = pick(rng);
            if (std::find(sampleIdx.begin(), sampleIdx.end(), idx) == sampleIdx.end()) {
                sampleIdx.push_back(idx);
            }
        }
        std::vector<PointPair> sample;
        for (int i : sampleIdx) sample.push_back(pts[i]);

        std::vector<TwoViewModel> candidates;
        try {
            if (kind == ModelKind::Fund) {
                for (const FundamentalMatrix& f : estimateFundamental7pt(sample)) {
                    candidates.push_back({ModelKind::Fund, f.matrix()});
                }
            } else {
                candidates.push_back({ModelKind::Hom, estimateHomography4pt(sample).matrix()});
            }
        } catch (const std::exception&) {
            continue;
        }

        for (const TwoViewModel& candidate : candidates) {
            std::vector<int> inliers = modelInliers(candidate, pts, cfg.inlierThreshold);
            if (inliers.size() <= best.inliers.size() && best.valid) continue;

            BestModel current{candidate, inliers, false, true};

            if (kind == ModelKind::Fund && cfg.degeneracyCheck) {
                auto hDegen = checkSampleHDegeneracy(sample, FundamentalMatrix(candidate.matrix),
                                                     cfg.inlierThreshold);
                if (hDegen) {
                    auto recovered =
                        dominantPlaneRecovery(hDegen->matrix(), pts, cfg, rng, &hFallback);
                    if (recovered && recovered->inliers.size() > current.inliers.size()) {
                        current.model = recovered->model;
                        current.inliers = std::move(recovered->inliers);
                    }
                }
            }

            localOptimization(current.model.kind, pts, cfg.inlierThreshold, cfg.loIterations,
                              &current);

            if (!best.valid || current.inliers.size() > best.inliers.size()) {
                best = current;
                target = std::min(
                    target,
                    std::max(samplesUsed,
                             adaptiveSampleCount(
                                 static_cast<double>(best.inliers.size()) / n, sampleSize,
                                 cfg.confidence, cfg.maxSamples)));
            }
        }
    }

    // The winning F can itself be dominated by a single plane: its support was
    // never sample-tested as a whole. Fit a plane to the support; when most of
    // it is planar, retry the plane-and-parallax recovery from that plane.
    if (kind == ModelKind::Fund && cfg.degeneracyCheck && best.valid &&
        best.inliers.size() >= 4) {
        BestModel planeSeed;
        std::uniform_int_distribution<int> pickInlier(
            0, static_cast<int>(best.inliers.size()) - 1);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<int> four;
            while (four.size() < 4) {
                const int idx = best.inliers[pickInlier(rng)];
                if (std::find(four.begin(), four.end(), idx) == four.end()) four.push_back(idx);
            }
            std::vector<PointPair> quad;
            for (int i : four) quad.push_back(pts[i]);
            try {
                const TwoViewModel hModel{ModelKind::Hom, estimateHomography4pt(quad).matrix()};
                std::vector<int> hInliers = modelInliers(hModel, pts, cfg.inlierThreshold);
                if (hInliers.size() > planeSeed.inliers.size()) {
                    planeSeed = {hModel, std::move(hInliers), false, true};
                }
            } catch (const std::exception&) {
            }
        }
        if (planeSeed.valid && 10 * planeSeed.inliers.size() >= 6 * best.inliers.size()) {
            auto recovered =
                dominantPlaneRecovery(planeSeed.model.matrix, pts, cfg, rng, &hFallback);
            if (recovered) {
                localOptimization(ModelKind::Fund, pts, cfg.inlierThreshold, cfg.loIterations,
                                  &*recovered);
                if (recovered->inliers.size() > best.inliers.size()) {
                    best = *recovered;
                }
            }
        }
    }

    const size_t minInliers = static_cast<size_t>(std::max(10, 2 * sampleSize));
    if (hFallback.valid && hFallback.inliers.size() > best.inliers.size()) {
        best = hFallback;
    }
    if (!best.valid || best.inliers.size() < minInliers) {
        throw std::runtime_error("verification failed");
    }

    VerificationResult result;
    result.model = best.model;
    result.degenerate = best.degenerate;
    result.samplesUsed = samplesUsed;
    for (int i : modelInliers(best.model, pts, cfg.inlierThreshold)) {
        result.inliers.push_back(tcs[i]);
    }
    return result;
}

}  // namespace

Homography estimateHomography4pt(const std::vector<PointPair>& pts) {
    if (pts.size() != 4) {
        throw std::invalid_argument("estimateHomography4pt expects exactly 4 correspondences");
    }
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            for (int c = b + 1; c < 4; ++c) {
                if (collinearTriple(pts[a].u, pts[b].u, pts[c].u) ||
                    collinearTriple(pts[a].v, pts[b].v, pts[c].v)) {
                    throw std::invalid_argument("degenerate configuration: collinear triple");
                }
            }
        }
    }
    return Homography(homographyDlt(pts));
}

Homography estimateHomographyDlt(const std::vector<PointPair>& pts) {
    if (pts.size() < 4) {
        throw std::invalid_argument("estimateHomographyDlt requires at least 4 correspondences");
    }
    return Homography(homographyDlt(pts));
}

std::vector<FundamentalMatrix> estimateFundamental7pt(const std::vector<PointPair>& pts) {
    if (pts.size() != 7) {
        throw std::invalid_argument("estimateFundamental7pt expects exactly 7 correspondences");
    }
    std::vector<Point2> us, vs;
    const Normalization n1 = normalizePoints(pts, false, &us);
    const Normalization n2 = normalizePoints(pts, true, &vs);

    Eigen::Matrix<double, 7, 9> a;
    for (int i = 0; i < 7; ++i) {
        const double x = us[i].x(), y = us[i].y();
        const double xp = vs[i].x(), yp = vs[i].y();
        a.row(i) << xp * x, xp * y, xp, yp * x, yp * y, yp, x, y, 1.0;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 7, 9>> svd(a, Eigen::ComputeFullV);
    // A coplanar (or duplicated-point) sample drops to rank 6 and still
    // yields candidates; only deeper deficiency is hopeless.
    if (svd.singularValues()(5) < 1e-10 * svd.singularValues()(0)) {
        throw std::invalid_argument("degenerate sample");
    }
    const auto toMatrix = [](const Eigen::VectorXd& f) {
        Eigen::Matrix3d m;
        m << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);
        return m;
    };
    const Eigen::Matrix3d f1 = toMatrix(svd.matrixV().col(7));
    const Eigen::Matrix3d f2 = toMatrix(svd.matrixV().col(8));

    // det(lambda*F1 + (1-lambda)*F2) is cubic in lambda; fit it by evaluation.
    const Eigen::Matrix3d diff = f1 - f2;
    const double samples[4] = {-1.0, 0.0, 1.0, 2.0};
    Eigen::Matrix4d vander;
    Eigen::Vector4d dets;
    for (int i = 0; i < 4; ++i) {
        const double l = samples[i];
        vander.row(i) << l * l * l, l * l, l, 1.0;
        dets(i) = (f2 + l * diff).determinant();
    }
    const Eigen::Vector4d coeffs = vander.fullPivLu().solve(dets);

    std::vector<FundamentalMatrix> solutions;
    for (double root : realPolynomialRoots(coeffs(0), coeffs(1), coeffs(2), coeffs(3))) {
        const Eigen::Matrix3d fn = f2 + root * diff;
        const Eigen::Matrix3d f = n2.t.transpose() * fn * n1.t;
        if (f.norm() < 1e-12) continue;
        try {
            solutions.emplace_back(f);
        } catch (const std::exception&) {
            continue;
        }
    }
    if (solutions.empty()) {
        throw std::invalid_argument("degenerate sample");
    }
    return solutions;
}

FundamentalMatrix estimateFundamental8pt(const std::vector<PointPair>& pts) {
    if (pts.size() < 8) {
        throw std::invalid_argument("estimateFundamental8pt requires at least 8 correspondences");
    }
    std::vector<Point2> us, vs;
    const Normalization n1 = normalizePoints(pts, false, &us);
    const Normalization n2 = normalizePoints(pts, true, &vs);

    Eigen::MatrixXd a(pts.size(), 9);
    for (size_t i = 0; i < pts.size(); ++i) {
        const double x = us[i].x(), y = us[i].y();
        const double xp = vs[i].x(), yp = vs[i].y();
        a.row(i) << xp * x, xp * y, xp, yp * x, yp * y, yp, x, y, 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd f = svd.matrixV().col(8);
    Eigen::Matrix3d fn;
    fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);
    return FundamentalMatrix(n2.t.transpose() * fn * n1.t);
}

std::optional<Homography> checkSampleHDegeneracy(const std::vector<PointPair>& sample,
                                                 const FundamentalMatrix& f, double threshold) {
    (void)f;  // the direct subset test does not need the sample's F
    if (sample.size() != 7) {
        throw std::invalid_argument("checkSampleHDegeneracy expects a 7-point sample");
    }
    static constexpr int kSubsets[3][5] = {
        {0, 1, 2, 3, 4}, {2, 3, 4, 5, 6}, {0, 1, 4, 5, 6}};

    for (const auto& subset : kSubsets) {
        std::vector<PointPair> four;
        for (int i = 0; i < 4; ++i) four.push_back(sample[subset[i]]);
        Eigen::Matrix3d h;
        try {
            h = estimateHomography4pt(four).matrix();
        } catch (const std::exception&) {
            continue;
        }
        const Eigen::Matrix3d hInv = h.inverse();

        std::vector<int> consistent;
        for (size_t i = 0; i < sample.size(); ++i) {
            try {
                if (symReprojectionError(h, hInv, sample[i].u, sample[i].v) < threshold) {
                    consistent.push_back(static_cast<int>(i));
                }
            } catch (const std::domain_error&) {
            }
        }
        if (consistent.size() < 5) continue;

        std::vector<PointPair> consistentPts;
        for (int i : consistent) consistentPts.push_back(sample[i]);
        try {
            return estimateHomographyDlt(consistentPts);
        } catch (const std::exception&) {
            return Homography(h);
        }
    }
    return std::nullopt;
}

VerificationResult ransacVerify(const std::vector<Correspondence>& tcs, WantModel want,
                                const RansacConfig& cfg) {
    if (cfg.inlierThreshold <= 0.0) {
        throw std::invalid_argument("inlier threshold must be positive");
    }
    if (want == WantModel::Fund) {
        return ransacCore(tcs, ModelKind::Fund, cfg);
    }
    if (want == WantModel::Hom) {
        return ransacCore(tcs, ModelKind::Hom, cfg);
    }

    std::optional<VerificationResult> fund, hom;
    try {
        fund = ransacCore(tcs, ModelKind::Fund, cfg);
    } catch (const std::runtime_error&) {
    }
    try {
        hom = ransacCore(tcs, ModelKind::Hom, cfg);
    } catch (const std::runtime_error&) {
    }
    if (!fund && !hom) {
        throw std::runtime_error("verification failed");
    }
    if (!fund) return *hom;
    if (!hom) return *fund;
    // Prefer the simpler model when it explains nearly as many inliers.
    if (static_cast<double>(hom->inliers.size()) >= 0.95 * fund->inliers.size()) {
        return *hom;
    }
    return *fund;
}

std::vector<Correspondence> lafConsistencyFilter(const std::vector<Correspondence>& inliers,
                                                 const FundamentalMatrix& f, double threshold) {
    if (std::isinf(threshold)) {
        return inliers;
    }
    std::vector<Correspondence> out;
    for (const Correspondence& c : inliers) {
        const auto tripleA = lafToPointTriple(c.a.laf);
        const auto tripleB = lafToPointTriple(c.b.laf);
        bool keep = true;
        for (int i = 0; i < 3 && keep; ++i) {
            try {
                keep = symEpipolarDistance(f, tripleA[i], tripleB[i]) < threshold;
            } catch (const std::domain_error&) {
                keep = false;
            }
        }
        if (keep) out.push_back(c);
    }
    return out;
}

std::string verificationResultToJson(const VerificationResult& result,
                                     const std::vector<Correspondence>& tcs) {
    nlohmann::json matrix = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
        matrix.push_back({result.model.matrix(r, 0), result.model.matrix(r, 1),
                          result.model.matrix(r, 2)});
    }

    nlohmann::json indices = nlohmann::json::array();
    for (const Correspondence& inlier : result.inliers) {
        for (size_t i = 0; i < tcs.size(); ++i) {
            if (tcs[i].a.laf.center == inlier.a.laf.center &&
                tcs[i].b.laf.center == inlier.b.laf.center) {
                indices.push_back(i);
                break;
            }
        }
    }

    nlohmann::json root{{"model_kind", result.model.kind == ModelKind::Fund ? "F" : "H"},
                        {"matrix", matrix},
                        {"inliers", indices},
                        {"degenerate", result.degenerate},
                        {"samples_used", result.samplesUsed}};
    return root.dump(2);
}

}  // namespace wxbs

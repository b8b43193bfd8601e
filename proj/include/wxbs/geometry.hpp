#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <string>

namespace wxbs {

using Point2 = Eigen::Vector2d;

// Local affine frame: feature center plus a 2x2 shape matrix whose columns
// are the frame's axis vectors in pixels. det(shape) > 0 for valid frames.
struct Laf {
    Point2 center = Point2::Zero();
    Eigen::Matrix2d shape = Eigen::Matrix2d::Identity();
};

enum class ModelKind { Hom, Fund };

class Homography {
public:
    explicit Homography(const Eigen::Matrix3d& m);

    const Eigen::Matrix3d& matrix() const { return m_; }
    Homography inverse() const;

private:
    Eigen::Matrix3d m_;
};

// Rank-2 fundamental matrix with unit Frobenius norm. Construction enforces
// rank 2 via the nearest rank-2 matrix in Frobenius norm.
class FundamentalMatrix {
public:
    explicit FundamentalMatrix(const Eigen::Matrix3d& m);

    const Eigen::Matrix3d& matrix() const { return m_; }

private:
    Eigen::Matrix3d m_;
};

struct TwoViewModel {
    ModelKind kind = ModelKind::Hom;
    Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
};

// Sum of perpendicular point-to-epipolar-line distances in both images.
double symEpipolarDistance(const FundamentalMatrix& f, const Point2& u, const Point2& v);
double symEpipolarDistance(const Eigen::Matrix3d& f, const Point2& u, const Point2& v);

// Sum of forward and backward transfer errors under a homography.
double symReprojectionError(const Homography& h, const Point2& u, const Point2& v);
double symReprojectionError(const Eigen::Matrix3d& h, const Eigen::Matrix3d& hInv,
                            const Point2& u, const Point2& v);

double modelResidual(const TwoViewModel& model, const Point2& u, const Point2& v);

// Expands a LAF to its center and the two frame-axis endpoints.
std::array<Point2, 3> lafToPointTriple(const Laf& laf);

// Maps a LAF through a 3x3 affine transform (last row must be (0,0,1)).
Laf transformLaf(const Eigen::Matrix3d& affine, const Laf& laf);

// 3x3 matrix text format: 9 whitespace-separated decimals, row-major,
// written with enough digits to round-trip doubles.
Eigen::Matrix3d readMatrix3(std::istream& in);
Eigen::Matrix3d readMatrix3File(const std::string& path);
void writeMatrix3(std::ostream& out, const Eigen::Matrix3d& m);
void writeMatrix3File(const std::string& path, const Eigen::Matrix3d& m);

}  // namespace wxbs

#include "wxbs/geometry.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace wxbs {

namespace {

constexpr double kEpsHom = 1e-12;

Eigen::Vector3d homogeneous(const Point2& p) {
    return Eigen::Vector3d(p.x(), p.y(), 1.0);
}

double pointLineDistance(const Point2& p, const Eigen::Vector3d& line) {
    const double norm = std::hypot(line(0), line(1));
    if (norm < kEpsHom) {
        throw std::domain_error("point at epipole");
    }
    return std::abs(homogeneous(p).dot(line)) / norm;
}

Point2 perspectiveDivide(const Eigen::Vector3d& q) {
    if (std::abs(q(2)) < kEpsHom) {
        throw std::domain_error("point at infinity");
    }
    return Point2(q(0) / q(2), q(1) / q(2));
}

}  // namespace

Homography::Homography(const Eigen::Matrix3d& m) : m_(m) {
    const double det = m_.determinant();
    if (!m_.allFinite() || std::abs(det) < kEpsHom * std::pow(m_.norm(), 3)) {
        throw std::invalid_argument("homography must be invertible");
    }
    if (std::abs(m_(2, 2)) > kEpsHom * m_.norm()) {
        m_ /= m_(2, 2);
    }
}

Homography Homography::inverse() const {
    return Homography(m_.inverse());
}

FundamentalMatrix::FundamentalMatrix(const Eigen::Matrix3d& m) {
    if (!m.allFinite() || m.norm() < kEpsHom) {
        throw std::invalid_argument("fundamental matrix must be finite and nonzero");
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d s = svd.singularValues();
    s(2) = 0.0;
    m_ = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    m_ /= m_.norm();
}

double symEpipolarDistance(const Eigen::Matrix3d& f, const Point2& u, const Point2& v) {
    const Eigen::Vector3d lineIn2 = f * homogeneous(u);
    const Eigen::Vector3d lineIn1 = f.transpose() * homogeneous(v);
    return pointLineDistance(v, lineIn2) + pointLineDistance(u, lineIn1);
}

double symEpipolarDistance(const FundamentalMatrix& f, const Point2& u, const Point2& v) {
    return symEpipolarDistance(f.matrix(), u, v);
}

double symReprojectionError(const Eigen::Matrix3d& h, const Eigen::Matrix3d& hInv,
                            const Point2& u, const Point2& v) {
    const Point2 forward = perspectiveDivide(h * homogeneous(u));
    const Point2 backward = perspectiveDivide(hInv * homogeneous(v));
    return (v - forward).norm() + (u - backward).norm();
}

double symReprojectionError(const Homography& h, const Point2& u, const Point2& v) {
    return symReprojectionError(h.matrix(), h.matrix().inverse(), u, v);
}

double modelResidual(const TwoViewModel& model, const Point2& u, const Point2& v) {
    if (model.kind == ModelKind::Fund) {
        return symEpipolarDistance(model.matrix, u, v);
    }
    return symReprojectionError(model.matrix, model.matrix.inverse(), u, v);
}

std::array<Point2, 3> lafToPointTriple(const Laf& laf) {
    return {laf.center,
            Point2(laf.center + laf.shape.col(0)),
            Point2(laf.center + laf.shape.col(1))};
}

Laf transformLaf(const Eigen::Matrix3d& affine, const Laf& laf) {
    const double scale = affine.norm();
    if (std::abs(affine(2, 0)) > 1e-9 * scale || std::abs(affine(2, 1)) > 1e-9 * scale ||
        std::abs(affine(2, 2) - 1.0) > 1e-9) {
        throw std::invalid_argument("transformLaf requires an affine matrix");
    }
    Laf out;
    out.center = affine.topLeftCorner<2, 2>() * laf.center + affine.topRightCorner<2, 1>();
    out.shape = affine.topLeftCorner<2, 2>() * laf.shape;
    return out;
}

Eigen::Matrix3d readMatrix3(std::istream& in) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (!(in >> m(r, c))) {
                throw std::runtime_error("malformed 3x3 matrix text");
            }
        }
    }
    return m;
}

Eigen::Matrix3d readMatrix3File(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open matrix file: " + path);
    }
    return readMatrix3(in);
}

void writeMatrix3(std::ostream& out, const Eigen::Matrix3d& m) {
    out << std::setprecision(17);
    for (int r = 0; r < 3; ++r) {
        out << m(r, 0) << ' ' << m(r, 1) << ' ' << m(r, 2) << '\n';
    }
}

void writeMatrix3File(const std::string& path, const Eigen::Matrix3d& m) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write matrix file: " + path);
    }
    writeMatrix3(out, m);
}

}  // namespace wxbs

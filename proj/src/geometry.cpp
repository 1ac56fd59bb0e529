#include "angval/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "angval/errors.hpp"
#include "angval/rng.hpp"

namespace angval {

namespace {

constexpr double kOrthTol = 1e-12;
constexpr double kRankTol = 1e-12;
constexpr double kCosOneTol = 1e-12;

void check_compatible(const Frame& p, const Frame& q) {
    if (p.dim() != q.dim() || p.rank() != q.rank()) {
        throw DimensionMismatch("frames differ in shape: " + std::to_string(p.dim()) +
                                "x" + std::to_string(p.rank()) + " vs " +
                                std::to_string(q.dim()) + "x" +
                                std::to_string(q.rank()));
    }
}

double angle_from_cosine(double c) {
    c = std::min(1.0, std::max(0.0, c));
    if (c >= 1.0 - kCosOneTol) return 0.0;
    return std::acos(c);
}

}  // namespace

Frame::Frame(const Eigen::MatrixXd& orthonormal_columns) : cols_(orthonormal_columns) {
    if (cols_.cols() < 1 || cols_.cols() > cols_.rows()) {
        throw DimensionMismatch("frame must be d x s with 1 <= s <= d");
    }
    if (orthonormality_defect() > kOrthTol) {
        throw RankDeficient("columns are not orthonormal; use orthonormalize()");
    }
}

double Frame::orthonormality_defect() const {
    Eigen::MatrixXd g = cols_.transpose() * cols_;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

Frame orthonormalize(const Eigen::MatrixXd& m) {
    if (m.cols() < 1 || m.cols() > m.rows()) {
        throw DimensionMismatch("expected d x s input with 1 <= s <= d");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::VectorXd rdiag = qr.matrixR().diagonal().cwiseAbs();
    const double rmax = rdiag.maxCoeff();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        if (rdiag(i) > kRankTol * rmax) ++rank;
    }
    if (rmax == 0.0 || rank < m.cols()) {
        throw RankDeficient("rank " + std::to_string(rank) + " < " +
                            std::to_string(m.cols()) + " columns");
    }
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    return Frame(q, Frame::Trusted{});
}

PrincipalAngleSet principal_angles(const Frame& p, const Frame& q) {
    check_compatible(p, q);
    const Eigen::Index s = p.rank();
    Eigen::MatrixXd m = p.columns().transpose() * q.columns();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);

    PrincipalAngleSet out;
    out.angles.resize(s);
    // singular values come out descending, so angles ascend
    for (Eigen::Index j = 0; j < s; ++j) out.angles[j] = angle_from_cosine(svd.singularValues()(j));
    out.left_vectors = p.columns() * svd.matrixU();
    out.right_vectors = q.columns() * svd.matrixV();
    return out;
}

double max_angle(const Frame& p, const Frame& q) {
    check_compatible(p, q);
    if (p.rank() == 1) {
        // atan2 of (sine, cosine) keeps full accuracy at both ends
        Eigen::VectorXd v = p.columns().col(0);
        Eigen::VectorXd w = q.columns().col(0);
        double c = v.dot(w);
        double sgn = c < 0 ? -1.0 : 1.0;
        double s = (v - sgn * w).norm() * (v + sgn * w).norm() / 2.0;
        return std::atan2(s, std::abs(c));
    }
    Eigen::MatrixXd m = p.columns().transpose() * q.columns();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    double cmin = svd.singularValues()(p.rank() - 1);
    if (cmin < 0.5) return angle_from_cosine(cmin);
    // small angle: recover the sine as ||(I - P P^T) Q y|| on the minimizing direction
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(m, Eigen::ComputeFullV);
    Eigen::VectorXd y = svd2.matrixV().col(p.rank() - 1);
    Eigen::VectorXd qy = q.columns() * y;
    Eigen::VectorXd resid = qy - p.columns() * (p.columns().transpose() * qy);
    return std::atan2(resid.norm(), std::min(1.0, cmin));
}

double chi(double x) {
    double v = std::min(std::abs(x), kPi - std::abs(x));
    return std::min(std::max(v, 0.0), kPi / 2.0);
}

namespace {

// Hyperspherical grid on the unit sphere of R^s: (s-1) angles, `grid`
// subdivisions each. For s = 1 the single direction suffices (angles between
// spans ignore sign).
void sphere_grid(Eigen::Index s, int grid, std::vector<Eigen::VectorXd>& out) {
    if (s == 1) {
        out.push_back(Eigen::VectorXd::Ones(1));
        return;
    }
    std::vector<double> angles(s - 1, 0.0);
    std::vector<int> idx(s - 1, 0);
    for (;;) {
        // last angle runs over [0, pi) (antipodal pairs give the same span
        // direction set when combined with sign of the first coordinate);
        // interior angles over [0, pi].
        Eigen::VectorXd v(s);
        double sinprod = 1.0;
        for (Eigen::Index k = 0; k < s - 1; ++k) {
            double a = angles[k];
            v(k) = sinprod * std::cos(a);
            sinprod *= std::sin(a);
        }
        v(s - 1) = sinprod;
        out.push_back(v);
        Eigen::Index k = 0;
        for (; k < s - 1; ++k) {
            if (++idx[k] < grid) {
                angles[k] = kPi * idx[k] / grid;
                break;
            }
            idx[k] = 0;
            angles[k] = 0.0;
        }
        if (k == s - 1) break;
    }
}

}  // namespace

double minmax_angle_oracle(const Frame& p, const Frame& q, int grid) {
    check_compatible(p, q);
    if (grid < 2) throw ParamRange("oracle grid must be >= 2");
    // points per coefficient sphere: grid^(s-1); guard the evaluated pairs
    const double pts = std::pow(static_cast<double>(grid),
                                static_cast<double>(p.rank() - 1));
    if (pts * pts > 1e8) {
        throw OracleTooLarge("oracle pair count exceeds 1e8");
    }
    std::vector<Eigen::VectorXd> cv, cw;
    sphere_grid(p.rank(), grid, cv);
    sphere_grid(q.rank(), grid, cw);

    std::vector<Eigen::VectorXd> ws;
    ws.reserve(cw.size());
    for (const auto& b : cw) ws.push_back(q.columns() * b);

    double best = 0.0;
    for (const auto& a : cv) {
        Eigen::VectorXd v = p.columns() * a;
        double vn = v.norm();
        double inner = 0.0;  // max over w of |cos|
        for (const auto& w : ws) {
            double c = std::abs(v.dot(w)) / (vn * w.norm());
            if (c > inner) inner = c;
        }
        double ang = angle_from_cosine(inner);
        if (ang > best) best = ang;
    }
    return best;
}

double grassmann_distance(const Frame& p, const Frame& q) {
    check_compatible(p, q);
    Eigen::MatrixXd diff = p.columns() * p.columns().transpose() -
                           q.columns() * q.columns().transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
    return svd.singularValues()(0);
}

Frame random_frame(Eigen::Index d, Eigen::Index s, std::uint64_t stream_key) {
    rng::Stream st(stream_key);
    Eigen::MatrixXd m(d, s);
    for (Eigen::Index j = 0; j < s; ++j)
        for (Eigen::Index i = 0; i < d; ++i) m(i, j) = st.next_normal();
    return orthonormalize(m);
}

}  // namespace angval

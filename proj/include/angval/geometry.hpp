#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace angval {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Orthonormal basis of an s-dimensional subspace of R^d, a point of the
// Grassmannian G(s,d). Construction enforces ||Q^T Q - I||_max <= 1e-12.
class Frame {
public:
    Frame() = default;

    // Accepts an already orthonormal d x s matrix; throws if it is not.
    explicit Frame(const Eigen::MatrixXd& orthonormal_columns);

    Eigen::Index dim() const { return cols_.rows(); }
    Eigen::Index rank() const { return cols_.cols(); }
    const Eigen::MatrixXd& columns() const { return cols_; }

    double orthonormality_defect() const;

private:
    friend Frame orthonormalize(const Eigen::MatrixXd&);
    struct Trusted {};
    Frame(const Eigen::MatrixXd& q, Trusted) : cols_(q) {}
    Eigen::MatrixXd cols_;
};

// QR-based orthonormalization with a column-pivot rank guard at relative
// threshold 1e-12. range(result) = range(m).
Frame orthonormalize(const Eigen::MatrixXd& m);

struct PrincipalAngleSet {
    std::vector<double> angles;    // ascending, in [0, pi/2]
    Eigen::MatrixXd left_vectors;  // v_1..v_s as columns, from V
    Eigen::MatrixXd right_vectors; // w_1..w_s as columns, from W
};

// Angles between range(p) and range(q) from the SVD of P^T Q. Singular
// values are clamped to [0,1]; values within 1e-12 of 1 give exactly 0.
PrincipalAngleSet principal_angles(const Frame& p, const Frame& q);

// Largest principal angle. Accurate near 0 via the sine route.
double max_angle(const Frame& p, const Frame& q);

// Brute-force max-over-v of min-over-w of the vector angle, evaluated on
// hyperspherical coefficient grids of both subspaces. Test oracle only;
// error is O(1/grid). Guard: grid^s * grid^s <= 1e8.
double minmax_angle_oracle(const Frame& p, const Frame& q, int grid);

// Operator norm of the projector difference; equals sin(max_angle).
double grassmann_distance(const Frame& p, const Frame& q);

// Folding function chi(x) = min(|x|, pi - |x|), even and pi-periodic on
// the reduced interval |x| <= pi; clamped into [0, pi/2].
double chi(double x);

// Seeded standard-normal d x s matrix orthonormalized by QR.
Frame random_frame(Eigen::Index d, Eigen::Index s, std::uint64_t stream_key);

}  // namespace angval

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "angval/geometry.hpp"

namespace angval {

// Nonautonomous system u_{n+1} = A_n u_n given by an index -> matrix rule.
class MatrixSequence {
public:
    MatrixSequence() = default;
    MatrixSequence(Eigen::Index dim, std::function<Eigen::MatrixXd(long)> producer,
                   std::string label);

    Eigen::Index dim() const { return dim_; }
    const std::string& label() const { return label_; }
    Eigen::MatrixXd at(long n) const;

private:
    Eigen::Index dim_ = 0;
    std::function<Eigen::MatrixXd(long)> producer_;
    std::string label_;
};

// Builtin sequences.
MatrixSequence constant_sequence(const Eigen::MatrixXd& a, std::string label = "constant");
MatrixSequence rotation_sequence(double phi);
// T_{phi0} at n = 0 and on [2^(2l-1), 2^(2l)-1], T_{phi1} elsewhere.
MatrixSequence example1_sequence(double phi0, double phi1);
// R = diag(-1,1) on [2*2^l-4, 3*2^l-5], C = diag(1,1/2) elsewhere.
MatrixSequence example2_sequence();
// span(C^(-2^l+2) (1,1)^T): the line that reaches span(1,1) exactly when the
// l-th reflection run starts. Representable for l <= 10.
Frame example2_witness(int ell);
// Variational sequence u_{n+1} = DF(xi_n) u_n along a Henon orbit,
// F(x,y) = (1 + y - a x^2, b x); a transient is discarded first.
MatrixSequence henon_sequence(double a = 1.4, double b = 0.3, long transient = 1000);
// Matrices from the shared text format, one block after another; with
// periodic = true the list repeats, otherwise reading past the end throws.
MatrixSequence from_file_sequence(const std::string& path, bool periodic = false);

// Summands b_j = angle(Phi(j-1,0)V, Phi(j,0)V), j = 1..n, computed on
// re-orthonormalized frames (angles only depend on the subspaces).
std::vector<double> orbit_angles(const MatrixSequence& seq, const Frame& v0, long n);

struct SearchSpec {
    int angle_grid = 720;      // used when (s,d) = (1,2)
    int random_frames = 256;   // otherwise
    bool coordinate_seeds = true;
    std::vector<Eigen::MatrixXd> extra_frames;  // e.g. example2 witnesses
    bool refine = true;
};

struct EstimatorConfig {
    int s = 1;
    std::vector<long> n_ladder = {100, 1000, 10000};
    long k_window = 1000;
    SearchSpec search;
    std::uint64_t seed = 0x5eed;
    int jobs = 1;
};

// Eight finite-horizon estimates. Limit proxies take max/min over the final
// third of the ladder; uniform variants sup/inf over shifts k <= k_window.
// The construction makes the comparison-diagram inequalities hold exactly
// on the common sample set.
struct AngularEstimates {
    double inner_upper = 0.0, inner_lower = 0.0;
    double outer_upper = 0.0, outer_lower = 0.0;
    double uniform_inner_upper = 0.0, uniform_inner_lower = 0.0;
    double uniform_outer_upper = 0.0, uniform_outer_lower = 0.0;

    std::vector<long> ladder;
    std::vector<double> inner_trace;        // sup_V (1/n) a_{1,n}(V)
    std::vector<double> uniform_sup_trace;  // sup_V (1/n) sup_k a_{k+1,k+n}(V)
    std::vector<double> uniform_inf_trace;  // sup_V (1/n) inf_k a_{k+1,k+n}(V)

    Eigen::MatrixXd argmax_outer;           // columns of the maximizing frame
    std::vector<double> argmax_outer_trace; // its (1/n) a_{1,n} per ladder n
};

AngularEstimates estimate_angular_values(const MatrixSequence& seq,
                                         const EstimatorConfig& cfg);

// Equivariance diagnostic for outer maximizers: compares A_eta argmax(eta)
// against argmax(eta+1) of the shifted sequence. Ties in the search are
// resolved toward the propagated frame.
struct ShiftCheckReport {
    std::vector<double> angle_discrepancy;  // per eta = 0..eta_max-1
    std::vector<double> value_discrepancy;
    double max_angle_discrepancy = 0.0;
    double max_value_discrepancy = 0.0;
};

ShiftCheckReport shift_maximizer_check(const MatrixSequence& seq, int s, int eta_max,
                                       const EstimatorConfig& cfg);

}  // namespace angval

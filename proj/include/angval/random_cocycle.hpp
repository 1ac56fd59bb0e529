#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "angval/geometry.hpp"
#include "angval/trajectory.hpp"

namespace angval {

// Seeded drivers for random linear cocycles A(T^{n-1} w) ... A(w).
class CocycleDriver {
public:
    // A_n = T_phi with phi iid uniform on [lo,hi] subset [0, pi/2].
    static CocycleDriver iid_angles(double lo, double hi, std::uint64_t seed);
    // A_n drawn iid from a finite set with the given probabilities.
    static CocycleDriver iid_finite_set(std::vector<Eigen::MatrixXd> matrices,
                                        std::vector<double> probabilities,
                                        std::uint64_t seed);
    // w_{n+1} = w_n + alpha mod 1, A_n = family(w_n); alpha defaults to the
    // golden-ratio conjugate.
    static CocycleDriver torus_rotation(double alpha,
                                        std::function<Eigen::MatrixXd(double)> family,
                                        Eigen::Index dim, std::uint64_t seed,
                                        double omega0 = 0.0);

    Eigen::Index dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& kind() const { return kind_; }

    // Deterministic realization for one replication; same (seed,rep) gives a
    // bit-identical path.
    MatrixSequence sample_path(std::uint64_t rep = 0) const;

private:
    CocycleDriver() = default;
    std::string kind_;
    Eigen::Index dim_ = 0;
    std::uint64_t seed_ = 0;
    double lo_ = 0.0, hi_ = 0.0;           // iid angles
    std::vector<Eigen::MatrixXd> mats_;    // finite set
    std::vector<double> cum_;              // cumulative probabilities
    double alpha_ = 0.0, omega0_ = 0.0;    // torus rotation
    std::function<Eigen::MatrixXd(double)> family_;
};

struct RandomEstimate {
    double value = 0.0;
    double stderr_ = 0.0;  // std of the per-rep means / sqrt(reps)
    long n = 0;
    int reps = 0;
    std::vector<long> ladder;          // inner estimate only
    std::vector<double> trace;         // per-n mean of max_V averages
    std::vector<double> trace_stderr;
    bool monotone_trend = true;        // trace non-increasing within 3 stderr
};

// Birkhoff average of the step angles along the orbit of a fixed subspace,
// averaged over replications.
RandomEstimate birkhoff_outer(const CocycleDriver& driver, const Frame& v0, long n,
                              int reps);

// Finite-horizon inner value: per horizon, the replication average of
// max over the search set of (1/n) a_n(w, V).
RandomEstimate inner_estimate(const CocycleDriver& driver, const EstimatorConfig& cfg,
                              int reps);

// d x d matrix with entries iid uniform(0,1); deterministic in the seed.
Eigen::MatrixXd random_uniform_matrix(Eigen::Index d, std::uint64_t seed);

}  // namespace angval

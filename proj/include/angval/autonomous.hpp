#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "angval/spectral.hpp"
#include "angval/theta2d.hpp"

namespace angval {

enum class BlockMethod { Formula, RealSpectrumZero, OrthogonalRotations, TrajectoryFallback };

const char* to_string(BlockMethod m);

struct AutoThetaOptions {
    double tol_mod_rel = 1e-8;
    Theta1Options theta;
    bool fallback_trajectory = true;  // for Mixed blocks with complex spectrum
    long fallback_horizon = 10000;
    int fallback_angle_grid = 720;    // 2x2 fallback search
    int fallback_frames = 256;        // higher-dimensional fallback search
    std::uint64_t seed = 0x5eed;
};

struct BlockResult {
    double modulus = 0.0;
    BlockKind kind = BlockKind::RealSingle;
    int dim = 0;
    std::optional<NormalForm2D> normal_form;
    std::optional<Theta2DReport> theta_report;
    BlockMethod method = BlockMethod::RealSpectrumZero;
    double theta1 = 0.0;
    std::vector<std::complex<double>> eigenvalues;
};

struct AutoThetaReport {
    int dimension = 0;
    std::vector<BlockResult> blocks;
    bool opposite_reals = false;
    bool eigencond_ok = true;
    double theta1 = 0.0;
    std::vector<std::string> warnings;
};

// First angular value of an invertible matrix: modulus-block decomposition,
// opposite-real test, per-block normal form + four-case formula, with a
// trajectory fallback for blocks violating the simple-complex condition.
AutoThetaReport theta1_autonomous(const Eigen::MatrixXd& a,
                                  const AutoThetaOptions& opts = {});

// Best average rotation of a line under constant iteration with `a`,
// max over a searched set of starting directions at horizon n. Used as the
// Mixed-block fallback and as an independent cross-check of the formula.
double trajectory_theta1_estimate(const Eigen::MatrixXd& a, long n, int angle_grid,
                                  int frames, std::uint64_t seed);

}  // namespace angval

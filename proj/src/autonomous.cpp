#include "angval/autonomous.hpp"

#include <cmath>

#include "angval/errors.hpp"
#include "angval/geometry.hpp"
#include "angval/optimize.hpp"
#include "angval/rng.hpp"

namespace angval {

const char* to_string(BlockMethod m) {
    switch (m) {
        case BlockMethod::Formula: return "formula";
        case BlockMethod::RealSpectrumZero: return "real_spectrum_zero";
        case BlockMethod::OrthogonalRotations: return "orthogonal_rotations";
        case BlockMethod::TrajectoryFallback: return "trajectory_fallback";
    }
    return "?";
}

namespace {

double average_line_rotation(const Eigen::MatrixXd& a, Eigen::VectorXd v, long n) {
    double sum = 0.0;
    v.normalize();
    for (long j = 0; j < n; ++j) {
        Eigen::VectorXd w = a * v;
        w.normalize();
        double c = std::abs(v.dot(w));
        double sgn = v.dot(w) < 0 ? -1.0 : 1.0;
        double s = (v - sgn * w).norm() * (v + sgn * w).norm() / 2.0;
        sum += std::atan2(s, c);
        v.swap(w);
    }
    return sum / static_cast<double>(n);
}

}  // namespace

double trajectory_theta1_estimate(const Eigen::MatrixXd& a, long n, int angle_grid,
                                  int frames, std::uint64_t seed) {
    const Eigen::Index d = a.rows();
    if (d == 2) {
        auto f = [&](double t) {
            return average_line_rotation(a, Eigen::Vector2d(std::cos(t), std::sin(t)), n);
        };
        return grid_then_golden_max(f, 0.0, kPi, angle_grid, 1e-8).value;
    }
    // Forward iteration drifts to the most unstable direction, so generic
    // starts miss maximizers inside invariant subspaces. Seed every
    // eigen-plane (lines within the span of Re v, Im v) and eigen-direction.
    std::vector<Eigen::VectorXd> starts;
    {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
        if (solver.info() == Eigen::Success) {
            for (Eigen::Index i = 0; i < d; ++i) {
                Eigen::VectorXcd v = solver.eigenvectors().col(i);
                if (solver.eigenvalues()(i).imag() > 0.0) {
                    Eigen::VectorXd re = v.real(), im = v.imag();
                    if (re.norm() < 1e-12 || im.norm() < 1e-12) continue;
                    re.normalize();
                    im.normalize();
                    for (int k = 0; k < 32; ++k) {
                        double t = kPi * k / 32;
                        starts.push_back(std::cos(t) * re + std::sin(t) * im);
                    }
                } else if (solver.eigenvalues()(i).imag() == 0.0) {
                    starts.push_back(v.real());
                }
            }
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v(i) = 1.0;
        starts.push_back(v);
    }
    for (int i = 0; i < frames; ++i) {
        rng::Stream st(rng::derive(seed, 0xb10cull, static_cast<std::uint64_t>(i)));
        Eigen::VectorXd v(d);
        for (Eigen::Index k = 0; k < d; ++k) v(k) = st.next_normal();
        starts.push_back(v);
    }
    double best = 0.0;
    Eigen::VectorXd best_v;
    for (const auto& v0 : starts) {
        if (v0.norm() < 1e-12) continue;
        double val = average_line_rotation(a, v0, n);
        if (val > best) {
            best = val;
            best_v = v0.normalized();
        }
    }
    // derivative-free local refinement by plane rotations with shrinking step
    if (best_v.size() == d) {
        double step = 0.5;
        while (step > 1e-6) {
            bool improved = false;
            for (Eigen::Index i = 0; i < d && !improved; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
                    e(i) = 1.0;
                    Eigen::VectorXd cand = (best_v + sgn * step * e).normalized();
                    double val = average_line_rotation(a, cand, n);
                    if (val > best) {
                        best = val;
                        best_v = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step /= 2.0;
        }
    }
    return best;
}

namespace {

bool all_real_spectrum(const ModulusBlock& blk, double radius) {
    for (const auto& v : blk.eigenvalues) {
        if (std::abs(v.imag()) > 1e-7 * radius) return false;
    }
    return true;
}

bool is_orthogonal_up_to_scale(const Eigen::MatrixXd& b, double modulus) {
    Eigen::MatrixXd m = b / modulus;
    Eigen::MatrixXd g = m.transpose() * m;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff() <= 1e-8;
}

}  // namespace

AutoThetaReport theta1_autonomous(const Eigen::MatrixXd& a, const AutoThetaOptions& opts) {
    SpectralDecomposition dec = modulus_blocks(a, opts.tol_mod_rel);

    AutoThetaReport rep;
    rep.dimension = static_cast<int>(a.rows());
    rep.opposite_reals = dec.opposite_reals;
    rep.eigencond_ok = dec.eigencond_ok;

    for (const auto& blk : dec.blocks) {
        BlockResult br;
        br.modulus = blk.modulus;
        br.kind = blk.kind;
        br.dim = static_cast<int>(blk.basis.rank());
        br.eigenvalues = blk.eigenvalues;
        rep.blocks.push_back(std::move(br));
    }

    if (dec.opposite_reals) {
        // a real pair {lambda, -lambda} forces the maximum possible value
        rep.theta1 = kPi / 2.0;
        return rep;
    }

    double best = 0.0;
    for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
        const ModulusBlock& blk = dec.blocks[i];
        BlockResult& br = rep.blocks[i];

        if (all_real_spectrum(blk, dec.spectral_radius)) {
            br.method = BlockMethod::RealSpectrumZero;
            br.theta1 = 0.0;
        } else if (blk.kind == BlockKind::ComplexPair) {
            NormalForm2D nf = normal_form_2x2(blk.block);
            br.normal_form = nf;
            br.theta_report = theta1_normal(nf.rho, nf.phi, opts.theta);
            br.theta1 = br.theta_report->theta1;
            br.method = BlockMethod::Formula;
        } else if (is_orthogonal_up_to_scale(blk.block, blk.modulus)) {
            // sum of plane rotations: the value is the largest folded argument
            double mx = 0.0;
            for (const auto& v : blk.eigenvalues) mx = std::max(mx, chi(std::arg(v)));
            br.theta1 = mx;
            br.method = BlockMethod::OrthogonalRotations;
            rep.warnings.push_back("modulus " + std::to_string(blk.modulus) +
                                   ": equal-modulus block handled as orthogonal rotations");
        } else {
            if (!opts.fallback_trajectory) {
                throw EigencondViolated(
                    "equal-modulus block with non-simple complex spectrum and "
                    "fallback disabled");
            }
            br.theta1 = trajectory_theta1_estimate(blk.block, opts.fallback_horizon,
                                                   opts.fallback_angle_grid,
                                                   opts.fallback_frames, opts.seed);
            br.method = BlockMethod::TrajectoryFallback;
            rep.warnings.push_back("modulus " + std::to_string(blk.modulus) +
                                   ": no exact formula, trajectory estimate (approximate)");
        }
        best = std::max(best, br.theta1);
    }
    rep.theta1 = best;
    return rep;
}

}  // namespace angval

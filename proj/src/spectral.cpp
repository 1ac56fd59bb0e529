#include "angval/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "angval/errors.hpp"

namespace angval {

namespace {

constexpr double kResidualTolRel = 1e-8;
// eigenvalues of a defective chain of length m split by ~eps^(1/m); 1e-7
// absorbs length-2 chains, longer ones are merged by the caller's tol_mod
constexpr double kRealImagTolRel = 1e-7;
constexpr double kOppositeTolRel = 1e-8;

}  // namespace

EigenSet eigen(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("eigen: matrix must be square");
    if (!a.allFinite()) throw ParamRange("eigen: non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw EigenFailure("eigen solver did not converge");
    }
    EigenSet out;
    const Eigen::Index d = a.rows();
    out.values.reserve(d);
    for (Eigen::Index i = 0; i < d; ++i) out.values.push_back(solver.eigenvalues()(i));

    Eigen::MatrixXcd ac = a.cast<std::complex<double>>();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXcd x = solver.eigenvectors().col(i);
        double nx = x.norm();
        if (nx == 0.0) continue;
        double r = (ac * x - solver.eigenvalues()(i) * x).norm() / nx;
        worst = std::max(worst, r);
    }
    out.residual = worst;
    return out;
}

double spectral_radius(const EigenSet& es) {
    double r = 0.0;
    for (const auto& v : es.values) r = std::max(r, std::abs(v));
    return r;
}

double skewness(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("skewness: matrix must be square");
    double r = spectral_radius(eigen(a));
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (r <= 1e-14 * scale) {
        throw ZeroSpectralRadius("skewness undefined: spectral radius is zero");
    }
    Eigen::MatrixXd s = a - a.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
    return svd.singularValues()(0) / (2.0 * r);
}

Eigen::MatrixXd make_normal_matrix(double rho, double phi) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ParamRange("rho must be in (0,1]");
    if (!(phi > 0.0 && phi < kPi)) throw ParamRange("phi must be in (0,pi)");
    Eigen::Matrix2d m;
    double c = std::cos(phi), s = std::sin(phi);
    m << c, -s / rho, rho * s, c;
    return m;
}

const char* to_string(BlockKind k) {
    switch (k) {
        case BlockKind::RealSingle: return "real";
        case BlockKind::ComplexPair: return "complex_pair";
        case BlockKind::Mixed: return "mixed";
    }
    return "?";
}

NormalForm2D normal_form_2x2(const Eigen::Matrix2d& b) {
    const double tr = b(0, 0) + b(1, 1);
    const double det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
    const double disc = tr * tr - 4.0 * det;
    const double scale = std::max(1.0, tr * tr + 4.0 * std::abs(det));
    if (!(disc < -1e-12 * scale)) {
        throw NotComplexPair("2x2 block has (numerically) real spectrum");
    }

    NormalForm2D nf;
    nf.r = std::sqrt(det);
    nf.phi = std::atan2(std::sqrt(-disc) / 2.0, tr / 2.0);  // in (0,pi)

    Eigen::Matrix2d m = b / nf.r;
    Eigen::Matrix2d q = Eigen::Matrix2d::Identity();

    // Givens rotation equalizing the diagonal (trace fixes both to cos(phi)).
    const double u = m(0, 0) - m(1, 1);
    const double w = m(0, 1) + m(1, 0);
    if (std::abs(u) > 0.0 || std::abs(w) > 0.0) {
        double alpha = 0.5 * std::atan2(-u, w);
        Eigen::Matrix2d g;
        g << std::cos(alpha), -std::sin(alpha), std::sin(alpha), std::cos(alpha);
        m = (g.transpose() * m * g).eval();
        q = (q * g).eval();
    }

    // Now m = [c, x; y, c] with x*y = -sin(phi)^2 < 0.
    auto flip = [&]() {  // conjugate by diag(1,-1): negates off-diagonals
        m(0, 1) = -m(0, 1);
        m(1, 0) = -m(1, 0);
        q.col(1) = -q.col(1);
    };
    if (m(1, 0) < 0.0) flip();

    const double sphi = std::sin(nf.phi);
    double rho = m(1, 0) / sphi;
    if (rho > 1.0) {
        // swap basis columns; maps rho -> 1/rho, then restore sign pattern
        m = (Eigen::Matrix2d() << m(1, 1), m(1, 0), m(0, 1), m(0, 0)).finished();
        q.col(0).swap(q.col(1));
        if (m(1, 0) < 0.0) flip();
        rho = m(1, 0) / sphi;
    }
    nf.rho = std::min(rho, 1.0);
    nf.q = q;

    Eigen::Matrix2d rec = nf.r * q * make_normal_matrix(nf.rho, nf.phi) * q.transpose();
    nf.reconstruction_error = (b - rec).cwiseAbs().maxCoeff();
    return nf;
}

namespace {

struct Site {
    std::complex<double> lambda;  // Im >= 0
    int multiplicity = 0;         // complex pair counted once
    bool is_real = false;
};

// Real-arithmetic polynomial annihilating the group's generalized eigenspace:
// product of (X - lambda I) for real sites and (X^2 - 2 Re(lambda) X + |lambda|^2 I)
// for complex pairs, each to its multiplicity.
Eigen::MatrixXd group_polynomial(const Eigen::MatrixXd& a_scaled,
                                 const std::vector<Site>& sites) {
    const Eigen::Index d = a_scaled.rows();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
    for (const auto& s : sites) {
        Eigen::MatrixXd factor;
        if (s.is_real) {
            factor = a_scaled - s.lambda.real() * Eigen::MatrixXd::Identity(d, d);
        } else {
            factor = a_scaled * a_scaled - 2.0 * s.lambda.real() * a_scaled +
                     std::norm(s.lambda) * Eigen::MatrixXd::Identity(d, d);
        }
        for (int k = 0; k < s.multiplicity; ++k) p = (p * factor).eval();
    }
    return p;
}

}  // namespace

SpectralDecomposition modulus_blocks(const Eigen::MatrixXd& a, double tol_mod_rel) {
    if (a.rows() != a.cols()) throw DimensionMismatch("modulus_blocks: square input required");
    const Eigen::Index d = a.rows();
    EigenSet es = eigen(a);

    SpectralDecomposition dec;
    dec.spectral_radius = spectral_radius(es);
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        dec.norm = svd.singularValues()(0);
    }
    const double r = dec.spectral_radius;
    double min_mod = r;
    for (const auto& v : es.values) min_mod = std::min(min_mod, std::abs(v));
    if (r == 0.0 || min_mod <= 1e-12 * r) {
        throw SingularMatrix("matrix is singular within tolerance");
    }
    if (es.residual > kResidualTolRel * std::max(dec.norm, 1e-300)) {
        throw EigenFailure("eigen residual exceeds contract");
    }

    const double tol_imag = kRealImagTolRel * r;
    const double tol_mod = tol_mod_rel * r;

    // canonical eigenvalue list: reals as-is, complex pairs by Im > 0 member
    std::vector<std::complex<double>> vals = es.values;
    std::sort(vals.begin(), vals.end(), [](const auto& x, const auto& y) {
        if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });

    // opposite-sign real pair detection on the raw spectrum
    for (std::size_t i = 0; i < vals.size() && !dec.opposite_reals; ++i) {
        if (std::abs(vals[i].imag()) > kOppositeTolRel * r) continue;
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
            if (std::abs(vals[j].imag()) > kOppositeTolRel * r) continue;
            if (std::abs(vals[i].real() + vals[j].real()) <= kOppositeTolRel * r) {
                dec.opposite_reals = true;
                break;
            }
        }
    }

    // group by modulus (chain clustering on the sorted list)
    std::vector<std::vector<std::complex<double>>> groups;
    for (const auto& v : vals) {
        if (!groups.empty() && std::abs(std::abs(groups.back().back()) - std::abs(v)) <= tol_mod) {
            groups.back().push_back(v);
        } else {
            groups.push_back({v});
        }
    }

    Eigen::MatrixXd a_scaled = a / r;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);  // for the fast paths

    for (const auto& g : groups) {
        ModulusBlock blk;
        blk.eigenvalues = g;
        double mod = 0.0;
        for (const auto& v : g) mod += std::abs(v);
        blk.modulus = mod / static_cast<double>(g.size());

        // collect sites: reals individually, complex conjugates paired
        std::vector<Site> sites;
        int real_count = 0, pair_count = 0;
        std::vector<std::complex<double>> pending;
        for (const auto& v : g) {
            if (std::abs(v.imag()) <= tol_imag) {
                ++real_count;
                bool merged = false;
                for (auto& s : sites) {
                    if (s.is_real && std::abs(s.lambda.real() - v.real()) <= tol_imag) {
                        ++s.multiplicity;
                        merged = true;
                        break;
                    }
                }
                if (!merged) sites.push_back({std::complex<double>(v.real(), 0.0), 1, true});
            } else if (v.imag() > 0.0) {
                ++pair_count;
                bool merged = false;
                for (auto& s : sites) {
                    if (!s.is_real && std::abs(s.lambda - v) <= tol_imag) {
                        ++s.multiplicity;
                        merged = true;
                        break;
                    }
                }
                if (!merged) sites.push_back({v, 1, false});
            }
            // Im < 0 members are implied by their conjugates
        }

        Eigen::Index dim = 0;
        for (const auto& s : sites) dim += (s.is_real ? 1 : 2) * s.multiplicity;

        // kind
        bool all_real = pair_count == 0;
        bool single_real_site = all_real && sites.size() == 1;
        if (single_real_site) {
            blk.kind = BlockKind::RealSingle;
        } else if (!all_real && sites.size() == 1 && !sites[0].is_real &&
                   sites[0].multiplicity == 1) {
            blk.kind = BlockKind::ComplexPair;
        } else {
            blk.kind = BlockKind::Mixed;
        }
        if (!all_real && blk.kind != BlockKind::ComplexPair) dec.eigencond_ok = false;

        // invariant subspace basis
        Eigen::MatrixXd basis;
        if (blk.kind == BlockKind::ComplexPair) {
            // locate the solver eigenvector of the pair member
            Eigen::Index best = -1;
            double bestdist = 1e300;
            for (Eigen::Index i = 0; i < d; ++i) {
                double dist = std::abs(solver.eigenvalues()(i) - sites[0].lambda);
                if (solver.eigenvalues()(i).imag() > 0.0 && dist < bestdist) {
                    bestdist = dist;
                    best = i;
                }
            }
            Eigen::VectorXcd v = solver.eigenvectors().col(best);
            basis.resize(d, 2);
            basis.col(0) = v.real();
            basis.col(1) = v.imag();
        } else if (blk.kind == BlockKind::RealSingle && sites[0].multiplicity == 1) {
            Eigen::Index best = -1;
            double bestdist = 1e300;
            for (Eigen::Index i = 0; i < d; ++i) {
                double dist = std::abs(solver.eigenvalues()(i) - sites[0].lambda);
                if (dist < bestdist) {
                    bestdist = dist;
                    best = i;
                }
            }
            Eigen::VectorXcd v = solver.eigenvectors().col(best);
            Eigen::VectorXd rv =
                v.real().norm() >= v.imag().norm() ? Eigen::VectorXd(v.real())
                                                   : Eigen::VectorXd(v.imag());
            basis = rv;
        } else {
            // generalized eigenspace of the whole group via the shifted-kernel
            // route: the `dim` smallest right singular directions of p(A/r)
            Eigen::MatrixXd p = group_polynomial(a_scaled, sites);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(p, Eigen::ComputeFullV);
            basis = svd.matrixV().rightCols(dim);
        }

        Frame q = orthonormalize(basis);
        blk.block = q.columns().transpose() * a * q.columns();
        blk.invariance_residual =
            (a * q.columns() - q.columns() * blk.block).cwiseAbs().maxCoeff();
        blk.basis = q;
        dec.blocks.push_back(std::move(blk));
    }

    Eigen::Index total = 0;
    for (const auto& b : dec.blocks) total += b.basis.rank();
    if (total != d) throw EigenFailure("block dimensions do not sum to d");
    return dec;
}

namespace {

std::string format_complex_short(const std::complex<double>& v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", v.real(), v.imag());
    return buf;
}

}  // namespace

EigencondReport check_eigencond(const SpectralDecomposition& dec) {
    EigencondReport rep;
    rep.opposite_reals = dec.opposite_reals;
    for (const auto& blk : dec.blocks) {
        bool has_complex = false;
        for (const auto& v : blk.eigenvalues) {
            if (std::abs(v.imag()) > kRealImagTolRel * dec.spectral_radius) {
                has_complex = true;
                break;
            }
        }
        if (has_complex && blk.kind != BlockKind::ComplexPair) {
            rep.ok = false;
            std::string who;
            for (const auto& v : blk.eigenvalues) {
                if (!who.empty()) who += ", ";
                who += format_complex_short(v);
            }
            rep.violations.push_back(
                "modulus " + std::to_string(blk.modulus) +
                ": complex eigenvalue not simple/alone in its modulus class {" + who + "}");
        }
    }
    return rep;
}

}  // namespace angval

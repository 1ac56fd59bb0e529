#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "angval/geometry.hpp"

namespace angval {

struct EigenSet {
    std::vector<std::complex<double>> values;  // with multiplicity, conjugate-paired
    double residual = 0.0;  // max ||(A - lambda I) x|| / ||x|| over eigenpairs
};

// Dense nonsymmetric eigensolve (Schur-based). Residual contract:
// residual <= 1e-8 * ||A||.
EigenSet eigen(const Eigen::MatrixXd& a);

double spectral_radius(const EigenSet& es);

// skew(A) = ||A - A^T|| / (2 r(A)); invariant under scaling and orthogonal
// similarity. Throws ZeroSpectralRadius for (numerically) nilpotent input.
double skewness(const Eigen::MatrixXd& a);

// A(rho, phi) = [cos phi, -sin phi / rho; rho sin phi, cos phi],
// rho in (0,1], phi in (0,pi); eigenvalues e^{+-i phi}, det 1.
Eigen::MatrixXd make_normal_matrix(double rho, double phi);

struct NormalForm2D {
    double r = 0.0;      // modulus of the eigenvalue pair
    double rho = 0.0;    // in (0,1]
    double phi = 0.0;    // |arg lambda| in (0,pi)
    Eigen::Matrix2d q;   // orthogonal, B = r * q * A(rho,phi) * q^T
    double reconstruction_error = 0.0;
};

// Orthogonal similarity + scaling putting a 2x2 block with a complex pair
// into the normal form. rho <= 1 is enforced by a basis permutation.
NormalForm2D normal_form_2x2(const Eigen::Matrix2d& b);

enum class BlockKind { RealSingle, ComplexPair, Mixed };

const char* to_string(BlockKind k);

struct ModulusBlock {
    Frame basis;                 // d x d_i orthonormal, invariant: A Q = Q B
    Eigen::MatrixXd block;       // B = Q^T A Q
    double modulus = 0.0;
    BlockKind kind = BlockKind::RealSingle;
    std::vector<std::complex<double>> eigenvalues;
    double invariance_residual = 0.0;  // ||A Q - Q B||_max
};

struct SpectralDecomposition {
    std::vector<ModulusBlock> blocks;  // sorted by descending modulus
    bool eigencond_ok = true;    // every complex eigenvalue simple + alone in modulus
    bool opposite_reals = false; // some real pair lambda, -lambda
    double spectral_radius = 0.0;
    double norm = 0.0;           // ||A||
};

// Modulus-grouped invariant subspace decomposition with orthonormal bases.
// tol_mod_rel groups eigenvalue moduli relative to the spectral radius;
// clusters violating the simple-complex condition merge into Mixed blocks.
SpectralDecomposition modulus_blocks(const Eigen::MatrixXd& a,
                                     double tol_mod_rel = 1e-8);

struct EigencondReport {
    bool ok = true;
    bool opposite_reals = false;
    std::vector<std::string> violations;
};

EigencondReport check_eigencond(const SpectralDecomposition& dec);

}  // namespace angval

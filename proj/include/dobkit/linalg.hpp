#pragma once

#include <complex>
#include <vector>

#include "dobkit/matrix.hpp"

namespace dobkit {

/// Raised when an iterative kernel fails to converge or a linear system
/// is numerically singular.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Extremal eigenvalues of a symmetric positive definite matrix.
struct SpectrumSummary {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct HurwitzResult {
    bool hurwitz = false;
    double margin = 0.0;  // max real part over the spectrum
};

struct SymEigen {
    Vec values;   // ascending
    Mat vectors;  // columns, same order as values
};

/// Solves A x = b by LU with partial pivoting. Throws NumericError on a
/// (numerically) singular pivot.
Vec lu_solve(Mat A, Vec b);

/// Column-wise lu_solve for a matrix right-hand side.
Mat lu_solve(const Mat& A, const Mat& B);

/// Inverse of a unit-upper-triangular matrix by back-substitution.
/// The result is again unit upper triangular.
Mat inverse_unit_upper(const Mat& U);

/// All eigenvalues of a general real square matrix: Householder reduction
/// to Hessenberg form followed by shifted QR iteration with deflation.
/// Iteration cap 100*n; non-convergence throws NumericError.
std::vector<std::complex<double>> general_eigenvalues(const Mat& A);

/// True iff every eigenvalue has a strictly negative real part;
/// margin reports the largest real part found.
HurwitzResult is_hurwitz(const Mat& A);

/// Full eigensystem of a symmetric matrix by cyclic Jacobi rotations,
/// run until the off-diagonal norm drops below 1e-12 (relative).
/// Rejects inputs that are asymmetric beyond 1e-12.
SymEigen jacobi_eigensystem(Mat A);

/// Extremal eigenvalues of a symmetric matrix (Jacobi).
SpectrumSummary sym_extremal_eigs(const Mat& P);

/// Solves A^T P + P A = -I for symmetric positive definite P by assembling
/// the n^2 x n^2 Kronecker system and solving it densely. Requires A
/// Hurwitz (checked); the residual is verified below 1e-10.
Mat solve_lyapunov(const Mat& A);

/// Induced 2-norm: sqrt of the largest eigenvalue of A^T A.
double spectral_norm(const Mat& A);

}  // namespace dobkit

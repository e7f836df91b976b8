#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace weylforge {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cd kI{0.0, 1.0};

// Spectral norm; 0 for empty matrices.
double norm2(const Mat& a);

Mat hermitian_part(const Mat& a);
// (a - a*) / (2i)
Mat imag_part(const Mat& a);

double min_eigenvalue_hermitian(const Mat& h);

// Singular values below rel_tol * sigma_max count as zero.
int numerical_rank(const Mat& a, double rel_tol = 1e-10);

// Orthonormal basis of ker(a), computed from the SVD.
Mat null_space(const Mat& a, double rel_tol = 1e-10);

// Orthonormal basis of ran(a).
Mat range_basis(const Mat& a, double rel_tol = 1e-10);

// Largest principal-angle sine between two column spans (orthonormalized
// internally); 1 when the dimensions differ.
double subspace_distance(const Mat& a, const Mat& b, double rel_tol = 1e-10);

struct Inertia {
    int positive = 0;
    int negative = 0;
    int zero = 0;
};

Inertia inertia(const Mat& h, double rel_tol = 1e-10);

// 2-norm condition number; infinity when singular or non-square.
double condition_number(const Mat& a);

struct SolveResult {
    Mat x;
    double cond = 0.0;
};

// QR solve of a square system; cond is taken after row equilibration.
SolveResult qr_solve(const Mat& a, const Mat& rhs);

Mat identity(int n);

// Rows [r0, r0+nr) and columns [c0, c0+nc).
inline Mat block(const Mat& a, int r0, int nr, int c0, int nc) { return a.block(r0, c0, nr, nc); }

Mat select_rows(const Mat& a, const std::vector<int>& rows);
Mat select_cols(const Mat& a, const std::vector<int>& cols);

}  // namespace weylforge

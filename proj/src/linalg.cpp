#include "weylforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weylforge {

double norm2(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat imag_part(const Mat& a) { return (a - a.adjoint()) / (2.0 * kI); }

double min_eigenvalue_hermitian(const Mat& h) {
    if (h.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

int numerical_rank(const Mat& a, double rel_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

Mat null_space(const Mat& a, double rel_tol) {
    const int n = static_cast<int>(a.cols());
    if (a.rows() == 0) return identity(n);
    if (n == 0) return Mat(0, 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const int r = numerical_rank(a, rel_tol);
    return svd.matrixV().rightCols(n - r);
}

Mat range_basis(const Mat& a, double rel_tol) {
    if (a.cols() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const int r = numerical_rank(a, rel_tol);
    return svd.matrixU().leftCols(r);
}

double subspace_distance(const Mat& a, const Mat& b, double rel_tol) {
    Mat qa = range_basis(a, rel_tol);
    Mat qb = range_basis(b, rel_tol);
    if (qa.cols() != qb.cols()) return 1.0;
    if (qa.cols() == 0) return 0.0;
    Mat resid = qb - qa * (qa.adjoint() * qb);
    return norm2(resid);
}

Inertia inertia(const Mat& h, double rel_tol) {
    Inertia out;
    if (h.size() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > rel_tol * scale) ++out.positive;
        else if (ev(i) < -rel_tol * scale) ++out.negative;
        else ++out.zero;
    }
    return out;
}

double condition_number(const Mat& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    if (a.size() == 0) return 1.0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

SolveResult qr_solve(const Mat& a, const Mat& rhs) {
    SolveResult out;
    if (a.rows() == 0) {
        out.x = Mat(0, rhs.cols());
        out.cond = 1.0;
        return out;
    }
    // rows are equilibrated first; the solution is unchanged
    Mat as = a, bs = rhs;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        const double n = a.row(r).norm();
        if (n > 0.0) {
            as.row(r) /= n;
            bs.row(r) /= n;
        }
    }
    out.cond = condition_number(as);
    out.x = as.colPivHouseholderQr().solve(bs);
    return out;
}

Mat identity(int n) { return Mat::Identity(n, n); }

Mat select_rows(const Mat& a, const std::vector<int>& rows) {
    Mat out(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
    return out;
}

Mat select_cols(const Mat& a, const std::vector<int>& cols) {
    Mat out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
    return out;
}

}  // namespace weylforge

#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace dobkit {

using Vec = std::vector<double>;

/// Dense row-major matrix. Sized for desk-scale control problems
/// (dimensions in the tens), not for large-scale linear algebra.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0);
    Mat(int rows, int cols, std::initializer_list<double> entries);

    static Mat identity(int n);
    static Mat diag(const Vec& d);
    static Mat row(const Vec& v);
    static Mat col(const Vec& v);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    Mat transpose() const;
    double max_abs() const;
    double frobenius() const;
    bool all_finite() const;

    Mat& operator+=(const Mat& other);
    Mat& operator-=(const Mat& other);
    Mat& operator*=(double s);

    /// Writes `block` with its top-left corner at (r0, c0).
    void set_block(int r0, int c0, const Mat& block);
    Mat block(int r0, int c0, int nrows, int ncols) const;

    Vec extract_row(int r) const;
    Vec extract_col(int c) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, Mat a);
Vec operator*(const Mat& a, const Vec& x);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double max_abs(const Vec& v);
Vec& axpy(Vec& y, double alpha, const Vec& x);  // y += alpha*x
Vec scaled(Vec v, double s);
Vec concat(const Vec& a, const Vec& b);

/// i-th standard basis vector (1-based index, matching control notation).
Vec unit_vec(int n, int i);

/// Up-shift matrix: ones on the superdiagonal, zeros elsewhere.
Mat up_shift(int n);

/// Companion input/shift pair: the n-by-n up-shift matrix together with
/// the n-by-1 last-entry selector.
struct CompanionPair {
    Mat A;
    Mat B;
};
CompanionPair companion_pair(int n);

/// Stacks C, C*A, ..., C*A^(j-1) for the up-shift A of matching width.
Mat row_power_stack(const Mat& C, int j);

/// Unit-upper-triangular Toeplitz matrix of the Q-filter denominator:
/// entry (r, r+k) is a[k] * tau^k / a[0]. Determinant is exactly 1.
Mat qfilter_T(const Vec& a, double tau);

/// Q-filter numerator row: [1, c1*tau/a0, ..., c_{l-m}*tau^{l-m}/a0, 0...0]
/// with m-1 trailing zeros.
Mat qfilter_C(double a0, const Vec& c, double tau, int l, int m);

}  // namespace dobkit

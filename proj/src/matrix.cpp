#include "dobkit/matrix.hpp"

#include <cmath>

namespace dobkit {

namespace {

void check_same_shape(const Mat& a, const Mat& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
}

}  // namespace

Mat::Mat(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimension");
    a_.assign(static_cast<size_t>(rows) * cols, fill);
}

Mat::Mat(int rows, int cols, std::initializer_list<double> entries) : Mat(rows, cols) {
    if (entries.size() != a_.size()) throw std::invalid_argument("Mat: entry count mismatch");
    std::copy(entries.begin(), entries.end(), a_.begin());
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

Mat Mat::row(const Vec& v) {
    Mat m(1, static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) m(0, static_cast<int>(i)) = v[i];
    return m;
}

Mat Mat::col(const Vec& v) {
    Mat m(static_cast<int>(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
    return m;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

double Mat::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

bool Mat::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

Mat& Mat::operator+=(const Mat& other) {
    check_same_shape(*this, other, "Mat::operator+=");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& other) {
    check_same_shape(*this, other, "Mat::operator-=");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

void Mat::set_block(int r0, int c0, const Mat& block) {
    if (r0 < 0 || c0 < 0 || r0 + block.rows() > rows_ || c0 + block.cols() > cols_)
        throw std::invalid_argument("Mat::set_block: block exceeds bounds");
    for (int r = 0; r < block.rows(); ++r)
        for (int c = 0; c < block.cols(); ++c) (*this)(r0 + r, c0 + c) = block(r, c);
}

Mat Mat::block(int r0, int c0, int nrows, int ncols) const {
    if (r0 < 0 || c0 < 0 || r0 + nrows > rows_ || c0 + ncols > cols_)
        throw std::invalid_argument("Mat::block: region exceeds bounds");
    Mat b(nrows, ncols);
    for (int r = 0; r < nrows; ++r)
        for (int c = 0; c < ncols; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
    return b;
}

Vec Mat::extract_row(int r) const {
    Vec v(cols_);
    for (int c = 0; c < cols_; ++c) v[c] = (*this)(r, c);
    return v;
}

Vec Mat::extract_col(int c) const {
    Vec v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

Mat operator+(Mat a, const Mat& b) {
    a += b;
    return a;
}

Mat operator-(Mat a, const Mat& b) {
    a -= b;
    return a;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("Mat::operator*: inner dimension mismatch");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Mat operator*(double s, Mat a) {
    a *= s;
    return a;
}

Vec operator*(const Mat& a, const Vec& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw std::invalid_argument("Mat*Vec: dimension mismatch");
    Vec y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vec& axpy(Vec& y, double alpha, const Vec& x) {
    if (y.size() != x.size()) throw std::invalid_argument("axpy: size mismatch");
    for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
    return y;
}

Vec scaled(Vec v, double s) {
    for (double& x : v) x *= s;
    return v;
}

Vec concat(const Vec& a, const Vec& b) {
    Vec r;
    r.reserve(a.size() + b.size());
    r.insert(r.end(), a.begin(), a.end());
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

Vec unit_vec(int n, int i) {
    if (i < 1 || i > n) throw std::invalid_argument("unit_vec: index out of range");
    Vec v(n, 0.0);
    v[i - 1] = 1.0;
    return v;
}

Mat up_shift(int n) {
    if (n < 1) throw std::invalid_argument("up_shift: dimension must be positive");
    Mat m(n, n);
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
    return m;
}

CompanionPair companion_pair(int n) {
    if (n < 1) throw std::invalid_argument("companion_pair: dimension must be positive");
    return {up_shift(n), Mat::col(unit_vec(n, n))};
}

Mat row_power_stack(const Mat& C, int j) {
    if (C.rows() != 1) throw std::invalid_argument("row_power_stack: C must be a row vector");
    if (j < 1) throw std::invalid_argument("row_power_stack: power count must be positive");
    const int n = C.cols();
    Mat stack(j, n);
    Vec row = C.extract_row(0);
    for (int k = 0; k < j; ++k) {
        for (int c = 0; c < n; ++c) stack(k, c) = row[c];
        // row <- row * A  (right-multiplying by the up-shift shifts entries right)
        Vec next(n, 0.0);
        for (int c = 1; c < n; ++c) next[c] = row[c - 1];
        row = std::move(next);
    }
    return stack;
}

Mat qfilter_T(const Vec& a, double tau) {
    const int l = static_cast<int>(a.size());
    if (l < 1) throw std::invalid_argument("qfilter_T: empty coefficient list");
    for (double ai : a)
        if (!(ai > 0.0)) throw std::invalid_argument("qfilter_T: coefficients must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("qfilter_T: tau must be positive");
    Mat T(l, l);
    Vec pow_tau(l, 1.0);
    for (int k = 1; k < l; ++k) pow_tau[k] = pow_tau[k - 1] * tau;
    for (int r = 0; r < l; ++r)
        for (int k = 0; r + k < l; ++k) T(r, r + k) = a[k] * pow_tau[k] / a[0];
    return T;
}

Mat qfilter_C(double a0, const Vec& c, double tau, int l, int m) {
    if (!(a0 > 0.0)) throw std::invalid_argument("qfilter_C: a0 must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("qfilter_C: tau must be positive");
    if (m < 1 || l < m) throw std::invalid_argument("qfilter_C: need l >= m >= 1");
    if (static_cast<int>(c.size()) != l - m)
        throw std::invalid_argument("qfilter_C: numerator coefficient count must be l - m");
    Mat C(1, l);
    C(0, 0) = 1.0;
    double pow_tau = 1.0;
    for (int k = 1; k <= l - m; ++k) {
        pow_tau *= tau;
        C(0, k) = c[k - 1] * pow_tau / a0;
    }
    return C;
}

}  // namespace dobkit

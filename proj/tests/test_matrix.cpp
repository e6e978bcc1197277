#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dobkit/linalg.hpp"
#include "dobkit/matrix.hpp"
#include "dobkit/rng.hpp"

using namespace dobkit;

namespace {

// Closed-form eigenvalues of a symmetric 2x2.
std::pair<double, double> eig2(double a, double b, double d) {
    const double m = 0.5 * (a + d);
    const double r = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    return {m - r, m + r};
}

// Closed-form extremal eigenvalues of a symmetric 3x3 (trigonometric form).
std::pair<double, double> eig3_extremes(const Mat& A) {
    const double p1 = A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2);
    const double q = (A(0, 0) + A(1, 1) + A(2, 2)) / 3.0;
    const double p2 = (A(0, 0) - q) * (A(0, 0) - q) + (A(1, 1) - q) * (A(1, 1) - q) +
                      (A(2, 2) - q) * (A(2, 2) - q) + 2.0 * p1;
    if (p2 < 1e-300) return {q, q};
    const double p = std::sqrt(p2 / 6.0);
    Mat B = A;
    for (int i = 0; i < 3; ++i) B(i, i) -= q;
    B *= 1.0 / p;
    const double detB = B(0, 0) * (B(1, 1) * B(2, 2) - B(1, 2) * B(2, 1)) -
                        B(0, 1) * (B(1, 0) * B(2, 2) - B(1, 2) * B(2, 0)) +
                        B(0, 2) * (B(1, 0) * B(2, 1) - B(1, 1) * B(2, 0));
    double rr = std::clamp(detB / 2.0, -1.0, 1.0);
    const double phi = std::acos(rr) / 3.0;
    const double lmax = q + 2.0 * p * std::cos(phi);
    const double lmin = q + 2.0 * p * std::cos(phi + 2.0943951023931953);
    return {lmin, lmax};
}

Mat random_symmetric(int n, Rng& rng) {
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.uniform(-2.0, 2.0);
            A(i, j) = v;
            A(j, i) = v;
        }
    return A;
}

}  // namespace

TEST_CASE("companion pair matches the displayed block form") {
    {
        const auto [A, B] = companion_pair(1);
        CHECK(A(0, 0) == 0.0);
        CHECK(B(0, 0) == 1.0);
    }
    {
        const auto [A, B] = companion_pair(2);
        CHECK(A(0, 0) == 0.0);
        CHECK(A(0, 1) == 1.0);
        CHECK(A(1, 0) == 0.0);
        CHECK(A(1, 1) == 0.0);
        CHECK(B(0, 0) == 0.0);
        CHECK(B(1, 0) == 1.0);
    }
    {
        const auto [A, B] = companion_pair(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(A(i, j) == ((j == i + 1) ? 1.0 : 0.0));
        CHECK(B(0, 0) == 0.0);
        CHECK(B(1, 0) == 0.0);
        CHECK(B(2, 0) == 1.0);
    }
    CHECK_THROWS_AS(companion_pair(0), std::invalid_argument);
}

TEST_CASE("row power stack") {
    {
        const Mat M = row_power_stack(Mat::row({1.0, 0.0}), 1);
        CHECK(M.rows() == 1);
        CHECK(M(0, 0) == 1.0);
        CHECK(M(0, 1) == 0.0);
    }
    {
        const Mat M = row_power_stack(Mat::row({1.0, 0.0}), 2);
        CHECK(M(0, 0) == 1.0);
        CHECK(M(0, 1) == 0.0);
        CHECK(M(1, 0) == 0.0);
        CHECK(M(1, 1) == 1.0);
    }
    {
        const Mat M = row_power_stack(Mat::row({1.0, 2.0, 0.0}), 2);
        CHECK(M(1, 0) == 0.0);
        CHECK(M(1, 1) == 1.0);
        CHECK(M(1, 2) == 2.0);
    }
    CHECK_THROWS_AS(row_power_stack(Mat(2, 2), 1), std::invalid_argument);
    CHECK_THROWS_AS(row_power_stack(Mat::row({1.0}), 0), std::invalid_argument);
}

TEST_CASE("filter denominator matrix T") {
    {
        const Mat T = qfilter_T({2.0}, 0.7);
        CHECK(T.rows() == 1);
        CHECK(T(0, 0) == 1.0);
    }
    {
        const Mat T = qfilter_T({2.0, 4.0}, 0.5);
        CHECK(T(0, 0) == doctest::Approx(1.0));
        CHECK(T(0, 1) == doctest::Approx(1.0));
        CHECK(T(1, 0) == 0.0);
        CHECK(T(1, 1) == doctest::Approx(1.0));
    }
    {
        const Mat T = qfilter_T({1.0, 1.0, 1.0}, 1.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(T(i, j) == (j >= i ? 1.0 : 0.0));
    }
    CHECK_THROWS_AS(qfilter_T({0.0, 1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(qfilter_T({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("filter numerator row C") {
    {
        const Mat C = qfilter_C(1.0, {}, 0.3, 3, 3);
        CHECK(C(0, 0) == 1.0);
        CHECK(C(0, 1) == 0.0);
        CHECK(C(0, 2) == 0.0);
    }
    {
        const Mat C = qfilter_C(2.0, {3.0}, 0.5, 3, 2);
        CHECK(C(0, 0) == 1.0);
        CHECK(C(0, 1) == doctest::Approx(0.75));
        CHECK(C(0, 2) == 0.0);
    }
    {
        const Mat C = qfilter_C(1.0, {1.0}, 1.0, 2, 1);
        CHECK(C(0, 0) == 1.0);
        CHECK(C(0, 1) == 1.0);
    }
    CHECK_THROWS_AS(qfilter_C(1.0, {1.0, 2.0}, 1.0, 3, 3), std::invalid_argument);
}

TEST_CASE("unit upper triangular structure of T and its inverse") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int l = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
        Vec a(l);
        for (double& ai : a) ai = rng.uniform(0.1, 5.0);
        const double tau = rng.uniform(0.05, 3.0);
        const Mat T = qfilter_T(a, tau);
        // Unit diagonal means determinant exactly 1.
        for (int i = 0; i < l; ++i) CHECK(T(i, i) == 1.0);
        const Mat Tinv = inverse_unit_upper(T);
        for (int i = 0; i < l; ++i) {
            CHECK(Tinv(i, i) == 1.0);
            for (int j = 0; j < i; ++j) CHECK(Tinv(i, j) == 0.0);
        }
        const Mat I = T * Tinv;
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j)
                CHECK(std::abs(I(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("banded tau structure commutes with the scaling diagonals") {
    // Gamma_tau diag(tau^-1..tau^-j) = diag(tau^-1..tau^-i) Gamma_1.
    Rng rng(11);
    for (double tau : {0.1, 0.5, 2.0}) {
        for (int trial = 0; trial < 10; ++trial) {
            const int j = 2 + static_cast<int>(rng.uniform(0.0, 5.0));
            const int i = 1 + static_cast<int>(rng.uniform(0.0, static_cast<double>(j - 1)));
            Vec gamma(j);
            for (double& gm : gamma) gm = rng.uniform(-3.0, 3.0);
            Mat Gt(i, j), G1(i, j);
            for (int r = 0; r < i; ++r)
                for (int c = r; c < j; ++c) {
                    Gt(r, c) = gamma[c - r] * std::pow(tau, c - r);
                    G1(r, c) = gamma[c - r];
                }
            Vec dj(j), di(i);
            for (int k = 0; k < j; ++k) dj[k] = std::pow(tau, -(k + 1));
            for (int k = 0; k < i; ++k) di[k] = std::pow(tau, -(k + 1));
            const Mat lhs = Gt * Mat::diag(dj);
            const Mat rhs = Mat::diag(di) * G1;
            for (int r = 0; r < i; ++r)
                for (int c = 0; c < j; ++c)
                    CHECK(std::abs(lhs(r, c) - rhs(r, c)) <
                          1e-12 * std::max(1.0, std::abs(rhs(r, c))));
        }
    }
}

TEST_CASE("lyapunov solve on hand fixtures") {
    {
        const Mat P = solve_lyapunov(Mat(1, 1, {-1.0}));
        CHECK(P(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        const Mat P = solve_lyapunov(Mat(2, 2, {0.0, 1.0, -2.0, -3.0}));
        CHECK(P(0, 0) == doctest::Approx(1.25).epsilon(1e-12));
        CHECK(P(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(P(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(P(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
    }
    {
        Mat A = Mat::identity(3);
        A *= -1.0;
        const Mat P = solve_lyapunov(A);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(P(i, j) == doctest::Approx(i == j ? 0.5 : 0.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(solve_lyapunov(Mat(2, 2, {0.0, 1.0, 0.0, 0.0})), NumericError);
}

TEST_CASE("lyapunov residual below 1e-10 and energy decreasing along the flow") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        // Random Hurwitz matrix: negative-definite diagonal plus a small skew part.
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-0.5, 0.5);
        for (int i = 0; i < n; ++i) A(i, i) -= 2.0;
        const Mat P = solve_lyapunov(A);
        const Mat R = A.transpose() * P + P * A + Mat::identity(n);
        CHECK(R.max_abs() < 1e-10);

        // d/dt x^T P x along xdot = Ax equals -||x||^2; centered difference.
        for (int probe = 0; probe < 100; ++probe) {
            Vec x(n);
            for (double& xi : x) xi = rng.uniform(-1.0, 1.0);
            const double h = 1e-6;
            const Vec ax = A * x;
            Vec xp = x, xm = x;
            axpy(xp, h, ax);
            axpy(xm, -h, ax);
            const double vp = dot(xp, P * xp);
            const double vm = dot(xm, P * xm);
            const double deriv = (vp - vm) / (2.0 * h);
            CHECK(deriv == doctest::Approx(-dot(x, x)).epsilon(1e-5));
            CHECK(deriv < 0.0);
        }
    }
}

TEST_CASE("symmetric extremal eigenvalues") {
    {
        const auto s = sym_extremal_eigs(Mat::diag({1.0, 4.0}));
        CHECK(s.lambda_min == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.lambda_max == doctest::Approx(4.0).epsilon(1e-12));
    }
    {
        const auto s = sym_extremal_eigs(Mat(2, 2, {2.0, 1.0, 1.0, 2.0}));
        CHECK(s.lambda_min == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.lambda_max == doctest::Approx(3.0).epsilon(1e-12));
    }
    {
        Mat P = Mat::identity(3);
        P *= 0.5;
        const auto s = sym_extremal_eigs(P);
        CHECK(s.lambda_min == doctest::Approx(0.5));
        CHECK(s.lambda_max == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(sym_extremal_eigs(Mat(2, 2, {0.0, 1.0, 0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("jacobi agrees with closed forms on random symmetric matrices") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        Mat A2 = random_symmetric(2, rng);
        const auto [lo2, hi2] = eig2(A2(0, 0), A2(0, 1), A2(1, 1));
        const auto s2 = sym_extremal_eigs(A2);
        CHECK(s2.lambda_min == doctest::Approx(lo2).epsilon(1e-10));
        CHECK(s2.lambda_max == doctest::Approx(hi2).epsilon(1e-10));

        Mat A3 = random_symmetric(3, rng);
        const auto [lo3, hi3] = eig3_extremes(A3);
        const auto s3 = sym_extremal_eigs(A3);
        CHECK(s3.lambda_min == doctest::Approx(lo3).epsilon(1e-9));
        CHECK(s3.lambda_max == doctest::Approx(hi3).epsilon(1e-9));
    }
}

TEST_CASE("hurwitz verdicts") {
    {
        const auto h = is_hurwitz(Mat(2, 2, {0.0, 1.0, -2.0, -3.0}));
        CHECK(h.hurwitz);
        CHECK(h.margin == doctest::Approx(-1.0).epsilon(1e-9));
    }
    {
        const auto h = is_hurwitz(Mat(2, 2, {0.0, 1.0, 0.0, 0.0}));
        CHECK_FALSE(h.hurwitz);
        CHECK(std::abs(h.margin) < 1e-9);
    }
    {
        Mat A = Mat::identity(2);
        A *= -1.0;
        const auto h = is_hurwitz(A);
        CHECK(h.hurwitz);
        CHECK(h.margin == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("general eigenvalues recover known companion spectra") {
    // Companion matrix of (s+1)(s+2)(s+3)(s+4): roots -1..-4.
    const Vec coeffs = {24.0, 50.0, 35.0, 10.0};  // monic, ascending
    Mat A(4, 4);
    for (int i = 0; i + 1 < 4; ++i) A(i, i + 1) = 1.0;
    for (int j = 0; j < 4; ++j) A(3, j) = -coeffs[j];
    auto eigs = general_eigenvalues(A);
    std::vector<double> re;
    for (const auto& e : eigs) {
        CHECK(std::abs(e.imag()) < 1e-8);
        re.push_back(e.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-4.0).epsilon(1e-8));
    CHECK(re[1] == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(re[2] == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(re[3] == doctest::Approx(-1.0).epsilon(1e-8));

    // Complex pair: s^2 + 2s + 5 has roots -1 +- 2i.
    Mat B(2, 2, {0.0, 1.0, -5.0, -2.0});
    auto be = general_eigenvalues(B);
    std::sort(be.begin(), be.end(),
              [](const auto& a, const auto& b) { return a.imag() < b.imag(); });
    CHECK(be[0].real() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(be[0].imag() == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(be[1].imag() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("general eigenvalues agree with jacobi on random symmetric matrices") {
    Rng rng(47);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 5.0));
        const Mat A = random_symmetric(n, rng);
        const auto sym = jacobi_eigensystem(A);
        auto gen = general_eigenvalues(A);
        std::vector<double> re;
        for (const auto& e : gen) {
            CHECK(std::abs(e.imag()) < 1e-7);
            re.push_back(e.real());
        }
        std::sort(re.begin(), re.end());
        for (int i = 0; i < n; ++i) CHECK(re[i] == doctest::Approx(sym.values[i]).epsilon(1e-7));
    }
}

TEST_CASE("hurwitz iff lyapunov solvable, on random matrices") {
    Rng rng(53);
    int hurwitz_seen = 0, unstable_seen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 3.0));
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.5, 1.5);
        const auto h = is_hurwitz(A);
        if (h.hurwitz) {
            ++hurwitz_seen;
            const Mat P = solve_lyapunov(A);
            const auto s = sym_extremal_eigs(P);
            CHECK(s.lambda_min > 0.0);
        } else {
            ++unstable_seen;
            CHECK_THROWS_AS(solve_lyapunov(A), NumericError);
        }
    }
    CHECK(hurwitz_seen > 0);
    CHECK(unstable_seen > 0);
}

TEST_CASE("spectral norm") {
    CHECK(spectral_norm(Mat::row({3.0, 4.0})) == doctest::Approx(5.0));
    CHECK(spectral_norm(Mat::diag({1.0, -7.0, 2.0})) == doctest::Approx(7.0));
    Rng rng(61);
    // Induced 2-norm dominates ||Ax||/||x|| for random probes.
    Mat A(3, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    const double nrm = spectral_norm(A);
    for (int probe = 0; probe < 100; ++probe) {
        Vec x(4);
        for (double& xi : x) xi = rng.uniform(-1.0, 1.0);
        CHECK(norm2(A * x) <= nrm * norm2(x) + 1e-12);
    }
}

TEST_CASE("lu solve recovers random systems") {
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-2.0, 2.0);
        for (int i = 0; i < n; ++i) A(i, i) += 3.0;  // keep it comfortably nonsingular
        Vec x(n);
        for (double& xi : x) xi = rng.uniform(-5.0, 5.0);
        const Vec b = A * x;
        const Vec got = lu_solve(A, b);
        for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(lu_solve(Mat(2, 2), Vec{1.0, 2.0}), NumericError);
}

#include "dobkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dobkit {

namespace {

using cplx = std::complex<double>;

void require_square(const Mat& A, const char* who) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": square matrix required");
}

/// Householder reduction to upper Hessenberg form (eigenvalues preserved).
Mat to_hessenberg(Mat A) {
    const int n = A.rows();
    for (int k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (int i = k + 1; i < n; ++i) xnorm += A(i, k) * A(i, k);
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const double alpha = (A(k + 1, k) >= 0.0) ? -xnorm : xnorm;
        Vec v(n, 0.0);
        v[k + 1] = A(k + 1, k) - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = A(i, k);
        double vnorm = 0.0;
        for (int i = k + 1; i < n; ++i) vnorm += v[i] * v[i];
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (int i = k + 1; i < n; ++i) v[i] /= vnorm;
        // A <- (I - 2vv^T) A
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = k + 1; i < n; ++i) s += v[i] * A(i, j);
            for (int i = k + 1; i < n; ++i) A(i, j) -= 2.0 * v[i] * s;
        }
        // A <- A (I - 2vv^T)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = k + 1; j < n; ++j) s += A(i, j) * v[j];
            for (int j = k + 1; j < n; ++j) A(i, j) -= 2.0 * s * v[j];
        }
        A(k + 1, k) = alpha;
        for (int i = k + 2; i < n; ++i) A(i, k) = 0.0;
    }
    return A;
}

struct Givens {
    double c;
    cplx s;
};

Givens make_givens(cplx f, cplx g) {
    if (f == 0.0) return {0.0, cplx(1.0, 0.0)};
    const double af = std::abs(f), ag = std::abs(g);
    const double r = std::hypot(af, ag);
    return {af / r, (f / af) * std::conj(g) / r};
}

}  // namespace

Vec lu_solve(Mat A, Vec b) {
    require_square(A, "lu_solve");
    const int n = A.rows();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: rhs size mismatch");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        if (std::abs(A(piv, k)) < 1e-300)
            throw NumericError("lu_solve: singular system (zero pivot at column " +
                               std::to_string(k) + ")");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = A(i, k) / A(k, k);
            A(i, k) = 0.0;
            if (m == 0.0) continue;
            for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            b[i] -= m * b[k];
        }
    }
    Vec x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

Mat lu_solve(const Mat& A, const Mat& B) {
    if (A.rows() != B.rows()) throw std::invalid_argument("lu_solve: rhs rows mismatch");
    Mat X(B.rows(), B.cols());
    for (int c = 0; c < B.cols(); ++c) {
        Vec xc = lu_solve(A, B.extract_col(c));
        for (int r = 0; r < B.rows(); ++r) X(r, c) = xc[r];
    }
    return X;
}

Mat inverse_unit_upper(const Mat& U) {
    require_square(U, "inverse_unit_upper");
    const int n = U.rows();
    for (int i = 0; i < n; ++i) {
        if (U(i, i) != 1.0)
            throw std::invalid_argument("inverse_unit_upper: diagonal must be exactly unit");
        for (int j = 0; j < i; ++j)
            if (U(i, j) != 0.0)
                throw std::invalid_argument("inverse_unit_upper: matrix not upper triangular");
    }
    Mat X = Mat::identity(n);
    // Back-substitution, one basis column at a time.
    for (int c = 0; c < n; ++c)
        for (int i = c - 1; i >= 0; --i) {
            double s = 0.0;
            for (int j = i + 1; j <= c; ++j) s += U(i, j) * X(j, c);
            X(i, c) = -s;
        }
    return X;
}

std::vector<cplx> general_eigenvalues(const Mat& A) {
    require_square(A, "general_eigenvalues");
    const int n = A.rows();
    if (!A.all_finite()) throw std::invalid_argument("general_eigenvalues: non-finite entries");
    if (n == 1) return {cplx(A(0, 0), 0.0)};

    const Mat Hreal = to_hessenberg(A);
    std::vector<std::vector<cplx>> H(n, std::vector<cplx>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H[i][j] = Hreal(i, j);

    const double eps = 1e-12;
    const double hnorm = std::max(1.0, Hreal.frobenius());
    std::vector<cplx> eigs;
    eigs.reserve(n);

    int hi = n - 1;
    int iters = 0, since_deflation = 0;
    const int cap = 100 * n;
    while (hi >= 0) {
        // Flush negligible subdiagonals, then find the active block [lo, hi].
        int lo = 0;
        for (int k = hi; k >= 1; --k) {
            double scale = std::abs(H[k - 1][k - 1]) + std::abs(H[k][k]);
            if (scale == 0.0) scale = hnorm;
            if (std::abs(H[k][k - 1]) <= eps * scale) {
                H[k][k - 1] = 0.0;
                lo = k;
                break;
            }
        }
        if (lo == hi) {
            eigs.push_back(H[hi][hi]);
            --hi;
            since_deflation = 0;
            continue;
        }

        // Wilkinson shift from the trailing 2x2 of the active block.
        const cplx a = H[hi - 1][hi - 1], b = H[hi - 1][hi];
        const cplx c = H[hi][hi - 1], d = H[hi][hi];
        cplx shift;
        if (++since_deflation % 20 == 0) {
            // Exceptional shift to break rare cycling.
            shift = std::abs(H[hi][hi - 1]) + std::abs(d);
        } else {
            const cplx tr = a + d;
            const cplx disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
            const cplx l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
            shift = (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
        }
        if (++iters > cap)
            throw NumericError("general_eigenvalues: QR iteration exceeded cap " +
                               std::to_string(cap));

        for (int k = lo; k <= hi; ++k) H[k][k] -= shift;
        std::vector<Givens> rot(hi - lo);
        for (int k = lo; k < hi; ++k) {
            const Givens g = make_givens(H[k][k], H[k + 1][k]);
            rot[k - lo] = g;
            for (int j = k; j <= hi; ++j) {
                const cplx t1 = H[k][j], t2 = H[k + 1][j];
                H[k][j] = g.c * t1 + g.s * t2;
                H[k + 1][j] = -std::conj(g.s) * t1 + g.c * t2;
            }
        }
        for (int k = lo; k < hi; ++k) {
            const Givens g = rot[k - lo];
            const int top = std::max(lo, 0);
            for (int i = top; i <= std::min(k + 2, hi); ++i) {
                const cplx t1 = H[i][k], t2 = H[i][k + 1];
                H[i][k] = g.c * t1 + std::conj(g.s) * t2;
                H[i][k + 1] = -g.s * t1 + g.c * t2;
            }
        }
        for (int k = lo; k <= hi; ++k) H[k][k] += shift;
    }
    return eigs;
}

HurwitzResult is_hurwitz(const Mat& A) {
    const auto eigs = general_eigenvalues(A);
    double margin = -std::numeric_limits<double>::infinity();
    for (const auto& e : eigs) margin = std::max(margin, e.real());
    return {margin < 0.0, margin};
}

SymEigen jacobi_eigensystem(Mat A) {
    require_square(A, "jacobi_eigensystem");
    const int n = A.rows();
    const double scale = std::max(1.0, A.max_abs());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(A(i, j) - A(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("jacobi_eigensystem: matrix not symmetric");

    Mat V = Mat::identity(n);
    const double tol = 1e-12 * std::max(1.0, A.frobenius());
    bool converged = false;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
        if (std::sqrt(off) < tol) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = ((theta >= 0.0) ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cth = 1.0 / std::sqrt(t * t + 1.0);
                const double sth = t * cth;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = cth * akp - sth * akq;
                    A(k, q) = sth * akp + cth * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = cth * apk - sth * aqk;
                    A(q, k) = sth * apk + cth * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = cth * vkp - sth * vkq;
                    V(k, q) = sth * vkp + cth * vkq;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
        if (std::sqrt(off) >= tol)
            throw NumericError("jacobi_eigensystem: no convergence after 100 sweeps");
    }

    SymEigen out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = A(i, i);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return out.values[i] < out.values[j]; });
    Vec sorted(n);
    Mat vect(n, n);
    for (int k = 0; k < n; ++k) {
        sorted[k] = out.values[order[k]];
        for (int r = 0; r < n; ++r) vect(r, k) = V(r, order[k]);
    }
    out.values = std::move(sorted);
    out.vectors = std::move(vect);
    return out;
}

SpectrumSummary sym_extremal_eigs(const Mat& P) {
    const SymEigen es = jacobi_eigensystem(P);
    return {es.values.front(), es.values.back()};
}

Mat solve_lyapunov(const Mat& A) {
    require_square(A, "solve_lyapunov");
    const HurwitzResult h = is_hurwitz(A);
    if (!h.hurwitz)
        throw NumericError("solve_lyapunov: matrix is not Hurwitz (max eigenvalue real part " +
                           std::to_string(h.margin) + ")");
    const int n = A.rows();
    const int nn = n * n;
    // Row r(i,j)=i*n+j encodes entry (i,j) of A^T P + P A = -I;
    // unknown u(k,j)=k*n+j is P(k,j).
    Mat M(nn, nn);
    Vec rhs(nn, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int r = i * n + j;
            for (int k = 0; k < n; ++k) {
                M(r, k * n + j) += A(k, i);
                M(r, i * n + k) += A(k, j);
            }
            rhs[r] = (i == j) ? -1.0 : 0.0;
        }
    }
    Vec x;
    try {
        x = lu_solve(M, rhs);
    } catch (const NumericError&) {
        throw NumericError("solve_lyapunov: assembled Kronecker system is singular");
    }
    Mat P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(i, j) = x[i * n + j];
    // Exact Lyapunov solutions are symmetric; remove roundoff skew.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (P(i, j) + P(j, i));
            P(i, j) = s;
            P(j, i) = s;
        }
    Mat residual = A.transpose() * P + P * A + Mat::identity(n);
    if (residual.max_abs() > 1e-10)
        throw NumericError("solve_lyapunov: residual " + std::to_string(residual.max_abs()) +
                           " exceeds 1e-10");
    return P;
}

double spectral_norm(const Mat& A) {
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    if (A.rows() == 1 || A.cols() == 1) {
        double s = 0.0;
        for (int r = 0; r < A.rows(); ++r)
            for (int c = 0; c < A.cols(); ++c) s += A(r, c) * A(r, c);
        return std::sqrt(s);
    }
    const Mat G = A.transpose() * A;
    const SpectrumSummary s = sym_extremal_eigs(G);
    return std::sqrt(std::max(0.0, s.lambda_max));
}

}  // namespace dobkit

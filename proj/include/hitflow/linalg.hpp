#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hitflow::linalg {

// Dense row-major matrix of doubles. Everything in this project is tiny
// (n <= 8 for group elements, <= ~64 for constraint systems), so a plain
// vector-backed type beats any dependency.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diag(const std::vector<double>& d) {
        Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    Mat transpose() const {
        Mat t(cols, rows);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    double trace() const {
        double s = 0;
        for (int i = 0; i < std::min(rows, cols); ++i) s += (*this)(i, i);
        return s;
    }

    double frobenius() const {
        double s = 0;
        for (double x : a) s += x * x;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0;
        for (double x : a) m = std::max(m, std::abs(x));
        return m;
    }

    bool finite() const {
        for (double x : a)
            if (!std::isfinite(x)) return false;
        return true;
    }

    Mat& operator+=(const Mat& o) {
        assert(rows == o.rows && cols == o.cols);
        for (size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        assert(rows == o.rows && cols == o.cols);
        for (size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (double& x : a) x *= s;
        return *this;
    }
};

inline Mat operator+(Mat lhs, const Mat& rhs) { return lhs += rhs; }
inline Mat operator-(Mat lhs, const Mat& rhs) { return lhs -= rhs; }
inline Mat operator*(Mat lhs, double s) { return lhs *= s; }
inline Mat operator*(double s, Mat rhs) { return rhs *= s; }

inline Mat operator*(const Mat& x, const Mat& y) {
    assert(x.cols == y.rows);
    Mat z(x.rows, y.cols);
    for (int r = 0; r < x.rows; ++r)
        for (int k = 0; k < x.cols; ++k) {
            const double v = x(r, k);
            if (v == 0.0) continue;
            for (int c = 0; c < y.cols; ++c) z(r, c) += v * y(k, c);
        }
    return z;
}

inline double dot(const Mat& x, const Mat& y) {
    assert(x.a.size() == y.a.size());
    double s = 0;
    for (size_t i = 0; i < x.a.size(); ++i) s += x.a[i] * y.a[i];
    return s;
}

// Product accumulated in long double; used where downstream consumers amplify
// entry-level rounding (flow conjugations, spectral interpolation).
inline Mat mul_extended(const Mat& x, const Mat& y) {
    assert(x.cols == y.rows);
    Mat z(x.rows, y.cols);
    for (int r = 0; r < x.rows; ++r)
        for (int c = 0; c < y.cols; ++c) {
            long double s = 0.0L;
            for (int k = 0; k < x.cols; ++k)
                s += static_cast<long double>(x(r, k)) * static_cast<long double>(y(k, c));
            z(r, c) = static_cast<double>(s);
        }
    return z;
}

inline Mat mul_extended(const Mat& x, const Mat& y, const Mat& z) {
    return mul_extended(mul_extended(x, y), z);
}

// LU with partial pivoting. perm parity returned through sign.
struct Lu {
    Mat lu;
    std::vector<int> piv;
    double sign = 1.0;
    bool singular = false;
};

inline Lu lu_decompose(Mat m) {
    const int n = m.rows;
    Lu f;
    f.piv.resize(n);
    for (int i = 0; i < n; ++i) f.piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        if (p != k) {
            for (int c = 0; c < n; ++c) std::swap(m(k, c), m(p, c));
            std::swap(f.piv[k], f.piv[p]);
            f.sign = -f.sign;
        }
        if (m(k, k) == 0.0) {
            f.singular = true;
            continue;
        }
        for (int i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const double l = m(i, k);
            if (l == 0.0) continue;
            for (int c = k + 1; c < n; ++c) m(i, c) -= l * m(k, c);
        }
    }
    f.lu = std::move(m);
    return f;
}

inline std::vector<double> lu_solve(const Lu& f, const std::vector<double>& b) {
    const int n = f.lu.rows;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[f.piv[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        const double d = f.lu(i, i);
        x[i] /= (d == 0.0 ? 1e-300 : d);
    }
    return x;
}

inline double det(const Mat& m) {
    Lu f = lu_decompose(m);
    double d = f.sign;
    for (int i = 0; i < m.rows; ++i) d *= f.lu(i, i);
    return d;
}

inline Mat inverse(const Mat& m) {
    const int n = m.rows;
    Lu f = lu_decompose(m);
    if (f.singular) throw std::runtime_error("linalg: singular matrix in inverse()");
    Mat inv(n, n);
    std::vector<double> e(n, 0.0);
    for (int c = 0; c < n; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        std::vector<double> x = lu_solve(f, e);
        for (int r = 0; r < n; ++r) inv(r, c) = x[r];
    }
    return inv;
}

// Matrix exponential, Pade(13) with scaling and squaring (Higham 2005 constants).
inline Mat expm(const Mat& x) {
    const int n = x.rows;
    static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800.,  129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,       1323241920.,
                               40840800.,          960960.,            16380.,
                               182.,               1.};
    double norm1 = 0;
    for (int c = 0; c < n; ++c) {
        double s = 0;
        for (int r = 0; r < n; ++r) s += std::abs(x(r, c));
        norm1 = std::max(norm1, s);
    }
    const double theta13 = 5.371920351148152;
    int squarings = 0;
    Mat a = x;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        a *= std::pow(2.0, -squarings);
    }
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a2 * a4;
    const Mat id = Mat::identity(n);
    Mat u = a * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] +
                 id * b[1]);
    Mat v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] +
            id * b[0];
    Mat p = v + u;
    Mat q = v - u;
    Lu f = lu_decompose(q);
    Mat r(n, n);
    std::vector<double> col(n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) col[i] = p(i, c);
        std::vector<double> s = lu_solve(f, col);
        for (int i = 0; i < n; ++i) r(i, c) = s[i];
    }
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

// Cyclic Jacobi eigensolver for symmetric matrices; returns eigenvalues
// (descending) and orthonormal eigenvectors as columns.
struct SymEig {
    std::vector<double> values;
    Mat vectors;
};

inline SymEig jacobi_symmetric(Mat s) {
    const int n = s.rows;
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        if (off < 1e-30 * (1.0 + s.frobenius())) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
    }
    SymEig e;
    e.values.resize(n);
    for (int i = 0; i < n; ++i) e.values[i] = s(i, i);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return e.values[i] > e.values[j]; });
    SymEig out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (int c = 0; c < n; ++c) {
        out.values[c] = e.values[order[c]];
        for (int r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

// One-sided Jacobi SVD: orthogonalize column pairs, accumulating the right
// factor. Keeps relative accuracy on tiny singular values, which the Gram
// matrix route cannot (it squares the condition number).
struct Svd {
    std::vector<double> sigma;  // descending
    Mat v;                      // right singular vectors as columns, aligned with sigma
};

inline Svd svd_right(Mat m) {
    const int k = m.cols;
    Mat v = Mat::identity(k);
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (int r = 0; r < m.rows; ++r) {
                    app += m(r, p) * m(r, p);
                    aqq += m(r, q) * m(r, q);
                    apq += m(r, p) * m(r, q);
                }
                if (std::abs(apq) <= 1e-30 + 1e-16 * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int r = 0; r < m.rows; ++r) {
                    const double xp = m(r, p), xq = m(r, q);
                    m(r, p) = c * xp - s * xq;
                    m(r, q) = s * xp + c * xq;
                }
                for (int r = 0; r < k; ++r) {
                    const double vp = v(r, p), vq = v(r, q);
                    v(r, p) = c * vp - s * vq;
                    v(r, q) = s * vp + c * vq;
                }
            }
        if (!rotated) break;
    }
    std::vector<double> sig(k);
    for (int c = 0; c < k; ++c) {
        double s = 0;
        for (int r = 0; r < m.rows; ++r) s += m(r, c) * m(r, c);
        sig[c] = std::sqrt(s);
    }
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return sig[i] > sig[j]; });
    Svd out;
    out.sigma.resize(k);
    out.v = Mat(k, k);
    for (int c = 0; c < k; ++c) {
        out.sigma[c] = sig[order[c]];
        for (int r = 0; r < k; ++r) out.v(r, c) = v(r, order[c]);
    }
    return out;
}

inline std::vector<double> singular_values(const Mat& m) { return svd_right(m).sigma; }

inline int rank(const Mat& m, double rel_tol = 1e-10) {
    std::vector<double> s = singular_values(m);
    if (s.empty()) return 0;
    const double cut = rel_tol * std::max(1.0, s.front());
    int r = 0;
    for (double x : s)
        if (x > cut) ++r;
    return r;
}

// Orthonormal basis (as columns) of the null space {x : m x = 0}.
inline Mat nullspace(const Mat& m, double rel_tol = 1e-10) {
    Svd svd = svd_right(m);
    const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    const double cut = rel_tol * std::max(1.0, smax);
    std::vector<int> keep;
    for (size_t i = 0; i < svd.sigma.size(); ++i)
        if (svd.sigma[i] <= cut) keep.push_back(static_cast<int>(i));
    Mat ns(m.cols, static_cast<int>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c)
        for (int r = 0; r < m.cols; ++r) ns(r, static_cast<int>(c)) = svd.v(r, keep[c]);
    return ns;
}

}  // namespace hitflow::linalg

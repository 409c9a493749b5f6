#pragma once

#include <complex>
#include <optional>

#include "hitflow/linalg.hpp"

namespace hitflow::eigen {

using linalg::Mat;
using cplx = std::complex<double>;

// Characteristic polynomial det(xI - A) = x^n + c[1] x^{n-1} + ... + c[n]
// via the Faddeev-LeVerrier recurrence (exact up to rounding for n <= 8).
inline std::vector<double> char_poly(const Mat& a) {
    const int n = a.rows;
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    Mat m = Mat::identity(n);
    for (int k = 1; k <= n; ++k) {
        m = a * m;
        c[k] = -m.trace() / k;
        for (int i = 0; i < n; ++i) m(i, i) += c[k];
    }
    return c;
}

inline cplx poly_eval(const std::vector<double>& c, cplx x) {
    cplx p = c[0];
    for (size_t i = 1; i < c.size(); ++i) p = p * x + c[i];
    return p;
}

inline cplx poly_deriv_eval(const std::vector<double>& c, cplx x) {
    const int n = static_cast<int>(c.size()) - 1;
    cplx p = c[0] * static_cast<double>(n);
    for (int i = 1; i < n; ++i) p = p * x + c[i] * static_cast<double>(n - i);
    return p;
}

// Aberth-Ehrlich simultaneous iteration; robust at degree <= 8.
inline std::vector<cplx> poly_roots(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return {};
    double radius = 0.0;
    for (int i = 1; i <= n; ++i) radius = std::max(radius, std::abs(c[i]));
    radius = 1.0 + radius;
    const cplx center(-c[1] / n, 0.0);
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * M_PI * (k + 0.25) / n + 0.4;
        z[k] = center + radius * cplx(std::cos(ang), std::sin(ang));
    }
    for (int iter = 0; iter < 200; ++iter) {
        double shift = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx p = poly_eval(c, z[k]);
            const cplx dp = poly_deriv_eval(c, z[k]);
            if (std::abs(dp) == 0.0) continue;
            const cplx newton = p / dp;
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            const cplx d = newton / (1.0 - newton * sum);
            z[k] -= d;
            shift = std::max(shift, std::abs(d));
        }
        if (shift < 1e-15 * (1.0 + radius)) break;
    }
    // One clean-up Newton pass; collapse conjugate noise on near-real roots.
    for (int k = 0; k < n; ++k) {
        for (int it = 0; it < 3; ++it) {
            const cplx dp = poly_deriv_eval(c, z[k]);
            if (std::abs(dp) == 0.0) break;
            z[k] -= poly_eval(c, z[k]) / dp;
        }
    }
    return z;
}

// Shifted QR on a Hessenberg form; eigenvalues only. Used as a fallback when
// polynomial roots fail the residual test.
inline std::vector<cplx> qr_eigenvalues(Mat a) {
    const int n = a.rows;
    // Householder reduction to Hessenberg.
    for (int k = 0; k < n - 2; ++k) {
        double norm = 0;
        for (int i = k + 1; i < n; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm < 1e-300) continue;
        std::vector<double> v(n, 0.0);
        const double alpha = (a(k + 1, k) >= 0 ? -norm : norm);
        v[k + 1] = a(k + 1, k) - alpha;
        for (int i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vn = 0;
        for (int i = k + 1; i < n; ++i) vn += v[i] * v[i];
        if (vn < 1e-300) continue;
        // a <- (I - 2vv^T/v^Tv) a (I - 2vv^T/v^Tv)
        for (int c = 0; c < n; ++c) {
            double s = 0;
            for (int i = k + 1; i < n; ++i) s += v[i] * a(i, c);
            s = 2.0 * s / vn;
            for (int i = k + 1; i < n; ++i) a(i, c) -= s * v[i];
        }
        for (int r = 0; r < n; ++r) {
            double s = 0;
            for (int i = k + 1; i < n; ++i) s += a(r, i) * v[i];
            s = 2.0 * s / vn;
            for (int i = k + 1; i < n; ++i) a(r, i) -= s * v[i];
        }
    }
    std::vector<cplx> out;
    int hi = n - 1;
    int guard = 0;
    while (hi >= 0 && ++guard < 20000) {
        if (hi == 0) {
            out.emplace_back(a(0, 0), 0.0);
            --hi;
            continue;
        }
        // deflation scan
        int lo = hi;
        while (lo > 0 &&
               std::abs(a(lo, lo - 1)) >
                   1e-15 * (std::abs(a(lo, lo)) + std::abs(a(lo - 1, lo - 1)) + 1e-30))
            --lo;
        if (lo == hi) {
            out.emplace_back(a(hi, hi), 0.0);
            --hi;
            continue;
        }
        if (lo == hi - 1) {
            const double p = a(hi - 1, hi - 1), q = a(hi - 1, hi), r = a(hi, hi - 1),
                         s = a(hi, hi);
            const double tr = p + s, dt = p * s - q * r;
            const double disc = tr * tr / 4.0 - dt;
            if (disc >= 0) {
                const double sq = std::sqrt(disc);
                out.emplace_back(tr / 2.0 + sq, 0.0);
                out.emplace_back(tr / 2.0 - sq, 0.0);
            } else {
                const double sq = std::sqrt(-disc);
                out.emplace_back(tr / 2.0, sq);
                out.emplace_back(tr / 2.0, -sq);
            }
            hi -= 2;
            continue;
        }
        // Wilkinson-style real shift from the trailing 2x2, with an
        // exceptional perturbation when deflation stalls on a complex pair.
        const double p = a(hi - 1, hi - 1), q = a(hi - 1, hi), r = a(hi, hi - 1), s = a(hi, hi);
        const double tr = p + s, dt = p * s - q * r;
        const double disc = tr * tr / 4.0 - dt;
        double mu = s;
        if (disc >= 0) {
            const double sq = std::sqrt(disc);
            const double l1 = tr / 2.0 + sq, l2 = tr / 2.0 - sq;
            mu = (std::abs(l1 - s) < std::abs(l2 - s)) ? l1 : l2;
        }
        if (guard % 13 == 0) mu += 0.9 * std::abs(a(hi, hi - 1)) + 1e-3 * std::abs(mu);
        // one explicit shifted QR sweep on rows lo..hi via Givens
        std::vector<double> cs(n, 1.0), sn(n, 0.0);
        for (int i = lo; i <= hi; ++i) a(i, i) -= mu;
        for (int i = lo; i < hi; ++i) {
            const double x = a(i, i), y = a(i + 1, i);
            const double d = std::hypot(x, y);
            if (d < 1e-300) continue;
            cs[i] = x / d;
            sn[i] = y / d;
            for (int c = i; c <= hi; ++c) {
                const double t1 = a(i, c), t2 = a(i + 1, c);
                a(i, c) = cs[i] * t1 + sn[i] * t2;
                a(i + 1, c) = -sn[i] * t1 + cs[i] * t2;
            }
        }
        for (int i = lo; i < hi; ++i) {
            for (int r2 = lo; r2 <= std::min(hi, i + 2); ++r2) {
                const double t1 = a(r2, i), t2 = a(r2, i + 1);
                a(r2, i) = cs[i] * t1 + sn[i] * t2;
                a(r2, i + 1) = -sn[i] * t1 + cs[i] * t2;
            }
        }
        for (int i = lo; i <= hi; ++i) a(i, i) += mu;
    }
    return out;
}

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

// Diagonal similarity scaling (powers of two) equalizing row and column
// norms; leaves eigenvalues untouched and rescues the polynomial route for
// wide-spread spectra.
inline Mat balance(Mat a) {
    const int n = a.rows;
    for (int pass = 0; pass < 20; ++pass) {
        bool converged = true;
        for (int i = 0; i < n; ++i) {
            double r = 0, c = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                r += std::abs(a(i, j));
                c += std::abs(a(j, i));
            }
            if (r == 0 || c == 0) continue;
            double f = 1.0;
            const double s = r + c;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c > r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if ((r + c) < 0.95 * s) {
                converged = false;
                for (int j = 0; j < n; ++j) a(i, j) /= f;
                for (int j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
        if (converged) break;
    }
    return a;
}

// Complex spectrum of a real matrix. Polynomial route on the balanced matrix
// first; QR fallback when a root residual is suspicious, when roots cluster,
// or when the polynomial reports a non-real pair (clustered small real roots
// can merge into a spurious complex pair at this conditioning).
inline std::vector<cplx> spectrum(const Mat& a) {
    const Mat bal = balance(a);
    const std::vector<double> c = char_poly(bal);
    std::vector<cplx> roots = poly_roots(c);
    const double scale = std::max(1.0, bal.max_abs());
    double resid = 0.0;
    for (const cplx& z : roots) resid = std::max(resid, std::abs(poly_eval(c, z)));
    bool fallback = !(resid < 1e-6 * std::pow(scale, a.rows));
    for (const cplx& z : roots)
        if (std::abs(z.imag()) > 1e-13 * scale) fallback = true;
    for (size_t i = 0; i < roots.size() && !fallback; ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < 1e-5 * scale) fallback = true;
    if (fallback) roots = qr_eigenvalues(bal);
    return roots;
}

// Refine a simple real eigenvalue with two-sided inverse iteration and a
// generalized Rayleigh quotient; recovers full relative precision that the
// polynomial route loses on small eigenvalues.
inline double polish_real_eigenvalue(const Mat& a, double lambda) {
    const int n = a.rows;
    const Mat at = a.transpose();
    for (int round = 0; round < 3; ++round) {
        const double eps = 1e-13 * std::max(1.0, std::abs(lambda));
        Mat sa = a, sat = at;
        for (int i = 0; i < n; ++i) {
            sa(i, i) -= lambda + eps;
            sat(i, i) -= lambda + eps;
        }
        linalg::Lu fa = linalg::lu_decompose(sa);
        linalg::Lu fat = linalg::lu_decompose(sat);
        std::vector<double> v(n), w(n);
        for (int i = 0; i < n; ++i) v[i] = w[i] = 1.0 / (1.0 + i);
        for (int it = 0; it < 3; ++it) {
            v = linalg::lu_solve(fa, v);
            w = linalg::lu_solve(fat, w);
            double nv = 0, nw = 0;
            for (int i = 0; i < n; ++i) {
                nv += v[i] * v[i];
                nw += w[i] * w[i];
            }
            nv = std::sqrt(nv);
            nw = std::sqrt(nw);
            if (nv < 1e-300 || nw < 1e-300) return lambda;
            for (int i = 0; i < n; ++i) {
                v[i] /= nv;
                w[i] /= nw;
            }
        }
        double wav = 0, wv = 0;
        for (int r = 0; r < n; ++r) {
            double av = 0;
            for (int c2 = 0; c2 < n; ++c2) av += a(r, c2) * v[c2];
            wav += w[r] * av;
            wv += w[r] * v[r];
        }
        if (std::abs(wv) < 1e-12) return lambda;
        const double next = wav / wv;
        if (std::abs(next - lambda) < 1e-15 * std::max(1.0, std::abs(lambda))) return next;
        lambda = next;
    }
    return lambda;
}

// Eigenvector for a real simple eigenvalue by inverse iteration.
inline std::vector<double> real_eigenvector(const Mat& a, double lambda) {
    const int n = a.rows;
    Mat shifted = a;
    const double eps = 1e-13 * std::max(1.0, a.max_abs());
    for (int i = 0; i < n; ++i) shifted(i, i) -= lambda + eps;
    linalg::Lu f = linalg::lu_decompose(shifted);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 / (1.0 + i) + (i % 2 ? 0.25 : -0.125);
    for (int it = 0; it < 4; ++it) {
        v = linalg::lu_solve(f, v);
        double nv = 0;
        for (double x : v) nv += x * x;
        nv = std::sqrt(nv);
        if (nv < 1e-300) break;
        for (double& x : v) x /= nv;
    }
    // fix an overall sign so results are reproducible
    int imax = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0)
        for (double& x : v) x = -x;
    return v;
}

}  // namespace hitflow::eigen

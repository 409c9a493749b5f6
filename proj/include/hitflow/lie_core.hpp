#pragma once

#include <array>
#include <numeric>
#include <string>

#include "hitflow/eigen_real.hpp"
#include "hitflow/errors.hpp"
#include "hitflow/linalg.hpp"

// Linear-algebraic Lie theory for sl_n / SL_n: Jordan projections, Goldman
// functions, the trace-form Cartan data, the principal embedding of SL_2 and
// longest-Weyl-element facts. All dimensions 2 <= n <= 8.
namespace hitflow::lie {

using linalg::Mat;

inline constexpr double kDefaultEigGapTol = 1e-8;

// Element of SL_n(R) (projectively, PSL_n). det is normalized to exactly 1;
// for even n a sign flag records which lift was chosen. Functionals evaluate
// on |eigenvalues| so the flag never enters observable quantities.
struct SquareMatrix {
    Mat m;
    int sign_lift = +1;

    int dim() const { return m.rows; }

    static SquareMatrix unimodular(Mat raw) {
        const int n = raw.rows;
        if (n < 2 || n > 8 || raw.rows != raw.cols || !raw.finite())
            throw BadDeterminant("SquareMatrix: need finite square matrix with 2<=n<=8");
        double d = linalg::det(raw);
        if (std::abs(d) < 1e-300) throw BadDeterminant("SquareMatrix: det ~ 0");
        int flag = +1;
        double scale;
        if (d > 0) {
            scale = std::pow(d, -1.0 / n);
        } else {
            if (n % 2 == 0) throw BadDeterminant("SquareMatrix: even n with det < 0");
            scale = -std::pow(-d, -1.0 / n);
            flag = -1;
        }
        // det of a large-entry unimodular matrix is only computable to about
        // eps * ||M||^n; within that noise band, rescaling would only inject
        // error into an already-normalized product
        const double det_noise =
            1e-14 * std::pow(std::max(1.0, raw.frobenius() / std::sqrt(double(n))), n);
        if (std::abs(d - (flag > 0 ? 1.0 : -1.0)) > det_noise) {
            raw *= scale;
            d = linalg::det(raw);
            if (std::abs(d - 1.0) > 1e-12 && d > 0) raw *= std::pow(d, -1.0 / n);
        } else if (flag < 0) {
            raw *= -1.0;
        }
        if (std::abs(linalg::det(raw) - 1.0) > std::max(1e-10, det_noise))
            throw BadDeterminant("SquareMatrix: could not normalize det to 1");
        return SquareMatrix{std::move(raw), flag};
    }
};

inline SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    return SquareMatrix{a.m * b.m, a.sign_lift * b.sign_lift};
}

// Jordan projection: log-moduli of eigenvalues, sorted non-increasing,
// zero-sum. Valid for purely loxodromic elements only.
struct JordanVector {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[i]; }
};

inline JordanVector operator*(double s, JordanVector v) {
    for (double& x : v.values) x *= s;
    if (s < 0) std::reverse(v.values.begin(), v.values.end());
    return v;
}

inline double max_abs_diff(const JordanVector& a, const JordanVector& b) {
    double m = 0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

// Linear functional on the diagonal Cartan, stored as its trace-form dual:
// the traceless diagonal alpha_vee with Tr(alpha_vee . Y) = alpha(Y).
struct InvariantFunctional {
    std::vector<double> alpha_vee;
    std::string label;

    int dim() const { return static_cast<int>(alpha_vee.size()); }
    double apply(const JordanVector& lam) const {
        double s = 0;
        for (int i = 0; i < lam.dim(); ++i) s += alpha_vee[i] * lam[i];
        return s;
    }
    Mat vee_matrix() const { return Mat::diag(alpha_vee); }
};

// Traceless n x n matrix (sl_n tangent data).
struct TangentVector {
    Mat entries;

    static TangentVector traceless(Mat m) {
        const double t = m.trace() / m.rows;
        for (int i = 0; i < m.rows; ++i) m(i, i) -= t;
        return TangentVector{std::move(m)};
    }
};

// --- spectrum machinery -----------------------------------------------------

struct LoxodromicSpectrum {
    std::vector<double> eigenvalues;  // real, sorted by decreasing value after lift fix
    bool flipped = false;             // even n: whether -M was the positive lift
};

// Distinct-real-moduli test. Returns the sorted positive spectrum or nothing.
inline std::optional<LoxodromicSpectrum> loxodromic_spectrum(const SquareMatrix& x,
                                                             double tol_eig = kDefaultEigGapTol) {
    std::vector<eigen::cplx> roots = eigen::spectrum(x.m);
    const int n = x.dim();
    double scale = 0;
    for (const auto& z : roots) scale = std::max(scale, std::abs(z));
    if (scale <= 0 || !std::isfinite(scale)) return std::nullopt;
    for (const auto& z : roots)
        if (std::abs(z.imag()) > 1e-8 * scale) return std::nullopt;
    const Mat balanced = eigen::balance(x.m);
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = eigen::polish_real_eigenvalue(balanced, roots[i].real());
    bool flipped = false;
    int neg = 0;
    for (double v : ev)
        if (v < 0) ++neg;
    if (neg == n && n % 2 == 0) {
        for (double& v : ev) v = -v;
        flipped = true;
    } else if (neg != 0) {
        return std::nullopt;
    }
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    for (int i = 0; i + 1 < n; ++i) {
        if (ev[i + 1] <= 0) return std::nullopt;
        if ((ev[i] - ev[i + 1]) / std::max(ev[i], 1.0) < tol_eig) return std::nullopt;
    }
    return LoxodromicSpectrum{std::move(ev), flipped};
}

inline bool is_purely_loxodromic(const SquareMatrix& m, double tol_eig = kDefaultEigGapTol) {
    return loxodromic_spectrum(m, tol_eig).has_value();
}

inline JordanVector jordan_projection(const SquareMatrix& x, double tol_eig = kDefaultEigGapTol) {
    auto spec = loxodromic_spectrum(x, tol_eig);
    if (!spec)
        throw NotLoxodromic("jordan_projection: eigenvalues not real/distinct/positive-liftable");
    JordanVector lam;
    lam.values.resize(x.dim());
    for (int i = 0; i < x.dim(); ++i) lam.values[i] = std::log(spec->eigenvalues[i]);
    const double mean =
        std::accumulate(lam.values.begin(), lam.values.end(), 0.0) / lam.dim();
    if (std::abs(mean) > 1e-9) throw NotLoxodromic("jordan_projection: log-moduli do not sum to 0");
    for (double& v : lam.values) v -= mean;
    return lam;
}

// Jordan projection assembled from a matrix and its independently evaluated
// inverse. Large eigenvalues of each factor carry full relative accuracy, so
// the small end of the spectrum comes from the inverse; for odd dimensions
// the middle entry also uses the zero-sum constraint. This is the stable
// route for long word products, whose smallest eigenvalues drown in rounding
// when read off one matrix.
inline JordanVector jordan_two_sided(const SquareMatrix& m, const SquareMatrix& m_inv,
                                     double tol_eig = kDefaultEigGapTol) {
    auto spec = loxodromic_spectrum(m, tol_eig);
    auto spec_inv = loxodromic_spectrum(m_inv, tol_eig);
    if (!spec || !spec_inv)
        throw NotLoxodromic("jordan_two_sided: eigenvalues not real/distinct/positive-liftable");
    const int n = m.dim();
    JordanVector lam;
    lam.values.resize(n);
    const int top = (n + 1) / 2;
    for (int i = 0; i < top; ++i) lam.values[i] = std::log(spec->eigenvalues[i]);
    for (int i = 0; i < n - top; ++i)
        lam.values[n - 1 - i] = -std::log(spec_inv->eigenvalues[i]);
    if (n % 2 == 1) {
        double s = 0;
        for (int i = 0; i < n; ++i)
            if (i != top - 1) s += lam.values[i];
        lam.values[top - 1] = -s;
    } else {
        const double mean = std::accumulate(lam.values.begin(), lam.values.end(), 0.0) / n;
        for (double& v : lam.values) v -= mean;
    }
    for (int i = 0; i + 1 < n; ++i)
        if (!(lam.values[i] > lam.values[i + 1]))
            throw NotLoxodromic("jordan_two_sided: assembled spectrum not strictly sorted");
    return lam;
}

// Trace-form dual of alpha(Y) = sum c_i Y_ii on traceless diagonal Y: project
// the coefficients to their traceless representative.
inline InvariantFunctional alpha_vee(std::vector<double> coeffs, std::string label = "") {
    const double mean =
        std::accumulate(coeffs.begin(), coeffs.end(), 0.0) / static_cast<double>(coeffs.size());
    for (double& c : coeffs) c -= mean;
    return InvariantFunctional{std::move(coeffs), std::move(label)};
}

inline InvariantFunctional ell_functional(int n) {
    std::vector<double> c(n, 0.0);
    c[0] = 1.0;
    c[n - 1] = -1.0;
    return alpha_vee(std::move(c), "ell");
}

inline InvariantFunctional lambda_k_functional(int n, int k) {
    if (k < 1 || k > n) throw IndexOutOfRange("lambda_k_functional: k out of range");
    std::vector<double> c(n, 0.0);
    c[k - 1] = 1.0;
    return alpha_vee(std::move(c), "lambda" + std::to_string(k));
}

// Goldman function \hat f of f = alpha o lambda at a purely loxodromic x:
// alpha_vee conjugated by the eigenvector frame ordered by decreasing
// eigenvalue. Evaluated as the Lagrange interpolation polynomial through
// (eigenvalue_i, alpha_vee_i), which is the same matrix but commutes with x
// to rounding. Satisfies d/dt f(lambda(x exp tY))|_0 = Tr(\hat f(x) Y).
inline TangentVector goldman_hat(const SquareMatrix& x, const InvariantFunctional& f,
                                 double tol_eig = kDefaultEigGapTol) {
    auto spec = loxodromic_spectrum(x, tol_eig);
    if (!spec) throw NotLoxodromic("goldman_hat: matrix not purely loxodromic");
    const int n = x.dim();
    Mat base = x.m;
    if (spec->flipped) base *= -1.0;
    // extended-precision accumulation: consumers amplify the commutation
    // defect [result, x] by the norm of x
    std::vector<long double> acc(static_cast<size_t>(n) * n, 0.0L);
    std::vector<long double> proj(acc.size()), tmp(acc.size());
    for (int i = 0; i < n; ++i) {
        std::fill(proj.begin(), proj.end(), 0.0L);
        for (int k = 0; k < n; ++k) proj[static_cast<size_t>(k) * n + k] = 1.0L;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const long double inv_gap =
                1.0L / (static_cast<long double>(spec->eigenvalues[i]) - spec->eigenvalues[j]);
            std::fill(tmp.begin(), tmp.end(), 0.0L);
            for (int r = 0; r < n; ++r)
                for (int k = 0; k < n; ++k) {
                    const long double v = proj[static_cast<size_t>(r) * n + k];
                    if (v == 0.0L) continue;
                    for (int c = 0; c < n; ++c) {
                        long double e = base(k, c);
                        if (k == c) e -= spec->eigenvalues[j];
                        tmp[static_cast<size_t>(r) * n + c] += v * e * inv_gap;
                    }
                }
            proj.swap(tmp);
        }
        for (size_t idx = 0; idx < acc.size(); ++idx)
            acc[idx] += proj[idx] * static_cast<long double>(f.alpha_vee[i]);
    }
    Mat out(n, n);
    for (size_t idx = 0; idx < acc.size(); ++idx) out.a[idx] = static_cast<double>(acc[idx]);
    return TangentVector{std::move(out)};
}

// Reversal-with-negation on diagonals; the involution whose fixed functionals
// satisfy alpha = -w0.alpha. Identity map exactly when -1 lies in the Weyl
// group of sl_n, i.e. n = 2.
inline std::vector<double> w0_act(std::vector<double> diag) {
    std::reverse(diag.begin(), diag.end());
    for (double& v : diag) v = -v;
    return diag;
}

inline JordanVector w0_act(const JordanVector& v) {
    return JordanVector{w0_act(v.values)};
}

inline InvariantFunctional w0_act(const InvariantFunctional& f) {
    return InvariantFunctional{w0_act(f.alpha_vee), f.label.empty() ? "" : "w0." + f.label};
}

// Whether the longest Weyl element acts as -1 for a given root-system label
// ("A_k", "B_k", "C_k", "D_k", "E_6", "E_7", "E_8", "F_4", "G_2").
inline bool weyl_minus_one(const std::string& type) {
    if (type.size() < 3 || type[1] != '_') throw UnknownType("weyl_minus_one: " + type);
    const char fam = type[0];
    int rank = 0;
    for (size_t i = 2; i < type.size(); ++i) {
        if (type[i] < '0' || type[i] > '9') throw UnknownType("weyl_minus_one: " + type);
        rank = rank * 10 + (type[i] - '0');
    }
    switch (fam) {
        case 'A':
            if (rank < 1) throw UnknownType("weyl_minus_one: " + type);
            return rank == 1;
        case 'B':
        case 'C':
            if (rank < 1) throw UnknownType("weyl_minus_one: " + type);
            return true;
        case 'D':
            if (rank < 2) throw UnknownType("weyl_minus_one: " + type);
            return rank % 2 == 0;
        case 'E':
            if (rank < 6 || rank > 8) throw UnknownType("weyl_minus_one: " + type);
            return rank != 6;
        case 'F':
            if (rank != 4) throw UnknownType("weyl_minus_one: " + type);
            return true;
        case 'G':
            if (rank != 2) throw UnknownType("weyl_minus_one: " + type);
            return true;
        default:
            throw UnknownType("weyl_minus_one: " + type);
    }
}

// (n-1)-st symmetric power of a unimodular 2x2 matrix, on the monomial basis
// x^{n-1}, x^{n-2}y, ..., y^{n-1}. The n = 3 case is the classical
// [[a^2, ab, b^2], [2ac, ad+bc, 2bd], [c^2, cd, d^2]].
inline SquareMatrix sym_embed(const Mat& m2, int n) {
    if (m2.rows != 2 || m2.cols != 2) throw BadDeterminant("sym_embed: need a 2x2 matrix");
    if (std::abs(linalg::det(m2) - 1.0) > 1e-10)
        throw BadDeterminant("sym_embed: input determinant must be 1");
    const double a = m2(0, 0), b = m2(0, 1), c = m2(1, 0), d = m2(1, 1);
    Mat out(n, n);
    // column k is the expansion of (a x + c y)^{n-1-k} (b x + d y)^k
    for (int k = 0; k < n; ++k) {
        std::vector<double> poly{1.0};  // coefficients in y-degree
        auto mul_linear = [&poly](double x_coef, double y_coef) {
            std::vector<double> next(poly.size() + 1, 0.0);
            for (size_t i = 0; i < poly.size(); ++i) {
                next[i] += poly[i] * x_coef;
                next[i + 1] += poly[i] * y_coef;
            }
            poly.swap(next);
        };
        for (int i = 0; i < n - 1 - k; ++i) mul_linear(a, c);
        for (int i = 0; i < k; ++i) mul_linear(b, d);
        for (int r = 0; r < n; ++r) out(r, k) = poly[r];
    }
    return SquareMatrix::unimodular(std::move(out));
}

// --- Cartan data for sl_n under the trace form -------------------------------

struct CartanData {
    int n;

    double form(const Mat& x, const Mat& y) const { return (x * y).trace(); }
    Mat cartan_involution(const Mat& x) const { return x.transpose() * -1.0; }
    double form_theta(const Mat& x, const Mat& y) const { return -form(x, cartan_involution(y)); }

    // simple root e_i - e_{i+1} as coefficients on diagonals
    std::vector<std::vector<double>> simple_roots() const {
        std::vector<std::vector<double>> roots;
        for (int i = 0; i + 1 < n; ++i) {
            std::vector<double> r(n, 0.0);
            r[i] = 1.0;
            r[i + 1] = -1.0;
            roots.push_back(std::move(r));
        }
        return roots;
    }

    std::vector<double> w0_action(std::vector<double> diag) const { return w0_act(std::move(diag)); }
};

// --- first-order expansion probe ---------------------------------------------

struct ExpansionReport {
    std::vector<std::pair<double, double>> residuals;  // (t, max |lambda - (X + t Y0)|)
    double slope = 0.0;                                // fitted log-log slope
    bool all_negligible = false;                       // residuals at rounding level
};

// Residual of lambda(exp X exp tY) - (X + t diag0(Y)) over a grid of step
// sizes, with the fitted log-log slope. X is a strictly decreasing traceless
// diagonal (as a vector); Y any traceless matrix.
inline ExpansionReport lambda_expansion_check(const std::vector<double>& x_diag, const Mat& y,
                                              const std::vector<double>& t_grid) {
    const int n = static_cast<int>(x_diag.size());
    for (int i = 0; i + 1 < n; ++i)
        if (!(x_diag[i] > x_diag[i + 1]))
            throw NotLoxodromic("lambda_expansion_check: X must be strictly decreasing");
    Mat y0 = Mat(n, n);
    for (int i = 0; i < n; ++i) y0(i, i) = y(i, i);
    const double tr = y0.trace() / n;
    for (int i = 0; i < n; ++i) y0(i, i) -= tr;
    const Mat ex = linalg::expm(Mat::diag(x_diag));
    ExpansionReport rep;
    for (double t : t_grid) {
        const Mat m = ex * linalg::expm(y * t);
        JordanVector lam = jordan_projection(SquareMatrix::unimodular(m));
        double r = 0;
        for (int i = 0; i < n; ++i) r = std::max(r, std::abs(lam[i] - (x_diag[i] + t * y0(i, i))));
        rep.residuals.emplace_back(t, r);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (auto [t, r] : rep.residuals) {
        if (r < 1e-13) continue;
        const double lx = std::log(t), ly = std::log(r);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt >= 2) {
        rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    } else {
        rep.all_negligible = true;
        rep.slope = std::numeric_limits<double>::infinity();
    }
    return rep;
}

}  // namespace hitflow::lie

#pragma once

#include <complex>

#include "hitflow/groups.hpp"

// Upper-half-plane geometry: axes of hyperbolic Mobius transformations,
// geodesic crossings with signed angles, and the explicit Fuchsian base
// representations (regular-octagon genus 2, hyperbolic triangle orbifolds).
namespace hitflow::hyp {

using grp::Presentation;
using grp::Representation;
using grp::Word;
using lie::SquareMatrix;
using linalg::Mat;

inline Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

// Boundary point of H^2 as a projective pair (u : v); v = 0 encodes infinity.
struct BoundaryPoint {
    double u = 0, v = 1;

    static BoundaryPoint finite(double x) { return {x, 1.0}; }
    static BoundaryPoint infinity() { return {1.0, 0.0}; }

    bool is_infinite(double tol = 1e-12) const { return std::abs(v) <= tol * std::abs(u); }
    double value() const { return u / v; }

    BoundaryPoint normalized() const {
        const double n = std::hypot(u, v);
        const double s = (std::abs(u) > std::abs(v) ? (u > 0 ? 1 : -1) : (v > 0 ? 1 : -1));
        return {u / n * s, v / n * s};
    }
};

inline double pair_det(const BoundaryPoint& p, const BoundaryPoint& q) {
    return p.u * q.v - q.u * p.v;
}

inline BoundaryPoint mobius_apply(const Mat& m, const BoundaryPoint& p) {
    return BoundaryPoint{m(0, 0) * p.u + m(0, 1) * p.v, m(1, 0) * p.u + m(1, 1) * p.v}
        .normalized();
}

inline std::complex<double> mobius_apply(const Mat& m, std::complex<double> z) {
    return (m(0, 0) * z + m(0, 1)) / (m(1, 0) * z + m(1, 1));
}

enum class MobiusClass { Hyperbolic, Parabolic, Elliptic };

struct MobiusElement {
    Mat m;

    static MobiusElement unimodular(Mat raw) {
        if (raw.rows != 2 || raw.cols != 2) throw BadDeterminant("MobiusElement: need 2x2");
        const double d = linalg::det(raw);
        if (d <= 0) throw BadDeterminant("MobiusElement: determinant must be positive");
        raw *= 1.0 / std::sqrt(d);
        return MobiusElement{std::move(raw)};
    }

    double trace() const { return m.trace(); }

    MobiusClass classify(double tol = 1e-9) const {
        const double t = std::abs(trace());
        if (t > 2.0 + tol) return MobiusClass::Hyperbolic;
        if (t < 2.0 - tol) return MobiusClass::Elliptic;
        return MobiusClass::Parabolic;
    }

    double translation_length() const {
        const double t = std::abs(trace());
        if (t <= 2.0) throw NotHyperbolic("translation_length: not hyperbolic");
        return 2.0 * std::acosh(t / 2.0);
    }
};

// Oriented geodesic from endpoint a (repelling side) to endpoint b.
struct Geodesic {
    BoundaryPoint a, b;
};

// Axis of a hyperbolic element, oriented (repelling, attracting).
inline Geodesic axis(const MobiusElement& g) {
    if (g.classify() != MobiusClass::Hyperbolic) throw NotHyperbolic("axis: |trace| <= 2");
    const double tr = g.trace();
    const double root = std::sqrt(tr * tr - 4.0);
    const double kappa = (tr >= 0 ? tr + root : tr - root) / 2.0;  // |kappa| > 1
    const double kappa2 = (tr >= 0 ? tr - root : tr + root) / 2.0;
    const double c = g.m(1, 0), d = g.m(1, 1), a = g.m(0, 0), b = g.m(0, 1);
    auto fixed_point = [&](double k) {
        // eigenvector (v1, v2) with z = v1/v2, taken from the better-conditioned row
        const BoundaryPoint p1{k - d, c};
        const BoundaryPoint p2{b, k - a};
        return (std::hypot(p1.u, p1.v) >= std::hypot(p2.u, p2.v)) ? p1.normalized()
                                                                  : p2.normalized();
    };
    return Geodesic{fixed_point(kappa2), fixed_point(kappa)};
}

// Tangent direction (Euclidean unit vector; the metric is conformal) of a
// geodesic at an interior point z on it.
inline std::array<double, 2> tangent_at(const Geodesic& g, std::complex<double> z) {
    const bool a_inf = g.a.is_infinite(), b_inf = g.b.is_infinite();
    if (a_inf && b_inf) throw SharedEndpoint("tangent_at: degenerate geodesic");
    if (a_inf) return {0.0, -1.0};
    if (b_inf) return {0.0, 1.0};
    const double p = g.a.value(), q = g.b.value();
    const double center = 0.5 * (p + q);
    const double x = z.real() - center, y = z.imag();
    const double r = std::hypot(x, y);
    if (p < q) return {y / r, -x / r};
    return {-y / r, x / r};
}

// One transverse crossing: position, unsigned tangent angle in (0, pi), and
// the orientation sign (+1 when the ccw turn from the first tangent to the
// second equals the stored angle, -1 when it is the clockwise turn).
struct CrossingGeom {
    std::complex<double> point;
    double angle = 0;
    int sign = +1;
};

inline std::optional<std::complex<double>> geodesic_intersection(const Geodesic& g1,
                                                                 const Geodesic& g2) {
    const bool v1 = g1.a.is_infinite() || g1.b.is_infinite();
    const bool v2 = g2.a.is_infinite() || g2.b.is_infinite();
    auto vertical_x = [](const Geodesic& g) {
        return g.a.is_infinite() ? g.b.value() : g.a.value();
    };
    if (v1 && v2) return std::nullopt;
    if (v1 || v2) {
        const Geodesic& vert = v1 ? g1 : g2;
        const Geodesic& circ = v1 ? g2 : g1;
        const double x = vertical_x(vert);
        const double p = circ.a.value(), q = circ.b.value();
        const double c = 0.5 * (p + q), r = 0.5 * std::abs(q - p);
        const double dy2 = r * r - (x - c) * (x - c);
        if (dy2 <= 0) return std::nullopt;
        return std::complex<double>(x, std::sqrt(dy2));
    }
    const double p1 = g1.a.value(), q1 = g1.b.value();
    const double p2 = g2.a.value(), q2 = g2.b.value();
    const double c1 = 0.5 * (p1 + q1), r1 = 0.5 * std::abs(q1 - p1);
    const double c2 = 0.5 * (p2 + q2), r2 = 0.5 * std::abs(q2 - p2);
    if (std::abs(c2 - c1) < 1e-14) return std::nullopt;
    const double x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1));
    const double dy2 = r1 * r1 - (x - c1) * (x - c1);
    if (dy2 <= 0) return std::nullopt;
    return std::complex<double>(x, std::sqrt(dy2));
}

// Transverse crossing of two oriented geodesics, if any. The endpoints of g2
// must separate those of g1 on the boundary circle.
inline std::optional<CrossingGeom> cross(const Geodesic& g1, const Geodesic& g2) {
    const BoundaryPoint p = g1.a.normalized(), q = g1.b.normalized();
    const BoundaryPoint r = g2.a.normalized(), s = g2.b.normalized();
    for (const auto& x : {r, s})
        if (std::abs(pair_det(p, x)) <= 1e-10 || std::abs(pair_det(q, x)) <= 1e-10)
            throw SharedEndpoint("cross: geodesics share an endpoint");
    const double hr = pair_det(p, r) * pair_det(q, r);
    const double hs = pair_det(p, s) * pair_det(q, s);
    if (hr * hs >= 0) return std::nullopt;
    auto z = geodesic_intersection(g1, g2);
    if (!z) return std::nullopt;
    const auto t1 = tangent_at(g1, *z);
    const auto t2 = tangent_at(g2, *z);
    const double cross_z = t1[0] * t2[1] - t1[1] * t2[0];
    const double dot_z = t1[0] * t2[0] + t1[1] * t2[1];
    const double psi = std::atan2(cross_z, dot_z);
    CrossingGeom cg;
    cg.point = *z;
    cg.sign = psi > 0 ? +1 : -1;
    cg.angle = std::abs(psi);
    return cg;
}

// Signed position of a point of the geodesic along it (log scale after
// mapping the geodesic to (0, infinity)).
inline double axis_position(const Geodesic& g, std::complex<double> z) {
    if (g.a.is_infinite()) return -std::log(std::abs(z - g.b.value()));
    if (g.b.is_infinite()) return std::log(std::abs(z - g.a.value()));
    const std::complex<double> w = (z - g.a.value()) / (z - g.b.value());
    return std::log(std::abs(w));
}

// --- elementary isometries -----------------------------------------------------

// rotation about i by tangent angle theta (counter-clockwise)
inline Mat rot_about_i(double theta) {
    return mat2(std::cos(theta / 2), std::sin(theta / 2), -std::sin(theta / 2),
                std::cos(theta / 2));
}

// translation by distance d along the upward vertical through i
inline Mat boost_vertical(double d) { return Mat::diag({std::exp(d / 2), std::exp(-d / 2)}); }

// isometry taking i to the interior point w (no tangent rotation)
inline Mat translate_to(std::complex<double> w) {
    const double u = w.real(), v = w.imag();
    return mat2(std::sqrt(v), u / std::sqrt(v), 0.0, 1.0 / std::sqrt(v));
}

// frame(P, dir): isometry taking (i, straight up) to (P, tangent direction dir)
inline Mat frame(std::complex<double> p, double dir) {
    return translate_to(p) * rot_about_i(dir - M_PI / 2.0);
}

// point at hyperbolic distance d from i in tangent direction theta
inline std::complex<double> point_from_i(double theta, double d) {
    return mobius_apply(rot_about_i(theta - M_PI / 2.0), std::complex<double>(0, std::exp(d)));
}

// initial tangent direction at p of the geodesic from p to q
inline double direction(std::complex<double> p, std::complex<double> q) {
    const Mat t_inv = linalg::inverse(translate_to(p));
    const std::complex<double> z = mobius_apply(t_inv, q);
    const double x = z.real(), y = z.imag();
    double ang;
    if (std::abs(x) < 1e-14) {
        ang = (y > 1.0) ? M_PI / 2.0 : -M_PI / 2.0;
    } else {
        const double c = (x * x + y * y - 1.0) / (2.0 * x);
        const double sx = (x > 0) ? 1.0 : -1.0;
        ang = std::atan2(sx * c, sx);
    }
    return ang;
}

// unique orientation-preserving isometry taking the directed segment (p, q)
// to (p2, q2); the segments must have equal length
inline Mat carry_segment(std::complex<double> p, std::complex<double> q,
                         std::complex<double> p2, std::complex<double> q2) {
    return frame(p2, direction(p2, q2)) * linalg::inverse(frame(p, direction(p, q)));
}

// the 2x2 rotation with entries cos(phi/2), sin(phi/2) (tangent rotation by
// phi about i) pushed through the principal embedding
inline SquareMatrix rotation_embed(double phi, int n) {
    return lie::sym_embed(rot_about_i(phi), n);
}

// --- the regular-octagon genus-2 representation ---------------------------------

namespace detail {

// side-pairing matrices of the regular octagon with the standard
// identification a1 b1 a1' b1' a2 b2 a2' b2', as a function of the
// circumradius; vertex k sits at distance R in direction (2k+1)pi/8
inline std::array<Mat, 4> octagon_pairings(double big_r) {
    std::array<std::complex<double>, 8> v;
    for (int k = 0; k < 8; ++k) v[k] = point_from_i((2 * k + 1) * M_PI / 8.0, big_r);
    auto pair_for = [&](int pos, int neg) {
        // pairing maps the side carrying the inverse label onto the side
        // carrying the positive label, reversing the boundary direction
        return carry_segment(v[neg], v[(neg + 1) % 8], v[(pos + 1) % 8], v[pos]);
    };
    // the vertex cycle of this pairing closes up on [a1,b1][a2,b2] once the
    // b-generators are taken as the inverse pairings
    return {pair_for(0, 2), linalg::inverse(pair_for(1, 3)), pair_for(4, 6),
            linalg::inverse(pair_for(5, 7))};
}

inline double octagon_residual(double big_r) {
    auto g = octagon_pairings(big_r);
    auto inv = [](const Mat& m) { return linalg::inverse(m); };
    Mat rel = g[0] * g[1] * inv(g[0]) * inv(g[1]) * g[2] * g[3] * inv(g[2]) * inv(g[3]);
    rel *= 1.0 / std::sqrt(std::abs(linalg::det(rel)));
    return grp::projective_identity_residual(rel);
}

}  // namespace detail

// Discrete faithful genus-2 representation carried by the regular hyperbolic
// octagon. The circumradius is solved so the surface relator lands on the
// projective identity; the closed form acosh(cot^2(pi/8)) only seeds the
// search.
inline Representation octagon_rep() {
    const double seed = std::acosh(3.0 + 2.0 * std::sqrt(2.0));
    double lo = seed - 0.05, hi = seed + 0.05;
    // golden-section minimization of the relator residual
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = detail::octagon_residual(c), fd = detail::octagon_residual(d);
    for (int it = 0; it < 200; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = detail::octagon_residual(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = detail::octagon_residual(d);
        }
        if (hi - lo < 1e-15) break;
    }
    const double big_r = 0.5 * (lo + hi);
    if (detail::octagon_residual(big_r) > 1e-9)
        throw ShootingFailed("octagon_rep: relator residual did not converge");
    Representation rep;
    rep.presentation = Presentation::surface(2);
    for (const Mat& m : detail::octagon_pairings(big_r))
        rep.images.push_back(SquareMatrix::unimodular(m));
    return rep;
}

// --- hyperbolic triangle orbifold representations --------------------------------

// Rotation generators of orders (p, q, r) about the vertices of the
// hyperbolic triangle with angles pi/p, pi/q, pi/r; the product of the three
// is the identity.
inline Representation triangle_rep(int p, int q, int r) {
    Presentation pres = Presentation::triangle_orbifold(p, q, r);  // validates signature
    const double al = M_PI / p, be = M_PI / q, ga = M_PI / r;
    const double c_len = std::acosh((std::cos(al) * std::cos(be) + std::cos(ga)) /
                                    (std::sin(al) * std::sin(be)));
    const double b_len = std::acosh((std::cos(al) * std::cos(ga) + std::cos(be)) /
                                    (std::sin(al) * std::sin(ga)));
    const std::complex<double> va(0.0, 1.0);
    const std::complex<double> vb = point_from_i(0.0, c_len);
    const std::complex<double> vc = point_from_i(al, b_len);
    auto rotation_about = [](std::complex<double> w, double tangent_angle) {
        const Mat t = translate_to(w);
        return t * rot_about_i(tangent_angle) * linalg::inverse(t);
    };
    Representation rep;
    rep.presentation = pres;
    rep.images.push_back(SquareMatrix::unimodular(rotation_about(va, 2.0 * al)));
    rep.images.push_back(SquareMatrix::unimodular(rotation_about(vb, 2.0 * be)));
    rep.images.push_back(SquareMatrix::unimodular(rotation_about(vc, 2.0 * ga)));
    if (rep.relator_residual() > 1e-9)
        throw ShootingFailed("triangle_rep: rotation product missed the identity");
    return rep;
}

// axis of the image of a word under a PSL2 representation
inline Geodesic word_axis(const Representation& rep2, const Word& w) {
    return axis(MobiusElement{grp::eval_word(rep2, w).m});
}

}  // namespace hitflow::hyp

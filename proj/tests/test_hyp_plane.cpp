#include <catch2/catch_amalgamated.hpp>

#include "hitflow/hyp_plane.hpp"

using namespace hitflow;
using hyp::BoundaryPoint;
using hyp::Geodesic;
using hyp::MobiusElement;
using linalg::Mat;

TEST_CASE("axis endpoints and orientation", "[hyp_plane]") {
    auto boost = MobiusElement::unimodular(Mat::diag({std::exp(0.5), std::exp(-0.5)}));
    auto g = hyp::axis(boost);
    REQUIRE(std::abs(g.a.value()) < 1e-12);  // repelling at 0
    REQUIRE(g.b.is_infinite());              // attracting at infinity

    // [[cosh 1, sinh 1],[sinh 1, cosh 1]] translates along (-1, 1); oracle:
    // fixed-point equation c z^2 + (d - a) z - b = 0 => z = +-1
    auto m = MobiusElement::unimodular(
        hyp::mat2(std::cosh(1.0), std::sinh(1.0), std::sinh(1.0), std::cosh(1.0)));
    auto h = hyp::axis(m);
    const double disc = std::sqrt(std::pow(m.m(0, 0) - m.m(1, 1), 2) + 4 * m.m(0, 1) * m.m(1, 0));
    const double z1 = ((m.m(0, 0) - m.m(1, 1)) + disc) / (2 * m.m(1, 0));
    const double z2 = ((m.m(0, 0) - m.m(1, 1)) - disc) / (2 * m.m(1, 0));
    REQUIRE(std::min(z1, z2) == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(std::max(z1, z2) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(h.a.value() == Catch::Approx(-1.0).margin(1e-10));
    REQUIRE(h.b.value() == Catch::Approx(1.0).margin(1e-10));

    auto parab = MobiusElement::unimodular(hyp::mat2(1, 1, 0, 1));
    REQUIRE_THROWS_AS(hyp::axis(parab), NotHyperbolic);
}

TEST_CASE("axis is equivariant under conjugation", "[hyp_plane]") {
    auto m = MobiusElement::unimodular(Mat::diag({2.0, 0.5}));
    auto g = hyp::mat2(1.3, 0.4, -0.2, (1 + 0.4 * -0.2) / 1.3);
    g *= 1.0 / std::sqrt(linalg::det(g));
    auto conj = MobiusElement::unimodular(g * m.m * linalg::inverse(g));
    auto ax = hyp::axis(m);
    auto axc = hyp::axis(conj);
    auto img_a = hyp::mobius_apply(g, ax.a);
    auto img_b = hyp::mobius_apply(g, ax.b);
    REQUIRE(std::abs(hyp::pair_det(img_a, axc.a)) < 1e-8);
    REQUIRE(std::abs(hyp::pair_det(img_b, axc.b)) < 1e-8);
}

TEST_CASE("crossing of orthogonal geodesics", "[hyp_plane]") {
    Geodesic up{BoundaryPoint::finite(0), BoundaryPoint::infinity()};
    Geodesic east{BoundaryPoint::finite(-1), BoundaryPoint::finite(1)};
    auto c = hyp::cross(up, east);
    REQUIRE(c.has_value());
    REQUIRE(std::abs(c->point - std::complex<double>(0, 1)) < 1e-12);
    REQUIRE(c->angle == Catch::Approx(M_PI / 2).margin(1e-12));

    Geodesic off{BoundaryPoint::finite(1), BoundaryPoint::finite(2)};
    REQUIRE_FALSE(hyp::cross(up, off).has_value());
}

TEST_CASE("crossing angle against the tangent oracle", "[hyp_plane]") {
    // (0, inf) x (-1, 3): circle center 1 radius 2, crossing at (0, sqrt 3);
    // Euclidean tangent there is (sqrt 3, 1)/2, so the angle to the vertical
    // is pi - 2 atan(sqrt 3) = pi/3
    Geodesic up{BoundaryPoint::finite(0), BoundaryPoint::infinity()};
    Geodesic g2{BoundaryPoint::finite(-1), BoundaryPoint::finite(3)};
    auto c = hyp::cross(up, g2);
    REQUIRE(c.has_value());
    REQUIRE(std::abs(c->point - std::complex<double>(0, std::sqrt(3.0))) < 1e-12);
    REQUIRE(c->angle == Catch::Approx(M_PI - 2.0 * std::atan(std::sqrt(3.0))).margin(1e-12));
    REQUIRE(c->sign == -1);

    // oracle recomputation from raw Euclidean tangents
    const double slope_angle = std::atan2(1.0, std::sqrt(3.0));
    REQUIRE(c->angle == Catch::Approx(M_PI / 2 - slope_angle).margin(1e-12));
}

TEST_CASE("crossing symmetry and orientation reversal", "[hyp_plane]") {
    Geodesic g1{BoundaryPoint::finite(-0.3), BoundaryPoint::finite(2.0)};
    Geodesic g2{BoundaryPoint::finite(0.4), BoundaryPoint::finite(5.0)};
    auto c12 = hyp::cross(g1, g2);
    auto c21 = hyp::cross(g2, g1);
    REQUIRE(c12.has_value());
    REQUIRE(c21.has_value());
    // swapping arguments keeps the unsigned angle and flips the sign
    REQUIRE(c12->angle == Catch::Approx(c21->angle).margin(1e-12));
    REQUIRE(c12->sign == -c21->sign);
    // reversing either orientation maps the angle to its complement
    Geodesic g2r{g2.b, g2.a};
    auto c12r = hyp::cross(g1, g2r);
    REQUIRE(c12r.has_value());
    REQUIRE(c12r->angle == Catch::Approx(M_PI - c12->angle).margin(1e-12));
    REQUIRE(c12r->sign == -c12->sign);

    Geodesic shared{BoundaryPoint::finite(-0.3), BoundaryPoint::finite(7.0)};
    REQUIRE_THROWS_AS(hyp::cross(g1, shared), SharedEndpoint);
}

TEST_CASE("rotation embedding", "[hyp_plane]") {
    REQUIRE((hyp::rotation_embed(0.0, 3).m - Mat::identity(3)).max_abs() < 1e-12);

    // R(pi) is the embedded rotation by pi/2; its square embeds the full
    // rotation, which is projectively trivial, and R(pi) itself reverses the
    // vertical axis (diagonal order of embedded boosts flips)
    auto rpi = hyp::rotation_embed(M_PI, 3);
    auto sq = rpi.m * rpi.m;
    auto full = lie::sym_embed(hyp::rot_about_i(M_PI) * hyp::rot_about_i(M_PI), 3);
    REQUIRE((sq - full.m).max_abs() < 1e-12);
    REQUIRE(grp::projective_identity_residual(sq) < 1e-12);
    const Mat boost = Mat::diag({2.0, 1.0, 0.5});
    const Mat flipped = rpi.m * boost * linalg::inverse(rpi.m);
    REQUIRE((flipped - Mat::diag({0.5, 1.0, 2.0})).max_abs() < 1e-12);

    // entries at phi = pi/2 from the quadratic-form formulas
    auto r = hyp::rotation_embed(M_PI / 2, 3);
    const double a = std::cos(M_PI / 4), b = std::sin(M_PI / 4);
    REQUIRE(r.m(0, 0) == Catch::Approx(a * a));
    REQUIRE(r.m(0, 1) == Catch::Approx(a * b));
    REQUIRE(r.m(0, 2) == Catch::Approx(b * b));
    REQUIRE(r.m(1, 0) == Catch::Approx(-2 * a * b));
    REQUIRE(r.m(1, 1) == Catch::Approx(a * a - b * b).margin(1e-12));

    // orthogonality in the symmetric-square inner product diag(1, 1/2, 1)
    const Mat gm = Mat::diag({1.0, 0.5, 1.0});
    for (double phi : {0.3, 1.1, 2.7}) {
        auto rm = hyp::rotation_embed(phi, 3).m;
        REQUIRE((rm.transpose() * gm * rm - gm).max_abs() < 1e-12);
    }
}

TEST_CASE("octagon representation", "[hyp_plane]") {
    auto rep = hyp::octagon_rep();
    REQUIRE(rep.relator_residual() < 1e-9);

    // regular-octagon symmetry: equal traces across the four generators
    const double t0 = std::abs(rep.images[0].m.trace());
    for (int i = 1; i < 4; ++i)
        REQUIRE(std::abs(rep.images[i].m.trace()) == Catch::Approx(t0).margin(1e-9));

    // translation length consistent with the trace
    auto mob = MobiusElement{rep.images[0].m};
    REQUIRE(mob.translation_length() ==
            Catch::Approx(2.0 * std::acosh(std::abs(mob.trace()) / 2.0)));

    // discreteness proxy: all cyclically reduced words of length <= 4 hyperbolic
    int checked = 0;
    std::function<void(std::vector<int>&, const Mat&)> dfs = [&](std::vector<int>& w,
                                                                 const Mat& acc) {
        if (!w.empty()) {
            const bool cyc_reduced = !(w.size() >= 2 && w.front() % 4 == w.back() % 4 &&
                                       (w.front() < 4) != (w.back() < 4));
            if (cyc_reduced) {
                ++checked;
                REQUIRE(std::abs(acc.trace()) > 2.0 + 1e-9);
            }
        }
        if (w.size() == 4) return;
        for (int l = 0; l < 8; ++l) {
            if (!w.empty()) {
                const int p = w.back();
                if (p % 4 == l % 4 && (p < 4) != (l < 4)) continue;
            }
            w.push_back(l);
            const Mat& g = rep.images[l % 4].m;
            dfs(w, l < 4 ? acc * g : acc * linalg::inverse(g));
            w.pop_back();
        }
    };
    std::vector<int> w;
    dfs(w, Mat::identity(2));
    REQUIRE(checked > 2000);
}

TEST_CASE("triangle orbifold representations", "[hyp_plane]") {
    auto rep = hyp::triangle_rep(2, 3, 7);
    REQUIRE(rep.relator_residual() < 1e-9);
    REQUIRE(std::abs(rep.images[0].m.trace()) ==
            Catch::Approx(2 * std::cos(M_PI / 2)).margin(1e-10));
    REQUIRE(std::abs(rep.images[1].m.trace()) ==
            Catch::Approx(2 * std::cos(M_PI / 3)).margin(1e-10));
    REQUIRE(std::abs(rep.images[2].m.trace()) ==
            Catch::Approx(2 * std::cos(M_PI / 7)).margin(1e-10));

    // defining relation: product of the three rotations is the identity
    auto prod = rep.images[0].m * rep.images[1].m * rep.images[2].m;
    REQUIRE(grp::projective_identity_residual(prod) < 1e-9);

    REQUIRE_THROWS_AS(hyp::triangle_rep(2, 3, 5), NotHyperbolicSignature);
}

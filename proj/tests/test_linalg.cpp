#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hitflow/eigen_real.hpp"
#include "hitflow/linalg.hpp"

using namespace hitflow;
using linalg::Mat;

namespace {

Mat random_mat(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat m(n, n);
    for (double& x : m.a) x = u(rng);
    return m;
}

}  // namespace

TEST_CASE("lu solve and determinant", "[linalg]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        Mat m = random_mat(rng, n);
        if (std::abs(linalg::det(m)) < 1e-3) continue;
        Mat inv = linalg::inverse(m);
        REQUIRE((m * inv - Mat::identity(n)).max_abs() < 1e-10);
    }
    Mat d = Mat::diag({2.0, 3.0, -1.0});
    REQUIRE(linalg::det(d) == Catch::Approx(-6.0));
}

TEST_CASE("expm matches diagonal and series cases", "[linalg]") {
    Mat d = Mat::diag({0.3, -0.1, -0.2});
    Mat e = linalg::expm(d);
    REQUIRE(e(0, 0) == Catch::Approx(std::exp(0.3)).epsilon(1e-13));
    REQUIRE(e(1, 1) == Catch::Approx(std::exp(-0.1)).epsilon(1e-13));
    REQUIRE(e(2, 2) == Catch::Approx(std::exp(-0.2)).epsilon(1e-13));

    // nilpotent: exp is the finite series
    Mat nil(3, 3);
    nil(0, 1) = 1.2;
    nil(1, 2) = -0.7;
    Mat en = linalg::expm(nil);
    REQUIRE(en(0, 1) == Catch::Approx(1.2));
    REQUIRE(en(0, 2) == Catch::Approx(1.2 * -0.7 / 2.0));
    REQUIRE(en(2, 2) == Catch::Approx(1.0));

    // group law exp(tX)exp(sX) = exp((t+s)X)
    std::mt19937_64 rng(11);
    Mat x = random_mat(rng, 4, 0.8);
    Mat lhs = linalg::expm(x * 0.4) * linalg::expm(x * 0.25);
    Mat rhs = linalg::expm(x * 0.65);
    REQUIRE((lhs - rhs).max_abs() < 1e-12);
}

TEST_CASE("jacobi symmetric eigensolver", "[linalg]") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        Mat m = random_mat(rng, n);
        Mat s = m + m.transpose();
        linalg::SymEig e = linalg::jacobi_symmetric(s);
        for (int c = 0; c < n; ++c) {
            std::vector<double> v(n), sv(n, 0.0);
            for (int r = 0; r < n; ++r) v[r] = e.vectors(r, c);
            for (int r = 0; r < n; ++r)
                for (int k = 0; k < n; ++k) sv[r] += s(r, k) * v[k];
            for (int r = 0; r < n; ++r)
                REQUIRE(sv[r] == Catch::Approx(e.values[c] * v[r]).margin(1e-9));
        }
    }
}

TEST_CASE("nullspace and rank", "[linalg]") {
    // rank-2 matrix with known kernel (1, 1, -1)
    Mat m(3, 3);
    m(0, 0) = 1;
    m(0, 2) = 1;
    m(1, 1) = 2;
    m(1, 2) = 2;
    m(2, 0) = 1;
    m(2, 1) = 1;
    m(2, 2) = 2;
    REQUIRE(linalg::rank(m) == 2);
    Mat ns = linalg::nullspace(m);
    REQUIRE(ns.cols == 1);
    const double s = ns(0, 0) / 1.0;
    REQUIRE(ns(1, 0) == Catch::Approx(s).margin(1e-10));
    REQUIRE(ns(2, 0) == Catch::Approx(-s).margin(1e-10));
}

TEST_CASE("polynomial roots of real matrices", "[eigen]") {
    // spectrum of a triangular matrix is its diagonal
    Mat t(4, 4);
    t(0, 0) = 2.0;
    t(1, 1) = -0.5;
    t(2, 2) = 1.25;
    t(3, 3) = 0.1;
    t(0, 1) = 3.0;
    t(1, 3) = -2.0;
    auto roots = eigen::spectrum(t);
    std::vector<double> re;
    for (auto z : roots) {
        REQUIRE(std::abs(z.imag()) < 1e-9);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    REQUIRE(re[0] == Catch::Approx(-0.5).margin(1e-10));
    REQUIRE(re[1] == Catch::Approx(0.1).margin(1e-10));
    REQUIRE(re[2] == Catch::Approx(1.25).margin(1e-10));
    REQUIRE(re[3] == Catch::Approx(2.0).margin(1e-10));

    // rotation block has a complex pair
    Mat r(3, 3);
    r(0, 0) = std::cos(1.0);
    r(0, 1) = -std::sin(1.0);
    r(1, 0) = std::sin(1.0);
    r(1, 1) = std::cos(1.0);
    r(2, 2) = 1.0;
    auto rr = eigen::spectrum(r);
    int complex_count = 0;
    for (auto z : rr)
        if (std::abs(z.imag()) > 1e-6) ++complex_count;
    REQUIRE(complex_count == 2);
}

TEST_CASE("qr fallback eigenvalues agree with polynomial route", "[eigen]") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        Mat m = random_mat(rng, n);
        auto a = eigen::spectrum(m);
        auto b = eigen::qr_eigenvalues(m);
        std::vector<double> ra, rb;
        for (auto z : a) ra.push_back(z.real());
        for (auto z : b) rb.push_back(z.real());
        std::sort(ra.begin(), ra.end());
        std::sort(rb.begin(), rb.end());
        REQUIRE(ra.size() == rb.size());
        for (size_t i = 0; i < ra.size(); ++i)
            REQUIRE(ra[i] == Catch::Approx(rb[i]).margin(1e-6));
    }
}

TEST_CASE("inverse iteration eigenvectors", "[eigen]") {
    std::mt19937_64 rng(31);
    Mat g = random_mat(rng, 5);
    while (std::abs(linalg::det(g)) < 0.05) g = random_mat(rng, 5);
    Mat d = Mat::diag({3.0, 1.4, 0.9, 0.4, 0.1});
    Mat m = g * d * linalg::inverse(g);
    for (double lambda : {3.0, 1.4, 0.9, 0.4, 0.1}) {
        auto v = eigen::real_eigenvector(m, lambda);
        std::vector<double> mv(5, 0.0);
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) mv[r] += m(r, c) * v[c];
        for (int r = 0; r < 5; ++r) REQUIRE(mv[r] == Catch::Approx(lambda * v[r]).margin(1e-8));
    }
}

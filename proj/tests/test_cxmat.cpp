#include <catch_amalgamated.hpp>

#include <complex>

#include "cacheic/cxmat.hpp"

using namespace cacheic::cxmat;
using cacheic::domain_error;

namespace {

Mat3 real_mat(std::array<double, 9> v) {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.a[std::size_t(i)] = v[std::size_t(i)];
    return m;
}

double rel_diff(const Mat3& x, const Mat3& y) {
    double scale = std::max(max_abs_entry(x), max_abs_entry(y));
    double worst = 0.0;
    for (int i = 0; i < 9; ++i)
        worst = std::max(worst,
                         std::abs(x.a[std::size_t(i)] - y.a[std::size_t(i)]));
    return worst / scale;
}

const Mat3 kExample = real_mat({1, 2, 3, 4, 5, 6, 7, 8, 10});

} // namespace

TEST_CASE("determinant") {
    REQUIRE(det3(Mat3::identity()) == cd(1.0));
    REQUIRE(det3(kExample) == cd(-3.0));
    Mat3 diag = real_mat({1, 0, 0, 0, 2, 0, 0, 0, 3});
    REQUIRE(det3(diag) == cd(6.0));
    Mat3 singular = real_mat({1, 2, 3, 4, 5, 6, 7, 8, 9});
    REQUIRE(det3(singular) == cd(0.0));
    REQUIRE_FALSE(is_invertible(singular));
    REQUIRE(is_invertible(kExample));
}

TEST_CASE("adjugate matches the worked example") {
    Mat3 g = adjugate(kExample);
    Mat3 want = real_mat({2, 4, -3, 2, -11, 6, -3, 6, -3});
    for (int i = 0; i < 9; ++i)
        REQUIRE(g.a[std::size_t(i)] == want.a[std::size_t(i)]);

    Mat3 diag = real_mat({1, 0, 0, 0, 2, 0, 0, 0, 3});
    Mat3 gd = adjugate(diag);
    REQUIRE(gd.at(0, 0) == cd(6.0));
    REQUIRE(gd.at(1, 1) == cd(3.0));
    REQUIRE(gd.at(2, 2) == cd(2.0));
    REQUIRE(adjugate(Mat3::identity()) == Mat3::identity());
}

TEST_CASE("fundamental adjugate identity A adj(A) = det(A) I") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mat3 a = sample_channel(seed);
        Mat3 prod = a * adjugate(a);
        cd det = det3(a);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                cd want = (r == c) ? det : cd(0.0);
                REQUIRE(std::abs(prod.at(r, c) - want) <= 1e-9 * std::abs(det));
            }
    }
}

TEST_CASE("adjugate scaling laws") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Mat3 a = sample_channel(seed);
        // adj(adj(A)) = det(A) A for 3x3
        Mat3 twice = adjugate(adjugate(a));
        Mat3 want = det3(a) * a;
        REQUIRE(rel_diff(twice, want) <= 1e-12);
        // adj(cA) = c^2 adj(A); c = -1 gives adjugate(-A) == adjugate(A)
        cd c(0.7, -1.3);
        REQUIRE(rel_diff(adjugate(c * a), (c * c) * adjugate(a)) <= 1e-12);
        REQUIRE(rel_diff(adjugate(cd(-1.0) * a), adjugate(a)) <= 1e-15);
    }
}

TEST_CASE("adj_inverse recovers the preimage") {
    Mat3 b = real_mat({6, 0, 0, 0, 3, 0, 0, 0, 2});
    Mat3 a = adj_inverse(b);
    // adjugate of diag(1,2,3) is diag(6,3,2); preimage is fixed up to sign
    bool plus = true, minus = true;
    std::array<double, 3> d{1, 2, 3};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(a.at(i, i) - cd(d[std::size_t(i)])) > 1e-12) plus = false;
        if (std::abs(a.at(i, i) + cd(d[std::size_t(i)])) > 1e-12) minus = false;
    }
    REQUIRE((plus || minus));
    REQUIRE(rel_diff(adjugate(a), b) <= 1e-12);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mat3 m = sample_channel(seed);
        REQUIRE(rel_diff(adjugate(adj_inverse(m)), m) <= 1e-8);
        // the other direction only holds up to global sign
        Mat3 back = adj_inverse(adjugate(m));
        Mat3 neg = cd(-1.0) * m;
        REQUIRE((rel_diff(back, m) <= 1e-8 || rel_diff(back, neg) <= 1e-8));
    }

    Mat3 singular = real_mat({1, 2, 3, 4, 5, 6, 7, 8, 9});
    REQUIRE_THROWS_AS(adj_inverse(singular), domain_error);
}

TEST_CASE("solve3 inverts the channel") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Mat3 m = sample_channel(seed);
        std::array<cd, 3> v = {cd(1.0, -0.5), cd(-2.0, 0.25), cd(0.0, 3.0)};
        std::array<cd, 3> x = solve3(m, v);
        std::array<cd, 3> back = mat_vec(m, x);
        for (int i = 0; i < 3; ++i)
            REQUIRE(std::abs(back[std::size_t(i)] - v[std::size_t(i)]) <= 1e-10);
    }
    Mat3 singular = real_mat({1, 2, 3, 4, 5, 6, 7, 8, 9});
    REQUIRE_THROWS_AS(solve3(singular, std::array<cd, 3>{}), domain_error);
}

TEST_CASE("channel sampling is seeded and well conditioned") {
    REQUIRE(sample_channel(42) == sample_channel(42));
    REQUIRE_FALSE(sample_channel(42) == sample_channel(43));

    cd mean = 0.0;
    double var = 0.0;
    int bad_det = 0;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
        Mat3 m = sample_channel(std::uint64_t(s));
        for (const cd& z : m.a) {
            mean += z;
            var += std::norm(z);
        }
        if (std::abs(det3(m)) <= 1e-9) ++bad_det;
    }
    mean /= double(9 * draws);
    var /= double(9 * draws);
    REQUIRE(std::abs(mean) < 0.05);
    REQUIRE(var == Catch::Approx(1.0).margin(0.02)); // unit-variance entries
    REQUIRE(bad_det == 0);
}

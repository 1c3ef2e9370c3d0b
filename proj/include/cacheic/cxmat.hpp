#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "cacheic/errors.hpp"
#include "cacheic/rng.hpp"

// Complex 3x3 linear algebra: determinant, adjugate, inverse adjugate, and
// seeded channel sampling.
namespace cacheic::cxmat {

using cd = std::complex<double>;

// Row j = receiver, column k = transmitter.  at() is 0-based; e() takes the
// 1-based indices used throughout the stream bookkeeping.
struct Mat3 {
    std::array<cd, 9> a{};

    cd& at(int r, int c) { return a[std::size_t(3 * r + c)]; }
    const cd& at(int r, int c) const { return a[std::size_t(3 * r + c)]; }
    cd& e(int r, int c) { return a[std::size_t(3 * (r - 1) + (c - 1))]; }
    const cd& e(int r, int c) const { return a[std::size_t(3 * (r - 1) + (c - 1))]; }

    static Mat3 identity() {
        Mat3 m;
        m.at(0, 0) = m.at(1, 1) = m.at(2, 2) = 1.0;
        return m;
    }

    friend bool operator==(const Mat3& x, const Mat3& y) { return x.a == y.a; }
};

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cd s = 0.0;
            for (int k = 0; k < 3; ++k) s += x.at(i, k) * y.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

inline Mat3 operator*(cd c, const Mat3& x) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[std::size_t(i)] = c * x.a[std::size_t(i)];
    return r;
}

inline std::array<cd, 3> mat_vec(const Mat3& m, const std::array<cd, 3>& v) {
    std::array<cd, 3> r{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r[std::size_t(i)] += m.at(i, k) * v[std::size_t(k)];
    return r;
}

inline double max_abs_entry(const Mat3& m) {
    double mx = 0.0;
    for (const cd& z : m.a) mx = std::max(mx, std::abs(z));
    return mx;
}

inline cd det3(const Mat3& m) {
    return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) -
           m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0)) +
           m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
}

// Relative invertibility test: |det| must clear tol * (max |entry|)^3.
inline bool is_invertible(const Mat3& m, double tol = 1e-12) {
    double scale = max_abs_entry(m);
    return std::abs(det3(m)) > tol * scale * scale * scale;
}

// Entry (i,j) = (-1)^{i+j} det(M_{j,i}), M_{j,i} = m with row j and column i
// deleted.  Transposed-cofactor convention, so m * adjugate(m) = det * I.
inline Mat3 adjugate(const Mat3& m) {
    Mat3 g;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            if (r0 > r1) std::swap(r0, r1);
            if (c0 > c1) std::swap(c0, c1);
            cd minor = m.at(r0, c0) * m.at(r1, c1) - m.at(r0, c1) * m.at(r1, c0);
            g.at(i, j) = ((i + j) % 2 == 0) ? minor : -minor;
        }
    }
    return g;
}

// adj(B) / det(B)^{(K-2)/(K-1)} at K=3, principal square root.  Satisfies
// adjugate(adj_inverse(B)) == B; the other direction only holds up to sign
// because adjugate(-A) == adjugate(A).
inline Mat3 adj_inverse(const Mat3& b) {
    if (!is_invertible(b))
        throw domain_error("adj_inverse: matrix is singular within tolerance");
    cd root = std::sqrt(det3(b));
    Mat3 g = adjugate(b);
    for (cd& z : g.a) z /= root;
    return g;
}

// x = m^{-1} v via the adjugate; throws on singular m.
inline std::array<cd, 3> solve3(const Mat3& m, const std::array<cd, 3>& v) {
    if (!is_invertible(m)) throw domain_error("solve3: matrix is singular within tolerance");
    cd d = det3(m);
    std::array<cd, 3> x = mat_vec(adjugate(m), v);
    for (cd& z : x) z /= d;
    return x;
}

// 9 i.i.d. standard circularly-symmetric complex Gaussian entries, row-major
// draw order.  Same seed, same matrix.
inline Mat3 sample_channel(std::uint64_t seed) {
    Rng rng(seed);
    Mat3 m;
    for (int i = 0; i < 9; ++i) m.a[std::size_t(i)] = rng.complex_normal();
    return m;
}

} // namespace cacheic::cxmat

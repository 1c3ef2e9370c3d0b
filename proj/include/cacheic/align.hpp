#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cacheic/cxmat.hpp"
#include "cacheic/errors.hpp"
#include "cacheic/pointgrid.hpp"
#include "cacheic/rational.hpp"
#include "cacheic/zfnet.hpp"

// Real-interference-alignment constellation engine: integer constellations,
// monomial bases, receiver u-vectors, the power-to-parameter mapping,
// alignment-collapse census, monomial distinctness, minimum distance, and
// power accounting.
namespace cacheic::align {

using cxmat::cd;
using cxmat::Mat3;
using zfnet::ScalingFactors;
using zfnet::StreamId;

// Z_Q = Z intersect [-Q, Q].
inline std::vector<int> integer_points(int q) {
    if (q < 0) throw domain_error("integer_points: Q must be >= 0");
    std::vector<int> out;
    out.reserve(std::size_t(2 * q + 1));
    for (int v = -q; v <= q; ++v) out.push_back(v);
    return out;
}

// All exponent tuples in [1, L]^J, lexicographic order (last index fastest).
inline std::vector<std::vector<int>> monomial_basis(int L, int J) {
    if (L < 1 || J < 1) throw domain_error("monomial_basis: L and J must be >= 1");
    double count = std::pow(double(L), J);
    if (count > 2e6) throw guard_error("monomial_basis: L^J too large to enumerate");
    std::vector<std::vector<int>> out;
    out.reserve(std::size_t(count));
    std::vector<int> cur(std::size_t(J), 1);
    for (;;) {
        out.push_back(cur);
        int pos = J - 1;
        while (pos >= 0 && cur[std::size_t(pos)] == L) {
            cur[std::size_t(pos)] = 1;
            --pos;
        }
        if (pos < 0) break;
        ++cur[std::size_t(pos)];
    }
    return out;
}

// Exponent vector over the 27 base variables: indices 0..8 are the adjugate
// entries g_{xi,xitilde} in row-major order, indices 9..26 the 18 scaling
// factors in canonical stream order.
struct ExponentVec {
    std::array<std::int8_t, 27> e{};

    friend bool operator==(const ExponentVec& a, const ExponentVec& b) {
        return a.e == b.e;
    }
    friend bool operator<(const ExponentVec& a, const ExponentVec& b) {
        return a.e < b.e;
    }
    ExponentVec& add(const ExponentVec& o, int times = 1) {
        for (std::size_t i = 0; i < 27; ++i)
            e[i] = std::int8_t(e[i] + times * o.e[i]);
        return *this;
    }
};

inline std::size_t g_var(int xi, int xitilde) {
    return std::size_t(3 * (xi - 1) + (xitilde - 1));
}

inline std::size_t scale_var(const StreamId& s) {
    return std::size_t(9 + zfnet::stream_index(s));
}

inline std::string var_name(std::size_t i) {
    if (i < 9) return "g" + std::to_string(i / 3 + 1) + std::to_string(i % 3 + 1);
    return "s[" + zfnet::all_streams()[i - 9].label() + "]";
}

inline std::string exponent_str(const ExponentVec& v) {
    std::string out;
    for (std::size_t i = 0; i < 27; ++i) {
        if (v.e[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += var_name(i);
        if (v.e[i] != 1) out += "^" + std::to_string(int(v.e[i]));
    }
    return out.empty() ? "1" : out;
}

// The six components seen at receiver r from its interfering streams, in
// table order: each is (scaling factor of the stream) * (adjugate entry of
// its coefficient), sign dropped.
struct UVector {
    int receiver = 1;
    std::array<cd, 6> value{};
    std::array<ExponentVec, 6> expo{};
    std::array<StreamId, 6> source{};
    std::array<int, 6> sign{}; // sign the component actually carries at r
};

inline UVector u_vector(int r, const Mat3& g_adj, const ScalingFactors& scale) {
    if (r < 1 || r > 3) throw domain_error("u_vector: receiver must be 1..3");
    UVector u;
    u.receiver = r;
    const auto table = zfnet::stream_tables(r);
    for (std::size_t i = 0; i < 6; ++i) {
        const StreamId& s = table.interfering[i];
        zfnet::AdjIndex ai = zfnet::adjugate_index(s, r);
        u.source[i] = s;
        u.sign[i] = ai.sign;
        u.value[i] = scale.at(s) * g_adj.e(ai.xi, ai.xitilde);
        u.expo[i].e[g_var(ai.xi, ai.xitilde)] = 1;
        u.expo[i].e[scale_var(s)] = 1;
    }
    return u;
}

struct ConstellationSpec {
    int L = 1;
    long long Q = 1;
    double gamma = 1.0;
    double epsilon = 0.05;
    double c1 = 1.0;
    std::uint64_t I = 70;
    double zeta = 34.05;
    std::int64_t l6 = 1; // L^6, the substream count per stream
};

inline std::int64_t pow6(std::int64_t x) {
    std::int64_t r = 1;
    for (int i = 0; i < 6; ++i) r *= x;
    return r;
}

inline ConstellationSpec make_spec(int L, long long Q, double gamma,
                                   double epsilon = 0.05, double c1 = 1.0) {
    if (L < 1) throw domain_error("spec: L must be >= 1");
    if (Q < 1) throw domain_error("spec: Q must be >= 1");
    if (!(gamma > 0.0)) throw domain_error("spec: gamma must be positive");
    ConstellationSpec s;
    s.L = L;
    s.Q = Q;
    s.gamma = gamma;
    s.epsilon = epsilon;
    s.c1 = c1;
    s.l6 = pow6(L);
    s.I = std::uint64_t(6 * s.l6 + pow6(L + 1));
    s.zeta = double(s.I) / 2.0 - 1.0 + epsilon;
    return s;
}

// Result of the asymptotic power mapping.  At every physically simulable P
// the mapping lands below Q = 1, which is reported as a degenerate spec
// rather than silently rounding up.
struct SpecFromPower {
    bool degenerate = false;
    double q_raw = 0.0;
    std::string message;
    std::optional<ConstellationSpec> spec;
};

inline SpecFromPower spec_from_power(double p, int L, double epsilon, double c1 = 1.0) {
    if (!(p > 0.0) || L < 1 || !(epsilon > 0.0) || !(c1 > 0.0))
        throw domain_error("spec_from_power: all inputs must be positive");
    std::int64_t l6 = pow6(L);
    double I = double(6 * l6 + pow6(L + 1));
    SpecFromPower out;
    out.q_raw = std::pow(p, (1.0 - epsilon) / (I + 2.0 * epsilon)) / 6.0;
    long long q = (long long)std::floor(out.q_raw);
    if (q < 1) {
        out.degenerate = true;
        out.message = "asymptotic regime unreachable at this P: Q = floor(" +
                      std::to_string(out.q_raw) + ") < 1";
        return out;
    }
    double gamma =
        c1 * std::pow(p, (I - 2.0 + 4.0 * epsilon) / (2.0 * (I + 2.0 * epsilon)));
    out.spec = make_spec(L, q, gamma, epsilon, c1);
    return out;
}

// P-exponents of the analytic min-distance floor Gamma*(6Q)^{-zeta} and of
// the power cap Gamma^2 Q^2 under the asymptotic mapping, exact in eps.
// They must come out as eps/2 and 1.
inline std::pair<Rational, Rational> spec_power_exponents(int L, Rational eps) {
    Rational I(6 * pow6(L) + pow6(L + 1));
    Rational denom = I + Rational(2) * eps;
    Rational e_gamma = (I - Rational(2) + Rational(4) * eps) / (Rational(2) * denom);
    Rational e_q = (Rational(1) - eps) / denom;
    Rational zeta = I / Rational(2) - Rational(1) + eps;
    Rational min_dist_exp = e_gamma - zeta * e_q;
    Rational power_exp = Rational(2) * e_gamma + Rational(2) * e_q;
    return {min_dist_exp, power_exp};
}

// Evaluate the monomial basis T_L(u): value of each exponent tuple at the
// u-vector components, basis order matching monomial_basis(L, 6).
inline std::vector<cd> evaluate_basis(const UVector& u, int L) {
    auto tuples = monomial_basis(L, 6);
    std::vector<cd> vals;
    vals.reserve(tuples.size());
    for (const auto& t : tuples) {
        cd v = 1.0;
        for (std::size_t i = 0; i < 6; ++i)
            for (int e = 0; e < t[i]; ++e) v *= u.value[i];
        vals.push_back(v);
    }
    return vals;
}

struct TxConstellation {
    StreamId stream;
    std::vector<std::pair<std::vector<int>, cd>> points; // (label tuple, value)
};

// All points coefficient * sum_v v * q_v with q in Z_Q^{L^6}, labels in
// lexicographic order.
inline TxConstellation tx_constellation(const StreamId& s, const ConstellationSpec& spec,
                                        const UVector& u, cd coefficient) {
    double total = std::pow(double(2 * spec.Q + 1), double(spec.l6));
    if (total > 2e6)
        throw guard_error("tx_constellation: (2Q+1)^(L^6) too large to enumerate");
    std::vector<cd> basis = evaluate_basis(u, spec.L);
    TxConstellation out;
    out.stream = s;
    std::vector<int> q(std::size_t(spec.l6), int(-spec.Q));
    for (;;) {
        cd val = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) val += basis[i] * double(q[i]);
        out.points.emplace_back(q, coefficient * val);
        std::size_t pos = q.size();
        while (pos > 0 && q[pos - 1] == int(spec.Q)) q[--pos] = int(-spec.Q);
        if (pos == 0) break;
        ++q[pos - 1];
    }
    return out;
}

// Exponent census of the interference collapse at a receiver: the six
// interfering streams transmit 6 L^6 monomials, but the received exponent
// tuples e + unit_i dedupe into a union inside [1, L+1]^6.
struct UnionCensus {
    std::int64_t transmitted_dims = 0;
    std::vector<std::array<int, 6>> union_monomials; // sorted, deduplicated
};

inline UnionCensus interference_union_exponents(int L) {
    if (L < 1) throw domain_error("interference_union_exponents: L must be >= 1");
    auto tuples = monomial_basis(L, 6);
    std::set<std::array<int, 6>> uni;
    for (const auto& t : tuples)
        for (std::size_t i = 0; i < 6; ++i) {
            std::array<int, 6> e{};
            for (std::size_t m = 0; m < 6; ++m) e[m] = t[m];
            e[i] += 1;
            uni.insert(e);
        }
    UnionCensus out;
    out.transmitted_dims = 6 * std::int64_t(tuples.size());
    out.union_monomials.assign(uni.begin(), uni.end());
    return out;
}

inline bool union_contained_in_box(const UnionCensus& c, int L) {
    for (const auto& e : c.union_monomials)
        for (int x : e)
            if (x < 1 || x > L + 1) return false;
    return true;
}

struct DistinctnessReport {
    bool distinct = true;
    std::size_t monomial_count = 0;
    std::optional<std::pair<std::string, std::string>> collision;
};

// Pairwise distinctness of labeled exponent vectors; the first colliding pair
// is reported by label.
inline DistinctnessReport
check_distinct(const std::vector<std::pair<ExponentVec, std::string>>& monomials) {
    DistinctnessReport rep;
    rep.monomial_count = monomials.size();
    std::map<ExponentVec, std::string> seen;
    for (const auto& [e, label] : monomials) {
        auto [it, inserted] = seen.emplace(e, label);
        if (!inserted) {
            rep.distinct = false;
            rep.collision = {it->second, label};
            return rep;
        }
    }
    return rep;
}

inline std::string tuple_str(const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

// Every monomial of the combined constellation at receiver 1, as 27-variable
// exponent vectors: for each desired stream, its scaling factor and adjugate
// entry times each basis monomial of the u-vector it is modulated on; for the
// interference, the deduplicated union monomials over u^(1).
inline std::vector<std::pair<ExponentVec, std::string>>
receiver1_monomials(int L) {
    std::vector<std::pair<ExponentVec, std::string>> out;
    auto tuples = monomial_basis(L, 6);
    Mat3 dummy_g; // exponent bookkeeping only; values unused
    ScalingFactors ones = ScalingFactors::ones();
    std::array<UVector, 3> us = {u_vector(1, dummy_g, ones), u_vector(2, dummy_g, ones),
                                 u_vector(3, dummy_g, ones)};

    for (const StreamId& s : zfnet::stream_tables(1).desired) {
        zfnet::AdjIndex ai = zfnet::adjugate_index(s, 1);
        const UVector& u = us[std::size_t(s.interference_receiver() - 1)];
        ExponentVec lead;
        lead.e[g_var(ai.xi, ai.xitilde)] = 1;
        lead.e[scale_var(s)] = 1;
        for (const auto& t : tuples) {
            ExponentVec e = lead;
            for (std::size_t i = 0; i < 6; ++i) e.add(u.expo[i], t[i]);
            out.emplace_back(e, s.label() + tuple_str(t));
        }
    }

    const UVector& u1 = us[0];
    for (const auto& em : interference_union_exponents(L).union_monomials) {
        ExponentVec e;
        std::vector<int> t(em.begin(), em.end());
        for (std::size_t i = 0; i < 6; ++i) e.add(u1.expo[i], em[i]);
        out.emplace_back(e, "interference" + tuple_str(t));
    }
    return out;
}

inline DistinctnessReport verify_monomial_distinctness(int L) {
    return check_distinct(receiver1_monomials(L));
}

// Minimum pairwise Euclidean distance; quadratic scan, intended for small
// point lists.  Returns 0 when the list contains duplicates.
inline double min_distance(const std::vector<cd>& points) {
    if (points.size() < 2)
        throw domain_error("min_distance: need at least 2 points");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, std::abs(points[i] - points[j]));
    return best;
}

inline double constellation_power(const std::vector<cd>& points) {
    if (points.empty()) throw domain_error("constellation_power: no points");
    double s = 0.0;
    for (const cd& p : points) s += std::norm(p);
    return s / double(points.size());
}

// Rescale factor that brings a constellation measured at c1 = 1 under the
// target power.
inline double normalize_c1(double target_power, double power_at_unit_c1) {
    if (!(target_power > 0.0) || !(power_at_unit_c1 > 0.0))
        throw domain_error("normalize_c1: powers must be positive");
    return std::sqrt(target_power / power_at_unit_c1);
}

// Minimum distance of the lattice-style constellation sum_i c_i Z_Q, computed
// over label differences: min |sum_i c_i d_i| over d in [-2Q, 2Q]^n \ {0}.
// Equals the point-set minimum distance (0 when labels collide).  Splits the
// coefficients in half and meets in the middle with a grid nearest-neighbor
// search, which keeps 12-coefficient problems around 5^6 instead of 5^12.
inline double min_distance_label_diff(const std::vector<cd>& coeffs, long long q) {
    if (coeffs.empty()) throw domain_error("min_distance_label_diff: no coefficients");
    if (q < 1) throw domain_error("min_distance_label_diff: Q must be >= 1");
    std::size_t half = coeffs.size() / 2;
    int span = int(2 * q);

    auto sums = [&](std::size_t from, std::size_t to, std::size_t& zero_idx) {
        std::vector<cd> out;
        std::size_t n = to - from;
        std::vector<int> d(n, -span);
        zero_idx = 0;
        for (;;) {
            cd v = 0.0;
            bool all_zero = true;
            for (std::size_t i = 0; i < n; ++i) {
                v += coeffs[from + i] * double(d[i]);
                if (d[i] != 0) all_zero = false;
            }
            if (all_zero) zero_idx = out.size();
            out.push_back(v);
            std::size_t pos = n;
            while (pos > 0 && d[pos - 1] == span) d[--pos] = -span;
            if (pos == 0) break;
            ++d[pos - 1];
        }
        return out;
    };

    std::size_t za = 0, zb = 0;
    std::vector<cd> a = sums(0, half, za);
    std::vector<cd> b = sums(half, coeffs.size(), zb);
    if (half == 0) { // single-sided: tiny coefficient lists
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < b.size(); ++i)
            if (i != zb) best = std::min(best, std::abs(b[i]));
        return best;
    }

    PointGrid grid(b);
    // Query in ascending |a| so the global bound shrinks early; each later
    // query then prunes after a ring or two instead of walking the grid.
    std::vector<std::size_t> order(a.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::norm(a[x]) < std::norm(a[y]); });
    double best2 = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
        auto n = grid.nearest(-a[i], i == za ? zb : std::size_t(-1), best2);
        if (n.dist2 < best2) best2 = n.dist2;
    }
    return std::sqrt(best2);
}

} // namespace cacheic::align

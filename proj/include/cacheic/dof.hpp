#pragma once

#include <cstdint>
#include <vector>

#include "cacheic/errors.hpp"
#include "cacheic/rational.hpp"

// Exact-rational degrees-of-freedom accounting: the tradeoff curve, the
// per-user DoF formula, the load-balancing census, and convexity checks.
namespace cacheic::dof {

struct TradeoffPoint {
    Rational mu;
    Rational inv_dof;
};

// Inverse sum DoF at normalized cache size mu:
//   13/18 - mu/2   for 1/3 <= mu <= 2/3
//   1/2   - mu/6   for 2/3 <= mu <= 1
// mu > 1 is clamped (the curve is constant there); mu < 1/3 is out of domain.
inline Rational theorem_inv_dof(Rational mu) {
    if (mu < Rational(1, 3))
        throw domain_error("theorem_inv_dof: DoF(mu) is not defined for mu < 1/3");
    if (mu > Rational(1)) mu = Rational(1);
    if (mu <= Rational(2, 3)) return Rational(13, 18) - mu / Rational(2);
    return Rational(1, 2) - mu / Rational(6);
}

// Per-user DoF of the mu=2/3 alignment scheme: 6L^6 (1-eps) / (I + 2 eps)
// with I = 6L^6 + (L+1)^6.  Exact rational; approaches 6/7 as L grows.
inline Rational per_user_dof(int L, Rational eps) {
    if (L < 1) throw domain_error("per_user_dof: L must be >= 1");
    if (eps < Rational(0)) throw domain_error("per_user_dof: eps must be >= 0");
    std::int64_t l6 = 1, lp6 = 1;
    for (int i = 0; i < 6; ++i) {
        l6 *= L;
        lp6 *= L + 1;
    }
    Rational I = Rational(6 * l6 + lp6);
    return Rational(6) * Rational(l6) * (Rational(1) - eps) / (I + Rational(2) * eps);
}

struct CensusResult {
    int all_same = 0;
    int two_one = 0;
    int all_distinct = 0;
    Rational frac_all_same;
    Rational frac_two_one;
    Rational frac_all_distinct;
};

// Whole-file placement model: each of the three requested files lives at one
// of the three transmitters, 27 assignments in total, classified by how the
// requests pile up.
inline CensusResult load_balance_census() {
    CensusResult r;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            for (int c = 1; c <= 3; ++c) {
                if (a == b && b == c)
                    ++r.all_same;
                else if (a != b && b != c && a != c)
                    ++r.all_distinct;
                else
                    ++r.two_one;
            }
    int total = r.all_same + r.two_one + r.all_distinct;
    r.frac_all_same = Rational(r.all_same, total);
    r.frac_two_one = Rational(r.two_one, total);
    r.frac_all_distinct = Rational(r.all_distinct, total);
    return r;
}

// R with 1/R = a1/r1 + (1-a1)/r2, exact.  Also lives here (rather than only
// in the placement module) because the convexity check below consumes it.
inline Rational combined_rate(Rational a1, Rational r1, Rational r2) {
    if (a1 < Rational(0) || a1 > Rational(1))
        throw domain_error("combined_rate: alpha1 must lie in [0,1]");
    if (r1 <= Rational(0) || r2 <= Rational(0))
        throw domain_error("combined_rate: rates must be positive");
    Rational a2 = Rational(1) - a1;
    return (r1 * r2) / (a1 * r2 + a2 * r1);
}

// True iff inv_dof is convex over the given mu-sorted points (slopes
// nondecreasing, exact arithmetic).  For every adjacent pair that lies on the
// theorem curve inside a single linear piece, additionally requires the
// memory-sharing interpolation (combined_rate of the endpoint DoFs) to
// reproduce theorem_inv_dof at the segment midpoint.
inline bool convexity_check(const std::vector<TradeoffPoint>& pts) {
    if (pts.size() < 3) throw domain_error("convexity_check: need at least 3 points");
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (!(pts[i - 1].mu < pts[i].mu))
            throw domain_error("convexity_check: points must be sorted by mu, strictly increasing");

    bool prev_set = false;
    Rational prev_slope;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Rational slope =
            (pts[i].inv_dof - pts[i - 1].inv_dof) / (pts[i].mu - pts[i - 1].mu);
        if (prev_set && slope < prev_slope) return false;
        prev_slope = slope;
        prev_set = true;
    }

    auto on_curve = [](const TradeoffPoint& p) {
        return p.mu >= Rational(1, 3) && p.mu <= Rational(1) &&
               theorem_inv_dof(p.mu) == p.inv_dof;
    };
    auto one_piece = [](Rational lo, Rational hi) {
        return hi <= Rational(2, 3) || lo >= Rational(2, 3);
    };
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const TradeoffPoint& a = pts[i - 1];
        const TradeoffPoint& b = pts[i];
        if (!on_curve(a) || !on_curve(b) || !one_piece(a.mu, b.mu)) continue;
        Rational mid = (a.mu + b.mu) / Rational(2);
        Rational r = combined_rate(Rational(1, 2), Rational(1) / a.inv_dof,
                                   Rational(1) / b.inv_dof);
        if (Rational(1) / r != theorem_inv_dof(mid)) return false;
    }
    return true;
}

} // namespace cacheic::dof

// Prints the cache-size / inverse-DoF tradeoff on a dense rational grid,
// together with the three corner points and a memory-sharing cross-check.
#include <cstdio>

#include "cacheic/dof.hpp"
#include "cacheic/rational.hpp"

using namespace cacheic;

int main() {
    std::printf("%8s  %10s  %10s\n", "mu", "1/DoF", "DoF");
    for (int k = 8; k <= 24; ++k) {
        Rational mu(k, 24);
        Rational inv = dof::theorem_inv_dof(mu);
        std::printf("%8s  %10s  %10.6f\n", mu.str().c_str(), inv.str().c_str(),
                    1.0 / inv.to_double());
    }

    std::printf("\ncorners:\n");
    for (const char* c : {"1/3", "2/3", "1"}) {
        Rational mu = parse_rational(c);
        Rational inv = dof::theorem_inv_dof(mu);
        std::printf("  mu=%-4s  1/DoF=%-6s  DoF=%s\n", mu.str().c_str(),
                    inv.str().c_str(), (Rational(1) / inv).str().c_str());
    }

    // memory sharing between the two outer corners lands exactly on the curve
    Rational r1(9, 5), r2(18, 7);
    Rational mixed = dof::combined_rate(Rational(1, 2), r1, r2);
    std::printf("\nhalf/half mix of corner schemes: rate %s, curve value %s\n",
                mixed.str().c_str(),
                (Rational(1) / dof::theorem_inv_dof(Rational(1, 2))).str().c_str());
    return 0;
}

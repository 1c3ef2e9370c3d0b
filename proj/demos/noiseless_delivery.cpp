// Runs the mu = 2/3 delivery scheme end to end over a random channel without
// noise and reports per-receiver recovery.
#include <cstdio>

#include "cacheic/align.hpp"
#include "cacheic/cxmat.hpp"
#include "cacheic/library.hpp"
#include "cacheic/phy.hpp"

using namespace cacheic;

int main() {
    auto lib = library::ContentLibrary::random(3, 120, 2024);
    zfnet::DemandVector dv{{2, 3, 1}};
    cxmat::Mat3 h = cxmat::sample_channel(7);
    align::ConstellationSpec spec = align::make_spec(1, 1, 10.0);

    phy::DecodedResult res = phy::end_to_end(lib, dv, h, spec, 0.0, 99);
    std::printf("channel uses: %d\n", res.uses);
    for (int j = 0; j < 3; ++j) {
        const auto& rr = res.rx[std::size_t(j)];
        std::printf("receiver %d: file %d  bits_exact=%s  symbol_errors=%d\n",
                    j + 1, dv.d[std::size_t(j)], rr.bits_exact ? "yes" : "no",
                    rr.symbol_errors);
    }
    std::printf("all receivers exact: %s\n", res.all_exact ? "yes" : "no");
    return res.all_exact ? 0 : 1;
}

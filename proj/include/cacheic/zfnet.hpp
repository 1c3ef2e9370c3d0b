#pragma once

#include <array>
#include <string>
#include <vector>

#include "cacheic/cxmat.hpp"
#include "cacheic/errors.hpp"
#include "cacheic/rng.hpp"

// Delivery-phase stream construction for mu=2/3: 18 virtual transmitters,
// zero-forcing precoding across subset pairs, and the identification of every
// surviving coefficient with a signed adjugate entry.  Also the mu=1
// full-cache channel-inversion broadcast.
namespace cacheic::zfnet {

using cxmat::cd;
using cxmat::Mat3;

struct DemandVector {
    std::array<int, 3> d{1, 1, 1}; // d[j-1] = file requested by receiver j
};

inline void validate_demand(const DemandVector& dv, int n_files) {
    for (int x : dv.d)
        if (x < 1 || x > n_files)
            throw domain_error("demand: entries must lie in [1, N]");
}

// One virtual transmitter: file part W^target_{d_receiver, {k, ktilde}} sent
// jointly by transmitters k < ktilde with the interference zero-forced at
// `target`.  All indices 1-based.
struct StreamId {
    int receiver = 1;
    int k = 1, ktilde = 2;
    int target = 2;

    friend bool operator==(const StreamId& a, const StreamId& b) {
        return a.receiver == b.receiver && a.k == b.k && a.ktilde == b.ktilde &&
               a.target == b.target;
    }

    // Receiver where this stream lands unsuppressed (neither desired nor
    // zero-forced): the third index.
    int interference_receiver() const { return 6 - receiver - target; }

    std::string label() const {
        std::string s(1, char('A' + receiver - 1));
        s += std::to_string(k);
        s += std::to_string(ktilde);
        s += '^';
        s += std::to_string(target);
        return s;
    }
};

// Canonical order: receiver ascending, subset lexicographic, target ascending.
inline const std::array<StreamId, 18>& all_streams() {
    static const std::array<StreamId, 18> streams = [] {
        std::array<StreamId, 18> out{};
        static constexpr std::array<std::pair<int, int>, 3> subsets = {
            {{1, 2}, {1, 3}, {2, 3}}};
        std::size_t i = 0;
        for (int j = 1; j <= 3; ++j)
            for (auto [k, kt] : subsets)
                for (int tau = 1; tau <= 3; ++tau) {
                    if (tau == j) continue;
                    out[i++] = StreamId{j, k, kt, tau};
                }
        return out;
    }();
    return streams;
}

inline int stream_index(const StreamId& s) {
    const auto& streams = all_streams();
    for (int i = 0; i < 18; ++i)
        if (streams[std::size_t(i)] == s) return i;
    throw domain_error("stream_index: invalid stream id");
}

inline std::vector<StreamId> enumerate_streams(const DemandVector& dv,
                                               int n_files = INT32_MAX) {
    validate_demand(dv, n_files);
    const auto& streams = all_streams();
    return std::vector<StreamId>(streams.begin(), streams.end());
}

// Precoding for one stream: h_{tau,ktilde} at transmitter k and -h_{tau,k} at
// transmitter ktilde, zero elsewhere, so row tau of H annihilates the stream.
struct ZfFactors {
    int k = 0, ktilde = 0;
    cd at_k, at_ktilde;

    cd at_tx(int tx) const {
        if (tx == k) return at_k;
        if (tx == ktilde) return at_ktilde;
        return cd(0.0);
    }
};

inline ZfFactors zf_precoding_factors(const StreamId& s, const Mat3& h) {
    return ZfFactors{s.k, s.ktilde, h.e(s.target, s.ktilde), -h.e(s.target, s.k)};
}

// Unscaled coefficient of stream s at receiver j:
// h_{jk} h_{tau ktilde} - h_{j ktilde} h_{tau k}.  Zero by construction when
// j equals the stream's target.
inline cd equivalent_coefficient(const StreamId& s, int j, const Mat3& h) {
    return h.e(j, s.k) * h.e(s.target, s.ktilde) -
           h.e(j, s.ktilde) * h.e(s.target, s.k);
}

struct AdjIndex {
    int sign = 1; // +1 or -1
    int xi = 1;
    int xitilde = 1;
};

// equivalent_coefficient(s, j, H) == sign * g_{xi, xitilde} for every H,
// where xi = [3]\{k, ktilde} and xitilde = [3]\{target, j}.  The coefficient
// is the 2x2 determinant over rows (j, tau) and columns (k, ktilde); relating
// it to the cofactor of (xi, xitilde) contributes (-1)^{xi+xitilde}, and
// swapping rows into ascending order contributes another -1 when j > tau.
inline AdjIndex adjugate_index(const StreamId& s, int j) {
    if (j == s.target)
        throw domain_error("adjugate_index: coefficient at the ZF target is zero, "
                           "no adjugate entry exists");
    AdjIndex a;
    a.xi = 6 - s.k - s.ktilde;
    a.xitilde = 6 - s.target - j;
    a.sign = ((a.xi + a.xitilde) % 2 == 0) ? 1 : -1;
    if (j > s.target) a.sign = -a.sign;
    return a;
}

// One complex prefactor per stream (the alpha/beta/gamma of the alignment
// construction), drawn area-uniformly from the annulus 0.5 <= |z| <= 1.5 in
// canonical stream order.
struct ScalingFactors {
    std::array<cd, 18> by_stream{};

    cd at(const StreamId& s) const { return by_stream[std::size_t(stream_index(s))]; }

    static ScalingFactors ones() {
        ScalingFactors f;
        f.by_stream.fill(cd(1.0));
        return f;
    }
};

inline ScalingFactors draw_scaling_factors(std::uint64_t seed) {
    Rng rng(seed);
    ScalingFactors f;
    for (cd& z : f.by_stream) z = rng.annulus(0.5, 1.5);
    return f;
}

// 18x3 table: row = stream (canonical order), column = receiver, entry =
// scale(s) * equivalent_coefficient(s, j, H).
struct EquivalentChannel {
    std::array<std::array<cd, 3>, 18> coef{};

    cd at(const StreamId& s, int j) const {
        return coef[std::size_t(stream_index(s))][std::size_t(j - 1)];
    }
};

inline EquivalentChannel build_equivalent_channel(const DemandVector& dv, const Mat3& h,
                                                  const ScalingFactors& scale) {
    validate_demand(dv, INT32_MAX);
    EquivalentChannel eq;
    const auto& streams = all_streams();
    for (int i = 0; i < 18; ++i) {
        const StreamId& s = streams[std::size_t(i)];
        for (int j = 1; j <= 3; ++j)
            eq.coef[std::size_t(i)][std::size_t(j - 1)] =
                scale.by_stream[std::size_t(i)] * equivalent_coefficient(s, j, h);
    }
    return eq;
}

// Partition of the 18 streams as seen from receiver j.  Interfering and
// nulled lists are ordered by subset, then by stream receiver, matching the
// order in which the u-vector components are defined.
struct StreamTables {
    std::vector<StreamId> desired;
    std::vector<StreamId> interfering;
    std::vector<StreamId> nulled;
};

inline StreamTables stream_tables(int j) {
    if (j < 1 || j > 3) throw domain_error("stream_tables: receiver must be 1..3");
    StreamTables t;
    for (const StreamId& s : all_streams())
        if (s.receiver == j) t.desired.push_back(s);
    static constexpr std::array<std::pair<int, int>, 3> subsets = {
        {{1, 2}, {1, 3}, {2, 3}}};
    for (auto [k, kt] : subsets)
        for (const StreamId& s : all_streams()) {
            if (s.receiver == j || s.k != k || s.ktilde != kt) continue;
            if (s.target == j)
                t.nulled.push_back(s);
            else
                t.interfering.push_back(s);
        }
    return t;
}

// mu=1 delivery: plain channel inversion, x = H^{-1} s, so that receiver j
// observes exactly s_j in the noiseless channel.
inline std::array<cd, 3> full_cache_zf_encode(const DemandVector& dv, const Mat3& h,
                                              const std::array<cd, 3>& symbols) {
    validate_demand(dv, INT32_MAX);
    return cxmat::solve3(h, symbols);
}

} // namespace cacheic::zfnet

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "cacheic/align.hpp"
#include "cacheic/cxmat.hpp"
#include "cacheic/errors.hpp"
#include "cacheic/library.hpp"
#include "cacheic/pointgrid.hpp"
#include "cacheic/rng.hpp"
#include "cacheic/zfnet.hpp"

// End-to-end physical layer: bit-to-symbol mapping, transmit assembly across
// the three transmitters, AWGN, receiver constellation enumeration, nearest
// point decoding, and error-rate measurement.
namespace cacheic::phy {

using align::ConstellationSpec;
using cxmat::cd;
using cxmat::Mat3;
using library::BitString;
using zfnet::DemandVector;
using zfnet::ScalingFactors;
using zfnet::StreamId;

// ---------------------------------------------------------------------------
// bits <-> Z_Q labels (mixed radix)

// Little-endian base-2^32 unsigned integer, just enough arithmetic for radix
// conversion of file payloads.
struct BigUint {
    std::vector<std::uint32_t> limb;

    static BigUint from_bits(const BitString& bits) { // bits[0] = LSB
        BigUint v;
        v.limb.assign(bits.size() / 32 + 1, 0);
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) v.limb[i / 32] |= std::uint32_t(1) << (i % 32);
        v.trim();
        return v;
    }

    static BigUint all_ones(int bit_count) {
        BitString b(std::size_t(bit_count), 1);
        return from_bits(b);
    }

    bool is_zero() const { return limb.empty(); }

    void trim() {
        while (!limb.empty() && limb.back() == 0) limb.pop_back();
    }

    std::uint32_t divmod(std::uint32_t m) {
        std::uint64_t rem = 0;
        for (std::size_t i = limb.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | limb[i];
            limb[i] = std::uint32_t(cur / m);
            rem = cur % m;
        }
        trim();
        return std::uint32_t(rem);
    }

    void mul_add(std::uint32_t m, std::uint32_t add) {
        std::uint64_t carry = add;
        for (std::size_t i = 0; i < limb.size(); ++i) {
            std::uint64_t cur = std::uint64_t(limb[i]) * m + carry;
            limb[i] = std::uint32_t(cur);
            carry = cur >> 32;
        }
        while (carry) {
            limb.push_back(std::uint32_t(carry));
            carry >>= 32;
        }
        trim();
    }

    BitString to_bits(int count) const {
        BitString bits(std::size_t(count), 0);
        for (int i = 0; i < count; ++i)
            if (std::size_t(i / 32) < limb.size())
                bits[std::size_t(i)] =
                    (limb[std::size_t(i) / 32] >> (i % 32)) & 1u;
        return bits;
    }
};

// Number of base-(2Q+1) digits needed for any bit_count-bit payload, i.e. the
// digit length of 2^bit_count - 1.
inline int digit_count(int bit_count, long long base) {
    if (bit_count == 0) return 0;
    BigUint v = BigUint::all_ones(bit_count);
    int d = 0;
    while (!v.is_zero()) {
        v.divmod(std::uint32_t(base));
        ++d;
    }
    return d;
}

// Bit-string -> big integer -> base-(2Q+1) digits, little-endian, each digit
// mapped to Z_Q via digit - Q.  Exactly digit_count(...) labels come out; an
// empty bit-string yields no labels.
inline std::vector<int> modulate_bits(const BitString& bits, const ConstellationSpec& spec) {
    long long base = 2 * spec.Q + 1;
    int d = digit_count(int(bits.size()), base);
    BigUint v = BigUint::from_bits(bits);
    std::vector<int> labels;
    labels.reserve(std::size_t(d));
    for (int i = 0; i < d; ++i)
        labels.push_back(int(v.divmod(std::uint32_t(base))) - int(spec.Q));
    return labels;
}

// Inverse of modulate_bits.  Labels beyond the payload's digit count are
// padding and ignored.
inline BitString demodulate_bits(const std::vector<int>& labels, int bit_count,
                                 const ConstellationSpec& spec) {
    long long base = 2 * spec.Q + 1;
    int d = digit_count(bit_count, base);
    if (int(labels.size()) < d)
        throw domain_error("demodulate_bits: not enough labels for the payload size");
    BigUint v;
    for (int i = d; i-- > 0;)
        v.mul_add(std::uint32_t(base), std::uint32_t(labels[std::size_t(i)] + int(spec.Q)));
    return v.to_bits(bit_count);
}

// Chunk a label sequence into per-symbol tuples of length l6, padding the
// tail with label 0.
inline std::vector<std::vector<int>> to_symbol_tuples(const std::vector<int>& labels,
                                                      std::int64_t l6, int symbols) {
    std::vector<std::vector<int>> out(std::size_t(symbols),
                                      std::vector<int>(std::size_t(l6), 0));
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[i / std::size_t(l6)][i % std::size_t(l6)] = labels[i];
    return out;
}

// Tuple-shaped variant: one tuple of `substream_count` labels per symbol,
// just enough symbols to carry the payload.
inline std::vector<std::vector<int>> modulate_bits(const BitString& bits,
                                                   const ConstellationSpec& spec,
                                                   int substream_count) {
    if (substream_count < 1)
        throw domain_error("modulate_bits: substream count must be >= 1");
    std::vector<int> labels = modulate_bits(bits, spec);
    int symbols = int((labels.size() + std::size_t(substream_count) - 1) /
                      std::size_t(substream_count));
    return to_symbol_tuples(labels, substream_count, symbols);
}

// ---------------------------------------------------------------------------
// transmit assembly and channel

struct TxSignal {
    std::array<std::vector<cd>, 3> x; // x[k-1][t]
    std::array<double, 3> avg_power{};
    int uses = 0;
};

// Per-stream substream symbols: symbols[stream_index][t] is a tuple of L^6
// labels in Z_Q.
using StreamSymbols = std::array<std::vector<std::vector<int>>, 18>;

struct TxSetup {
    Mat3 h;
    Mat3 g_adj;
    ScalingFactors scale;
    ConstellationSpec spec;
    std::array<align::UVector, 3> u;           // per receiver
    std::array<std::vector<cd>, 3> basis_vals; // T_L(u^(r)) values
    std::array<zfnet::ZfFactors, 18> zf;

    TxSetup(const Mat3& h_in, const ScalingFactors& sc, const ConstellationSpec& sp)
        : h(h_in), g_adj(cxmat::adjugate(h_in)), scale(sc), spec(sp) {
        for (int r = 1; r <= 3; ++r) {
            u[std::size_t(r - 1)] = align::u_vector(r, g_adj, scale);
            basis_vals[std::size_t(r - 1)] =
                align::evaluate_basis(u[std::size_t(r - 1)], spec.L);
        }
        const auto& streams = zfnet::all_streams();
        for (std::size_t i = 0; i < 18; ++i)
            zf[i] = zfnet::zf_precoding_factors(streams[i], h);
    }

    // Basis the stream is modulated on: the u-vector of the receiver where it
    // interferes.
    const std::vector<cd>& stream_basis(const StreamId& s) const {
        return basis_vals[std::size_t(s.interference_receiver() - 1)];
    }
};

// X_k[t] = Gamma * sum over streams with k in the stream's subset of
// zf_factor_k(s) * scale(s) * sum_v v q_{s,v}[t].
inline TxSignal assemble_tx(const DemandVector& dv, const TxSetup& setup,
                            const StreamSymbols& symbols,
                            std::optional<double> power_limit = std::nullopt) {
    zfnet::validate_demand(dv, INT32_MAX);
    const auto& streams = zfnet::all_streams();
    int uses = int(symbols[0].size());
    for (const auto& s : symbols)
        if (int(s.size()) != uses)
            throw domain_error("assemble_tx: all streams must span the same symbol count");

    TxSignal out;
    out.uses = uses;
    for (auto& xk : out.x) xk.assign(std::size_t(uses), cd(0.0));
    for (int t = 0; t < uses; ++t) {
        for (std::size_t si = 0; si < 18; ++si) {
            const auto& tuple = symbols[si][std::size_t(t)];
            const auto& basis = setup.stream_basis(streams[si]);
            if (tuple.size() != basis.size())
                throw domain_error("assemble_tx: label tuple length must be L^6");
            cd xs = 0.0;
            for (std::size_t v = 0; v < basis.size(); ++v)
                xs += basis[v] * double(tuple[v]);
            xs *= setup.scale.by_stream[si];
            const auto& zf = setup.zf[si];
            out.x[std::size_t(zf.k - 1)][std::size_t(t)] += zf.at_k * xs;
            out.x[std::size_t(zf.ktilde - 1)][std::size_t(t)] += zf.at_ktilde * xs;
        }
        for (auto& xk : out.x) xk[std::size_t(t)] *= setup.spec.gamma;
    }
    for (int k = 0; k < 3; ++k) {
        double p = 0.0;
        for (const cd& v : out.x[std::size_t(k)]) p += std::norm(v);
        out.avg_power[std::size_t(k)] = uses > 0 ? p / double(uses) : 0.0;
        if (power_limit && out.avg_power[std::size_t(k)] > *power_limit * (1.0 + 1e-9))
            throw internal_error("assemble_tx: transmit power exceeds the constraint "
                                 "after normalization");
    }
    return out;
}

// Expected per-transmitter power at the spec's Gamma under uniform labels:
// substream symbols are independent zero-mean with variance Q(Q+1)/3, so the
// cross terms vanish.
inline std::array<double, 3> expected_tx_power(const TxSetup& setup) {
    double var_q = double(setup.spec.Q) * double(setup.spec.Q + 1) / 3.0;
    std::array<double, 3> p{};
    const auto& streams = zfnet::all_streams();
    for (std::size_t si = 0; si < 18; ++si) {
        const auto& basis = setup.stream_basis(streams[si]);
        double basis_energy = 0.0;
        for (const cd& v : basis) basis_energy += std::norm(v);
        double stream_e = std::norm(setup.scale.by_stream[si]) * var_q * basis_energy;
        const auto& zf = setup.zf[si];
        p[std::size_t(zf.k - 1)] += std::norm(zf.at_k) * stream_e;
        p[std::size_t(zf.ktilde - 1)] += std::norm(zf.at_ktilde) * stream_e;
    }
    double g2 = setup.spec.gamma * setup.spec.gamma;
    for (double& v : p) v *= g2;
    return p;
}

struct RxObservation {
    std::array<std::vector<cd>, 3> y; // y[j-1][t]
    double sigma2 = 0.0;
};

// Y_j[t] = sum_k h_jk X_k[t] + noise, noise drawn per receiver from an
// independent substream of `seed`; sigma2 is the total complex noise variance.
inline RxObservation apply_channel(const TxSignal& x, const Mat3& h, double sigma2,
                                   std::uint64_t seed) {
    if (sigma2 < 0.0) throw domain_error("apply_channel: sigma2 must be >= 0");
    RxObservation out;
    out.sigma2 = sigma2;
    double sd = std::sqrt(sigma2);
    for (int j = 1; j <= 3; ++j) {
        Rng rng(derive_seed(seed, 0x401, std::uint64_t(j)));
        auto& yj = out.y[std::size_t(j - 1)];
        yj.assign(std::size_t(x.uses), cd(0.0));
        for (int t = 0; t < x.uses; ++t) {
            cd v = 0.0;
            for (int k = 1; k <= 3; ++k)
                v += h.e(j, k) * x.x[std::size_t(k - 1)][std::size_t(t)];
            if (sigma2 > 0.0) v += sd * rng.complex_normal();
            yj[std::size_t(t)] = v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// receiver constellation

// One labeled point of the combined constellation: desired_key packs the six
// desired streams' label tuples (base 2Q+1 digits, canonical stream order,
// position 0 least significant); lump_key packs the aligned-interference
// digits over the union monomials (base 12Q+1, offset 6Q).
struct RxPoint {
    cd value;
    std::uint64_t desired_key = 0;
    std::uint64_t lump_key = 0;
};

struct RxConstellation {
    int receiver = 1;
    ConstellationSpec spec;
    std::vector<StreamId> desired_order;
    std::vector<std::array<int, 6>> union_monomials;
    std::vector<RxPoint> points; // sorted by (desired_key, lump_key)
    std::size_t desired_count = 0;
    std::size_t lump_count = 0;
    bool has_collision = false;
    std::pair<std::uint64_t, std::uint64_t> collision_keys{0, 0}; // desired keys
    double max_abs = 0.0;

    std::vector<std::vector<int>> unpack_desired(std::uint64_t key) const {
        long long base = 2 * spec.Q + 1;
        std::vector<std::vector<int>> tuples(6, std::vector<int>(std::size_t(spec.l6)));
        for (std::size_t s = 0; s < 6; ++s)
            for (std::size_t v = 0; v < std::size_t(spec.l6); ++v) {
                tuples[s][v] = int(key % std::uint64_t(base)) - int(spec.Q);
                key /= std::uint64_t(base);
            }
        return tuples;
    }
};

// The 12 per-substream receive coefficients at receiver j (6 desired plus 6
// interfering streams, each across its L^6 basis monomials), at unit Gamma.
// These generate the combined constellation as sum_i c_i Z_Q.
inline std::vector<cd> rx_coefficients(int j, const TxSetup& setup) {
    std::vector<cd> coeffs;
    auto tables = zfnet::stream_tables(j);
    for (const auto& list : {tables.desired, tables.interfering})
        for (const StreamId& s : list) {
            cd c = setup.scale.at(s) * zfnet::equivalent_coefficient(s, j, setup.h);
            for (const cd& v : setup.stream_basis(s)) coeffs.push_back(c * v);
        }
    return coeffs;
}

// Full enumeration of the combined received constellation at receiver j.
// Guarded: the raw label space (2Q+1)^(12 L^6) must stay within 1e7.
inline RxConstellation enumerate_rx_constellation(int j, const DemandVector& dv,
                                                  const TxSetup& setup,
                                                  bool collision_scan = true) {
    zfnet::validate_demand(dv, INT32_MAX);
    const ConstellationSpec& spec = setup.spec;
    double raw = std::pow(double(2 * spec.Q + 1), double(12 * spec.l6));
    if (raw > 1e7)
        throw guard_error("enumerate_rx_constellation: raw label space exceeds 1e7; "
                          "reduce L or Q");

    RxConstellation out;
    out.receiver = j;
    out.spec = spec;
    auto tables = zfnet::stream_tables(j);
    out.desired_order = tables.desired;

    long long base = 2 * spec.Q + 1;
    std::size_t n_digits = std::size_t(6 * spec.l6);

    // desired part: enumeration index == packed key
    std::vector<cd> dcoef;
    for (const StreamId& s : tables.desired) {
        cd c = spec.gamma * setup.scale.at(s) *
               zfnet::equivalent_coefficient(s, j, setup.h);
        for (const cd& v : setup.stream_basis(s)) dcoef.push_back(c * v);
    }
    std::size_t d_count = 1;
    for (std::size_t i = 0; i < n_digits; ++i) d_count *= std::size_t(base);
    std::vector<cd> desired_vals(d_count);
    {
        std::vector<int> q(n_digits, int(-spec.Q));
        for (std::size_t idx = 0;; ++idx) {
            cd v = 0.0;
            for (std::size_t i = 0; i < n_digits; ++i) v += dcoef[i] * double(q[i]);
            desired_vals[idx] = v;
            std::size_t pos = 0;
            while (pos < n_digits && q[pos] == int(spec.Q)) q[pos++] = int(-spec.Q);
            if (pos == n_digits) break;
            ++q[pos];
        }
    }

    // interference part: fold raw labels into aligned lump digits over the
    // union monomials of T_{L+1}(u^(j)), digits in Z_{6Q}; value is computed
    // from the lump digits so equal lump labels give identical points.
    const align::UVector& uj = setup.u[std::size_t(j - 1)];
    auto census = align::interference_union_exponents(spec.L);
    out.union_monomials = census.union_monomials;
    std::vector<cd> union_vals;
    for (const auto& em : out.union_monomials) {
        cd v = 1.0;
        for (std::size_t i = 0; i < 6; ++i)
            for (int e = 0; e < em[i]; ++e) v *= uj.value[i];
        union_vals.push_back(spec.gamma * v);
    }
    std::map<std::array<int, 6>, std::size_t> union_pos;
    for (std::size_t i = 0; i < out.union_monomials.size(); ++i)
        union_pos[out.union_monomials[i]] = i;

    // (stream substream, basis tuple) -> union slot
    auto tuples = align::monomial_basis(spec.L, 6);
    std::vector<std::vector<std::size_t>> slot(6,
                                               std::vector<std::size_t>(tuples.size()));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t v = 0; v < tuples.size(); ++v) {
            std::array<int, 6> e{};
            for (std::size_t m = 0; m < 6; ++m) e[m] = tuples[v][m];
            e[i] += 1;
            slot[i][v] = union_pos.at(e);
        }

    std::uint64_t lump_base = std::uint64_t(12 * spec.Q + 1);
    std::map<std::uint64_t, cd> lump; // key -> canonical value
    {
        std::vector<int> q(n_digits, int(-spec.Q));
        std::vector<int> digits(out.union_monomials.size());
        for (;;) {
            std::fill(digits.begin(), digits.end(), 0);
            for (std::size_t i = 0; i < 6; ++i)
                for (std::size_t v = 0; v < std::size_t(spec.l6); ++v)
                    digits[slot[i][v]] +=
                        uj.sign[i] * q[i * std::size_t(spec.l6) + v];
            std::uint64_t key = 0;
            for (std::size_t m = digits.size(); m-- > 0;)
                key = key * lump_base + std::uint64_t(digits[m] + 6 * spec.Q);
            if (!lump.count(key)) {
                cd v = 0.0;
                for (std::size_t m = 0; m < digits.size(); ++m)
                    v += union_vals[m] * double(digits[m]);
                lump.emplace(key, v);
            }
            std::size_t pos = 0;
            while (pos < n_digits && q[pos] == int(spec.Q)) q[pos++] = int(-spec.Q);
            if (pos == n_digits) break;
            ++q[pos];
        }
    }

    out.desired_count = d_count;
    out.lump_count = lump.size();
    out.points.reserve(d_count * lump.size());
    for (std::size_t di = 0; di < d_count; ++di)
        for (const auto& [lkey, lval] : lump)
            out.points.push_back(RxPoint{desired_vals[di] + lval, di, lkey});

    for (const RxPoint& p : out.points)
        out.max_abs = std::max({out.max_abs, std::abs(p.value.real()),
                                std::abs(p.value.imag())});

    if (collision_scan) {
        std::vector<std::size_t> idx(out.points.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const cd &x = out.points[a].value, &y = out.points[b].value;
            if (x.real() != y.real()) return x.real() < y.real();
            return x.imag() < y.imag();
        });
        for (std::size_t i = 1; i < idx.size(); ++i)
            if (out.points[idx[i]].value == out.points[idx[i - 1]].value) {
                out.has_collision = true;
                out.collision_keys = {out.points[idx[i - 1]].desired_key,
                                      out.points[idx[i]].desired_key};
                break;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// decoding

struct DecodedSymbol {
    std::size_t point_idx = 0;
    std::uint64_t desired_key = 0;
    std::uint64_t lump_key = 0;
    bool ambiguous = false;
    double distance = 0.0;
};

// Reference decoder: linear scan for the Euclidean-nearest labeled point.
// Exact ties go to the lexicographically smallest (desired, lump) label,
// flagged ambiguous.  Points are stored in label order, so "first wins" is
// the lexicographic rule.
inline DecodedSymbol decode_nearest(cd y, const RxConstellation& c) {
    if (c.points.empty()) throw domain_error("decode_nearest: empty constellation");
    DecodedSymbol best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        double d2 = std::norm(c.points[i].value - y);
        if (d2 < best_d2) {
            best_d2 = d2;
            best.point_idx = i;
            best.ambiguous = false;
        } else if (d2 == best_d2 && i != best.point_idx) {
            best.ambiguous = true;
        }
    }
    best.desired_key = c.points[best.point_idx].desired_key;
    best.lump_key = c.points[best.point_idx].lump_key;
    best.distance = std::sqrt(best_d2);
    return best;
}

// Decoder with two accelerated paths over the shared constellation:
//  - noiseless: exact lookup keyed on point values quantized to 12
//    significant digits (9-cell probe), falling back to the linear scan when
//    the hit is not essentially exact;
//  - noisy: grid nearest-neighbor search (exact, deterministic ties).
class Decoder {
  public:
    explicit Decoder(const RxConstellation& c) : c_(&c) {}

    DecodedSymbol decode(cd y, bool noiseless) {
        if (noiseless) return decode_noiseless(y);
        ensure_grid();
        auto n = grid_->nearest(y);
        return from_index(n.idx, n.tie, std::sqrt(n.dist2));
    }

    DecodedSymbol decode_noiseless(cd y) {
        ensure_hash();
        std::int64_t ix = std::llround(y.real() / cell_);
        std::int64_t iy = std::llround(y.imag() / cell_);
        std::size_t best = SIZE_MAX;
        double best_d2 = std::numeric_limits<double>::infinity();
        bool tie = false;
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto range = std::equal_range(
                    hash_.begin(), hash_.end(),
                    HashEntry{ix + dx, iy + dy, 0},
                    [](const HashEntry& a, const HashEntry& b) {
                        return a.ix != b.ix ? a.ix < b.ix : a.iy < b.iy;
                    });
                for (auto it = range.first; it != range.second; ++it) {
                    double d2 = std::norm(c_->points[it->idx].value - y);
                    if (d2 < best_d2 || (d2 == best_d2 && it->idx < best)) {
                        if (d2 == best_d2 && best != SIZE_MAX) tie = true;
                        best_d2 = d2;
                        best = it->idx;
                    } else if (d2 == best_d2) {
                        tie = true;
                    }
                }
            }
        double tol = 1e-6 * std::max(c_->max_abs, 1e-300);
        if (best == SIZE_MAX || std::sqrt(best_d2) > tol)
            return decode_nearest(y, *c_); // fall back to the linear scan
        return from_index(best, tie, std::sqrt(best_d2));
    }

  private:
    struct HashEntry {
        std::int64_t ix, iy;
        std::size_t idx;
    };

    DecodedSymbol from_index(std::size_t i, bool tie, double dist) const {
        DecodedSymbol out;
        out.point_idx = i;
        out.desired_key = c_->points[i].desired_key;
        out.lump_key = c_->points[i].lump_key;
        out.ambiguous = tie;
        out.distance = dist;
        return out;
    }

    void ensure_hash() {
        if (!hash_.empty()) return;
        cell_ = std::max(c_->max_abs, 1e-300) * 1e-12;
        hash_.reserve(c_->points.size());
        for (std::size_t i = 0; i < c_->points.size(); ++i)
            hash_.push_back(HashEntry{std::llround(c_->points[i].value.real() / cell_),
                                      std::llround(c_->points[i].value.imag() / cell_),
                                      i});
        std::sort(hash_.begin(), hash_.end(), [](const HashEntry& a, const HashEntry& b) {
            if (a.ix != b.ix) return a.ix < b.ix;
            if (a.iy != b.iy) return a.iy < b.iy;
            return a.idx < b.idx;
        });
    }

    void ensure_grid() {
        if (grid_) return;
        std::vector<cd> vals;
        vals.reserve(c_->points.size());
        for (const RxPoint& p : c_->points) vals.push_back(p.value);
        grid_.emplace(std::move(vals));
    }

    const RxConstellation* c_;
    double cell_ = 1.0;
    std::vector<HashEntry> hash_;
    std::optional<PointGrid> grid_;
};

// ---------------------------------------------------------------------------
// end to end

struct ReceiverResult {
    bool bits_exact = false;
    int symbol_errors = 0;
    int ambiguous_symbols = 0;
    BitString reconstructed;
    std::vector<std::uint64_t> lump_keys; // decoded aligned interference, per use
};

struct DecodedResult {
    int uses = 0;
    std::array<ReceiverResult, 3> rx;
    bool all_exact = false;
};

// Part carried by stream (j, S, tau): subfile W_{d_j, S} holds bits
// [si*F/3, (si+1)*F/3) of the file; its tau-half (targets in ascending
// order) is the F/6-bit payload of the stream.
inline BitString stream_payload(const library::ContentLibrary& lib,
                                const DemandVector& dv, const StreamId& s) {
    const BitString& file = lib.payloads[std::size_t(dv.d[std::size_t(s.receiver - 1)] - 1)];
    int third = lib.file_bits / 3;
    int si = (s.k == 1 && s.ktilde == 2) ? 0 : (s.k == 1 && s.ktilde == 3) ? 1 : 2;
    int lo_target = (s.receiver == 1) ? 2 : 1;
    int half = (s.target == lo_target) ? 0 : 1;
    int start = si * third + half * (third / 2);
    return library::slice(file, start, start + third / 2);
}

// Full mu = 2/3 pipeline: placement, sub-splitting, modulation, assembly,
// channel, per-receiver joint decoding, bit reconstruction.  The scaling
// factors and the noise are derived from `seed`.
inline DecodedResult end_to_end(const library::ContentLibrary& lib, const DemandVector& dv,
                                const Mat3& h, const ConstellationSpec& spec,
                                double sigma2, std::uint64_t seed) {
    zfnet::validate_demand(dv, lib.n_files);
    if (lib.file_bits % 6 != 0)
        throw domain_error("end_to_end: file size must be divisible by 6");
    library::CacheContents caches = library::place_two_thirds(lib);

    ScalingFactors scale = zfnet::draw_scaling_factors(derive_seed(seed, 0x5CA1E));
    TxSetup setup(h, scale, spec);

    const auto& streams = zfnet::all_streams();
    int part_bits = lib.file_bits / 6;
    int d = digit_count(part_bits, 2 * spec.Q + 1);
    int uses = int((d + spec.l6 - 1) / spec.l6);
    if (uses == 0) uses = 1;

    StreamSymbols symbols;
    std::array<std::vector<int>, 18> sent_labels;
    for (std::size_t si = 0; si < 18; ++si) {
        const StreamId& s = streams[si];
        BitString part = stream_payload(lib, dv, s);
        // both transmitters in the subset must hold the subfile being sent
        std::string sub_label = std::to_string(s.k) + std::to_string(s.ktilde);
        int file_id = dv.d[std::size_t(s.receiver - 1)];
        if (!caches.find(s.k, file_id, sub_label) ||
            !caches.find(s.ktilde, file_id, sub_label))
            throw internal_error("end_to_end: placement does not cover stream " +
                                 s.label());
        sent_labels[si] = modulate_bits(part, spec);
        symbols[si] = to_symbol_tuples(sent_labels[si], spec.l6, uses);
    }

    TxSignal x = assemble_tx(dv, setup, symbols);
    RxObservation obs = apply_channel(x, h, sigma2, derive_seed(seed, 0x4015E));

    DecodedResult res;
    res.uses = uses;
    bool noiseless = sigma2 == 0.0;
    long long base = 2 * spec.Q + 1;
    for (int j = 1; j <= 3; ++j) {
        RxConstellation c = enumerate_rx_constellation(j, dv, setup, false);
        Decoder dec(c);
        ReceiverResult& rr = res.rx[std::size_t(j - 1)];

        // transmitted desired keys for error counting
        std::vector<std::uint64_t> sent_keys(std::size_t(uses), 0);
        for (int t = 0; t < uses; ++t) {
            std::uint64_t key = 0;
            std::uint64_t mult = 1;
            for (const StreamId& s : c.desired_order) {
                const auto& tuple = symbols[std::size_t(zfnet::stream_index(s))]
                                           [std::size_t(t)];
                for (int qv : tuple) {
                    key += std::uint64_t(qv + spec.Q) * mult;
                    mult *= std::uint64_t(base);
                }
            }
            sent_keys[std::size_t(t)] = key;
        }

        std::vector<std::vector<int>> decoded_labels(6);
        for (int t = 0; t < uses; ++t) {
            DecodedSymbol ds = dec.decode(obs.y[std::size_t(j - 1)][std::size_t(t)],
                                          noiseless);
            if (ds.ambiguous) ++rr.ambiguous_symbols;
            if (ds.desired_key != sent_keys[std::size_t(t)]) ++rr.symbol_errors;
            rr.lump_keys.push_back(ds.lump_key);
            auto tuples = c.unpack_desired(ds.desired_key);
            for (std::size_t s = 0; s < 6; ++s)
                for (int qv : tuples[s]) decoded_labels[s].push_back(qv);
        }

        // reassemble the requested file: subset-major, then target ascending
        BitString file;
        for (std::size_t s = 0; s < 6; ++s) {
            BitString part = demodulate_bits(decoded_labels[s], part_bits, spec);
            file.insert(file.end(), part.begin(), part.end());
        }
        rr.reconstructed = std::move(file);
        rr.bits_exact =
            rr.reconstructed == lib.payloads[std::size_t(dv.d[std::size_t(j - 1)] - 1)];
    }
    res.all_exact = res.rx[0].bits_exact && res.rx[1].bits_exact && res.rx[2].bits_exact;
    return res;
}

// ---------------------------------------------------------------------------
// SER measurement

struct SerRow {
    double snr_db = 0.0;
    int trials = 0;
    std::int64_t symbol_errors = 0;
    double ser = 0.0;
    double min_distance = 0.0; // median over trials, at the operating Gamma
};

struct SerCurve {
    std::vector<SerRow> rows;
};

struct SweepConfig {
    std::vector<double> snr_db;
    int trials = 20;
    int symbols_per_trial = 100;
    int L = 1;
    long long Q = 1;
    double epsilon = 0.05;
    double sigma2 = 1.0;
    std::uint64_t seed = 1;
    int workers = 1;
};

inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int count = std::min(workers, n);
    pool.reserve(std::size_t(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct TrialOutcome {
    std::int64_t errors = 0;
    double gamma_min_dist = 0.0;
    bool degenerate = false;
};

// One Monte Carlo trial at receiver 1: fresh channel, scaling factors, data
// and noise, all derived from (seed, grid index, trial index).  The SNR knob
// sets Gamma so that the constellation minimum distance against the noise
// scale is 10^(snr_db/20): snr_db = 20 log10(Gamma * delta / sigma), with
// delta the unit-Gamma minimum distance of the combined constellation.
inline TrialOutcome run_ser_trial(double snr_db, int symbols, int L, long long Q,
                                  double epsilon, double sigma2,
                                  std::uint64_t trial_seed) {
    Mat3 h = cxmat::sample_channel(derive_seed(trial_seed, 1));
    ScalingFactors scale = zfnet::draw_scaling_factors(derive_seed(trial_seed, 2));
    DemandVector dv; // stream labels do not depend on file identity
    ConstellationSpec unit = align::make_spec(L, Q, 1.0, epsilon);
    TxSetup probe(h, scale, unit);
    double delta = align::min_distance_label_diff(rx_coefficients(1, probe), Q);

    TrialOutcome out;
    double sigma = sigma2 > 0.0 ? std::sqrt(sigma2) : 1.0;
    double target = std::pow(10.0, snr_db / 20.0) * sigma;
    double gamma;
    if (delta > 0.0 && std::isfinite(delta)) {
        gamma = target / delta;
    } else {
        out.degenerate = true; // label collision; keep the trial deterministic
        gamma = target;
    }
    out.gamma_min_dist = gamma * delta;

    ConstellationSpec spec = align::make_spec(L, Q, gamma, epsilon);
    TxSetup setup(h, scale, spec);
    RxConstellation c = enumerate_rx_constellation(1, dv, setup, false);
    Decoder dec(c);

    Rng data_rng(derive_seed(trial_seed, 3));
    StreamSymbols symbols_by_stream;
    std::vector<std::uint64_t> sent_keys(std::size_t(symbols), 0);
    long long base = 2 * Q + 1;
    for (auto& s : symbols_by_stream)
        s.assign(std::size_t(symbols), std::vector<int>(std::size_t(spec.l6)));
    for (int t = 0; t < symbols; ++t)
        for (std::size_t si = 0; si < 18; ++si)
            for (std::size_t v = 0; v < std::size_t(spec.l6); ++v)
                symbols_by_stream[si][std::size_t(t)][v] =
                    int(data_rng.next_u64() % std::uint64_t(base)) - int(Q);

    for (int t = 0; t < symbols; ++t) {
        std::uint64_t key = 0, mult = 1;
        for (const StreamId& s : c.desired_order) {
            const auto& tuple =
                symbols_by_stream[std::size_t(zfnet::stream_index(s))][std::size_t(t)];
            for (int qv : tuple) {
                key += std::uint64_t(qv + Q) * mult;
                mult *= std::uint64_t(base);
            }
        }
        sent_keys[std::size_t(t)] = key;
    }

    TxSignal x = assemble_tx(dv, setup, symbols_by_stream);
    RxObservation obs = apply_channel(x, h, sigma2, derive_seed(trial_seed, 4));
    for (int t = 0; t < symbols; ++t) {
        DecodedSymbol ds = dec.decode(obs.y[0][std::size_t(t)], sigma2 == 0.0);
        if (ds.desired_key != sent_keys[std::size_t(t)]) ++out.errors;
    }
    return out;
}

inline SerCurve ser_sweep(const SweepConfig& cfg) {
    if (cfg.snr_db.empty()) throw domain_error("ser_sweep: empty SNR grid");
    if (cfg.trials < 1 || cfg.symbols_per_trial < 1)
        throw domain_error("ser_sweep: trials and symbols must be >= 1");
    SerCurve curve;
    for (std::size_t g = 0; g < cfg.snr_db.size(); ++g) {
        std::vector<TrialOutcome> outcomes(std::size_t(cfg.trials));
        parallel_for(cfg.trials, cfg.workers, [&](int i) {
            outcomes[std::size_t(i)] =
                run_ser_trial(cfg.snr_db[g], cfg.symbols_per_trial, cfg.L, cfg.Q,
                              cfg.epsilon, cfg.sigma2,
                              derive_seed(cfg.seed, g, std::uint64_t(i)));
        });
        SerRow row;
        row.snr_db = cfg.snr_db[g];
        row.trials = cfg.trials;
        std::vector<double> dists;
        for (const TrialOutcome& t : outcomes) {
            row.symbol_errors += t.errors;
            dists.push_back(t.gamma_min_dist);
        }
        row.ser = double(row.symbol_errors) /
                  (double(cfg.trials) * double(cfg.symbols_per_trial));
        std::sort(dists.begin(), dists.end());
        row.min_distance = dists[dists.size() / 2];
        curve.rows.push_back(row);
    }
    return curve;
}

} // namespace cacheic::phy

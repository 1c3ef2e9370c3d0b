#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cacheic/errors.hpp"
#include "cacheic/rational.hpp"
#include "cacheic/rng.hpp"

// Content library, the three corner-point placement schemes, and the
// memory-sharing construction that interpolates between them.
namespace cacheic::library {

using BitString = std::vector<std::uint8_t>; // one 0/1 entry per bit

// N files of F bits each.  F must be divisible by 6 so the mu=2/3 scheme can
// cut every file into six equal parts; callers pad before entry.
struct ContentLibrary {
    int n_files = 0;
    int file_bits = 0;
    std::vector<BitString> payloads;

    ContentLibrary(int n, int f, std::vector<BitString> data)
        : n_files(n), file_bits(f), payloads(std::move(data)) {
        if (n < 1) throw domain_error("library: N must be >= 1");
        if (f <= 0 || f % 6 != 0)
            throw domain_error("library: file size must be a positive multiple of 6 bits");
        if (int(payloads.size()) != n)
            throw domain_error("library: payload count does not match N");
        for (const BitString& p : payloads)
            if (int(p.size()) != f)
                throw domain_error("library: payload length does not match F");
    }

    static ContentLibrary random(int n, int f, std::uint64_t seed) {
        if (f <= 0 || f % 6 != 0)
            throw domain_error("library: file size must be a positive multiple of 6 bits");
        std::vector<BitString> data;
        data.reserve(std::size_t(n));
        for (int i = 0; i < n; ++i) {
            Rng rng(derive_seed(seed, 0x11b, std::uint64_t(i)));
            BitString bits(std::size_t(f), 0);
            for (auto& b : bits) b = rng.bit() ? 1 : 0;
            data.push_back(std::move(bits));
        }
        return ContentLibrary(n, f, std::move(data));
    }
};

struct CachedPart {
    int file = 0; // 1-based file id
    std::string label;
    BitString bits;
};

struct CacheContents {
    Rational mu;
    std::array<std::vector<CachedPart>, 3> at_tx; // index 0..2 = transmitter 1..3

    std::size_t stored_bits(int tx) const {
        std::size_t total = 0;
        for (const CachedPart& p : at_tx[std::size_t(tx - 1)]) total += p.bits.size();
        return total;
    }

    const CachedPart* find(int tx, int file, const std::string& label) const {
        for (const CachedPart& p : at_tx[std::size_t(tx - 1)])
            if (p.file == file && p.label == label) return &p;
        return nullptr;
    }
};

inline BitString slice(const BitString& bits, int from, int to) {
    return BitString(bits.begin() + from, bits.begin() + to);
}

// mu = 1/3: file n is cut into three equal contiguous subfiles and
// transmitter k stores subfile k of every file.
inline CacheContents place_one_third(const ContentLibrary& lib) {
    CacheContents cc;
    cc.mu = Rational(1, 3);
    int third = lib.file_bits / 3;
    for (int n = 1; n <= lib.n_files; ++n) {
        const BitString& w = lib.payloads[std::size_t(n - 1)];
        for (int k = 1; k <= 3; ++k)
            cc.at_tx[std::size_t(k - 1)].push_back(
                {n, std::to_string(k), slice(w, (k - 1) * third, k * third)});
    }
    return cc;
}

inline const std::array<std::pair<int, int>, 3>& two_subsets() {
    static const std::array<std::pair<int, int>, 3> s = {{{1, 2}, {1, 3}, {2, 3}}};
    return s;
}

// mu = 2/3: subfiles indexed by 2-subsets of {1,2,3} in lexicographic order;
// W_{n,S} is stored at both transmitters in S.
inline CacheContents place_two_thirds(const ContentLibrary& lib) {
    CacheContents cc;
    cc.mu = Rational(2, 3);
    int third = lib.file_bits / 3;
    for (int n = 1; n <= lib.n_files; ++n) {
        const BitString& w = lib.payloads[std::size_t(n - 1)];
        for (int si = 0; si < 3; ++si) {
            auto [k1, k2] = two_subsets()[std::size_t(si)];
            std::string label = std::to_string(k1) + std::to_string(k2);
            BitString part = slice(w, si * third, (si + 1) * third);
            cc.at_tx[std::size_t(k1 - 1)].push_back({n, label, part});
            cc.at_tx[std::size_t(k2 - 1)].push_back({n, label, part});
        }
    }
    return cc;
}

// mu = 1: every transmitter stores every file in full.
inline CacheContents place_full(const ContentLibrary& lib) {
    CacheContents cc;
    cc.mu = Rational(1);
    for (int n = 1; n <= lib.n_files; ++n)
        for (int k = 1; k <= 3; ++k)
            cc.at_tx[std::size_t(k - 1)].push_back(
                {n, "full", lib.payloads[std::size_t(n - 1)]});
    return cc;
}

inline CacheContents place_corner(Rational mu, const ContentLibrary& lib) {
    if (mu == Rational(1, 3)) return place_one_third(lib);
    if (mu == Rational(2, 3)) return place_two_thirds(lib);
    if (mu == Rational(1)) return place_full(lib);
    throw domain_error("placement: mu must be a corner point (1/3, 2/3 or 1)");
}

struct MemoryShareScheme {
    Rational alpha1;
    Rational mu1;
    Rational mu2;
    Rational mu; // alpha1*mu1 + alpha2*mu2
    int part1_bits = 0;
    int part2_bits = 0;
};

// Feasible part-1 sizes are multiples of 6 strictly inside (0, F) so that
// both sub-libraries meet the ContentLibrary divisibility contract.
inline Rational nearest_feasible_alpha1(Rational a1, int file_bits) {
    double want = a1.to_double() * file_bits;
    std::int64_t k = std::llround(want / 6.0);
    std::int64_t max_k = file_bits / 6 - 1;
    if (k < 1) k = 1;
    if (k > max_k) k = max_k;
    return Rational(6 * k, file_bits);
}

// Appendix-style memory sharing: each file is split into a part of
// alpha1*F bits placed by the mu1 corner scheme and the remainder placed by
// the mu2 corner scheme.  Labels are prefixed "p1." / "p2." per part.
inline std::pair<CacheContents, MemoryShareScheme>
memory_share(Rational alpha1, Rational mu1, Rational mu2, const ContentLibrary& lib) {
    if (!(alpha1 > Rational(0) && alpha1 < Rational(1)))
        throw domain_error("memory_share: alpha1 must lie strictly inside (0,1)");
    for (Rational m : {mu1, mu2})
        if (m != Rational(1, 3) && m != Rational(2, 3) && m != Rational(1))
            throw domain_error("memory_share: mu1 and mu2 must be corner points");

    Rational p1 = alpha1 * Rational(lib.file_bits);
    bool integral = p1.den() == 1;
    if (!integral || p1.num() % 6 != 0) {
        Rational suggest = nearest_feasible_alpha1(alpha1, lib.file_bits);
        throw domain_error(
            "memory_share: alpha1*F must be an integral multiple of 6 bits; "
            "nearest feasible alpha1 = " + suggest.str());
    }
    int part1 = int(p1.num());
    int part2 = lib.file_bits - part1;

    std::vector<BitString> front, back;
    for (const BitString& w : lib.payloads) {
        front.push_back(slice(w, 0, part1));
        back.push_back(slice(w, part1, lib.file_bits));
    }
    ContentLibrary lib1(lib.n_files, part1, std::move(front));
    ContentLibrary lib2(lib.n_files, part2, std::move(back));
    CacheContents c1 = place_corner(mu1, lib1);
    CacheContents c2 = place_corner(mu2, lib2);

    MemoryShareScheme scheme;
    scheme.alpha1 = alpha1;
    scheme.mu1 = mu1;
    scheme.mu2 = mu2;
    scheme.mu = alpha1 * mu1 + (Rational(1) - alpha1) * mu2;
    scheme.part1_bits = part1;
    scheme.part2_bits = part2;

    CacheContents cc;
    cc.mu = scheme.mu;
    for (int k = 0; k < 3; ++k) {
        for (CachedPart p : c1.at_tx[std::size_t(k)]) {
            p.label = "p1." + p.label;
            cc.at_tx[std::size_t(k)].push_back(std::move(p));
        }
        for (CachedPart p : c2.at_tx[std::size_t(k)]) {
            p.label = "p2." + p.label;
            cc.at_tx[std::size_t(k)].push_back(std::move(p));
        }
    }
    return {cc, scheme};
}

// Per-transmitter cache budget in bits: floor(mu * N * F).
inline std::int64_t cache_budget_bits(Rational mu, const ContentLibrary& lib) {
    Rational b = mu * Rational(lib.n_files) * Rational(lib.file_bits);
    return b.num() / b.den();
}

} // namespace cacheic::library

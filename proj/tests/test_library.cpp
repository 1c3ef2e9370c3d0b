#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "cacheic/library.hpp"
#include "cacheic/library_io.hpp"

using namespace cacheic::library;
using cacheic::Rational;
using cacheic::domain_error;

namespace {

BitString bits_of(const char* s) {
    BitString b;
    for (const char* p = s; *p; ++p) b.push_back(*p == '1' ? 1 : 0);
    return b;
}

ContentLibrary tiny() { return ContentLibrary(1, 6, {bits_of("110100")}); }

} // namespace

TEST_CASE("library validates its shape") {
    REQUIRE_THROWS_AS(ContentLibrary(0, 6, {}), domain_error);
    REQUIRE_THROWS_AS(ContentLibrary(1, 5, {bits_of("11010")}), domain_error);
    REQUIRE_THROWS_AS(ContentLibrary(1, 0, {}), domain_error);
    REQUIRE_THROWS_AS(ContentLibrary(2, 6, {bits_of("110100")}), domain_error);
    REQUIRE_THROWS_AS(ContentLibrary(1, 6, {bits_of("1101")}), domain_error);
    REQUIRE_NOTHROW(ContentLibrary(1, 6, {bits_of("110100")}));
}

TEST_CASE("random library is seeded") {
    ContentLibrary a = ContentLibrary::random(3, 120, 7);
    ContentLibrary b = ContentLibrary::random(3, 120, 7);
    ContentLibrary c = ContentLibrary::random(3, 120, 8);
    REQUIRE(a.payloads == b.payloads);
    REQUIRE(a.payloads != c.payloads);
    REQUIRE(a.payloads[0].size() == 120);
    // nondegenerate: not all-zero, not all-one
    for (const BitString& w : a.payloads) {
        std::size_t ones = 0;
        for (auto bit : w) ones += bit;
        REQUIRE(ones > 0);
        REQUIRE(ones < w.size());
    }
}

TEST_CASE("one-third placement splits 110100 into 11/01/00") {
    CacheContents cc = place_one_third(tiny());
    REQUIRE(cc.mu == Rational(1, 3));
    REQUIRE(cc.at_tx[0].size() == 1);
    REQUIRE(cc.at_tx[0][0].bits == bits_of("11"));
    REQUIRE(cc.at_tx[1][0].bits == bits_of("01"));
    REQUIRE(cc.at_tx[2][0].bits == bits_of("00"));
    REQUIRE(cc.at_tx[0][0].label == "1");
    REQUIRE(cc.at_tx[2][0].label == "3");

    // each transmitter stores exactly NF/3 bits; concatenation reassembles
    ContentLibrary lib = ContentLibrary::random(4, 36, 3);
    CacheContents big = place_one_third(lib);
    for (int k = 1; k <= 3; ++k)
        REQUIRE(big.stored_bits(k) == std::size_t(4 * 36 / 3));
    for (int n = 1; n <= 4; ++n) {
        BitString whole;
        for (int k = 1; k <= 3; ++k) {
            const CachedPart* p = big.find(k, n, std::to_string(k));
            REQUIRE(p != nullptr);
            whole.insert(whole.end(), p->bits.begin(), p->bits.end());
        }
        REQUIRE(whole == lib.payloads[std::size_t(n - 1)]);
    }
}

TEST_CASE("two-thirds placement replicates each subfile at its pair") {
    ContentLibrary lib = ContentLibrary::random(3, 36, 9);
    CacheContents cc = place_two_thirds(lib);
    REQUIRE(cc.mu == Rational(2, 3));
    for (int k = 1; k <= 3; ++k)
        REQUIRE(cc.stored_bits(k) == std::size_t(2 * 3 * 36 / 3));

    const char* labels[3] = {"12", "13", "23"};
    for (int n = 1; n <= 3; ++n) {
        for (int si = 0; si < 3; ++si) {
            int k1 = labels[si][0] - '0', k2 = labels[si][1] - '0';
            int k3 = 6 - k1 - k2;
            const CachedPart* a = cc.find(k1, n, labels[si]);
            const CachedPart* b = cc.find(k2, n, labels[si]);
            REQUIRE(a != nullptr);
            REQUIRE(b != nullptr);
            REQUIRE(a->bits == b->bits);
            REQUIRE(cc.find(k3, n, labels[si]) == nullptr);
        }
        // the three subfiles reassemble the file in label order
        BitString whole;
        for (int si = 0; si < 3; ++si) {
            const CachedPart* p = cc.find(labels[si][0] - '0', n, labels[si]);
            whole.insert(whole.end(), p->bits.begin(), p->bits.end());
        }
        REQUIRE(whole == lib.payloads[std::size_t(n - 1)]);
    }
}

TEST_CASE("full placement stores everything everywhere") {
    ContentLibrary lib = ContentLibrary::random(2, 12, 1);
    CacheContents cc = place_full(lib);
    REQUIRE(cc.mu == Rational(1));
    for (int k = 1; k <= 3; ++k) {
        REQUIRE(cc.stored_bits(k) == std::size_t(2 * 12));
        for (int n = 1; n <= 2; ++n) {
            const CachedPart* p = cc.find(k, n, "full");
            REQUIRE(p != nullptr);
            REQUIRE(p->bits == lib.payloads[std::size_t(n - 1)]);
        }
    }
}

TEST_CASE("corner dispatch rejects non-corner mu") {
    ContentLibrary lib = tiny();
    REQUIRE(place_corner(Rational(1, 3), lib).mu == Rational(1, 3));
    REQUIRE(place_corner(Rational(2, 3), lib).mu == Rational(2, 3));
    REQUIRE(place_corner(Rational(1), lib).mu == Rational(1));
    REQUIRE_THROWS_AS(place_corner(Rational(1, 2), lib), domain_error);
}

TEST_CASE("cache budget is floor(mu N F)") {
    ContentLibrary lib = ContentLibrary::random(3, 120, 2);
    REQUIRE(cache_budget_bits(Rational(1, 3), lib) == 120);
    REQUIRE(cache_budget_bits(Rational(2, 3), lib) == 240);
    REQUIRE(cache_budget_bits(Rational(1), lib) == 360);
    REQUIRE(cache_budget_bits(Rational(1, 2), lib) == 180);
    ContentLibrary odd = ContentLibrary::random(1, 42, 2);
    REQUIRE(cache_budget_bits(Rational(1, 2), odd) == 21);
    REQUIRE(cache_budget_bits(Rational(5, 9), odd) == 23); // 210/9 floors
}

TEST_CASE("memory sharing splits per file and respects the budget") {
    ContentLibrary lib = ContentLibrary::random(2, 24, 5);
    auto [cc, scheme] = memory_share(Rational(1, 2), Rational(1, 3), Rational(1), lib);
    REQUIRE(scheme.part1_bits == 12);
    REQUIRE(scheme.part2_bits == 12);
    REQUIRE(scheme.mu == Rational(1, 2) * Rational(1, 3) +
                             Rational(1, 2) * Rational(1));
    REQUIRE(cc.mu == Rational(2, 3));

    // every transmitter stays within floor(mu N F)
    for (int k = 1; k <= 3; ++k)
        REQUIRE(cc.stored_bits(k) <=
                std::size_t(cache_budget_bits(cc.mu, lib)));

    // parts reassemble: p1 front via one-third labels, p2 back stored in full
    for (int n = 1; n <= 2; ++n) {
        BitString whole;
        for (int k = 1; k <= 3; ++k) {
            const CachedPart* p = cc.find(k, n, "p1." + std::to_string(k));
            REQUIRE(p != nullptr);
            whole.insert(whole.end(), p->bits.begin(), p->bits.end());
        }
        const CachedPart* tail = cc.find(1, n, "p2.full");
        REQUIRE(tail != nullptr);
        whole.insert(whole.end(), tail->bits.begin(), tail->bits.end());
        REQUIRE(whole == lib.payloads[std::size_t(n - 1)]);
    }
}

TEST_CASE("memory sharing rejects infeasible alpha1 with a suggestion") {
    ContentLibrary lib = ContentLibrary::random(1, 24, 5);
    REQUIRE_THROWS_AS(
        memory_share(Rational(1, 5), Rational(1, 3), Rational(1), lib),
        domain_error);
    REQUIRE_THROWS_WITH(
        memory_share(Rational(1, 5), Rational(1, 3), Rational(1), lib),
        Catch::Matchers::ContainsSubstring("nearest feasible alpha1"));
    REQUIRE_THROWS_AS(memory_share(Rational(0), Rational(1, 3), Rational(1), lib),
                      domain_error);
    REQUIRE_THROWS_AS(memory_share(Rational(1), Rational(1, 3), Rational(1), lib),
                      domain_error);
    REQUIRE_THROWS_AS(
        memory_share(Rational(1, 2), Rational(1, 2), Rational(1), lib),
        domain_error);

    // 1/5 * 24 = 4.8 bits; feasible sizes are 6, 12, 18
    Rational fix = nearest_feasible_alpha1(Rational(1, 5), 24);
    REQUIRE(fix == Rational(6, 24));
    REQUIRE(nearest_feasible_alpha1(Rational(99, 100), 24) == Rational(18, 24));
    REQUIRE(nearest_feasible_alpha1(Rational(1, 100), 24) == Rational(6, 24));
}

TEST_CASE("library export and import round trip") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("cacheic_lib_test_" + std::to_string(std::rand()));
    ContentLibrary lib = ContentLibrary::random(3, 120, 11);
    export_library(lib, dir, 11);

    auto [back, manifest] = import_library(dir);
    REQUIRE(back.n_files == 3);
    REQUIRE(back.file_bits == 120);
    REQUIRE(back.payloads == lib.payloads);
    REQUIRE(manifest.seed.has_value());
    REQUIRE(*manifest.seed == 11);
    REQUIRE(manifest.part_labels == std::vector<std::string>{"12", "13", "23"});
    REQUIRE(manifest.file_names.size() == 3);

    REQUIRE_THROWS_AS(import_library(dir / "missing"), domain_error);
    fs::remove_all(dir);
}

TEST_CASE("bit packing round trips") {
    BitString b = bits_of("110100101");
    REQUIRE(unpack_bits(pack_bits(b), int(b.size())) == b);
    BitString empty;
    REQUIRE(pack_bits(empty).empty());
}

#include <catch_amalgamated.hpp>

#include <set>

#include "cacheic/zfnet.hpp"

using namespace cacheic::zfnet;
using cacheic::cxmat::Mat3;
using cacheic::cxmat::cd;
using cacheic::domain_error;

TEST_CASE("canonical stream order") {
    const auto& streams = all_streams();
    REQUIRE(streams.size() == 18);
    REQUIRE(streams[0] == StreamId{1, 1, 2, 2});
    REQUIRE(streams[1] == StreamId{1, 1, 2, 3});
    REQUIRE(streams[5] == StreamId{1, 2, 3, 3});
    REQUIRE(streams[6] == StreamId{2, 1, 2, 1});
    REQUIRE(streams[17] == StreamId{3, 2, 3, 2});
    REQUIRE(streams[0].label() == "A12^2");
    REQUIRE(streams[7].label() == "B12^3");
    REQUIRE(streams[13].label() == "C12^2");
    for (int i = 0; i < 18; ++i)
        REQUIRE(stream_index(streams[std::size_t(i)]) == i);
    REQUIRE_THROWS_AS(stream_index(StreamId{1, 1, 2, 1}), domain_error);

    // interference receiver is the remaining index
    REQUIRE(StreamId{1, 1, 2, 2}.interference_receiver() == 3);
    REQUIRE(StreamId{2, 1, 2, 1}.interference_receiver() == 3);
    REQUIRE(StreamId{3, 1, 3, 2}.interference_receiver() == 1);
}

TEST_CASE("stream enumeration per demand") {
    REQUIRE(enumerate_streams(DemandVector{{1, 2, 3}}).size() == 18);
    // repeated demands reuse the same stream structure
    REQUIRE(enumerate_streams(DemandVector{{2, 2, 2}}, 3).size() == 18);
    REQUIRE_THROWS_AS(enumerate_streams(DemandVector{{1, 2, 4}}, 3), domain_error);
    REQUIRE_THROWS_AS(enumerate_streams(DemandVector{{0, 1, 1}}, 3), domain_error);
}

TEST_CASE("stream tables partition the 18 streams") {
    StreamTables t1 = stream_tables(1);
    std::vector<std::string> desired1, interf1, nulled1;
    for (const auto& s : t1.desired) desired1.push_back(s.label());
    for (const auto& s : t1.interfering) interf1.push_back(s.label());
    for (const auto& s : t1.nulled) nulled1.push_back(s.label());
    REQUIRE(desired1 == std::vector<std::string>{"A12^2", "A12^3", "A13^2",
                                                 "A13^3", "A23^2", "A23^3"});
    REQUIRE(interf1 == std::vector<std::string>{"B12^3", "C12^2", "B13^3",
                                                "C13^2", "B23^3", "C23^2"});
    REQUIRE(nulled1 == std::vector<std::string>{"B12^1", "C12^1", "B13^1",
                                                "C13^1", "B23^1", "C23^1"});

    StreamTables t2 = stream_tables(2);
    std::vector<std::string> interf2;
    for (const auto& s : t2.interfering) interf2.push_back(s.label());
    REQUIRE(interf2 == std::vector<std::string>{"A12^3", "C12^1", "A13^3",
                                                "C13^1", "A23^3", "C23^1"});

    StreamTables t3 = stream_tables(3);
    std::vector<std::string> interf3;
    for (const auto& s : t3.interfering) interf3.push_back(s.label());
    REQUIRE(interf3 == std::vector<std::string>{"A12^2", "B12^1", "A13^2",
                                                "B13^1", "A23^2", "B23^1"});

    for (int j = 1; j <= 3; ++j) {
        StreamTables t = stream_tables(j);
        REQUIRE(t.desired.size() == 6);
        REQUIRE(t.interfering.size() == 6);
        REQUIRE(t.nulled.size() == 6);
        std::set<int> seen;
        for (const auto& list : {t.desired, t.interfering, t.nulled})
            for (const auto& s : list) seen.insert(stream_index(s));
        REQUIRE(seen.size() == 18);
        for (const auto& s : t.nulled) REQUIRE(s.target == j);
        for (const auto& s : t.desired) REQUIRE(s.receiver == j);
        for (const auto& s : t.interfering)
            REQUIRE(s.interference_receiver() == j);
    }
    REQUIRE_THROWS_AS(stream_tables(0), domain_error);
    REQUIRE_THROWS_AS(stream_tables(4), domain_error);
}

TEST_CASE("precoding factors null the target row exactly") {
    Mat3 h = cacheic::cxmat::sample_channel(7);
    ZfFactors f = zf_precoding_factors(StreamId{1, 1, 2, 2}, h);
    REQUIRE(f.k == 1);
    REQUIRE(f.ktilde == 2);
    REQUIRE(f.at_k == h.e(2, 2));
    REQUIRE(f.at_ktilde == -h.e(2, 1));
    REQUIRE(f.at_tx(3) == cd(0.0));

    // the cancellation is bitwise: both products are the same two factors
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mat3 m = cacheic::cxmat::sample_channel(seed);
        for (const StreamId& s : all_streams()) {
            ZfFactors zf = zf_precoding_factors(s, m);
            cd at_target = m.e(s.target, s.k) * zf.at_k +
                           m.e(s.target, s.ktilde) * zf.at_ktilde;
            REQUIRE(at_target == cd(0.0));
        }
    }
}

TEST_CASE("equivalent coefficient formula") {
    Mat3 h = cacheic::cxmat::sample_channel(3);
    StreamId s{1, 1, 2, 2};
    REQUIRE(equivalent_coefficient(s, 1, h) ==
            h.e(1, 1) * h.e(2, 2) - h.e(1, 2) * h.e(2, 1));
    REQUIRE(equivalent_coefficient(s, 3, h) ==
            h.e(3, 1) * h.e(2, 2) - h.e(3, 2) * h.e(2, 1));
    REQUIRE(equivalent_coefficient(s, 2, h) == cd(0.0));
}

TEST_CASE("adjugate index identification") {
    AdjIndex a = adjugate_index(StreamId{1, 1, 2, 2}, 1);
    REQUIRE(a.sign == 1);
    REQUIRE(a.xi == 3);
    REQUIRE(a.xitilde == 3);
    AdjIndex b = adjugate_index(StreamId{2, 1, 2, 1}, 2);
    REQUIRE(b.sign == -1);
    REQUIRE(b.xi == 3);
    REQUIRE(b.xitilde == 3);
    REQUIRE_THROWS_AS(adjugate_index(StreamId{1, 1, 2, 2}, 2), domain_error);

    // every surviving coefficient is a signed adjugate entry
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mat3 h = cacheic::cxmat::sample_channel(seed);
        Mat3 g = cacheic::cxmat::adjugate(h);
        for (const StreamId& s : all_streams())
            for (int j = 1; j <= 3; ++j) {
                if (j == s.target) continue;
                cd coef = equivalent_coefficient(s, j, h);
                AdjIndex ai = adjugate_index(s, j);
                cd pred = double(ai.sign) * g.e(ai.xi, ai.xitilde);
                REQUIRE(std::abs(coef - pred) <= 1e-10 * std::abs(coef));
            }
    }
}

TEST_CASE("only nine coefficient values appear, up to sign") {
    // 36 (stream, receiver) pairs collapse onto the 9 adjugate entries
    Mat3 h = cacheic::cxmat::sample_channel(12);
    std::set<std::pair<int, int>> hit;
    for (const StreamId& s : all_streams())
        for (int j = 1; j <= 3; ++j) {
            if (j == s.target) continue;
            AdjIndex ai = adjugate_index(s, j);
            hit.insert({ai.xi, ai.xitilde});
        }
    REQUIRE(hit.size() == 9);
}

TEST_CASE("equivalent channel table") {
    Mat3 h = cacheic::cxmat::sample_channel(5);
    double hmax2 = 0.0;
    for (const cd& z : h.a) hmax2 = std::max(hmax2, std::norm(z));

    ScalingFactors ones = ScalingFactors::ones();
    EquivalentChannel eq = build_equivalent_channel(DemandVector{}, h, ones);
    for (const StreamId& s : all_streams()) {
        REQUIRE(std::abs(eq.at(s, s.target)) <= 1e-10 * hmax2);
        for (int j = 1; j <= 3; ++j)
            REQUIRE(eq.at(s, j) == equivalent_coefficient(s, j, h));
    }

    ScalingFactors sc = draw_scaling_factors(99);
    EquivalentChannel eqs = build_equivalent_channel(DemandVector{}, h, sc);
    for (const StreamId& s : all_streams())
        for (int j = 1; j <= 3; ++j)
            REQUIRE(eqs.at(s, j) == sc.at(s) * equivalent_coefficient(s, j, h));
}

TEST_CASE("scaling factors stay in the annulus and are seeded") {
    ScalingFactors a = draw_scaling_factors(4);
    ScalingFactors b = draw_scaling_factors(4);
    REQUIRE(a.by_stream == b.by_stream);
    for (const cd& z : a.by_stream) {
        REQUIRE(std::abs(z) >= 0.5);
        REQUIRE(std::abs(z) <= 1.5);
    }
    ScalingFactors c = draw_scaling_factors(5);
    REQUIRE(a.by_stream != c.by_stream);
}

TEST_CASE("the virtual transmitters are not jointly independent") {
    // A12^2 at receiver 1 and B12^1 at receiver 2 carry the same coefficient
    // up to sign, exactly, for every channel
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mat3 h = cacheic::cxmat::sample_channel(seed);
        cd wa = equivalent_coefficient(StreamId{1, 1, 2, 2}, 1, h);
        cd wb = equivalent_coefficient(StreamId{2, 1, 2, 1}, 2, h);
        REQUIRE(wa == -wb);
    }
}

TEST_CASE("full cache delivery inverts the channel") {
    std::array<cd, 3> s = {cd(1.0, 2.0), cd(-0.5, 0.25), cd(3.0, -1.0)};
    std::array<cd, 3> x = full_cache_zf_encode(DemandVector{}, Mat3::identity(), s);
    REQUIRE(x == s);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Mat3 h = cacheic::cxmat::sample_channel(seed);
        std::array<cd, 3> enc = full_cache_zf_encode(DemandVector{}, h, s);
        std::array<cd, 3> y = cacheic::cxmat::mat_vec(h, enc);
        for (int j = 0; j < 3; ++j)
            REQUIRE(std::abs(y[std::size_t(j)] - s[std::size_t(j)]) <=
                    1e-9 * std::abs(s[std::size_t(j)]));
    }

    Mat3 singular; // 1..9 has rank 2
    for (int i = 0; i < 9; ++i) singular.a[std::size_t(i)] = double(i + 1);
    REQUIRE_THROWS_AS(full_cache_zf_encode(DemandVector{}, singular, s),
                      domain_error);
}

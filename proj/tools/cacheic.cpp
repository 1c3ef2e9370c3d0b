// cacheic command-line front end: experiment orchestration and result
// serialization.  Subcommands: tradeoff, zf-check, align, simulate, sweep,
// census, adj-test.  Exit codes: 0 success, 2 domain/validation error,
// 3 guard exceeded, 4 internal failure.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cacheic/align.hpp"
#include "cacheic/cxmat.hpp"
#include "cacheic/dof.hpp"
#include "cacheic/errors.hpp"
#include "cacheic/library.hpp"
#include "cacheic/phy.hpp"
#include "cacheic/rational.hpp"
#include "cacheic/zfnet.hpp"

namespace {

using json = nlohmann::json;
using namespace cacheic;

constexpr const char* kVersion = "0.1.0";

bool log_enabled() {
    const char* v = std::getenv("CACHEIC_LOG");
    return v != nullptr && *v != '\0';
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[cacheic] " << msg << "\n";
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Effective experiment configuration: defaults, overridden by the --config
// JSON document, overridden by explicit CLI flags.
struct Config {
    std::uint64_t seed = 1;
    int trials = -1; // command-specific default when negative
    std::vector<double> snr_db;
    std::string mu;
    int L = 1;
    long long Q = 1;
    double epsilon = 0.05;
    int workers = 1;
    std::string out;
    int n_files = 3;
    int file_bits = 120;
    std::string demand = "1,2,3";
    double sigma2 = 0.0;
    bool sigma2_given = false;
    double gamma = 1.0;
    double c1 = 1.0;
    int symbols_per_trial = 100;

    json snapshot(const std::string& command) const {
        json j;
        j["command"] = command;
        j["seed"] = seed;
        if (trials >= 0) j["trials"] = trials;
        if (!snr_db.empty()) j["snr_db"] = snr_db;
        if (!mu.empty()) j["mu"] = mu;
        j["L"] = L;
        j["Q"] = Q;
        j["epsilon"] = epsilon;
        j["workers"] = workers;
        j["n_files"] = n_files;
        j["file_bits"] = file_bits;
        j["demand"] = demand;
        j["sigma2"] = sigma2;
        j["gamma"] = gamma;
        j["c1"] = c1;
        j["symbols_per_trial"] = symbols_per_trial;
        return j;
    }
};

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != tok.size()) throw domain_error("invalid number in list: " + tok);
        out.push_back(v);
    }
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& s) {
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(parse_rational(tok));
    }
    if (out.empty()) throw domain_error("empty rational list");
    return out;
}

// Writes to --out when set, stdout otherwise; collects everything first so a
// failure never leaves a partial file behind.
void emit(const Config& cfg, const std::string& body) {
    if (cfg.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + cfg.out);
    f << body;
}

void emit_sidecar(const std::string& path, const json& record) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + path);
    f << record.dump(2) << "\n";
}

std::string config_comment(const Config& cfg, const std::string& command) {
    return "# config " + cfg.snapshot(command).dump() + "\n";
}

// ---------------------------------------------------------------------------

int cmd_tradeoff(const Config& cfg) {
    std::string grid = cfg.mu.empty()
                           ? "1/3,5/12,1/2,7/12,2/3,3/4,5/6,11/12,1"
                           : cfg.mu;
    std::vector<Rational> mus = parse_rational_list(grid);
    std::vector<dof::TradeoffPoint> pts;
    for (const Rational& m : mus) pts.push_back({m, dof::theorem_inv_dof(m)});

    std::ostringstream os;
    os << config_comment(cfg, "tradeoff");
    for (const char* c : {"1/3", "2/3", "1"}) {
        Rational m = parse_rational(c);
        Rational inv = dof::theorem_inv_dof(m);
        Rational d = Rational(1) / inv;
        os << "# corner mu=" << m.str() << " inv_dof=" << inv.str()
           << " dof=" << d.str() << "\n";
    }
    os << "mu_num,mu_den,invdof_num,invdof_den,dof_decimal\n";
    for (const auto& p : pts)
        os << p.mu.num() << "," << p.mu.den() << "," << p.inv_dof.num() << ","
           << p.inv_dof.den() << "," << fmt_double(1.0 / p.inv_dof.to_double())
           << "\n";
    emit(cfg, os.str());
    return 0;
}

int cmd_zf_check(const Config& cfg, bool dump_equivalent) {
    int trials = cfg.trials < 0 ? 1000 : cfg.trials;
    if (trials < 1) throw domain_error("zf-check: trials must be >= 1");

    if (dump_equivalent) {
        cxmat::Mat3 h = cxmat::sample_channel(derive_seed(cfg.seed, 0));
        zfnet::ScalingFactors ones = zfnet::ScalingFactors::ones();
        zfnet::EquivalentChannel eq =
            zfnet::build_equivalent_channel(zfnet::DemandVector{}, h, ones);
        std::ostringstream os;
        os << config_comment(cfg, "zf-check");
        os << "stream,receiver,real,imag\n";
        const auto& streams = zfnet::all_streams();
        for (std::size_t si = 0; si < 18; ++si)
            for (int j = 1; j <= 3; ++j) {
                cxmat::cd v = eq.at(streams[si], j);
                os << streams[si].label() << "," << j << "," << fmt_double(v.real())
                   << "," << fmt_double(v.imag()) << "\n";
            }
        emit(cfg, os.str());
        return 0;
    }

    double max_leakage = 0.0, max_ratio = 0.0, max_ident = 0.0, max_witness = 0.0;
    bool witness_ok = true;
    const auto& streams = zfnet::all_streams();
    for (int t = 0; t < trials; ++t) {
        cxmat::Mat3 h = cxmat::sample_channel(derive_seed(cfg.seed, std::uint64_t(t)));
        cxmat::Mat3 g = cxmat::adjugate(h);
        double scale = 0.0;
        for (int r = 1; r <= 3; ++r)
            for (int c = 1; c <= 3; ++c) scale = std::max(scale, std::norm(h.e(r, c)));
        for (const zfnet::StreamId& s : streams) {
            double leak = std::abs(zfnet::equivalent_coefficient(s, s.target, h));
            max_leakage = std::max(max_leakage, leak);
            max_ratio = std::max(max_ratio, leak / scale);
            for (int j = 1; j <= 3; ++j) {
                if (j == s.target) continue;
                cxmat::cd coef = zfnet::equivalent_coefficient(s, j, h);
                zfnet::AdjIndex ai = zfnet::adjugate_index(s, j);
                cxmat::cd pred = double(ai.sign) * g.e(ai.xi, ai.xitilde);
                double rel = std::abs(coef - pred) /
                             std::max(std::abs(coef), 1e-300);
                max_ident = std::max(max_ident, rel);
            }
        }
        // dependence witness: the stream (1,{1,2},2) at receiver 1 and the
        // stream (2,{1,2},1) at receiver 2 carry the same coefficient up to
        // sign, so the 18 virtual transmitters are not jointly independent.
        cxmat::cd wa = zfnet::equivalent_coefficient(
            zfnet::StreamId{1, 1, 2, 2}, 1, h);
        cxmat::cd wb = zfnet::equivalent_coefficient(
            zfnet::StreamId{2, 1, 2, 1}, 2, h);
        double werr = std::abs(wa + wb);
        max_witness = std::max(max_witness, werr);
        if (werr > 1e-12 * scale) witness_ok = false;
        if (t % 200 == 0) log_line("zf-check trial " + std::to_string(t));
    }
    json j;
    j["command"] = "zf-check";
    j["config"] = cfg.snapshot("zf-check");
    j["trials"] = trials;
    j["max_leakage"] = max_leakage;
    j["max_leakage_ratio"] = max_ratio;
    j["leakage_ok"] = max_ratio <= 1e-10;
    j["max_identification_rel_error"] = max_ident;
    j["identification_ok"] = max_ident <= 1e-9;
    j["dependence_witness_max_error"] = max_witness;
    j["dependence_witness_ok"] = witness_ok;
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_align(const Config& cfg) {
    if (cfg.L < 1) throw domain_error("align: L must be >= 1");
    if (cfg.L > 4)
        throw guard_error("align: L > 4 exceeds the enumeration guard");
    std::ostringstream os;
    os << config_comment(cfg, "align");
    os << "L,transmitted_dims,union_size,box_dims,distinct\n";
    for (int l = 1; l <= cfg.L; ++l) {
        auto census = align::interference_union_exponents(l);
        auto rep = align::verify_monomial_distinctness(l);
        long long box = 1;
        for (int i = 0; i < 6; ++i) box *= (l + 1);
        os << l << "," << census.transmitted_dims << ","
           << census.union_monomials.size() << "," << box << ","
           << (rep.distinct ? "true" : "false") << "\n";
    }
    emit(cfg, os.str());
    return 0;
}

std::array<int, 3> parse_demand(const Config& cfg, int n_files) {
    if (cfg.demand == "random") {
        std::array<int, 3> d{1, 2, 3};
        Rng rng(derive_seed(cfg.seed, 0xDE3A));
        for (int i = 2; i > 0; --i) {
            int j = int(rng.next_u64() % std::uint64_t(i + 1));
            std::swap(d[std::size_t(i)], d[std::size_t(j)]);
        }
        return d;
    }
    std::vector<double> v = parse_double_list(cfg.demand);
    if (v.size() != 3) throw domain_error("demand must list three files");
    std::array<int, 3> d{};
    for (int i = 0; i < 3; ++i) {
        d[std::size_t(i)] = int(v[std::size_t(i)]);
        if (d[std::size_t(i)] < 1 || d[std::size_t(i)] > n_files)
            throw domain_error("demand entry out of range");
    }
    return d;
}

int cmd_simulate(const Config& cfg) {
    Rational mu = cfg.mu.empty() ? Rational(2, 3) : parse_rational(cfg.mu);
    if (!(mu == Rational(2, 3)))
        throw domain_error("simulate: only the mu = 2/3 delivery scheme is "
                           "implemented end to end");
    if (cfg.file_bits <= 0 || cfg.file_bits % 6 != 0)
        throw domain_error("simulate: file_bits must be a positive multiple of 6");
    if (!cfg.snr_db.empty() && cfg.snr_db.size() != 1)
        throw domain_error("simulate: --snr-db takes a single value here");

    auto lib = library::ContentLibrary::random(cfg.n_files, cfg.file_bits,
                                               derive_seed(cfg.seed, 0x11b));
    zfnet::DemandVector dv{parse_demand(cfg, cfg.n_files)};
    cxmat::Mat3 h = cxmat::sample_channel(derive_seed(cfg.seed, 0xCA));

    double gamma = cfg.gamma, sigma2 = cfg.sigma2;
    double min_delta = 0.0;
    if (!cfg.snr_db.empty()) {
        // SNR sets Gamma so the worst receiver's minimum distance against
        // unit noise is 10^(snr/20).
        sigma2 = 1.0;
        align::ConstellationSpec unit =
            align::make_spec(cfg.L, cfg.Q, 1.0, cfg.epsilon, cfg.c1);
        zfnet::ScalingFactors sc =
            zfnet::draw_scaling_factors(derive_seed(cfg.seed, 0x5CA1E));
        phy::TxSetup probe(h, sc, unit);
        min_delta = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= 3; ++j)
            min_delta = std::min(min_delta,
                                 align::min_distance_label_diff(
                                     phy::rx_coefficients(j, probe), cfg.Q));
        double target = std::pow(10.0, cfg.snr_db[0] / 20.0);
        gamma = (min_delta > 0.0 && std::isfinite(min_delta)) ? target / min_delta
                                                              : target;
    }

    align::ConstellationSpec spec =
        align::make_spec(cfg.L, cfg.Q, gamma, cfg.epsilon, cfg.c1);
    auto t0 = std::chrono::steady_clock::now();
    phy::DecodedResult res = phy::end_to_end(lib, dv, h, spec, sigma2, cfg.seed);
    auto t1 = std::chrono::steady_clock::now();
    log_line("simulate took " +
             std::to_string(std::chrono::duration<double>(t1 - t0).count()) + " s");

    json j;
    j["command"] = "simulate";
    j["config"] = cfg.snapshot("simulate");
    j["artifact_version"] = kVersion;
    j["demand"] = dv.d;
    j["gamma"] = gamma;
    j["sigma2"] = sigma2;
    if (!cfg.snr_db.empty()) {
        j["snr_db"] = cfg.snr_db[0];
        j["unit_gamma_min_distance"] = min_delta;
    }
    j["uses"] = res.uses;
    j["all_exact"] = res.all_exact;
    json rx = json::array();
    for (int r = 0; r < 3; ++r) {
        const auto& rr = res.rx[std::size_t(r)];
        rx.push_back({{"receiver", r + 1},
                      {"bits_exact", rr.bits_exact},
                      {"symbol_errors", rr.symbol_errors},
                      {"ambiguous_symbols", rr.ambiguous_symbols}});
    }
    j["receivers"] = rx;
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const Config& cfg) {
    phy::SweepConfig sc;
    sc.snr_db = cfg.snr_db.empty()
                    ? std::vector<double>{0.0, 10.0, 20.0, 30.0, 40.0}
                    : cfg.snr_db;
    sc.trials = cfg.trials < 0 ? 20 : cfg.trials;
    sc.symbols_per_trial = cfg.symbols_per_trial;
    sc.L = cfg.L;
    sc.Q = cfg.Q;
    sc.epsilon = cfg.epsilon;
    if (cfg.sigma2_given) sc.sigma2 = cfg.sigma2; // sweep default stays noisy
    sc.seed = cfg.seed;
    sc.workers = cfg.workers;
    Config eff = cfg; // snapshot the noise level actually used
    eff.sigma2 = sc.sigma2;

    auto t0 = std::chrono::steady_clock::now();
    phy::SerCurve curve = phy::ser_sweep(sc);
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    log_line("sweep took " + std::to_string(secs) + " s");

    std::ostringstream os;
    os << config_comment(eff, "sweep");
    os << "snr_db,trials,symbol_errors,ser,min_distance\n";
    for (const auto& r : curve.rows)
        os << fmt_double(r.snr_db) << "," << r.trials << "," << r.symbol_errors
           << "," << fmt_double(r.ser) << "," << fmt_double(r.min_distance) << "\n";
    emit(cfg, os.str());

    if (!cfg.out.empty()) {
        json rec;
        rec["artifact_version"] = kVersion;
        rec["config"] = eff.snapshot("sweep");
        rec["duration_seconds"] = secs;
        json rows = json::array();
        for (const auto& r : curve.rows)
            rows.push_back({{"snr_db", r.snr_db},
                            {"trials", r.trials},
                            {"symbol_errors", r.symbol_errors},
                            {"ser", r.ser},
                            {"min_distance", r.min_distance}});
        rec["rows"] = rows;
        emit_sidecar(cfg.out + ".run.json", rec);
    }
    return 0;
}

int cmd_census(const Config& cfg) {
    dof::CensusResult c = dof::load_balance_census();
    json j;
    j["command"] = "census";
    j["config"] = cfg.snapshot("census");
    j["assignments"] = 27;
    j["counts"] = {{"all_same", c.all_same},
                   {"two_one", c.two_one},
                   {"all_distinct", c.all_distinct}};
    j["fractions"] = {{"all_same", c.frac_all_same.str()},
                      {"two_one", c.frac_two_one.str()},
                      {"all_distinct", c.frac_all_distinct.str()}};
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_adj_test(const Config& cfg) {
    int trials = cfg.trials < 0 ? 100 : cfg.trials;
    if (trials < 1) throw domain_error("adj-test: trials must be >= 1");
    double max_identity = 0.0, max_roundtrip = 0.0;
    for (int t = 0; t < trials; ++t) {
        cxmat::Mat3 a = cxmat::sample_channel(derive_seed(cfg.seed, std::uint64_t(t)));
        cxmat::Mat3 adj = cxmat::adjugate(a);
        cxmat::cd det = cxmat::det3(a);
        cxmat::Mat3 prod = a * adj;
        double scale = std::abs(det);
        for (int r = 1; r <= 3; ++r)
            for (int c = 1; c <= 3; ++c) {
                cxmat::cd want = (r == c) ? det : cxmat::cd(0.0);
                max_identity = std::max(
                    max_identity, std::abs(prod.e(r, c) - want) / scale);
            }
        if (cxmat::is_invertible(a)) {
            cxmat::Mat3 b = cxmat::adj_inverse(a);
            cxmat::Mat3 back = cxmat::adjugate(b);
            double amax = cxmat::max_abs_entry(a);
            for (int r = 1; r <= 3; ++r)
                for (int c = 1; c <= 3; ++c)
                    max_roundtrip = std::max(
                        max_roundtrip, std::abs(back.e(r, c) - a.e(r, c)) / amax);
        }
    }
    json j;
    j["command"] = "adj-test";
    j["config"] = cfg.snapshot("adj-test");
    j["trials"] = trials;
    j["max_identity_rel_error"] = max_identity;
    j["identity_ok"] = max_identity <= 1e-9;
    j["max_roundtrip_rel_error"] = max_roundtrip;
    j["roundtrip_ok"] = max_roundtrip <= 1e-8;
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache-aided interference channel simulator"};
    app.require_subcommand(1);

    Config cfg;
    std::string config_path, snr_list, seed_str;
    bool dump_equivalent = false;

    // global flags, attached to every subcommand so they can appear after it
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed_str, "RNG seed (u64)");
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--trials", cfg.trials, "trial count");
        sub->add_option("--snr-db", snr_list, "comma-separated SNR grid in dB");
        sub->add_option("--mu", cfg.mu, "cache size mu as a rational (list for tradeoff)");
        sub->add_option("-L", cfg.L, "monomial exponent bound");
        sub->add_option("-Q", cfg.Q, "symbol alphabet bound");
        sub->add_option("--epsilon", cfg.epsilon, "constellation epsilon");
        sub->add_option("--workers", cfg.workers, "worker pool size");
        return sub;
    };

    CLI::App* tradeoff = add_common(app.add_subcommand("tradeoff", "inverse-DoF curve"));
    CLI::App* zf = add_common(app.add_subcommand("zf-check", "zero-forcing checks"));
    zf->add_flag("--dump-equivalent", dump_equivalent,
                 "emit the 18x3 equivalent channel as CSV instead of the summary");
    CLI::App* al = add_common(app.add_subcommand("align", "alignment census"));
    CLI::App* sim = add_common(app.add_subcommand("simulate", "end-to-end delivery"));
    CLI::App* sw = add_common(app.add_subcommand("sweep", "symbol error rate sweep"));
    CLI::App* cen = add_common(app.add_subcommand("census", "load-balancing census"));
    CLI::App* adj = add_common(app.add_subcommand("adj-test", "adjugate identities"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        // precedence: defaults, then config file, then explicit flags
        if (active->count("--config")) {
            std::ifstream f(config_path);
            if (!f) throw cacheic::domain_error("cannot read config: " + config_path);
            try {
                json doc = json::parse(f);
                if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
                if (doc.contains("trials") && !active->count("--trials"))
                    cfg.trials = doc["trials"].get<int>();
                if (doc.contains("snr_db") && !active->count("--snr-db"))
                    cfg.snr_db = doc["snr_db"].get<std::vector<double>>();
                if (doc.contains("mu") && !active->count("--mu"))
                    cfg.mu = doc["mu"].get<std::string>();
                if (doc.contains("L") && !active->count("-L")) cfg.L = doc["L"].get<int>();
                if (doc.contains("Q") && !active->count("-Q"))
                    cfg.Q = doc["Q"].get<long long>();
                if (doc.contains("epsilon") && !active->count("--epsilon"))
                    cfg.epsilon = doc["epsilon"].get<double>();
                if (doc.contains("workers") && !active->count("--workers"))
                    cfg.workers = doc["workers"].get<int>();
                if (doc.contains("out") && !active->count("--out"))
                    cfg.out = doc["out"].get<std::string>();
                if (doc.contains("n_files")) cfg.n_files = doc["n_files"].get<int>();
                if (doc.contains("file_bits")) cfg.file_bits = doc["file_bits"].get<int>();
                if (doc.contains("demand")) cfg.demand = doc["demand"].get<std::string>();
                if (doc.contains("sigma2")) {
                    cfg.sigma2 = doc["sigma2"].get<double>();
                    cfg.sigma2_given = true;
                }
                if (doc.contains("gamma")) cfg.gamma = doc["gamma"].get<double>();
                if (doc.contains("c1")) cfg.c1 = doc["c1"].get<double>();
                if (doc.contains("symbols_per_trial"))
                    cfg.symbols_per_trial = doc["symbols_per_trial"].get<int>();
            } catch (const json::exception& e) {
                throw cacheic::domain_error("bad config " + config_path + ": " + e.what());
            }
        }
        if (active->count("--seed")) {
            std::size_t pos = 0;
            try {
                cfg.seed = std::stoull(seed_str, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (pos != seed_str.size())
                throw cacheic::domain_error("cannot parse --seed: " + seed_str);
        }
        if (active->count("--snr-db")) cfg.snr_db = parse_double_list(snr_list);

        if (active == tradeoff) return cmd_tradeoff(cfg);
        if (active == zf) return cmd_zf_check(cfg, dump_equivalent);
        if (active == al) return cmd_align(cfg);
        if (active == sim) return cmd_simulate(cfg);
        if (active == sw) return cmd_sweep(cfg);
        if (active == cen) return cmd_census(cfg);
        if (active == adj) return cmd_adj_test(cfg);
        std::cerr << "error: unknown command\n";
        return 4;
    } catch (const cacheic::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cacheic::guard_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}

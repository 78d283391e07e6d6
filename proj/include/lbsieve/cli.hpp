#pragma once

// The lbsieve command line: one entry point per module.
//   buchstab table    omega(u) tabulation as CSV
//   deficit run       the deficit integrals as JSON
//   lambda profile    window sums of the lower-bound sieve
//   charsum scan      discrepancy statistics over progressions
//   verify scan       representation search n = p + a*b
//   arith pi          prime-count smoke test
// Exit codes: 0 success, 1 reproduction failure (or runtime error), 2 usage.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lbsieve/arith.hpp"
#include "lbsieve/buchstab.hpp"
#include "lbsieve/decomposition.hpp"
#include "lbsieve/decomposition_io.hpp"
#include "lbsieve/deficit.hpp"
#include "lbsieve/dirichlet.hpp"
#include "lbsieve/emit.hpp"
#include "lbsieve/parallel.hpp"
#include "lbsieve/verify.hpp"

namespace lbsieve::cli {

using arith::u64;

namespace detail {

inline emit::JsonObject config_echo(const std::string& command,
                                    const std::vector<std::pair<std::string, std::string>>& kv) {
    emit::JsonObject cfg;
    cfg.field("command", command);
    for (const auto& [k, v] : kv) cfg.raw(k, v);
    return cfg;
}

inline std::string fmt_u64(u64 v) { return std::to_string(v); }

struct BuchstabTableArgs {
    double from = 1.0, to = 10.0, step = 0.01;
    double grid_step = 0.001;
    double u_max = 0.0;  // 0: max(to, 10)
    std::string out;
};

inline int run_buchstab_table(const BuchstabTableArgs& a) {
    double u_max = a.u_max > 0.0 ? a.u_max : std::max(a.to, 10.0);
    auto ev = buchstab::build_evaluator(u_max, a.grid_step);
    emit::CsvWriter csv;
    csv.comment("command", "buchstab table");
    csv.comment("from", emit::num(a.from));
    csv.comment("to", emit::num(a.to));
    csv.comment("step", emit::num(a.step));
    csv.comment("grid_step", emit::num(a.grid_step));
    csv.comment("u_max", emit::num(u_max));
    csv.header("u,omega");
    for (double u = a.from; u <= a.to + 1e-12; u += a.step)
        csv.row(emit::num(std::min(u, u_max)) + "," +
                emit::num(ev.omega(std::min(u, u_max))));
    emit::write_artifact(a.out, csv.str());
    return 0;
}

struct DeficitRunArgs {
    std::string integral = "total";
    std::int64_t samples = 2'000'000;
    std::uint64_t seed = 42;
    int strata2 = 8, strata4 = 6;
    bool no_removal = false;
    std::string out;
};

inline int run_deficit(const DeficitRunArgs& a) {
    auto ev = buchstab::build_evaluator(10.0, 0.001);
    deficit::McParams p;
    p.samples = a.samples;
    p.seed = a.seed;

    emit::JsonObject root;
    root.object("config",
                config_echo("deficit run",
                            {{"integral", emit::quote(a.integral)},
                             {"samples", std::to_string(a.samples)},
                             {"seed", std::to_string(a.seed)},
                             {"removal", a.no_removal ? "false" : "true"}}));

    if (a.integral == "first") {
        p.strata_per_dim = a.strata2;
        auto r = deficit::first_integral(ev, p);
        root.field("value", r.value)
            .field("std_error", r.std_error)
            .field("samples", r.samples);
    } else if (a.integral == "second") {
        p.strata_per_dim = a.strata4;
        auto r = deficit::second_integral(ev, p, !a.no_removal);
        root.field("value", r.value)
            .field("std_error", r.std_error)
            .field("samples", r.samples);
    } else if (a.integral == "total") {
        deficit::McParams p2 = p;
        p.strata_per_dim = a.strata2;
        p2.strata_per_dim = a.strata4;
        deficit::TotalDeficit t;
        t.first = deficit::first_integral(ev, p);
        t.second = deficit::second_integral(ev, p2, true);
        t.value = t.first.value + t.second.value + t.imported;
        emit::JsonObject comp;
        comp.field("first", t.first.value)
            .field("second", t.second.value)
            .field("imported", t.imported);
        root.field("value", t.value)
            .field("std_error", std::hypot(t.first.std_error, t.second.std_error))
            .field("samples", t.first.samples + t.second.samples)
            .object("components", comp);
        if (!(t.value < 0.75)) {
            emit::write_artifact(a.out, root.str() + "\n");
            throw reproduction_failure("total deficit reached 0.75", t.first.value,
                                       t.second.value, t.imported);
        }
    } else {
        throw parameter_error("deficit run: integral must be first|second|total");
    }
    emit::write_artifact(a.out, root.str() + "\n");
    return 0;
}

struct LambdaProfileArgs {
    u64 x = 10'000'000;
    u64 window = 0;  // 0: x / log^2 x
    u64 y = 0;       // 0: x
    std::string decomposition;
    std::string out;
};

inline int run_lambda_profile(const LambdaProfileArgs& a) {
    decomp::Decomposition d;
    if (a.decomposition.empty()) {
        d = decomp::principal_decomposition();
    } else {
        auto cat = regions::catalog::all();
        d = decomp::load_decomposition(a.decomposition, cat);
    }
    u64 y = a.y ? a.y : a.x;
    auto prof = decomp::lambda_profile(d, a.x, y, a.window);

    emit::JsonObject root;
    root.object("config",
                config_echo("lambda profile",
                            {{"x", fmt_u64(a.x)},
                             {"window", fmt_u64(prof.window_hi - prof.window_lo)},
                             {"y", fmt_u64(y)},
                             {"decomposition",
                              emit::quote(a.decomposition.empty() ? "builtin"
                                                                  : a.decomposition)}}));
    root.field("window_lo", prof.window_lo)
        .field("window_hi", prof.window_hi)
        .field("sum_lambda", prof.sum_lambda)
        .field("sum_rho", prof.sum_rho)
        .field("empirical_deficit", prof.empirical_deficit);
    emit::write_artifact(a.out, root.str() + "\n");
    return 0;
}

struct CharsumScanArgs {
    u64 x = 1'000'000;
    u64 q_max = 20;
    std::string f = "rho";
    u64 h = 0;  // 0: x^0.55
    double log_power = 1.0;
    std::string out;
};

inline int run_charsum_scan(const CharsumScanArgs& a) {
    if (a.f != "rho" && a.f != "lambda")
        throw parameter_error("charsum scan: f must be rho or lambda");
    const u64 y = a.x;
    const double lx = std::log(static_cast<double>(a.x));
    const u64 h = a.h ? a.h : static_cast<u64>(std::pow(static_cast<double>(a.x), 0.55));
    const u64 h0 = static_cast<u64>(static_cast<double>(a.x) / (lx * lx));
    const u64 span = std::max(h, h0);

    std::vector<double> values(span + 1, 0.0);  // index k - (y - span)
    const u64 base_lo = y - span;
    if (a.f == "rho") {
        u64 root = static_cast<u64>(std::sqrt(static_cast<double>(y))) + 2;
        arith::PrimeTable base(root);
        arith::SieveSegment seg(base_lo + 1, y, base);
        for (u64 k = base_lo + 1; k <= y; ++k)
            values[k - base_lo] = seg.is_prime(k) ? 1.0 : 0.0;
    } else {
        auto d = decomp::principal_decomposition();
        u64 root = static_cast<u64>(std::sqrt(static_cast<double>(y))) + 2;
        arith::PrimeTable base(root);
        auto facs = decomp::detail::factorize_window(base_lo, y, base);
        for (const auto& fac : facs)
            values[fac.n - base_lo] =
                decomp::evaluate_lambda(d, fac.n, fac, static_cast<double>(a.x));
    }
    dirichlet::Sequence f = [&](u64 k) { return values[k - base_lo]; };

    emit::CsvWriter csv;
    csv.comment("command", "charsum scan");
    csv.comment("x", fmt_u64(a.x));
    csv.comment("q_max", fmt_u64(a.q_max));
    csv.comment("f", a.f);
    csv.comment("h", fmt_u64(h));
    csv.comment("h0", fmt_u64(h0));
    csv.comment("log_power", emit::num(a.log_power));
    csv.header("q,phi,max_abs_E_progression,sum_primitive_abs_E_chi");

    double prim_sum_dyadic = 0.0;  // over q in (q_max/2, q_max]
    for (u64 q = 2; q <= a.q_max; ++q) {
        auto rep = dirichlet::discrepancy_report(f, y, h, h0, q);
        if (q > a.q_max / 2) prim_sum_dyadic += rep.sum_primitive_abs_chi;
        csv.row(fmt_u64(q) + "," +
                fmt_u64(arith::euler_phi(arith::factorize(q))) + "," +
                emit::num(rep.max_abs_progression) + "," +
                emit::num(rep.sum_primitive_abs_chi));
    }
    double eta = dirichlet::eta_normalization(static_cast<double>(a.x),
                                              static_cast<double>(a.q_max),
                                              a.log_power);
    csv.comment("eta", emit::num(eta));
    csv.comment("eta_normalized_statistic", emit::num(eta * prim_sum_dyadic));
    emit::write_artifact(a.out, csv.str());
    return 0;
}

struct VerifyScanArgs {
    u64 lo = 100'000, hi = 110'000;
    double delta = 0.01;
    double budget = 0.56;
    std::string out;
};

inline int run_verify_scan(const VerifyScanArgs& a) {
    auto s = verify::scan_range(a.lo, a.hi, a.delta, a.budget);
    emit::CsvWriter csv;
    csv.comment("command", "verify scan");
    csv.comment("lo", fmt_u64(a.lo));
    csv.comment("hi", fmt_u64(a.hi));
    csv.comment("delta", emit::num(a.delta));
    csv.comment("budget", emit::num(a.budget));
    csv.comment("failures", fmt_u64(s.failures.size()));
    if (s.worst_theta >= 0.0) {
        csv.comment("worst_n", fmt_u64(s.worst_n));
        csv.comment("worst_theta", emit::num(s.worst_theta));
    }
    csv.header("n,p,a,b,theta");
    for (const auto& r : s.records)
        csv.row(fmt_u64(r.n) + "," + fmt_u64(r.p) + "," + fmt_u64(r.a) + "," +
                fmt_u64(r.b) + "," + emit::num(r.theta));
    // exhausted searches are reported, never asserted impossible
    for (u64 n : s.failures) csv.comment("FAIL", fmt_u64(n));
    emit::write_artifact(a.out, csv.str());
    return 0;
}

struct ArithPiArgs {
    u64 limit = 1'000'000;
    std::string out;
};

inline int run_arith_pi(const ArithPiArgs& a) {
    arith::PrimeTable t(a.limit);
    emit::JsonObject root;
    root.object("config", config_echo("arith pi", {{"limit", fmt_u64(a.limit)}}));
    root.field("pi", static_cast<std::uint64_t>(t.pi()));
    emit::write_artifact(a.out, root.str() + "\n");
    return 0;
}

} // namespace detail

// Builds the CLI and runs it. Returns the process exit code.
inline int run(std::vector<std::string> args) {
    CLI::App app{"lower-bound prime-detecting sieve toolkit"};
    app.set_config("--config");
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)")
        ->envname("LBSIEVE_THREADS");

    detail::BuchstabTableArgs bt;
    detail::DeficitRunArgs dr;
    detail::LambdaProfileArgs lp;
    detail::CharsumScanArgs cs;
    detail::VerifyScanArgs vs;
    detail::ArithPiArgs ap;

    auto* buch = app.add_subcommand("buchstab", "Buchstab function tools");
    auto* buch_table = buch->add_subcommand("table", "tabulate omega(u) as CSV");
    buch_table->add_option("--from", bt.from);
    buch_table->add_option("--to", bt.to);
    buch_table->add_option("--step", bt.step);
    buch_table->add_option("--grid-step", bt.grid_step);
    buch_table->add_option("--u-max", bt.u_max);
    buch_table->add_option("--out", bt.out);

    auto* def = app.add_subcommand("deficit", "deficit integrals");
    auto* def_run = def->add_subcommand("run", "estimate a deficit integral");
    def_run->add_option("--integral", dr.integral)
        ->check(CLI::IsMember({"first", "second", "total"}));
    def_run->add_option("--samples", dr.samples);
    def_run->add_option("--seed", dr.seed);
    def_run->add_option("--strata2", dr.strata2);
    def_run->add_option("--strata4", dr.strata4);
    def_run->add_flag("--no-removal", dr.no_removal);
    def_run->add_option("--out", dr.out);

    auto* lam = app.add_subcommand("lambda", "lower-bound sieve evaluation");
    auto* lam_prof = lam->add_subcommand("profile", "window sums of lambda and rho");
    lam_prof->add_option("--x", lp.x);
    lam_prof->add_option("--window", lp.window);
    lam_prof->add_option("--y", lp.y);
    lam_prof->add_option("--decomposition", lp.decomposition);
    lam_prof->add_option("--out", lp.out);

    auto* cha = app.add_subcommand("charsum", "character discrepancy statistics");
    auto* cha_scan = cha->add_subcommand("scan", "per-modulus discrepancy scan");
    cha_scan->add_option("--x", cs.x);
    cha_scan->add_option("--q-max", cs.q_max);
    cha_scan->add_option("--f", cs.f)->check(CLI::IsMember({"rho", "lambda"}));
    cha_scan->add_option("--hlen", cs.h);
    cha_scan->add_option("--A", cs.log_power);
    cha_scan->add_option("--out", cs.out);

    auto* ver = app.add_subcommand("verify", "representation scans");
    auto* ver_scan = ver->add_subcommand("scan", "scan n = p + ab representations");
    ver_scan->add_option("--lo", vs.lo);
    ver_scan->add_option("--hi", vs.hi);
    ver_scan->add_option("--delta", vs.delta);
    ver_scan->add_option("--budget", vs.budget);
    ver_scan->add_option("--out", vs.out);

    auto* ari = app.add_subcommand("arith", "arithmetic utilities");
    auto* ari_pi = ari->add_subcommand("pi", "count primes up to a limit");
    ari_pi->add_option("--limit", ap.limit);
    ari_pi->add_option("--out", ap.out);

    app.require_subcommand(1);
    for (auto* sc : {buch, def, lam, cha, ver, ari}) sc->require_subcommand(1);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    thread_cap() = threads;
    try {
        if (buch_table->parsed()) return detail::run_buchstab_table(bt);
        if (def_run->parsed()) return detail::run_deficit(dr);
        if (lam_prof->parsed()) return detail::run_lambda_profile(lp);
        if (cha_scan->parsed()) return detail::run_charsum_scan(cs);
        if (ver_scan->parsed()) return detail::run_verify_scan(vs);
        if (ari_pi->parsed()) return detail::run_arith_pi(ap);
    } catch (const reproduction_failure& e) {
        std::fprintf(stderr, "reproduction failure: %s\n", e.what());
        return 1;
    } catch (const parameter_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

} // namespace lbsieve::cli

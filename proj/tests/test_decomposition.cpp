#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "lbsieve/decomposition.hpp"
#include "lbsieve/decomposition_io.hpp"
#include "test_support.hpp"

using namespace lbsieve;
using namespace lbsieve::decomp;
using arith::u64;
using regions::Region;
using regions::RegionSet;

namespace {

const buchstab::Evaluator& ev10() {
    static auto ev = buchstab::build_evaluator(10.0, 0.001);
    return ev;
}

const Decomposition& d1() {
    static Decomposition d = principal_decomposition();
    return d;
}

using test_support::random_decomposition;

} // namespace

TEST_CASE("buchstab_split reproduces the opening identities") {
    Term root;
    root.depth = 0;
    root.sign = +1;
    root.cutoff = CutoffFn::constant(0.5);
    root.region = RegionSet(0);

    auto [psi_z0, f1] = buchstab_split(root, CutoffFn::constant(0.1), CutoffFn::constant(0.5));
    CHECK(psi_z0.cutoff.value == 0.1);
    CHECK(f1.depth == 1);
    CHECK(f1.sign == -1);
    CHECK(f1.region.contains(std::vector<double>{0.3}));
    CHECK_FALSE(f1.region.contains(std::vector<double>{0.05}));
    CHECK_FALSE(f1.region.contains(std::vector<double>{0.5}));

    SUBCASE("second split yields the two-prime sum of the opening display") {
        Term inner = f1;
        inner.cutoff = CutoffFn::prev_alpha();  // psi(l, p_1)
        auto [f1_z, sigma2] = buchstab_split(inner, CutoffFn::constant(0.1),
                                             CutoffFn::prev_alpha());
        CHECK(f1_z.cutoff.kind == CutoffKind::Constant);
        CHECK(sigma2.depth == 2);
        CHECK(sigma2.sign == +1);
        CHECK(sigma2.region.contains(std::vector<double>{0.3, 0.15}));
        CHECK_FALSE(sigma2.region.contains(std::vector<double>{0.3, 0.35}));  // a2 > a1
        CHECK_FALSE(sigma2.region.contains(std::vector<double>{0.3, 0.05}));  // below z
    }
    SUBCASE("z_lo = z_hi leaves an empty second term") {
        auto [lo, empty] = buchstab_split(root, CutoffFn::constant(0.5),
                                          CutoffFn::constant(0.5));
        (void)lo;
        for (double a = 0.0; a <= 1.0; a += 0.01)
            CHECK_FALSE(empty.region.contains(std::vector<double>{a}));
    }
    SUBCASE("cutoff order violation") {
        CHECK_THROWS_AS(buchstab_split(root, CutoffFn::constant(0.6),
                                       CutoffFn::constant(0.5)),
                        lbsieve::parameter_error);
    }
}

TEST_CASE("buchstab_split is pointwise reversible") {
    Term parent;
    parent.depth = 1;
    parent.sign = +1;
    parent.cutoff = CutoffFn::prev_alpha();
    {
        Region e1(1, {});
        e1.add({1}, -0.1, false);
        e1.add({-1}, 0.5, true);
        parent.region = RegionSet(std::move(e1), "E1_BASE");
    }
    auto [low, child] = buchstab_split(parent, CutoffFn::constant(0.1),
                                       CutoffFn::prev_alpha());
    const double x = 1e7;
    std::mt19937_64 gen(31);
    int interesting = 0;
    for (int trial = 0; trial < 10'000; ++trial) {
        u64 k = static_cast<u64>(x / 2) + 1 + gen() % static_cast<u64>(x / 2);
        auto fac = arith::factorize(k);
        long c_parent = term_count(d1(), parent, k, fac, x);
        long c_low = term_count(d1(), low, k, fac, x);
        long c_child = term_count(d1(), child, k, fac, x);
        CHECK(c_parent == c_low - c_child);
        interesting += c_child != 0;
    }
    CHECK(interesting > 50);
}

TEST_CASE("classify sorts the depth-2 regions the expected way") {
    const auto& tI = d1().typeI;
    const auto& tII = d1().typeII;

    Term t;
    t.depth = 2;
    t.cutoff = CutoffFn::prev_alpha();

    SUBCASE("a region inside the sum strip is regular") {
        Region strip(2, {});
        strip.add({1, 1}, -0.46, false);
        strip.add({-1, -1}, 0.54, false);
        strip.add({0, 1}, -0.1, false);
        strip.add({1, -1}, 0.0, true);
        strip.add({-1, 0}, 0.44, false);
        t.region = RegionSet(std::move(strip), "strip");
        CHECK(classify(t, tI, tII) == Classification::Regular);
    }
    SUBCASE("the discarded region really is discarded") {
        t.region = regions::catalog::make_F2();
        CHECK(classify(t, tI, tII) == Classification::Discard);
    }
    SUBCASE("the continuation triangle admits two more splits") {
        t.region = regions::catalog::make_F3();
        CHECK(classify(t, tI, tII) == Classification::Decompose);
    }
    SUBCASE("an empty region is vacuously regular") {
        Region none(2, {});
        none.add({1, 0}, -0.9, false);
        none.add({-1, 0}, 0.2, false);
        t.region = RegionSet(std::move(none), "none");
        CHECK(classify(t, tI, tII) == Classification::Regular);
    }
    SUBCASE("boundary-heavy regions refuse to classify") {
        Region shaved(2, {});
        shaved.add({1, 1}, -0.45, false);
        shaved.add({-1, -1}, 0.55005, false);  // pokes just past the strip
        shaved.add({0, 1}, -0.1, false);
        shaved.add({1, -1}, 0.0, true);
        shaved.add({-1, 0}, 0.44, false);
        t.region = RegionSet(std::move(shaved), "shaved");
        CHECK_THROWS_AS(classify(t, tI, tII), lbsieve::undetermined_classification);
    }
}

TEST_CASE("lambda at a prime is 1 and dies on small factors") {
    const double x = 1e7;
    auto fac_p = arith::factorize(9'999'991);  // prime
    CHECK(fac_p.is_prime());
    CHECK(evaluate_lambda(d1(), 9'999'991, fac_p, x) == 1.0);

    u64 k = 2 * 4'999'999;  // smallest factor 2 < x^0.1
    auto fac_k = arith::factorize(k);
    CHECK(evaluate_lambda(d1(), k, fac_k, x) == 0.0);

    CHECK_THROWS_AS(evaluate_lambda(d1(), 100, arith::factorize(100), x),
                    lbsieve::parameter_error);
    auto wrong = arith::factorize(9'999'990);
    CHECK_THROWS_AS(evaluate_lambda(d1(), 9'999'991, wrong, x),
                    lbsieve::parameter_error);
}

TEST_CASE("semiprimes against a direct two-factor computation") {
    // For k = p q (both factors above x^0.1) the terms can be counted by
    // hand: psi(k, z0) = 1, f1 counts each factor below x^0.5, the depth-2
    // sum counts the ordered pair when its exponents land in a kept part.
    const double x = 1e7;
    const double lx = std::log(x);
    auto kept2 = regions::catalog::make_F1_ext();
    arith::PrimeTable table(40'000);
    std::mt19937_64 gen(41);
    int checked = 0, nonpositive = 0;
    while (checked < 400) {
        u64 p = table.primes()[200 + gen() % (table.primes().size() - 200)];
        u64 lo = static_cast<u64>(x / 2) / p + 1, hi = static_cast<u64>(x) / p;
        if (lo > hi) continue;
        u64 q = lo + gen() % (hi - lo + 1);
        auto fq = arith::factorize(q);
        if (!fq.is_prime() || q == p) continue;
        u64 k = p * q;
        double a1 = std::log(static_cast<double>(std::max(p, q))) / lx;
        double a2 = std::log(static_cast<double>(std::min(p, q))) / lx;
        if (a2 < 0.1) continue;
        double expect = 1.0;                    // psi(k, z0)
        expect -= (a1 < 0.5) + (a2 < 0.5);      // f1
        if (kept2.contains(std::vector<double>{a1, a2})) expect += 1.0;  // kept pair
        auto fac = arith::factorize(k);
        double lam = evaluate_lambda(d1(), k, fac, x);
        CHECK(lam == expect);
        CHECK(lam <= 0.0);  // rho(pq) = 0
        nonpositive += lam < 0.0;
        ++checked;
    }
    CHECK(nonpositive > 0);
}

TEST_CASE("lambda never exceeds rho across a window") {
    const u64 x = 10'000'000;
    arith::PrimeTable base(3'200);
    auto facs = decomp::detail::factorize_window(7'654'321, 7'754'321, base);
    const double lx = std::log(static_cast<double>(x));
    for (const auto& fac : facs) {
        double lam = evaluate_lambda(d1(), fac.n, fac, static_cast<double>(x));
        double rho = fac.is_prime() ? 1.0 : 0.0;
        CHECK(lam <= rho);
        bool has_small = false;
        for (auto [p, e] : fac.factors)
            if (std::log(static_cast<double>(p)) / lx < 0.1) has_small = true;
        if (has_small) CHECK(lam == 0.0);
    }
}

TEST_CASE("discarded terms are individually nonnegative") {
    const u64 x = 10'000'000;
    arith::PrimeTable base(3'200);
    auto facs = decomp::detail::factorize_window(9'876'000, 9'896'000, base);
    for (const auto& fac : facs) {
        for (const auto& t : d1().terms()) {
            if (t.cls != Classification::Discard) continue;
            CHECK(t.sign * term_count(d1(), t, fac.n, fac, static_cast<double>(x)) >= 0);
        }
    }
}

TEST_CASE("deficit of the principal decomposition matches its two integrals") {
    deficit::McParams p;
    p.samples = 1'000'000;
    auto total = deficit_of(d1(), ev10(), p);
    CHECK(total.value < 0.73);
    CHECK(total.value > 0.0);
    auto i1 = deficit::first_integral(ev10(), p);
    auto i2 = deficit::second_integral(ev10(), p, true);
    double sigma = std::sqrt(total.std_error * total.std_error +
                             i1.std_error * i1.std_error + i2.std_error * i2.std_error);
    CHECK(std::fabs(total.value - (i1.value + i2.value)) <= 3.0 * sigma);

    SUBCASE("no discards, no deficit") {
        Decomposition empty;
        empty.stage2.regular = regions::catalog::make_F();
        empty.finalize();
        CHECK(deficit_of(empty, ev10(), p).value == 0.0);
    }
}

TEST_CASE("union of overlapping discards never exceeds the sum of parts") {
    std::mt19937_64 gen(53);
    Decomposition a = random_decomposition(gen);
    Decomposition b = random_decomposition(gen);
    deficit::McParams p;
    p.samples = 400'000;
    RegionSet uni = regions::set_union(a.stage2.discard, b.stage2.discard, "overlap");
    auto ru = deficit::integrate_deficit(uni, 2, ev10(), p);
    auto ra = deficit::integrate_deficit(a.stage2.discard, 2, ev10(), p);
    auto rb = deficit::integrate_deficit(b.stage2.discard, 2, ev10(), p);
    double sigma = std::sqrt(ru.std_error * ru.std_error + ra.std_error * ra.std_error +
                             rb.std_error * rb.std_error);
    CHECK(ru.value <= ra.value + rb.value + 3.0 * sigma);
}

TEST_CASE("intersection combinator") {
    deficit::McParams p;
    p.samples = 400'000;

    SUBCASE("idempotence") {
        std::mt19937_64 gen(57);
        Decomposition d = random_decomposition(gen);
        Decomposition dd = intersect(d, d);
        auto x = deficit_of(d, ev10(), p);
        auto y = deficit_of(dd, ev10(), p);
        double sigma = std::hypot(x.std_error, y.std_error);
        CHECK(std::fabs(x.value - y.value) <= 3.0 * sigma);
    }
    SUBCASE("an empty-discard companion adds nothing") {
        std::mt19937_64 gen(59);
        Decomposition d = random_decomposition(gen);
        Decomposition hollow = d;
        hollow.stage2.discard = RegionSet(2, "none");
        hollow.stage4.discard = RegionSet(4, "none");
        hollow.stage2.regular = regions::set_union(
            d.stage2.regular, d.stage2.discard, "keep_all");
        hollow.stage4.regular = regions::set_union(
            d.stage4.regular, d.stage4.discard, "keep_all4");
        hollow.finalize();
        Decomposition both = intersect(d, hollow);
        auto x = deficit_of(d, ev10(), p);
        auto y = deficit_of(both, ev10(), p);
        double sigma = std::hypot(x.std_error, y.std_error);
        CHECK(std::fabs(x.value - y.value) <= 3.0 * sigma);
    }
    SUBCASE("the stub companion imports its published deficit") {
        Decomposition combined = intersect(d1(), companion_stub());
        auto base = deficit_of(d1(), ev10(), p);
        auto total = deficit_of(combined, ev10(), p);
        CHECK(total.value == doctest::Approx(base.value + 0.01).epsilon(1e-12));
        CHECK(total.value < 0.75);
    }
    SUBCASE("role-reversal structures are refused") {
        Decomposition rr = d1();
        rr.uses_role_reversals = true;
        CHECK_THROWS_AS(intersect(rr, companion_stub()), lbsieve::unsupported_structure);

        Decomposition unguarded = companion_stub();
        unguarded.rr_min_pair_sum = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(intersect(d1(), unguarded), lbsieve::unsupported_structure);

        Decomposition low_guard = companion_stub();
        low_guard.rr_min_pair_sum = 0.3;
        CHECK_THROWS_AS(intersect(d1(), low_guard), lbsieve::unsupported_structure);

        CHECK_THROWS_AS(intersect(companion_stub(), companion_stub()),
                        lbsieve::unsupported_structure);
    }
    SUBCASE("subadditivity and commutativity on random pairs") {
        std::mt19937_64 gen(61);
        for (int pair = 0; pair < 5; ++pair) {
            Decomposition a = random_decomposition(gen);
            Decomposition b = random_decomposition(gen);
            auto da = deficit_of(a, ev10(), p);
            auto db = deficit_of(b, ev10(), p);
            auto dab = deficit_of(intersect(a, b), ev10(), p);
            auto dba = deficit_of(intersect(b, a), ev10(), p);
            double s3 = std::sqrt(da.std_error * da.std_error +
                                  db.std_error * db.std_error +
                                  dab.std_error * dab.std_error);
            CHECK(dab.value <= da.value + db.value + 3.0 * s3);
            CHECK(std::fabs(dab.value - dba.value) <=
                  3.0 * std::hypot(dab.std_error, dba.std_error));
        }
    }
}

TEST_CASE("window profiles") {
    const u64 x = 10'000'000;

    SUBCASE("a synthetic all-prime window has no deficit") {
        arith::PrimeTable base(3'200);
        auto seg = arith::segmented_sieve(8'000'000, 8'100'000, base);
        std::vector<u64> primes = seg.primes();
        primes.resize(200);
        auto prof = lambda_profile_over(d1(), x, primes);
        CHECK(prof.sum_rho == doctest::Approx(200.0));
        CHECK(prof.sum_lambda == doctest::Approx(200.0));
        CHECK(prof.empirical_deficit == doctest::Approx(0.0));
    }
    SUBCASE("full-window empirical deficit tracks the integral deficit") {
        auto prof = lambda_profile(d1(), x, x, 100'000);
        CHECK(prof.sum_lambda > 0.0);
        CHECK(prof.sum_lambda <= prof.sum_rho);
        deficit::McParams p;
        p.samples = 1'000'000;
        auto integral = deficit_of(d1(), ev10(), p);
        CHECK(std::fabs(prof.empirical_deficit - integral.value) <= 0.1);
    }
    SUBCASE("window preconditions") {
        CHECK_THROWS_AS(lambda_profile(d1(), x, 4'000'000, 100'000),
                        lbsieve::parameter_error);
        CHECK_THROWS_AS(lambda_profile(d1(), x, x, 6'000'000),
                        lbsieve::parameter_error);
    }
}

TEST_CASE("decomposition serialization round-trips") {
    auto cat = regions::catalog::all();
    nlohmann::json j = to_json(d1());
    Decomposition back = from_json(j, cat);
    CHECK(back.terms().size() == d1().terms().size());

    const double x = 1e7;
    std::mt19937_64 gen(67);
    for (int trial = 0; trial < 2'000; ++trial) {
        u64 k = 5'000'001 + gen() % 5'000'000;
        auto fac = arith::factorize(k);
        CHECK(evaluate_lambda(back, k, fac, x) == evaluate_lambda(d1(), k, fac, x));
    }

    SUBCASE("inline regions survive too") {
        std::mt19937_64 g2(71);
        Decomposition rnd = random_decomposition(g2);
        Decomposition back2 = from_json(to_json(rnd), cat);
        deficit::McParams p;
        p.samples = 200'000;
        auto a = deficit_of(rnd, ev10(), p);
        auto b = deficit_of(back2, ev10(), p);
        CHECK(a.value == b.value);  // identical regions, identical sampling
    }
}

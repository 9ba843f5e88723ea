#include <doctest.h>

#include <cmath>
#include <set>

#include "lucasphi/lemmas.hpp"

using namespace lucasphi;

namespace {

bool witness_triple_present(const LemmaReport& rep, uint64_t x1, uint64_t y1, uint64_t p) {
    for (const auto& w : rep.witnesses)
        if (w.value("kind", "") == "counterexample" && w.value("x1", 0) == (int)x1 &&
            w.value("y1", 0) == (int)y1 && w.value("p", 0) == (int)p)
            return true;
    return false;
}

std::set<std::array<uint64_t, 3>> counterexample_triples(const LemmaReport& rep) {
    std::set<std::array<uint64_t, 3>> out;
    for (const auto& w : rep.witnesses)
        if (w.value("kind", "") == "counterexample" && w.contains("x1") && w.contains("p"))
            out.insert({w["x1"].get<uint64_t>(), w["y1"].get<uint64_t>(), w["p"].get<uint64_t>()});
    return out;
}

} // namespace

TEST_SUITE_BEGIN("lemmas");

TEST_CASE("power divisibility: no sixth powers below 173 for pairs <= 80") {
    LemmaReport rep = verify_power_divisibility(80, 173, 6);
    CHECK(rep.status == Status::Pass);
    CHECK(rep.witnesses.size() == 1); // info only
}

TEST_CASE("power divisibility: no cubes below 173 for pairs <= 9") {
    LemmaReport rep = verify_power_divisibility(9, 173, 3);
    CHECK(rep.status == Status::Pass);
}

TEST_CASE("power divisibility at k=2 finds (3,1,11)") {
    LemmaReport rep = verify_power_divisibility(80, 173, 2, 1000000);
    CHECK(rep.status == Status::Fail);
    CHECK(witness_triple_present(rep, 3, 1, 11)); // 11^2 | 3^10 - 1 = 59048
    // every reported witness replays through the primitives
    for (const auto& t : counterexample_triples(rep)) {
        Natural diff = pow_natural(Natural(t[0]), t[2] - 1) - pow_natural(Natural(t[1]), t[2] - 1);
        CHECK(valuation(Natural(t[2]), diff) >= 2);
        CHECK((t[0] - t[1]) % t[2] != 0);
    }
}

TEST_CASE("k=6 witnesses are a subset of k=3, and k=3 of k=2") {
    LemmaReport k6 = verify_power_divisibility(80, 173, 6, 1000000);
    LemmaReport k3 = verify_power_divisibility(80, 173, 3, 1000000);
    LemmaReport k2 = verify_power_divisibility(80, 173, 2, 1000000);
    auto t6 = counterexample_triples(k6);
    auto t3 = counterexample_triples(k3);
    auto t2 = counterexample_triples(k2);
    CHECK(t6.empty()); // vacuous inclusion, and the headline claim itself
    for (const auto& t : t3) CHECK(t2.count(t) == 1);
    CHECK(!t3.empty());
    CHECK(t3.size() < t2.size());
}

TEST_CASE("cube count bound over the full pair range") {
    LemmaReport rep = verify_cube_count_bound(80, 173);
    CHECK(rep.status == Status::Pass);
    uint64_t observed = 0;
    for (const auto& w : rep.witnesses)
        if (w.contains("observed_max")) {
            observed = w["observed_max"].get<uint64_t>();
            // first attaining pair, pinned from an independent recomputation:
            // (37, 17) with primes {3, 7}
            REQUIRE(!w["attained_at"].empty());
            CHECK(w["attained_at"][0]["x1"] == 37);
            CHECK(w["attained_at"][0]["y1"] == 17);
            CHECK(w["attained_at"][0]["primes"] == json::array({3, 7}));
        }
    CHECK(observed <= 2);
    CHECK(observed == 2); // the bound is attained

    LemmaReport small = verify_cube_count_bound(9, 173); // empty range 10..9
    CHECK(small.status == Status::Pass);
    for (const auto& w : small.witnesses)
        if (w.contains("observed_max")) CHECK(w["observed_max"] == 0);
}

TEST_CASE("base-3 Wieferich search") {
    LemmaReport rep = verify_base3_wieferich(173);
    CHECK(rep.status == Status::Pass);
    bool found_set = false;
    for (const auto& w : rep.witnesses)
        if (w.contains("square_level_set")) {
            found_set = true;
            CHECK(w["square_level_set"] == json::array({11}));
        }
    CHECK(found_set);

    LemmaReport rep13 = verify_base3_wieferich(13);
    for (const auto& w : rep13.witnesses)
        if (w.contains("square_level_set")) CHECK(w["square_level_set"] == json::array({11}));

    LemmaReport rep5 = verify_base3_wieferich(5);
    for (const auto& w : rep5.witnesses)
        if (w.contains("square_level_set")) CHECK(w["square_level_set"] == json::array());
}

TEST_CASE("prime reciprocal sum windows") {
    LemmaReport tiny = verify_prime_sum_window(3, 10, 1.0);
    CHECK(tiny.status == Status::Pass);
    // slack at t=10 from 1/2+1/3+1/5+1/7 by hand
    double sum = 1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7;
    CHECK(*tiny.margin > 0);
    CHECK(std::fabs((std::log(std::log(3.0)) + 1.0 - (1.0 / 2 + 1.0 / 3)) -
                    *tiny.margin) < 1e-12); // minimum is at t = 3
    CHECK(sum < std::log(std::log(10.0)) + 1.0);

    LemmaReport low = verify_prime_sum_window(80, 286, 0.2965);
    CHECK(low.status == Status::Pass);
    CHECK(*low.margin > 0);
    // tightest point of the low window, pinned from an independent recomputation
    for (const auto& w : low.witnesses)
        if (w.contains("min_slack_at")) {
            CHECK(w["min_slack_at"] == 113);
            CHECK(w["min_slack"].get<double>() == doctest::Approx(7.61989e-05).epsilon(1e-4));
        }

    CHECK_THROWS_AS(verify_prime_sum_window(2, 10, 1.0), DomainError);
    CHECK_THROWS_AS(verify_prime_sum_window(3, 2'000'000'000, 1.0), CapacityError);
}

TEST_CASE("Brun-Titchmarsh checkpoints") {
    LemmaReport rep = verify_brun_titchmarsh({2, 3, 41}, 100000);
    CHECK(rep.status == Status::Pass);
    CHECK(*rep.margin > 0);
    // tiny case by hand: primes = 1 mod 2 up to 10 are 3, 5, 7
    LemmaReport tiny = verify_brun_titchmarsh({2}, 10);
    CHECK(tiny.status == Status::Pass);
    bool saw = false;
    for (const auto& w : tiny.witnesses)
        if (w.contains("checkpoints"))
            for (const auto& row : w["checkpoints"])
                if (row["X"] == 10) {
                    CHECK(row["count"] == 3);
                    saw = true;
                }
    CHECK(saw);
    // d = 3, X = 1000: direct count of primes = 1 mod 3
    LemmaReport d3 = verify_brun_titchmarsh({3}, 1000);
    CHECK(d3.status == Status::Pass);
    uint64_t direct = 0;
    for (uint64_t p : sieve_primes(uint64_t{1000}))
        if ((p - 1) % 3 == 0) ++direct;
    for (const auto& w : d3.witnesses)
        if (w.contains("checkpoints"))
            for (const auto& row : w["checkpoints"])
                if (row["X"] == 1000) {
                    CHECK(row["count"] == direct);
                    CHECK(direct < 2000.0 / (2.0 * std::log(1000.0 / 3.0)));
                }
    CHECK_THROWS_AS(verify_brun_titchmarsh({1}, 100), DomainError);
}

TEST_CASE("totient quotient bound") {
    LemmaReport rep = verify_phi_quotient_bound(1000000);
    CHECK(rep.status == Status::Pass);
    CHECK(*rep.margin > 0);
    // N = 3 and N = 30030 by hand
    double ll3 = std::log(std::log(3.0));
    CHECK(1.5 <= 1.79 * ll3 + 2.5 / ll3);
    CHECK(euler_phi(Natural(30030)) == 5760);
    double ll = std::log(std::log(30030.0));
    CHECK(30030.0 / 5760.0 <= 1.79 * ll + 2.5 / ll);
    // the minimum slack should occur at a primorial
    uint32_t at = 0;
    for (const auto& w : rep.witnesses)
        if (w.contains("min_slack_at")) at = w["min_slack_at"].get<uint32_t>();
    CHECK(at == 30030);
}

TEST_CASE("prime products, exact") {
    LemmaReport rep = verify_prime_products();
    CHECK(rep.status == Status::Pass);
    REQUIRE(rep.witnesses.size() == 3);
    CHECK(rep.witnesses[0]["value"] == "5663533044013/3009871872000"); // i = 4..14, < 2
    CHECK(rep.witnesses[1]["value"] == "323323/207360");     // i = 4..8, < 1.56
    CHECK(rep.witnesses[2]["value"] == "1001/720");          // i = 4..6, < 1.4
    CHECK(rep.witnesses[2]["value_decimal"].get<double>() == doctest::Approx(1.3903).epsilon(1e-4));
    CHECK(rep.witnesses[1]["value_decimal"].get<double>() == doctest::Approx(1.5593).epsilon(1e-4));
    CHECK(rep.witnesses[0]["value_decimal"].get<double>() == doctest::Approx(1.88165).epsilon(1e-4));
}

TEST_CASE("phi ratio bounds, exact minima") {
    LemmaReport rep = verify_phi_ratio_bounds(80);
    CHECK(rep.status == Status::Pass);
    CHECK(*rep.margin > 0);
    bool saw_3phi2z = false, saw_11phi2z = false, saw_nonstrict = false;
    for (const auto& w : rep.witnesses) {
        if (!w.contains("expr")) continue;
        if (w["expr"] == "3*phi(2z)/z" && w["bound"] == "1.59") {
            CHECK(w["min"] == "8/5");
            CHECK(w["attained_at_z"] == 15);
            saw_3phi2z = true;
        }
        if (w["expr"] == "11*phi(2z)/z" && w["bound"] == "3") {
            CHECK(w["min"] == "88/15");
            saw_11phi2z = true;
        }
        if (w["bound"] == "1.5") {
            CHECK(w["min"] == "3/2"); // equality attained at z = 2, non-strict
            saw_nonstrict = true;
        }
    }
    CHECK(saw_3phi2z);
    CHECK(saw_11phi2z);
    CHECK(saw_nonstrict);
}

TEST_CASE("loglog submultiplicativity") {
    LemmaReport rep = verify_loglog_submultiplicative(1000, 1.0);
    CHECK(rep.status == Status::Pass);
    // the corner constant is tight: about 4e-5 of absolute slack
    for (const auto& w : rep.witnesses)
        if (w.contains("corner")) {
            double m = w["margin"].get<double>();
            CHECK(m > 3e-5);
            CHECK(m < 6e-5);
        }
    // spot values
    CHECK(2.0 / std::log(78.0) < 0.4591);
    CHECK(std::log(std::log(6084.0)) <= std::pow(std::log(std::log(78.0)), 2.0));
    CHECK(std::log(std::log(100.0 * 1000.0)) <=
          std::log(std::log(100.0)) * std::log(std::log(1000.0)));
}

TEST_CASE("phi product monotonicity") {
    LemmaReport rep = verify_phi_product_monotone(300, 300);
    CHECK(rep.status == Status::Pass);
    CHECK(*rep.margin > 0); // distance to violation; equality at (1,2) passes
    for (const auto& w : rep.witnesses)
        if (w.contains("min_difference")) CHECK(w["min_difference"] == 0);
    CHECK(euler_phi(Natural(27)) == 18);
    CHECK(euler_phi(Natural(6)) == 2);
}

TEST_CASE("Carmichael window scan") {
    LemmaReport rep = verify_carmichael(15, 15);
    CHECK(rep.status == Status::Pass);
    CHECK(rep.skipped_entries() == 0);
}

TEST_CASE("totient divisibility laws") {
    LemmaReport rep = verify_divisibility_of_phi(10, 12);
    CHECK(rep.status == Status::Pass);
    CHECK(rep.skipped_entries() == 0);
    // frozen spot checks
    CHECK(euler_phi(Natural(80)) == 32);
    CHECK(Natural(32 * 32) % 64 == 0);  // 4^d(4) = 4^3 | phi(80)^2
    CHECK(Natural(32) % 8 == 0);        // 4^2/rad(4) = 8 | 32
    CHECK(euler_phi(Natural(665)) == 432);
    CHECK(Natural(432) % 6 == 0);       // 36/rad(6) = 6 | phi(3^6-2^6)
}

TEST_CASE("S_d bounds for (3,1)") {
    LucasPair pair(3, 1);
    std::vector<SdReport> reports = verify_Sd_bound(pair, {41, 43, 45, 47, 49});
    REQUIRE(reports.size() == 5);
    for (const SdReport& r : reports) {
        CHECK(r.complete);
        CHECK(r.status == Status::Pass);
        CHECK(r.margin > 0);
        // every contributing prime has rank exactly d and is 1 mod d
        for (const Natural& p : r.primes) {
            CHECK(has_rank(pair, p, r.d));
            CHECK((p - 1) % r.d == 0);
        }
        // S_d is a sum of reciprocals of primes > d, so it is below |primes|/d
        CHECK(detail::rational_to_double(r.s_d) < static_cast<double>(r.primes.size()) / r.d);
    }
    CHECK_THROWS_AS(verify_Sd_bound(pair, {40}), DomainError); // even
    CHECK_THROWS_AS(verify_Sd_bound(pair, {39}), DomainError); // too small

    //单 the lemma wrapper aggregates
    LemmaReport rep = lemma_report_sd(pair, {41, 43});
    CHECK(rep.status == Status::Pass);
    CHECK(*rep.margin > 0);
}

TEST_CASE("Sd skipped when budget exhausted") {
    Budget tiny;
    tiny.trial_limit = 10;
    tiny.rho_iterations = 2;
    std::vector<SdReport> reports = verify_Sd_bound(LucasPair(3, 1), {41}, tiny);
    REQUIRE(reports.size() == 1);
    CHECK_FALSE(reports[0].complete);
    CHECK(reports[0].status == Status::Skipped);
}

TEST_CASE("standalone constants all hold with positive margins") {
    LemmaReport rep = verify_standalone_constants();
    CHECK(rep.status == Status::Pass);
    CHECK(*rep.margin > 0);
    // frozen spot values
    CHECK(std::log(80.0) - std::log(std::log(80.0)) == doctest::Approx(2.9045).epsilon(1e-4));
    CHECK(std::exp(0.082) - 1 == doctest::Approx(0.08546).epsilon(1e-3));
    for (const auto& w : rep.witnesses) {
        REQUIRE(w.contains("margin"));
        CHECK(w["margin"].get<double>() > 0);
    }
}

TEST_CASE("reports are deterministic given parameters") {
    LemmaReport a = verify_base3_wieferich(173);
    LemmaReport b = verify_base3_wieferich(173);
    json ja = a.to_json(), jb = b.to_json();
    ja.erase("elapsed_ms");
    jb.erase("elapsed_ms");
    CHECK(ja == jb);

    LemmaReport c = verify_phi_ratio_bounds(80);
    LemmaReport d = verify_phi_ratio_bounds(80);
    json jc = c.to_json(), jd = d.to_json();
    jc.erase("elapsed_ms");
    jd.erase("elapsed_ms");
    CHECK(jc == jd);
}

TEST_CASE("report JSON round-trips byte-identically") {
    for (LemmaReport rep :
         {verify_base3_wieferich(173), verify_prime_products(), verify_phi_ratio_bounds(80)}) {
        std::string once = rep.to_json().dump();
        std::string twice = LemmaReport::from_json(json::parse(once)).to_json().dump();
        CHECK(once == twice);
    }
}

TEST_SUITE_END();

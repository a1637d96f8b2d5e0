#include <cmath>
#include <cstdint>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"
#include "labelcut/verifier.hpp"

using namespace labelcut;

namespace {

LabelVector lv(const char* s) { return LabelVector::from_string(s); }

ConcaveSpec sqrt_spec(std::size_t t_max) { return make_concave_spec(SqrtFamily{}, t_max); }

ConcaveSpec squares_table(std::size_t t_max) {
    std::vector<double> v(t_max + 1);
    for (std::size_t t = 0; t <= t_max; ++t) v[t] = static_cast<double>(t * t);
    return make_unvalidated_table(v);
}

} // namespace

TEST_CASE("join and meet") {
    auto [join, meet] = join_meet(lv("0011"), lv("0101"));
    CHECK(join.to_string() == "0111");
    CHECK(meet.to_string() == "0001");

    auto [j2, m2] = join_meet(lv("0110"), lv("0110"));
    CHECK(j2 == lv("0110"));
    CHECK(m2 == lv("0110"));

    auto [j3, m3] = join_meet(lv("10"), lv("01"));
    CHECK(j3.to_string() == "11");
    CHECK(m3.to_string() == "00");

    CHECK_THROWS_AS(join_meet(lv("01"), lv("011")), LengthMismatch);
}

TEST_CASE("kappa profiles") {
    CHECK(kappa_profile(lv("0011"), lv("0101")) == KappaProfile{1, 1, 1, 1});
    CHECK(kappa_profile(lv("00110"), lv("00110")) == KappaProfile{3, 0, 0, 2});
    CHECK(kappa_profile(lv("10"), lv("01")) == KappaProfile{0, 1, 1, 0});
    CHECK_THROWS_AS(kappa_profile(lv("10"), lv("011")), LengthMismatch);
}

TEST_CASE("kappa counts explain join and meet deviations") {
    for (std::uint64_t ai = 0; ai < 64; ++ai) {
        LabelVector a = LabelVector::from_index(ai, 6);
        for (std::uint64_t bi = 0; bi < 64; ++bi) {
            LabelVector b = LabelVector::from_index(bi, 6);
            KappaProfile p = kappa_profile(a, b);
            auto [join, meet] = join_meet(a, b);
            REQUIRE(p.k1 + p.k2 + p.k3 + p.k4 == 6);
            REQUIRE(join.count_ones() == p.k2 + p.k3 + p.k4);
            REQUIRE(meet.count_ones() == p.k4);
            REQUIRE(deviation(join) == std::min(p.k1, p.k2 + p.k3 + p.k4));
            REQUIRE(deviation(meet) == std::min(p.k1 + p.k2 + p.k3, p.k4));
        }
    }
}

TEST_CASE("margins at worked pairs") {
    ConcaveSpec sq = sqrt_spec(2);
    double m = submodular_margin(sq, lv("0011"), lv("0101"));
    CHECK(m == Catch::Approx(2.0 * std::sqrt(2.0) - 2.0).epsilon(1e-12));
    CHECK(m == Catch::Approx(0.82842712).margin(1e-8));

    CHECK(submodular_margin(sq, lv("0110"), lv("0110")) == 0.0);

    ConcaveSpec t2 = squares_table(3);
    CHECK(submodular_margin(t2, lv("000011"), lv("000101")) == -2.0);
    CHECK(kappa_profile(lv("000011"), lv("000101")) == KappaProfile{3, 1, 1, 1});
}

TEST_CASE("margin is symmetric and vanishes on chains") {
    ConcaveSpec sq = sqrt_spec(2);
    for (std::uint64_t ai = 0; ai < 32; ++ai) {
        LabelVector a = LabelVector::from_index(ai, 5);
        for (std::uint64_t bi = 0; bi < 32; ++bi) {
            LabelVector b = LabelVector::from_index(bi, 5);
            REQUIRE(submodular_margin(sq, a, b) == submodular_margin(sq, b, a));
            if ((ai | bi) == bi) // a <= b componentwise
                REQUIRE(submodular_margin(sq, a, b) == 0.0);
        }
    }
}

TEST_CASE("proof case classification") {
    CHECK(classify_case(lv("00"), lv("00")) ==
          std::pair{ProofCase::JoinZero, KappaProfile{2, 0, 0, 0}});
    CHECK(classify_case(lv("11000"), lv("01100")) ==
          std::pair{ProofCase::JoinOneMeetZero, KappaProfile{2, 1, 1, 1}});
    CHECK(classify_case(lv("01"), lv("01")) ==
          std::pair{ProofCase::TieInvolved, KappaProfile{1, 0, 0, 1}});
    CHECK(classify_case(lv("11101"), lv("11011")).first == ProofCase::MeetOne);
}

TEST_CASE("case structure over all small pairs") {
    for (std::size_t k = 2; k <= 7; ++k) {
        for (std::uint64_t ai = 0; ai < (std::uint64_t{1} << k); ++ai) {
            LabelVector a = LabelVector::from_index(ai, k);
            for (std::uint64_t bi = 0; bi < (std::uint64_t{1} << k); ++bi) {
                LabelVector b = LabelVector::from_index(bi, k);
                auto [proof_case, p] = classify_case(a, b);
                auto [join, meet] = join_meet(a, b);
                Majority mj = dominant_label(join).majority;
                Majority mm = dominant_label(meet).majority;

                // a zero-dominant join forces a zero-dominant meet, and dually
                REQUIRE(proof_case != ProofCase::JoinZeroMeetOne);
                if (mj == Majority::Zero) REQUIRE(mm == Majority::Zero);
                if (mm == Majority::One) REQUIRE(mj == Majority::One);

                // the doubly balanced configuration collapses to ties
                if (p.k1 >= p.k2 + p.k3 + p.k4 && p.k4 >= p.k1 + p.k2 + p.k3) {
                    REQUIRE(p.k2 + p.k3 == 0);
                    REQUIRE(p.k1 == p.k4);
                    REQUIRE(proof_case == ProofCase::TieInvolved);
                }
            }
        }
    }
}

TEST_CASE("slope comparison behind the margin bound") {
    std::vector<ConcaveSpec> specs = {
        sqrt_spec(8),
        make_concave_spec(Log1pFamily{}, 8),
        make_concave_spec(PowerFamily{0.5}, 8),
        make_concave_spec(TruncLinFamily{1.0, 2.0}, 8),
        make_concave_spec(TableFamily{{0.0, 3.0, 5.0, 6.0, 6.5}}, 4),
    };
    for (const ConcaveSpec& spec : specs) {
        const std::vector<double>& g = spec.samples;
        const std::size_t T = spec.max_t();
        for (std::size_t k2 = 1; k2 <= T; ++k2)
            for (std::size_t k3 = 0; k2 + k3 <= T; ++k3)
                for (std::size_t k4 = 0; k2 + k3 + k4 <= T; ++k4)
                    REQUIRE(g[k2 + k4] - g[k4] >= g[k2 + k3 + k4] - g[k3 + k4] - kMarginTol);
    }
}

TEST_CASE("exhaustive sweep finds nothing for a concave penalty") {
    VerifyReport r = verify_exhaustive(sqrt_spec(3), 6);
    CHECK(r.pairs_checked == 4096);
    CHECK(r.violations_total == 0);
    CHECK(r.violations.empty());
    CHECK_FALSE(r.truncated);
    CHECK(r.min_margin == 0.0); // chains make zero the attained minimum

    VerifyReport r1 = verify_exhaustive(sqrt_spec(1), 1);
    CHECK(r1.pairs_checked == 4);
    CHECK(r1.violations_total == 0);
}

TEST_CASE("exhaustive sweep pins the convex counterexamples") {
    VerifyReport r = verify_exhaustive(squares_table(3), 6);
    CHECK(r.pairs_checked == 4096);
    REQUIRE(r.violations_total > 0);
    REQUIRE_FALSE(r.violations.empty());

    // first violation in scan order
    CHECK(r.violations.front().a.to_string() == "000001");
    CHECK(r.violations.front().b.to_string() == "000010");
    CHECK(r.violations.front().margin == -2.0);
    CHECK(r.min_margin == -4.0);

    bool found_spec_pair = false;
    for (const Violation& v : r.violations)
        if (v.a.to_string() == "000011" && v.b.to_string() == "000101") {
            found_spec_pair = true;
            CHECK(v.margin == -2.0);
        }
    CHECK(found_spec_pair);
}

TEST_CASE("violation list capping keeps exact totals") {
    VerifyReport full = verify_exhaustive(squares_table(3), 6);
    VerifyOptions opts;
    opts.max_violations = 3;
    VerifyReport capped = verify_exhaustive(squares_table(3), 6, opts);
    CHECK(capped.violations.size() == 3);
    CHECK(capped.truncated);
    CHECK(capped.violations_total == full.violations_total);
    CHECK(capped.min_margin == full.min_margin);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(capped.violations[i].a == full.violations[i].a);
        CHECK(capped.violations[i].b == full.violations[i].b);
    }
}

TEST_CASE("parallel sweep matches the sequential scan") {
    for (const ConcaveSpec& spec : {sqrt_spec(4), squares_table(4)}) {
        VerifyOptions seq;
        seq.threads = 1;
        VerifyOptions par;
        par.threads = 4;
        VerifyReport a = verify_exhaustive(spec, 8, seq);
        VerifyReport b = verify_exhaustive(spec, 8, par);
        REQUIRE(findings_equal(a, b));
    }
}

TEST_CASE("sampled sweep is seed-deterministic") {
    ConcaveSpec sq = sqrt_spec(32);
    VerifyReport a = verify_sampled(sq, 64, 20000, 1);
    VerifyReport b = verify_sampled(sq, 64, 20000, 1);
    REQUIRE(findings_equal(a, b));
    CHECK(a.pairs_checked == 20000);
    CHECK(a.violations_total == 0);
    CHECK(a.min_margin >= 0.0);

    VerifyReport c = verify_sampled(sq, 64, 20000, 2);
    CHECK(std::bit_cast<std::uint64_t>(a.min_margin) != std::bit_cast<std::uint64_t>(c.min_margin));
}

TEST_CASE("sampled sweep surfaces convex violations") {
    VerifyReport r = verify_sampled(squares_table(8), 16, 100000, 1);
    CHECK(r.violations_total > 0);
    CHECK(r.min_margin < -kMarginTol);
    for (const Violation& v : r.violations) {
        CHECK(v.margin < -kMarginTol);
        CHECK(v.a.size() == 16);
    }
}

TEST_CASE("counterexample search") {
    auto hit = find_counterexample({0.0, 1.0, 4.0, 9.0}, 6, 1 << 20);
    REQUIRE(hit.has_value());
    CHECK(hit->a.to_string() == "000001");
    CHECK(hit->b.to_string() == "000010");
    CHECK(hit->margin == -2.0);

    std::vector<double> sqrt8;
    for (std::size_t t = 0; t <= 4; ++t) sqrt8.push_back(std::sqrt(static_cast<double>(t)));
    CHECK_FALSE(find_counterexample(sqrt8, 8, 1 << 20).has_value());

    CHECK_FALSE(find_counterexample({0.0, 1.0, 2.0}, 5, 1 << 20).has_value());

    // budget zero scans nothing
    CHECK_FALSE(find_counterexample({0.0, 1.0, 4.0, 9.0}, 6, 0).has_value());
}

TEST_CASE("range guards") {
    CHECK_THROWS_AS(verify_exhaustive(sqrt_spec(8), 0), RangeError);
    CHECK_THROWS_AS(verify_exhaustive(sqrt_spec(8), 14), RangeError);
    CHECK_THROWS_AS(verify_exhaustive(sqrt_spec(1), 6), RangeError); // spec too short
    CHECK_THROWS_AS(verify_sampled(sqrt_spec(8), 0, 10, 1), RangeError);
    CHECK_THROWS_AS(verify_sampled(sqrt_spec(8), 16, 0, 1), RangeError);
    CHECK_THROWS_AS(find_counterexample({0.0, 1.0}, 1, 10), RangeError);
}

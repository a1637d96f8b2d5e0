#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"

using namespace labelcut;

TEST_CASE("label vector construction and round trips") {
    LabelVector zeros(5);
    CHECK(zeros.size() == 5);
    CHECK(zeros.count_ones() == 0);
    CHECK(zeros.to_string() == "00000");

    LabelVector x{0, 0, 1, 1};
    CHECK(x.to_string() == "0011");
    CHECK(x.bit(0) == false);
    CHECK(x.bit(3) == true);
    CHECK(x.count_ones() == 2);
    CHECK(x.count_zeros() == 2);
    CHECK(LabelVector::from_string("0011") == x);

    CHECK_THROWS_AS(LabelVector(0), ParameterError);
    CHECK_THROWS_AS(LabelVector({0, 2}), ParameterError);
    CHECK_THROWS_AS(LabelVector::from_string("01x"), ParameterError);
}

TEST_CASE("index decoding is lexicographic") {
    CHECK(LabelVector::from_index(3, 6).to_string() == "000011");
    CHECK(LabelVector::from_index(0, 4).to_string() == "0000");
    CHECK(LabelVector::from_index(15, 4).to_string() == "1111");
    CHECK(LabelVector::from_index(std::uint64_t{1} << 63, 64).bit(0) == true);

    for (std::uint64_t v = 0; v + 1 < 16; ++v)
        CHECK(LabelVector::from_index(v, 4) < LabelVector::from_index(v + 1, 4));

    CHECK_THROWS_AS(LabelVector::from_index(16, 4), RangeError);
    CHECK_THROWS_AS(LabelVector::from_index(0, 0), RangeError);
    CHECK_THROWS_AS(LabelVector::from_index(0, 65), RangeError);
}

TEST_CASE("lattice operations") {
    LabelVector a = LabelVector::from_string("0011");
    LabelVector b = LabelVector::from_string("0101");
    CHECK(lattice_or(a, b).to_string() == "0111");
    CHECK(lattice_and(a, b).to_string() == "0001");
    CHECK(a.complemented().to_string() == "1100");

    LabelVector wide(70);
    CHECK(wide.complemented().count_ones() == 70);
    CHECK_THROWS_AS(lattice_or(a, wide), LengthMismatch);
    CHECK_THROWS_AS(lattice_and(a, wide), LengthMismatch);

    CHECK(a < b);
    CHECK_FALSE(b < a);
    CHECK(LabelVector::from_string("01") < LabelVector::from_string("010"));
}

TEST_CASE("dominant label and deviation") {
    auto d = dominant_label(LabelVector::from_string("00110"));
    CHECK(d.majority == Majority::Zero);
    CHECK(d.n0 == 3);
    CHECK(d.n1 == 2);
    CHECK(deviation(LabelVector::from_string("00110")) == 2);

    CHECK(dominant_label(LabelVector::from_string("0011")).majority == Majority::Tie);
    CHECK(dominant_label(LabelVector::from_string("111")).majority == Majority::One);
    CHECK(deviation(LabelVector::from_string("0")) == 0);
    CHECK(deviation(LabelVector::from_string("111")) == 0);

    // deviation never exceeds half the length
    for (std::uint64_t v = 0; v < 64; ++v)
        CHECK(deviation(LabelVector::from_index(v, 6)) <= 3);
}

TEST_CASE("builtin families sample as expected") {
    ConcaveSpec sq = make_concave_spec(SqrtFamily{}, 3);
    REQUIRE(sq.samples.size() == 4);
    CHECK(sq.validated);
    CHECK(sq.samples[0] == 0.0);
    CHECK(sq.samples[2] == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(sq.samples[3] == Catch::Approx(std::sqrt(3.0)).epsilon(1e-15));

    ConcaveSpec lg = make_concave_spec(Log1pFamily{}, 2);
    CHECK(lg.samples[1] == Catch::Approx(std::log(2.0)).epsilon(1e-15));

    ConcaveSpec pw = make_concave_spec(PowerFamily{0.5}, 3);
    for (std::size_t t = 0; t <= 3; ++t) CHECK(pw.samples[t] == sq.samples[t]);

    ConcaveSpec lin = make_concave_spec(PowerFamily{1.0}, 3);
    CHECK(lin.samples == std::vector<double>{0.0, 1.0, 2.0, 3.0});

    ConcaveSpec tl = make_concave_spec(TruncLinFamily{1.0, 2.0}, 3);
    CHECK(tl.samples == std::vector<double>{0.0, 1.0, 2.0, 2.0});

    ConcaveSpec tab = make_concave_spec(TableFamily{{0.0, 1.0, 1.5}}, 2);
    CHECK(tab.samples == std::vector<double>{0.0, 1.0, 1.5});

    ConcaveSpec weighted = make_concave_spec(SqrtFamily{}, 2, 2.0);
    CHECK(weighted.samples[1] == 2.0);
    CHECK(weighted.samples[2] == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("parameter checks reject bad family arguments") {
    CHECK_THROWS_AS(make_concave_spec(PowerFamily{0.0}, 2), ParameterError);
    CHECK_THROWS_AS(make_concave_spec(PowerFamily{1.5}, 2), ParameterError);
    CHECK_THROWS_AS(make_concave_spec(TruncLinFamily{-1.0, 2.0}, 2), ParameterError);
    CHECK_THROWS_AS(make_concave_spec(TruncLinFamily{1.0, 0.5}, 2), ParameterError);
    CHECK_THROWS_AS(make_concave_spec(SqrtFamily{}, 0), ParameterError);
    CHECK_THROWS_AS(make_concave_spec(SqrtFamily{}, 2, -1.0), ParameterError);
    CHECK_THROWS_AS(make_concave_spec(TableFamily{{0.0, 1.0}}, 2), ParameterError); // length != T + 1
}

TEST_CASE("validation failures carry index and kind") {
    try {
        make_concave_spec(TableFamily{{0.0, 1.0, 4.0}}, 2);
        FAIL("expected a validation failure");
    } catch (const ValidationError& e) {
        CHECK(e.index == 2);
        CHECK(e.kind == ValidationError::Kind::Concavity);
    }

    try {
        make_concave_spec(TableFamily{{0.0, 2.0, 1.0}}, 2);
        FAIL("expected a validation failure");
    } catch (const ValidationError& e) {
        CHECK(e.index == 2);
        CHECK(e.kind == ValidationError::Kind::Monotonicity);
    }

    try {
        make_concave_spec(TableFamily{{0.0, std::nan(""), 1.0}}, 2);
        FAIL("expected a validation failure");
    } catch (const ValidationError& e) {
        CHECK(e.index == 1);
        CHECK(e.kind == ValidationError::Kind::NonFinite);
    }

    // slack within tolerance is accepted
    CHECK_NOTHROW(make_concave_spec(TableFamily{{0.0, 1.0, 2.0 + 5e-13}}, 2));
    CHECK_NOTHROW(make_concave_spec(TableFamily{{0.0, 1.0, 1.0 - 5e-13}}, 2));
}

TEST_CASE("unvalidated tables skip the shape checks") {
    ConcaveSpec raw = make_unvalidated_table({0.0, 1.0, 4.0});
    CHECK_FALSE(raw.validated);
    CHECK(raw.samples == std::vector<double>{0.0, 1.0, 4.0});

    ConcaveSpec scaled = make_unvalidated_table({0.0, 1.0, 4.0}, 2.0);
    CHECK(scaled.samples == std::vector<double>{0.0, 2.0, 8.0});

    CHECK_THROWS_AS(make_unvalidated_table({0.0}), ParameterError);
    CHECK_THROWS_AS(make_unvalidated_table({0.0, std::nan("")}), ValidationError);
}

TEST_CASE("penalty evaluation") {
    ConcaveSpec sq = make_concave_spec(SqrtFamily{}, 3);
    CHECK(eval_g(sq, 0) == 0.0);
    CHECK(eval_g(sq, 2) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(eval_g(sq, 4), RangeError);

    ConcaveSpec identity = make_concave_spec(TableFamily{{0.0, 1.0, 2.0}}, 2);
    CHECK(disagreement(identity, LabelVector::from_string("1011")) == 1.0);
    CHECK(disagreement(sq, LabelVector::from_string("0011")) ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(disagreement(sq, LabelVector::from_string("000000")) == 0.0);

    ConcaveSpec narrow = make_concave_spec(SqrtFamily{}, 1);
    CHECK_THROWS_AS(disagreement(narrow, LabelVector::from_string("00110")), RangeError);
}

TEST_CASE("disagreement is permutation and complement invariant") {
    ConcaveSpec sq = make_concave_spec(SqrtFamily{}, 3);
    LabelVector x = LabelVector::from_string("0010110");
    LabelVector shuffled = LabelVector::from_string("1110000"); // same counts
    CHECK(disagreement(sq, x) == disagreement(sq, shuffled));

    for (std::uint64_t v = 0; v < 64; ++v) {
        LabelVector y = LabelVector::from_index(v, 6);
        CHECK(disagreement(sq, y) == disagreement(sq, y.complemented()));
    }
}

TEST_CASE("validated specs have nonincreasing nonnegative slopes") {
    std::vector<ConcaveSpec> specs = {
        make_concave_spec(SqrtFamily{}, 8),
        make_concave_spec(Log1pFamily{}, 8),
        make_concave_spec(PowerFamily{0.3}, 8),
        make_concave_spec(TruncLinFamily{2.0, 3.0}, 8),
        make_concave_spec(TableFamily{{0.0, 4.0, 6.0, 7.0, 7.5}}, 4),
    };
    for (const ConcaveSpec& spec : specs) {
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t t = 1; t < spec.samples.size(); ++t) {
            double delta = spec.samples[t] - spec.samples[t - 1];
            CHECK(delta >= -kValidationTol);
            CHECK(delta <= prev + kValidationTol);
            prev = delta;
        }
    }
}

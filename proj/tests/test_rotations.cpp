#include <doctest.h>

#include <random>

#include "paradox/error.hpp"
#include "paradox/rotations.hpp"

using namespace paradox;
using namespace paradox::rot;
using words::Word;

namespace {

Word random_reduced(std::mt19937& rng, std::size_t len) {
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<words::Letter> out;
    while (out.size() < len) {
        auto l = static_cast<words::Letter>(pick(rng));
        if (!out.empty() && out.back() == words::inverse(l)) continue;
        out.push_back(l);
    }
    return Word(out);
}

}  // namespace

TEST_CASE("triple validation") {
    CHECK_NOTHROW(PythagoreanTriple::make(3, 4, 5));
    CHECK_NOTHROW(PythagoreanTriple::make(20, 21, 29));
    CHECK_THROWS_WITH_AS(PythagoreanTriple::make(6, 8, 10), doctest::Contains("NON_PRIMITIVE"),
                         Error);
    CHECK_THROWS_WITH_AS(PythagoreanTriple::make(3, 4, 6), doctest::Contains("NON_PYTHAGOREAN"),
                         Error);
    CHECK_THROWS_WITH_AS(PythagoreanTriple::make(4, 3, 5), doctest::Contains("BAD_ORDER"), Error);
}

TEST_CASE("generator maps match the scaled rotation formulas") {
    auto t = PythagoreanTriple::make(3, 4, 5);
    auto gens = make_generators(t);

    // s+(x,y,z) = (5x, 4y-3z, 3y+4z)
    Vec3I v{Int(1), Int(2), Int(3)};
    Vec3I img = mat3_apply(gens[0].m, v);
    CHECK(img == Vec3I{Int(5), Int(8 - 9), Int(6 + 12)});

    // s+ s- = 25 I
    Mat3I prod = mat3_mul(gens[0].m, gens[1].m);
    CHECK(prod == mat3_scale(mat3_identity<Int>(), Int(25)));

    // (5,12,13): s+(x,y,z) = (13x, 12y-5z, 5y+12z), M^T M = 169 I
    auto t13 = PythagoreanTriple::make(5, 12, 13);
    auto gens13 = make_generators(t13);
    Vec3I img13 = mat3_apply(gens13[0].m, Vec3I{Int(1), Int(1), Int(1)});
    CHECK(img13 == Vec3I{Int(13), Int(7), Int(17)});
    CHECK(mat3_mul(mat3_transpose(gens13[0].m), gens13[0].m) ==
          mat3_scale(mat3_identity<Int>(), Int(169)));
}

TEST_CASE("scaled vector equality is cross-multiplied") {
    auto t = PythagoreanTriple::make(3, 4, 5);
    ScaledVec a = ScaledVec::ints(0, 0, 1, 0, t.c);
    ScaledVec b = ScaledVec::ints(0, 0, 25, 2, t.c);
    CHECK(a.equals(b));
    CHECK(b.normalized().n == 0);
    CHECK_FALSE(a.equals(ScaledVec::ints(0, 1, 0, 0, t.c)));
}

TEST_CASE("apply_word matches the hand-evaluated compositions") {
    auto t = PythagoreanTriple::make(3, 4, 5);
    ScaledVec pole = ScaledVec::ints(0, 0, 1, 0, t.c);

    CHECK(apply_word(Word{}, pole, t).equals(pole));

    // sigma tau on (0,0,1): s+(t+(0,0,1)) = s+(3,0,4) = (15,-12,16)
    ScaledVec st = apply_word(Word::from_string("st"), pole, t);
    CHECK(st.v == Vec3I{Int(15), Int(-12), Int(16)});
    CHECK(st.n == 2);

    // tau sigma moves the same point elsewhere
    ScaledVec ts = apply_word(Word::from_string("ts"), pole, t);
    CHECK(ts.v == Vec3I{Int(12), Int(-15), Int(16)});
    CHECK_FALSE(st.equals(ts));
}

TEST_CASE("word_matrix is consistent with apply_word and multiplicative") {
    auto t = PythagoreanTriple::make(3, 4, 5);
    auto gens = make_generators(t);

    auto wm = word_matrix(Word{}, t);
    CHECK(wm.m == mat3_identity<Int>());
    CHECK(wm.n == 0);
    CHECK(word_matrix(Word::from_string("s"), t).m == gens[0].m);

    std::mt19937 rng(23);
    for (int i = 0; i < 50; ++i) {
        Word w1 = random_reduced(rng, 4), w2 = random_reduced(rng, 4);
        auto lhs = word_matrix(words::concat(w1, w2), t);
        auto rhs = mat3_mul(word_matrix(w1, t).m, word_matrix(w2, t).m);
        // Cancellation inside concat divides out powers of c^2 exactly.
        Int scale = 1;
        for (unsigned k = lhs.n; k < word_matrix(w1, t).n + word_matrix(w2, t).n; ++k)
            scale *= t.c;
        CHECK(mat3_scale(lhs.m, scale) == rhs);
    }

    for (int i = 0; i < 50; ++i) {
        Word w = random_reduced(rng, 5);
        ScaledVec x = ScaledVec::ints(1, 2, 2, 0, t.c);
        auto via_matrix = mat3_apply(word_matrix(w, t).m, x.v);
        CHECK(apply_word(w, x, t).v == via_matrix);
    }
}

TEST_CASE("properties: norm growth, determinant, inverse action") {
    auto t = PythagoreanTriple::make(3, 4, 5);
    std::mt19937 rng(29);
    std::uniform_int_distribution<long long> coord(-9, 9);
    for (int i = 0; i < 60; ++i) {
        Word w = random_reduced(rng, 6);
        ScaledVec x = ScaledVec::ints(coord(rng), coord(rng), coord(rng), 0, t.c);
        ScaledVec y = apply_word(w, x, t);

        Int expected_norm = vec3_dot(x.v, x.v);
        for (std::size_t k = 0; k < 2 * w.length(); ++k) expected_norm *= t.c;
        CHECK(y.norm2_numerator() == expected_norm);

        Int expected_det = 1;
        for (std::size_t k = 0; k < 3 * w.length(); ++k) expected_det *= t.c;
        CHECK(mat3_det(word_matrix(w, t).m) == expected_det);

        CHECK(apply_word(words::invert(w), y, t).equals(x));
    }
}

TEST_CASE("brute-force freeness sweep") {
    auto t = PythagoreanTriple::make(3, 4, 5);
    ScaledVec witness = ScaledVec::ints(0, 0, 1, 0, t.c);

    auto rep0 = brute_force_freeness(t, 0, witness);
    CHECK(rep0.pass);
    CHECK(rep0.words_checked == 0);

    auto rep = brute_force_freeness(t, 6, witness);
    CHECK(rep.pass);
    CHECK(rep.words_checked == 1456);

    // Unreduced pairs do scale-fix the witness: s+ s- = 25 I.
    auto gens = make_generators(t);
    Vec3I twice = mat3_apply(gens[0].m, mat3_apply(gens[1].m, witness.v));
    CHECK(twice == vec3_scale(witness.v, Int(25)));

    // Thread count affects neither verdict nor counterexample choice.
    auto rep4 = brute_force_freeness(t, 6, witness, 4);
    CHECK(rep4.pass == rep.pass);
    CHECK(rep4.words_checked == rep.words_checked);

    CHECK_THROWS_WITH_AS(brute_force_freeness(t, 2, ScaledVec::ints(0, 0, 0, 0, t.c)),
                         doctest::Contains("ZERO_WITNESS"), Error);
}

TEST_CASE("sweep catches a rigged non-free-style fixed point") {
    // The x-axis pole is fixed by sigma: (1,0,0) fails "witness_fixed" at
    // the very first word.
    auto t = PythagoreanTriple::make(3, 4, 5);
    auto rep = brute_force_freeness(t, 2, ScaledVec::ints(1, 0, 0, 0, t.c));
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.counterexample.has_value());
    CHECK(rep.counterexample->str() == "s");
    CHECK(rep.failed_check == "witness_fixed");
}

#include <doctest.h>

#include <random>

#include "paradox/error.hpp"
#include "paradox/words.hpp"

using namespace paradox;
using namespace paradox::words;

namespace {

// Independent reduction oracle: rescan for a cancelling pair until none is
// left. Quadratic, but obviously faithful to the definition.
std::vector<Letter> reduce_by_rescan(std::vector<Letter> w) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            if (w[i] == inverse(w[i + 1])) {
                w.erase(w.begin() + i, w.begin() + i + 2);
                changed = true;
                break;
            }
        }
    }
    return w;
}

std::vector<Letter> random_letters(std::mt19937& rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<Letter> out(len(rng));
    for (auto& l : out) l = static_cast<Letter>(pick(rng));
    return out;
}

}  // namespace

TEST_CASE("reduce: identity and single cancellation") {
    CHECK(Word(std::vector<Letter>{}).empty());
    CHECK(Word(std::vector<Letter>{Letter::SigmaPos, Letter::SigmaNeg}).empty());
}

TEST_CASE("reduce: repeated-scan oracle agreement") {
    // [tau, sigma, sigma^-1, tau^-1, sigma] -> [sigma]
    std::vector<Letter> raw{Letter::TauPos, Letter::SigmaPos, Letter::SigmaNeg, Letter::TauNeg,
                            Letter::SigmaPos};
    CHECK(reduce(raw) == Word::from_string("s"));
    CHECK(reduce(raw).letters() == reduce_by_rescan(raw));

    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) {
        auto raw_random = random_letters(rng, 24);
        CHECK(reduce(raw_random).letters() == reduce_by_rescan(raw_random));
    }
}

TEST_CASE("reduce is idempotent on random sequences") {
    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
        Word w = reduce(random_letters(rng, 32));
        CHECK(reduce(w.letters()) == w);
    }
}

TEST_CASE("concat: identity, cancellation, parity") {
    Word w = Word::from_string("st");
    CHECK(concat(Word{}, w) == w);
    CHECK(concat(w, Word{}) == w);
    CHECK(concat(Word::from_string("st"), Word::from_string("Ts")) == Word::from_string("ss"));

    std::mt19937 rng(13);
    for (int i = 0; i < 500; ++i) {
        Word a = reduce(random_letters(rng, 16));
        Word b = reduce(random_letters(rng, 16));
        CHECK((concat(a, b).length() % 2) == ((a.length() + b.length()) % 2));
    }
}

TEST_CASE("invert: reverse-and-flip, involution, cancellation") {
    CHECK(invert(Word{}) == Word{});
    CHECK(invert(Word::from_string("st")) == Word::from_string("TS"));
    CHECK(invert(invert(Word::from_string("st"))) == Word::from_string("st"));
    CHECK(concat(Word::from_string("sttS"), invert(Word::from_string("sttS"))).empty());

    std::mt19937 rng(17);
    for (int i = 0; i < 1000; ++i) {
        Word w = reduce(random_letters(rng, 20));
        CHECK(concat(w, invert(w)).empty());
        CHECK(invert(invert(w)) == w);
    }
}

TEST_CASE("enumerate_reduced: counts, distinctness, reducedness") {
    auto words0 = all_reduced(0);
    REQUIRE(words0.size() == 1);
    CHECK(words0[0].empty());

    auto words1 = all_reduced(1);
    REQUIRE(words1.size() == 5);
    CHECK(words1[1] == Word::from_string("s"));
    CHECK(words1[2] == Word::from_string("S"));
    CHECK(words1[3] == Word::from_string("t"));
    CHECK(words1[4] == Word::from_string("T"));

    CHECK(reduced_count(3) == 53);
    auto words3 = all_reduced(3);
    CHECK(words3.size() == 53);
    for (std::size_t i = 0; i < words3.size(); ++i) {
        CHECK(reduce(words3[i].letters()) == words3[i]);
        if (i > 0) CHECK(words3[i - 1] < words3[i]);  // strict enumeration order
    }

    std::uint64_t level4 = 0;
    enumerate_reduced(4, [&](const Word& w) { level4 += w.length() == 4 ? 1 : 0; });
    CHECK(level4 == 4 * 3 * 3 * 3);
}

TEST_CASE("leading_coset") {
    CHECK(leading_coset(Word{}) == CosetLabel::E);
    CHECK(leading_coset(Word::from_string("sTs")) == CosetLabel::SigmaPos);
    CHECK(leading_coset(Word::from_string("St")) == CosetLabel::SigmaNeg);

    auto words = all_reduced(3);
    for (const auto& w : words) {
        if (w.empty()) continue;
        CHECK(leading_coset(w) != CosetLabel::E);
    }
}

TEST_CASE("removing the first letter lands in the complementary cosets") {
    // sigma^-1 . (sigma tau) = tau
    Word st = concat(Word::from_string("s"), Word::from_string("t"));
    Word stripped = concat(Word::from_string("S"), st);
    CHECK(stripped == Word::from_string("t"));
    // sigma^-1 . sigma = e
    CHECK(concat(Word::from_string("S"), Word::from_string("s")).empty());
}

TEST_CASE("verify_f2_paradox") {
    CHECK_THROWS_WITH_AS(verify_f2_paradox(1), doctest::Contains("BAD_CUTOFF"), Error);

    auto rep = verify_f2_paradox(3);
    CHECK(rep.pass);
    CHECK(rep.word_count == 53);
    CHECK(rep.partition_ok);
    CHECK(rep.sigma_shift_ok);
    CHECK(rep.tau_shift_ok);

    auto rep6 = verify_f2_paradox(6);
    CHECK(rep6.pass);
    CHECK(rep6.word_count == reduced_count(6));
}

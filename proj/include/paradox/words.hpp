#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paradox::words {

// The four letters over the alphabet {sigma, tau}. The declaration order is
// the fixed enumeration order used everywhere (length-major, then
// lexicographic in this order).
enum class Letter : std::uint8_t {
    SigmaPos = 0,
    SigmaNeg = 1,
    TauPos = 2,
    TauNeg = 3,
};

constexpr Letter inverse(Letter l) {
    return static_cast<Letter>(static_cast<std::uint8_t>(l) ^ 1u);
}

constexpr bool same_symbol(Letter a, Letter b) {
    return (static_cast<std::uint8_t>(a) >> 1) == (static_cast<std::uint8_t>(b) >> 1);
}

// ASCII aliases: s/S = sigma/sigma^-1, t/T = tau/tau^-1.
char letter_char(Letter l);
std::optional<Letter> letter_from_char(char c);

// A word stored in reduced canonical form: adjacent letter/inverse pairs are
// cancelled eagerly on construction, so equality is structural and the empty
// word is the identity element.
class Word {
public:
    Word() = default;
    explicit Word(const std::vector<Letter>& raw);

    static Word from_string(std::string_view ascii);  // throws Error(BAD_LETTER)

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    std::size_t length() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }

    bool operator==(const Word&) const = default;
    bool operator<(const Word& o) const;  // length-major, then letter order

    std::string str() const;  // "e" for the empty word

private:
    struct AlreadyReduced {};
    Word(AlreadyReduced, std::vector<Letter> letters) : letters_(std::move(letters)) {}

    friend Word reduce(const std::vector<Letter>& raw);
    friend void enumerate_reduced(std::size_t, const std::function<void(const Word&)>&);

    std::vector<Letter> letters_;
};

Word reduce(const std::vector<Letter>& raw);
Word concat(const Word& w1, const Word& w2);
Word invert(const Word& w);
Word prepend(Letter l, const Word& w);

enum class CosetLabel : std::uint8_t {
    E = 0,
    SigmaPos,
    SigmaNeg,
    TauPos,
    TauNeg,
};

CosetLabel leading_coset(const Word& w);
std::string coset_name(CosetLabel label);

// Visits every reduced word of length <= max_len exactly once, length-major
// and lexicographic within each length.
void enumerate_reduced(std::size_t max_len, const std::function<void(const Word&)>& visit);
std::vector<Word> all_reduced(std::size_t max_len);

// 1 + sum_{n=1..max_len} 4*3^(n-1)
std::uint64_t reduced_count(std::size_t max_len);

struct F2ParadoxReport {
    std::size_t max_len = 0;
    std::uint64_t word_count = 0;
    bool partition_ok = false;
    bool sigma_shift_ok = false;
    bool tau_shift_ok = false;
    bool pass = false;
    std::optional<Word> counterexample;
    std::string detail;
};

// Checks, on the truncation W_L of all reduced words of length <= L:
//   (a) {e}, G_sigma, G_sigma^-1, G_tau, G_tau^-1 partition W_L;
//   (b) w |-> sigma.w maps the words of W_{L-1} not led by sigma^-1
//       bijectively onto G_sigma cut at length L, and the tau mirror.
// Throws Error(BAD_CUTOFF) for max_len < 2.
F2ParadoxReport verify_f2_paradox(std::size_t max_len);

}  // namespace paradox::words

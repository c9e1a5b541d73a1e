#include "paradox/words.hpp"

#include <algorithm>
#include <unordered_set>

#include "paradox/error.hpp"

namespace paradox::words {

char letter_char(Letter l) {
    switch (l) {
        case Letter::SigmaPos: return 's';
        case Letter::SigmaNeg: return 'S';
        case Letter::TauPos: return 't';
        case Letter::TauNeg: return 'T';
    }
    return '?';
}

std::optional<Letter> letter_from_char(char c) {
    switch (c) {
        case 's': return Letter::SigmaPos;
        case 'S': return Letter::SigmaNeg;
        case 't': return Letter::TauPos;
        case 'T': return Letter::TauNeg;
        default: return std::nullopt;
    }
}

Word::Word(const std::vector<Letter>& raw) { *this = reduce(raw); }

Word Word::from_string(std::string_view ascii) {
    if (ascii == "e") return Word{};
    std::vector<Letter> raw;
    raw.reserve(ascii.size());
    for (char c : ascii) {
        auto l = letter_from_char(c);
        if (!l) throw Error("BAD_LETTER", std::string("unknown letter '") + c + "' (use s,S,t,T or e)");
        raw.push_back(*l);
    }
    return Word(raw);
}

bool Word::operator<(const Word& o) const {
    if (letters_.size() != o.letters_.size()) return letters_.size() < o.letters_.size();
    return letters_ < o.letters_;
}

std::string Word::str() const {
    if (letters_.empty()) return "e";
    std::string s;
    s.reserve(letters_.size());
    for (Letter l : letters_) s.push_back(letter_char(l));
    return s;
}

Word reduce(const std::vector<Letter>& raw) {
    std::vector<Letter> stack;
    stack.reserve(raw.size());
    for (Letter l : raw) {
        if (!stack.empty() && stack.back() == inverse(l)) {
            stack.pop_back();
        } else {
            stack.push_back(l);
        }
    }
    return Word(Word::AlreadyReduced{}, std::move(stack));
}

Word concat(const Word& w1, const Word& w2) {
    std::vector<Letter> raw = w1.letters();
    raw.insert(raw.end(), w2.letters().begin(), w2.letters().end());
    return reduce(raw);
}

Word invert(const Word& w) {
    std::vector<Letter> raw;
    raw.reserve(w.length());
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) raw.push_back(inverse(*it));
    return reduce(raw);
}

Word prepend(Letter l, const Word& w) {
    std::vector<Letter> raw;
    raw.reserve(w.length() + 1);
    raw.push_back(l);
    raw.insert(raw.end(), w.letters().begin(), w.letters().end());
    return reduce(raw);
}

CosetLabel leading_coset(const Word& w) {
    if (w.empty()) return CosetLabel::E;
    switch (w.letters().front()) {
        case Letter::SigmaPos: return CosetLabel::SigmaPos;
        case Letter::SigmaNeg: return CosetLabel::SigmaNeg;
        case Letter::TauPos: return CosetLabel::TauPos;
        case Letter::TauNeg: return CosetLabel::TauNeg;
    }
    return CosetLabel::E;
}

std::string coset_name(CosetLabel label) {
    switch (label) {
        case CosetLabel::E: return "E";
        case CosetLabel::SigmaPos: return "SIGMA_POS";
        case CosetLabel::SigmaNeg: return "SIGMA_NEG";
        case CosetLabel::TauPos: return "TAU_POS";
        case CosetLabel::TauNeg: return "TAU_NEG";
    }
    return "?";
}

namespace {

constexpr Letter kLetters[4] = {Letter::SigmaPos, Letter::SigmaNeg, Letter::TauPos, Letter::TauNeg};

// 2 bits per letter, letters in the low bits first; length carried separately.
std::uint64_t encode(const std::vector<Letter>& ls) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < ls.size(); ++i)
        key |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(ls[i])) << (2 * i);
    return key | (static_cast<std::uint64_t>(ls.size()) << 56);
}

}  // namespace

void enumerate_reduced(std::size_t max_len, const std::function<void(const Word&)>& visit) {
    visit(Word{});
    if (max_len == 0) return;
    // Level-by-level extension keeps the order length-major and lexicographic.
    std::vector<std::vector<Letter>> level{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<Letter>> next;
        next.reserve(level.size() * 3 + 1);
        for (const auto& prefix : level) {
            for (Letter l : kLetters) {
                if (!prefix.empty() && prefix.back() == inverse(l)) continue;
                std::vector<Letter> w = prefix;
                w.push_back(l);
                visit(Word(Word::AlreadyReduced{}, w));
                next.push_back(std::move(w));
            }
        }
        level = std::move(next);
    }
}

std::vector<Word> all_reduced(std::size_t max_len) {
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(reduced_count(max_len)));
    enumerate_reduced(max_len, [&](const Word& w) { out.push_back(w); });
    return out;
}

std::uint64_t reduced_count(std::size_t max_len) {
    std::uint64_t total = 1, level = 4;
    for (std::size_t n = 1; n <= max_len; ++n) {
        total += level;
        level *= 3;
    }
    return total;
}

namespace {

// One shift check: every w in W_{L-1} not led by g^-1 must map under
// w |-> g.w bijectively onto the g-led words of W_L.
bool check_shift(Letter g, std::size_t max_len, const std::vector<Word>& words,
                 std::optional<Word>& counterexample, std::string& detail) {
    std::unordered_set<std::uint64_t> image;
    std::uint64_t expected = 0;
    const Letter bad_lead = inverse(g);
    for (const Word& w : words) {
        if (w.length() <= max_len && !w.empty() && w.letters().front() == g) ++expected;
        if (w.length() > max_len - 1) continue;
        if (!w.empty() && w.letters().front() == bad_lead) continue;
        Word shifted = prepend(g, w);
        if (shifted.length() != w.length() + 1 || shifted.letters().front() != g) {
            counterexample = w;
            detail = "shifted word " + shifted.str() + " is not a fresh " +
                     std::string(1, letter_char(g)) + "-led word";
            return false;
        }
        if (!image.insert(encode(shifted.letters())).second) {
            counterexample = w;
            detail = "shift by " + std::string(1, letter_char(g)) + " is not injective at " + w.str();
            return false;
        }
    }
    if (image.size() != expected) {
        detail = "shift by " + std::string(1, letter_char(g)) + " misses " +
                 std::to_string(expected - image.size()) + " coset words";
        return false;
    }
    // Injective, lands inside the coset, and the counts agree: bijective.
    return true;
}

}  // namespace

F2ParadoxReport verify_f2_paradox(std::size_t max_len) {
    if (max_len < 2) throw Error("BAD_CUTOFF", "f2 paradox check needs max_len >= 2");
    F2ParadoxReport rep;
    rep.max_len = max_len;

    std::vector<Word> words = all_reduced(max_len);
    rep.word_count = words.size();

    // (a) the five leading-letter classes partition the truncation.
    std::uint64_t class_count[5] = {0, 0, 0, 0, 0};
    rep.partition_ok = true;
    for (const Word& w : words) {
        CosetLabel label = leading_coset(w);
        if ((label == CosetLabel::E) != w.empty()) {
            rep.partition_ok = false;
            rep.counterexample = w;
            rep.detail = "coset E assigned to a nonempty word";
            break;
        }
        ++class_count[static_cast<int>(label)];
    }
    if (rep.partition_ok) {
        std::uint64_t total = 0;
        for (auto c : class_count) total += c;
        std::uint64_t per_coset = (rep.word_count - 1) / 4;
        rep.partition_ok = total == rep.word_count && class_count[0] == 1 &&
                           class_count[1] == per_coset && class_count[2] == per_coset &&
                           class_count[3] == per_coset && class_count[4] == per_coset;
        if (!rep.partition_ok) rep.detail = "coset class sizes do not partition the truncation";
    }

    rep.sigma_shift_ok = rep.partition_ok &&
                         check_shift(Letter::SigmaPos, max_len, words, rep.counterexample, rep.detail);
    rep.tau_shift_ok = rep.sigma_shift_ok &&
                       check_shift(Letter::TauPos, max_len, words, rep.counterexample, rep.detail);

    rep.pass = rep.partition_ok && rep.sigma_shift_ok && rep.tau_shift_ok;
    if (rep.pass) rep.detail = "partition and both shift identities hold at cutoff";
    return rep;
}

}  // namespace paradox::words

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "paradox/linalg.hpp"
#include "paradox/words.hpp"

namespace paradox::rot {

using words::Letter;
using words::Word;

// Primitive Pythagorean triple a^2 + b^2 = c^2, 0 < a < b < c, gcd(a,b) = 1.
// The rotation angle is arcsin(a/c), an irrational multiple of 2*pi.
struct PythagoreanTriple {
    long long a = 3;
    long long b = 4;
    long long c = 5;

    // Throws Error with code BAD_ORDER / NON_PYTHAGOREAN / NON_PRIMITIVE.
    static PythagoreanTriple make(long long a, long long b, long long c);

    bool operator==(const PythagoreanTriple&) const = default;
};

enum class GenKind : std::uint8_t { SPlus = 0, SMinus = 1, TPlus = 2, TMinus = 3 };

GenKind kind_of(Letter l);
std::string kind_name(GenKind k);  // "s_plus", ...

// Integer matrix c * rotation. Composing n of them scales vectors by c^n,
// which is what the exponent of ScaledVec tracks.
struct GeneratorMap {
    GenKind kind;
    Mat3I m;
};

// s+/s- rotate around the x-axis, t+/t- around the y-axis; entries come
// straight from the triple. Invariants M^T M = c^2 I and det M = c^3 are
// re-verified on construction.
std::array<GeneratorMap, 4> make_generators(const PythagoreanTriple& t);

// Integer 3-vector v with exponent n, denoting the rational vector v / c^n.
// Equality is cross-multiplied; dividing out powers of c never happens
// implicitly (the exponent equals accumulated word length).
struct ScaledVec {
    Vec3I v{Int(0), Int(0), Int(0)};
    unsigned n = 0;
    long long base = 5;

    static ScaledVec ints(long long x, long long y, long long z, unsigned n, long long base);

    bool equals(const ScaledVec& o) const;
    ScaledVec normalized() const;  // divides out common powers of base
    Vec3Q to_rational() const;
    Int norm2_numerator() const { return vec3_dot(v, v); }  // |v|^2 (denominator is c^{2n})
    bool is_zero() const { return vec3_is_zero(v); }

    std::string str() const;
};

// Word action: [g1,...,gk] acts as g1 o ... o gk, the rightmost letter first.
// Result exponent is x.n + |w|.
ScaledVec apply_word(const Word& w, const ScaledVec& x, const PythagoreanTriple& t);
ScaledVec apply_word(const Word& w, const ScaledVec& x, const std::array<GeneratorMap, 4>& gens);

struct WordMatrix {
    Mat3I m;
    unsigned n = 0;  // |w|; the matrix denotes m / c^n
};

WordMatrix word_matrix(const Word& w, const PythagoreanTriple& t);

struct FreenessSweep {
    bool pass = false;
    std::uint64_t words_checked = 0;
    std::optional<Word> counterexample;  // first in enumeration order
    std::string failed_check;            // "matrix_identity" | "witness_fixed" | "witness_zero_mod_c"
    PythagoreanTriple triple;
    std::size_t max_len = 0;
    ScaledVec witness;
};

// For every nonempty reduced word w with |w| <= max_len checks that
//   word_matrix(w) != c^{|w|} I,
//   apply_word(w, witness) != c^{|w|} witness, and
//   apply_word(w, witness) is not congruent to 0 mod c.
// The sweep is split by leading prefix across threads; the reported
// counterexample is the least in enumeration order regardless of threads.
FreenessSweep brute_force_freeness(const PythagoreanTriple& t, std::size_t max_len,
                                   const ScaledVec& witness, unsigned threads = 1);
FreenessSweep brute_force_freeness(const PythagoreanTriple& t, std::size_t max_len);

}  // namespace paradox::rot

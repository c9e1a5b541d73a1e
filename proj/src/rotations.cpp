#include "paradox/rotations.hpp"

#include <numeric>
#include <sstream>
#include <thread>

#include "paradox/error.hpp"

namespace paradox::rot {

PythagoreanTriple PythagoreanTriple::make(long long a, long long b, long long c) {
    if (!(0 < a && a < b && b < c))
        throw Error("BAD_ORDER", "triple must satisfy 0 < a < b < c, got (" + std::to_string(a) +
                                     "," + std::to_string(b) + "," + std::to_string(c) + ")");
    if (Int(a) * a + Int(b) * b != Int(c) * c)
        throw Error("NON_PYTHAGOREAN", "a^2 + b^2 != c^2 for (" + std::to_string(a) + "," +
                                           std::to_string(b) + "," + std::to_string(c) + ")");
    if (std::gcd(a, b) != 1)
        throw Error("NON_PRIMITIVE", "gcd(a,b) = " + std::to_string(std::gcd(a, b)) +
                                         " != 1 for (" + std::to_string(a) + "," +
                                         std::to_string(b) + "," + std::to_string(c) + ")");
    return PythagoreanTriple{a, b, c};
}

GenKind kind_of(Letter l) { return static_cast<GenKind>(static_cast<std::uint8_t>(l)); }

std::string kind_name(GenKind k) {
    switch (k) {
        case GenKind::SPlus: return "s_plus";
        case GenKind::SMinus: return "s_minus";
        case GenKind::TPlus: return "t_plus";
        case GenKind::TMinus: return "t_minus";
    }
    return "?";
}

std::array<GeneratorMap, 4> make_generators(const PythagoreanTriple& t) {
    const Int a = t.a, b = t.b, c = t.c;
    std::array<GeneratorMap, 4> gens{{
        {GenKind::SPlus, {{{c, Int(0), Int(0)}, {Int(0), b, -a}, {Int(0), a, b}}}},
        {GenKind::SMinus, {{{c, Int(0), Int(0)}, {Int(0), b, a}, {Int(0), -a, b}}}},
        {GenKind::TPlus, {{{b, Int(0), a}, {Int(0), c, Int(0)}, {-a, Int(0), b}}}},
        {GenKind::TMinus, {{{b, Int(0), -a}, {Int(0), c, Int(0)}, {a, Int(0), b}}}},
    }};
    const Mat3I c2_identity = mat3_scale(mat3_identity<Int>(), Int(c * c));
    for (const auto& g : gens) {
        if (mat3_mul(mat3_transpose(g.m), g.m) != c2_identity)
            throw Error("BAD_GENERATOR", kind_name(g.kind) + ": M^T M != c^2 I");
        if (mat3_det(g.m) != c * c * c)
            throw Error("BAD_GENERATOR", kind_name(g.kind) + ": det M != c^3");
    }
    return gens;
}

ScaledVec ScaledVec::ints(long long x, long long y, long long z, unsigned n, long long base) {
    return ScaledVec{{Int(x), Int(y), Int(z)}, n, base};
}

bool ScaledVec::equals(const ScaledVec& o) const {
    if (base != o.base) throw Error("BASE_MISMATCH", "comparing vectors over different bases");
    // v1 / c^n1 == v2 / c^n2  iff  v1 * c^n2 == v2 * c^n1; scale only by the
    // exponent difference.
    Int scale = 1;
    const Int c = base;
    if (n <= o.n) {
        for (unsigned i = n; i < o.n; ++i) scale *= c;
        return vec3_scale(v, scale) == o.v;
    }
    for (unsigned i = o.n; i < n; ++i) scale *= c;
    return v == vec3_scale(o.v, scale);
}

ScaledVec ScaledVec::normalized() const {
    ScaledVec r = *this;
    const Int c = base;
    if (r.is_zero()) {
        r.n = 0;
        return r;
    }
    while (r.n > 0 && r.v[0] % c == 0 && r.v[1] % c == 0 && r.v[2] % c == 0) {
        for (auto& x : r.v) x /= c;
        --r.n;
    }
    return r;
}

Vec3Q ScaledVec::to_rational() const {
    Int den = 1;
    for (unsigned i = 0; i < n; ++i) den *= base;
    return {Rat(v[0], den), Rat(v[1], den), Rat(v[2], den)};
}

std::string ScaledVec::str() const {
    std::ostringstream os;
    os << vec3_str(v) << "/" << base << "^" << n;
    return os.str();
}

ScaledVec apply_word(const Word& w, const ScaledVec& x, const std::array<GeneratorMap, 4>& gens) {
    ScaledVec r = x;
    // Rightmost letter acts first.
    for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
        r.v = mat3_apply(gens[static_cast<std::size_t>(kind_of(*it))].m, r.v);
        ++r.n;
    }
    return r;
}

ScaledVec apply_word(const Word& w, const ScaledVec& x, const PythagoreanTriple& t) {
    if (x.base != t.c) throw Error("BASE_MISMATCH", "vector base does not match the triple");
    return apply_word(w, x, make_generators(t));
}

WordMatrix word_matrix(const Word& w, const PythagoreanTriple& t) {
    auto gens = make_generators(t);
    WordMatrix r{mat3_identity<Int>(), 0};
    for (Letter l : w.letters()) {
        r.m = mat3_mul(r.m, gens[static_cast<std::size_t>(kind_of(l))].m);
        ++r.n;
    }
    return r;
}

namespace {

constexpr Letter kLetters[4] = {Letter::SigmaPos, Letter::SigmaNeg, Letter::TauPos,
                                Letter::TauNeg};

struct SweepState {
    const std::array<GeneratorMap, 4>& gens;
    const Vec3I& witness;
    Int c;
    std::size_t max_len;
    std::uint64_t checked = 0;
    std::optional<std::pair<Word, std::string>> worst;  // least failing word

    void consider(const std::vector<Letter>& letters, const std::string& check) {
        Word w = words::reduce(letters);  // already reduced; normalizes the type
        if (!worst || w < worst->first) worst = {w, check};
    }

    // Depth-first over reduced words; matrices and witness images are built
    // incrementally along the path.
    void dfs(std::vector<Letter>& path, const Mat3I& m, const Vec3I& wv, Int cn) {
        if (path.size() >= 1) {
            ++checked;
            const Int zero(0);
            bool is_scaled_identity = m[0][1] == zero && m[0][2] == zero && m[1][0] == zero &&
                                      m[1][2] == zero && m[2][0] == zero && m[2][1] == zero &&
                                      m[0][0] == cn && m[1][1] == cn && m[2][2] == cn;
            if (is_scaled_identity) consider(path, "matrix_identity");
            if (wv == vec3_scale(witness, cn)) consider(path, "witness_fixed");
            if (wv[0] % c == 0 && wv[1] % c == 0 && wv[2] % c == 0)
                consider(path, "witness_zero_mod_c");
        }
        if (path.size() == max_len) return;
        for (Letter l : kLetters) {
            if (!path.empty() && path.back() == words::inverse(l)) continue;
            const Mat3I& g = gens[static_cast<std::size_t>(kind_of(l))].m;
            path.push_back(l);
            dfs(path, mat3_mul(m, g), mat3_apply(g, wv), cn * c);
            path.pop_back();
        }
    }
};

}  // namespace

FreenessSweep brute_force_freeness(const PythagoreanTriple& t, std::size_t max_len,
                                   const ScaledVec& witness, unsigned threads) {
    if (witness.is_zero()) throw Error("ZERO_WITNESS", "freeness witness must be nonzero");
    if (witness.base != t.c) throw Error("BASE_MISMATCH", "witness base does not match the triple");
    auto gens = make_generators(t);

    FreenessSweep rep;
    rep.triple = t;
    rep.max_len = max_len;
    rep.witness = witness;
    if (max_len == 0) {
        rep.pass = true;
        return rep;
    }

    // Split by leading letter; merge in enumeration order so the result does
    // not depend on the thread count.
    std::array<SweepState, 4> states{{{gens, witness.v, Int(t.c), max_len},
                                      {gens, witness.v, Int(t.c), max_len},
                                      {gens, witness.v, Int(t.c), max_len},
                                      {gens, witness.v, Int(t.c), max_len}}};
    auto run = [&](int i) {
        std::vector<Letter> path{kLetters[i]};
        const Mat3I& g = gens[i].m;
        states[i].dfs(path, g, mat3_apply(g, witness.v), Int(t.c));
    };
    if (threads <= 1) {
        for (int i = 0; i < 4; ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < 4; ++i) pool.emplace_back(run, i);
        for (auto& th : pool) th.join();
    }

    std::optional<std::pair<Word, std::string>> worst;
    for (const auto& s : states) {
        rep.words_checked += s.checked;
        if (s.worst && (!worst || s.worst->first < worst->first)) worst = s.worst;
    }
    if (worst) {
        rep.pass = false;
        rep.counterexample = worst->first;
        rep.failed_check = worst->second;
    } else {
        rep.pass = true;
    }
    return rep;
}

FreenessSweep brute_force_freeness(const PythagoreanTriple& t, std::size_t max_len) {
    return brute_force_freeness(t, max_len, ScaledVec::ints(0, 0, 1, 0, t.c), 1);
}

}  // namespace paradox::rot

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paradox/rotations.hpp"

namespace paradox::cert {

using rot::GenKind;
using rot::PythagoreanTriple;

using ModVec = std::array<long long, 3>;
using ModMat = std::array<std::array<long long, 3>, 3>;

// Hypotenuses beyond this bound make the Z_c^3 sweeps (c^3 vectors per map)
// too expensive for an exhaustive certificate.
inline constexpr long long kMaxCertModulus = 1000;

// Generator matrix with entries reduced mod c. The scaled diagonal entry
// collapses to 0, killing one coordinate of every image.
struct ModMap {
    GenKind kind = GenKind::SPlus;
    ModMat m{};
    long long modulus = 5;

    ModVec apply(const ModVec& v) const;
};

std::array<ModMap, 4> reduce_mod(const std::array<rot::GeneratorMap, 4>& gens,
                                 const PythagoreanTriple& t);

// k = a b^-1 with ka = -b, kb = a (mod c); mu = b a^-1 with mu a = b,
// mu b = -a (mod c). They are inverse to each other and square to -1.
struct MultiplierPair {
    long long k = 0;
    long long mu = 0;
};

MultiplierPair derived_multipliers(const PythagoreanTriple& t);

enum class SubspaceRole : std::uint8_t { Range = 0, Kernel = 1 };

std::string role_name(SubspaceRole r);

// Symbolic shape of a range or kernel: coordinate `zero_index` is pinned to 0
// (RANGE) or left free (KERNEL); the remaining coordinates (p, q), p < q,
// satisfy v[p] = ratio * v[q] mod c.
struct SymbolicForm {
    int zero_index = 0;
    long long ratio = 0;

    std::vector<ModVec> expand(SubspaceRole role, long long modulus) const;
};

struct SubspaceDesc {
    GenKind map_kind = GenKind::SPlus;
    SubspaceRole role = SubspaceRole::Range;
    SymbolicForm symbolic;
    std::vector<ModVec> elements;  // sorted lexicographically
};

// Exhaustively computes the image and null set of m over Z_c^3 and checks
// both against the symbolic forms derived from the multiplier pair.
// Disagreement means the certificate construction itself is broken.
std::pair<SubspaceDesc, SubspaceDesc> range_kernel(const ModMap& m, const MultiplierPair& pair,
                                                   long long max_modulus = kMaxCertModulus);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::optional<ModVec> witness;  // violating vector, when one exists
};

struct FreenessCertificate {
    PythagoreanTriple triple;
    long long modulus = 5;
    std::array<ModMap, 4> maps;
    std::vector<SubspaceDesc> subspaces;  // 8 entries: (range, kernel) per map
    MultiplierPair multipliers;
    ModVec witness{0, 0, 1};
    std::vector<CheckResult> checks;
    std::string verdict = "FAIL";  // "FREE" | "FAIL"
};

FreenessCertificate build_certificate(const PythagoreanTriple& t, const ModVec& witness = {0, 0, 1},
                                      long long max_modulus = kMaxCertModulus);

struct VerifyOutcome {
    std::string verdict = "FAIL";
    std::vector<CheckResult> checks;
    bool free() const { return verdict == "FREE"; }
};

// Trusts no stored field: regenerates maps and subspaces from the triple,
// compares them with the certificate, then runs the pairing, intersection
// and witness checks of the freeness argument.
VerifyOutcome verify_certificate(const FreenessCertificate& cert);

std::string certificate_to_json(const FreenessCertificate& cert, int indent = 2);
FreenessCertificate certificate_from_json(const std::string& text);

}  // namespace paradox::cert

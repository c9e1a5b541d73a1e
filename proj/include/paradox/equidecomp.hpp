#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "paradox/linalg.hpp"

namespace paradox::eq {

// Ground-set elements: non-negative integers or exact rational 3-points.
using Elem = std::variant<long long, Vec3Q>;

std::string elem_str(const Elem& e);

// Arithmetic progression over the non-negative integers; `end` is inclusive
// and gets aligned down to the progression lattice.
struct Progression {
    long long start = 0;
    long long step = 1;
    std::optional<long long> end;
};

// Finite union of arithmetic progressions in canonical form: an explicit
// finite prefix below `horizon`, plus a periodic tail given by residues mod
// `period`. The canonical form (minimal period, minimal horizon) makes
// equality structural and keeps all set algebra exact.
class IntSet {
public:
    IntSet() = default;
    static IntSet from_progressions(const std::vector<Progression>& progs);
    static IntSet singleton(long long x);
    static IntSet all_naturals();

    bool contains(long long x) const;
    bool empty() const;
    bool finite() const;
    std::optional<long long> min_elem() const;
    std::vector<long long> all() const;  // finite sets only
    std::vector<long long> window(long long lo, long long hi) const;
    std::uint64_t finite_size() const;  // finite sets only

    static IntSet intersect(const IntSet& a, const IntSet& b);
    static IntSet unite(const IntSet& a, const IntSet& b);
    static IntSet subtract(const IntSet& a, const IntSet& b);
    bool disjoint_with(const IntSet& o) const;
    bool subset_of(const IntSet& o) const;
    bool operator==(const IntSet& o) const;

    // Canonical decomposition: sorted, pairwise disjoint progressions.
    std::vector<Progression> progressions() const;

private:
    void canonicalize();
    static std::pair<IntSet, IntSet> aligned(const IntSet& a, const IntSet& b);

    long long horizon_ = 0;
    long long period_ = 1;
    std::vector<long long> prefix_;    // sorted, all < horizon_
    std::vector<long long> residues_;  // sorted, subset of [0, period_)
};

// Injective affine map x -> (p x + q) / r with positive slope; the
// user-facing form n -> u n + v is the case r = 1. Inverses and compositions
// stay in this family, with exactness checked against the blocks they act on.
struct AffineMotion {
    long long p = 1;
    long long q = 0;
    long long r = 1;

    static AffineMotion shift_scale(long long u, long long v);  // n -> u n + v, u >= 1

    std::optional<long long> try_apply(long long x) const;
    long long apply(long long x) const;  // throws on non-integral or negative image
    AffineMotion inverse() const;
    AffineMotion then(const AffineMotion& next) const;  // next after this
    Rat slope() const { return Rat(p, r); }
    bool operator==(const AffineMotion& o) const = default;

private:
    void normalize();
};

// Rigid motion x -> R x + t with exactly orthogonal R, det R = 1.
struct RigidMotion3 {
    Mat3Q rot = mat3_identity<Rat>();
    Vec3Q trans{Rat(0), Rat(0), Rat(0)};

    static RigidMotion3 make(const Mat3Q& rot, const Vec3Q& trans);  // validates SO(3)

    Vec3Q apply(const Vec3Q& x) const;
    RigidMotion3 inverse() const;
    RigidMotion3 then(const RigidMotion3& next) const;
    bool operator==(const RigidMotion3& o) const = default;
};

using Motion = std::variant<AffineMotion, RigidMotion3>;

Elem apply_motion(const Motion& m, const Elem& x);
Motion invert_motion(const Motion& m);
Motion compose_motions(const Motion& first, const Motion& next);

enum class Backend : std::uint8_t { Finite, Integer };

// A set of elements: explicit and finite, or a union of progressions.
class GroundSet {
public:
    GroundSet() : backend_(Backend::Finite) {}
    static GroundSet finite(std::vector<Elem> elems);
    static GroundSet finite_ints(const std::vector<long long>& xs);
    static GroundSet finite_points(const std::vector<Vec3Q>& ps);
    static GroundSet integer(const std::vector<Progression>& progs);
    static GroundSet integer(IntSet s);

    Backend backend() const { return backend_; }
    bool contains(const Elem& e) const;
    bool empty() const;
    std::optional<Elem> min_elem() const;
    const std::vector<Elem>& elems() const;  // Finite only
    const IntSet& ints() const;              // Integer only

    static GroundSet intersect(const GroundSet& a, const GroundSet& b);
    static GroundSet unite(const GroundSet& a, const GroundSet& b);
    static GroundSet subtract(const GroundSet& a, const GroundSet& b);
    bool disjoint_with(const GroundSet& o) const;
    bool subset_of(const GroundSet& o) const;
    bool operator==(const GroundSet& o) const;

    // Elements of [lo, hi] for Integer sets, everything for Finite sets.
    std::vector<Elem> sample_window(long long lo, long long hi) const;

private:
    Backend backend_;
    std::vector<Elem> finite_;
    IntSet ints_;
};

struct PlainPiece {
    GroundSet block;
    Motion motion;
};

// Ancestor-parity classes for the Banach-Schroder-Bernstein combination.
enum class AncClass : std::uint8_t { Even = 1, Odd = 2, Infinite = 4 };

struct ChainSystem;  // captured (f, g) piece tables; defined in the .cpp

// A block is a ground set, optionally filtered by ancestor-parity classes.
// Filtered blocks only appear in maps produced by bsb_combine on the Integer
// backend, where the parity classes need not be progression unions.
struct Block {
    GroundSet base;
    std::uint8_t class_mask = 0;  // OR of AncClass bits; 0 = plain block
    std::shared_ptr<const ChainSystem> chain;

    bool plain() const { return class_mask == 0; }
    bool contains(const Elem& e) const;
};

struct Piece {
    Block block;
    Motion motion;
};

// A bijection defined piecewise by injective motions: blocks partition the
// domain and their images are pairwise disjoint. Validation is exhaustive on
// Finite sets and exact progression arithmetic on Integer sets.
class PiecewiseMap {
public:
    // Throws Error with codes OVERLAPPING_BLOCKS, OVERLAPPING_IMAGES,
    // UNCOVERED_DOMAIN, BLOCK_OUTSIDE_DOMAIN, each carrying a witness element
    // in the message. Empty blocks are dropped.
    static PiecewiseMap make(GroundSet domain, std::vector<PlainPiece> pieces);

    const GroundSet& domain() const { return domain_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    bool plain() const;

    std::optional<Elem> try_apply(const Elem& x) const;
    Elem apply(const Elem& x) const;
    GroundSet image() const;  // plain maps only

    std::size_t piece_count() const { return pieces_.size(); }

private:
    PiecewiseMap() = default;
    friend PiecewiseMap bsb_combine(const PiecewiseMap& f, const PiecewiseMap& g);

    GroundSet domain_;
    std::vector<Piece> pieces_;
};

PiecewiseMap invert_piecewise(const PiecewiseMap& pm);
PiecewiseMap compose_piecewise(const PiecewiseMap& pm1, const PiecewiseMap& pm2);
PiecewiseMap restrict_piecewise(const PiecewiseMap& pm, const GroundSet& subset);

// Exact pointwise (semantic) equality of two plain maps over equal domains.
bool pointwise_equal(const PiecewiseMap& x, const PiecewiseMap& y);

// Scaling conjugation g'(x) = k g(x / k) on the rational-point backend.
PiecewiseMap scale_conjugate(const PiecewiseMap& pm, const Rat& k);

struct ParadoxWitness {
    GroundSet set;
    PiecewiseMap map1;
    PiecewiseMap map2;
};

struct ParadoxCheck {
    bool relaxed = false;  // images disjoint and inside the set
    bool strict = false;   // relaxed, and the images partition the set
    std::optional<Elem> witness;
};

ParadoxCheck check_paradoxical(const ParadoxWitness& w);

// Moves a paradox witness across an equidecomposability pm_ab : A -> B by
// conjugation, restricting to the transported images.
ParadoxWitness transfer_paradox(const PiecewiseMap& pm_ab, const ParadoxWitness& w);

// Combines injections f : A -> B' <= B and g : B -> A' <= A into a bijection
// h : A -> B via ancestor parity: h = f on the even/infinite classes and
// g^-1 on the odd class. On the Integer backend every piece of f and g must
// move elements strictly up or have slope >= 2, which forces ancestor chains
// to terminate (error NONTERMINATING_ANCESTRY otherwise).
PiecewiseMap bsb_combine(const PiecewiseMap& f, const PiecewiseMap& g);

// Ancestor-chain classification of an element of A, exposed for inspection.
AncClass classify_ancestry(const PiecewiseMap& f, const PiecewiseMap& g, const Elem& a);

// --- JSON instance formats (CLI `bsb` and `compose`) ---

struct BsbInstance {
    PiecewiseMap f;
    PiecewiseMap g;
};

struct ComposeInstance {
    PiecewiseMap first;
    PiecewiseMap second;
};

BsbInstance parse_bsb_instance(const std::string& json_text);
ComposeInstance parse_compose_instance(const std::string& json_text);
nlohmann::ordered_json piecewise_to_json(const PiecewiseMap& pm);
nlohmann::ordered_json ground_set_to_json(const GroundSet& s);

}  // namespace paradox::eq

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "paradox/equidecomp.hpp"
#include "paradox/error.hpp"

using namespace paradox;
using namespace paradox::eq;

namespace {

GroundSet naturals() { return GroundSet::integer({Progression{0, 1, std::nullopt}}); }

PiecewiseMap one_piece_nat(long long u, long long v) {
    return PiecewiseMap::make(naturals(), {{naturals(), AffineMotion::shift_scale(u, v)}});
}

GroundSet range_set(long long lo, long long hi) {
    return GroundSet::integer({Progression{lo, 1, hi}});
}

long long apply_ll(const PiecewiseMap& pm, long long x) {
    return std::get<long long>(pm.apply(Elem{x}));
}

// Independent ancestor-chain oracle over plain closures; walks the parent
// chain by alternating partial inverses and counts its length.
int chain_length(long long a, const std::function<std::optional<long long>(long long)>& g_inv,
                 const std::function<std::optional<long long>(long long)>& f_inv) {
    int count = 0;
    bool side_a = true;
    long long cur = a;
    while (true) {
        auto parent = side_a ? g_inv(cur) : f_inv(cur);
        if (!parent) return count;
        cur = *parent;
        side_a = !side_a;
        ++count;
        if (count > 100000) return -1;  // treated as infinite
    }
}

GroundSet finite_range(long long lo, long long hi) {
    std::vector<long long> xs;
    for (long long x = lo; x <= hi; ++x) xs.push_back(x);
    return GroundSet::finite_ints(xs);
}

// Random bijection of the finite set {0..n-1} built from shuffled intervals
// moved by translations.
PiecewiseMap random_interval_bijection(std::mt19937& rng, int n) {
    std::vector<long long> cuts{0, static_cast<long long>(n)};
    std::uniform_int_distribution<long long> pick(1, n - 1);
    int extra = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int i = 0; i < extra; ++i) cuts.push_back(pick(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    struct Interval {
        long long lo, hi;  // [lo, hi)
    };
    std::vector<Interval> intervals;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) intervals.push_back({cuts[i], cuts[i + 1]});
    std::vector<std::size_t> order(intervals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<PlainPiece> pieces;
    long long cursor = 0;
    for (std::size_t idx : order) {
        const auto& iv = intervals[idx];
        pieces.push_back(
            {finite_range(iv.lo, iv.hi - 1), AffineMotion::shift_scale(1, cursor - iv.lo)});
        cursor += iv.hi - iv.lo;
    }
    return PiecewiseMap::make(finite_range(0, n - 1), std::move(pieces));
}

}  // namespace

TEST_CASE("IntSet canonical forms and algebra") {
    IntSet nat = IntSet::all_naturals();
    CHECK(nat.contains(0));
    CHECK(nat.contains(123456));
    CHECK_FALSE(nat.finite());

    IntSet evens = IntSet::from_progressions({{0, 2, std::nullopt}});
    IntSet odds = IntSet::from_progressions({{1, 2, std::nullopt}});
    CHECK(IntSet::unite(evens, odds) == nat);
    CHECK(evens.disjoint_with(odds));
    CHECK(IntSet::subtract(nat, evens) == odds);
    CHECK(evens.subset_of(nat));

    // same set through different presentations collapses to one form
    IntSet evens2 = IntSet::from_progressions({{0, 4, std::nullopt}, {2, 4, std::nullopt}});
    CHECK(evens2 == evens);
    IntSet nat2 = IntSet::from_progressions({{0, 1, 9}, {10, 1, std::nullopt}});
    CHECK(nat2 == nat);

    IntSet fin = IntSet::from_progressions({{3, 3, 12}});
    CHECK(fin.all() == std::vector<long long>{3, 6, 9, 12});
    CHECK(fin.finite_size() == 4);
    CHECK(*fin.min_elem() == 3);
    CHECK(IntSet::intersect(fin, evens).all() == std::vector<long long>{6, 12});
}

TEST_CASE("affine motions compose, invert, and respect exactness") {
    AffineMotion up = AffineMotion::shift_scale(1, 7);
    CHECK(up.apply(5) == 12);
    CHECK(up.inverse().apply(12) == 5);
    CHECK_FALSE(up.inverse().try_apply(3).has_value());  // would be negative

    AffineMotion dbl = AffineMotion::shift_scale(2, 1);
    AffineMotion both = up.then(dbl);  // 2(x+7)+1
    CHECK(both.apply(3) == 21);
    CHECK(both.inverse().apply(21) == 3);
    CHECK_FALSE(dbl.inverse().try_apply(4).has_value());  // 4 is not odd
}

TEST_CASE("make_piecewise: spec examples") {
    GroundSet dom = range_set(0, 3);

    PiecewiseMap identity =
        PiecewiseMap::make(dom, {{dom, AffineMotion::shift_scale(1, 0)}});
    CHECK(apply_ll(identity, 2) == 2);

    PiecewiseMap shift = PiecewiseMap::make(
        dom, {{range_set(0, 1), AffineMotion::shift_scale(1, 4)},
              {range_set(2, 3), AffineMotion::shift_scale(1, 0)}});
    CHECK(shift.image() == range_set(2, 5));
    CHECK(apply_ll(shift, 0) == 4);
    CHECK(apply_ll(shift, 3) == 3);

    CHECK_THROWS_WITH_AS(
        PiecewiseMap::make(dom, {{range_set(0, 1), AffineMotion::shift_scale(1, 2)},
                                 {range_set(2, 3), AffineMotion::shift_scale(1, 0)}}),
        doctest::Contains("OVERLAPPING_IMAGES"), Error);
    CHECK_THROWS_WITH_AS(
        PiecewiseMap::make(dom, {{range_set(0, 2), AffineMotion::shift_scale(1, 4)},
                                 {range_set(2, 3), AffineMotion::shift_scale(1, 10)}}),
        doctest::Contains("OVERLAPPING_BLOCKS"), Error);
    CHECK_THROWS_WITH_AS(
        PiecewiseMap::make(dom, {{range_set(0, 1), AffineMotion::shift_scale(1, 4)}}),
        doctest::Contains("UNCOVERED_DOMAIN"), Error);
}

TEST_CASE("invert_piecewise") {
    GroundSet dom = range_set(0, 3);
    PiecewiseMap identity = PiecewiseMap::make(dom, {{dom, AffineMotion::shift_scale(1, 0)}});
    CHECK(pointwise_equal(invert_piecewise(identity), identity));

    PiecewiseMap shift = PiecewiseMap::make(
        dom, {{range_set(0, 1), AffineMotion::shift_scale(1, 4)},
              {range_set(2, 3), AffineMotion::shift_scale(1, 0)}});
    PiecewiseMap inv = invert_piecewise(shift);
    CHECK(inv.domain() == range_set(2, 5));
    CHECK(apply_ll(inv, 4) == 0);
    CHECK(apply_ll(inv, 2) == 2);

    PiecewiseMap back = invert_piecewise(inv);
    CHECK(back.domain() == dom);
    CHECK(pointwise_equal(back, shift));
}

TEST_CASE("compose_piecewise: identity, piece bound, associativity") {
    GroundSet dom = range_set(0, 3);
    PiecewiseMap shift = PiecewiseMap::make(
        dom, {{range_set(0, 1), AffineMotion::shift_scale(1, 4)},
              {range_set(2, 3), AffineMotion::shift_scale(1, 0)}});
    PiecewiseMap identity_on_image = PiecewiseMap::make(
        shift.image(), {{shift.image(), AffineMotion::shift_scale(1, 0)}});
    CHECK(pointwise_equal(compose_piecewise(shift, identity_on_image), shift));

    // 2-piece after 2-piece stays within 4 pieces and agrees pointwise
    PiecewiseMap second = PiecewiseMap::make(
        shift.image(), {{range_set(2, 3), AffineMotion::shift_scale(1, 6)},
                        {range_set(4, 5), AffineMotion::shift_scale(1, 0)}});
    PiecewiseMap chained = compose_piecewise(shift, second);
    CHECK(chained.piece_count() <= 4);
    for (long long x = 0; x <= 3; ++x)
        CHECK(apply_ll(chained, x) == apply_ll(second, apply_ll(shift, x)));

    PiecewiseMap third = PiecewiseMap::make(
        second.image(), {{second.image(), AffineMotion::shift_scale(1, 1)}});
    PiecewiseMap left = compose_piecewise(compose_piecewise(shift, second), third);
    PiecewiseMap right = compose_piecewise(shift, compose_piecewise(second, third));
    CHECK(pointwise_equal(left, right));

    CHECK_THROWS_WITH_AS(compose_piecewise(shift, shift), doctest::Contains("DOMAIN_MISMATCH"),
                         Error);
}

TEST_CASE("compose_piecewise refines blocks through slope-2 congruences") {
    GroundSet nat = naturals();
    GroundSet evens = GroundSet::integer({Progression{0, 2, std::nullopt}});
    GroundSet mod4_0 = GroundSet::integer({Progression{0, 4, std::nullopt}});
    GroundSet mod4_2 = GroundSet::integer({Progression{2, 4, std::nullopt}});

    PiecewiseMap to_evens = PiecewiseMap::make(nat, {{nat, AffineMotion::shift_scale(2, 0)}});
    // swap the two residue classes of the evens
    PiecewiseMap swap = PiecewiseMap::make(
        evens, {{mod4_0, AffineMotion::shift_scale(1, 2)},
                {mod4_2, AffineMotion::shift_scale(1, -2)}});
    PiecewiseMap chained = compose_piecewise(to_evens, swap);
    CHECK(chained.piece_count() == 2);
    for (long long x = 0; x <= 100; ++x)
        CHECK(apply_ll(chained, x) == (x % 2 == 0 ? 2 * x + 2 : 2 * x - 2));

    // halving with exact divisibility: (x)/2 on the evens
    PiecewiseMap halve = PiecewiseMap::make(evens, {{evens, AffineMotion{1, 0, 2}}});
    PiecewiseMap round_trip = compose_piecewise(to_evens, halve);
    PiecewiseMap identity = PiecewiseMap::make(nat, {{nat, AffineMotion::shift_scale(1, 0)}});
    CHECK(pointwise_equal(round_trip, identity));
}

TEST_CASE("restrict_piecewise") {
    GroundSet dom = range_set(0, 3);
    PiecewiseMap shift = PiecewiseMap::make(
        dom, {{range_set(0, 1), AffineMotion::shift_scale(1, 4)},
              {range_set(2, 3), AffineMotion::shift_scale(1, 0)}});

    CHECK(pointwise_equal(restrict_piecewise(shift, dom), shift));

    GroundSet sub = GroundSet::integer({Progression{0, 2, 2}});  // {0, 2}
    PiecewiseMap restricted = restrict_piecewise(shift, sub);
    CHECK(restricted.piece_count() == 2);
    CHECK(apply_ll(restricted, 0) == 4);
    CHECK(apply_ll(restricted, 2) == 2);
    CHECK(restricted.image() == GroundSet::integer({Progression{2, 2, 4}}));

    PiecewiseMap empty = restrict_piecewise(shift, GroundSet::integer(IntSet{}));
    CHECK(empty.piece_count() == 0);
    CHECK(empty.domain().empty());

    CHECK_THROWS_WITH_AS(restrict_piecewise(shift, range_set(0, 9)),
                         doctest::Contains("NOT_A_SUBSET"), Error);
}

TEST_CASE("bsb_combine: both successor maps transpose neighbours") {
    PiecewiseMap f = one_piece_nat(1, 1), g = one_piece_nat(1, 1);
    PiecewiseMap h = bsb_combine(f, g);
    for (long long x = 0; x <= 200; ++x)
        CHECK(apply_ll(h, x) == (x % 2 == 0 ? x + 1 : x - 1));

    // chain length of a equals a
    auto succ_inv = [](long long x) -> std::optional<long long> {
        if (x >= 1) return x - 1;
        return std::nullopt;
    };
    for (long long a : {0, 1, 5, 64}) CHECK(chain_length(a, succ_inv, succ_inv) == a);
}

TEST_CASE("bsb_combine: doubling maps follow the ancestor-parity oracle") {
    PiecewiseMap f = one_piece_nat(2, 0), g = one_piece_nat(2, 1);
    PiecewiseMap h = bsb_combine(f, g);

    CHECK(apply_ll(h, 0) == 0);
    CHECK(apply_ll(h, 1) == 2);
    CHECK(apply_ll(h, 3) == 1);

    auto g_inv = [](long long x) -> std::optional<long long> {
        if (x % 2 == 1) return (x - 1) / 2;
        return std::nullopt;
    };
    auto f_inv = [](long long x) -> std::optional<long long> {
        if (x % 2 == 0) return x / 2;
        return std::nullopt;
    };
    std::set<long long> images;
    for (long long a = 0; a <= 500; ++a) {
        int len = chain_length(a, g_inv, f_inv);
        long long expected = len % 2 == 0 ? 2 * a : (a - 1) / 2;
        CHECK(apply_ll(h, a) == expected);
        CHECK(images.insert(apply_ll(h, a)).second);  // injective on the window
    }

    // ancestor classes partition the window
    for (long long a = 0; a <= 200; ++a) {
        AncClass cls = classify_ancestry(f, g, Elem{a});
        int len = chain_length(a, g_inv, f_inv);
        CHECK(cls == (len % 2 == 0 ? AncClass::Even : AncClass::Odd));
    }
}

TEST_CASE("bsb_combine: finite bijections make every chain cycle") {
    std::mt19937 rng(41);
    PiecewiseMap f = random_interval_bijection(rng, 8);
    PiecewiseMap g = random_interval_bijection(rng, 8);
    PiecewiseMap h = bsb_combine(f, g);
    for (long long x = 0; x <= 7; ++x) {
        CHECK(classify_ancestry(f, g, Elem{x}) == AncClass::Infinite);
        CHECK(apply_ll(h, x) == apply_ll(f, x));
    }
}

TEST_CASE("bsb_combine: random finite instances give bijections") {
    std::mt19937 rng(43);
    for (int round = 0; round < 60; ++round) {
        int n = std::uniform_int_distribution<int>(2, 40)(rng);
        PiecewiseMap f = random_interval_bijection(rng, n);
        PiecewiseMap g = random_interval_bijection(rng, n);
        PiecewiseMap h = bsb_combine(f, g);
        std::set<long long> values;
        for (long long x = 0; x < n; ++x) CHECK(values.insert(apply_ll(h, x)).second);
        CHECK(values.size() == static_cast<std::size_t>(n));
        CHECK(*values.begin() == 0);
        CHECK(*values.rbegin() == n - 1);

        PiecewiseMap round_trip = compose_piecewise(h, g);
        CHECK(round_trip.piece_count() <= h.piece_count() * g.piece_count());
    }
}

TEST_CASE("bsb_combine rejects non-terminating ancestry") {
    // n -> n with slope 1 never strictly increases.
    PiecewiseMap f = one_piece_nat(1, 0), g = one_piece_nat(1, 1);
    CHECK_THROWS_WITH_AS(bsb_combine(f, g), doctest::Contains("NONTERMINATING_ANCESTRY"), Error);
}

TEST_CASE("check_paradoxical") {
    GroundSet nat = naturals();
    PiecewiseMap doubling = one_piece_nat(2, 0);
    PiecewiseMap doubling_shift = one_piece_nat(2, 1);
    ParadoxCheck both = check_paradoxical({nat, doubling, doubling_shift});
    CHECK(both.relaxed);
    CHECK(both.strict);

    // overlapping images
    ParadoxCheck overlapping = check_paradoxical({nat, one_piece_nat(1, 0), doubling});
    CHECK_FALSE(overlapping.relaxed);
    REQUIRE(overlapping.witness.has_value());

    // disjoint images that miss part of the set
    ParadoxCheck gap = check_paradoxical({nat, one_piece_nat(3, 0), one_piece_nat(3, 1)});
    CHECK(gap.relaxed);
    CHECK_FALSE(gap.strict);
    CHECK(std::get<long long>(*gap.witness) == 2);
}

TEST_CASE("transfer_paradox") {
    GroundSet nat = naturals();
    ParadoxWitness w{nat, one_piece_nat(2, 0), one_piece_nat(2, 1)};

    PiecewiseMap identity = one_piece_nat(1, 0);
    ParadoxWitness same = transfer_paradox(identity, w);
    CHECK(pointwise_equal(same.map1, w.map1));
    CHECK(pointwise_equal(same.map2, w.map2));

    // A = naturals shifted by +7, pm : A -> B, n -> n - 7
    GroundSet shifted = GroundSet::integer({Progression{7, 1, std::nullopt}});
    PiecewiseMap down = PiecewiseMap::make(shifted, {{shifted, AffineMotion::shift_scale(1, -7)}});
    ParadoxWitness moved = transfer_paradox(down, w);
    CHECK(moved.set == shifted);
    auto chk = check_paradoxical(moved);
    CHECK(chk.relaxed);
    for (long long x = 7; x < 207; ++x) {
        CHECK(std::get<long long>(moved.map1.apply(Elem{x})) == 2 * (x - 7) + 7);
        CHECK(std::get<long long>(moved.map2.apply(Elem{x})) == 2 * (x - 7) + 1 + 7);
    }
}

TEST_CASE("scale_conjugate") {
    Vec3Q p0{Rat(0), Rat(0), Rat(0)}, p1{Rat(1, 2), Rat(0), Rat(0)};
    GroundSet dom = GroundSet::finite_points({p0, p1});
    RigidMotion3 translate = RigidMotion3::make(mat3_identity<Rat>(), {Rat(3), Rat(1), Rat(0)});
    PiecewiseMap pm = PiecewiseMap::make(dom, {{dom, translate}});

    PiecewiseMap same = scale_conjugate(pm, Rat(1));
    CHECK(pointwise_equal(same, pm));

    PiecewiseMap doubled = scale_conjugate(pm, Rat(2));
    const auto& motion = std::get<RigidMotion3>(doubled.pieces().front().motion);
    CHECK(motion.trans == Vec3Q{Rat(6), Rat(2), Rat(0)});
    CHECK(motion.rot == mat3_identity<Rat>());
    // g'(k x) = k g(x) pointwise
    for (const auto& x : dom.elems()) {
        Vec3Q scaled_in = vec3_scale(std::get<Vec3Q>(x), Rat(2));
        Vec3Q lhs = std::get<Vec3Q>(doubled.apply(Elem{scaled_in}));
        Vec3Q rhs = vec3_scale(std::get<Vec3Q>(pm.apply(x)), Rat(2));
        CHECK(lhs == rhs);
    }

    CHECK_THROWS_WITH_AS(scale_conjugate(pm, Rat(0)), doctest::Contains("BAD_SCALE"), Error);
    CHECK_THROWS_WITH_AS(scale_conjugate(one_piece_nat(1, 0), Rat(2)),
                         doctest::Contains("INTEGER_BACKEND"), Error);
}

TEST_CASE("instance JSON round trip") {
    std::string text = R"({
      "backend": "integer",
      "A": [{"start": 0, "step": 1}],
      "B": [{"start": 0, "step": 1}],
      "f": [{"block": [{"start": 0, "step": 1}], "map": {"u": 2, "v": 0}}],
      "g": [{"block": [{"start": 0, "step": 1}], "map": {"u": 2, "v": 1}}]
    })";
    BsbInstance inst = parse_bsb_instance(text);
    PiecewiseMap h = bsb_combine(inst.f, inst.g);
    CHECK(apply_ll(h, 3) == 1);
    auto j = piecewise_to_json(h);
    CHECK(j.contains("pieces"));
    CHECK(j["pieces"].size() == h.piece_count());

    std::string finite_text = R"({
      "backend": "finite",
      "A": [0, 1, 2, 3],
      "B": [2, 3, 4, 5],
      "f": [{"block": [0, 1], "map": {"u": 1, "v": 4}},
            {"block": [2, 3], "map": {"u": 1, "v": 0}}],
      "g": [{"block": [2, 3, 4, 5], "map": {"u": 1, "v": -2}}]
    })";
    ComposeInstance comp = parse_compose_instance(finite_text);
    CHECK(comp.first.image() == comp.second.domain());
    PiecewiseMap chained = compose_piecewise(comp.first, comp.second);
    CHECK(apply_ll(chained, 0) == 2);
}

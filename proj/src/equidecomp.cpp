#include "paradox/equidecomp.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "paradox/error.hpp"

namespace paradox::eq {

namespace {

constexpr long long kMaxExplicit = 2'000'000;  // prefix/finite-set size guard
constexpr long long kMaxPeriod = 1'000'000;    // lcm guard for progression tails
constexpr long long kBsbWindow = 1024;         // construction-time sanity window

long long safe_mod(long long x, long long m) {
    long long r = x % m;
    return r < 0 ? r + m : r;
}

// Minimal k >= 0 with k * a == b (mod m), if any.
std::optional<long long> solve_congruence(long long a, long long b, long long m) {
    a = safe_mod(a, m);
    b = safe_mod(b, m);
    long long g = std::gcd(a, m);
    if (g == 0) return b == 0 ? std::optional<long long>(0) : std::nullopt;
    if (b % g != 0) return std::nullopt;
    long long m2 = m / g, a2 = (a / g) % m2, b2 = (b / g) % m2;
    // inverse of a2 mod m2 by extended Euclid
    long long r0 = m2, r1 = a2, s0 = 0, s1 = 1;
    while (r1 != 0) {
        long long q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
    }
    if (m2 == 1) return 0;
    return safe_mod(s0 * b2, m2);
}

std::vector<long long> sorted_unique(std::vector<long long> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool contains_sorted(const std::vector<long long>& v, long long x) {
    return std::binary_search(v.begin(), v.end(), x);
}

std::vector<long long> vec_intersect(const std::vector<long long>& a,
                                     const std::vector<long long>& b) {
    std::vector<long long> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<long long> vec_unite(const std::vector<long long>& a,
                                 const std::vector<long long>& b) {
    std::vector<long long> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<long long> vec_subtract(const std::vector<long long>& a,
                                    const std::vector<long long>& b) {
    std::vector<long long> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::string elem_str(const Elem& e) {
    if (std::holds_alternative<long long>(e)) return std::to_string(std::get<long long>(e));
    const Vec3Q& p = std::get<Vec3Q>(e);
    std::ostringstream os;
    os << "(" << p[0] << "," << p[1] << "," << p[2] << ")";
    return os.str();
}

// ---------------------------------------------------------------- IntSet --

IntSet IntSet::from_progressions(const std::vector<Progression>& progs) {
    IntSet s;
    std::vector<std::pair<long long, long long>> infinite;  // (start, step)
    std::vector<long long> finite_elems;
    long long horizon = 0, period = 1;
    for (const auto& pr : progs) {
        if (pr.start < 0 || pr.step < 1)
            throw Error("BAD_PROGRESSION", "progression needs start >= 0 and step >= 1");
        if (pr.end) {
            if (*pr.end < pr.start) continue;  // empty
            long long aligned = pr.start + ((*pr.end - pr.start) / pr.step) * pr.step;
            long long count = (aligned - pr.start) / pr.step + 1;
            if (static_cast<long long>(finite_elems.size()) + count > kMaxExplicit)
                throw Error("SET_TOO_COMPLEX", "finite progression content exceeds the guard");
            for (long long x = pr.start; x <= aligned; x += pr.step) finite_elems.push_back(x);
            horizon = std::max(horizon, aligned + 1);
        } else {
            infinite.emplace_back(pr.start, pr.step);
            period = std::lcm(period, pr.step);
            if (period > kMaxPeriod)
                throw Error("SET_TOO_COMPLEX", "progression steps exceed the lcm guard");
            horizon = std::max(horizon, pr.start);
        }
    }
    std::vector<long long> residues;
    for (long long r = 0; r < period && !infinite.empty(); ++r)
        for (const auto& [st, d] : infinite)
            if (safe_mod(r - st, d) == 0) {
                residues.push_back(r);
                break;
            }
    for (const auto& [st, d] : infinite)
        for (long long x = st; x < horizon; x += d) {
            finite_elems.push_back(x);
            if (static_cast<long long>(finite_elems.size()) > kMaxExplicit)
                throw Error("SET_TOO_COMPLEX", "progression prefix exceeds the guard");
        }
    s.horizon_ = horizon;
    s.period_ = period;
    s.prefix_ = sorted_unique(std::move(finite_elems));
    s.residues_ = sorted_unique(std::move(residues));
    s.canonicalize();
    return s;
}

IntSet IntSet::singleton(long long x) {
    return from_progressions({Progression{x, 1, x}});
}

IntSet IntSet::all_naturals() { return from_progressions({Progression{0, 1, std::nullopt}}); }

void IntSet::canonicalize() {
    if (residues_.empty()) {
        period_ = 1;
    } else {
        for (long long d = 1; d <= period_; ++d) {
            if (period_ % d != 0) continue;
            std::vector<long long> folded;
            folded.reserve(residues_.size());
            for (long long r : residues_) folded.push_back(r % d);
            folded = sorted_unique(std::move(folded));
            if (static_cast<long long>(folded.size()) * (period_ / d) !=
                static_cast<long long>(residues_.size()))
                continue;
            std::vector<long long> expanded;
            expanded.reserve(residues_.size());
            for (long long k = 0; k < period_ / d; ++k)
                for (long long r : folded) expanded.push_back(r + k * d);
            if (sorted_unique(std::move(expanded)) == residues_) {
                period_ = d;
                residues_ = std::move(folded);
                break;
            }
        }
    }
    while (horizon_ > 0) {
        long long x = horizon_ - 1;
        bool in_prefix = !prefix_.empty() && prefix_.back() == x;
        bool tail_says = !residues_.empty() && contains_sorted(residues_, x % period_);
        if (in_prefix != tail_says) break;
        horizon_ = x;
        if (in_prefix) prefix_.pop_back();
    }
}

bool IntSet::contains(long long x) const {
    if (x < 0) return false;
    if (x < horizon_) return contains_sorted(prefix_, x);
    return !residues_.empty() && contains_sorted(residues_, x % period_);
}

bool IntSet::empty() const { return prefix_.empty() && residues_.empty(); }

bool IntSet::finite() const { return residues_.empty(); }

std::optional<long long> IntSet::min_elem() const {
    if (!prefix_.empty()) return prefix_.front();
    if (residues_.empty()) return std::nullopt;
    long long best = -1;
    for (long long r : residues_) {
        long long first = horizon_ + safe_mod(r - horizon_, period_);
        if (best < 0 || first < best) best = first;
    }
    return best;
}

std::vector<long long> IntSet::all() const {
    if (!finite()) throw Error("INFINITE_SET", "cannot enumerate an infinite set");
    return prefix_;
}

std::uint64_t IntSet::finite_size() const {
    if (!finite()) throw Error("INFINITE_SET", "cannot size an infinite set");
    return prefix_.size();
}

std::vector<long long> IntSet::window(long long lo, long long hi) const {
    std::vector<long long> out;
    for (long long x = std::max(lo, 0LL); x <= hi; ++x)
        if (contains(x)) out.push_back(x);
    return out;
}

std::pair<IntSet, IntSet> IntSet::aligned(const IntSet& a, const IntSet& b) {
    long long period = std::lcm(a.period_, b.period_);
    if (period > kMaxPeriod) throw Error("SET_TOO_COMPLEX", "aligned period exceeds the guard");
    long long horizon = std::max(a.horizon_, b.horizon_);
    if (horizon - std::min(a.horizon_, b.horizon_) > kMaxExplicit)
        throw Error("SET_TOO_COMPLEX", "aligned horizon exceeds the guard");
    auto expand = [&](const IntSet& s) {
        IntSet e;
        e.horizon_ = horizon;
        e.period_ = period;
        e.prefix_ = s.prefix_;
        for (long long x = s.horizon_; x < horizon; ++x)
            if (!s.residues_.empty() && contains_sorted(s.residues_, x % s.period_))
                e.prefix_.push_back(x);
        e.prefix_ = sorted_unique(std::move(e.prefix_));
        for (long long r = 0; r < period && !s.residues_.empty(); ++r)
            if (contains_sorted(s.residues_, r % s.period_)) e.residues_.push_back(r);
        return e;
    };
    return {expand(a), expand(b)};
}

IntSet IntSet::intersect(const IntSet& a, const IntSet& b) {
    auto [x, y] = aligned(a, b);
    IntSet out;
    out.horizon_ = x.horizon_;
    out.period_ = x.period_;
    out.prefix_ = vec_intersect(x.prefix_, y.prefix_);
    out.residues_ = vec_intersect(x.residues_, y.residues_);
    out.canonicalize();
    return out;
}

IntSet IntSet::unite(const IntSet& a, const IntSet& b) {
    auto [x, y] = aligned(a, b);
    IntSet out;
    out.horizon_ = x.horizon_;
    out.period_ = x.period_;
    out.prefix_ = vec_unite(x.prefix_, y.prefix_);
    out.residues_ = vec_unite(x.residues_, y.residues_);
    out.canonicalize();
    return out;
}

IntSet IntSet::subtract(const IntSet& a, const IntSet& b) {
    auto [x, y] = aligned(a, b);
    IntSet out;
    out.horizon_ = x.horizon_;
    out.period_ = x.period_;
    out.prefix_ = vec_subtract(x.prefix_, y.prefix_);
    // A periodic residue survives only if the subtrahend never hits it; when
    // it does, the leftover is no longer periodic unless it is empty.
    std::vector<long long> kept;
    for (long long r : x.residues_)
        if (!contains_sorted(y.residues_, r)) kept.push_back(r);
    out.residues_ = kept;
    out.canonicalize();
    return out;
}

bool IntSet::disjoint_with(const IntSet& o) const { return intersect(*this, o).empty(); }

bool IntSet::subset_of(const IntSet& o) const { return subtract(*this, o).empty(); }

bool IntSet::operator==(const IntSet& o) const {
    return horizon_ == o.horizon_ && period_ == o.period_ && prefix_ == o.prefix_ &&
           residues_ == o.residues_;
}

std::vector<Progression> IntSet::progressions() const {
    std::vector<Progression> out;
    std::size_t i = 0;
    while (i < prefix_.size()) {
        if (i + 1 == prefix_.size()) {
            out.push_back({prefix_[i], 1, prefix_[i]});
            break;
        }
        long long gap = prefix_[i + 1] - prefix_[i];
        std::size_t j = i + 1;
        while (j + 1 < prefix_.size() && prefix_[j + 1] - prefix_[j] == gap) ++j;
        out.push_back({prefix_[i], gap, prefix_[j]});
        i = j + 1;
    }
    for (long long r : residues_) {
        long long first = horizon_ + safe_mod(r - horizon_, period_);
        out.push_back({first, period_, std::nullopt});
    }
    std::sort(out.begin(), out.end(), [](const Progression& a, const Progression& b) {
        return std::tie(a.start, a.step) < std::tie(b.start, b.step);
    });
    return out;
}

// ---------------------------------------------------------------- motions --

AffineMotion AffineMotion::shift_scale(long long u, long long v) {
    if (u < 1) throw Error("BAD_MOTION", "integer motion needs slope u >= 1");
    AffineMotion m{u, v, 1};
    return m;
}

void AffineMotion::normalize() {
    long long g = std::gcd(std::gcd(p, r), std::abs(q));
    if (g > 1) {
        p /= g;
        q /= g;
        r /= g;
    }
}

std::optional<long long> AffineMotion::try_apply(long long x) const {
    long long num = p * x + q;
    if (num < 0 || num % r != 0) return std::nullopt;
    return num / r;
}

long long AffineMotion::apply(long long x) const {
    auto y = try_apply(x);
    if (!y)
        throw Error("INVALID_MOTION_ON_BLOCK",
                    "motion (" + std::to_string(p) + "x+" + std::to_string(q) + ")/" +
                        std::to_string(r) + " leaves the naturals at x = " + std::to_string(x));
    return *y;
}

AffineMotion AffineMotion::inverse() const {
    AffineMotion m{r, -q, p};
    m.normalize();
    return m;
}

AffineMotion AffineMotion::then(const AffineMotion& next) const {
    // next((p x + q)/r) = (next.p p x + next.p q + next.q r) / (r next.r)
    AffineMotion m{next.p * p, next.p * q + next.q * r, r * next.r};
    m.normalize();
    return m;
}

RigidMotion3 RigidMotion3::make(const Mat3Q& rot, const Vec3Q& trans) {
    if (!is_special_orthogonal(rot))
        throw Error("BAD_MOTION", "rigid motion needs an exactly special-orthogonal rotation");
    return RigidMotion3{rot, trans};
}

Vec3Q RigidMotion3::apply(const Vec3Q& x) const { return vec3_add(mat3_apply(rot, x), trans); }

RigidMotion3 RigidMotion3::inverse() const {
    Mat3Q rt = mat3_transpose(rot);
    return RigidMotion3{rt, vec3_scale(mat3_apply(rt, trans), Rat(-1))};
}

RigidMotion3 RigidMotion3::then(const RigidMotion3& next) const {
    return RigidMotion3{mat3_mul(next.rot, rot), vec3_add(mat3_apply(next.rot, trans), next.trans)};
}

Elem apply_motion(const Motion& m, const Elem& x) {
    if (std::holds_alternative<AffineMotion>(m)) {
        if (!std::holds_alternative<long long>(x))
            throw Error("TYPE_MISMATCH", "affine motion applied to a point element");
        return std::get<AffineMotion>(m).apply(std::get<long long>(x));
    }
    if (!std::holds_alternative<Vec3Q>(x))
        throw Error("TYPE_MISMATCH", "rigid motion applied to an integer element");
    return std::get<RigidMotion3>(m).apply(std::get<Vec3Q>(x));
}

Motion invert_motion(const Motion& m) {
    if (std::holds_alternative<AffineMotion>(m)) return std::get<AffineMotion>(m).inverse();
    return std::get<RigidMotion3>(m).inverse();
}

Motion compose_motions(const Motion& first, const Motion& next) {
    if (std::holds_alternative<AffineMotion>(first) && std::holds_alternative<AffineMotion>(next))
        return std::get<AffineMotion>(first).then(std::get<AffineMotion>(next));
    if (std::holds_alternative<RigidMotion3>(first) && std::holds_alternative<RigidMotion3>(next))
        return std::get<RigidMotion3>(first).then(std::get<RigidMotion3>(next));
    throw Error("TYPE_MISMATCH", "cannot compose motions over different element kinds");
}

namespace {

// Image of an arithmetic progression under an affine motion. In exact mode
// every element must map to a natural number (else INVALID_MOTION_ON_BLOCK);
// in partial mode non-mapping elements are filtered out by refining the
// progression with the congruence p x + q == 0 (mod r).
std::optional<Progression> map_progression(const Progression& ap, const AffineMotion& m,
                                           bool partial) {
    long long start = ap.start, step = ap.step;
    std::optional<long long> end = ap.end;
    bool single = end && *end == start;
    if (!partial) {
        if ((m.p * start + m.q) % m.r != 0 || m.p * start + m.q < 0)
            throw Error("INVALID_MOTION_ON_BLOCK",
                        "motion leaves the naturals at x = " + std::to_string(start));
        if (!single && (m.p * step) % m.r != 0)
            throw Error("INVALID_MOTION_ON_BLOCK", "motion leaves the naturals at x = " +
                                                       std::to_string(start + step));
    } else {
        if (single) {
            if (!m.try_apply(start)) return std::nullopt;
        } else {
            auto k0 = solve_congruence(m.p * step % m.r, safe_mod(-(m.p * start + m.q), m.r), m.r);
            if (!k0) return std::nullopt;
            long long g = std::gcd(m.p * step, m.r);
            start += *k0 * step;
            step *= m.r / g;
            if (end && start > *end) return std::nullopt;
            // non-negative images: x >= ceil(-q / p)
            if (m.q < 0) {
                long long bound = (-m.q + m.p - 1) / m.p;
                if (start < bound) {
                    long long lift = (bound - start + step - 1) / step;
                    start += lift * step;
                }
                if (end && start > *end) return std::nullopt;
            }
            single = end && start + step > *end;
        }
    }
    Progression img;
    img.start = (m.p * start + m.q) / m.r;
    if (single || (end && start == *end)) {
        img.step = 1;
        img.end = img.start;
        return img;
    }
    img.step = (m.p * step) / m.r;
    if (end) {
        long long last = start + ((*end - start) / step) * step;
        img.end = (m.p * last + m.q) / m.r;
    }
    return img;
}

IntSet affine_image(const IntSet& s, const AffineMotion& m, bool partial) {
    std::vector<Progression> out;
    for (const auto& ap : s.progressions()) {
        auto img = map_progression(ap, m, partial);
        if (img) out.push_back(*img);
    }
    return IntSet::from_progressions(out);
}

}  // namespace

// -------------------------------------------------------------- GroundSet --

GroundSet GroundSet::finite(std::vector<Elem> elems) {
    GroundSet s;
    s.backend_ = Backend::Finite;
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    bool has_int = false, has_point = false;
    for (const auto& e : elems)
        (std::holds_alternative<long long>(e) ? has_int : has_point) = true;
    if (has_int && has_point)
        throw Error("MIXED_ELEMENTS", "finite ground set mixes integers and points");
    s.finite_ = std::move(elems);
    return s;
}

GroundSet GroundSet::finite_ints(const std::vector<long long>& xs) {
    std::vector<Elem> elems;
    elems.reserve(xs.size());
    for (long long x : xs) {
        if (x < 0) throw Error("BAD_ELEMENT", "integer elements must be non-negative");
        elems.emplace_back(x);
    }
    return finite(std::move(elems));
}

GroundSet GroundSet::finite_points(const std::vector<Vec3Q>& ps) {
    std::vector<Elem> elems;
    elems.reserve(ps.size());
    for (const auto& p : ps) elems.emplace_back(p);
    return finite(std::move(elems));
}

GroundSet GroundSet::integer(const std::vector<Progression>& progs) {
    return integer(IntSet::from_progressions(progs));
}

GroundSet GroundSet::integer(IntSet s) {
    GroundSet g;
    g.backend_ = Backend::Integer;
    g.ints_ = std::move(s);
    return g;
}

bool GroundSet::contains(const Elem& e) const {
    if (backend_ == Backend::Finite)
        return std::binary_search(finite_.begin(), finite_.end(), e);
    if (!std::holds_alternative<long long>(e)) return false;
    return ints_.contains(std::get<long long>(e));
}

bool GroundSet::empty() const {
    return backend_ == Backend::Finite ? finite_.empty() : ints_.empty();
}

std::optional<Elem> GroundSet::min_elem() const {
    if (backend_ == Backend::Finite)
        return finite_.empty() ? std::nullopt : std::optional<Elem>(finite_.front());
    auto m = ints_.min_elem();
    if (!m) return std::nullopt;
    return Elem(*m);
}

const std::vector<Elem>& GroundSet::elems() const {
    if (backend_ != Backend::Finite) throw Error("BACKEND_MISMATCH", "not a finite ground set");
    return finite_;
}

const IntSet& GroundSet::ints() const {
    if (backend_ != Backend::Integer) throw Error("BACKEND_MISMATCH", "not an integer ground set");
    return ints_;
}

namespace {

void require_same_backend(const GroundSet& a, const GroundSet& b) {
    if (a.backend() != b.backend())
        throw Error("BACKEND_MISMATCH", "ground sets use different backends");
}

}  // namespace

GroundSet GroundSet::intersect(const GroundSet& a, const GroundSet& b) {
    require_same_backend(a, b);
    if (a.backend_ == Backend::Finite) {
        std::vector<Elem> out;
        std::set_intersection(a.finite_.begin(), a.finite_.end(), b.finite_.begin(),
                              b.finite_.end(), std::back_inserter(out));
        return finite(std::move(out));
    }
    return integer(IntSet::intersect(a.ints_, b.ints_));
}

GroundSet GroundSet::unite(const GroundSet& a, const GroundSet& b) {
    require_same_backend(a, b);
    if (a.backend_ == Backend::Finite) {
        std::vector<Elem> out;
        std::set_union(a.finite_.begin(), a.finite_.end(), b.finite_.begin(), b.finite_.end(),
                       std::back_inserter(out));
        return finite(std::move(out));
    }
    return integer(IntSet::unite(a.ints_, b.ints_));
}

GroundSet GroundSet::subtract(const GroundSet& a, const GroundSet& b) {
    require_same_backend(a, b);
    if (a.backend_ == Backend::Finite) {
        std::vector<Elem> out;
        std::set_difference(a.finite_.begin(), a.finite_.end(), b.finite_.begin(), b.finite_.end(),
                            std::back_inserter(out));
        return finite(std::move(out));
    }
    return integer(IntSet::subtract(a.ints_, b.ints_));
}

bool GroundSet::disjoint_with(const GroundSet& o) const {
    return intersect(*this, o).empty();
}

bool GroundSet::subset_of(const GroundSet& o) const { return subtract(*this, o).empty(); }

bool GroundSet::operator==(const GroundSet& o) const {
    if (backend_ != o.backend_) return false;
    return backend_ == Backend::Finite ? finite_ == o.finite_ : ints_ == o.ints_;
}

std::vector<Elem> GroundSet::sample_window(long long lo, long long hi) const {
    if (backend_ == Backend::Finite) return finite_;
    std::vector<Elem> out;
    for (long long x : ints_.window(lo, hi)) out.emplace_back(x);
    return out;
}

// ------------------------------------------------------------ ChainSystem --

struct ChainSystem {
    std::vector<PlainPiece> f_pieces, g_pieces;
    std::vector<GroundSet> f_images, g_images;
    GroundSet a_domain, b_domain;

    // Parent of a in A is g^-1(a); parent of b in B is f^-1(b).
    std::optional<Elem> parent(const Elem& x, bool side_a) const {
        const auto& pieces = side_a ? g_pieces : f_pieces;
        const auto& images = side_a ? g_images : f_images;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (!images[i].contains(x)) continue;
            Motion inv = invert_motion(pieces[i].motion);
            return apply_motion(inv, x);
        }
        return std::nullopt;
    }

    AncClass classify(const Elem& a) const {
        std::set<std::pair<bool, Elem>> seen;
        bool side_a = true;
        Elem cur = a;
        int count = 0;
        while (true) {
            if (!seen.insert({side_a, cur}).second) return AncClass::Infinite;
            auto p = parent(cur, side_a);
            if (!p) return count % 2 == 0 ? AncClass::Even : AncClass::Odd;
            cur = *p;
            side_a = !side_a;
            ++count;
        }
    }
};

bool Block::contains(const Elem& e) const {
    if (!base.contains(e)) return false;
    if (plain()) return true;
    return (static_cast<std::uint8_t>(chain->classify(e)) & class_mask) != 0;
}

// ----------------------------------------------------------- PiecewiseMap --

namespace {

GroundSet motion_image(const GroundSet& block, const Motion& motion) {
    if (block.backend() == Backend::Finite) {
        std::vector<Elem> out;
        out.reserve(block.elems().size());
        for (const auto& e : block.elems()) out.push_back(apply_motion(motion, e));
        return GroundSet::finite(std::move(out));
    }
    if (!std::holds_alternative<AffineMotion>(motion))
        throw Error("TYPE_MISMATCH", "integer blocks take affine motions");
    return GroundSet::integer(affine_image(block.ints(), std::get<AffineMotion>(motion), false));
}

// {x : motion(x) in target}
GroundSet motion_preimage(const GroundSet& target, const Motion& motion) {
    if (target.backend() == Backend::Finite) {
        std::vector<Elem> out;
        for (const auto& e : target.elems()) {
            if (std::holds_alternative<AffineMotion>(motion)) {
                if (!std::holds_alternative<long long>(e)) continue;
                auto x = std::get<AffineMotion>(motion).inverse().try_apply(std::get<long long>(e));
                if (x) out.emplace_back(*x);
            } else {
                if (!std::holds_alternative<Vec3Q>(e)) continue;
                out.push_back(std::get<RigidMotion3>(motion).inverse().apply(std::get<Vec3Q>(e)));
            }
        }
        return GroundSet::finite(std::move(out));
    }
    if (!std::holds_alternative<AffineMotion>(motion))
        throw Error("TYPE_MISMATCH", "integer blocks take affine motions");
    return GroundSet::integer(
        affine_image(target.ints(), std::get<AffineMotion>(motion).inverse(), true));
}

}  // namespace

PiecewiseMap PiecewiseMap::make(GroundSet domain, std::vector<PlainPiece> pieces) {
    PiecewiseMap pm;
    pm.domain_ = std::move(domain);
    std::vector<GroundSet> images;
    GroundSet covered = pm.domain_.backend() == Backend::Finite
                            ? GroundSet::finite({})
                            : GroundSet::integer(IntSet{});
    for (auto& piece : pieces) {
        if (piece.block.empty()) continue;
        if (piece.block.backend() != pm.domain_.backend())
            throw Error("BACKEND_MISMATCH", "piece block backend differs from the domain");
        if (!piece.block.subset_of(pm.domain_))
            throw Error("BLOCK_OUTSIDE_DOMAIN",
                        "block reaches outside the domain, witness " +
                            elem_str(*GroundSet::subtract(piece.block, pm.domain_).min_elem()));
        if (!covered.disjoint_with(piece.block))
            throw Error("OVERLAPPING_BLOCKS",
                        "blocks overlap, witness " +
                            elem_str(*GroundSet::intersect(covered, piece.block).min_elem()));
        covered = GroundSet::unite(covered, piece.block);
        images.push_back(motion_image(piece.block, piece.motion));
        pm.pieces_.push_back({Block{std::move(piece.block), 0, nullptr}, piece.motion});
    }
    if (!(covered == pm.domain_))
        throw Error("UNCOVERED_DOMAIN",
                    "blocks do not cover the domain, witness " +
                        elem_str(*GroundSet::subtract(pm.domain_, covered).min_elem()));
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            if (!images[i].disjoint_with(images[j]))
                throw Error("OVERLAPPING_IMAGES",
                            "piece images overlap, witness " +
                                elem_str(*GroundSet::intersect(images[i], images[j]).min_elem()));
    return pm;
}

bool PiecewiseMap::plain() const {
    return std::all_of(pieces_.begin(), pieces_.end(),
                       [](const Piece& p) { return p.block.plain(); });
}

std::optional<Elem> PiecewiseMap::try_apply(const Elem& x) const {
    for (const auto& piece : pieces_)
        if (piece.block.contains(x)) return apply_motion(piece.motion, x);
    return std::nullopt;
}

Elem PiecewiseMap::apply(const Elem& x) const {
    auto y = try_apply(x);
    if (!y) throw Error("NOT_IN_DOMAIN", "element " + elem_str(x) + " is outside the domain");
    return *y;
}

GroundSet PiecewiseMap::image() const {
    if (!plain())
        throw Error("FILTERED_MAP", "images of ancestry-filtered maps are not set-representable");
    GroundSet img = domain_.backend() == Backend::Finite ? GroundSet::finite({})
                                                         : GroundSet::integer(IntSet{});
    for (const auto& piece : pieces_)
        img = GroundSet::unite(img, motion_image(piece.block.base, piece.motion));
    return img;
}

namespace {

std::vector<PlainPiece> plain_pieces(const PiecewiseMap& pm, const std::string& op) {
    if (!pm.plain())
        throw Error("FILTERED_MAP", op + " does not accept ancestry-filtered maps");
    std::vector<PlainPiece> out;
    out.reserve(pm.pieces().size());
    for (const auto& p : pm.pieces()) out.push_back({p.block.base, p.motion});
    return out;
}

}  // namespace

PiecewiseMap invert_piecewise(const PiecewiseMap& pm) {
    auto pieces = plain_pieces(pm, "invert");
    std::vector<PlainPiece> inverted;
    inverted.reserve(pieces.size());
    GroundSet domain = pm.domain().backend() == Backend::Finite ? GroundSet::finite({})
                                                                : GroundSet::integer(IntSet{});
    for (const auto& piece : pieces) {
        GroundSet img = motion_image(piece.block, piece.motion);
        domain = GroundSet::unite(domain, img);
        inverted.push_back({std::move(img), invert_motion(piece.motion)});
    }
    return PiecewiseMap::make(std::move(domain), std::move(inverted));
}

PiecewiseMap compose_piecewise(const PiecewiseMap& pm1, const PiecewiseMap& pm2) {
    auto pieces1 = plain_pieces(pm1, "compose");
    auto pieces2 = plain_pieces(pm2, "compose");
    if (!(pm1.image() == pm2.domain()))
        throw Error("DOMAIN_MISMATCH", "image of the first map must equal the second's domain");
    std::vector<PlainPiece> out;
    for (const auto& p1 : pieces1)
        for (const auto& p2 : pieces2) {
            GroundSet block =
                GroundSet::intersect(p1.block, motion_preimage(p2.block, p1.motion));
            if (block.empty()) continue;
            out.push_back({std::move(block), compose_motions(p1.motion, p2.motion)});
        }
    return PiecewiseMap::make(pm1.domain(), std::move(out));
}

PiecewiseMap restrict_piecewise(const PiecewiseMap& pm, const GroundSet& subset) {
    auto pieces = plain_pieces(pm, "restrict");
    if (!subset.subset_of(pm.domain()))
        throw Error("NOT_A_SUBSET", "restriction set reaches outside the domain");
    std::vector<PlainPiece> out;
    for (const auto& piece : pieces) {
        GroundSet block = GroundSet::intersect(piece.block, subset);
        if (block.empty()) continue;
        out.push_back({std::move(block), piece.motion});
    }
    return PiecewiseMap::make(subset, std::move(out));
}

namespace {

// Number of elements in an integer ground set clipped at 2 (all we need to
// decide whether motions must agree as functions or just at one point).
int clipped_size(const GroundSet& s) {
    if (s.empty()) return 0;
    if (s.backend() == Backend::Finite) return s.elems().size() == 1 ? 1 : 2;
    auto m = s.ints().min_elem();
    IntSet rest = IntSet::subtract(s.ints(), IntSet::singleton(*m));
    return rest.empty() ? 1 : 2;
}

}  // namespace

bool pointwise_equal(const PiecewiseMap& x, const PiecewiseMap& y) {
    if (!(x.domain() == y.domain())) return false;
    if (x.domain().backend() == Backend::Finite) {
        for (const auto& e : x.domain().elems())
            if (x.apply(e) != y.apply(e)) return false;
        return true;
    }
    for (const auto& px : x.pieces())
        for (const auto& py : y.pieces()) {
            GroundSet d = GroundSet::intersect(px.block.base, py.block.base);
            int size = clipped_size(d);
            if (size == 0) continue;
            const auto& mx = std::get<AffineMotion>(px.motion);
            const auto& my = std::get<AffineMotion>(py.motion);
            if (size == 1) {
                long long e = std::get<long long>(*d.min_elem());
                if (mx.apply(e) != my.apply(e)) return false;
            } else if (!(mx == my)) {
                return false;
            }
        }
    return true;
}

PiecewiseMap scale_conjugate(const PiecewiseMap& pm, const Rat& k) {
    if (k <= 0) throw Error("BAD_SCALE", "scale factor must be positive");
    auto pieces = plain_pieces(pm, "scale_conjugate");
    if (pm.domain().backend() != Backend::Finite)
        throw Error("INTEGER_BACKEND", "scaling is defined on the rational-point backend only");
    auto scale_set = [&](const GroundSet& s) {
        std::vector<Vec3Q> out;
        for (const auto& e : s.elems()) {
            if (!std::holds_alternative<Vec3Q>(e))
                throw Error("INTEGER_BACKEND", "scaling needs rational-point elements");
            out.push_back(vec3_scale(std::get<Vec3Q>(e), k));
        }
        return GroundSet::finite_points(out);
    };
    std::vector<PlainPiece> scaled;
    for (const auto& piece : pieces) {
        const auto& motion = std::get<RigidMotion3>(piece.motion);
        scaled.push_back({scale_set(piece.block),
                          RigidMotion3{motion.rot, vec3_scale(motion.trans, k)}});
    }
    return PiecewiseMap::make(scale_set(pm.domain()), std::move(scaled));
}

ParadoxCheck check_paradoxical(const ParadoxWitness& w) {
    if (!(w.map1.domain() == w.set) || !(w.map2.domain() == w.set))
        throw Error("BAD_WITNESS", "paradox witness maps must be defined on the whole set");
    ParadoxCheck out;
    GroundSet im1 = w.map1.image(), im2 = w.map2.image();
    GroundSet overlap = GroundSet::intersect(im1, im2);
    if (!overlap.empty()) {
        out.witness = *overlap.min_elem();
        return out;
    }
    for (const GroundSet* im : {&im1, &im2}) {
        GroundSet outside = GroundSet::subtract(*im, w.set);
        if (!outside.empty()) {
            out.witness = *outside.min_elem();
            return out;
        }
    }
    out.relaxed = true;
    GroundSet uncovered = GroundSet::subtract(w.set, GroundSet::unite(im1, im2));
    if (uncovered.empty()) {
        out.strict = true;
    } else {
        out.witness = *uncovered.min_elem();
    }
    return out;
}

ParadoxWitness transfer_paradox(const PiecewiseMap& pm_ab, const ParadoxWitness& w) {
    if (!(pm_ab.image() == w.set))
        throw Error("DOMAIN_MISMATCH", "transfer map must land exactly on the witnessed set");
    auto conjugate = [&](const PiecewiseMap& map_i) {
        PiecewiseMap to_sub = compose_piecewise(pm_ab, map_i);
        GroundSet b_sub = to_sub.image();
        PiecewiseMap back = restrict_piecewise(invert_piecewise(pm_ab), b_sub);
        return compose_piecewise(to_sub, back);
    };
    return ParadoxWitness{pm_ab.domain(), conjugate(w.map1), conjugate(w.map2)};
}

namespace {

// The Integer backend only admits pieces whose backward ancestor steps
// strictly decrease: forward motion above the diagonal or slope >= 2.
void check_decrease_contract(const PiecewiseMap& pm) {
    for (const auto& piece : pm.pieces()) {
        const auto& m = std::get<AffineMotion>(piece.motion);
        if (m.p >= 2 * m.r) continue;  // slope >= 2
        const IntSet& block = piece.block.base.ints();
        bool ok;
        if (m.p >= m.r) {
            long long x = *block.min_elem();
            ok = (m.p - m.r) * x + m.q > 0;
        } else if (block.finite()) {
            long long x = block.all().back();
            ok = (m.p - m.r) * x + m.q > 0;
        } else {
            ok = false;  // slope < 1 on an infinite block eventually descends
        }
        if (!ok)
            throw Error("NONTERMINATING_ANCESTRY",
                        "piece does not satisfy map(n) > n or slope >= 2 on its block");
    }
}

}  // namespace

AncClass classify_ancestry(const PiecewiseMap& f, const PiecewiseMap& g, const Elem& a) {
    ChainSystem sys;
    sys.f_pieces = plain_pieces(f, "bsb");
    sys.g_pieces = plain_pieces(g, "bsb");
    for (const auto& p : sys.f_pieces) sys.f_images.push_back(motion_image(p.block, p.motion));
    for (const auto& p : sys.g_pieces) sys.g_images.push_back(motion_image(p.block, p.motion));
    sys.a_domain = f.domain();
    sys.b_domain = g.domain();
    return sys.classify(a);
}

PiecewiseMap bsb_combine(const PiecewiseMap& f, const PiecewiseMap& g) {
    auto f_pieces = plain_pieces(f, "bsb");
    auto g_pieces = plain_pieces(g, "bsb");
    if (f.domain().backend() != g.domain().backend())
        throw Error("BACKEND_MISMATCH", "bsb inputs must share a backend");
    const GroundSet& a_set = f.domain();
    const GroundSet& b_set = g.domain();
    if (!f.image().subset_of(b_set))
        throw Error("BAD_BSB_INPUT", "image of f must lie inside the domain of g");
    if (!g.image().subset_of(a_set))
        throw Error("BAD_BSB_INPUT", "image of g must lie inside the domain of f");

    auto sys = std::make_shared<ChainSystem>();
    sys->f_pieces = f_pieces;
    sys->g_pieces = g_pieces;
    for (const auto& p : f_pieces) sys->f_images.push_back(motion_image(p.block, p.motion));
    for (const auto& p : g_pieces) sys->g_images.push_back(motion_image(p.block, p.motion));
    sys->a_domain = a_set;
    sys->b_domain = b_set;

    if (a_set.backend() == Backend::Finite) {
        std::vector<Elem> odd, even_inf;
        for (const auto& a : a_set.elems())
            (sys->classify(a) == AncClass::Odd ? odd : even_inf).push_back(a);
        GroundSet odd_set = GroundSet::finite(std::move(odd));
        GroundSet even_inf_set = GroundSet::finite(std::move(even_inf));
        std::vector<PlainPiece> pieces;
        for (const auto& p : f_pieces) {
            GroundSet block = GroundSet::intersect(p.block, even_inf_set);
            if (!block.empty()) pieces.push_back({std::move(block), p.motion});
        }
        for (std::size_t i = 0; i < g_pieces.size(); ++i) {
            GroundSet block = GroundSet::intersect(sys->g_images[i], odd_set);
            if (!block.empty()) pieces.push_back({std::move(block), invert_motion(g_pieces[i].motion)});
        }
        return PiecewiseMap::make(a_set, std::move(pieces));
    }

    check_decrease_contract(f);
    check_decrease_contract(g);

    PiecewiseMap h;
    h.domain_ = a_set;
    const std::uint8_t even_inf_mask =
        static_cast<std::uint8_t>(AncClass::Even) | static_cast<std::uint8_t>(AncClass::Infinite);
    for (const auto& p : f_pieces)
        h.pieces_.push_back({Block{p.block, even_inf_mask, sys}, p.motion});
    for (std::size_t i = 0; i < g_pieces.size(); ++i)
        h.pieces_.push_back({Block{sys->g_images[i], static_cast<std::uint8_t>(AncClass::Odd), sys},
                             invert_motion(g_pieces[i].motion)});

    // The parity classes need not be progression unions, so full validation
    // is not available; verify bijectivity pointwise on an initial window.
    std::set<Elem> values;
    for (long long x : a_set.ints().window(0, kBsbWindow)) {
        Elem e{x};
        int hits = 0;
        for (const auto& piece : h.pieces_)
            if (piece.block.contains(e)) ++hits;
        if (hits != 1)
            throw Error("BSB_INTERNAL", "element " + std::to_string(x) + " lies in " +
                                            std::to_string(hits) + " pieces");
        Elem y = h.apply(e);
        if (!b_set.contains(y))
            throw Error("BSB_INTERNAL", "image " + elem_str(y) + " escapes the codomain");
        if (!values.insert(y).second)
            throw Error("BSB_INTERNAL", "duplicate image " + elem_str(y) + " on the window");
    }
    return h;
}

// ------------------------------------------------------------------- JSON --

namespace {

using nlohmann::ordered_json;

Progression progression_from_json(const ordered_json& j) {
    Progression p;
    p.start = j.at("start").get<long long>();
    p.step = j.value("step", 1LL);
    if (j.contains("end")) p.end = j.at("end").get<long long>();
    return p;
}

GroundSet ground_set_from_json(const ordered_json& j, Backend backend) {
    if (backend == Backend::Integer) {
        std::vector<Progression> progs;
        if (j.is_object()) {
            progs.push_back(progression_from_json(j));  // single-progression shorthand
        } else {
            for (const auto& e : j) progs.push_back(progression_from_json(e));
        }
        return GroundSet::integer(progs);
    }
    std::vector<long long> xs;
    for (const auto& e : j) xs.push_back(e.get<long long>());
    return GroundSet::finite_ints(xs);
}

Motion motion_from_json(const ordered_json& j) {
    if (j.contains("u")) {
        long long u = j.at("u").get<long long>();
        long long v = j.value("v", 0LL);
        return AffineMotion::shift_scale(u, v);
    }
    AffineMotion m{j.at("p").get<long long>(), j.at("q").get<long long>(),
                   j.at("r").get<long long>()};
    if (m.p < 1 || m.r < 1) throw Error("BAD_MOTION", "affine motion needs p >= 1 and r >= 1");
    return m;
}

PiecewiseMap piecewise_from_json(const ordered_json& domain_json, const ordered_json& pieces_json,
                                 Backend backend) {
    GroundSet domain = ground_set_from_json(domain_json, backend);
    std::vector<PlainPiece> pieces;
    for (const auto& pj : pieces_json)
        pieces.push_back(
            {ground_set_from_json(pj.at("block"), backend), motion_from_json(pj.at("map"))});
    return PiecewiseMap::make(std::move(domain), std::move(pieces));
}

Backend backend_from_json(const ordered_json& j) {
    std::string b = j.at("backend").get<std::string>();
    if (b == "integer") return Backend::Integer;
    if (b == "finite") return Backend::Finite;
    throw Error("BAD_INSTANCE", "backend must be \"integer\" or \"finite\"");
}

ordered_json motion_to_json(const Motion& motion) {
    const auto& m = std::get<AffineMotion>(motion);
    if (m.r == 1) return ordered_json{{"u", m.p}, {"v", m.q}};
    return ordered_json{{"p", m.p}, {"q", m.q}, {"r", m.r}};
}

}  // namespace

BsbInstance parse_bsb_instance(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error("BAD_INSTANCE", std::string("json parse failure: ") + e.what());
    }
    try {
        Backend backend = backend_from_json(j);
        BsbInstance inst{piecewise_from_json(j.at("A"), j.at("f"), backend),
                         piecewise_from_json(j.at("B"), j.at("g"), backend)};
        return inst;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("BAD_INSTANCE", std::string("malformed instance: ") + e.what());
    }
}

ComposeInstance parse_compose_instance(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error("BAD_INSTANCE", std::string("json parse failure: ") + e.what());
    }
    try {
        Backend backend = backend_from_json(j);
        ComposeInstance inst{piecewise_from_json(j.at("A"), j.at("f"), backend),
                             piecewise_from_json(j.at("B"), j.at("g"), backend)};
        return inst;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("BAD_INSTANCE", std::string("malformed instance: ") + e.what());
    }
}

nlohmann::ordered_json ground_set_to_json(const GroundSet& s) {
    ordered_json out = ordered_json::array();
    if (s.backend() == Backend::Integer) {
        for (const auto& p : s.ints().progressions()) {
            ordered_json e{{"start", p.start}, {"step", p.step}};
            if (p.end) e["end"] = *p.end;
            out.push_back(e);
        }
        return out;
    }
    for (const auto& e : s.elems()) {
        if (std::holds_alternative<long long>(e)) {
            out.push_back(std::get<long long>(e));
        } else {
            const Vec3Q& p = std::get<Vec3Q>(e);
            std::ostringstream x, y, z;
            x << p[0];
            y << p[1];
            z << p[2];
            out.push_back({x.str(), y.str(), z.str()});
        }
    }
    return out;
}

nlohmann::ordered_json piecewise_to_json(const PiecewiseMap& pm) {
    ordered_json j;
    j["domain"] = ground_set_to_json(pm.domain());
    ordered_json pieces = ordered_json::array();
    for (const auto& piece : pm.pieces()) {
        ordered_json pj;
        pj["block"] = ground_set_to_json(piece.block.base);
        if (!piece.block.plain()) {
            std::string f;
            if (piece.block.class_mask & static_cast<std::uint8_t>(AncClass::Even)) f += "even+";
            if (piece.block.class_mask & static_cast<std::uint8_t>(AncClass::Odd)) f += "odd+";
            if (piece.block.class_mask & static_cast<std::uint8_t>(AncClass::Infinite))
                f += "infinite+";
            f.pop_back();
            pj["class_filter"] = f;
        }
        pj["map"] = motion_to_json(piece.motion);
        pieces.push_back(pj);
    }
    j["pieces"] = pieces;
    return j;
}

}  // namespace paradox::eq

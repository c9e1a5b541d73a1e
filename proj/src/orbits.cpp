#include "paradox/orbits.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "paradox/error.hpp"

namespace paradox::orb {

using words::Letter;

namespace {

Int pow_int(long long base, unsigned n) {
    Int r = 1;
    for (unsigned i = 0; i < n; ++i) r *= base;
    return r;
}

// Normalized (exponent, vector) key; cross-multiplied equality collapses to
// structural equality on these.
using PointKey = std::pair<unsigned, Vec3I>;

PointKey key_of(const ScaledVec& p) {
    ScaledVec n = p.normalized();
    return {n.n, n.v};
}

}  // namespace

bool on_unit_sphere(const ScaledVec& p) {
    return p.norm2_numerator() == pow_int(p.base, 2 * p.n);
}

ScaledVec sphere_point(const ScaledVec& p) {
    if (!on_unit_sphere(p))
        throw Error("NOT_ON_SPHERE", "|v|^2 != c^2n for " + p.str());
    return p;
}

BallPoint ball_point(const ScaledVec& u, const Rat& t) {
    if (t <= 0 || t > 1) throw Error("BAD_RADIUS", "radial coordinate must lie in (0,1]");
    return BallPoint{sphere_point(u), t};
}

OffsetRotation OffsetRotation::make(const Mat3Q& rot, const Vec3Q& center) {
    if (!is_special_orthogonal(rot))
        throw Error("BAD_ROTATION", "offset rotation needs an exactly special-orthogonal matrix");
    return OffsetRotation{rot, center};
}

Vec3Q OffsetRotation::apply(const Vec3Q& x) const {
    return vec3_add(mat3_apply(rot, vec3_sub(x, center)), center);
}

bool OffsetRotation::fixes(const Vec3Q& x) const {
    Vec3Q d = vec3_sub(x, center);
    return mat3_apply(rot, d) == d;
}

std::vector<ScaledVec> orbit_segment(const Word& rho, const ScaledVec& seed, std::size_t n,
                                     const PythagoreanTriple& t) {
    auto gens = rot::make_generators(t);
    std::vector<ScaledVec> out;
    out.reserve(n + 1);
    out.push_back(seed);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rot::apply_word(rho, out.back(), gens));
    return out;
}

std::vector<Vec3Q> orbit_segment(const OffsetRotation& rho, const Vec3Q& seed, std::size_t n) {
    std::vector<Vec3Q> out;
    out.reserve(n + 1);
    out.push_back(seed);
    for (std::size_t i = 0; i < n; ++i) out.push_back(rho.apply(out.back()));
    return out;
}

DistinctReport check_distinct(const std::vector<ScaledVec>& points) {
    DistinctReport rep;
    std::map<PointKey, std::size_t> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [it, fresh] = seen.emplace(key_of(points[i]), i);
        if (!fresh) {
            rep.distinct = false;
            rep.collision = {it->second, i};
            return rep;
        }
    }
    return rep;
}

DistinctReport check_distinct(const std::vector<Vec3Q>& points) {
    DistinctReport rep;
    std::map<Vec3Q, std::size_t> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [it, fresh] = seen.emplace(points[i], i);
        if (!fresh) {
            rep.distinct = false;
            rep.collision = {it->second, i};
            return rep;
        }
    }
    return rep;
}

namespace {

// Shared absorption logic over any exact point type with a strict-order key.
template <typename Point, typename Key, typename Apply, typename KeyOf>
AbsorptionReport absorption_impl(const std::vector<Point>& d, std::size_t n, Apply apply,
                                 KeyOf keyof) {
    AbsorptionReport rep;
    rep.steps = n;
    std::vector<std::vector<Point>> levels;
    levels.push_back(d);
    for (std::size_t k = 1; k <= n + 1; ++k) {
        std::vector<Point> next;
        next.reserve(d.size());
        for (const auto& p : levels.back()) next.push_back(apply(p));
        levels.push_back(std::move(next));
    }

    std::map<Key, std::size_t> first_level;
    for (std::size_t k = 0; k < levels.size(); ++k)
        for (const auto& p : levels[k]) {
            auto [it, fresh] = first_level.emplace(keyof(p), k);
            if (!fresh && it->second != k) {
                rep.collision = {it->second, k - it->second};
                return rep;
            }
        }

    // rho A_N == A_{N+1} \ D, checked literally as key sets.
    std::set<Key> rotated, target;
    for (std::size_t k = 0; k <= n; ++k)
        for (const auto& p : levels[k]) rotated.insert(keyof(apply(p)));
    for (std::size_t k = 0; k <= n + 1; ++k)
        for (const auto& p : levels[k]) target.insert(keyof(p));
    for (const auto& p : levels[0]) target.erase(keyof(p));
    rep.rotation_identity_ok = rotated == target;
    rep.pass = rep.rotation_identity_ok;
    return rep;
}

}  // namespace

AbsorptionReport truncated_absorption_check(const Word& rho, const std::vector<ScaledVec>& d,
                                            std::size_t n, const PythagoreanTriple& t) {
    if (rho.empty()) throw Error("EMPTY_WORD", "absorption needs a nontrivial rotation");
    for (const auto& p : d)
        if (pole_check(rho, p, t))
            throw Error("AXIS_POINT", "point " + p.str() + " lies on the rotation axis");
    auto gens = rot::make_generators(t);
    return absorption_impl<ScaledVec, PointKey>(
        d, n, [&](const ScaledVec& p) { return rot::apply_word(rho, p, gens); }, key_of);
}

AbsorptionReport truncated_absorption_check(const OffsetRotation& rho,
                                            const std::vector<Vec3Q>& d, std::size_t n) {
    for (const auto& p : d)
        if (rho.fixes(p))
            throw Error("AXIS_POINT", "point " + vec3_str(p) + " lies on the rotation axis");
    return absorption_impl<Vec3Q, Vec3Q>(
        d, n, [&](const Vec3Q& p) { return rho.apply(p); }, [](const Vec3Q& p) { return p; });
}

bool pole_check(const Word& w, const ScaledVec& p, const PythagoreanTriple& t) {
    if (w.empty())
        throw Error("EMPTY_WORD", "the identity fixes everything; pole checks need |w| >= 1");
    return rot::apply_word(w, p, t).equals(p);
}

namespace {

char classify_word(const Word& w) {
    switch (words::leading_coset(w)) {
        case words::CosetLabel::SigmaPos:
        case words::CosetLabel::SigmaNeg: return 'Y';
        case words::CosetLabel::TauPos:
        case words::CosetLabel::TauNeg: return 'Z';
        case words::CosetLabel::E: return 'E';
    }
    return 'E';
}

}  // namespace

LiftSample hausdorff_lift_sample(const PythagoreanTriple& t, const std::vector<ScaledVec>& seeds,
                                 std::size_t cutoff, unsigned threads) {
    LiftSample sample;
    sample.triple = t;
    sample.cutoff = cutoff;
    sample.seeds = seeds;
    if (seeds.empty()) throw Error("NO_SEEDS", "lift sample needs at least one seed");
    for (const auto& s : seeds) {
        sphere_point(s);
        if (s.base != t.c) throw Error("BASE_MISMATCH", "seed base does not match the triple");
    }
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (seeds[i].equals(seeds[j]))
                throw Error("ORBIT_COLLISION", "seeds " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " are the same point");

    auto gens = rot::make_generators(t);
    std::vector<Word> word_list = words::all_reduced(cutoff);
    sample.orbits.resize(seeds.size());

    auto generate = [&](std::size_t si) {
        auto& orbit = sample.orbits[si];
        orbit.reserve(word_list.size());
        for (const Word& w : word_list)
            orbit.push_back({w, rot::apply_word(w, seeds[si], gens), classify_word(w)});
    };
    if (threads <= 1 || seeds.size() == 1) {
        for (std::size_t si = 0; si < seeds.size(); ++si) generate(si);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t si = 0; si < seeds.size(); ++si) pool.emplace_back(generate, si);
        for (auto& th : pool) th.join();
    }

    // Per-orbit injectivity; a collision against the empty word means the
    // seed is a pole of the colliding word.
    std::map<PointKey, std::pair<std::size_t, std::size_t>> global;  // key -> (seed, entry)
    std::set<PointKey> y_keys, z_keys, e_keys;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
        std::map<PointKey, std::size_t> local;
        for (std::size_t ei = 0; ei < sample.orbits[si].size(); ++ei) {
            const auto& entry = sample.orbits[si][ei];
            auto key = key_of(entry.point);
            auto [it, fresh] = local.emplace(key, ei);
            if (!fresh) {
                const Word& other = sample.orbits[si][it->second].word;
                if (other.empty() || entry.word.empty())
                    throw Error("POLE_SEED", "seed " + seeds[si].str() + " is fixed by " +
                                                 (other.empty() ? entry.word : other).str());
                throw Error("ORBIT_COLLISION", "words " + other.str() + " and " +
                                                   entry.word.str() +
                                                   " agree on seed " + seeds[si].str());
            }
            if (entry.cls == 'Y') y_keys.insert(key);
            if (entry.cls == 'Z') z_keys.insert(key);
            if (entry.cls == 'E') e_keys.insert(key);
            auto [git, gfresh] = global.emplace(key, std::make_pair(si, ei));
            if (!gfresh && git->second.first != si && sample.cross_orbit_disjoint) {
                sample.cross_orbit_disjoint = false;
                sample.cross_witness =
                    LiftCollision{git->second.first, si,
                                  sample.orbits[git->second.first][git->second.second].word,
                                  entry.word};
            }
            ++sample.point_count;
        }
    }

    auto sets_disjoint = [](const std::set<PointKey>& a, const std::set<PointKey>& b) {
        for (const auto& k : a)
            if (b.count(k)) return false;
        return true;
    };
    sample.yz_disjoint = sets_disjoint(y_keys, z_keys);
    sample.classes_pairwise_disjoint = sample.yz_disjoint && sets_disjoint(e_keys, y_keys) &&
                                       sets_disjoint(e_keys, z_keys);

    // Truncated shift identity per orbit: stripping the leading sigma (tau)
    // from the sigma-led (tau-led) points reproduces exactly the points of
    // words of length <= L-1 not led by the inverse letter.
    sample.shift_identity_ok = true;
    for (std::size_t si = 0; si < seeds.size() && sample.shift_identity_ok; ++si) {
        for (Letter g : {Letter::SigmaPos, Letter::TauPos}) {
            Word inv_g(std::vector<Letter>{words::inverse(g)});
            std::set<PointKey> stripped, expected;
            for (const auto& entry : sample.orbits[si]) {
                if (!entry.word.empty() && entry.word.letters().front() == g)
                    stripped.insert(key_of(rot::apply_word(inv_g, entry.point, gens)));
                if (entry.word.length() + 1 <= cutoff &&
                    (entry.word.empty() || entry.word.letters().front() != words::inverse(g)))
                    expected.insert(key_of(entry.point));
            }
            if (stripped != expected) {
                sample.shift_identity_ok = false;
                break;
            }
        }
    }
    return sample;
}

std::string lift_to_csv(const LiftSample& sample) {
    std::ostringstream os;
    os << "seed_id,word,class,x_num,y_num,z_num,exp\n";
    for (std::size_t si = 0; si < sample.orbits.size(); ++si)
        for (const auto& entry : sample.orbits[si]) {
            os << si << "," << entry.word.str() << "," << entry.cls << "," << entry.point.v[0]
               << "," << entry.point.v[1] << "," << entry.point.v[2] << "," << entry.point.n
               << "\n";
        }
    return os.str();
}

nlohmann::ordered_json lift_to_json(const LiftSample& sample) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["triple"] = {sample.triple.a, sample.triple.b, sample.triple.c};
    j["cutoff"] = sample.cutoff;
    ordered_json seeds = ordered_json::array();
    for (const auto& s : sample.seeds)
        seeds.push_back({{"v", {s.v[0].str(), s.v[1].str(), s.v[2].str()}}, {"exp", s.n}});
    j["seeds"] = seeds;
    ordered_json orbits = ordered_json::array();
    for (const auto& orbit : sample.orbits) {
        ordered_json entries = ordered_json::array();
        for (const auto& e : orbit)
            entries.push_back({{"word", e.word.str()},
                               {"class", std::string(1, e.cls)},
                               {"v", {e.point.v[0].str(), e.point.v[1].str(), e.point.v[2].str()}},
                               {"exp", e.point.n}});
        orbits.push_back(entries);
    }
    j["orbits"] = orbits;
    j["point_count"] = sample.point_count;
    j["cross_orbit_disjoint"] = sample.cross_orbit_disjoint;
    j["yz_disjoint"] = sample.yz_disjoint;
    j["classes_pairwise_disjoint"] = sample.classes_pairwise_disjoint;
    j["shift_identity_ok"] = sample.shift_identity_ok;
    return j;
}

std::vector<BallPoint> cone_extend(const eq::PiecewiseMap& f, const std::vector<BallPoint>& points,
                                   const PythagoreanTriple& t) {
    std::vector<BallPoint> out;
    out.reserve(points.size());
    for (const auto& bp : points) {
        eq::Elem u{bp.u.to_rational()};
        auto mapped = f.try_apply(u);
        if (!mapped)
            throw Error("POINT_OUTSIDE_DOMAIN",
                        "direction " + bp.u.str() + " is outside the sphere map's domain");
        const Vec3Q& w = std::get<Vec3Q>(*mapped);
        // Re-express the rational direction as v / c^n.
        Int den = 1;
        for (const auto& coord : w) den = boost::multiprecision::lcm(den, denominator(coord));
        unsigned n = 0;
        Int cn = 1;
        while (cn % den != 0) {
            cn *= t.c;
            ++n;
            if (n > 4096)
                throw Error("NOT_SCALE_REPRESENTABLE",
                            "mapped direction has denominators outside powers of c");
        }
        Vec3I v;
        for (int i = 0; i < 3; ++i)
            v[i] = numerator(w[i]) * (cn / denominator(w[i]));
        out.push_back({sphere_point(ScaledVec{v, n, t.c}), bp.t});
    }
    return out;
}

CenterAbsorptionReport center_absorption_demo(const PythagoreanTriple& t, std::size_t n) {
    if (n < 1) throw Error("BAD_STEPS", "center absorption demo needs n >= 1");
    CenterAbsorptionReport rep;
    rep.steps = n;
    const Rat c(t.c);
    Mat3Q rot{{{Rat(t.b) / c, Rat(-t.a) / c, Rat(0)},
               {Rat(t.a) / c, Rat(t.b) / c, Rat(0)},
               {Rat(0), Rat(0), Rat(1)}}};
    OffsetRotation rho = OffsetRotation::make(rot, {Rat(1, 3), Rat(0), Rat(0)});

    const Vec3Q origin{Rat(0), Rat(0), Rat(0)};
    auto orbit = orbit_segment(rho, origin, n);
    rep.first_iterate = orbit[1];

    rep.within_two_thirds = true;
    const Rat bound(4, 9);
    for (const auto& p : orbit)
        if (vec3_dot(p, p) > bound) {
            rep.within_two_thirds = false;
            break;
        }
    rep.distinct = check_distinct(orbit).distinct;
    rep.absorption_ok = truncated_absorption_check(rho, {origin}, n).pass;
    rep.pass = rep.within_two_thirds && rep.distinct && rep.absorption_ok;
    return rep;
}

}  // namespace paradox::orb

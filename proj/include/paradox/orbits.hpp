#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paradox/equidecomp.hpp"
#include "paradox/rotations.hpp"

namespace paradox::orb {

using rot::PythagoreanTriple;
using rot::ScaledVec;
using words::Word;

// A ScaledVec lying exactly on the unit sphere: |v|^2 = c^{2n}.
bool on_unit_sphere(const ScaledVec& p);
ScaledVec sphere_point(const ScaledVec& p);  // validates, throws NOT_ON_SPHERE

// Ball point as (direction, radius): cone extension acts on the direction
// and never touches the exact radius.
struct BallPoint {
    ScaledVec u;
    Rat t{1};
};

BallPoint ball_point(const ScaledVec& u, const Rat& t);  // validates t in (0,1]

// Rotation around an axis through `center`: x -> R (x - center) + center.
struct OffsetRotation {
    Mat3Q rot = mat3_identity<Rat>();
    Vec3Q center{Rat(0), Rat(0), Rat(0)};

    static OffsetRotation make(const Mat3Q& rot, const Vec3Q& center);

    Vec3Q apply(const Vec3Q& x) const;
    bool fixes(const Vec3Q& x) const;  // x on the rotation axis
};

std::vector<ScaledVec> orbit_segment(const Word& rho, const ScaledVec& seed, std::size_t n,
                                     const PythagoreanTriple& t);
std::vector<Vec3Q> orbit_segment(const OffsetRotation& rho, const Vec3Q& seed, std::size_t n);

struct DistinctReport {
    bool distinct = true;
    std::optional<std::pair<std::size_t, std::size_t>> collision;  // first (i, j), i < j
};

DistinctReport check_distinct(const std::vector<ScaledVec>& points);
DistinctReport check_distinct(const std::vector<Vec3Q>& points);

struct AbsorptionReport {
    bool pass = false;
    std::optional<std::pair<std::size_t, std::size_t>> collision;  // rho^n D meets rho^{n+m} D
    bool rotation_identity_ok = false;  // rho A_N == A_{N+1} \ D as exact sets
    std::size_t steps = 0;
};

// Checks the truncated point-absorption identity: with A_k the union of
// rho^0 D .. rho^k D, the images rho^n D stay pairwise disjoint up to N+1 and
// rho A_N equals A_{N+1} minus D exactly. Throws AXIS_POINT when some point
// of D sits on the rotation axis.
AbsorptionReport truncated_absorption_check(const Word& rho, const std::vector<ScaledVec>& d,
                                            std::size_t n, const PythagoreanTriple& t);
AbsorptionReport truncated_absorption_check(const OffsetRotation& rho,
                                            const std::vector<Vec3Q>& d, std::size_t n);

// True iff the nonempty word fixes p exactly. Empty words are rejected.
bool pole_check(const Word& w, const ScaledVec& p, const PythagoreanTriple& t);

struct LiftEntry {
    Word word;
    ScaledVec point;
    char cls = 'E';  // 'Y' sigma-led, 'Z' tau-led, 'E' the empty word
};

struct LiftCollision {
    std::size_t seed_a = 0, seed_b = 0;
    Word word_a, word_b;
};

struct LiftSample {
    PythagoreanTriple triple;
    std::size_t cutoff = 0;
    std::vector<ScaledVec> seeds;
    std::vector<std::vector<LiftEntry>> orbits;  // per seed, enumeration order
    std::size_t point_count = 0;
    bool cross_orbit_disjoint = true;
    std::optional<LiftCollision> cross_witness;
    bool yz_disjoint = false;
    bool classes_pairwise_disjoint = false;  // Y, Z and E as geometric point sets
    bool shift_identity_ok = false;
};

// Generates w . seed for every reduced |w| <= cutoff and every seed, verifies
// per-orbit injectivity (POLE_SEED / ORBIT_COLLISION abort with a witness),
// classifies points by leading coset, checks Y and Z stay disjoint over all
// generated points and that the sigma/tau shift identities hold per orbit.
// Orbit-sharing between different seeds is reported, not fatal.
LiftSample hausdorff_lift_sample(const PythagoreanTriple& t, const std::vector<ScaledVec>& seeds,
                                 std::size_t cutoff, unsigned threads = 1);

std::string lift_to_csv(const LiftSample& sample);
nlohmann::ordered_json lift_to_json(const LiftSample& sample);

// Lifts a sphere map to the punctured ball: direction component moves under
// f, the radial coordinate is preserved exactly.
std::vector<BallPoint> cone_extend(const eq::PiecewiseMap& f, const std::vector<BallPoint>& points,
                                   const PythagoreanTriple& t);

struct CenterAbsorptionReport {
    bool pass = false;
    Vec3Q first_iterate{Rat(0), Rat(0), Rat(0)};
    bool within_two_thirds = false;
    bool distinct = false;
    bool absorption_ok = false;
    std::size_t steps = 0;
};

// Rotates the origin around the vertical axis through (1/3, 0, 0) by the
// triple angle: the orbit stays within distance 2/3 of the origin, never
// repeats, and satisfies the truncated absorption identity.
CenterAbsorptionReport center_absorption_demo(const PythagoreanTriple& t, std::size_t n);

}  // namespace paradox::orb

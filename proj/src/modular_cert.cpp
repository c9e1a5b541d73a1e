#include "paradox/modular_cert.hpp"

#include <algorithm>
#include <tuple>

#include <json.hpp>

#include "paradox/error.hpp"

namespace paradox::cert {

namespace {

long long mod_reduce(long long x, long long c) {
    long long r = x % c;
    return r < 0 ? r + c : r;
}

// Extended Euclid; throws when gcd(x, c) != 1.
long long mod_inverse(long long x, long long c) {
    long long r0 = c, r1 = mod_reduce(x, c), s0 = 0, s1 = 1;
    while (r1 != 0) {
        long long q = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
    }
    if (r0 != 1)
        throw Error("NOT_INVERTIBLE",
                    std::to_string(x) + " has no inverse mod " + std::to_string(c));
    return mod_reduce(s0, c);
}

GenKind inverse_kind(GenKind k) {
    return static_cast<GenKind>(static_cast<std::uint8_t>(k) ^ 1u);
}

const GenKind kKinds[4] = {GenKind::SPlus, GenKind::SMinus, GenKind::TPlus, GenKind::TMinus};

SymbolicForm symbolic_for(GenKind kind, SubspaceRole role, const MultiplierPair& mult) {
    // Ratio convention: with (p, q) the ascending pair of coordinates other
    // than zero_index, the constraint is v[p] = ratio * v[q] mod c.
    switch (kind) {
        case GenKind::SPlus:
            return role == SubspaceRole::Range ? SymbolicForm{0, mult.mu} : SymbolicForm{0, mult.k};
        case GenKind::SMinus:
            return role == SubspaceRole::Range ? SymbolicForm{0, mult.k} : SymbolicForm{0, mult.mu};
        case GenKind::TPlus:
            return role == SubspaceRole::Range ? SymbolicForm{1, mult.k} : SymbolicForm{1, mult.mu};
        case GenKind::TMinus:
            return role == SubspaceRole::Range ? SymbolicForm{1, mult.mu} : SymbolicForm{1, mult.k};
    }
    return {};
}

std::vector<ModVec> sorted_unique(std::vector<ModVec> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool contains_sorted(const std::vector<ModVec>& sorted, const ModVec& x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

ModVec ModMap::apply(const ModVec& v) const {
    ModVec r{};
    for (int i = 0; i < 3; ++i)
        r[i] = mod_reduce(m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2], modulus);
    return r;
}

std::array<ModMap, 4> reduce_mod(const std::array<rot::GeneratorMap, 4>& gens,
                                 const PythagoreanTriple& t) {
    std::array<ModMap, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i].kind = gens[i].kind;
        out[i].modulus = t.c;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                out[i].m[r][c] = mod_reduce(static_cast<long long>(gens[i].m[r][c] % t.c), t.c);
    }
    return out;
}

MultiplierPair derived_multipliers(const PythagoreanTriple& t) {
    const long long c = t.c;
    const long long a = mod_reduce(t.a, c), b = mod_reduce(t.b, c);
    MultiplierPair mult;
    mult.k = mod_reduce(a * mod_inverse(b, c), c);
    mult.mu = mod_reduce(b * mod_inverse(a, c), c);
    // Defining congruences, re-verified rather than trusted.
    if (mod_reduce(mult.k * a, c) != mod_reduce(-b, c) || mod_reduce(mult.k * b, c) != a)
        throw Error("BAD_MULTIPLIER", "k fails its congruences");
    if (mod_reduce(mult.mu * a, c) != b || mod_reduce(mult.mu * b, c) != mod_reduce(-a, c))
        throw Error("BAD_MULTIPLIER", "mu fails its congruences");
    if (mod_reduce(mult.k * mult.mu, c) != 1)
        throw Error("BAD_MULTIPLIER", "k * mu != 1 mod c");
    return mult;
}

std::string role_name(SubspaceRole r) { return r == SubspaceRole::Range ? "range" : "kernel"; }

std::vector<ModVec> SymbolicForm::expand(SubspaceRole role, long long modulus) const {
    int p = -1, q = -1;
    for (int i = 0; i < 3; ++i) {
        if (i == zero_index) continue;
        if (p < 0)
            p = i;
        else
            q = i;
    }
    std::vector<ModVec> out;
    if (role == SubspaceRole::Range) {
        out.reserve(static_cast<std::size_t>(modulus));
        for (long long m = 0; m < modulus; ++m) {
            ModVec v{0, 0, 0};
            v[static_cast<std::size_t>(q)] = m;
            v[static_cast<std::size_t>(p)] = mod_reduce(ratio * m, modulus);
            out.push_back(v);
        }
    } else {
        out.reserve(static_cast<std::size_t>(modulus * modulus));
        for (long long free = 0; free < modulus; ++free)
            for (long long m = 0; m < modulus; ++m) {
                ModVec v{0, 0, 0};
                v[static_cast<std::size_t>(zero_index)] = free;
                v[static_cast<std::size_t>(q)] = m;
                v[static_cast<std::size_t>(p)] = mod_reduce(ratio * m, modulus);
                out.push_back(v);
            }
    }
    return sorted_unique(std::move(out));
}

std::pair<SubspaceDesc, SubspaceDesc> range_kernel(const ModMap& m, const MultiplierPair& pair,
                                                   long long max_modulus) {
    const long long c = m.modulus;
    if (c > max_modulus)
        throw Error("MODULUS_TOO_LARGE", "certificate enumeration is bounded to c <= " +
                                             std::to_string(max_modulus));
    std::vector<ModVec> image, null_set;
    for (long long x = 0; x < c; ++x)
        for (long long y = 0; y < c; ++y)
            for (long long z = 0; z < c; ++z) {
                ModVec v{x, y, z};
                ModVec w = m.apply(v);
                image.push_back(w);
                if (w == ModVec{0, 0, 0}) null_set.push_back(v);
            }
    image = sorted_unique(std::move(image));
    null_set = sorted_unique(std::move(null_set));

    SubspaceDesc range{m.kind, SubspaceRole::Range, symbolic_for(m.kind, SubspaceRole::Range, pair),
                       image};
    SubspaceDesc kernel{m.kind, SubspaceRole::Kernel,
                        symbolic_for(m.kind, SubspaceRole::Kernel, pair), null_set};

    if (range.symbolic.expand(SubspaceRole::Range, c) != image)
        throw Error("SUBSPACE_DISAGREEMENT",
                    "symbolic range of " + rot::kind_name(m.kind) + " disagrees with enumeration");
    if (kernel.symbolic.expand(SubspaceRole::Kernel, c) != null_set)
        throw Error("SUBSPACE_DISAGREEMENT",
                    "symbolic kernel of " + rot::kind_name(m.kind) + " disagrees with enumeration");
    return {range, kernel};
}

namespace {

struct CheckRecorder {
    std::vector<CheckResult> checks;
    bool all_pass = true;

    void add(const std::string& name, bool pass, std::optional<ModVec> witness = std::nullopt) {
        checks.push_back({name, pass, witness});
        all_pass = all_pass && pass;
    }
};

// Recomputes every derivable piece of the certificate and runs the freeness
// argument's checks against it.
void run_checks(const FreenessCertificate& cert, CheckRecorder& rec) {
    PythagoreanTriple t;
    try {
        t = PythagoreanTriple::make(cert.triple.a, cert.triple.b, cert.triple.c);
        rec.add("triple_primitive", true);
    } catch (const Error&) {
        rec.add("triple_primitive", false);
        return;
    }
    if (cert.modulus != t.c) {
        rec.add("modulus_matches_triple", false);
        return;
    }
    rec.add("modulus_matches_triple", true);

    auto expected_maps = reduce_mod(rot::make_generators(t), t);
    bool maps_ok = true;
    for (std::size_t i = 0; i < 4; ++i)
        maps_ok = maps_ok && cert.maps[i].kind == expected_maps[i].kind &&
                  cert.maps[i].m == expected_maps[i].m && cert.maps[i].modulus == t.c;
    rec.add("maps_match_generators", maps_ok);

    MultiplierPair mult;
    try {
        mult = derived_multipliers(t);
    } catch (const Error&) {
        rec.add("multipliers_valid", false);
        return;
    }
    rec.add("multipliers_valid",
            mult.k == cert.multipliers.k && mult.mu == cert.multipliers.mu);

    // Recompute subspaces exhaustively; certificate must match element lists,
    // symbolic forms, and the expected cardinalities c and c^2.
    std::array<std::vector<ModVec>, 4> ranges, kernels;
    for (std::size_t i = 0; i < 4; ++i) {
        std::pair<SubspaceDesc, SubspaceDesc> recomputed;
        try {
            recomputed = range_kernel(expected_maps[i], mult);
        } catch (const Error&) {
            rec.add("subspaces_recomputable", false);
            return;
        }
        auto& [range, kernel] = recomputed;
        ranges[i] = range.elements;
        kernels[i] = kernel.elements;
        const SubspaceDesc* stored_range = nullptr;
        const SubspaceDesc* stored_kernel = nullptr;
        for (const auto& s : cert.subspaces) {
            if (s.map_kind != kKinds[i]) continue;
            (s.role == SubspaceRole::Range ? stored_range : stored_kernel) = &s;
        }
        const std::string base = rot::kind_name(kKinds[i]);
        rec.add("range_" + base + "_matches",
                stored_range && stored_range->elements == range.elements &&
                    stored_range->symbolic.zero_index == range.symbolic.zero_index &&
                    stored_range->symbolic.ratio == range.symbolic.ratio &&
                    range.elements.size() == static_cast<std::size_t>(t.c));
        rec.add("kernel_" + base + "_matches",
                stored_kernel && stored_kernel->elements == kernel.elements &&
                    stored_kernel->symbolic.zero_index == kernel.symbolic.zero_index &&
                    stored_kernel->symbolic.ratio == kernel.symbolic.ratio &&
                    kernel.elements.size() == static_cast<std::size_t>(t.c) * t.c);
    }

    // (a) range(g) lies inside kernel(g^-1): composing g then g^-1 scales by
    // c^2, which vanishes mod c.
    for (std::size_t i = 0; i < 4; ++i) {
        std::size_t j = static_cast<std::size_t>(inverse_kind(kKinds[i]));
        bool ok = true;
        std::optional<ModVec> witness;
        for (const auto& v : ranges[i])
            if (!contains_sorted(kernels[j], v)) {
                ok = false;
                witness = v;
                break;
            }
        rec.add("range_" + rot::kind_name(kKinds[i]) + "_inside_kernel_" +
                    rot::kind_name(kKinds[j]),
                ok, witness);
    }

    // (b) every other ordered pair (g then h, h != g^-1) meets only in 0.
    // Same-kind pairs are included: reduced words may repeat a letter, and the
    // induction steps through those compositions too.
    for (std::size_t g = 0; g < 4; ++g)
        for (std::size_t h = 0; h < 4; ++h) {
            if (kKinds[h] == inverse_kind(kKinds[g])) continue;
            bool ok = true;
            std::optional<ModVec> witness;
            for (const auto& v : ranges[g]) {
                if (v == ModVec{0, 0, 0}) continue;
                if (contains_sorted(kernels[h], v)) {
                    ok = false;
                    witness = v;
                    break;
                }
            }
            rec.add("range_" + rot::kind_name(kKinds[g]) + "_meets_kernel_" +
                        rot::kind_name(kKinds[h]) + "_only_in_zero",
                    ok, witness);
        }

    // (c) the witness escapes every kernel, so every first letter moves it.
    ModVec w{mod_reduce(cert.witness[0], t.c), mod_reduce(cert.witness[1], t.c),
             mod_reduce(cert.witness[2], t.c)};
    rec.add("witness_nonzero", w != ModVec{0, 0, 0}, w);
    for (std::size_t i = 0; i < 4; ++i)
        rec.add("witness_escapes_kernel_" + rot::kind_name(kKinds[i]),
                !contains_sorted(kernels[i], w), w);
}

}  // namespace

FreenessCertificate build_certificate(const PythagoreanTriple& t, const ModVec& witness,
                                      long long max_modulus) {
    FreenessCertificate cert;
    cert.triple = PythagoreanTriple::make(t.a, t.b, t.c);
    cert.modulus = t.c;
    cert.maps = reduce_mod(rot::make_generators(cert.triple), cert.triple);
    cert.multipliers = derived_multipliers(cert.triple);
    cert.witness = {mod_reduce(witness[0], t.c), mod_reduce(witness[1], t.c),
                    mod_reduce(witness[2], t.c)};
    for (const auto& m : cert.maps) {
        auto [range, kernel] = range_kernel(m, cert.multipliers, max_modulus);
        cert.subspaces.push_back(std::move(range));
        cert.subspaces.push_back(std::move(kernel));
    }
    VerifyOutcome outcome = verify_certificate(cert);
    cert.checks = outcome.checks;
    cert.verdict = outcome.verdict;
    return cert;
}

VerifyOutcome verify_certificate(const FreenessCertificate& cert) {
    CheckRecorder rec;
    run_checks(cert, rec);
    VerifyOutcome out;
    out.checks = std::move(rec.checks);
    out.verdict = rec.all_pass ? "FREE" : "FAIL";
    return out;
}

namespace {

using nlohmann::ordered_json;

ordered_json mat_to_json(const ModMat& m) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : m) rows.push_back(row);
    return rows;
}

ModMat mat_from_json(const ordered_json& j) {
    ModMat m{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m[r][c] = j.at(r).at(c).get<long long>();
    return m;
}

GenKind kind_from_name(const std::string& name) {
    for (auto k : kKinds)
        if (rot::kind_name(k) == name) return k;
    throw Error("BAD_CERTIFICATE", "unknown map kind '" + name + "'");
}

}  // namespace

std::string certificate_to_json(const FreenessCertificate& cert, int indent) {
    ordered_json j;
    j["triple"] = {cert.triple.a, cert.triple.b, cert.triple.c};
    j["modulus"] = cert.modulus;
    ordered_json maps;
    for (const auto& m : cert.maps) maps[rot::kind_name(m.kind)] = mat_to_json(m.m);
    j["maps"] = maps;
    ordered_json subs = ordered_json::array();
    for (const auto& s : cert.subspaces) {
        ordered_json e;
        e["map"] = rot::kind_name(s.map_kind);
        e["role"] = role_name(s.role);
        e["symbolic"] = {{"zero_index", s.symbolic.zero_index}, {"ratio", s.symbolic.ratio}};
        ordered_json elems = ordered_json::array();
        for (const auto& v : s.elements) elems.push_back(v);
        e["elements"] = elems;
        subs.push_back(e);
    }
    j["subspaces"] = subs;
    j["multipliers"] = {{"k", cert.multipliers.k}, {"mu", cert.multipliers.mu}};
    j["witness"] = cert.witness;
    ordered_json checks = ordered_json::array();
    for (const auto& c : cert.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}});
    j["checks"] = checks;
    j["verdict"] = cert.verdict;
    return j.dump(indent) + "\n";
}

FreenessCertificate certificate_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error("BAD_CERTIFICATE", std::string("json parse failure: ") + e.what());
    }
    try {
        FreenessCertificate cert;
        cert.triple.a = j.at("triple").at(0).get<long long>();
        cert.triple.b = j.at("triple").at(1).get<long long>();
        cert.triple.c = j.at("triple").at(2).get<long long>();
        cert.modulus = j.at("modulus").get<long long>();
        for (std::size_t i = 0; i < 4; ++i) {
            cert.maps[i].kind = kKinds[i];
            cert.maps[i].modulus = cert.modulus;
            cert.maps[i].m = mat_from_json(j.at("maps").at(rot::kind_name(kKinds[i])));
        }
        for (const auto& e : j.at("subspaces")) {
            SubspaceDesc s;
            s.map_kind = kind_from_name(e.at("map").get<std::string>());
            std::string role = e.at("role").get<std::string>();
            if (role != "range" && role != "kernel")
                throw Error("BAD_CERTIFICATE", "unknown subspace role '" + role + "'");
            s.role = role == "range" ? SubspaceRole::Range : SubspaceRole::Kernel;
            s.symbolic.zero_index = e.at("symbolic").at("zero_index").get<int>();
            s.symbolic.ratio = e.at("symbolic").at("ratio").get<long long>();
            for (const auto& v : e.at("elements"))
                s.elements.push_back({v.at(0).get<long long>(), v.at(1).get<long long>(),
                                      v.at(2).get<long long>()});
            cert.subspaces.push_back(std::move(s));
        }
        cert.multipliers.k = j.at("multipliers").at("k").get<long long>();
        cert.multipliers.mu = j.at("multipliers").at("mu").get<long long>();
        cert.witness = {j.at("witness").at(0).get<long long>(),
                        j.at("witness").at(1).get<long long>(),
                        j.at("witness").at(2).get<long long>()};
        for (const auto& c : j.at("checks"))
            cert.checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(), std::nullopt});
        cert.verdict = j.at("verdict").get<std::string>();
        return cert;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("BAD_CERTIFICATE", std::string("malformed certificate: ") + e.what());
    }
}

}  // namespace paradox::cert

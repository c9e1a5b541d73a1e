// Command-line front door: freeness sweeps, modular certificates, word
// tools, the truncated F2 paradox check, piecewise-map instances, orbit and
// absorption demos, and lift-sample point-cloud export.
//
// Exit codes: 0 pass, 1 fail with an embedded counterexample, 2 usage or
// input error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "paradox/error.hpp"
#include "paradox/equidecomp.hpp"
#include "paradox/modular_cert.hpp"
#include "paradox/orbits.hpp"
#include "paradox/rotations.hpp"
#include "paradox/words.hpp"

namespace {

using nlohmann::ordered_json;
using namespace paradox;

struct GlobalOpts {
    bool json = false;
    unsigned threads = 1;
    std::string seed_order = "fixed";
};

rot::PythagoreanTriple parse_triple(const std::string& spec) {
    long long a, b, c;
    char comma1, comma2;
    std::istringstream is(spec);
    if (!(is >> a >> comma1 >> b >> comma2 >> c) || comma1 != ',' || comma2 != ',')
        throw Error("BAD_TRIPLE", "expected A,B,C, got '" + spec + "'");
    return rot::PythagoreanTriple::make(a, b, c);
}

std::array<long long, 3> parse_vec3(const std::string& spec) {
    long long x, y, z;
    char comma1, comma2;
    std::istringstream is(spec);
    if (!(is >> x >> comma1 >> y >> comma2 >> z) || comma1 != ',' || comma2 != ',')
        throw Error("BAD_VECTOR", "expected X,Y,Z, got '" + spec + "'");
    return {x, y, z};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("NO_SUCH_FILE", "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("CANNOT_WRITE", "cannot write " + path);
    out << content;
}

void emit(const GlobalOpts& g, const ordered_json& j, const std::string& text) {
    if (g.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

int run_verify_free(const GlobalOpts& g, const std::string& triple_spec, std::size_t max_len,
                    const std::string& witness_spec) {
    auto t = parse_triple(triple_spec);
    auto w = parse_vec3(witness_spec);
    rot::ScaledVec witness = rot::ScaledVec::ints(w[0], w[1], w[2], 0, t.c);
    auto rep = rot::brute_force_freeness(t, max_len, witness, g.threads);

    ordered_json j{{"command", "verify-free"},
                   {"triple", {t.a, t.b, t.c}},
                   {"max_len", max_len},
                   {"witness", {w[0], w[1], w[2]}},
                   {"words_checked", rep.words_checked},
                   {"pass", rep.pass}};
    std::ostringstream text;
    text << "verify-free triple=(" << t.a << "," << t.b << "," << t.c << ") max_len=" << max_len
         << " witness=(" << w[0] << "," << w[1] << "," << w[2] << ")\n"
         << "words_checked=" << rep.words_checked << "\n";
    if (rep.pass) {
        j["counterexample"] = nullptr;
        text << "PASS: no word matrix is a scaled identity and the witness image never "
                "vanishes mod c\n";
        emit(g, j, text.str());
        return 0;
    }
    j["counterexample"] = {{"word", rep.counterexample->str()}, {"check", rep.failed_check}};
    text << "FAIL: word " << rep.counterexample->str() << " violates " << rep.failed_check << "\n";
    emit(g, j, text.str());
    return 1;
}

int run_certificate_build(const GlobalOpts& g, const std::string& triple_spec,
                          const std::string& witness_spec, const std::string& out_path) {
    auto t = parse_triple(triple_spec);
    auto w = parse_vec3(witness_spec);
    auto cert = cert::build_certificate(t, {w[0], w[1], w[2]});
    std::string doc = cert::certificate_to_json(cert);
    if (!out_path.empty()) write_file(out_path, doc);

    bool free = cert.verdict == "FREE";
    if (g.json && out_path.empty()) {
        std::cout << doc;
        return free ? 0 : 1;
    }
    ordered_json j{{"command", "certificate build"},
                   {"triple", {t.a, t.b, t.c}},
                   {"verdict", cert.verdict},
                   {"out", out_path.empty() ? ordered_json(nullptr) : ordered_json(out_path)}};
    std::ostringstream text;
    text << "certificate triple=(" << t.a << "," << t.b << "," << t.c
         << ") verdict=" << cert.verdict << "\n";
    if (!out_path.empty()) text << "written to " << out_path << "\n";
    if (!free)
        for (const auto& chk : cert.checks)
            if (!chk.pass) {
                text << "failed check: " << chk.name << "\n";
                j["counterexample"] = {{"check", chk.name}};
                if (chk.witness)
                    j["counterexample"]["vector"] = {(*chk.witness)[0], (*chk.witness)[1],
                                                     (*chk.witness)[2]};
                break;
            }
    emit(g, j, text.str());
    return free ? 0 : 1;
}

int run_certificate_check(const GlobalOpts& g, const std::string& in_path) {
    auto cert = cert::certificate_from_json(read_file(in_path));
    auto outcome = cert::verify_certificate(cert);

    ordered_json j{{"command", "certificate check"},
                   {"in", in_path},
                   {"verdict", outcome.verdict}};
    ordered_json checks = ordered_json::array();
    std::ostringstream text;
    text << "certificate check " << in_path << "\n";
    for (const auto& chk : outcome.checks) {
        checks.push_back({{"name", chk.name}, {"pass", chk.pass}});
        if (!chk.pass) {
            text << "failed: " << chk.name;
            if (chk.witness)
                text << " witness (" << (*chk.witness)[0] << "," << (*chk.witness)[1] << ","
                     << (*chk.witness)[2] << ")";
            text << "\n";
            if (!j.contains("counterexample")) {
                j["counterexample"] = {{"check", chk.name}};
                if (chk.witness)
                    j["counterexample"]["vector"] = {(*chk.witness)[0], (*chk.witness)[1],
                                                     (*chk.witness)[2]};
            }
        }
    }
    j["checks"] = checks;
    text << "verdict: " << outcome.verdict << "\n";
    emit(g, j, text.str());
    return outcome.free() ? 0 : 1;
}

int run_words_reduce(const GlobalOpts& g, const std::string& input) {
    words::Word w = words::Word::from_string(input);
    emit(g, ordered_json{{"command", "words reduce"}, {"input", input}, {"reduced", w.str()}},
         w.str() + "\n");
    return 0;
}

int run_words_enumerate(const GlobalOpts& g, std::size_t max_len) {
    if (g.json) {
        ordered_json list = ordered_json::array();
        words::enumerate_reduced(max_len, [&](const words::Word& w) { list.push_back(w.str()); });
        std::cout << ordered_json{{"command", "words enumerate"},
                                  {"max_len", max_len},
                                  {"count", list.size()},
                                  {"words", list}}
                         .dump(2)
                  << "\n";
    } else {
        words::enumerate_reduced(max_len,
                                 [&](const words::Word& w) { std::cout << w.str() << "\n"; });
    }
    return 0;
}

int run_f2_paradox(const GlobalOpts& g, std::size_t max_len) {
    auto rep = words::verify_f2_paradox(max_len);
    ordered_json j{{"command", "f2-paradox"},
                   {"max_len", rep.max_len},
                   {"word_count", rep.word_count},
                   {"partition_ok", rep.partition_ok},
                   {"sigma_shift_ok", rep.sigma_shift_ok},
                   {"tau_shift_ok", rep.tau_shift_ok},
                   {"pass", rep.pass}};
    std::ostringstream text;
    text << "f2-paradox max_len=" << rep.max_len << " words=" << rep.word_count << "\n"
         << "partition: " << (rep.partition_ok ? "ok" : "FAIL") << "\n"
         << "sigma-shift bijection: " << (rep.sigma_shift_ok ? "ok" : "FAIL") << "\n"
         << "tau-shift bijection: " << (rep.tau_shift_ok ? "ok" : "FAIL") << "\n";
    if (rep.pass) {
        j["counterexample"] = nullptr;
        text << "PASS\n";
        emit(g, j, text.str());
        return 0;
    }
    j["counterexample"] = {{"word", rep.counterexample ? rep.counterexample->str() : ""},
                           {"detail", rep.detail}};
    text << "FAIL: " << rep.detail << "\n";
    emit(g, j, text.str());
    return 1;
}

int run_bsb(const GlobalOpts& g, const std::string& instance_path, long long eval_to) {
    auto inst = eq::parse_bsb_instance(read_file(instance_path));
    eq::PiecewiseMap h = eq::bsb_combine(inst.f, inst.g);

    ordered_json j{{"command", "bsb"}, {"instance", instance_path}};
    j["h"] = eq::piecewise_to_json(h);
    ordered_json values = ordered_json::array();
    std::ostringstream text;
    text << "bsb " << instance_path << ": combined bijection with " << h.piece_count()
         << " pieces\n";
    for (const auto& e : h.domain().sample_window(0, eval_to)) {
        auto y = h.apply(e);
        values.push_back({{"x", eq::elem_str(e)}, {"h", eq::elem_str(y)}});
        text << "h(" << eq::elem_str(e) << ") = " << eq::elem_str(y) << "\n";
    }
    j["values"] = values;
    emit(g, j, text.str());
    return 0;
}

int run_compose(const GlobalOpts& g, const std::string& instance_path) {
    auto inst = eq::parse_compose_instance(read_file(instance_path));
    eq::PiecewiseMap h = eq::compose_piecewise(inst.first, inst.second);
    ordered_json j{{"command", "compose"},
                   {"instance", instance_path},
                   {"piece_count", h.piece_count()},
                   {"piece_bound", inst.first.piece_count() * inst.second.piece_count()},
                   {"composed", eq::piecewise_to_json(h)}};
    std::ostringstream text;
    text << "compose " << instance_path << ": " << h.piece_count() << " pieces (bound "
         << inst.first.piece_count() * inst.second.piece_count() << ")\n";
    emit(g, j, text.str());
    return 0;
}

std::vector<rot::ScaledVec> parse_seed_file(const std::string& content, long long base) {
    std::vector<rot::ScaledVec> seeds;
    std::istringstream is(content);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long x, y, z;
        unsigned n = 0;
        char c1, c2;
        if (!(ls >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',')
            throw Error("BAD_SEED_FILE", "expected x,y,z[,exp] per line, got '" + line + "'");
        char c3;
        if (ls >> c3) {
            if (c3 != ',' || !(ls >> n))
                throw Error("BAD_SEED_FILE", "expected x,y,z[,exp] per line, got '" + line + "'");
        }
        seeds.push_back(rot::ScaledVec::ints(x, y, z, n, base));
    }
    return seeds;
}

int run_lift_sample(const GlobalOpts& g, const std::string& triple_spec,
                    const std::string& seeds_path, std::size_t max_len,
                    const std::string& out_path) {
    auto t = parse_triple(triple_spec);
    auto seeds = parse_seed_file(read_file(seeds_path), t.c);
    auto sample = orb::hausdorff_lift_sample(t, seeds, max_len, g.threads);

    bool as_json =
        g.json || (out_path.size() > 5 && out_path.substr(out_path.size() - 5) == ".json");
    std::string payload =
        as_json ? orb::lift_to_json(sample).dump(2) + "\n" : orb::lift_to_csv(sample);
    if (!out_path.empty())
        write_file(out_path, payload);
    else
        std::cout << payload;

    bool pass = sample.yz_disjoint && sample.shift_identity_ok;
    ordered_json j{{"command", "lift-sample"},
                   {"triple", {t.a, t.b, t.c}},
                   {"max_len", max_len},
                   {"seeds", seeds.size()},
                   {"points", sample.point_count},
                   {"cross_orbit_disjoint", sample.cross_orbit_disjoint},
                   {"yz_disjoint", sample.yz_disjoint},
                   {"shift_identity_ok", sample.shift_identity_ok},
                   {"pass", pass}};
    std::ostringstream text;
    text << "lift-sample triple=(" << t.a << "," << t.b << "," << t.c << ") L=" << max_len
         << " seeds=" << seeds.size() << " points=" << sample.point_count << "\n"
         << "cross_orbit_disjoint=" << (sample.cross_orbit_disjoint ? "yes" : "no (reported)")
         << " yz_disjoint=" << (sample.yz_disjoint ? "yes" : "NO")
         << " shift_identity=" << (sample.shift_identity_ok ? "ok" : "FAIL") << "\n"
         << (pass ? "PASS" : "FAIL") << "\n";
    if (!out_path.empty()) emit(g, j, text.str());
    return pass ? 0 : 1;
}

int run_orbit(const GlobalOpts& g, const std::string& gen, const std::string& seed_spec,
              unsigned exp, std::size_t steps, const std::string& triple_spec) {
    auto t = parse_triple(triple_spec);
    auto s = parse_vec3(seed_spec);
    words::Word w;
    if (gen == "sigma")
        w = words::Word::from_string("s");
    else if (gen == "tau")
        w = words::Word::from_string("t");
    else
        throw Error("BAD_GENERATOR", "--gen must be sigma or tau");
    auto pts = orb::orbit_segment(w, rot::ScaledVec::ints(s[0], s[1], s[2], exp, t.c), steps, t);
    auto distinct = orb::check_distinct(pts);

    if (g.json) {
        ordered_json arr = ordered_json::array();
        for (std::size_t i = 0; i < pts.size(); ++i)
            arr.push_back({{"step", i},
                           {"v", {pts[i].v[0].str(), pts[i].v[1].str(), pts[i].v[2].str()}},
                           {"exp", pts[i].n}});
        ordered_json j{{"command", "orbit"},
                       {"generator", gen},
                       {"steps", steps},
                       {"distinct", distinct.distinct},
                       {"points", arr}};
        if (!distinct.distinct)
            j["counterexample"] = {{"first", distinct.collision->first},
                                   {"second", distinct.collision->second}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "step,x_num,y_num,z_num,exp\n";
        for (std::size_t i = 0; i < pts.size(); ++i)
            std::cout << i << "," << pts[i].v[0] << "," << pts[i].v[1] << "," << pts[i].v[2] << ","
                      << pts[i].n << "\n";
        if (!distinct.distinct)
            std::cout << "collision: step " << distinct.collision->second << " repeats step "
                      << distinct.collision->first << "\n";
    }
    return distinct.distinct ? 0 : 1;
}

int run_absorb_demo(const GlobalOpts& g, std::size_t steps, const std::string& triple_spec) {
    auto t = parse_triple(triple_spec);
    auto rep = orb::center_absorption_demo(t, steps);
    std::ostringstream first;
    first << "(" << rep.first_iterate[0] << "," << rep.first_iterate[1] << ","
          << rep.first_iterate[2] << ")";
    ordered_json j{{"command", "absorb-demo"},
                   {"triple", {t.a, t.b, t.c}},
                   {"steps", rep.steps},
                   {"first_iterate", first.str()},
                   {"within_two_thirds", rep.within_two_thirds},
                   {"distinct", rep.distinct},
                   {"absorption_ok", rep.absorption_ok},
                   {"pass", rep.pass}};
    std::ostringstream text;
    text << "absorb-demo triple=(" << t.a << "," << t.b << "," << t.c << ") steps=" << rep.steps
         << "\n"
         << "first iterate: " << first.str() << "\n"
         << "within 2/3 of origin: " << (rep.within_two_thirds ? "yes" : "NO") << "\n"
         << "orbit distinct: " << (rep.distinct ? "yes" : "NO") << "\n"
         << "absorption identity: " << (rep.absorption_ok ? "ok" : "FAIL") << "\n"
         << (rep.pass ? "PASS" : "FAIL") << "\n";
    emit(g, j, text.str());
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalOpts global;
    CLI::App app{"exact rotation-group freeness and paradoxical-decomposition toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json", global.json, "machine-readable JSON reports");
    app.add_option("--threads", global.threads, "worker threads for sweeps")->default_val(1);
    app.add_option("--seed-order", global.seed_order, "seed processing order")
        ->check(CLI::IsMember({"fixed"}));

    int rc = 0;

    auto* verify = app.add_subcommand("verify-free", "brute-force freeness sweep");
    std::string vf_triple, vf_witness = "0,0,1";
    std::size_t vf_max_len = 6;
    verify->add_option("--triple", vf_triple, "primitive triple A,B,C")->required();
    verify->add_option("--max-len", vf_max_len, "word length cutoff")->required();
    verify->add_option("--witness", vf_witness, "integer witness vector X,Y,Z");
    verify->callback([&] { rc = run_verify_free(global, vf_triple, vf_max_len, vf_witness); });

    auto* certificate = app.add_subcommand("certificate", "modular freeness certificates");
    certificate->require_subcommand(1);
    auto* cert_build = certificate->add_subcommand("build", "build and self-verify");
    std::string cb_triple, cb_out, cb_witness = "0,0,1";
    cert_build->add_option("--triple", cb_triple, "primitive triple A,B,C")->required();
    cert_build->add_option("--out", cb_out, "output JSON path");
    cert_build->add_option("--witness", cb_witness, "witness vector X,Y,Z over Z_c");
    cert_build->callback(
        [&] { rc = run_certificate_build(global, cb_triple, cb_witness, cb_out); });
    auto* cert_check = certificate->add_subcommand("check", "re-verify a stored certificate");
    std::string cc_in;
    cert_check->add_option("--in", cc_in, "certificate JSON path")->required();
    cert_check->callback([&] { rc = run_certificate_check(global, cc_in); });

    auto* words_cmd = app.add_subcommand("words", "reduced-word tools");
    words_cmd->require_subcommand(1);
    auto* words_reduce = words_cmd->add_subcommand("reduce", "reduce an ascii word (s,S,t,T)");
    std::string wr_input;
    words_reduce->add_option("word", wr_input, "letters, e.g. sSt")->required();
    words_reduce->callback([&] { rc = run_words_reduce(global, wr_input); });
    auto* words_enum = words_cmd->add_subcommand("enumerate", "list reduced words");
    std::size_t we_max_len = 3;
    words_enum->add_option("--max-len", we_max_len, "length cutoff")->required();
    words_enum->callback([&] { rc = run_words_enumerate(global, we_max_len); });

    auto* f2 = app.add_subcommand("f2-paradox", "truncated free-group paradox check");
    std::size_t f2_max_len = 6;
    f2->add_option("--max-len", f2_max_len, "truncation cutoff (>= 2)")->required();
    f2->callback([&] { rc = run_f2_paradox(global, f2_max_len); });

    auto* bsb = app.add_subcommand("bsb", "combine two injections into a bijection");
    std::string bsb_instance;
    long long bsb_eval = 16;
    bsb->add_option("--instance", bsb_instance, "instance JSON path")->required();
    bsb->add_option("--eval", bsb_eval, "print h on [0, N]");
    bsb->callback([&] { rc = run_bsb(global, bsb_instance, bsb_eval); });

    auto* compose = app.add_subcommand("compose", "compose two piecewise maps");
    std::string compose_instance;
    compose->add_option("--instance", compose_instance, "instance JSON path")->required();
    compose->callback([&] { rc = run_compose(global, compose_instance); });

    auto* lift = app.add_subcommand("lift-sample", "orbit lift sample and point-cloud export");
    std::string ls_triple, ls_seeds, ls_out;
    std::size_t ls_max_len = 3;
    lift->add_option("--triple", ls_triple, "primitive triple A,B,C")->required();
    lift->add_option("--seeds", ls_seeds, "seed file: x,y,z[,exp] per line")->required();
    lift->add_option("--max-len", ls_max_len, "word length cutoff")->required();
    lift->add_option("--out", ls_out, "output path (.csv or .json)");
    lift->callback([&] { rc = run_lift_sample(global, ls_triple, ls_seeds, ls_max_len, ls_out); });

    auto* orbit = app.add_subcommand("orbit", "exact generator orbit of a seed");
    std::string or_gen, or_seed, or_triple = "3,4,5";
    unsigned or_exp = 0;
    std::size_t or_steps = 10;
    orbit->add_option("--gen", or_gen, "sigma or tau")->required();
    orbit->add_option("--seed", or_seed, "integer seed X,Y,Z")->required();
    orbit->add_option("--exp", or_exp, "seed exponent n (seed denotes v / c^n)");
    orbit->add_option("--steps", or_steps, "iterations")->required();
    orbit->add_option("--triple", or_triple, "primitive triple A,B,C");
    orbit->callback([&] { rc = run_orbit(global, or_gen, or_seed, or_exp, or_steps, or_triple); });

    auto* absorb = app.add_subcommand("absorb-demo", "center-absorption demonstration");
    std::size_t ab_steps = 100;
    std::string ab_triple = "3,4,5";
    absorb->add_option("--steps", ab_steps, "orbit length (>= 1)")->required();
    absorb->add_option("--triple", ab_triple, "primitive triple A,B,C");
    absorb->callback([&] { rc = run_absorb_demo(global, ab_steps, ab_triple); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        // Mathematical counterexamples exit 1; malformed input exits 2.
        return e.code() == "POLE_SEED" || e.code() == "ORBIT_COLLISION" ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}

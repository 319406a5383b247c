// Command line driver.
//
//   mm verify <suite>      run a verification suite over the generated corpus
//   mm modcoh hdr|pair|pull  cohomology of one modulus pair, dualities, pullbacks
//   mm nori end|mpo        intertwiner algebras and their dual coalgebras
//   mm laumon lm|compat|dual  linear Laumon models
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad usage or input.

#include <fstream>
#include <iostream>
#include <sstream>

#include "mm/suite.hpp"

namespace {

using namespace mm;

struct Args {
    std::vector<std::string> positional;
    std::map<std::string, std::string> opt;
    bool has(const std::string& k) const { return opt.count(k) != 0; }
    std::string get(const std::string& k, const std::string& dflt = "") const {
        auto it = opt.find(k);
        return it == opt.end() ? dflt : it->second;
    }
    int get_int(const std::string& k, int dflt) const {
        auto it = opt.find(k);
        return it == opt.end() ? dflt : std::stoi(it->second);
    }
};

const char* kUsage = R"txt(usage: mm <command> [options]

commands:
  verify <suite>          suite: dims, decomposition, duality, functoriality,
                          nori-end, laumon-compat, filtration, all
  modcoh hdr              dimensions and graded basis of one modulus pair
  modcoh pair             duality pairing of a pair against its swap
  modcoh pull             matrix of a pullback along --map
  nori end --rep FILE     intertwiner algebra of a quiver representation
  nori mpo                intertwiner algebra of the modulus pair system
  laumon lm               linear model of one modulus pair
  laumon compat           model dimensions against cohomology over a sweep
  laumon dual             Cartier dual block dimensions

options:
  --field SPEC     minimal polynomial, lowest degree first ("-2,0,1" is x^2-2;
                   a single entry means the rationals)        [default "1"]
  --Y D, --Z D     divisors, e.g. "2*(t) + 1*inf"; --Y2/--Z2 name the target
  --map M          rational map "(num)/(den)"
  --maxdeg N       corpus degree cap [6]      --components N  union cap [2]
  --budget N       sampled corpus size [18]   --seed N        corpus seed [0]
  --truncation N   model truncation order     --torsion-cap N unit class cap [24]
  --multipliers L  scaling constants, comma separated ("2,g,g+1")
  --nmax N         largest pole order in the quiver system [5]
  --rep FILE       quiver representation as JSON
  --json [PATH]    JSON output (to PATH if given)   --md PATH  markdown output
  --inject-fault   corrupt one matrix entry, a self test of the harness
)txt";

[[noreturn]] void usage_fail(const std::string& msg) {
    std::cerr << "mm: " << msg << "\n" << kUsage;
    std::exit(2);
}

Args parse_args(int argc, char** argv) {
    Args a;
    for (int i = 1; i < argc; ++i) {
        std::string s = argv[i];
        if (s.rfind("--", 0) == 0) {
            // --json is a flag when no path follows it
            if (s == "--inject-fault" ||
                (s == "--json" && (i + 1 >= argc || std::string(argv[i + 1]).rfind("--", 0) == 0))) {
                a.opt[s] = "";
            } else if (i + 1 < argc) {
                a.opt[s] = argv[++i];
            } else {
                usage_fail("missing value for " + s);
            }
        } else {
            a.positional.push_back(std::move(s));
        }
    }
    return a;
}

SuiteConfig config_from(const Args& a) {
    SuiteConfig cfg;
    cfg.field = a.get("--field", cfg.field);
    cfg.maxdeg = a.get_int("--maxdeg", cfg.maxdeg);
    cfg.components = a.get_int("--components", cfg.components);
    cfg.multipliers = a.get("--multipliers", cfg.multipliers);
    cfg.truncation = a.get_int("--truncation", cfg.truncation);
    cfg.torsion_cap = a.get_int("--torsion-cap", cfg.torsion_cap);
    cfg.seed = static_cast<unsigned long>(std::stoul(a.get("--seed", "0")));
    cfg.budget = a.get_int("--budget", cfg.budget);
    cfg.nori_nmax = a.get_int("--nmax", cfg.nori_nmax);
    cfg.inject_fault = a.has("--inject-fault");
    if (a.has("--json")) {
        cfg.format = "json";
        cfg.out_path = a.get("--json");
    } else if (a.has("--md")) {
        cfg.format = "markdown";
        cfg.out_path = a.get("--md");
    }
    return cfg;
}

void emit(const std::string& text, const SuiteConfig& cfg) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out_path);
    if (!f) throw IOError("cannot open " + cfg.out_path + " for writing");
    f << text;
    f.flush();
    if (!f.good()) throw IOError("write to " + cfg.out_path + " failed");
}

std::string json_mat(const KMat& m) {
    std::ostringstream o;
    o << "[";
    for (size_t r = 0; r < m.rows(); ++r) {
        if (r) o << ",";
        o << "[";
        for (size_t c = 0; c < m.cols(); ++c)
            o << (c ? "," : "") << "\"" << json_escape(m(r, c).str()) << "\"";
        o << "]";
    }
    o << "]";
    return o.str();
}

std::string json_mat(const QMat& m) {
    std::ostringstream o;
    o << "[";
    for (size_t r = 0; r < m.rows(); ++r) {
        if (r) o << ",";
        o << "[";
        for (size_t c = 0; c < m.cols(); ++c)
            o << (c ? "," : "") << "\"" << m(r, c).get_str() << "\"";
        o << "]";
    }
    o << "]";
    return o.str();
}

std::vector<std::string> graded_labels(const GradedCoh& g) {
    std::vector<std::string> out;
    for (int i = 0; i < g.red_dim(); ++i)
        out.push_back("red[" + std::to_string(i) + "]");
    for (const auto& b : g.u.blocks)
        for (size_t j = 0; j < b.reps.size(); ++j) {
            std::string at = b.p.infinite ? "inf" : format_poly(b.p.poly);
            out.push_back("U(" + at + ")[" + std::to_string(j) + "]");
        }
    for (const auto& b : g.v.blocks)
        for (size_t j = 0; j < b.reps.size(); ++j) {
            std::string at = b.p.infinite ? "inf" : format_poly(b.p.poly);
            out.push_back("V(" + at + ")[" + std::to_string(j) + "]");
        }
    return out;
}

ModulusTriple triple_from(const Args& a, const NFPtr& k, const char* ykey = "--Y",
                          const char* zkey = "--Z") {
    Divisor y = parse_divisor(a.get(ykey), k);
    Divisor z = parse_divisor(a.get(zkey), k);
    int comps = 1;
    for (const Divisor* d : {&y, &z})
        for (const auto& [p, m] : d->terms()) comps = std::max(comps, p.component + 1);
    return ModulusTriple(std::move(y), std::move(z), comps);
}

int cmd_verify(const Args& a) {
    if (a.positional.size() < 2) usage_fail("verify needs a suite name");
    SuiteConfig cfg = config_from(a);
    Report rep = run_suite(a.positional[1], cfg);
    return rep.all_pass() ? 0 : 1;
}

int cmd_modcoh(const Args& a) {
    if (a.positional.size() < 2) usage_fail("modcoh needs a subcommand");
    const std::string& sub = a.positional[1];
    SuiteConfig cfg = config_from(a);
    cfg.format = "json";
    NFPtr k = parse_field(cfg.field);
    std::ostringstream o;
    if (sub == "hdr") {
        ModulusTriple T = triple_from(a, k);
        GradedCoh g = hdr_compute(T, nullptr, false, cfg.truncation);
        CechH1 c = cech_truncated(T, cfg.truncation);
        o << "{\"schema\":\"" << kReportSchema << "\",\"dims\":{\"red\":" << g.red_dim()
          << ",\"u\":" << g.u.dim << ",\"v\":" << g.v.dim
          << ",\"total\":" << g.total_dim() << "},\"oracle\":" << hdr_dim_oracle(T)
          << ",\"cech\":" << c.dim << ",\"basis_labels\":[";
        auto labels = graded_labels(g);
        for (size_t i = 0; i < labels.size(); ++i)
            o << (i ? "," : "") << "\"" << json_escape(labels[i]) << "\"";
        o << "]}\n";
    } else if (sub == "pair") {
        ModulusTriple T = triple_from(a, k);
        DualityResult d = hdr_duality(T);
        o << "{\"schema\":\"" << kReportSchema << "\",\"left\":" << d.left.total_dim()
          << ",\"right\":" << d.right.total_dim() << ",\"gram\":" << json_mat(d.gram)
          << ",\"nondegenerate\":"
          << ((d.left.total_dim() == 0 || is_invertible(d.gram)) ? "true" : "false")
          << "}\n";
    } else if (sub == "pull") {
        ModulusTriple S = triple_from(a, k);
        ModulusTriple D = triple_from(a, k, "--Y2", "--Z2");
        RationalMap f = parse_map(a.get("--map"), k);
        KMat m = hdr_pull(f, S, D);
        o << "{\"schema\":\"" << kReportSchema << "\",\"rows\":" << m.rows()
          << ",\"cols\":" << m.cols() << ",\"matrix\":" << json_mat(m) << "}\n";
    } else {
        usage_fail("unknown modcoh subcommand: " + sub);
    }
    emit(o.str(), cfg);
    return 0;
}

int cmd_nori(const Args& a) {
    if (a.positional.size() < 2) usage_fail("nori needs a subcommand");
    const std::string& sub = a.positional[1];
    SuiteConfig cfg = config_from(a);
    cfg.format = "json";
    std::ostringstream o;
    if (sub == "end") {
        const std::string path = a.get("--rep");
        if (path.empty()) usage_fail("nori end needs --rep FILE");
        std::ifstream f(path);
        if (!f) throw IOError("cannot read " + path);
        std::stringstream buf;
        buf << f.rdbuf();
        QuiverRep rep = quiver_rep_from_json(buf.str());
        EndAlgebra alg = end_compute(rep);
        o << "{\"schema\":\"" << kReportSchema << "\",\"end_dim\":" << alg.dim()
          << ",\"vertices\":{";
        bool first = true;
        for (const auto& v : alg.verts) {
            o << (first ? "" : ",") << "\"" << json_escape(v) << "\":" << alg.dims.at(v);
            first = false;
        }
        o << "},\"basis\":" << json_mat(alg.basis) << "}\n";
    } else if (sub == "mpo") {
        NFPtr k = parse_field(cfg.field);
        QuiverRep rep = mpo_build(cfg.nori_nmax, k, parse_multipliers(cfg.multipliers, k));
        EndAlgebra alg = end_compute(rep);
        bool axioms = true;
        try {
            coalgebra_dual(alg);
        } catch (const AxiomViolation&) {
            axioms = false;
        }
        o << "{\"schema\":\"" << kReportSchema << "\",\"end_dim\":" << alg.dim()
          << ",\"field_degree\":" << k->deg() << ",\"basis\":" << json_mat(alg.basis)
          << ",\"coalgebra\":{\"dim\":" << alg.dim()
          << ",\"axioms_ok\":" << (axioms ? "true" : "false") << "}}\n";
        emit(o.str(), cfg);
        return axioms ? 0 : 1;
    } else {
        usage_fail("unknown nori subcommand: " + sub);
    }
    emit(o.str(), cfg);
    return 0;
}

int cmd_laumon(const Args& a) {
    if (a.positional.size() < 2) usage_fail("laumon needs a subcommand");
    const std::string& sub = a.positional[1];
    SuiteConfig cfg = config_from(a);
    if (sub == "compat") {
        if (a.has("--sweep-maxdeg")) cfg.maxdeg = a.get_int("--sweep-maxdeg", cfg.maxdeg);
        Report rep = run_suite("laumon-compat", cfg);
        return rep.all_pass() ? 0 : 1;
    }
    cfg.format = "json";
    NFPtr k = parse_field(cfg.field);
    ModulusTriple T = triple_from(a, k);
    LinearLaumonMotive m = lm_construct(T, cfg.torsion_cap);
    std::ostringstream o;
    if (sub == "lm") {
        RdRSpace r = r_dr(m);
        o << "{\"schema\":\"" << kReportSchema << "\",\"dims\":{\"L\":" << m.dimL
          << ",\"Vinf\":" << m.dimVinf << ",\"LieT\":" << m.dimLieT
          << ",\"LieU\":" << m.dimLieU << "},\"rdr\":{\"del\":" << r.del
          << ",\"inf\":" << r.inf << ",\"uni\":" << r.uni << ",\"total\":" << r.total()
          << "}}\n";
    } else if (sub == "dual") {
        LinearLaumonMotive d = cartier_dual_dims(m);
        o << "{\"schema\":\"" << kReportSchema << "\",\"dims\":{\"L\":" << d.dimL
          << ",\"Vinf\":" << d.dimVinf << ",\"LieT\":" << d.dimLieT
          << ",\"LieU\":" << d.dimLieU << "}}\n";
    } else {
        usage_fail("unknown laumon subcommand: " + sub);
    }
    emit(o.str(), cfg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Args a = parse_args(argc, argv);
    if (a.positional.empty()) usage_fail("missing command");
    try {
        const std::string& cmd = a.positional[0];
        if (cmd == "verify") return cmd_verify(a);
        if (cmd == "modcoh") return cmd_modcoh(a);
        if (cmd == "nori") return cmd_nori(a);
        if (cmd == "laumon") return cmd_laumon(a);
        usage_fail("unknown command: " + cmd);
    } catch (const ParseError& e) {
        std::cerr << "mm: parse error: " << e.what() << "\n";
        return 2;
    } catch (const BadIndex& e) {
        std::cerr << "mm: " << e.what() << "\n";
        return 2;
    } catch (const IOError& e) {
        std::cerr << "mm: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "mm: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "mm: " << e.what() << "\n";
        return 1;
    }
}

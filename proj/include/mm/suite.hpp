#ifndef MM_SUITE_HPP
#define MM_SUITE_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include "laumon.hpp"
#include "nori.hpp"
#include "parse.hpp"

// Verification-suite plumbing: a deterministic corpus of modulus triples and
// morphisms drawn from fixed place/map pools, per-suite check tasks executed
// over a shared cohomology cache, and JSON/markdown report emission.

namespace mm {

inline constexpr const char* kReportSchema = "modcoh/1";
inline constexpr const char* kCorpusVersion = "pool/1";

struct SuiteConfig {
    std::string field = "1";   // minimal polynomial, lowest degree first
    int maxdeg = 6;            // total degree cap for Y + Z
    int components = 2;        // component count cap for disjoint unions
    std::string multipliers;   // constants in g, comma separated; empty = defaults
    int truncation = -1;       // -1 = automatic
    int torsion_cap = 24;
    unsigned long seed = 0;
    int budget = 18;           // sampled triples on top of the pinned list
    int nori_nmax = 5;
    std::string out_path;      // empty = stdout
    std::string format = "markdown";
    bool inject_fault = false; // harness self-test: flips one matrix entry
};

struct CheckRecord {
    std::string name;
    bool pass = true;
    std::string witness; // machine-readable on failure
    std::string row;     // markdown table cells, dims suite only
    long millis = 0;
};

struct Report {
    std::string suite;
    std::string field;
    unsigned long seed = 0;
    std::vector<std::string> warnings;
    std::vector<CheckRecord> checks;

    int failed() const {
        int n = 0;
        for (const auto& c : checks)
            if (!c.pass) ++n;
        return n;
    }
    bool all_pass() const { return failed() == 0; }
};

inline std::vector<FE> parse_multipliers(const std::string& spec, const NFPtr& k) {
    std::vector<FE> out;
    if (spec.empty()) return out;
    size_t start = 0;
    while (start <= spec.size()) {
        size_t comma = spec.find(',', start);
        std::string piece =
            spec.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start);
        detail::Cursor c{piece};
        PolyV<FE> p = detail::parse_poly_expr(c, k);
        if (!c.done()) c.fail("trailing input after the multiplier");
        if (p_deg(p) > 0) throw ParseError("multiplier must be constant in t");
        out.push_back(p.empty() ? FE(0) : p[0]);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Corpus: triples over the fixed place pool {t, t-1, t+1, t^2-2, inf}, edges
// over the fixed map pool {2t, g t, t-1, t^2} closed under one composition,
// both sampled deterministically from the seed. Version string kCorpusVersion
// changes whenever either pool does.
// ---------------------------------------------------------------------------

struct CorpusEdge {
    RationalMap f;
    size_t src = 0, dst = 0; // indices into Corpus::triples
};

struct Corpus {
    NFPtr k;
    std::vector<ModulusTriple> triples; // single component
    std::vector<ModulusTriple> unions;  // two components
    std::vector<CorpusEdge> edges;
    std::vector<std::pair<size_t, size_t>> composable; // edge index pairs
};

namespace detail {

inline uint64_t mix64(uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::vector<Place> corpus_place_pool() {
    return {Place::finite({FE(0), FE(1)}), Place::finite({FE(-1), FE(1)}),
            Place::finite({FE(1), FE(1)}), Place::finite({FE(-2), FE(0), FE(1)}),
            Place::infinity()};
}

inline Divisor retag_component(const Divisor& d, int comp) {
    std::vector<std::pair<Place, int>> ts;
    for (auto [p, m] : d.terms()) {
        p.component = comp;
        ts.emplace_back(std::move(p), m);
    }
    return Divisor(std::move(ts));
}

inline std::vector<RationalMap> corpus_map_pool(const NFPtr& k) {
    std::vector<RationalMap> base;
    base.emplace_back(RF::from_poly({FE(0), FE(2)}));
    if (k->deg() > 1) base.emplace_back(RF::from_poly({FE(0), FE::gen(k)}));
    base.emplace_back(RF::from_poly({FE(-1), FE(1)}));
    base.emplace_back(RF::from_poly({FE(0), FE(0), FE(1)}));
    std::vector<RationalMap> pool{map_identity()};
    auto push = [&](const RationalMap& f) {
        for (const auto& g : pool)
            if (g == f) return;
        pool.push_back(f);
    };
    for (const auto& f : base) push(f);
    for (const auto& f : base)
        for (const auto& g : base) push(map_compose(f, g));
    return pool;
}

} // namespace detail

inline Corpus corpus_generate(const SuiteConfig& cfg) {
    if (cfg.maxdeg < 0 || cfg.components < 1 || cfg.budget < 0)
        throw BadIndex("corpus caps must be nonnegative");
    Corpus out;
    out.k = parse_field(cfg.field);
    if (cfg.maxdeg == 0) return out;

    const std::vector<Place> pool = detail::corpus_place_pool();

    // all effective divisors over the pool up to the degree cap, with a
    // support bitmask for fast disjointness
    struct Cand {
        Divisor d;
        unsigned mask = 0;
        int deg = 0;
    };
    std::vector<Cand> divs;
    std::vector<int> mult(pool.size(), 0);
    std::function<void(size_t, int)> rec = [&](size_t i, int left) {
        if (i == pool.size()) {
            Cand c;
            for (size_t j = 0; j < pool.size(); ++j)
                if (mult[j] > 0) {
                    c.d = c.d + mult[j] * Divisor::single(pool[j]);
                    c.mask |= 1u << j;
                }
            c.deg = c.d.degree();
            divs.push_back(std::move(c));
            return;
        }
        const int e = pool[i].infinite ? 1 : pool[i].deg();
        for (int m = 0; m * e <= left; ++m) {
            mult[i] = m;
            rec(i + 1, left - m * e);
        }
        mult[i] = 0;
    };
    rec(0, cfg.maxdeg);

    // pinned instances first, so published numbers do not move with the seed
    std::vector<ModulusTriple> pins;
    const Divisor p0 = Divisor::single(pool[0]);
    const Divisor p1 = Divisor::single(pool[1]);
    const Divisor pinf = Divisor::single(pool[4]);
    auto pin = [&](const ModulusTriple& t) {
        if (t.Y.degree() + t.Z.degree() <= cfg.maxdeg) pins.push_back(t);
    };
    pin(ModulusTriple(p0, pinf));
    pin(ModulusTriple(2 * p0, Divisor()));
    pin(ModulusTriple(p0 + p1, pinf));
    pin(ModulusTriple(2 * p0, 3 * pinf));
    for (int n = 2; n <= std::min(cfg.maxdeg, 6); ++n)
        pin(ModulusTriple(n * pinf, Divisor()));
    out.triples = pins;
    auto have = [&](const ModulusTriple& t) {
        for (const auto& u : out.triples)
            if (u == t) return true;
        return false;
    };

    // remaining candidates bucketed by total degree, sampled with a fixed
    // quota that favors the cheap low degrees
    std::vector<std::vector<ModulusTriple>> bucket(static_cast<size_t>(cfg.maxdeg) + 1);
    for (const auto& a : divs)
        for (const auto& b : divs) {
            if (a.mask & b.mask) continue;
            const int deg = a.deg + b.deg;
            if (deg == 0 || deg > cfg.maxdeg) continue;
            bucket[static_cast<size_t>(deg)].emplace_back(a.d, b.d);
        }
    int wsum = 0;
    for (int d = 1; d <= cfg.maxdeg; ++d) wsum += cfg.maxdeg + 1 - d;
    uint64_t rng = cfg.seed;
    for (int d = 1; d <= cfg.maxdeg; ++d) {
        auto& cands = bucket[static_cast<size_t>(d)];
        size_t quota = cfg.budget == 0
                           ? 0
                           : std::max<size_t>(
                                 1, static_cast<size_t>(cfg.budget) *
                                        static_cast<size_t>(cfg.maxdeg + 1 - d) /
                                        static_cast<size_t>(wsum));
        for (size_t i = 0; i < quota && i < cands.size(); ++i) {
            size_t j = i + static_cast<size_t>(detail::mix64(rng) % (cands.size() - i));
            std::swap(cands[i], cands[j]);
            if (!have(cands[i])) out.triples.push_back(cands[i]);
        }
    }

    // disjoint unions of consecutive sampled triples, one component each
    if (cfg.components >= 2) {
        for (size_t i = 0; i + 1 < out.triples.size() && out.unions.size() < 3; i += 2) {
            const ModulusTriple &a = out.triples[i], &b = out.triples[i + 1];
            out.unions.emplace_back(a.Y + detail::retag_component(b.Y, 1),
                                    a.Z + detail::retag_component(b.Z, 1), 2);
        }
    }

    // edges from the map pool; every emitted edge is re-validated
    const std::vector<RationalMap> maps = detail::corpus_map_pool(out.k);
    constexpr size_t kMaxEdges = 150;
    for (size_t i = 0; i < out.triples.size() && out.edges.size() < kMaxEdges; ++i)
        out.edges.push_back({map_identity(), i, i});
    for (const auto& f : maps) {
        if (f == map_identity()) continue;
        for (size_t i = 0; i < out.triples.size(); ++i)
            for (size_t j = 0; j < out.triples.size(); ++j) {
                if (out.edges.size() >= kMaxEdges) break;
                if (is_morphism_bar(f, out.triples[i], out.triples[j]))
                    out.edges.push_back({f, i, j});
            }
    }
    for (const auto& e : out.edges)
        if (!is_morphism_bar(e.f, out.triples[e.src], out.triples[e.dst]))
            throw InternalInconsistency("corpus edge fails its predicate");

    // composable edge pairs, non-identity combinations first
    constexpr size_t kMaxPairs = 60;
    for (int round = 0; round < 2; ++round)
        for (size_t a = 0; a < out.edges.size(); ++a)
            for (size_t b = 0; b < out.edges.size(); ++b) {
                if (out.composable.size() >= kMaxPairs) return out;
                if (out.edges[a].dst != out.edges[b].src) continue;
                const bool ids = out.edges[a].f == map_identity() ||
                                 out.edges[b].f == map_identity();
                if ((round == 0) == ids) continue;
                out.composable.emplace_back(a, b);
            }
    return out;
}

// ---------------------------------------------------------------------------
// Check execution. Tasks run on a pool capped by MM_THREADS; the report is
// assembled in task order regardless of scheduling.
// ---------------------------------------------------------------------------

using SuiteTask = std::pair<std::string, std::function<void(CheckRecord&)>>;

inline int suite_threads() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* e = std::getenv("MM_THREADS")) {
        long v = std::strtol(e, nullptr, 10);
        if (v >= 1 && static_cast<unsigned long>(v) < n) n = static_cast<unsigned>(v);
    }
    return static_cast<int>(n);
}

inline std::vector<CheckRecord> run_tasks(const std::vector<SuiteTask>& tasks) {
    std::vector<CheckRecord> out(tasks.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            CheckRecord& r = out[i];
            r.name = tasks[i].first;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                tasks[i].second(r);
            } catch (const std::exception& e) {
                r.pass = false;
                if (r.witness.empty()) r.witness = e.what();
            }
            r.millis = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                             std::chrono::steady_clock::now() - t0)
                                             .count());
        }
    };
    const int n = std::min<int>(suite_threads(), static_cast<int>(tasks.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

// Shared per-run cohomology cache. The injected fault flips one entry of the
// first comparison matrix with any entries at all; the decomposition suite
// must then fail with a witness.
struct CohCache {
    const Corpus& corpus;
    std::map<size_t, GradedCoh> computed;
    bool fault_pending = false;
    std::mutex mu;

    explicit CohCache(const Corpus& c, bool inject = false)
        : corpus(c), fault_pending(inject) {}

    const GradedCoh& get(size_t i) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = computed.find(i);
        if (it != computed.end()) return it->second;
        GradedCoh g = hdr_compute(corpus.triples[i]);
        if (fault_pending && g.b_cech.rows() > 0 && g.b_cech.cols() > 0) {
            g.b_cech(0, 0) = g.b_cech(0, 0) + FE(1);
            fault_pending = false;
        }
        return computed.emplace(i, std::move(g)).first->second;
    }
};

namespace detail {

template <class T>
std::string mat_str(const Mat<T>& m) {
    std::ostringstream o;
    o << "[";
    for (size_t r = 0; r < m.rows(); ++r) {
        if (r) o << ",";
        o << "[";
        for (size_t c = 0; c < m.cols(); ++c) {
            if (c) o << ",";
            if constexpr (std::is_same_v<T, Rat>)
                o << m(r, c).get_str();
            else
                o << m(r, c).str();
        }
        o << "]";
    }
    o << "]";
    return o.str();
}

inline Rat binom(unsigned long n, unsigned long k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rat(b);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Suite task builders. Each appends one task per corpus instance so reports
// carry per-instance witnesses.
// ---------------------------------------------------------------------------

namespace suites {

inline void dims(std::vector<SuiteTask>& ts, const Corpus& c, CohCache& cache,
                 const SuiteConfig& cfg) {
    for (size_t i = 0; i < c.triples.size(); ++i) {
        const ModulusTriple& T = c.triples[i];
        ts.emplace_back("dims: " + format_triple(T), [&, i, T](CheckRecord& r) {
            const GradedCoh& g = cache.get(i);
            const int oracle = hdr_dim_oracle(T);
            const CechH1 tr = cech_truncated(T, cfg.truncation);
            std::ostringstream row;
            row << "| " << format_divisor(T.Y) << " | " << format_divisor(T.Z)
                << " | " << g.red_dim() << " | " << g.u.dim << " | " << g.v.dim
                << " | " << g.total_dim() << " | " << oracle << " |";
            r.row = row.str();
            if (g.total_dim() != oracle || g.main.h1dim != oracle || tr.dim != oracle) {
                r.pass = false;
                r.witness = "{\"hdr\":" + std::to_string(g.total_dim()) +
                            ",\"cech\":" + std::to_string(tr.dim) +
                            ",\"oracle\":" + std::to_string(oracle) + "}";
            }
        });
    }
    for (const ModulusTriple& T : c.unions) {
        ts.emplace_back("dims (union): " + format_triple(T), [&, T](CheckRecord& r) {
            int total = 0;
            for (int comp = 0; comp < T.components; ++comp) {
                Divisor y = detail::retag_component(T.Y.restrict_component(comp), 0);
                Divisor z = detail::retag_component(T.Z.restrict_component(comp), 0);
                if (y.empty() && z.empty()) continue;
                total += cech_truncated(ModulusTriple(y, z), cfg.truncation).dim;
            }
            const int oracle = hdr_dim_oracle(T);
            if (total != oracle) {
                r.pass = false;
                r.witness = "{\"component_sum\":" + std::to_string(total) +
                            ",\"oracle\":" + std::to_string(oracle) + "}";
            }
        });
    }
}

inline void decomposition(std::vector<SuiteTask>& ts, const Corpus& c, CohCache& cache,
                          const SuiteConfig&) {
    for (size_t i = 0; i < c.triples.size(); ++i) {
        const ModulusTriple& T = c.triples[i];
        ts.emplace_back("decomposition: " + format_triple(T), [&, i, T](CheckRecord& r) {
            const GradedCoh& g = cache.get(i);
            KMat prod = g.b_cech * g.a_cech;
            if (!(prod == KMat::identity(g.a_cech.cols()))) {
                r.pass = false;
                r.witness = "{\"b_after_a\":" + detail::mat_str(prod) + "}";
                return;
            }
            const int uexp = T.Y.degree() - T.Y.red().degree();
            const int vexp = T.Z.degree() - T.Z.red().degree();
            if (g.u.dim != uexp || g.v.dim != vexp ||
                g.total_dim() != g.red_dim() + uexp + vexp) {
                r.pass = false;
                r.witness = "{\"red\":" + std::to_string(g.red_dim()) +
                            ",\"u\":" + std::to_string(g.u.dim) +
                            ",\"v\":" + std::to_string(g.v.dim) + "}";
            }
        });
    }
    for (const CorpusEdge& e : c.edges) {
        const ModulusTriple &S = c.triples[e.src], &D = c.triples[e.dst];
        ts.emplace_back("decomposition blocks: " + format_map(e.f) + " on " +
                            format_triple(S),
                        [&, e](CheckRecord& r) {
                            const GradedCoh& s = cache.get(e.src);
                            const GradedCoh& d = cache.get(e.dst);
                            KMat m = hdr_pull(e.f, s, d);
                            auto band = [](const GradedCoh& g, size_t i) {
                                if (i < static_cast<size_t>(g.red_dim())) return 0;
                                if (i < static_cast<size_t>(g.red_dim() + g.u.dim)) return 1;
                                return 2;
                            };
                            for (size_t i = 0; i < m.rows(); ++i)
                                for (size_t j = 0; j < m.cols(); ++j)
                                    if (band(s, i) != band(d, j) && !is_zero(m(i, j))) {
                                        r.pass = false;
                                        r.witness = "{\"pull\":" + detail::mat_str(m) + "}";
                                        return;
                                    }
                        });
    }
}

inline void duality(std::vector<SuiteTask>& ts, const Corpus& c, CohCache&,
                    const SuiteConfig&) {
    for (const ModulusTriple& T : c.triples) {
        ts.emplace_back("duality: " + format_triple(T), [T](CheckRecord& r) {
            DualityResult d = hdr_duality(T);
            if (d.left.total_dim() != d.right.total_dim()) {
                r.pass = false;
                r.witness = "{\"left\":" + std::to_string(d.left.total_dim()) +
                            ",\"right\":" + std::to_string(d.right.total_dim()) + "}";
                return;
            }
            if (d.left.total_dim() > 0 && !is_invertible(d.gram)) {
                r.pass = false;
                r.witness = "{\"gram\":" + detail::mat_str(d.gram) + "}";
                return;
            }
            for (const Divisor& D : {T.Y, T.Z}) {
                USpace u = u_space(D);
                if (u.dim == 0) continue;
                KMat g = uv_pairing(u, v_space(D));
                if (!is_invertible(g)) {
                    r.pass = false;
                    r.witness = "{\"uv_gram\":" + detail::mat_str(g) + "}";
                    return;
                }
            }
        });
    }
    constexpr size_t kMaxDualEdges = 40;
    size_t used = 0;
    for (const CorpusEdge& e : c.edges) {
        if (used++ >= kMaxDualEdges) break;
        const ModulusTriple &S = c.triples[e.src], &D = c.triples[e.dst];
        ts.emplace_back("duality transpose: " + format_map(e.f) + " on " +
                            format_triple(S),
                        [e, S, D](CheckRecord& r) {
                            // pairing-transpose identities: on the Y side the
                            // pullback acts on U and the pushforward on V, on
                            // the Z side the roles swap
                            KMat gys = uv_pairing(u_space(S.Y), v_space(S.Y));
                            KMat gyd = uv_pairing(u_space(D.Y), v_space(D.Y));
                            KMat lhs = u_pull(e.f, S.Y, D.Y).transpose() * gys;
                            KMat rhs = gyd * v_push(e.f, S.Y, D.Y);
                            if (!(lhs == rhs)) {
                                r.pass = false;
                                r.witness = "{\"side\":\"Y\",\"lhs\":" + detail::mat_str(lhs) +
                                            ",\"rhs\":" + detail::mat_str(rhs) + "}";
                                return;
                            }
                            KMat gzs = uv_pairing(u_space(S.Z), v_space(S.Z));
                            KMat gzd = uv_pairing(u_space(D.Z), v_space(D.Z));
                            KMat lhs2 = u_push(e.f, S.Z, D.Z).transpose() * gzd;
                            KMat rhs2 = gzs * v_pull(e.f, S.Z, D.Z);
                            if (!(lhs2 == rhs2)) {
                                r.pass = false;
                                r.witness = "{\"side\":\"Z\",\"lhs\":" + detail::mat_str(lhs2) +
                                            ",\"rhs\":" + detail::mat_str(rhs2) + "}";
                            }
                        });
    }
}

inline void functoriality(std::vector<SuiteTask>& ts, const Corpus& c, CohCache& cache,
                          const SuiteConfig&) {
    for (size_t i = 0; i < c.triples.size(); ++i) {
        const ModulusTriple& T = c.triples[i];
        ts.emplace_back("identity pullback: " + format_triple(T), [&, i, T](CheckRecord& r) {
            const GradedCoh& g = cache.get(i);
            KMat m = hdr_pull(map_identity(), g, g);
            if (!(m == KMat::identity(static_cast<size_t>(g.total_dim())))) {
                r.pass = false;
                r.witness = "{\"pull\":" + detail::mat_str(m) + "}";
                return;
            }
            LmMaps lm = lm_pull(map_identity(), T, T);
            if (!(lm.on_L == KMat::identity(lm.on_L.rows())) ||
                !(lm.on_Vinf == KMat::identity(lm.on_Vinf.rows())) ||
                !(lm.on_LieT == KMat::identity(lm.on_LieT.rows())) ||
                !(lm.on_LieU == KMat::identity(lm.on_LieU.rows()))) {
                r.pass = false;
                r.witness = "{\"lm_on_L\":" + detail::mat_str(lm.on_L) + "}";
            }
        });
        ts.emplace_back("residue theorem: " + format_triple(T), [T](CheckRecord& r) {
            LBasis ws = omega_space(T.Y + T.Z + 4 * Divisor::single(Place::infinity()));
            int used = 0;
            for (const RF& w : ws.elems) {
                if (used++ >= 4) break;
                FE total(0);
                for (const Place& p : polar_places(w)) total = total + residue(w, p);
                if (!is_zero(total)) {
                    r.pass = false;
                    r.witness = "{\"sum\":\"" + total.str() + "\"}";
                    return;
                }
            }
        });
    }
    for (const auto& [a, b] : c.composable) {
        const CorpusEdge &e1 = c.edges[a], &e2 = c.edges[b];
        const ModulusTriple &A = c.triples[e1.src], &C = c.triples[e2.dst];
        ts.emplace_back("composition: " + format_map(e1.f) + " then " + format_map(e2.f),
                        [&, e1, e2, A, C](CheckRecord& r) {
                            RationalMap comp = map_compose(e2.f, e1.f);
                            const GradedCoh& ga = cache.get(e1.src);
                            const GradedCoh& gb = cache.get(e1.dst);
                            const GradedCoh& gc = cache.get(e2.dst);
                            KMat whole = hdr_pull(comp, ga, gc);
                            KMat parts = hdr_pull(e1.f, ga, gb) * hdr_pull(e2.f, gb, gc);
                            if (!(whole == parts)) {
                                r.pass = false;
                                r.witness = "{\"whole\":" + detail::mat_str(whole) +
                                            ",\"parts\":" + detail::mat_str(parts) + "}";
                                return;
                            }
                            const ModulusTriple& B = c.triples[e1.dst];
                            LmMaps mw = lm_pull(comp, A, C);
                            LmMaps m1 = lm_pull(e1.f, A, B);
                            LmMaps m2 = lm_pull(e2.f, B, C);
                            if (!(mw.on_L == m1.on_L * m2.on_L) ||
                                !(mw.on_Vinf == m1.on_Vinf * m2.on_Vinf) ||
                                !(mw.on_LieT == m1.on_LieT * m2.on_LieT) ||
                                !(mw.on_LieU == m1.on_LieU * m2.on_LieU)) {
                                r.pass = false;
                                r.witness = "{\"block\":\"laumon\"}";
                            }
                        });
    }
}

inline void nori_end(std::vector<SuiteTask>& ts, const Corpus& c, CohCache&,
                     const SuiteConfig& cfg) {
    ts.emplace_back("intertwiners of the modulus pair representation",
                    [&c, cfg](CheckRecord& r) {
        const NFPtr& k = c.k;
        std::vector<FE> mult = parse_multipliers(cfg.multipliers, k);
        QuiverRep rep = mpo_build(cfg.nori_nmax, k, mult);
        EndAlgebra a = end_compute(rep);
        const int d = k->deg();
        if (a.dim() != d) {
            r.pass = false;
            r.witness = "{\"end_dim\":" + std::to_string(a.dim()) +
                        ",\"field_deg\":" + std::to_string(d) + "}";
            return;
        }
        // the algebra is exactly the diagonal image of the field
        QMat ftuples(a.basis.rows(), static_cast<size_t>(d));
        FE pw(Rat(1));
        for (int i = 0; i < d; ++i) {
            std::vector<Rat> col = mpo_field_tuple(a, k, pw.promote(k));
            for (size_t j = 0; j < col.size(); ++j)
                ftuples(j, static_cast<size_t>(i)) = col[j];
            pw = pw * FE::gen(k);
        }
        if (rank(ftuples) != static_cast<size_t>(d) ||
            rank(QMat::hstack(ftuples, a.basis)) != static_cast<size_t>(d)) {
            r.pass = false;
            r.witness = "{\"basis\":" + detail::mat_str(a.basis) + "}";
            return;
        }
        coalgebra_dual(a); // axioms checked inside
        comodule_structure(rep, rep.q.vertices, a, "P" + std::to_string(cfg.nori_nmax));
        // realization-map kernels are submodules
        for (const auto& e : rep.q.edges) {
            QMat ker = solve_kernel(rep.maps.at(e.label));
            if (!kernel_is_submodule(a, e.dst, ker)) {
                r.pass = false;
                r.witness = "{\"edge\":\"" + e.label + "\"}";
                return;
            }
        }
    });
    ts.emplace_back("scaling and shift matrices on the top vertex",
                    [&c, cfg](CheckRecord& r) {
        const int n = cfg.nori_nmax;
        GradedCoh g = hdr_compute(
            ModulusTriple(n * Divisor::single(Place::infinity()), Divisor()));
        const size_t dim = static_cast<size_t>(g.total_dim());
        std::vector<FE> mult = parse_multipliers(cfg.multipliers, c.k);
        FE a0 = mult.empty() ? FE(Rat(2)).promote(c.k) : mult[0];
        KMat sc = hdr_pull(RationalMap(RF::from_poly({FE(0), a0})), g, g);
        KMat esc(dim, dim);
        FE pw(Rat(1));
        for (size_t i = 0; i < dim; ++i) {
            pw = pw * inv(a0);
            esc(i, i) = pw;
        }
        if (!(sc == esc)) {
            r.pass = false;
            r.witness = "{\"scale\":" + detail::mat_str(sc) +
                        ",\"expected\":" + detail::mat_str(esc) + "}";
            return;
        }
        KMat sh = hdr_pull(RationalMap(RF::from_poly({FE(-1), FE(1)})), g, g);
        KMat esh(dim, dim);
        for (size_t i = 0; i < dim; ++i)
            for (size_t j = 0; j <= i; ++j) esh(i, j) = FE(detail::binom(i, j));
        if (!(sh == esh)) {
            r.pass = false;
            r.witness = "{\"shift\":" + detail::mat_str(sh) +
                        ",\"expected\":" + detail::mat_str(esh) + "}";
        }
    });
    ts.emplace_back("coalgebra fixtures", [](CheckRecord& r) {
        QuiverRep m2;
        m2.q.vertices = {"v"};
        m2.dims["v"] = 2;
        EndAlgebra full = end_compute(m2);
        QuiverRep nil = m2;
        nil.q.edges.push_back({"v", "v", "n"});
        QMat n(2, 2);
        n(0, 1) = Rat(1);
        nil.maps["n"] = n;
        EndAlgebra comm = end_compute(nil);
        if (full.dim() != 4 || comm.dim() != 2) {
            r.pass = false;
            r.witness = "{\"matrix_algebra\":" + std::to_string(full.dim()) +
                        ",\"commutant\":" + std::to_string(comm.dim()) + "}";
            return;
        }
        coalgebra_dual(full);
        coalgebra_dual(comm);
        comodule_structure(m2, {"v"}, full, "v");
    });
}

inline void laumon_compat(std::vector<SuiteTask>& ts, const Corpus& c, CohCache&,
                          const SuiteConfig&) {
    auto add = [&](const ModulusTriple& T) {
        ts.emplace_back("laumon compatibility: " + format_triple(T), [T](CheckRecord& r) {
            CompatReport rep = compati_check(T); // throws Mismatch with details
            if (rep.lm.total() != hdr_dim_oracle(T)) {
                r.pass = false;
                r.witness = "{\"rdr\":" + std::to_string(rep.lm.total()) +
                            ",\"oracle\":" + std::to_string(hdr_dim_oracle(T)) + "}";
            }
        });
    };
    for (const ModulusTriple& T : c.triples) add(T);
    for (const ModulusTriple& T : c.unions) add(T);
}

inline void filtration(std::vector<SuiteTask>& ts, const Corpus& c, CohCache&,
                       const SuiteConfig& cfg) {
    auto add = [&](const ModulusTriple& T) {
        ts.emplace_back("filtration: " + format_triple(T), [T, cfg](CheckRecord& r) {
            LinearLaumonMotive m = lm_construct(T, cfg.torsion_cap);
            auto dims_of = [](const LinearLaumonMotive& x) {
                return std::array<int, 4>{x.dimL, x.dimVinf, x.dimLieT, x.dimLieU};
            };
            auto fail = [&](const char* what, const LinearLaumonMotive& got,
                            const LinearLaumonMotive& want) {
                r.pass = false;
                auto g = dims_of(got), w = dims_of(want);
                std::ostringstream o;
                o << "{\"check\":\"" << what << "\",\"got\":[" << g[0] << "," << g[1]
                  << "," << g[2] << "," << g[3] << "],\"want\":[" << w[0] << ","
                  << w[1] << "," << w[2] << "," << w[3] << "]}";
                r.witness = o.str();
            };
            LinearLaumonMotive f1 = fil(m, 1);
            LinearLaumonMotive zred = lm_construct(ModulusTriple(T.Y, T.Z.red(), T.components),
                                                   cfg.torsion_cap);
            if (dims_of(f1) != dims_of(zred) || !(f1.u_et_uni == zred.u_et_uni))
                return fail("fil1", f1, zred);
            LinearLaumonMotive g1 = gr(m, 1);
            LinearLaumonMotive red =
                lm_construct(ModulusTriple(T.Y.red(), T.Z.red(), T.components),
                             cfg.torsion_cap);
            if (dims_of(g1) != dims_of(red)) return fail("gr1", g1, red);
            LinearLaumonMotive f2 = fil(m, 2);
            if (f2.dimL != 0 || f2.dimVinf != 0 || f2.dimLieT != 0 ||
                f2.dimLieU != m.dimLieU)
                return fail("fil2", f2, m);
            LinearLaumonMotive dual = cartier_dual_dims(m);
            LinearLaumonMotive swapped =
                lm_construct(ModulusTriple(T.Z, T.Y, T.components), cfg.torsion_cap);
            if (dims_of(dual) != dims_of(swapped)) return fail("dual", dual, swapped);
        });
    };
    for (const ModulusTriple& T : c.triples) add(T);
    for (const ModulusTriple& T : c.unions) add(T);
}

} // namespace suites

// ---------------------------------------------------------------------------
// Report emission.
// ---------------------------------------------------------------------------

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

inline std::string report_json(const Report& r) {
    std::ostringstream o;
    o << "{\"schema\":\"" << kReportSchema << "\",\"corpus\":\"" << kCorpusVersion
      << "\",\"suite\":\"" << json_escape(r.suite) << "\",\"field\":\""
      << json_escape(r.field) << "\",\"seed\":" << r.seed << ",\"warnings\":[";
    for (size_t i = 0; i < r.warnings.size(); ++i)
        o << (i ? "," : "") << "\"" << json_escape(r.warnings[i]) << "\"";
    o << "],\"passed\":" << (static_cast<int>(r.checks.size()) - r.failed())
      << ",\"failed\":" << r.failed() << ",\"checks\":[";
    for (size_t i = 0; i < r.checks.size(); ++i) {
        const CheckRecord& c = r.checks[i];
        o << (i ? "," : "") << "{\"name\":\"" << json_escape(c.name) << "\",\"status\":\""
          << (c.pass ? "pass" : "fail") << "\"";
        if (!c.witness.empty()) o << ",\"witness\":\"" << json_escape(c.witness) << "\"";
        o << ",\"ms\":" << c.millis << "}";
    }
    o << "]}\n";
    return o.str();
}

inline std::string report_markdown(const Report& r) {
    std::ostringstream o;
    o << "# verification suite: " << r.suite << "\n\n";
    o << "field: `" << r.field << "`  seed: " << r.seed << "  corpus: " << kCorpusVersion
      << "\n\n";
    for (const auto& w : r.warnings) o << "> warning: " << w << "\n\n";
    bool table = false;
    for (const auto& c : r.checks)
        if (!c.row.empty()) table = true;
    if (table) {
        o << "| Y | Z | red | U | V | total | oracle |\n";
        o << "|---|---|---|---|---|---|---|\n";
        for (const auto& c : r.checks)
            if (!c.row.empty()) o << c.row << "\n";
        o << "\n";
    }
    for (const auto& c : r.checks) {
        o << "- " << (c.pass ? "pass" : "FAIL") << ": " << c.name << " (" << c.millis
          << " ms)\n";
        if (!c.pass && !c.witness.empty()) o << "  witness: `" << c.witness << "`\n";
    }
    o << "\nresult: ";
    if (r.checks.empty())
        o << "no checks run\n";
    else if (r.all_pass())
        o << "all " << r.checks.size() << " checks passed\n";
    else
        o << r.failed() << " of " << r.checks.size() << " checks failed\n";
    return o.str();
}

inline void report_write(const Report& r, const SuiteConfig& cfg) {
    const std::string text = cfg.format == "json" ? report_json(r) : report_markdown(r);
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

inline Report run_suite(const std::string& name, const SuiteConfig& cfg) {
    static const std::vector<std::string> known{"dims",        "decomposition",
                                                "duality",     "functoriality",
                                                "nori-end",    "laumon-compat",
                                                "filtration",  "all"};
    if (std::find(known.begin(), known.end(), name) == known.end())
        throw BadIndex("unknown suite: " + name);
    Report rep;
    rep.suite = name;
    rep.field = cfg.field;
    rep.seed = cfg.seed;

    Corpus corpus = corpus_generate(cfg);
    CohCache cache(corpus, cfg.inject_fault);
    if (corpus.triples.empty() && corpus.unions.empty())
        rep.warnings.push_back("empty corpus; all checks pass vacuously");

    std::vector<SuiteTask> tasks;
    const bool all = name == "all";
    if (!corpus.triples.empty() || !corpus.unions.empty()) {
        if (all || name == "dims") suites::dims(tasks, corpus, cache, cfg);
        if (all || name == "decomposition") suites::decomposition(tasks, corpus, cache, cfg);
        if (all || name == "duality") suites::duality(tasks, corpus, cache, cfg);
        if (all || name == "functoriality") suites::functoriality(tasks, corpus, cache, cfg);
        if (all || name == "nori-end") suites::nori_end(tasks, corpus, cache, cfg);
        if (all || name == "laumon-compat") suites::laumon_compat(tasks, corpus, cache, cfg);
        if (all || name == "filtration") suites::filtration(tasks, corpus, cache, cfg);
    }
    rep.checks = run_tasks(tasks);
    report_write(rep, cfg);
    return rep;
}

// ---------------------------------------------------------------------------
// Minimal JSON reader for quiver representation files.
// ---------------------------------------------------------------------------

namespace detail {

struct JValue {
    enum Kind { Null, Num, Str, Arr, Obj } kind = Null;
    Rat num;
    std::string str;
    std::vector<JValue> arr;
    std::vector<std::pair<std::string, JValue>> obj;

    const JValue& at(const std::string& key) const {
        for (const auto& [k, v] : obj)
            if (k == key) return v;
        throw ParseError("missing key: " + key);
    }
};

inline JValue json_parse_value(Cursor& c);

inline std::string json_parse_string(Cursor& c) {
    if (!c.eat('"')) c.fail("expected '\"'");
    std::string out;
    while (c.pos < c.s.size() && c.s[c.pos] != '"') {
        char ch = c.s[c.pos++];
        if (ch == '\\') {
            if (c.pos >= c.s.size()) c.fail("unterminated escape");
            char e = c.s[c.pos++];
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += e;
            }
        } else {
            out += ch;
        }
    }
    if (c.pos >= c.s.size()) c.fail("unterminated string");
    ++c.pos;
    return out;
}

inline JValue json_parse_value(Cursor& c) {
    JValue v;
    char ch = c.peek();
    if (ch == '{') {
        c.eat('{');
        v.kind = JValue::Obj;
        if (!c.eat('}')) {
            do {
                std::string key = json_parse_string(c);
                if (!c.eat(':')) c.fail("expected ':'");
                v.obj.emplace_back(std::move(key), json_parse_value(c));
            } while (c.eat(','));
            if (!c.eat('}')) c.fail("expected '}'");
        }
    } else if (ch == '[') {
        c.eat('[');
        v.kind = JValue::Arr;
        if (!c.eat(']')) {
            do v.arr.push_back(json_parse_value(c));
            while (c.eat(','));
            if (!c.eat(']')) c.fail("expected ']'");
        }
    } else if (ch == '"') {
        std::string s = json_parse_string(c);
        // rationals may be quoted as "p/q"
        if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-') &&
            s.find('/') != std::string::npos) {
            v.kind = JValue::Num;
            v.num = Rat(s);
            v.num.canonicalize();
        } else {
            v.kind = JValue::Str;
            v.str = std::move(s);
        }
    } else if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) {
        c.skip();
        size_t start = c.pos;
        if (c.s[c.pos] == '-') ++c.pos;
        while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos])))
            ++c.pos;
        std::string whole = c.s.substr(start, c.pos - start);
        v.kind = JValue::Num;
        v.num = Rat(whole);
        if (c.pos < c.s.size() && c.s[c.pos] == '.') {
            ++c.pos;
            size_t fs = c.pos;
            while (c.pos < c.s.size() &&
                   std::isdigit(static_cast<unsigned char>(c.s[c.pos])))
                ++c.pos;
            std::string frac = c.s.substr(fs, c.pos - fs);
            Rat fpart(frac + "/1" + std::string(frac.size(), '0'));
            fpart.canonicalize();
            if (sgn(v.num) < 0 || whole == "-0")
                v.num = v.num - fpart;
            else
                v.num = v.num + fpart;
        }
    } else {
        c.fail("expected a JSON value");
    }
    return v;
}

} // namespace detail

inline QuiverRep quiver_rep_from_json(const std::string& raw) {
    std::string text = raw;
    for (char& ch : text)
        if (ch == '\n' || ch == '\r') ch = ' ';
    detail::Cursor c{text};
    detail::JValue root = detail::json_parse_value(c);
    if (!c.done()) c.fail("trailing input after the document");
    if (root.kind != detail::JValue::Obj) throw ParseError("expected a JSON object");
    QuiverRep rep;
    for (const auto& [name, dim] : root.at("vertices").obj) {
        rep.q.vertices.push_back(name);
        rep.dims[name] = static_cast<int>(dim.num.get_num().get_si());
    }
    for (const auto& e : root.at("edges").arr) {
        Quiver::Edge edge{e.at("src").str, e.at("dst").str, e.at("label").str};
        const auto& rows = e.at("matrix").arr;
        const size_t nr = rows.size();
        const size_t nc = nr ? rows[0].arr.size() : 0;
        QMat m(nr, nc);
        for (size_t i = 0; i < nr; ++i) {
            if (rows[i].arr.size() != nc) throw ParseError("ragged matrix");
            for (size_t j = 0; j < nc; ++j) m(i, j) = rows[i].arr[j].num;
        }
        rep.maps[edge.label] = std::move(m);
        rep.q.edges.push_back(std::move(edge));
    }
    return rep;
}

} // namespace mm

#endif

#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "realjw/bss/pages.hpp"
#include "realjw/error.hpp"
#include "realjw/fgl/formal_group.hpp"
#include "realjw/projring/ring.hpp"

namespace realjw::obstruct {

inline int binary_digit_sum(std::int64_t m) { return std::popcount(static_cast<std::uint64_t>(m)); }

/// RP^{2n} in R^{2k+1}; m is absent when (n, k) were given directly.
struct Parameters {
    std::optional<std::int64_t> m;
    int alpha_m = 0;
    std::int64_t n = 0;
    std::int64_t k = 0;
    int m_mod8 = 0;
    int alpha_mod8 = 0;

    std::int64_t source_dim() const { return 2 * n; }
    std::int64_t target_dim() const { return 2 * k + 1; }
};

inline Parameters derive_parameters(std::int64_t m)
{
    if (m < 1)
        throw Error(ErrorCode::invalid_argument, "m must be positive");
    Parameters p;
    p.m = m;
    p.alpha_m = binary_digit_sum(m);
    p.n = m + p.alpha_m - 1;
    p.k = 2 * m - p.alpha_m;
    p.m_mod8 = static_cast<int>(m % 8);
    p.alpha_mod8 = p.alpha_m % 8;
    return p;
}

inline Parameters parameters_from_nk(std::int64_t n, std::int64_t k)
{
    if (n < 1 || k < 1)
        throw Error(ErrorCode::invalid_argument, "n and k must be positive");
    Parameters p;
    p.n = n;
    p.k = k;
    return p;
}

struct GateReport {
    int k_mod8 = 0;
    int n_mod8 = 0;
    bool k_ok = false;
    bool n_ok = false;
    std::string residue_class; // "(6,2)", "(1,0)" or empty
    bool pass() const { return k_ok && n_ok; }
};

inline GateReport check_gates(const Parameters& p)
{
    GateReport g;
    g.k_mod8 = static_cast<int>(p.k % 8);
    g.n_mod8 = static_cast<int>(p.n % 8);
    g.k_ok = g.k_mod8 == 2;
    g.n_ok = g.n_mod8 == 0 || g.n_mod8 == 7;
    if (p.m) {
        if (p.m_mod8 == 6 && p.alpha_mod8 == 2)
            g.residue_class = "(6,2)";
        else if (p.m_mod8 == 1 && p.alpha_mod8 == 0)
            g.residue_class = "(1,0)";
    }
    return g;
}

/// Desk-scale limits. alpha is the cap A; stability reruns at A + 4.
struct Caps {
    int alpha = 12;
    int max_L = 16;
    std::int64_t max_N = 64;
    std::int64_t max_cells = 600; // n * (8K+5), size of the u1,u2 grid
};

/// Cap overrides from the environment: ER2_ALPHA_CAP, ER2_MAX_N.
inline Caps caps_from_env(Caps c = {})
{
    auto read = [](const char* name) -> std::optional<long long> {
        const char* v = std::getenv(name);
        if (!v || !*v)
            return std::nullopt;
        try {
            std::size_t used = 0;
            long long x = std::stoll(v, &used);
            if (used != std::string(v).size())
                throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument, std::string(name) + " is not an integer");
        }
    };
    if (auto a = read("ER2_ALPHA_CAP"))
        c.alpha = static_cast<int>(*a);
    if (auto n = read("ER2_MAX_N"))
        c.max_N = *n;
    return c;
}

struct LChoice {
    int L = 0;
    std::int64_t K = 0;
    std::int64_t N = 0;
    std::int64_t M = 0;
    bool side_condition = false; // n <= 8M < 8M+8 < 8K+5
};

/// M = ceil(n/8): the smallest M with n <= 8M (and hence 2n <= 16M + 16).
inline LChoice l_choice(std::int64_t n, std::int64_t k, int L)
{
    LChoice c;
    c.L = L;
    std::int64_t r = (std::int64_t{1} << L) - 2 * k - 3;
    c.K = (r - 9) / 16;
    c.N = (std::int64_t{1} << (L - 1)) - n;
    c.M = (n + 7) / 8;
    c.side_condition = n <= 8 * c.M && 8 * c.M + 8 < 8 * c.K + 5;
    return c;
}

inline bool l_admissible(std::int64_t n, std::int64_t k, int L)
{
    if (L < 2 || L > 62)
        return false;
    std::int64_t r = (std::int64_t{1} << L) - 2 * k - 3;
    if (r < 25 || (r - 9) % 16 != 0) // K >= 1
        return false;
    auto c = l_choice(n, k, L);
    return c.N >= 1 && c.side_condition;
}

/// Admissible L in increasing order, starting at from_L; throws CapExceeded when the first
/// admissible L is beyond desk scale.
inline LChoice choose_L(std::int64_t n, std::int64_t k, const Caps& caps, int from_L = 2)
{
    if (k % 8 != 2)
        throw Error(ErrorCode::side_condition_failed, "k must be = 2 mod 8 for 2^L - 2k - 3 = 16K + 9");
    for (int L = from_L; L <= 62; ++L) {
        if (!l_admissible(n, k, L))
            continue;
        auto c = l_choice(n, k, L);
        if (L > caps.max_L || c.N > caps.max_N || n * (8 * c.K + 5) > caps.max_cells)
            throw Error(ErrorCode::cap_exceeded,
                        "first admissible L = " + std::to_string(L) + " (K = " + std::to_string(c.K) +
                            ", N = " + std::to_string(c.N) + ", u-grid " + std::to_string(n) + " x " +
                            std::to_string(8 * c.K + 5) + ") is beyond desk scale (max N " +
                            std::to_string(caps.max_N) + ", max grid " + std::to_string(caps.max_cells) + ")");
        return c;
    }
    throw Error(ErrorCode::cap_exceeded, "no admissible L below 2^62");
}

/// One odd-degree E^1 class of RP^{2n} ^ RP^{16K+9}: v2^s alpha^k u1^i (i_{16K+9} or z_{16K-33}).
struct OddClass {
    bool z = false;
    int s = 0;
    int alpha = 0;
    int i = 0;

    friend auto operator<=>(const OddClass&, const OddClass&) = default;
};

inline int degree(const OddClass& c, std::int64_t K)
{
    long long d = -6LL * c.s - 32LL * c.alpha - 16LL * c.i + (c.z ? 16 * K - 33 : 16 * K + 9);
    return static_cast<int>(((d % 48) + 48) % 48);
}

inline std::string to_string(const OddClass& c, std::int64_t K)
{
    std::string s;
    if (c.s)
        s += "v2^" + std::to_string(c.s) + "*";
    if (c.alpha)
        s += "alpha^" + std::to_string(c.alpha) + "*";
    if (c.i)
        s += "u1^" + std::to_string(c.i) + "*";
    return s + (c.z ? "z_" + std::to_string(16 * K - 33) : "i_" + std::to_string(16 * K + 9));
}

struct NonImageCheck {
    OddClass target;
    int target_degree = 0;
    int source_degree = 0;
    std::vector<OddClass> sources; // odd-degree classes in the source degree
    std::vector<OddClass> hits;    // sources whose d^1 is the target mod 2
    int even_sources = 0;          // even-part classes in the source degree
    bool not_an_image() const { return hits.empty() && even_sources == 0; }
};

struct D1Value {
    std::optional<OddClass> term;
    int two_valuation = 0;
};

/// d^1 = v2^{-3}(1 - c) with d^1(z_{16K-33}) = 0: on v2^s alpha^k u1^i y it is
/// 2 v2^{s-3} alpha^k u1^i y for odd s and 0 for even s.
inline D1Value d1_value(const OddClass& c)
{
    if (c.s % 2 == 0)
        return {};
    OddClass t = c;
    t.s = (c.s + 5) % 8;
    return {t, 1};
}

/// Enumerates every E^1 class in degree |u1^n i_{16K+9}| - |d^1| and checks that none
/// hits u1^n i_{16K+9} mod 2.
inline NonImageCheck d1_non_image(std::int64_t n, std::int64_t K, int alpha_cap)
{
    NonImageCheck r;
    r.target = {false, 0, 0, static_cast<int>(n)};
    r.target_degree = degree(r.target, K);
    r.source_degree = ((r.target_degree - bss::differential_degree(1)) % 48 + 48) % 48;
    for (int z = 0; z < 2; ++z)
        for (int s = 0; s < 8; ++s)
            for (int a = 0; a <= alpha_cap; ++a)
                for (int i = z ? 0 : 1; z ? i < n : i <= n; ++i) {
                    OddClass c{z == 1, s, a, i};
                    if (degree(c, K) != r.source_degree)
                        continue;
                    r.sources.push_back(c);
                    auto v = d1_value(c);
                    if (v.term && v.two_valuation == 0 && *v.term == r.target)
                        r.hits.push_back(c);
                }
    for (int s = 0; s < 8; ++s)
        for (int a = 0; a <= alpha_cap; ++a)
            for (std::int64_t i = 1; i <= n; ++i)
                for (std::int64_t j = 1; j <= 8 * K + 5; ++j) {
                    long long d = -6LL * s - 32LL * a - 16 * (i + j);
                    if (((d % 48) + 48) % 48 == r.source_degree)
                        ++r.even_sources;
                }
    return r;
}

struct Run {
    projring::Strategy strategy;
    int alpha_cap = 0;
    std::set<projring::Key> survivors;
    std::set<projring::Key> uncertified;
    int dropped_off_16 = 0; // terms outside degree 16*
    std::int64_t steps = 0;
};

enum class Verdict { nonzero, inconclusive };

struct Report {
    Parameters params;
    GateReport gates;
    LChoice choice;
    Caps caps;
    std::vector<Run> runs;
    std::set<projring::Key> survivors; // from the first run
    bool stable = false;
    bool no_alpha_u2_terms = false;
    bool no_pure_powers = false;
    std::optional<NonImageCheck> top_column;
    Verdict verdict = Verdict::inconclusive;
    std::int64_t work_ring_terms = 0;

    std::string statement() const
    {
        return "RP^{" + std::to_string(params.source_dim()) + "} does not immerse in R^{" +
               std::to_string(params.target_dim()) + "}";
    }
};

namespace detail {

inline int log_depth_for(int order)
{
    int N = 1;
    while ((1 << (N + 1)) <= order)
        ++N;
    if (N > fgl::kMaxLogDepth)
        throw Error(ErrorCode::cap_too_small, "u-range needs log depth " + std::to_string(N));
    return N;
}

inline Run run_once(const projring::SpaceSpec& space, std::int64_t N, projring::Strategy st, int alpha_cap)
{
    projring::Caps rc;
    rc.alpha = alpha_cap;
    const int order = projring::required_two_series_order(space, rc);
    const int top = space.n + 8 * space.K + 5;
    const int f_order = std::max<int>(4, top - static_cast<int>(N) + 1);
    auto log = fgl::build_log(fgl::Convention::araki, log_depth_for(std::max(order, f_order)));
    auto two = fgl::rescale_to_er2(fgl::two_series_from_log(log, order), alpha_cap, "u");
    auto F = fgl::rescale_to_er2(fgl::fgl_from_log(log, f_order), alpha_cap);
    auto ring = projring::make_ring(space, two, rc, F);
    auto nf = projring::fgl_sum_power(static_cast<int>(N), ring, st);
    Run r{st, alpha_cap, {}, {}, 0, nf.steps};
    for (const auto& k : nf.terms) {
        if (projring::RingPresentation::degree(k) % 16 != 0) {
            ++r.dropped_off_16;
            continue;
        }
        (nf.certified(k) ? r.survivors : r.uncertified).insert(k);
    }
    return r;
}

} // namespace detail

/// (u1 +_F u2)^N in RP^{2n} x RP^{16K+9}, checked under both strategies and caps A, A + 4.
inline Report evaluate_obstruction(const Parameters& params, const LChoice& choice, const Caps& caps)
{
    Report rep;
    rep.params = params;
    rep.gates = check_gates(params);
    rep.choice = choice;
    rep.caps = caps;
    if (!rep.gates.n_ok)
        throw Error(ErrorCode::side_condition_failed,
                    "n = " + std::to_string(params.n) + " is not = 0 or 7 mod 8; u1^{n+1} = 0 is not available");
    if (!choice.side_condition)
        throw Error(ErrorCode::side_condition_failed, "n <= 8M < 8M+8 < 8K+5 fails for M = " +
                                                          std::to_string(choice.M) + ", K = " +
                                                          std::to_string(choice.K));
    if (choice.N < 1 || choice.N > caps.max_N || params.n * (8 * choice.K + 5) > caps.max_cells ||
        params.n > projring::kMaxDeskParameter || choice.K > projring::kMaxDeskParameter)
        throw Error(ErrorCode::cap_too_small, "problem size exceeds the caps");
    if (caps.alpha < 1)
        throw Error(ErrorCode::cap_too_small, "alpha cap must be positive");

    auto space = projring::SpaceSpec::product_even_odd(static_cast<int>(params.n), static_cast<int>(choice.K));
    for (int a : {caps.alpha, caps.alpha + 4})
        for (auto st : {projring::Strategy::degree_ordered, projring::Strategy::leftmost_innermost})
            rep.runs.push_back(detail::run_once(space, choice.N, st, a));
    rep.survivors = rep.runs.front().survivors;
    rep.stable = true;
    for (const auto& r : rep.runs) {
        rep.work_ring_terms += r.steps;
        if (r.survivors != rep.survivors || !r.uncertified.empty())
            rep.stable = false;
    }
    rep.no_alpha_u2_terms = true;
    rep.no_pure_powers = true;
    bool top_column = false;
    for (const auto& k : rep.survivors) {
        if (k.u2 == 1)
            rep.no_alpha_u2_terms = false;
        if (k.u1 == 0 || k.u2 == 0)
            rep.no_pure_powers = false;
        if (k.u2 == 8 * choice.K + 5)
            top_column = true;
    }
    if (top_column)
        rep.top_column = d1_non_image(params.n, choice.K, caps.alpha + 4);
    const bool column_ok = !rep.top_column || rep.top_column->not_an_image();
    if (!rep.survivors.empty() && rep.stable && column_ok && rep.no_pure_powers)
        rep.verdict = Verdict::nonzero;
    return rep;
}

inline std::string key_string(const projring::Key& k) { return projring::key_string(k, true); }

inline nlohmann::json to_json(const Report& r)
{
    using nlohmann::json;
    json params{{"n", r.params.n},
                {"k", r.params.k},
                {"L", r.choice.L},
                {"K", r.choice.K},
                {"N", r.choice.N},
                {"M", r.choice.M},
                {"source", "RP^" + std::to_string(r.params.source_dim())},
                {"target", "R^" + std::to_string(r.params.target_dim())}};
    params["m"] = r.params.m ? json(*r.params.m) : json(nullptr);
    params["alpha_m"] = r.params.m ? json(r.params.alpha_m) : json(nullptr);
    json gates{{"k_mod_8", r.gates.k_mod8},
               {"n_mod_8", r.gates.n_mod8},
               {"k_is_2_mod_8", r.gates.k_ok},
               {"n_is_0_or_7_mod_8", r.gates.n_ok},
               {"residue_class", r.gates.residue_class},
               {"side_condition", r.choice.side_condition},
               {"stable", r.stable},
               {"no_alpha_u1_u2_terms", r.no_alpha_u2_terms},
               {"no_pure_powers", r.no_pure_powers}};
    if (r.top_column) {
        const auto& c = *r.top_column;
        auto src = json::array();
        for (const auto& s : c.sources)
            src.push_back(to_string(s, r.choice.K));
        gates["top_column"] = {{"target", to_string(c.target, r.choice.K)},
                               {"target_degree", c.target_degree},
                               {"d1_source_degree", c.source_degree},
                               {"d1_sources", src},
                               {"hits", c.hits.size()},
                               {"not_a_d1_image", c.not_an_image()}};
    }
    auto surv = json::array();
    for (const auto& k : r.survivors)
        surv.push_back({{"monomial", key_string(k)}, {"u1", k.u1}, {"u2", k.u2}, {"alpha", k.alpha}});
    json runs = json::array();
    for (const auto& x : r.runs)
        runs.push_back({{"strategy", projring::to_string(x.strategy)},
                        {"alpha_cap", x.alpha_cap},
                        {"survivors", x.survivors.size()},
                        {"uncertified", x.uncertified.size()},
                        {"off_degree_16", x.dropped_off_16},
                        {"reduction_steps", x.steps}});
    json j;
    j["params"] = params;
    j["gates"] = gates;
    j["survivors"] = surv;
    j["verdict"] = r.verdict == Verdict::nonzero ? "obstruction nonzero: " + r.statement() : "inconclusive";
    j["caps"] = {{"alpha", r.caps.alpha},
                 {"alpha_recheck", r.caps.alpha + 4},
                 {"max_L", r.caps.max_L},
                 {"max_N", r.caps.max_N},
                 {"max_cells", r.caps.max_cells}};
    // work counters, not wall clock, so the report is byte-stable
    j["timings"] = {{"unit", "reduction steps"}, {"total", r.work_ring_terms}, {"runs", runs}};
    return j;
}

inline std::string to_text(const Report& r)
{
    std::ostringstream os;
    os << "query: RP^" << r.params.source_dim() << " in R^" << r.params.target_dim();
    if (r.params.m)
        os << " (m = " << *r.params.m << ", alpha(m) = " << r.params.alpha_m << ")";
    os << "\nn = " << r.params.n << ", k = " << r.params.k << ", L = " << r.choice.L << ", K = " << r.choice.K
       << ", N = " << r.choice.N << ", M = " << r.choice.M << '\n';
    os << "gates: k = " << r.gates.k_mod8 << " mod 8, n = " << r.gates.n_mod8 << " mod 8, side condition "
       << (r.choice.side_condition ? "holds" : "fails") << '\n';
    os << "survivors of (u1 +_F u2)^" << r.choice.N << ":\n";
    for (const auto& k : r.survivors)
        os << "  " << key_string(k) << '\n';
    if (r.top_column)
        os << "u1^" << r.params.n << " i_" << 16 * r.choice.K + 9 << ": " << r.top_column->sources.size()
           << " d1 sources in degree " << r.top_column->source_degree << ", "
           << (r.top_column->not_an_image() ? "not an image" : "HIT") << '\n';
    os << "stable under strategy and alpha cap " << r.caps.alpha << "/" << r.caps.alpha + 4 << ": "
       << (r.stable ? "yes" : "no") << '\n';
    os << "verdict: " << (r.verdict == Verdict::nonzero ? r.statement() : "inconclusive") << '\n';
    return os.str();
}

inline std::string to_csv(const Report& r)
{
    std::string s = "monomial,u1,u2,alpha\n";
    for (const auto& k : r.survivors)
        s += key_string(k) + ',' + std::to_string(k.u1) + ',' + std::to_string(k.u2) + ',' +
             std::to_string(k.alpha) + '\n';
    return s;
}

inline std::string render(const Report& r, const std::string& format)
{
    if (format == "json")
        return to_json(r).dump(2) + "\n";
    if (format == "text")
        return to_text(r);
    if (format == "csv")
        return to_csv(r);
    throw Error(ErrorCode::invalid_argument, "unknown format " + format);
}

inline void emit_report(const Report& r, const std::string& format, const std::string& path)
{
    auto body = render(r, format);
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << body) || !f.flush())
        throw Error(ErrorCode::io_failure, "cannot write " + path);
}

} // namespace realjw::obstruct

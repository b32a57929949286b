#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "realjw/bss/label.hpp"

namespace realjw::bss {

enum class BssSpaceKind { point, rp_infty, rp_odd };

/// Spaces with tabulated differentials. rp_odd(K) is RP^{16K+9}.
struct BssSpace {
    BssSpaceKind kind = BssSpaceKind::point;
    int K = 0;

    static BssSpace point() { return {BssSpaceKind::point, 0}; }
    static BssSpace rp_infty() { return {BssSpaceKind::rp_infty, 0}; }
    static BssSpace rp_odd(int K) { return {BssSpaceKind::rp_odd, K}; }

    int top_u() const { return 8 * K + 4; }

    std::string str() const
    {
        switch (kind) {
        case BssSpaceKind::point: return "point";
        case BssSpaceKind::rp_infty: return "RP^inf";
        case BssSpaceKind::rp_odd: return "RP^" + std::to_string(16 * K + 9);
        }
        return "?";
    }
    friend bool operator==(const BssSpace&, const BssSpace&) = default;
};

inline BssSpace parse_space(const std::string& name, int K = 0)
{
    if (K < 0)
        throw Error(ErrorCode::invalid_argument, "K must be non-negative");
    if (name == "point")
        return BssSpace::point();
    if (name == "rp-infty" || name == "rpinfty")
        return BssSpace::rp_infty();
    if (name == "rp-odd")
        return BssSpace::rp_odd(K);
    throw Error(ErrorCode::unsupported_space, "no tabulated spectral sequence for '" + name + "'");
}

/// Report region: alpha <= alpha, u <= u (RP^inf only). The engine computes with an
/// extra margin on both and only asserts inside the report region.
struct BssCaps {
    int alpha = 12;
    int u = 12;
    int margin = 6;
};

/// tabulated: d^7 exactly as listed. repaired: d^7 also acts on the odd part by the
/// same v2-rule, which is what E^8 = 0 forces.
enum class D7Mode { tabulated, repaired };

inline std::string to_string(D7Mode m) { return m == D7Mode::tabulated ? "tabulated" : "repaired"; }

struct FixtureDifferential {
    std::string name;
    int r = 0;
    std::string provenance;
    /// Target monomial of a monomial source, nullopt when the entry gives zero.
    std::function<std::optional<Label>(const Label&)> rule;
};

/// x^r-torsion generator. `twice` marks 2*label (free part, page 1).
struct TorsionGenerator {
    Label label;
    bool twice = false;
    friend auto operator<=>(const TorsionGenerator&, const TorsionGenerator&) = default;
};

inline std::string to_string(const TorsionGenerator& g)
{
    return g.twice ? "2*" + to_string(g.label) : to_string(g.label);
}

struct FixturePage {
    std::string name;
    int first = 1;
    int last = 1;
    std::string provenance;
    std::set<Label> classes; // within the report region
};

struct FixtureTorsion {
    int r = 1;
    std::string provenance;
    std::set<TorsionGenerator> generators; // within the report region
};

struct FixtureTable {
    BssSpace space;
    D7Mode mode = D7Mode::tabulated;
    std::vector<FixtureDifferential> differentials;
    std::vector<FixturePage> pages;
    std::vector<FixtureTorsion> torsion;
    std::vector<std::string> notes;

    /// Main tabulated page covering r (the first listed).
    const FixturePage* page(int r) const
    {
        for (const auto& p : pages)
            if (p.first <= r && r <= p.last)
                return &p;
        return nullptr;
    }
};

inline bool in_report(const Label& l, const BssSpace& space, const BssCaps& caps)
{
    if (l.alpha > caps.alpha)
        return false;
    return space.kind != BssSpaceKind::rp_infty || l.u <= caps.u;
}

namespace detail {

inline bool is_v2_power(const Label& l, std::initializer_list<int> vs)
{
    for (int v : vs)
        if (l.v2 == v)
            return true;
    return false;
}

} // namespace detail

/// Tabulated data for a space. Pages are enumerated inside the report region.
inline FixtureTable fixture_table(const BssSpace& space, const BssCaps& caps, D7Mode mode = D7Mode::tabulated)
{
    using detail::is_v2_power;
    FixtureTable t;
    t.space = space;
    t.mode = mode;
    const int A = caps.alpha;
    const int K = space.K;
    const int top = space.top_u();

    // d^3(v2^2) = alpha v2^4 on the coefficients; as a derivation with u, alpha and i
    // permanent this is d^3(v2^{2t} P) = t alpha v2^{2t+2} P.
    t.differentials.push_back({"d3", 3, "coefficient ring: d3(v2^2) = alpha v2^4, extended as a derivation",
                               [](const Label& l) -> std::optional<Label> {
                                   if (l.v2 % 4 != 2)
                                       return std::nullopt;
                                   return l.with_v2(l.v2 + 2).times_alpha(1);
                               }});

    std::string d7_prov;
    switch (space.kind) {
    case BssSpaceKind::point: d7_prov = "coefficient ring: d7(v2^4) = 1"; break;
    case BssSpaceKind::rp_infty: d7_prov = "RP^inf table: d7(v2^4 u^{1-3}) = u^{1-3}"; break;
    case BssSpaceKind::rp_odd:
        d7_prov = "RP^(16K+9) table: d7(v2^4 u^{1-3}) = u^{1-3}, d7(v2^6 u^{8K+4}) = v2^2 u^{8K+4}";
        break;
    }
    t.differentials.push_back({"d7", 7, d7_prov, [](const Label& l) -> std::optional<Label> {
                                   if (l.gen != Gen::none || !is_v2_power(l, {4, 6}))
                                       return std::nullopt;
                                   return l.with_v2(l.v2 - 4);
                               }});

    if (space.kind == BssSpaceKind::rp_odd) {
        t.differentials.push_back(
            {"d2", 2, "RP^(16K+9) table: d2(v2^{2s+1} alpha^k u^{8K+4}) = v2^{2s+2} alpha^{k+4} i",
             [top](const Label& l) -> std::optional<Label> {
                 if (l.gen != Gen::none || l.u != top || l.v2 % 2 == 0)
                     return std::nullopt;
                 return odd_i(l.v2 + 1, l.alpha + 4);
             }});
        t.differentials.push_back(
            {"d4", 4,
             "RP^(16K+9) table: d4(v2^{6,2} u^{8K+3}) = v2^{0,4} i; the bracket order is taken from the "
             "degree table (v2^6 u^{8K+3} -> -15+16K = |v2^4 i|), i.e. 6 -> 4 and 2 -> 0",
             [top](const Label& l) -> std::optional<Label> {
                 if (l.gen != Gen::none || l.u != top - 1 || !is_v2_power(l, {2, 6}))
                     return std::nullopt;
                 return odd_i(l.v2 - 2, l.alpha);
             }});
        if (mode == D7Mode::repaired)
            t.differentials.push_back(
                {"d7-odd", 7,
                 "repair: d7(v2^6 alpha^3 i) = v2^2 alpha^3 i, same v2-rule as d7(v2^6 u^{8K+4}); "
                 "forced by E^8 = 0",
                 [](const Label& l) -> std::optional<Label> {
                     if (l.gen != Gen::i || !is_v2_power(l, {4, 6}))
                         return std::nullopt;
                     return l.with_v2(l.v2 - 4);
                 }});
    }

    auto add_page = [&](std::string name, int first, int last, std::string prov, std::set<Label> cls) {
        std::set<Label> in;
        for (const auto& l : cls)
            if (in_report(l, space, caps))
                in.insert(l);
        t.pages.push_back({std::move(name), first, last, std::move(prov), std::move(in)});
    };
    auto add_torsion = [&](int r, std::string prov, std::set<TorsionGenerator> gens) {
        std::set<TorsionGenerator> in;
        for (const auto& g : gens)
            if (in_report(g.label, space, caps))
                in.insert(g);
        t.torsion.push_back({r, std::move(prov), std::move(in)});
    };

    std::set<Label> s;
    switch (space.kind) {
    case BssSpaceKind::point: {
        for (int v = 0; v < 8; ++v)
            for (int k = 0; k <= A; ++k)
                s.insert(even(v, k, 0));
        add_page("E1", 1, 1, "coefficient ring: free on v2^i, 0 <= i < 8", s);
        s.clear();
        for (int v = 0; v < 8; v += 2)
            for (int k = 0; k <= A; ++k)
                s.insert(even(v, k, 0));
        add_page("E2", 2, 3, "coefficient ring: F2[alpha]{1, v2^2, v2^4, v2^6}", s);
        add_page("E4", 4, 7, "coefficient ring: only 1 and v2^4 survive to E4", {even(0, 0, 0), even(4, 0, 0)});
        add_page("E8", 8, 8, "E^8 = 0", {});

        std::set<TorsionGenerator> g;
        for (int v = 0; v < 8; v += 2)
            for (int k = 0; k <= A; ++k)
                g.insert({even(v, k, 0), true});
        add_torsion(1, "alpha_s alpha^k with alpha_s = 2 v2^{2s}; alpha_s x = 0", g);
        g.clear();
        for (int k = 1; k <= A; ++k) {
            g.insert({even(0, k, 0), false});
            g.insert({even(4, k, 0), false}); // alpha^{k-1} w, w = alpha v2^4
        }
        add_torsion(3, "alpha x^3 = 0, w x^3 = 0", g);
        add_torsion(7, "x^7 = 0", {{even(0, 0, 0), false}});
        break;
    }
    case BssSpaceKind::rp_infty: {
        const int U = caps.u;
        for (int v = 0; v < 8; ++v)
            for (int k = 0; k <= A; ++k)
                for (int j = 1; j <= U; ++j)
                    s.insert(even(v, k, j));
        add_page("E1", 1, 1, "RP^inf table: v2^i alpha^k u^j, j >= 1", s);
        s.clear();
        for (int v = 0; v < 8; v += 2) {
            for (int k = 0; k <= A; ++k)
                s.insert(even(v, k, 1));
            for (int j = 2; j <= U; ++j)
                s.insert(even(v, 0, j));
        }
        add_page("E2", 2, 3, "RP^inf table: v2^{2s} alpha^k u, v2^{2s} u^j (j >= 2)", s);
        s.clear();
        for (int j = 1; j <= 3; ++j) {
            s.insert(even(4, 0, j));
            s.insert(even(0, 0, j));
        }
        add_page("E4", 4, 7, "RP^inf table: v2^4 u^{1-3}, u^{1-3}", s);
        add_page("E8", 8, 8, "E^8 = 0", {});

        std::set<TorsionGenerator> g;
        for (int v = 0; v < 8; v += 2)
            for (int k = 0; k <= A; ++k)
                for (int j = 1; j <= U; ++j)
                    g.insert({even(v, k + 1, j + 1), false});
        add_torsion(1, "RP^inf table: alpha_i alpha^k u^j = 2 v2^{2i} alpha^k u^j, leading v2^{2i} alpha^{k+1} u^{j+1}",
                    g);
        g.clear();
        for (int k = 0; k <= A; ++k) {
            g.insert({even(0, k + 1, 1), false});
            g.insert({even(4, k + 1, 1), false}); // alpha^k w u
        }
        for (int j = 4; j <= U; ++j) {
            g.insert({even(0, 0, j), false});
            g.insert({even(4, 0, j), false}); // w u^{j-2} = v2^4 u^j + ...
        }
        add_torsion(3, "RP^inf table: alpha^{k+1} u, alpha^k w u, u^j (j >= 4), w u^j (j >= 2) with w u^j = v2^4 u^{j+2} + ...",
                    g);
        add_torsion(7, "RP^inf table: u^{1-3}", {{even(0, 0, 1), false}, {even(0, 0, 2), false}, {even(0, 0, 3), false}});
        break;
    }
    case BssSpaceKind::rp_odd: {
        for (int v = 0; v < 8; ++v)
            for (int k = 0; k <= A; ++k) {
                for (int j = 1; j <= top; ++j)
                    s.insert(even(v, k, j));
                s.insert(odd_i(v, k));
            }
        add_page("E1", 1, 1, "RP^(16K+9) table E1 (reduced: j >= 1)", s);
        s.clear();
        for (int v = 0; v < 8; ++v)
            for (int k = 0; k <= A; ++k) {
                if (v % 2 == 0) {
                    s.insert(even(v, k, 1));
                    s.insert(odd_i(v, k));
                } else {
                    s.insert(even(v, k, top));
                }
            }
        for (int v = 0; v < 8; v += 2)
            for (int j = 1; j <= top; ++j)
                s.insert(even(v, 0, j));
        add_page("E2", 2, 2, "RP^(16K+9) table E2", s);
        s.clear();
        for (int v = 0; v < 8; v += 2) {
            for (int k = 0; k <= A; ++k)
                s.insert(even(v, k, 1));
            for (int j = 1; j <= top; ++j)
                s.insert(even(v, 0, j));
            for (int k = 0; k <= 3; ++k)
                s.insert(odd_i(v, k));
        }
        add_page("E3", 3, 3, "RP^(16K+9) table E3", s);
        s.clear();
        for (int j = 1; j <= 3; ++j) {
            s.insert(even(0, 0, j));
            s.insert(even(4, 0, j));
        }
        for (int v : {6, 2}) {
            s.insert(even(v, 0, top - 1));
            s.insert(even(v, 0, top));
        }
        s.insert(odd_i(0, 0));
        s.insert(odd_i(4, 0));
        add_page("E4", 4, 4, "RP^(16K+9) table E4", s);
        s.clear();
        for (int j = 1; j <= 3; ++j) {
            s.insert(even(0, 0, j));
            s.insert(even(4, 0, j));
        }
        for (int v : {6, 2})
            s.insert(even(v, 0, top));
        auto narrative = s;
        for (int v : {6, 2})
            s.insert(odd_i(v, 3));
        add_page("E5", 5, 7, "RP^(16K+9) table E5=E6=E7", s);
        add_page("E5-narrative", 5, 5, "RP^(16K+9) derivation text: E5 after d4", narrative);
        add_page("E8", 8, 8, "E^8 = 0", {});

        add_torsion(4, "i is x^4-torsion (d4 targets v2^{0,4} i)", {{odd_i(0, 0), false}, {odd_i(4, 0), false}});
        t.notes.push_back("E1 even part listed with 0 <= j; reduced cohomology uses 1 <= j (K=" +
                          std::to_string(K) + ")");
        t.notes.push_back("d4 bracket order {6,2} -> {0,4} contradicts the degree table; using 6 -> 4, 2 -> 0");
        break;
    }
    }
    return t;
}

} // namespace realjw::bss

#pragma once

#include <functional>
#include <ostream>
#include <sstream>

#include "realjw/bss/pages.hpp"

namespace realjw::bss {

struct TorsionFiltration {
    BssSpace space;
    std::map<int, std::set<TorsionGenerator>> by_order; // r -> generators of M_r / M_{r-1}

    const std::set<TorsionGenerator>& order(int r) const
    {
        static const std::set<TorsionGenerator> empty;
        auto it = by_order.find(r);
        return it == by_order.end() ? empty : it->second;
    }
};

/// M_r / M_{r-1} is the image of d^r; generators are reported inside the report region.
inline TorsionFiltration extract_torsion(const std::vector<SpectralPage>& pages)
{
    if (pages.size() != 8 || pages.front().r != 1)
        throw Error(ErrorCode::invalid_argument, "torsion extraction needs pages E1..E8");
    TorsionFiltration t;
    t.space = pages.front().ctx->space;
    for (const auto& p : pages) {
        if (p.r == 8)
            continue;
        for (const auto& g : image_generators(p))
            if (p.ctx->in_report(g.label))
                t.by_order[p.r].insert(g);
    }
    return t;
}

struct DiffReport {
    std::string fixture;
    int r = 0;
    std::vector<Label> only_computed;
    std::vector<Label> only_table;

    bool empty() const { return only_computed.empty() && only_table.empty(); }
};

inline DiffReport verify_against_table(const SpectralPage& computed, const FixturePage& fixture)
{
    if (computed.r < fixture.first || computed.r > fixture.last)
        throw Error(ErrorCode::invalid_argument, "fixture " + fixture.name + " does not describe E" +
                                                     std::to_string(computed.r));
    DiffReport d;
    d.fixture = fixture.name;
    d.r = computed.r;
    auto mine = computed.report_basis();
    for (const auto& l : mine)
        if (!fixture.classes.count(l))
            d.only_computed.push_back(l);
    for (const auto& l : fixture.classes)
        if (!mine.count(l))
            d.only_table.push_back(l);
    return d;
}

/// Every fixture page that describes some computed page, compared.
inline std::vector<DiffReport> verify_all(const std::vector<SpectralPage>& pages)
{
    std::vector<DiffReport> out;
    const auto& fx = pages.front().ctx->fixtures;
    for (const auto& p : pages)
        for (const auto& f : fx.pages)
            if (f.first <= p.r && p.r <= f.last)
                out.push_back(verify_against_table(p, f));
    return out;
}

struct DegreeViolation {
    std::string where;
    int r = 0;
    Label source;
    Label target;
    int shift = 0;
};

/// Nonzero differentials on computed pages whose terms miss the 17r+1 shift.
inline std::vector<DegreeViolation> check_degree_law(const std::vector<SpectralPage>& pages)
{
    std::vector<DegreeViolation> out;
    for (const auto& p : pages) {
        const int K = p.ctx->space.K;
        for (const auto& [src, v] : p.differential)
            for (const auto& t : v.terms) {
                int shift = ((degree(t, K) - degree(src, K)) % 48 + 48) % 48;
                if (shift != differential_degree(p.r))
                    out.push_back({"E" + std::to_string(p.r), p.r, src, t, shift});
            }
    }
    return out;
}

/// Every fixture rule applied to every E1 monomial in range.
inline std::vector<DegreeViolation> check_fixture_degree_law(const BssContext& ctx)
{
    std::vector<DegreeViolation> out;
    const int K = ctx.space.K;
    for (const auto& l : detail::e1_labels(ctx))
        for (const auto& d : ctx.fixtures.differentials)
            if (auto t = d.rule(l)) {
                int shift = ((degree(*t, K) - degree(l, K)) % 48 + 48) % 48;
                if (shift != differential_degree(d.r))
                    out.push_back({d.name, d.r, l, *t, shift});
            }
    return out;
}

/// Classes with d^r = 0 for every r that come from the image of ER(2): u^j and alpha^k,
/// checked on every page where they are basis classes.
inline bool permanent_cycles_hold(const std::vector<SpectralPage>& pages)
{
    for (const auto& p : pages)
        for (const auto& [src, v] : p.differential)
            if (src.v2 == 0 && src.gen == Gen::none)
                return false;
    return true;
}

/// Report-region pages and differentials agree when the internal alpha margin grows by 4.
inline bool alpha_stable(const BssSpace& space, const BssCaps& caps, D7Mode mode = D7Mode::tabulated)
{
    auto wider = caps;
    wider.margin += 4;
    auto a = run_spectral_sequence(space, caps, mode);
    auto b = run_spectral_sequence(space, wider, mode);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].report_basis() != b[i].report_basis())
            return false;
        auto clip = [&](FormalSum f) {
            std::erase_if(f.terms, [&](const Label& t) { return !a[i].ctx->in_report(t); });
            return f;
        };
        for (const auto& l : a[i].report_basis())
            if (clip(apply_d(a[i].r, l, a[i])) != clip(apply_d(b[i].r, l, b[i])))
                return false;
    }
    return true;
}

struct RepairPair {
    Label source;
    Label target;
    int r = 7;
};

struct ErratumReport {
    BssSpace space;
    std::vector<DiffReport> page_diffs;     // nonempty diffs of the tabulated run
    std::vector<Label> e8_survivors;        // tabulated run
    std::vector<std::vector<RepairPair>> repairs; // degree-compatible d7 pairings that clear E8
    std::optional<RepairPair> forced;       // the unique one, oriented by the v2-rule
    bool repaired_e8_zero = false;
    std::vector<DiffReport> repaired_page_diffs;
    std::vector<DegreeViolation> degree_violations;
    std::vector<std::string> notes;

    bool repair_unique() const { return repairs.size() == 1; }
};

namespace detail {

/// All perfect matchings of `s` into pairs a -> b with deg b - deg a = |d^r|.
inline void matchings(std::vector<Label> s, int r, int K, std::vector<RepairPair>& cur,
                      std::vector<std::vector<RepairPair>>& out)
{
    if (s.empty()) {
        out.push_back(cur);
        return;
    }
    Label a = s.front();
    for (std::size_t i = 1; i < s.size(); ++i) {
        Label b = s[i];
        int shift = ((degree(b, K) - degree(a, K)) % 48 + 48) % 48;
        int back = (48 - shift) % 48;
        if (shift != differential_degree(r) && back != differential_degree(r))
            continue;
        // orient by the d7 v2-rule: the source carries v2^4 or v2^6
        RepairPair p = (a.v2 == 4 || a.v2 == 6) ? RepairPair{a, b, r} : RepairPair{b, a, r};
        int oriented = ((degree(p.target, K) - degree(p.source, K)) % 48 + 48) % 48;
        if (oriented != differential_degree(r))
            continue;
        auto rest = s;
        rest.erase(rest.begin() + static_cast<long>(i));
        rest.erase(rest.begin());
        cur.push_back(p);
        matchings(rest, r, K, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

inline ErratumReport erratum_report(const BssSpace& space, const BssCaps& caps = {})
{
    ErratumReport e;
    e.space = space;
    auto tab = run_spectral_sequence(space, caps, D7Mode::tabulated);
    for (auto& d : verify_all(tab))
        if (!d.empty())
            e.page_diffs.push_back(std::move(d));
    auto last = tab.back().report_basis();
    e.e8_survivors.assign(last.begin(), last.end());
    e.degree_violations = check_degree_law(tab);
    for (auto& v : check_fixture_degree_law(*tab.front().ctx))
        e.degree_violations.push_back(v);
    e.notes = tab.front().ctx->fixtures.notes;

    if (!e.e8_survivors.empty()) {
        std::vector<RepairPair> cur;
        detail::matchings(e.e8_survivors, 7, space.K, cur, e.repairs);
        if (e.repairs.size() == 1 && e.repairs.front().size() == 1)
            e.forced = e.repairs.front().front();
        if (space.kind == BssSpaceKind::rp_odd) {
            auto rep = run_spectral_sequence(space, caps, D7Mode::repaired);
            e.repaired_e8_zero = rep.back().report_basis().empty();
            for (auto& d : verify_all(rep))
                if (!d.empty())
                    e.repaired_page_diffs.push_back(std::move(d));
            // the repaired differential must be the forced pair
            if (e.forced) {
                auto v = apply_d(7, e.forced->source, rep[6]);
                if (v.terms != Vec{e.forced->target})
                    e.repaired_e8_zero = false;
            }
        }
    } else {
        e.repaired_e8_zero = true;
    }
    return e;
}

inline nlohmann::json labels_json(const std::vector<Label>& ls, int K)
{
    auto a = nlohmann::json::array();
    for (const auto& l : ls)
        a.push_back(to_json(l, K));
    return a;
}

inline nlohmann::json to_json(const DiffReport& d, int K)
{
    return {{"fixture", d.fixture},
            {"page", d.r},
            {"only_computed", labels_json(d.only_computed, K)},
            {"only_table", labels_json(d.only_table, K)}};
}

inline nlohmann::json to_json(const ErratumReport& e)
{
    const int K = e.space.K;
    nlohmann::json j;
    j["space"] = e.space.str();
    j["K"] = K;
    j["page_diffs"] = nlohmann::json::array();
    for (const auto& d : e.page_diffs)
        j["page_diffs"].push_back(to_json(d, K));
    j["e8_zero"] = e.e8_survivors.empty();
    j["e8_survivors"] = labels_json(e.e8_survivors, K);
    j["repair_candidates"] = nlohmann::json::array();
    for (const auto& m : e.repairs) {
        auto a = nlohmann::json::array();
        for (const auto& p : m)
            a.push_back({{"differential", "d" + std::to_string(p.r)},
                         {"source", to_string(p.source)},
                         {"target", to_string(p.target)},
                         {"degree_shift", differential_degree(p.r)}});
        j["repair_candidates"].push_back(a);
    }
    j["repair_unique"] = e.repair_unique();
    if (e.forced)
        j["forced_repair"] = {{"differential", "d7"},
                              {"source", to_string(e.forced->source)},
                              {"target", to_string(e.forced->target)},
                              {"degree_shift", differential_degree(7)}};
    j["repaired_e8_zero"] = e.repaired_e8_zero;
    j["repaired_page_diffs"] = nlohmann::json::array();
    for (const auto& d : e.repaired_page_diffs)
        j["repaired_page_diffs"].push_back(to_json(d, K));
    j["degree_violations"] = e.degree_violations.size();
    j["notes"] = e.notes;
    return j;
}

/// CSV dump of a page inside the report region: class,degree,page,differential_target.
inline void write_page_csv(std::ostream& os, const SpectralPage& p)
{
    os << "class,degree,page,differential_target\n";
    const int K = p.ctx->space.K;
    for (const auto& l : p.report_basis())
        os << to_string(l) << ',' << degree(l, K) << ',' << p.r << ',' << to_string(apply_d(p.r, l, p)) << '\n';
}

inline nlohmann::json to_json(const SpectralPage& p)
{
    const int K = p.ctx->space.K;
    nlohmann::json j;
    j["space"] = p.ctx->space.str();
    j["K"] = K;
    j["page"] = p.r;
    j["structure"] = p.structure == CoefficientStructure::free_z2_alpha ? "free Z_(2)[alpha]" : "F2[alpha]";
    j["alpha_cap"] = p.ctx->caps.alpha;
    j["classes"] = nlohmann::json::array();
    for (const auto& l : p.report_basis()) {
        auto c = to_json(l, K);
        c["d"] = to_string(apply_d(p.r, l, p));
        j["classes"].push_back(c);
    }
    return j;
}

} // namespace realjw::bss

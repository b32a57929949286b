#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include "realjw/bss/fixtures.hpp"
#include "realjw/fgl/formal_group.hpp"
#include "realjw/projring/ring.hpp"

namespace realjw::bss {

enum class CoefficientStructure { free_z2_alpha, f2_alpha };

/// Value of a differential. two_valuation = 1 means 2 * terms (free part on page 1).
struct FormalSum {
    Vec terms;
    int two_valuation = 0;

    bool is_zero() const { return terms.empty(); }
    friend bool operator==(const FormalSum&, const FormalSum&) = default;
};

inline std::string to_string(const FormalSum& f)
{
    if (f.is_zero())
        return "0";
    auto s = to_string(f.terms);
    return f.two_valuation ? "2*(" + s + ")" : s;
}

/// Shared data for one run: the space, caps, fixtures and page-1 reduction data.
struct BssContext {
    BssSpace space;
    BssCaps caps;
    D7Mode mode = D7Mode::tabulated;
    int alpha_max = 0; // internal caps
    int u_max = 0;
    FixtureTable fixtures;
    std::set<Label> kernel1; // E1 labels that are d1-cycles
    Echelon d1_image;        // 0/1 images of d1, pivot = leading label

    bool in_report(const Label& l) const { return bss::in_report(l, space, caps); }
    bool in_range(const Label& l) const
    {
        if (l.alpha < 0 || l.alpha > alpha_max)
            return false;
        if (l.gen != Gen::none)
            return l.u == 0;
        if (space.kind == BssSpaceKind::point)
            return l.u == 0;
        return l.u >= 1 && l.u <= u_max;
    }
};

struct SpectralPage {
    int r = 1;
    CoefficientStructure structure = CoefficientStructure::free_z2_alpha;
    std::vector<Label> basis;                  // sorted
    std::vector<Vec> reps;                     // representatives in E2 coordinates (r >= 2)
    std::map<Label, FormalSum> differential;   // nonzero values only
    std::shared_ptr<const BssContext> ctx;
    std::shared_ptr<const Echelon> cycles;     // r >= 2: boundaries (empty tag) and class rows

    int index_of(const Label& l) const
    {
        auto it = std::lower_bound(basis.begin(), basis.end(), l);
        if (it == basis.end() || *it != l)
            return -1;
        return static_cast<int>(it - basis.begin());
    }
    bool contains(const Label& l) const { return index_of(l) >= 0; }

    std::set<Label> report_basis() const
    {
        std::set<Label> out;
        for (const auto& l : basis)
            if (ctx->in_report(l))
                out.insert(l);
        return out;
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

inline std::vector<Label> e1_labels(const BssContext& c)
{
    std::vector<Label> out;
    for (int v = 0; v < 8; ++v)
        for (int k = 0; k <= c.alpha_max; ++k) {
            switch (c.space.kind) {
            case BssSpaceKind::point: out.push_back(even(v, k, 0)); break;
            case BssSpaceKind::rp_infty:
            case BssSpaceKind::rp_odd:
                for (int j = 1; j <= c.u_max; ++j)
                    out.push_back(even(v, k, j));
                if (c.space.kind == BssSpaceKind::rp_odd)
                    out.push_back(odd_i(v, k));
                break;
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Raw fixture value of d^r on a representative (F2 sum of monomials inside the caps).
inline Vec raw_value(const BssContext& c, int r, const Vec& rep)
{
    Vec out;
    for (const auto& d : c.fixtures.differentials) {
        if (d.r != r)
            continue;
        for (const auto& l : rep)
            if (auto t = d.rule(l); t && c.in_range(*t))
                toggle(out, *t);
    }
    return out;
}

/// Differential of page r >= 2 from the fixtures, in page coordinates.
inline void attach_differential(SpectralPage& p)
{
    const auto& c = *p.ctx;
    for (std::size_t i = 0; i < p.basis.size(); ++i) {
        Vec raw = raw_value(c, p.r, p.reps[i]);
        if (raw.empty())
            continue;
        for (const auto& l : raw)
            if (!c.kernel1.count(l))
                throw Error(ErrorCode::composition_failure,
                            "d" + std::to_string(p.r) + "(" + to_string(p.basis[i]) + ") hits " + to_string(l) +
                                ", which is not a d1-cycle");
        Coords unused;
        c.d1_image.reduce_full(raw, unused);
        Coords coords;
        p.cycles->reduce_leading(raw, coords);
        if (!raw.empty())
            throw Error(ErrorCode::composition_failure,
                        "d" + std::to_string(p.r) + "(" + to_string(p.basis[i]) + ") is not a cycle on E" +
                            std::to_string(p.r));
        if (coords.empty())
            continue;
        FormalSum v;
        for (int j : coords)
            v.terms.insert(p.basis[j]);
        p.differential.emplace(p.basis[i], std::move(v));
    }
}

inline fgl::TwoSeries two_series_for(int order, int alpha_cap)
{
    auto log = fgl::build_log(fgl::Convention::araki, log_depth_for(order));
    return fgl::rescale_to_er2(fgl::two_series_from_log(log, order), alpha_cap, "u");
}

} // namespace detail

/// E^1 = E(2)^*(X) with d^1 = v2^{-3}(1 - c). The even part of a projective space is
/// reduced through the 2-adic basis; the point and the i-part are free.
inline SpectralPage build_E1(const BssSpace& space, const BssCaps& caps = {}, D7Mode mode = D7Mode::tabulated)
{
    if (space.K < 0)
        throw Error(ErrorCode::unsupported_space, "negative K");
    if (caps.alpha < 0 || caps.margin < 1 || (space.kind == BssSpaceKind::rp_infty && caps.u < 4))
        throw Error(ErrorCode::cap_too_small, "bss caps too small");

    auto ctx = std::make_shared<BssContext>();
    ctx->space = space;
    ctx->caps = caps;
    ctx->mode = mode;
    ctx->alpha_max = caps.alpha + caps.margin;
    ctx->u_max = space.kind == BssSpaceKind::point      ? 0
                 : space.kind == BssSpaceKind::rp_infty ? caps.u + caps.margin
                                                        : space.top_u();
    ctx->fixtures = fixture_table(space, caps, mode);

    std::optional<projring::RingPresentation> ring;
    if (space.kind != BssSpaceKind::point) {
        projring::Caps rc;
        rc.alpha = ctx->alpha_max;
        rc.u = std::max(ctx->u_max, 4);
        auto rs = space.kind == BssSpaceKind::rp_infty ? projring::SpaceSpec::rp_infty()
                                                       : projring::SpaceSpec::rp_even(space.top_u());
        int order = projring::required_two_series_order(rs, rc);
        ring = projring::make_ring(rs, detail::two_series_for(order, rc.alpha), rc);
    }

    SpectralPage p;
    p.r = 1;
    p.structure = CoefficientStructure::free_z2_alpha;
    p.basis = detail::e1_labels(*ctx);

    // NF(2 alpha^a u^j) does not depend on the v2-exponent.
    std::map<std::pair<int, int>, std::set<projring::Key>> nf_cache;
    std::map<Label, Label> leading_of;
    for (const auto& l : p.basis) {
        if (l.v2 % 2 == 0)
            continue;
        FormalSum v;
        if (l.gen != Gen::none || space.kind == BssSpaceKind::point) {
            v.terms.insert(l.with_v2(l.v2 - 3));
            v.two_valuation = 1;
        } else {
            auto key = std::make_pair(l.alpha, l.u);
            auto it = nf_cache.find(key);
            if (it == nf_cache.end()) {
                auto nf = projring::normal_form(projring::monomial(*ring, {0, l.alpha, l.u, 0}, 2), *ring);
                it = nf_cache.emplace(key, nf.terms).first;
            }
            for (const auto& k : it->second)
                v.terms.insert(even(l.v2 - 3 + k.v2, k.alpha, k.u1));
        }
        if (v.is_zero())
            continue;
        if (v.two_valuation == 0 && ctx->in_report(l)) {
            auto lead = *v.terms.begin();
            if (auto [it, ok] = leading_of.emplace(lead, l); !ok)
                throw Error(ErrorCode::composition_failure, "d1 images of " + to_string(it->second) + " and " +
                                                                to_string(l) + " share a leading term");
        }
        p.differential.emplace(l, std::move(v));
    }

    for (const auto& l : p.basis)
        if (!p.differential.count(l))
            ctx->kernel1.insert(l);
    for (const auto& [src, v] : p.differential) {
        if (v.two_valuation == 0) {
            for (const auto& t : v.terms)
                if (!ctx->kernel1.count(t))
                    throw Error(ErrorCode::composition_failure, "d1 value of " + to_string(src) + " is not a cycle");
            ctx->d1_image.insert(v.terms, {});
        }
    }
    p.ctx = std::move(ctx);
    return p;
}

/// d^r on a basis class of page r.
inline FormalSum apply_d(int r, const Label& cls, const SpectralPage& page)
{
    if (r != page.r)
        throw Error(ErrorCode::invalid_argument, "page E" + std::to_string(page.r) + " carries d" +
                                                     std::to_string(page.r) + ", not d" + std::to_string(r));
    if (!page.contains(cls))
        throw Error(ErrorCode::not_in_basis, to_string(cls) + " is not in the basis of E" + std::to_string(r));
    auto it = page.differential.find(cls);
    return it == page.differential.end() ? FormalSum{} : it->second;
}

/// E^{r+1} = ker d^r / im d^r.
inline SpectralPage turn_page(const SpectralPage& page)
{
    if (page.r >= 8)
        throw Error(ErrorCode::invalid_argument, "E8 is the last page");
    SpectralPage next;
    next.r = page.r + 1;
    next.structure = CoefficientStructure::f2_alpha;
    next.ctx = page.ctx;
    const auto& c = *page.ctx;

    if (page.r == 1) {
        auto cyc = std::make_shared<Echelon>();
        for (const auto& l : c.kernel1)
            if (!c.d1_image.is_pivot(l))
                next.basis.push_back(l);
        for (std::size_t i = 0; i < next.basis.size(); ++i) {
            next.reps.push_back({next.basis[i]});
            cyc->insert({next.basis[i]}, {static_cast<int>(i)});
        }
        next.cycles = std::move(cyc);
        detail::attach_differential(next);
        return next;
    }

    const int m = static_cast<int>(page.basis.size());
    std::vector<Coords> val(m);
    for (int i = 0; i < m; ++i) {
        auto it = page.differential.find(page.basis[i]);
        if (it == page.differential.end())
            continue;
        for (const auto& l : it->second.terms)
            val[i].insert(page.index_of(l));
    }
    for (int i = 0; i < m; ++i) {
        Coords dd;
        for (int j : val[i])
            add_to(dd, val[j]);
        if (!dd.empty())
            throw Error(ErrorCode::composition_failure,
                        "d" + std::to_string(page.r) + " squares to a nonzero value on " + to_string(page.basis[i]));
    }

    BasicEchelon<int> im;
    std::vector<Coords> kernel;
    for (int i = 0; i < m; ++i) {
        Coords residual;
        if (!im.insert(val[i], {i}, &residual))
            kernel.push_back(residual);
    }
    // Quotient basis: kernel vectors reduced modulo the image.
    BasicEchelon<int> quot;
    for (auto k : kernel) {
        Coords unused;
        im.reduce_full(k, unused);
        quot.insert(k, {});
    }
    std::vector<std::pair<Label, Vec>> classes;
    for (const auto& [pivot, row] : quot.rows()) {
        Vec rep;
        for (int j : row.vec)
            add_to(rep, page.reps[j]);
        classes.emplace_back(page.basis[pivot], std::move(rep));
    }
    std::sort(classes.begin(), classes.end());

    auto cyc = std::make_shared<Echelon>();
    for (const auto& [pivot, row] : page.cycles->rows())
        if (row.tag.empty())
            cyc->insert(row.vec, {});
    for (const auto& [pivot, row] : im.rows()) {
        Vec v;
        for (int j : row.vec)
            add_to(v, page.reps[j]);
        cyc->insert(std::move(v), {});
    }
    for (std::size_t i = 0; i < classes.size(); ++i) {
        next.basis.push_back(classes[i].first);
        next.reps.push_back(classes[i].second);
        if (!cyc->insert(classes[i].second, {static_cast<int>(i)}))
            throw Error(ErrorCode::composition_failure, "dependent class on E" + std::to_string(next.r));
    }
    next.cycles = std::move(cyc);
    detail::attach_differential(next);
    return next;
}

/// Leading labels of Im d^r on page r (one per independent image vector).
inline std::vector<TorsionGenerator> image_generators(const SpectralPage& page)
{
    std::vector<TorsionGenerator> out;
    Echelon im;
    for (const auto& [src, v] : page.differential) {
        if (v.two_valuation > 0)
            out.push_back({*v.terms.begin(), true});
        else
            im.insert(v.terms, {});
    }
    for (const auto& [pivot, row] : im.rows())
        out.push_back({pivot, false});
    std::sort(out.begin(), out.end());
    return out;
}

/// E1 through E8.
inline std::vector<SpectralPage> run_spectral_sequence(const BssSpace& space, const BssCaps& caps = {},
                                                       D7Mode mode = D7Mode::tabulated)
{
    std::vector<SpectralPage> pages;
    pages.push_back(build_E1(space, caps, mode));
    while (pages.back().r < 8)
        pages.push_back(turn_page(pages.back()));
    return pages;
}

} // namespace realjw::bss

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "realjw/error.hpp"
#include "realjw/exactalg/graded_series.hpp"
#include "realjw/fgl/formal_group.hpp"

namespace realjw::projring {

using exactalg::Exponents;
using exactalg::GradedSeries;
using exactalg::TablePtr;
using exactalg::TwoLocal;

enum class SpaceKind { rp_even, rp_infty, product_even_even, product_even_odd };

/// RPeven(n) is RP^(2n); ProductEvenOdd(n, K) is RP^(2n) x RP^(16K+9), whose tensor part
/// is modeled with u2 running up to 8K+5.
struct SpaceSpec {
    SpaceKind kind = SpaceKind::rp_infty;
    int n = 0;
    int m = 0;
    int K = 0;

    static SpaceSpec rp_even(int n) { return {SpaceKind::rp_even, n, 0, 0}; }
    static SpaceSpec rp_infty() { return {SpaceKind::rp_infty, 0, 0, 0}; }
    static SpaceSpec product_even_even(int n, int m) { return {SpaceKind::product_even_even, n, m, 0}; }
    static SpaceSpec product_even_odd(int n, int K) { return {SpaceKind::product_even_odd, n, 0, K}; }

    bool is_product() const
    {
        return kind == SpaceKind::product_even_even || kind == SpaceKind::product_even_odd;
    }

    std::string str() const
    {
        switch (kind) {
        case SpaceKind::rp_even: return "RPeven(" + std::to_string(n) + ")";
        case SpaceKind::rp_infty: return "RPinfty";
        case SpaceKind::product_even_even:
            return "ProductEvenEven(" + std::to_string(n) + "," + std::to_string(m) + ")";
        case SpaceKind::product_even_odd:
            return "ProductEvenOdd(" + std::to_string(n) + "," + std::to_string(K) + ")";
        }
        return "?";
    }

    friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

inline constexpr int kMaxDeskParameter = 4096;

struct Caps {
    int alpha = fgl::kDefaultAlphaCap;
    int u = 24; // RPinfty only
    std::int64_t step_budget = 50'000'000;
};

enum class Strategy { degree_ordered, leftmost_innermost };

inline std::string to_string(Strategy s)
{
    return s == Strategy::degree_ordered ? "degree_ordered" : "leftmost_innermost";
}

/// Basis monomial v2^v2 alpha^alpha u1^u1 u2^u2 (single-variable rings use u1 only).
struct Key {
    int v2 = 0;
    int alpha = 0;
    int u1 = 0;
    int u2 = 0;

    int level() const { return u1 + u2; }
    friend auto operator<=>(const Key&, const Key&) = default;
};

struct TwoTerm {
    int d;  // u-exponent
    int aa; // alpha-exponent
    TwoLocal c;
};

class RingPresentation {
public:
    const SpaceSpec& space() const { return space_; }
    const Caps& caps() const { return caps_; }
    bool product() const { return space_.is_product(); }
    int u1_bound() const { return n1_; }
    int u2_bound() const { return n2_; }
    bool u_is_truncation() const { return space_.kind == SpaceKind::rp_infty; }
    const TablePtr& table() const { return table_; }
    const std::vector<TwoTerm>& two_minus_2u() const { return two_; }
    const std::vector<TwoTerm>& tail() const { return tail_; }
    const std::optional<fgl::FormalGroupLaw>& formal_group() const { return fgl_; }
    const GradedSeries<TwoLocal>& two_series() const { return two_series_; }

    /// Degree of a key mod 48.
    static int degree(const Key& k)
    {
        long long d = static_cast<long long>(fgl::kDegV2) * k.v2 +
                      static_cast<long long>(fgl::kDegAlpha) * k.alpha +
                      static_cast<long long>(fgl::kDegU) * (k.u1 + k.u2);
        return static_cast<int>(((d % 48) + 48) % 48);
    }

    bool admits(const Key& k) const { return k.u1 <= n1_ && k.u2 <= n2_ && k.alpha <= caps_.alpha; }

    Key key_of(const Exponents& e) const
    {
        Key k;
        k.v2 = e[0];
        k.alpha = e[1];
        k.u1 = e[2];
        k.u2 = product() ? e[3] : 0;
        return k;
    }

    Exponents exponents_of(const Key& k) const
    {
        Exponents e{};
        e[0] = k.v2;
        e[1] = k.alpha;
        e[2] = k.u1;
        if (product())
            e[3] = k.u2;
        return e;
    }

    std::string var1() const { return product() ? "u1" : "u"; }

private:
    friend RingPresentation make_ring(const SpaceSpec&, const fgl::TwoSeries&, const Caps&,
                                      std::optional<fgl::FormalGroupLaw>);
    SpaceSpec space_;
    Caps caps_;
    int n1_ = 0;
    int n2_ = 0;
    TablePtr table_;
    std::vector<TwoTerm> two_;  // [2](u) - 2u, ordered by d
    std::vector<TwoTerm> tail_; // [2](u) - 2u - alpha u^2
    GradedSeries<TwoLocal> two_series_{exactalg::make_table({})};
    std::optional<fgl::FormalGroupLaw> fgl_;
};

inline void validate_space(const SpaceSpec& s)
{
    auto bad = [](int v) { return v < 0 || v > kMaxDeskParameter; };
    if (bad(s.n) || bad(s.m) || bad(s.K))
        throw Error(ErrorCode::invalid_argument, "space parameters outside desk-scale bounds");
    if (s.kind == SpaceKind::rp_even && s.n < 1)
        throw Error(ErrorCode::invalid_argument, "RPeven needs n >= 1");
    if (s.is_product() && s.n < 1)
        throw Error(ErrorCode::invalid_argument, "product ring needs n >= 1");
    if (s.kind == SpaceKind::product_even_even && s.m < 1)
        throw Error(ErrorCode::invalid_argument, "product ring needs m >= 1");
}

/// u-exponent bounds of the space: u^(bound+1) = 0 (or truncation for RPinfty).
inline std::pair<int, int> u_bounds(const SpaceSpec& s, const Caps& caps)
{
    switch (s.kind) {
    case SpaceKind::rp_even: return {s.n, 0};
    case SpaceKind::rp_infty: return {caps.u, 0};
    case SpaceKind::product_even_even: return {s.n, s.m};
    case SpaceKind::product_even_odd: return {s.n, 8 * s.K + 5};
    }
    return {0, 0};
}

/// Two-series order a ring needs for its rule right-hand sides.
inline int required_two_series_order(const SpaceSpec& s, const Caps& caps)
{
    auto [a, b] = u_bounds(s, caps);
    return std::max({a, b, 2});
}

inline TablePtr ring_table(const SpaceSpec& s, const Caps& caps)
{
    using exactalg::BoundKind;
    auto [n1, n2] = u_bounds(s, caps);
    std::vector<exactalg::Generator> g{{"v2", fgl::kDegV2, BoundKind::unit_order, 8},
                                       {"alpha", fgl::kDegAlpha, BoundKind::max_exponent, caps.alpha}};
    if (s.is_product()) {
        g.push_back({"u1", fgl::kDegU, BoundKind::max_exponent, n1});
        g.push_back({"u2", fgl::kDegU, BoundKind::max_exponent, n2});
        return exactalg::make_table(std::move(g), 48, {"u1", "u2"}, n1 + n2);
    }
    g.push_back({"u", fgl::kDegU, BoundKind::max_exponent, n1});
    return exactalg::make_table(std::move(g), 48, {"u"}, n1);
}

/// Presentation from a rescaled 2-series; the formal group law is only needed for
/// fgl_sum_power.
inline RingPresentation make_ring(const SpaceSpec& space, const fgl::TwoSeries& two, const Caps& caps,
                                  std::optional<fgl::FormalGroupLaw> F = std::nullopt)
{
    validate_space(space);
    if (two.coordinates != fgl::Coordinates::rescaled)
        throw Error(ErrorCode::invalid_argument, "ring needs the rescaled 2-series");
    if (F && F->coordinates != fgl::Coordinates::rescaled)
        throw Error(ErrorCode::invalid_argument, "ring needs the rescaled formal group law");
    if (caps.alpha < 1)
        throw Error(ErrorCode::cap_too_small, "alpha cap cannot hold alpha u^2");
    if (space.kind == SpaceKind::rp_infty && caps.u < 4)
        throw Error(ErrorCode::cap_too_small, "u cap cannot hold u^4");
    const int need = required_two_series_order(space, caps);
    if (two.order < need)
        throw Error(ErrorCode::cap_too_small, "2-series order " + std::to_string(two.order) +
                                                  " below required " + std::to_string(need));
    if (two.alpha_cap >= 0 && two.alpha_cap < caps.alpha)
        throw Error(ErrorCode::cap_too_small, "2-series alpha cap below the ring's");
    if (F && F->alpha_cap >= 0 && F->alpha_cap < caps.alpha)
        throw Error(ErrorCode::cap_too_small, "formal group alpha cap below the ring's");

    RingPresentation r;
    r.space_ = space;
    r.caps_ = caps;
    std::tie(r.n1_, r.n2_) = u_bounds(space, caps);
    r.table_ = ring_table(space, caps);
    r.two_series_ = two.series;
    r.fgl_ = std::move(F);

    const auto& t = two.series.gens();
    const auto ti = t.index(two.t), ai = t.index("alpha");
    bool saw_2u = false, saw_au2 = false, saw_u4 = false;
    for (const auto& [e, c] : two.series.terms()) {
        int d = e[ti], aa = e[ai];
        if (d == 1 && aa == 0) {
            if (c != TwoLocal(2))
                throw Error(ErrorCode::invalid_argument, "2-series does not start with 2u");
            saw_2u = true;
            continue;
        }
        const bool au2 = d == 2 && aa == 1;
        if (au2)
            saw_au2 = c == TwoLocal(1);
        if (d == 4 && aa == 0)
            saw_u4 = c == TwoLocal(1);
        if (d > need || aa > caps.alpha)
            continue;
        r.two_.push_back({d, aa, c});
        if (!au2)
            r.tail_.push_back({d, aa, c});
    }
    if (!saw_2u || !saw_au2 || !saw_u4)
        throw Error(ErrorCode::invalid_argument, "2-series is not of the form 2u +_F alpha u^2 +_F u^4");
    auto by_d = [](const TwoTerm& a, const TwoTerm& b) { return std::tie(a.d, a.aa) < std::tie(b.d, b.aa); };
    std::sort(r.two_.begin(), r.two_.end(), by_d);
    std::sort(r.tail_.begin(), r.tail_.end(), by_d);
    return r;
}

inline RingPresentation make_ring(const SpaceSpec& space, const fgl::FormalGroupLaw& F, const Caps& caps)
{
    return make_ring(space, fgl::two_series(F, "u"), caps, F);
}

/// Element of the 2-adic basis expansion: every listed monomial has coefficient 1.
struct NormalForm {
    SpaceSpec space;
    std::set<Key> terms;
    bool truncated = false; // some contribution fell outside a cap
    int exact_alpha = 0;    // terms with alpha <= exact_alpha are unaffected by the alpha cap
    std::int64_t steps = 0;

    bool certified(const Key& k) const { return k.alpha <= exact_alpha; }
    friend bool operator==(const NormalForm& a, const NormalForm& b)
    {
        return a.space == b.space && a.terms == b.terms;
    }
};

namespace detail {

struct Order {
    Strategy s;
    bool operator()(const Key& a, const Key& b) const
    {
        if (s == Strategy::degree_ordered)
            return std::make_tuple(a.level(), -a.u2, a.alpha, a.u1, a.v2) <
                   std::make_tuple(b.level(), -b.u2, b.alpha, b.u1, b.v2);
        return std::make_tuple(a.level(), a.alpha, a.u2, a.u1, a.v2) <
               std::make_tuple(b.level(), b.alpha, b.u2, b.u1, b.v2);
    }
};

class Reducer {
public:
    Reducer(const RingPresentation& ring, Strategy s) : ring_(ring), pending_(Order{s}), strategy_(s) {}

    /// False (after noting a cap drop) when k lies outside the ring's bounds.
    bool admit(const Key& k)
    {
        if (ring_.admits(k))
            return true;
        // Exceeding a genuine nilpotence bound is a relation; any other drop is a cap.
        if (k.alpha > ring_.caps().alpha || ring_.u_is_truncation())
            truncated_ = true;
        return false;
    }

    void add(const Key& k, const TwoLocal& c)
    {
        if (c.is_zero() || !admit(k))
            return;
        if (k.u1 + k.u2 == 0)
            throw Error(ErrorCode::constant_term, "constant terms are outside the reduced ring");
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                terms_.erase(it);
                pending_.erase(k);
                return;
            }
        }
        pending_.insert(k);
    }

    NormalForm run(std::int64_t budget)
    {
        std::int64_t steps = 0;
        while (!pending_.empty()) {
            if (++steps > budget)
                throw Error(ErrorCode::non_termination, "normal form exceeded its step budget");
            Key k = *pending_.begin();
            pending_.erase(pending_.begin());
            auto it = terms_.find(k);
            if (it == terms_.end())
                continue;
            TwoLocal c = it->second;
            if (r2_applies(k)) {
                terms_.erase(it);
                apply_r2(k, c);
                continue;
            }
            if (c.is_one())
                continue;
            const int b = c.parity();
            TwoLocal h = c.half_of_even_part();
            if (b)
                it->second = TwoLocal(1);
            else
                terms_.erase(it);
            apply_r1(k, h);
        }
        NormalForm nf;
        nf.space = ring_.space();
        for (const auto& [k, c] : terms_) {
            if (!c.is_one())
                throw Error(ErrorCode::non_termination, "reduction left a non-basis coefficient");
            nf.terms.insert(k);
        }
        nf.truncated = truncated_;
        nf.steps = steps;
        return nf;
    }

private:
    bool r2_applies(const Key& k) const { return ring_.product() && k.alpha >= 1 && k.u1 >= 1 && k.u2 >= 2; }

    // 2h*m = -h*([2](u) - 2u)*(m/u) for a u-factor of m.
    void apply_r1(const Key& k, const TwoLocal& h)
    {
        if (h.is_zero())
            return;
        bool via_u1;
        if (!ring_.product())
            via_u1 = true;
        else if (strategy_ == Strategy::degree_ordered)
            via_u1 = k.u1 >= 1;
        else
            via_u1 = k.u2 == 0;
        for (const auto& t : ring_.two_minus_2u()) {
            Key n = k;
            n.alpha += t.aa;
            if (via_u1)
                n.u1 += t.d - 1;
            else
                n.u2 += t.d - 1;
            if (admit(n))
                add(n, -(h * t.c));
        }
    }

    // alpha u1 u2^2 = alpha u1^2 u2 - u1 T(u2) + u2 T(u1), T = [2](u) - 2u - alpha u^2.
    void apply_r2(const Key& k, const TwoLocal& c)
    {
        add({k.v2, k.alpha, k.u1 + 1, k.u2 - 1}, c);
        for (const auto& t : ring_.tail()) {
            Key a{k.v2, k.alpha - 1 + t.aa, k.u1, k.u2 - 2 + t.d};
            Key b{k.v2, k.alpha - 1 + t.aa, k.u1 - 1 + t.d, k.u2 - 1};
            const bool ka = admit(a), kb = admit(b);
            if (!ka && !kb)
                continue;
            TwoLocal ct = c * t.c;
            if (ka)
                add(a, -ct);
            if (kb)
                add(b, ct);
        }
    }

    const RingPresentation& ring_;
    std::map<Key, TwoLocal> terms_;
    std::set<Key, Order> pending_;
    Strategy strategy_;
    bool truncated_ = false;
};

} // namespace detail

/// Largest alpha-exponent drop the rules can cause for input of u-degree >= min_level.
inline int alpha_drop_bound(const RingPresentation& ring, int min_level)
{
    if (!ring.product())
        return 0;
    // Each alpha-lowering step of R2 raises the u-degree by at least 2.
    int top = ring.u1_bound() + ring.u2_bound();
    return std::max(0, (top - min_level) / 2);
}

/// 2-adic basis representative of e (an element of the ring's table).
inline NormalForm normal_form(const GradedSeries<TwoLocal>& e, const RingPresentation& ring,
                              Strategy strategy = Strategy::degree_ordered)
{
    if (!(*e.table() == *ring.table()))
        throw Error(ErrorCode::table_mismatch, "element is not expressed in the ring's variables");
    detail::Reducer red(ring, strategy);
    int min_level = -1;
    for (const auto& [ex, c] : e.terms()) {
        auto k = ring.key_of(ex);
        red.add(k, c);
        if (min_level < 0 || k.level() < min_level)
            min_level = k.level();
    }
    auto nf = red.run(ring.caps().step_budget);
    nf.exact_alpha = ring.caps().alpha - alpha_drop_bound(ring, std::max(min_level, 0));
    return nf;
}

inline GradedSeries<TwoLocal> to_series(const NormalForm& nf, const RingPresentation& ring)
{
    GradedSeries<TwoLocal> s(ring.table());
    for (const auto& k : nf.terms)
        s.add_term(ring.exponents_of(k), TwoLocal(1));
    return s;
}

inline GradedSeries<TwoLocal> monomial(const RingPresentation& ring, const Key& k,
                                       const TwoLocal& c = TwoLocal(1))
{
    GradedSeries<TwoLocal> s(ring.table());
    s.add_term(ring.exponents_of(k), c);
    return s;
}

/// [2](u_i) as an element of the ring (variable "u", "u1" or "u2").
inline GradedSeries<TwoLocal> two_series_in(const RingPresentation& ring, const std::string& var)
{
    const auto& two = ring.two_series();
    const auto& t = two.gens();
    std::string src;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.is_series_var(i))
            src = t[i].name;
    auto tab = ring.table();
    return exactalg::substitute(two, tab, {{src, GradedSeries<TwoLocal>::variable(tab, var)}});
}

/// (u1 +_F u2)^N reduced to the 2-adic basis.
inline NormalForm fgl_sum_power(int N, const RingPresentation& ring,
                                Strategy strategy = Strategy::degree_ordered)
{
    if (!ring.product())
        throw Error(ErrorCode::invalid_argument, "fgl_sum_power needs a product ring");
    if (N < 1)
        throw Error(ErrorCode::invalid_argument, "power must be positive");
    if (!ring.formal_group())
        throw Error(ErrorCode::invalid_argument, "ring was built without its formal group law");
    const auto& F = *ring.formal_group();
    const int top = ring.u1_bound() + ring.u2_bound();
    // A truncation error of F in degree > D shows up in degree >= N + D of the power.
    const int need = std::max(1, top - N + 1);
    if (N <= top && F.order < need)
        throw Error(ErrorCode::cap_too_small, "formal group order " + std::to_string(F.order) +
                                                  " below required " + std::to_string(need));
    auto tab = ring.table();
    using S = GradedSeries<TwoLocal>;
    S sum(tab);
    if (N <= top) {
        // Re-express F(u1, u2) over the ring's table.
        for (const auto& [e, c] : F.F.terms()) {
            const auto& ft = F.F.gens();
            Exponents x{};
            x[1] = e[ft.index("alpha")];
            x[2] = e[ft.index(F.x)];
            x[3] = e[ft.index(F.y)];
            sum.add_term(x, c);
        }
    }
    auto power = exactalg::pow(sum, N);
    return normal_form(power, ring, strategy);
}

struct ZeroCertificate {
    bool zero;
    std::vector<Key> survivors;
};

inline ZeroCertificate is_zero(const NormalForm& nf)
{
    return {nf.terms.empty(), std::vector<Key>(nf.terms.begin(), nf.terms.end())};
}

inline std::string key_string(const Key& k, bool product)
{
    std::string s;
    auto put = [&](const char* name, int e) {
        if (e == 0)
            return;
        if (!s.empty())
            s += '*';
        s += name;
        if (e != 1)
            s += '^' + std::to_string(e);
    };
    put("v2", k.v2);
    put("alpha", k.alpha);
    put(product ? "u1" : "u", k.u1);
    if (product)
        put("u2", k.u2);
    return s.empty() ? "1" : s;
}

inline nlohmann::json key_json(const Key& k, bool product)
{
    nlohmann::json j{{"v2", k.v2}, {"alpha", k.alpha}};
    if (product)
        j["u"] = {k.u1, k.u2};
    else
        j["u"] = k.u1;
    return j;
}

inline nlohmann::json to_json(const NormalForm& nf)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& k : nf.terms)
        terms.push_back(key_json(k, nf.space.is_product()));
    return {{"space", nf.space.str()},
            {"terms", terms},
            {"truncated", nf.truncated},
            {"exact_alpha", nf.exact_alpha}};
}

} // namespace realjw::projring

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "realjw/error.hpp"
#include "realjw/exactalg/graded_series.hpp"

namespace realjw::fgl {

using exactalg::BoundKind;
using exactalg::Exponents;
using exactalg::GradedSeries;
using exactalg::Rational;
using exactalg::TablePtr;
using exactalg::TwoLocal;

enum class Convention { araki, hazewinkel };
enum class Coordinates { classical, rescaled };

inline std::string to_string(Convention c) { return c == Convention::araki ? "araki" : "hazewinkel"; }

inline Convention parse_convention(const std::string& s)
{
    if (s == "araki")
        return Convention::araki;
    if (s == "hazewinkel")
        return Convention::hazewinkel;
    throw Error(ErrorCode::unsupported_convention, "unknown convention " + s);
}

inline constexpr int kMaxLogDepth = 6;
inline constexpr int kDefaultOrder = 26;
inline constexpr int kDefaultAlphaCap = 16;

// Degrees: cohomological, with |x| = 2 so that |v_n| = 2 - 2^(n+1).
inline constexpr int kDegX = 2;
inline constexpr int kDegV1 = -2;
inline constexpr int kDegV2 = -6;
inline constexpr int kDegU = -16;
inline constexpr int kDegAlpha = -32;

/// Coefficient ring Q[v1, v2] with integer grading.
inline TablePtr classical_coeff_table()
{
    static const TablePtr t = exactalg::make_table({{"v1", kDegV1}, {"v2", kDegV2}});
    return t;
}

/// Series in the given variables over Z_(2)[v1, v2], truncated at total order D.
inline TablePtr classical_table(const std::vector<std::string>& vars, int order)
{
    std::vector<exactalg::Generator> g;
    for (const auto& v : vars)
        g.push_back({v, kDegX});
    g.push_back({"v1", kDegV1});
    g.push_back({"v2", kDegV2});
    return exactalg::make_table(std::move(g), 0, vars, order);
}

/// Series in the given variables over Z_(2)[alpha]/(alpha^(cap+1)), graded mod 48.
/// A negative cap means no alpha truncation.
inline TablePtr rescaled_table(const std::vector<std::string>& vars, int order, int alpha_cap)
{
    std::vector<exactalg::Generator> g;
    for (const auto& v : vars)
        g.push_back({v, kDegU});
    if (alpha_cap >= 0)
        g.push_back({"alpha", kDegAlpha, BoundKind::max_exponent, alpha_cap});
    else
        g.push_back({"alpha", kDegAlpha});
    return exactalg::make_table(std::move(g), 48, vars, order);
}

struct BPLogData {
    Convention convention;
    int N;
    std::vector<GradedSeries<Rational>> l; // l[0..N] over classical_coeff_table()
};

struct FormalGroupLaw {
    Convention convention;
    Coordinates coordinates;
    int order;     // truncation in total (x, y)-degree
    int alpha_cap; // rescaled only; -1 = none
    std::string x, y;
    GradedSeries<TwoLocal> F;
};

struct TwoSeries {
    Coordinates coordinates;
    int order;
    int alpha_cap;
    std::string t;
    GradedSeries<TwoLocal> series;
};

/// 2-typical log coefficients with v_i = 0 for i >= 3.
inline BPLogData build_log(Convention conv, int N)
{
    if (N < 0 || N > kMaxLogDepth)
        throw Error(ErrorCode::invalid_argument, "log depth out of range");
    if (conv != Convention::araki && conv != Convention::hazewinkel)
        throw Error(ErrorCode::unsupported_convention, "unknown convention");
    using S = GradedSeries<Rational>;
    const auto tab = classical_coeff_table();
    auto v = [&](int i) {
        if (i == 1)
            return S::variable(tab, "v1");
        if (i == 2)
            return S::variable(tab, "v2");
        return S(tab);
    };
    BPLogData out{conv, N, {}};
    out.l.push_back(S::constant(tab, 1));
    for (int n = 1; n <= N; ++n) {
        S sum(tab);
        for (int i = 0; i < n; ++i) {
            auto vi = v(n - i);
            if (vi.is_zero())
                continue;
            sum += out.l[i] * exactalg::pow(vi, 1 << i);
        }
        // Araki: sum_{i<=n} l_i v_{n-i}^{2^i} = 2 l_n with v_0 = 2.
        Rational scale = conv == Convention::araki
                             ? Rational(1, 1) / (Rational(2) - Rational(mpz_class(1) << (1 << n)))
                             : Rational(1, 2);
        sum *= scale;
        out.l.push_back(std::move(sum));
    }
    return out;
}

/// log(t) = sum l_n t^(2^n) over the table {t, v1, v2} truncated at `order`.
inline GradedSeries<Rational> log_series(const BPLogData& log, const std::string& t, int order)
{
    auto tab = classical_table({t}, order);
    GradedSeries<Rational> s(tab);
    for (int n = 0; n <= log.N && (1 << n) <= order; ++n)
        for (const auto& [e, c] : log.l[n].terms()) {
            Exponents ex{};
            ex[0] = 1 << n;
            ex[1] = e[0];
            ex[2] = e[1];
            s.add_term(ex, c);
        }
    return s;
}

inline void require_log_depth(const BPLogData& log, int order)
{
    if (order < 1)
        throw Error(ErrorCode::invalid_argument, "truncation order must be positive");
    if (order >= (1 << (log.N + 1)))
        throw Error(ErrorCode::insufficient_log_depth,
                    "order " + std::to_string(order) + " needs log depth above " + std::to_string(log.N));
}

inline GradedSeries<TwoLocal> to_two_local(const GradedSeries<Rational>& s)
{
    return exactalg::convert<TwoLocal>(s, [](const Rational& q) {
        if (!exactalg::is_two_integral(q))
            throw Error(ErrorCode::non_integral_coefficient, q.get_str() + " has an even denominator");
        return TwoLocal::from_rational(q);
    });
}

inline GradedSeries<Rational> to_rational(const GradedSeries<TwoLocal>& s)
{
    return exactalg::convert<Rational>(s, [](const TwoLocal& c) { return c.value(); });
}

/// exp = compositional inverse of log, in the variable t.
inline GradedSeries<Rational> exp_series(const BPLogData& log, const std::string& t, int order)
{
    return exactalg::reversion(log_series(log, t, order), t);
}

/// F(x, y) = exp(log x + log y).
inline FormalGroupLaw fgl_from_log(const BPLogData& log, int order = kDefaultOrder)
{
    require_log_depth(log, order);
    using S = GradedSeries<Rational>;
    auto ex = exp_series(log, "t", order);
    auto tab = classical_table({"x", "y"}, order);
    auto lx = exactalg::substitute(log_series(log, "t", order), tab, {{"t", S::variable(tab, "x")}});
    auto ly = exactalg::substitute(log_series(log, "t", order), tab, {{"t", S::variable(tab, "y")}});
    auto F = exactalg::substitute(ex, tab, {{"t", lx + ly}});
    return {log.convention, Coordinates::classical, order, -1, "x", "y", to_two_local(F)};
}

/// x +_F y for series a, b over a common table; coefficient variables of F must be present there.
inline GradedSeries<TwoLocal> formal_sum(const FormalGroupLaw& F, const GradedSeries<TwoLocal>& a,
                                         const GradedSeries<TwoLocal>& b)
{
    a.require_same_table(b);
    return exactalg::substitute(F.F, a.table(), {{F.x, a}, {F.y, b}});
}

/// Iterated formal sum of the given series (zero for an empty list).
inline GradedSeries<TwoLocal> formal_sum(const FormalGroupLaw& F,
                                         const std::vector<GradedSeries<TwoLocal>>& terms,
                                         const TablePtr& table)
{
    GradedSeries<TwoLocal> acc(table);
    for (const auto& s : terms)
        acc = acc.is_zero() ? s : formal_sum(F, acc, s);
    return acc;
}

inline TablePtr univariate_table(const FormalGroupLaw& F, const std::string& t)
{
    return F.coordinates == Coordinates::classical ? classical_table({t}, F.order)
                                                   : rescaled_table({t}, F.order, F.alpha_cap);
}

/// [2](t) = F(t, t).
inline TwoSeries two_series(const FormalGroupLaw& F, const std::string& t = "t")
{
    auto tab = univariate_table(F, t);
    auto tv = GradedSeries<TwoLocal>::variable(tab, t);
    return {F.coordinates, F.order, F.alpha_cap, t, formal_sum(F, tv, tv)};
}

/// [2](t) = exp(2 log t); univariate, so usable at orders where F itself is expensive.
inline TwoSeries two_series_from_log(const BPLogData& log, int order, const std::string& t = "t")
{
    require_log_depth(log, order);
    auto lg = log_series(log, t, order);
    auto ex = exactalg::reversion(lg, t);
    auto s = exactalg::substitute(ex, lg.table(), {{t, lg * Rational(2)}});
    return {Coordinates::classical, order, -1, t, to_two_local(s)};
}

/// Sum^F v_i t^(2^i) with v_0 = 2 and v_i = 0 for i >= 3 (classical), or
/// 2u +_F alpha u^2 +_F u^4 (rescaled).
inline GradedSeries<TwoLocal> araki_two_series_rhs(const FormalGroupLaw& F, const std::string& t = "t")
{
    using S = GradedSeries<TwoLocal>;
    auto tab = univariate_table(F, t);
    auto tv = S::variable(tab, t);
    std::vector<S> parts;
    parts.push_back(tv * TwoLocal(2));
    if (F.coordinates == Coordinates::classical) {
        parts.push_back(S::variable(tab, "v1") * S::variable(tab, t, 2));
        parts.push_back(S::variable(tab, "v2") * S::variable(tab, t, 4));
    } else {
        parts.push_back(S::variable(tab, "alpha") * S::variable(tab, t, 2));
        parts.push_back(S::variable(tab, t, 4));
    }
    return formal_sum(F, parts, tab);
}

namespace detail {

/// Rewrites a classical series in coordinates u = v2^3 x, alpha = v1 v2^5 (v2^8 = 1) and
/// multiplies by v2^(3*outer). The result must be free of v2.
inline GradedSeries<TwoLocal> rescale_series(const GradedSeries<TwoLocal>& s,
                                             const std::vector<std::string>& from,
                                             const std::vector<std::string>& to, int order,
                                             int alpha_cap, int outer)
{
    using S = GradedSeries<TwoLocal>;
    std::vector<exactalg::Generator> g;
    for (const auto& v : to)
        g.push_back({v, kDegU});
    g.push_back({"alpha", kDegAlpha});
    g.push_back({"v2", kDegV2, BoundKind::unit_order, 8});
    auto mid = exactalg::make_table(std::move(g), 48, to, order);

    std::map<std::string, S> bind;
    for (std::size_t i = 0; i < from.size(); ++i)
        bind.emplace(from[i], S::variable(mid, to[i]) * S::variable(mid, "v2", 5)); // x = v2^-3 u
    bind.emplace("v1", S::variable(mid, "alpha") * S::variable(mid, "v2", 3));      // v1 = alpha v2^-5
    auto r = exactalg::substitute(s, mid, bind);
    r = r * S::variable(mid, "v2", 3 * outer);

    const auto v2 = mid->index("v2");
    for (const auto& [e, c] : r.terms())
        if (e[v2] != 0)
            throw Error(ErrorCode::not_homogeneous,
                        "rescaled series retains a v2 power: " + mid->monomial_string(e));
    return exactalg::retable(r, rescaled_table(to, order, alpha_cap));
}

} // namespace detail

inline FormalGroupLaw rescale_to_er2(const FormalGroupLaw& F, int alpha_cap = kDefaultAlphaCap,
                                     const std::string& u1 = "u1", const std::string& u2 = "u2")
{
    if (F.coordinates != Coordinates::classical)
        throw Error(ErrorCode::invalid_argument, "formal group law is already rescaled");
    auto r = detail::rescale_series(F.F, {F.x, F.y}, {u1, u2}, F.order, alpha_cap, 1);
    return {F.convention, Coordinates::rescaled, F.order, alpha_cap, u1, u2, std::move(r)};
}

inline TwoSeries rescale_to_er2(const TwoSeries& s, int alpha_cap = kDefaultAlphaCap,
                                const std::string& u = "u")
{
    if (s.coordinates != Coordinates::classical)
        throw Error(ErrorCode::invalid_argument, "series is already rescaled");
    auto r = detail::rescale_series(s.series, {s.t}, {u}, s.order, alpha_cap, 1);
    return {Coordinates::rescaled, s.order, alpha_cap, u, std::move(r)};
}

/// Lowest series-degree monomial where a and b differ, if any.
inline std::optional<Exponents> first_difference(const GradedSeries<TwoLocal>& a,
                                                 const GradedSeries<TwoLocal>& b)
{
    auto d = a - b;
    std::optional<Exponents> best;
    int bd = 0;
    for (const auto& [e, c] : d.terms()) {
        int sd = d.gens().series_degree(e);
        if (!best || sd < bd) {
            best = e;
            bd = sd;
        }
    }
    return best;
}

/// CSV: one row per term; exponent columns in table order, then numerator, denominator.
inline void write_coefficients_csv(const GradedSeries<TwoLocal>& s, std::ostream& os)
{
    const auto& t = s.gens();
    for (std::size_t i = 0; i < t.size(); ++i)
        os << t[i].name << ',';
    os << "numerator,denominator\n";
    for (const auto& [e, c] : s.terms()) {
        for (std::size_t i = 0; i < t.size(); ++i)
            os << e[i] << ',';
        os << c.numerator().get_str() << ',' << c.denominator().get_str() << '\n';
    }
    if (!os)
        throw Error(ErrorCode::io_failure, "failed to write coefficient table");
}

} // namespace realjw::fgl

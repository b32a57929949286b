#pragma once

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "realjw/bss/report.hpp"
#include "realjw/er2/ring.hpp"

namespace realjw::er2 {

/// The five families of the 2-adic basis of ER(2)^{8*}(RP^{16K+9},*).
enum class Family { alpha_u, v4_alpha_u, v4_u, x_alpha_i, x_v4_alpha_i };

inline std::string to_string(Family f)
{
    switch (f) {
    case Family::alpha_u: return "alpha^k u^j";
    case Family::v4_alpha_u: return "v2^4 alpha^k u^j";
    case Family::v4_u: return "v2^4 u^j";
    case Family::x_alpha_i: return "x alpha^k i";
    case Family::x_v4_alpha_i: return "x v2^4 alpha^k i";
    }
    return "?";
}

struct BasisElement {
    Family family = Family::alpha_u;
    int k = 0;
    int j = 0; // 0 for the i-families

    friend auto operator<=>(const BasisElement&, const BasisElement&) = default;
};

inline bool has_v4(Family f)
{
    return f == Family::v4_alpha_u || f == Family::v4_u || f == Family::x_v4_alpha_i;
}
inline bool has_i(Family f) { return f == Family::x_alpha_i || f == Family::x_v4_alpha_i; }

inline int degree(const BasisElement& b, int K)
{
    long long d = -32LL * b.k - 16LL * b.j;
    if (has_v4(b.family))
        d -= 24;
    if (has_i(b.family))
        d += kDegX + 16LL * K + 9;
    return static_cast<int>(((d % 48) + 48) % 48);
}

inline std::string to_string(const BasisElement& b)
{
    std::string s;
    auto put = [&](const std::string& n, int e) {
        if (e == 0)
            return;
        if (!s.empty())
            s += '*';
        s += n;
        if (e != 1)
            s += '^' + std::to_string(e);
    };
    if (has_i(b.family))
        put("x", 1);
    if (has_v4(b.family))
        put("v2", 4);
    put("alpha", b.k);
    put("u", b.j);
    if (has_i(b.family))
        put("i", 1);
    return s;
}

/// Every basis element with k <= kcap.
inline std::vector<BasisElement> enumerate_basis(int K, int kcap)
{
    if (K < 0 || kcap < 0)
        throw Error(ErrorCode::invalid_argument, "K and the k-cap must be non-negative");
    const int top = 8 * K + 4;
    std::vector<BasisElement> out;
    for (int k = 0; k <= kcap; ++k) {
        for (int j = 1; j <= top; ++j) {
            out.push_back({Family::alpha_u, k, j});
            if (k >= 1)
                out.push_back({Family::v4_alpha_u, k, j});
        }
        out.push_back({Family::x_alpha_i, k, 0});
        out.push_back({Family::x_v4_alpha_i, k, 0});
    }
    for (int j = 4; j <= top; ++j)
        out.push_back({Family::v4_u, 0, j});
    std::sort(out.begin(), out.end());
    return out;
}

/// Number of basis elements of degree d (mod 48) with k <= kcap.
inline int count_basis(int K, int d, int kcap)
{
    d = ((d % 48) + 48) % 48;
    if (d % 8 != 0)
        return 0;
    int n = 0;
    for (const auto& b : enumerate_basis(K, kcap))
        if (degree(b, K) == d)
            ++n;
    return n;
}

inline void write_basis_csv(std::ostream& os, int K, int kcap)
{
    os << "family,k,j,degree\n";
    for (const auto& b : enumerate_basis(K, kcap))
        os << to_string(b.family) << ',' << b.k << ',' << b.j << ',' << degree(b, K) << '\n';
}

/// Word in u, alpha, v2^4, x and i_{16K+9}.
struct ModuleWord {
    int u = 0;
    int alpha = 0;
    bool v2_4 = false;
    int x = 0;
    bool i = false;
};

inline int degree(const ModuleWord& w, int K)
{
    long long d = -16LL * w.u + 1LL * kDegAlpha * w.alpha + 1LL * kDegX * w.x;
    if (w.v2_4)
        d -= 24;
    if (w.i)
        d += 16LL * K + 9;
    return static_cast<int>(((d % 48) + 48) % 48);
}

/// x^x alpha^alpha [v2^4] z_t: the u-power relations leave the basis through these.
struct ZTerm {
    int x = 0;
    int t = 0;
    int alpha = 0;
    bool v2_4 = false;

    friend auto operator<=>(const ZTerm&, const ZTerm&) = default;
};

inline std::string to_string(const ZTerm& z)
{
    std::string s = "x^" + std::to_string(z.x);
    if (z.v2_4)
        s += "*v2^4";
    if (z.alpha)
        s += "*alpha^" + std::to_string(z.alpha);
    return s + "*z_" + std::to_string(z.t);
}

struct ModuleElement {
    int K = 0;
    std::set<BasisElement> basis;
    std::set<ZTerm> z;

    bool is_zero() const { return basis.empty() && z.empty(); }
    std::string str() const
    {
        if (is_zero())
            return "0";
        std::string s;
        for (const auto& b : basis)
            s += (s.empty() ? "" : " + ") + to_string(b);
        for (const auto& t : z)
            s += (s.empty() ? "" : " + ") + to_string(t);
        return s;
    }
};

/// Rewrites a word of degree = 0 mod 8 into the basis. u^{8K+5} goes through the
/// identification of x i with v2^4 u^{8K+5}; u^{8K+6}, u^{8K+7}, u^{8K+8} use the
/// u-power relations.
inline ModuleElement module_reduce(const ModuleWord& w, int K)
{
    if (K < 0 || w.u < 0 || w.alpha < 0 || w.x < 0)
        throw Error(ErrorCode::invalid_argument, "negative exponent or K");
    if (degree(w, K) % 8 != 0)
        throw Error(ErrorCode::invalid_argument,
                    "degree " + std::to_string(degree(w, K)) + " is not = 0 mod 8; only degrees 8* are modelled");
    ModuleElement e;
    e.K = K;
    if (w.x >= 7)
        return e;
    if (w.i) {
        if (w.u > 0)
            throw Error(ErrorCode::out_of_model_scope, "products of u with i are not described");
        // degree forces x^1
        e.basis.insert({w.v2_4 ? Family::x_v4_alpha_i : Family::x_alpha_i, w.alpha, 0});
        return e;
    }
    // degree forces x^0 here
    const int j = w.u;
    const int top = 8 * K + 4;
    if (j == 0)
        throw Error(ErrorCode::out_of_model_scope, "constants belong to the coefficient ring, not the reduced module");
    if (j <= top) {
        if (!w.v2_4)
            e.basis.insert({Family::alpha_u, w.alpha, j});
        else if (w.alpha >= 1)
            e.basis.insert({Family::v4_alpha_u, w.alpha, j});
        else if (j >= 4)
            e.basis.insert({Family::v4_u, 0, j});
        else
            throw Error(ErrorCode::out_of_model_scope,
                        "v2^4 u^" + std::to_string(j) + " is not in the image from ER(2)");
        return e;
    }
    if (j == top + 1) {
        e.basis.insert({w.v2_4 ? Family::x_alpha_i : Family::x_v4_alpha_i, w.alpha, 0});
        return e;
    }
    if (j == top + 2) {
        e.z.insert({2, 16 * K - 14, w.alpha, w.v2_4});
        return e;
    }
    if (j == top + 3) {
        if (w.alpha == 0)
            e.z.insert({4, 16 * K + 4, 0, w.v2_4}); // alpha x^3 = 0 kills the rest
        return e;
    }
    return e; // u^{8K+8} = 0
}

/// E(2)-side monomial v2^v2 alpha^alpha u^u of E(2)^*(RP^{16K+10}).
struct E2Monomial {
    int v2 = 0;
    int alpha = 0;
    int u = 0;
    friend auto operator<=>(const E2Monomial&, const E2Monomial&) = default;
};

/// Image of a basis element under the algebraic map to E(2)^{8*}(RP^{16K+10}).
inline E2Monomial e2_image(const BasisElement& b, int K)
{
    const int top = 8 * K + 5;
    switch (b.family) {
    case Family::alpha_u: return {0, b.k, b.j};
    case Family::v4_alpha_u: return {4, b.k, b.j};
    case Family::v4_u: return {4, 0, b.j};
    case Family::x_alpha_i: return {4, b.k, top};
    case Family::x_v4_alpha_i: return {0, b.k, top};
    }
    return {};
}

/// 2-adic basis monomials of E(2)^{8*}(RP^{16K+10}) with alpha <= kcap that the map misses.
/// Throws if two basis elements share an image.
inline std::vector<E2Monomial> e2_missed(int K, int kcap)
{
    std::set<E2Monomial> hit;
    for (const auto& b : enumerate_basis(K, kcap))
        if (!hit.insert(e2_image(b, K)).second)
            throw Error(ErrorCode::composition_failure, "map is not injective at " + to_string(b));
    std::vector<E2Monomial> out;
    for (int v : {0, 4})
        for (int k = 0; k <= kcap; ++k)
            for (int j = 1; j <= 8 * K + 5; ++j)
                if (!hit.count({v, k, j}))
                    out.push_back({v, k, j});
    return out;
}

/// x-torsion generators that land in degree 8* after lifting: even-part images with
/// v2^{0,4}, and odd-part images of d^r (r >= 2) multiplied by x.
inline int torsion_count(const bss::TorsionFiltration& t, int d, int kcap)
{
    d = ((d % 48) + 48) % 48;
    const int K = t.space.K;
    int n = 0;
    for (const auto& [r, gens] : t.by_order)
        for (const auto& g : gens) {
            const auto& l = g.label;
            if (g.twice || l.alpha > kcap || (l.v2 != 0 && l.v2 != 4))
                continue;
            if (l.gen == bss::Gen::none && bss::degree(l, K) == d)
                ++n;
            if (l.gen == bss::Gen::i && r >= 2 && ((bss::degree(l, K) + kDegX) % 48 + 48) % 48 == d)
                ++n;
        }
    return n;
}

} // namespace realjw::er2

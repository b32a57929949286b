#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "realjw/error.hpp"

namespace realjw::bss {

/// Extra generator carried by a class: none (even part), i_{16K+9} or z_{16K-33}.
enum class Gen { none = 0, i = 1, z = 2 };

enum class Part { even, odd };

/// Symbolic monomial v2^v2 alpha^alpha u^u [u2^u2] [gen]. Field order fixes the
/// comparison used for pivots: lowest u first, then lowest alpha.
struct Label {
    Gen gen = Gen::none;
    int u = 0;
    int alpha = 0;
    int v2 = 0;
    int u2 = 0;

    friend auto operator<=>(const Label&, const Label&) = default;

    Part part() const { return gen == Gen::none ? Part::even : Part::odd; }

    Label with_v2(int s) const
    {
        Label l = *this;
        l.v2 = ((s % 8) + 8) % 8;
        return l;
    }
    Label times_alpha(int k) const
    {
        Label l = *this;
        l.alpha += k;
        return l;
    }
};

inline Label even(int v2, int alpha, int u) { return {Gen::none, u, alpha, ((v2 % 8) + 8) % 8, 0}; }
inline Label odd_i(int v2, int alpha) { return {Gen::i, 0, alpha, ((v2 % 8) + 8) % 8, 0}; }

inline int gen_degree(Gen g, int K)
{
    switch (g) {
    case Gen::none: return 0;
    case Gen::i: return 16 * K + 9;
    case Gen::z: return 16 * K - 33;
    }
    return 0;
}

/// Degree mod 48: |v2| = -6, |alpha| = -32, |u| = -16.
inline int degree(const Label& l, int K)
{
    long long d = -6LL * l.v2 - 32LL * l.alpha - 16LL * (l.u + l.u2) + gen_degree(l.gen, K);
    return static_cast<int>(((d % 48) + 48) % 48);
}

/// Degree shift of d^r.
inline int differential_degree(int r) { return (17 * r + 1) % 48; }

inline std::string to_string(const Label& l)
{
    std::string s;
    auto put = [&](const std::string& name, int e) {
        if (e == 0)
            return;
        if (!s.empty())
            s += '*';
        s += name;
        if (e != 1)
            s += '^' + std::to_string(e);
    };
    put("v2", l.v2);
    put("alpha", l.alpha);
    put(l.u2 ? "u1" : "u", l.u);
    put("u2", l.u2);
    if (l.gen == Gen::i)
        put("i", 1);
    if (l.gen == Gen::z)
        put("z", 1);
    return s.empty() ? "1" : s;
}

inline nlohmann::json to_json(const Label& l, int K)
{
    return {{"class", to_string(l)},
            {"v2", l.v2},
            {"alpha", l.alpha},
            {"u", l.u},
            {"gen", l.gen == Gen::none ? "" : (l.gen == Gen::i ? "i" : "z")},
            {"degree", degree(l, K)}};
}

/// F2 combination of labels.
using Vec = std::set<Label>;

inline void toggle(Vec& a, const Label& l)
{
    auto [it, inserted] = a.insert(l);
    if (!inserted)
        a.erase(it);
}

inline std::string to_string(const Vec& v)
{
    if (v.empty())
        return "0";
    std::string s;
    for (const auto& l : v) {
        if (!s.empty())
            s += " + ";
        s += to_string(l);
    }
    return s;
}

/// F2 combination of class indices.
using Coords = std::set<int>;

template <typename T>
void add_to(std::set<T>& a, const std::set<T>& b)
{
    for (const auto& x : b) {
        auto [it, inserted] = a.insert(x);
        if (!inserted)
            a.erase(it);
    }
}

/// Row-reduced F2 span with pivot = minimal element; each row carries a tag recording
/// which combination of named generators it is.
template <typename T>
class BasicEchelon {
public:
    using Set = std::set<T>;
    struct Row {
        Set vec;
        Coords tag;
    };

    /// Adds v (with tag) to the span. Returns false when v was already in the span;
    /// `residual_tag` then holds the tag combination that v reduced to.
    bool insert(Set v, Coords tag, Coords* residual_tag = nullptr)
    {
        reduce_leading(v, tag);
        if (v.empty()) {
            if (residual_tag)
                *residual_tag = tag;
            return false;
        }
        T p = *v.begin();
        rows_.emplace(p, Row{std::move(v), std::move(tag)});
        return true;
    }

    /// Eliminates pivots while the minimal element of v is a pivot. Leaves v either
    /// empty or headed by a non-pivot.
    void reduce_leading(Set& v, Coords& tag) const
    {
        while (!v.empty()) {
            auto it = rows_.find(*v.begin());
            if (it == rows_.end())
                return;
            add_to(v, it->second.vec);
            add_to(tag, it->second.tag);
        }
    }

    /// Eliminates every pivot from v.
    void reduce_full(Set& v, Coords& tag) const
    {
        Set out;
        while (!v.empty()) {
            T x = *v.begin();
            auto it = rows_.find(x);
            if (it == rows_.end()) {
                v.erase(v.begin());
                out.insert(x);
                continue;
            }
            add_to(v, it->second.vec);
            add_to(tag, it->second.tag);
        }
        v = std::move(out);
    }

    bool is_pivot(const T& x) const { return rows_.count(x) != 0; }
    const std::map<T, Row>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

private:
    std::map<T, Row> rows_;
};

using Echelon = BasicEchelon<Label>;

} // namespace realjw::bss

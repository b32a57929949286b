#pragma once

#include <array>
#include <compare>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "realjw/error.hpp"
#include "realjw/exactalg/two_local.hpp"

namespace realjw::er2 {

using exactalg::TwoLocal;

inline constexpr int kDegX = -17;
inline constexpr int kDegW = -8;
inline constexpr int kDegAlpha = -32;
inline constexpr int kDegAlphaS = -12; // alpha_s has degree -12 s

/// Arbitrary product x^x w^w alpha^alpha alpha_1^s[1] alpha_2^s[2] alpha_3^s[3].
struct RawWord {
    int x = 0;
    int w = 0;
    int alpha = 0;
    std::array<int, 4> s{}; // index 0 unused (alpha_0 = 2)

    friend auto operator<=>(const RawWord&, const RawWord&) = default;
};

inline RawWord gen_x(int e = 1) { RawWord r; r.x = e; return r; }
inline RawWord gen_w(int e = 1) { RawWord r; r.w = e; return r; }
inline RawWord gen_alpha(int e = 1) { RawWord r; r.alpha = e; return r; }
inline RawWord gen_alpha_s(int s, int e = 1)
{
    if (s < 1 || s > 3)
        throw Error(ErrorCode::invalid_argument, "alpha_s needs 1 <= s <= 3 (alpha_0 = 2)");
    RawWord r;
    r.s[s] = e;
    return r;
}

inline RawWord operator*(RawWord a, const RawWord& b)
{
    a.x += b.x;
    a.w += b.w;
    a.alpha += b.alpha;
    for (int i = 1; i < 4; ++i)
        a.s[i] += b.s[i];
    return a;
}

inline int degree(const RawWord& r)
{
    long long d = 1LL * kDegX * r.x + 1LL * kDegW * r.w + 1LL * kDegAlpha * r.alpha;
    for (int i = 1; i < 4; ++i)
        d += 1LL * kDegAlphaS * i * r.s[i];
    return static_cast<int>(((d % 48) + 48) % 48);
}

/// Canonical word: x^x alpha^alpha w^w alpha_s with w, s not both present, at most one
/// alpha_s, and alpha_2 only when alpha = 0.
struct Word {
    int x = 0;
    int alpha = 0;
    int w = 0;
    int s = 0; // 0 = none

    friend auto operator<=>(const Word&, const Word&) = default;

    RawWord raw() const
    {
        RawWord r;
        r.x = x;
        r.w = w;
        r.alpha = alpha;
        if (s)
            r.s[s] = 1;
        return r;
    }
    bool torsion() const { return x > 0; }
};

inline std::string to_string(const Word& w)
{
    std::string out;
    auto put = [&](const std::string& n, int e) {
        if (e == 0)
            return;
        if (!out.empty())
            out += '*';
        out += n;
        if (e != 1)
            out += '^' + std::to_string(e);
    };
    put("x", w.x);
    put("alpha", w.alpha);
    put("w", w.w);
    if (w.s)
        put("alpha_" + std::to_string(w.s), 1);
    return out.empty() ? "1" : out;
}

/// Element of ER(2)^*: 2-local coefficients on x-free words, 0/1 on x-torsion words.
class ER2Element {
public:
    ER2Element() = default;

    const std::map<Word, TwoLocal>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Adds c * w for a canonical word (used by the normalizer).
    void add_canonical(const Word& w, const TwoLocal& c)
    {
        auto& slot = terms_[w];
        slot += c;
        if (w.torsion())
            slot = TwoLocal(slot.parity());
        if (slot.is_zero())
            terms_.erase(w);
    }

    friend bool operator==(const ER2Element&, const ER2Element&) = default;

    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& [w, c] : terms_) {
            if (!s.empty())
                s += " + ";
            auto word = to_string(w);
            if (word == "1")
                s += c.str();
            else
                s += (c.is_one() ? "" : c.str() + "*") + word;
        }
        return s;
    }

    friend void PrintTo(const ER2Element& e, std::ostream* os) { *os << e.str(); }

private:
    std::map<Word, TwoLocal> terms_;
};

using WordSum = std::vector<std::pair<TwoLocal, RawWord>>;

namespace detail {

/// One rewrite step on a single term; returns false when no rule applies. `pick`
/// chooses among applicable rules (index into the list of applicable ones).
template <typename Pick>
bool rewrite_step(TwoLocal& c, RawWord& r, bool& dead, Pick&& pick)
{
    enum Rule { ss, ww, ws, a2, xs, x2, ax3, wx3, x7 };
    std::vector<std::pair<Rule, int>> app;
    int ns = r.s[1] + r.s[2] + r.s[3];
    if (ns >= 2)
        app.push_back({ss, 0});
    if (r.w >= 2)
        app.push_back({ww, 0});
    for (int i = 1; i < 4; ++i)
        if (r.w >= 1 && r.s[i] >= 1)
            app.push_back({ws, i});
    if (r.alpha >= 1 && r.s[2] >= 1)
        app.push_back({a2, 0});
    if (r.x >= 1) {
        for (int i = 1; i < 4; ++i)
            if (r.s[i] >= 1)
                app.push_back({xs, i});
        if (c.parity() == 0 || !c.is_one())
            app.push_back({x2, 0});
        if (r.x >= 3 && r.alpha >= 1)
            app.push_back({ax3, 0});
        if (r.x >= 3 && r.w >= 1)
            app.push_back({wx3, 0});
        if (r.x >= 7)
            app.push_back({x7, 0});
    }
    if (app.empty())
        return false;
    auto [rule, i] = app[pick(app.size())];
    switch (rule) {
    case ss: {
        // alpha_a alpha_b = 2 alpha_{a+b mod 4}, alpha_0 = 2
        auto first = [&r] {
            for (int k = 1; k < 4; ++k)
                if (r.s[k])
                    return k;
            return 0;
        };
        int a = first();
        --r.s[a];
        int b = first();
        --r.s[b];
        int t = (a + b) % 4;
        c *= TwoLocal(2);
        if (t == 0)
            c *= TwoLocal(2);
        else
            ++r.s[t];
        break;
    }
    case ww:
        r.w -= 2;
        r.alpha += 2;
        break;
    case ws: {
        // w alpha_s = alpha alpha_{s+2}
        --r.w;
        --r.s[i];
        ++r.alpha;
        int t = (i + 2) % 4;
        if (t == 0)
            c *= TwoLocal(2);
        else
            ++r.s[t];
        break;
    }
    case a2:
        // alpha alpha_2 = 2w
        --r.alpha;
        --r.s[2];
        ++r.w;
        c *= TwoLocal(2);
        break;
    case xs:
    case ax3:
    case wx3:
    case x7: dead = true; break;
    case x2:
        // 2x = 0: only the residue mod 2 survives
        if (c.parity() == 0)
            dead = true;
        else
            c = TwoLocal(1);
        break;
    }
    return true;
}

inline Word to_word(const RawWord& r)
{
    Word w;
    w.x = r.x;
    w.alpha = r.alpha;
    w.w = r.w;
    for (int i = 1; i < 4; ++i)
        if (r.s[i])
            w.s = i;
    return w;
}

inline void reduce_term(ER2Element& out, TwoLocal c, RawWord r, const std::function<std::size_t(std::size_t)>& pick)
{
    if (c.is_zero())
        return;
    for (int i = 1; i < 4; ++i)
        if (r.s[i] < 0)
            throw Error(ErrorCode::invalid_argument, "negative exponent");
    if (r.x < 0 || r.w < 0 || r.alpha < 0)
        throw Error(ErrorCode::invalid_argument, "negative exponent");
    bool dead = false;
    while (!dead && rewrite_step(c, r, dead, pick)) {
    }
    if (!dead)
        out.add_canonical(to_word(r), c);
}

} // namespace detail

/// Canonical form (deterministic rule order).
inline ER2Element er2_normalize(const WordSum& sum)
{
    ER2Element out;
    for (const auto& [c, r] : sum)
        detail::reduce_term(out, c, r, [](std::size_t) { return std::size_t{0}; });
    return out;
}

/// Same rewrite system with a random choice of rule at every step.
inline ER2Element er2_normalize_random(const WordSum& sum, std::mt19937_64& rng)
{
    ER2Element out;
    for (const auto& [c, r] : sum)
        detail::reduce_term(out, c, r, [&](std::size_t n) {
            return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        });
    return out;
}

inline ER2Element er2_normalize(const RawWord& r, const TwoLocal& c = TwoLocal(1))
{
    return er2_normalize(WordSum{{c, r}});
}

inline ER2Element operator*(const ER2Element& a, const ER2Element& b)
{
    WordSum s;
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms())
            s.push_back({ca * cb, wa.raw() * wb.raw()});
    return er2_normalize(s);
}

inline ER2Element operator+(const ER2Element& a, const ER2Element& b)
{
    ER2Element out = a;
    for (const auto& [w, c] : b.terms())
        out.add_canonical(w, c);
    return out;
}

inline ER2Element scalar(const TwoLocal& c) { return er2_normalize(RawWord{}, c); }

/// Mod-48 degree; zero and inhomogeneous elements have none.
inline int degree(const ER2Element& e)
{
    if (e.is_zero())
        throw Error(ErrorCode::not_homogeneous, "the zero element has no degree");
    int d = -1;
    for (const auto& [w, c] : e.terms()) {
        int dw = degree(w.raw());
        if (d >= 0 && dw != d)
            throw Error(ErrorCode::not_homogeneous, "terms of degrees " + std::to_string(d) + " and " +
                                                        std::to_string(dw) + " in " + e.str());
        d = dw;
    }
    return d;
}

} // namespace realjw::er2

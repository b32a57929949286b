#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "realjw/error.hpp"
#include "realjw/exactalg/two_local.hpp"

namespace realjw::exactalg {

inline constexpr std::size_t kMaxVars = 8;

/// Exponent tuple; entries past the table size are always zero.
using Exponents = std::array<int, kMaxVars>;

enum class BoundKind {
    none,         // polynomial variable, unbounded
    max_exponent, // x^(bound+1) = 0
    unit_order,   // x^bound = 1, exponents kept in [0, bound)
};

struct Generator {
    std::string name;
    int degree = 0;
    BoundKind kind = BoundKind::none;
    int bound = 0;

    friend bool operator==(const Generator&, const Generator&) = default;
};

/// Generators with degrees and truncation data. A subset of the generators may be
/// designated series variables; their total degree is truncated at series_order.
class GeneratorTable {
public:
    GeneratorTable(std::vector<Generator> gens, int modulus = 0,
                   std::vector<std::string> series_vars = {}, int series_order = -1)
        : gens_(std::move(gens)), modulus_(modulus), series_order_(series_order)
    {
        if (gens_.size() > kMaxVars)
            throw Error(ErrorCode::invalid_argument, "too many generators");
        if (modulus_ < 0)
            throw Error(ErrorCode::invalid_argument, "negative modulus");
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j)
                if (gens_[i].name == gens_[j].name)
                    throw Error(ErrorCode::invalid_argument, "duplicate generator " + gens_[i].name);
            const auto& g = gens_[i];
            if (g.kind == BoundKind::unit_order) {
                if (g.bound <= 0)
                    throw Error(ErrorCode::invalid_argument, "unit order must be positive");
                // x^order = 1 must be degree zero in the active grading.
                long long wrap = static_cast<long long>(g.degree) * g.bound;
                if (modulus_ == 0 ? wrap != 0 : wrap % modulus_ != 0)
                    throw Error(ErrorCode::invalid_argument,
                                "unit " + g.name + " of order " + std::to_string(g.bound) +
                                    " is inconsistent with the grading");
            }
            if (g.kind == BoundKind::max_exponent && g.bound < 0)
                throw Error(ErrorCode::invalid_argument, "negative exponent bound");
        }
        for (const auto& s : series_vars)
            series_mask_[index(s)] = true;
    }

    std::size_t size() const { return gens_.size(); }
    const Generator& operator[](std::size_t i) const { return gens_[i]; }
    const std::vector<Generator>& generators() const { return gens_; }
    int modulus() const { return modulus_; }
    int series_order() const { return series_order_; }
    bool is_series_var(std::size_t i) const { return series_mask_[i]; }
    bool has_series_vars() const
    {
        return std::any_of(series_mask_.begin(), series_mask_.end(), [](bool b) { return b; });
    }

    std::optional<std::size_t> find(const std::string& name) const
    {
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (gens_[i].name == name)
                return i;
        return std::nullopt;
    }

    std::size_t index(const std::string& name) const
    {
        auto i = find(name);
        if (!i)
            throw Error(ErrorCode::invalid_argument, "unknown generator " + name);
        return *i;
    }

    int series_degree(const Exponents& e) const
    {
        int d = 0;
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (series_mask_[i])
                d += e[i];
        return d;
    }

    /// Normalizes unit exponents; returns false when the monomial is truncated away.
    bool admit(Exponents& e) const
    {
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            const auto& g = gens_[i];
            switch (g.kind) {
            case BoundKind::none:
                if (e[i] < 0)
                    throw Error(ErrorCode::invalid_argument, "negative exponent on " + g.name);
                break;
            case BoundKind::max_exponent:
                if (e[i] < 0)
                    throw Error(ErrorCode::invalid_argument, "negative exponent on " + g.name);
                if (e[i] > g.bound)
                    return false;
                break;
            case BoundKind::unit_order:
                e[i] = ((e[i] % g.bound) + g.bound) % g.bound;
                break;
            }
        }
        if (series_order_ >= 0 && series_degree(e) > series_order_)
            return false;
        return true;
    }

    /// Integer degree of the stored (normalized) exponents.
    long long integer_degree(const Exponents& e) const
    {
        long long d = 0;
        for (std::size_t i = 0; i < gens_.size(); ++i)
            d += static_cast<long long>(gens_[i].degree) * e[i];
        return d;
    }

    /// Degree in the active grading: reduced into [0, modulus) in mod mode.
    long long degree(const Exponents& e) const { return reduce(integer_degree(e)); }

    long long reduce(long long d) const
    {
        if (modulus_ == 0)
            return d;
        return ((d % modulus_) + modulus_) % modulus_;
    }

    std::string monomial_string(const Exponents& e) const
    {
        std::string out;
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            if (e[i] == 0)
                continue;
            if (!out.empty())
                out += '*';
            out += gens_[i].name;
            if (e[i] != 1)
                out += '^' + std::to_string(e[i]);
        }
        return out.empty() ? "1" : out;
    }

    /// Same generators with a different series truncation order.
    std::shared_ptr<const GeneratorTable> with_series_order(int order) const
    {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (series_mask_[i])
                names.push_back(gens_[i].name);
        return std::make_shared<const GeneratorTable>(gens_, modulus_, names, order);
    }

    friend bool operator==(const GeneratorTable& a, const GeneratorTable& b)
    {
        return a.gens_ == b.gens_ && a.modulus_ == b.modulus_ &&
               a.series_order_ == b.series_order_ && a.series_mask_ == b.series_mask_;
    }

private:
    std::vector<Generator> gens_;
    int modulus_;
    int series_order_;
    std::array<bool, kMaxVars> series_mask_{};
};

using TablePtr = std::shared_ptr<const GeneratorTable>;

inline TablePtr make_table(std::vector<Generator> gens, int modulus = 0,
                           std::vector<std::string> series_vars = {}, int series_order = -1)
{
    return std::make_shared<const GeneratorTable>(std::move(gens), modulus, std::move(series_vars),
                                                  series_order);
}

inline Exponents zero_exponents() { return Exponents{}; }

/// Sparse multivariate truncated series with exact coefficients.
template <typename C>
class GradedSeries {
public:
    using Coeff = C;
    using Terms = std::map<Exponents, C>;
    using Traits = CoeffTraits<C>;

    explicit GradedSeries(TablePtr table) : table_(std::move(table))
    {
        if (!table_)
            throw Error(ErrorCode::invalid_argument, "null generator table");
    }

    static GradedSeries constant(TablePtr table, const C& c)
    {
        GradedSeries s(std::move(table));
        s.add_term(zero_exponents(), c);
        return s;
    }

    static GradedSeries monomial(TablePtr table, Exponents e, const C& c = Traits::one())
    {
        GradedSeries s(std::move(table));
        s.add_term(e, c);
        return s;
    }

    static GradedSeries variable(TablePtr table, const std::string& name, int power = 1)
    {
        Exponents e{};
        e[table->index(name)] = power;
        return monomial(std::move(table), e);
    }

    const TablePtr& table() const { return table_; }
    const GeneratorTable& gens() const { return *table_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    C coefficient(const Exponents& e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? C(0) : it->second;
    }

    /// Accumulates c*monomial; the monomial is normalized and truncated per the table.
    void add_term(Exponents e, const C& c)
    {
        if (Traits::is_zero(c))
            return;
        if (!table_->admit(e))
            return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (Traits::is_zero(it->second))
                terms_.erase(it);
        }
    }

    GradedSeries& operator+=(const GradedSeries& o)
    {
        require_same_table(o);
        for (const auto& [e, c] : o.terms_)
            add_term(e, c);
        return *this;
    }

    GradedSeries& operator-=(const GradedSeries& o)
    {
        require_same_table(o);
        for (const auto& [e, c] : o.terms_)
            add_term(e, -c);
        return *this;
    }

    GradedSeries& operator*=(const C& k)
    {
        if (Traits::is_zero(k)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_)
            c *= k;
        return *this;
    }

    friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
    friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
    friend GradedSeries operator*(GradedSeries a, const C& k) { return a *= k; }
    GradedSeries operator-() const
    {
        GradedSeries r = *this;
        for (auto& [e, c] : r.terms_)
            c = -c;
        return r;
    }

    friend bool operator==(const GradedSeries& a, const GradedSeries& b)
    {
        return *a.table_ == *b.table_ && a.terms_ == b.terms_;
    }

    /// Common degree of all terms in the active grading, if there is one.
    std::optional<long long> homogeneous_degree() const
    {
        std::optional<long long> d;
        for (const auto& [e, c] : terms_) {
            long long de = table_->degree(e);
            if (d && *d != de)
                return std::nullopt;
            d = de;
        }
        return d;
    }

    /// Smallest total degree in the series variables; -1 for the zero series.
    int min_series_degree() const
    {
        int best = -1;
        for (const auto& [e, c] : terms_) {
            int d = table_->series_degree(e);
            if (best < 0 || d < best)
                best = d;
        }
        return best;
    }

    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first)
                os << " + ";
            first = false;
            os << '(' << Traits::str(c) << ")*" << table_->monomial_string(e);
        }
        return os.str();
    }

    void require_same_table(const GradedSeries& o) const
    {
        if (table_ != o.table_ && !(*table_ == *o.table_))
            throw Error(ErrorCode::table_mismatch, "series over different generator tables");
    }

private:
    TablePtr table_;
    Terms terms_;
};

template <typename C>
GradedSeries<C> series_mul(const GradedSeries<C>& a, const GradedSeries<C>& b)
{
    a.require_same_table(b);
    GradedSeries<C> out(a.table());
    const auto& t = a.gens();
    const int order = t.series_order();
    const std::size_t n = t.size();
    for (const auto& [ea, ca] : a.terms()) {
        const int da = order >= 0 ? t.series_degree(ea) : 0;
        for (const auto& [eb, cb] : b.terms()) {
            if (order >= 0 && da + t.series_degree(eb) > order)
                continue;
            Exponents e{};
            for (std::size_t i = 0; i < n; ++i)
                e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

template <typename C>
GradedSeries<C> operator*(const GradedSeries<C>& a, const GradedSeries<C>& b)
{
    return series_mul(a, b);
}

template <typename C>
GradedSeries<C> pow(const GradedSeries<C>& a, int n)
{
    if (n < 0)
        throw Error(ErrorCode::invalid_argument, "negative power");
    auto r = GradedSeries<C>::constant(a.table(), CoeffTraits<C>::one());
    auto sq = a;
    while (n > 0) {
        if (n & 1)
            r = series_mul(r, sq);
        n >>= 1;
        if (n > 0)
            sq = series_mul(sq, sq);
    }
    return r;
}

/// Composite f(bindings) over the target table. Unbound variables of f map to the
/// variable with the same name in the target.
template <typename C>
GradedSeries<C> substitute(const GradedSeries<C>& f, const TablePtr& target,
                           const std::map<std::string, GradedSeries<C>>& bindings)
{
    const auto& ft = f.gens();
    const std::size_t n = ft.size();
    std::vector<GradedSeries<C>> images;
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = ft[i];
        auto it = bindings.find(g.name);
        if (it != bindings.end()) {
            const auto& img = it->second;
            if (*img.table() != *target)
                throw Error(ErrorCode::table_mismatch, "binding for " + g.name + " lives in another table");
            if (ft.is_series_var(i) && img.coefficient(zero_exponents()) != C(0))
                throw Error(ErrorCode::non_nilpotent_substitution,
                            "binding for series variable " + g.name + " has a constant term");
            if (g.kind == BoundKind::unit_order)
                throw Error(ErrorCode::invalid_argument, "cannot rebind unit generator " + g.name);
            images.push_back(img);
        } else {
            auto j = target->find(g.name);
            if (!j)
                throw Error(ErrorCode::table_mismatch, "target table lacks generator " + g.name);
            images.push_back(GradedSeries<C>::variable(target, g.name));
        }
    }
    for (const auto& [name, img] : bindings)
        if (!ft.find(name))
            throw Error(ErrorCode::invalid_argument, "binding for unknown generator " + name);

    // powers[i][k] = images[i]^k, memoized; even powers come from squaring.
    std::vector<std::map<int, GradedSeries<C>>> powers(n);
    std::function<const GradedSeries<C>&(std::size_t, int)> power =
        [&](std::size_t i, int k) -> const GradedSeries<C>& {
        auto& p = powers[i];
        auto it = p.find(k);
        if (it != p.end())
            return it->second;
        GradedSeries<C> v(target);
        if (k == 0)
            v = GradedSeries<C>::constant(target, CoeffTraits<C>::one());
        else if (k == 1)
            v = images[i];
        else if (k % 2 == 0) {
            const auto& h = power(i, k / 2);
            v = series_mul(h, h);
        } else
            v = series_mul(power(i, k - 1), images[i]);
        return p.emplace(k, std::move(v)).first->second;
    };

    GradedSeries<C> out(target);
    for (const auto& [e, c] : f.terms()) {
        // Monomial factors (single term images) are applied by exponent shift.
        Exponents shift{};
        C scale = c;
        std::vector<const GradedSeries<C>*> heavy;
        bool dead = false;
        for (std::size_t i = 0; i < n && !dead; ++i) {
            if (e[i] == 0)
                continue;
            const auto& p = power(i, e[i]);
            if (p.is_zero()) {
                dead = true;
            } else if (p.size() == 1) {
                const auto& [pe, pc] = *p.terms().begin();
                for (std::size_t k = 0; k < kMaxVars; ++k)
                    shift[k] += pe[k];
                scale *= pc;
            } else {
                heavy.push_back(&p);
            }
        }
        if (dead)
            continue;
        if (heavy.empty()) {
            out.add_term(shift, scale);
            continue;
        }
        GradedSeries<C> acc = *heavy.front();
        for (std::size_t h = 1; h < heavy.size(); ++h)
            acc = series_mul(acc, *heavy[h]);
        for (const auto& [ae, ac] : acc.terms()) {
            Exponents sum{};
            for (std::size_t k = 0; k < kMaxVars; ++k)
                sum[k] = ae[k] + shift[k];
            out.add_term(sum, ac * scale);
        }
    }
    return out;
}

/// Re-expresses s in a table that is a relabeling/subset of s's table; generators
/// missing from the target must have exponent zero in every term.
template <typename C>
GradedSeries<C> retable(const GradedSeries<C>& s, const TablePtr& target)
{
    const auto& st = s.gens();
    std::vector<std::optional<std::size_t>> map(st.size());
    for (std::size_t i = 0; i < st.size(); ++i)
        map[i] = target->find(st[i].name);
    GradedSeries<C> out(target);
    for (const auto& [e, c] : s.terms()) {
        Exponents t{};
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (e[i] == 0)
                continue;
            if (!map[i])
                throw Error(ErrorCode::table_mismatch,
                            "generator " + st[i].name + " is absent from the target table");
            t[*map[i]] = e[i];
        }
        out.add_term(t, c);
    }
    return out;
}

/// Compositional inverse of f = t + (higher order) in the series variable `var`.
template <typename C>
GradedSeries<C> reversion(const GradedSeries<C>& f, const std::string& var)
{
    const auto& t = f.gens();
    const std::size_t vi = t.index(var);
    if (!t.is_series_var(vi) || t.series_order() < 0)
        throw Error(ErrorCode::invalid_argument, var + " is not a truncated series variable");
    for (std::size_t i = 0; i < t.size(); ++i)
        if (i != vi && t.is_series_var(i))
            throw Error(ErrorCode::invalid_argument, "reversion needs a single series variable");

    Exponents lin{};
    lin[vi] = 1;
    for (const auto& [e, c] : f.terms()) {
        if (e[vi] == 0)
            throw Error(ErrorCode::bad_leading_term, "series has terms free of " + var);
        if (e[vi] == 1 && !(e == lin))
            throw Error(ErrorCode::bad_leading_term, "linear coefficient is not exactly 1");
    }
    if (!(f.coefficient(lin) == CoeffTraits<C>::one()))
        throw Error(ErrorCode::bad_leading_term, "linear coefficient is not exactly 1");

    // Fixed-point step g <- g - (f(g) - t) gains one order per pass; pass p only needs
    // precision p, so each pass runs in a table truncated there.
    const int order = t.series_order();
    auto g = GradedSeries<C>::variable(f.table(), var);
    for (int p = 2; p <= order; ++p) {
        auto tp = t.with_series_order(p);
        auto gp = retable(g, tp);
        auto err = substitute(retable(f, tp), tp, {{var, gp}}) - GradedSeries<C>::variable(tp, var);
        if (!err.is_zero() && err.min_series_degree() < p)
            throw Error(ErrorCode::non_termination, "reversion is not converging");
        g = retable(gp - err, f.table());
    }
    return g;
}

/// Coefficient-type conversion; throws when a value cannot be represented.
template <typename To, typename From, typename Fn>
GradedSeries<To> convert(const GradedSeries<From>& s, Fn&& fn)
{
    GradedSeries<To> out(s.table());
    for (const auto& [e, c] : s.terms())
        out.add_term(e, fn(c));
    return out;
}

} // namespace realjw::exactalg

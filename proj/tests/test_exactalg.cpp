#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "realjw/exactalg/graded_series.hpp"

using namespace realjw;
using namespace realjw::exactalg;

namespace {

using Dense = std::vector<Rational>;

Dense dense_mul(const Dense& a, const Dense& b, std::size_t n)
{
    Dense r(n, Rational(0));
    for (std::size_t i = 0; i < a.size() && i < n; ++i)
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

// 1/a for a[0] = 1, by the usual recurrence.
Dense dense_inverse(const Dense& a, std::size_t n)
{
    Dense r(n, Rational(0));
    r[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        Rational s = 0;
        for (std::size_t i = 1; i <= k && i < a.size(); ++i)
            s += a[i] * r[k - i];
        r[k] = -s;
    }
    return r;
}

// Lagrange inversion: [t^n] g = (1/n) [s^(n-1)] (s / f(s))^n.
Dense lagrange_reversion(const Dense& f, std::size_t order)
{
    Dense q(f.begin() + 1, f.end()); // f(s)/s
    Dense inv = dense_inverse(q, order);
    Dense g(order + 1, Rational(0));
    Dense p{Rational(1)};
    for (std::size_t n = 1; n <= order; ++n) {
        p = dense_mul(p, inv, order);
        g[n] = p[n - 1] / Rational(static_cast<long>(n));
    }
    return g;
}

TablePtr t_table(int order)
{
    return make_table({{"t", 0}}, 0, {"t"}, order);
}

GradedSeries<Rational> from_dense(const TablePtr& tab, const Dense& d)
{
    GradedSeries<Rational> s(tab);
    for (std::size_t i = 0; i < d.size(); ++i) {
        Exponents e{};
        e[0] = static_cast<int>(i);
        s.add_term(e, d[i]);
    }
    return s;
}

Exponents ex(std::initializer_list<int> v)
{
    Exponents e{};
    std::size_t i = 0;
    for (int x : v)
        e[i++] = x;
    return e;
}

} // namespace

TEST(TwoLocal, Normalize)
{
    EXPECT_EQ(TwoLocal::normalize(6, 3), TwoLocal(2));
    auto v = TwoLocal::normalize(4, -6);
    EXPECT_EQ(v.numerator(), -2);
    EXPECT_EQ(v.denominator(), 3);
    try {
        TwoLocal::normalize(1, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::even_denominator);
    }
    EXPECT_THROW(TwoLocal::normalize(1, 0), Error);
    EXPECT_EQ(TwoLocal::normalize(0, 7).denominator(), 1);
}

TEST(TwoLocal, DivisionOnlyByUnits)
{
    auto a = TwoLocal::normalize(5, 3);
    EXPECT_EQ(a / TwoLocal(3), TwoLocal::normalize(5, 9));
    try {
        (void)(a / TwoLocal(6));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::division_by_even);
    }
}

TEST(TwoLocal, HalfOfEvenPart)
{
    auto a = TwoLocal::normalize(7, 3); // 7/3 = 1 + 2*(2/3)
    EXPECT_EQ(a.parity(), 1);
    EXPECT_EQ(a.half_of_even_part(), TwoLocal::normalize(2, 3));
    auto b = TwoLocal(-3);
    EXPECT_EQ(b.parity(), 1);
    EXPECT_EQ(b.half_of_even_part(), TwoLocal(-2));
}

TEST(TwoLocal, RandomRingAxiomsAndValuation)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-500, 500);
    std::uniform_int_distribution<long> den(0, 60);
    auto draw = [&] { return TwoLocal::normalize(num(rng), 2 * den(rng) + 1); };
    for (int i = 0; i < 500; ++i) {
        auto a = draw(), b = draw(), c = draw();
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a - a, TwoLocal(0));
        if (!a.is_zero() && !b.is_zero()) {
            EXPECT_EQ((a * b).valuation(), a.valuation() + b.valuation());
        }
        EXPECT_EQ(a.parity() + 2 * a.half_of_even_part(), a);
    }
}

TEST(GeneratorTable, Validation)
{
    EXPECT_THROW(make_table({{"a", 1}, {"a", 2}}), Error);
    // v2^8 = 1 only makes sense in the 48-periodic grading.
    EXPECT_THROW(make_table({{"v2", -6, BoundKind::unit_order, 8}}), Error);
    EXPECT_NO_THROW(make_table({{"v2", -6, BoundKind::unit_order, 8}}, 48));
    EXPECT_THROW(make_table({{"v2", -6, BoundKind::unit_order, 5}}, 48), Error);
}

TEST(GradedSeries, Multiplication)
{
    auto tab = make_table({{"u", -16}, {"alpha", 16}, {"v2", -6, BoundKind::unit_order, 8}}, 48);
    using S = GradedSeries<TwoLocal>;
    auto one = S::constant(tab, 1);
    auto u = S::variable(tab, "u");
    auto p = series_mul(one + u, one - u);
    EXPECT_EQ(p, one - pow(u, 2));

    auto ua = series_mul(u, S::variable(tab, "alpha"));
    ASSERT_TRUE(ua.homogeneous_degree());
    EXPECT_EQ(*ua.homogeneous_degree(), 0);

    auto v = series_mul(S::variable(tab, "v2", 5), S::variable(tab, "v2", 4));
    EXPECT_EQ(v, S::variable(tab, "v2", 1));

    auto other = make_table({{"u", -16}});
    EXPECT_THROW(series_mul(u, S::variable(other, "u")), Error);
}

TEST(GradedSeries, TruncationBounds)
{
    auto tab = make_table({{"u", -16, BoundKind::max_exponent, 7}});
    using S = GradedSeries<TwoLocal>;
    EXPECT_TRUE(pow(S::variable(tab, "u"), 8).is_zero());
    EXPECT_FALSE(pow(S::variable(tab, "u"), 7).is_zero());
}

TEST(GradedSeries, Substitute)
{
    using S = GradedSeries<Rational>;
    auto tab = t_table(6);
    auto f = S::variable(tab, "t") + S::variable(tab, "t", 2);
    auto st = make_table({{"s", 0}}, 0, {"s"}, 6);
    auto g = substitute(f, st, {{"t", S::variable(st, "s") * Rational(2)}});
    auto want = S::variable(st, "s") * Rational(2) + S::variable(st, "s", 2) * Rational(4);
    EXPECT_EQ(g, want);

    // Rebinding a coefficient variable to a monomial carrying a unit.
    auto cl = make_table({{"v1", -2}, {"v2", -6}});
    auto tgt = make_table({{"alpha", -32}, {"v2", -6, BoundKind::unit_order, 8}}, 48);
    auto img = S::monomial(tgt, ex({1, 3}));
    auto h = substitute(S::variable(cl, "v1"), tgt, {{"v1", img}});
    EXPECT_EQ(h, img); // v2^-5 = v2^3

    EXPECT_THROW(substitute(f, st, {{"t", S::constant(st, 1)}}), Error);
    try {
        substitute(f, st, {{"t", S::constant(st, 1) + S::variable(st, "s")}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::non_nilpotent_substitution);
    }
}

TEST(GradedSeries, ReversionSimple)
{
    using S = GradedSeries<Rational>;
    auto tab = t_table(10);
    EXPECT_EQ(reversion(S::variable(tab, "t"), "t"), S::variable(tab, "t"));
    auto g = reversion(S::variable(tab, "t") + S::variable(tab, "t", 2), "t");
    EXPECT_EQ(g.coefficient(ex({1})), 1);
    EXPECT_EQ(g.coefficient(ex({2})), -1);
    EXPECT_EQ(g.coefficient(ex({3})), 2);
    EXPECT_EQ(g.coefficient(ex({4})), -5);
    auto oracle = from_dense(tab, lagrange_reversion({0, 1, 1}, 10));
    EXPECT_EQ(g, oracle);

    try {
        reversion(S::variable(tab, "t") * Rational(2), "t");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::bad_leading_term);
    }
}

TEST(GradedSeries, ReversionRandomAgainstLagrange)
{
    using S = GradedSeries<Rational>;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> c(-4, 4);
    const int order = 12;
    auto tab = t_table(order);
    for (int trial = 0; trial < 20; ++trial) {
        Dense d(order + 1, Rational(0));
        d[1] = 1;
        for (int i = 2; i <= order; ++i)
            d[i] = Rational(c(rng), c(rng) + 5);
        for (auto& q : d)
            q.canonicalize();
        auto f = from_dense(tab, d);
        auto g = reversion(f, "t");
        EXPECT_EQ(g, from_dense(tab, lagrange_reversion(d, order)));
        auto t = S::variable(tab, "t");
        EXPECT_EQ(substitute(g, tab, {{"t", f}}), t);
        EXPECT_EQ(substitute(f, tab, {{"t", g}}), t);
    }
}

TEST(GradedSeries, MulAssociativeCommutativeRandom)
{
    using S = GradedSeries<TwoLocal>;
    auto tab = make_table({{"x", 1}, {"y", 1}, {"a", 3}}, 0, {"x", "y"}, 8);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> e(0, 4), c(-3, 3);
    auto draw = [&] {
        S s(tab);
        for (int i = 0; i < 6; ++i)
            s.add_term(ex({e(rng), e(rng), e(rng)}), TwoLocal::normalize(c(rng), 2 * e(rng) + 1));
        return s;
    };
    for (int i = 0; i < 100; ++i) {
        auto a = draw(), b = draw(), d = draw();
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a * b) * d, a * (b * d));
        EXPECT_EQ(a * (b + d), a * b + a * d);
    }
}

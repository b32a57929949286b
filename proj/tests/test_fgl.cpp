#include <map>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "realjw/fgl/formal_group.hpp"

using namespace realjw;
using namespace realjw::fgl;
using exactalg::Exponents;

namespace {

// Independent oracle: polynomials in (v1, v2) as maps, series as dense arrays.
using VPoly = std::map<std::pair<int, int>, Rational>;

VPoly vmul(const VPoly& a, const VPoly& b)
{
    VPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b)
            r[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
    std::erase_if(r, [](const auto& kv) { return kv.second == 0; });
    return r;
}

void vadd(VPoly& a, const VPoly& b, const Rational& k = 1)
{
    for (const auto& [e, c] : b)
        a[e] += k * c;
    std::erase_if(a, [](const auto& kv) { return kv.second == 0; });
}

// Araki log: sum_{i<=n} l_i v_{n-i}^(2^i) = 2 l_n with v_0 = 2.
std::vector<VPoly> oracle_log(int N, bool araki)
{
    VPoly one;
    one[{0, 0}] = 1;
    std::vector<VPoly> l{one};
    for (int n = 1; n <= N; ++n) {
        VPoly s;
        for (int i = 0; i < n; ++i) {
            int k = n - i;
            if (k > 2)
                continue;
            VPoly v;
            v[{k == 1 ? 1 << i : 0, k == 2 ? 1 << i : 0}] = 1;
            vadd(s, vmul(l[i], v));
        }
        Rational den = araki ? Rational(2) - Rational(mpz_class(1) << (1 << n)) : Rational(2);
        for (auto& [e, c] : s)
            c /= den;
        l.push_back(s);
    }
    return l;
}

// F(x,y) coefficients [i][j] up to total degree D, via exp solved term by term:
// exp(s) = s - sum_{n>=1} l_n exp(s)^(2^n).
std::vector<std::vector<VPoly>> oracle_fgl(int D, bool araki)
{
    int N = 0;
    while ((1 << (N + 1)) <= D)
        ++N;
    auto l = oracle_log(N, araki);
    using Bi = std::vector<std::vector<VPoly>>;
    auto zero = [&] { return Bi(D + 1, std::vector<VPoly>(D + 1)); };
    auto bmul = [&](const Bi& a, const Bi& b) {
        Bi r = zero();
        for (int i = 0; i <= D; ++i)
            for (int j = 0; i + j <= D; ++j)
                if (!a[i][j].empty())
                    for (int p = 0; i + j + p <= D; ++p)
                        for (int q = 0; i + j + p + q <= D; ++q)
                            if (!b[p][q].empty())
                                vadd(r[i + p][j + q], vmul(a[i][j], b[p][q]));
        return r;
    };
    // s = log x + log y
    Bi s = zero();
    for (int n = 0; n <= N; ++n) {
        vadd(s[1 << n][0], l[n]);
        vadd(s[0][1 << n], l[n]);
    }
    Bi F = s;
    for (int it = 0; it < D; ++it) {
        Bi next = s;
        for (int n = 1; n <= N; ++n) {
            Bi p = F;
            for (int k = 1; k < (1 << n); ++k)
                p = bmul(p, F);
            for (int i = 0; i <= D; ++i)
                for (int j = 0; i + j <= D; ++j)
                    vadd(next[i][j], vmul(l[n], p[i][j]), Rational(-1));
        }
        F = next;
    }
    return F;
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

TEST(BuildLog, Hazewinkel)
{
    auto log = build_log(Convention::hazewinkel, 2);
    auto tab = classical_coeff_table();
    EXPECT_EQ(log.l[0], (GradedSeries<Rational>::constant(tab, 1)));
    EXPECT_EQ(log.l[1].coefficient(ex({1, 0})), Rational(1, 2));
    EXPECT_EQ(log.l[1].size(), 1u);
    EXPECT_EQ(log.l[2].coefficient(ex({0, 1})), Rational(1, 2));
    EXPECT_EQ(log.l[2].coefficient(ex({3, 0})), Rational(1, 4));
    EXPECT_EQ(log.l[2].size(), 2u);
}

TEST(BuildLog, ArakiAndHomogeneity)
{
    auto log = build_log(Convention::araki, 4);
    EXPECT_EQ(log.l[1].coefficient(ex({1, 0})), Rational(-1, 2));
    EXPECT_EQ(log.l[2].coefficient(ex({0, 1})), Rational(-1, 14));
    EXPECT_EQ(log.l[2].coefficient(ex({3, 0})), Rational(1, 28));
    auto orc = oracle_log(4, true);
    for (int n = 0; n <= 4; ++n) {
        ASSERT_TRUE(log.l[n].homogeneous_degree());
        EXPECT_EQ(*log.l[n].homogeneous_degree(), 2 - (2 << n));
        EXPECT_EQ(log.l[n].size(), orc[n].size());
        for (const auto& [e, c] : orc[n])
            EXPECT_EQ(log.l[n].coefficient(ex({e.first, e.second})), c);
    }
    EXPECT_THROW(build_log(Convention::araki, kMaxLogDepth + 1), Error);
    EXPECT_THROW(parse_convention("lazard"), Error);
}

TEST(FglFromLog, MatchesOracle)
{
    for (bool araki : {true, false}) {
        const int D = 10;
        auto F = fgl_from_log(build_log(araki ? Convention::araki : Convention::hazewinkel, 3), D);
        auto orc = oracle_fgl(D, araki);
        std::size_t count = 0;
        for (int i = 0; i <= D; ++i)
            for (int j = 0; i + j <= D; ++j)
                for (const auto& [e, c] : orc[i][j]) {
                    ++count;
                    EXPECT_EQ(F.F.coefficient(ex({i, j, e.first, e.second})).value(), c)
                        << i << ' ' << j << ' ' << e.first << ' ' << e.second;
                }
        EXPECT_EQ(F.F.size(), count);
    }
}

TEST(FglFromLog, XYCoefficient)
{
    auto a = fgl_from_log(build_log(Convention::araki, 3), 8);
    auto h = fgl_from_log(build_log(Convention::hazewinkel, 3), 8);
    // Sign flips with the generator convention.
    EXPECT_EQ(a.F.coefficient(ex({1, 1, 1, 0})), TwoLocal(1));
    EXPECT_EQ(h.F.coefficient(ex({1, 1, 1, 0})), TwoLocal(-1));
}

TEST(FglFromLog, AxiomsAtSmallOrder)
{
    auto F = fgl_from_log(build_log(Convention::araki, 3), 12);
    using S = GradedSeries<TwoLocal>;
    auto tab = classical_table({"x", "y"}, 12);
    auto x = S::variable(tab, "x"), y = S::variable(tab, "y");
    EXPECT_EQ(formal_sum(F, x, S(tab)), x);
    EXPECT_EQ(formal_sum(F, S(tab), y), y);
    EXPECT_EQ(formal_sum(F, y, x), F.F);
    EXPECT_EQ(F.F.coefficient(ex({1, 2, 2, 0})), F.F.coefficient(ex({2, 1, 2, 0})));
    ASSERT_TRUE(F.F.homogeneous_degree());
    EXPECT_EQ(*F.F.homogeneous_degree(), 2);
}

TEST(FglFromLog, InsufficientDepth)
{
    try {
        fgl_from_log(build_log(Convention::araki, 2), 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::insufficient_log_depth);
    }
    EXPECT_NO_THROW(fgl_from_log(build_log(Convention::araki, 2), 7));
}

TEST(TwoSeries, LeadingTermsAndMod2)
{
    auto F = fgl_from_log(build_log(Convention::araki, 4), 16);
    auto two = two_series(F);
    EXPECT_EQ(two.series.coefficient(ex({1, 0, 0})), TwoLocal(2));
    // Lowest term with an odd coefficient is v1 t^2.
    std::optional<Exponents> low;
    for (const auto& [e, c] : two.series.terms())
        if (c.parity() == 1 && (!low || e[0] < (*low)[0]))
            low = e;
    ASSERT_TRUE(low);
    EXPECT_EQ(*low, ex({2, 1, 0}));
    auto viaLog = two_series_from_log(build_log(Convention::araki, 4), 16);
    EXPECT_EQ(viaLog.series, two.series);
}

TEST(TwoSeries, ArakiIdentityAndHazewinkelDifference)
{
    const int D = 16;
    auto A = fgl_from_log(build_log(Convention::araki, 4), D);
    EXPECT_EQ(two_series(A).series, araki_two_series_rhs(A));

    auto H = fgl_from_log(build_log(Convention::hazewinkel, 4), D);
    auto d = first_difference(two_series(H).series, araki_two_series_rhs(H));
    ASSERT_TRUE(d);
    EXPECT_EQ(*d, ex({2, 1, 0})); // first disagreement at v1 t^2
}

TEST(Rescale, RescaledFormAndCommutation)
{
    const int D = 16;
    auto A = fgl_from_log(build_log(Convention::araki, 4), D);
    auto R = rescale_to_er2(A, -1);
    EXPECT_EQ(R.coordinates, Coordinates::rescaled);
    auto tr = two_series(R, "u");
    EXPECT_EQ(tr.series, araki_two_series_rhs(R, "u"));
    EXPECT_EQ(rescale_to_er2(two_series(A), -1, "u").series, tr.series);

    // u1 u2 coefficient is alpha, and F is homogeneous of degree -16 mod 48.
    EXPECT_EQ(R.F.coefficient(ex({1, 1, 1})), TwoLocal(1));
    ASSERT_TRUE(R.F.homogeneous_degree());
    EXPECT_EQ(*R.F.homogeneous_degree(), 32);

    using S = GradedSeries<TwoLocal>;
    auto tab = R.F.table();
    EXPECT_EQ(formal_sum(R, S::variable(tab, "u1"), S(tab)), S::variable(tab, "u1"));
}

TEST(Rescale, AlphaCapIsAQuotient)
{
    const int D = 16;
    auto A = fgl_from_log(build_log(Convention::araki, 4), D);
    auto full = rescale_to_er2(A, -1);
    auto capped = rescale_to_er2(A, 4);
    std::size_t kept = 0;
    for (const auto& [e, c] : full.F.terms())
        if (e[2] <= 4) {
            ++kept;
            EXPECT_EQ(capped.F.coefficient(e), c);
        }
    EXPECT_EQ(capped.F.size(), kept);
}

TEST(Csv, Export)
{
    auto F = fgl_from_log(build_log(Convention::araki, 2), 3);
    std::ostringstream os;
    write_coefficients_csv(F.F, os);
    auto s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "x,y,v1,v2,numerator,denominator");
    EXPECT_NE(s.find("1,1,1,0,1,1\n"), std::string::npos);
}

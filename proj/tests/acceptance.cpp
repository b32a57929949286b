// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "realjw/bss/report.hpp"
#include "realjw/er2/module.hpp"
#include "realjw/fgl/formal_group.hpp"
#include "realjw/obstruct/pipeline.hpp"
#include "realjw/projring/ring.hpp"

using namespace realjw;
using exactalg::GradedSeries;
using exactalg::TwoLocal;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& what, double limit_s, const std::function<Outcome()>& body)
{
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && s >= limit_s) {
        o.ok = false;
        o.detail += " (over " + std::to_string(limit_s) + " s)";
    }
    if (!o.ok)
        ++failures;
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " [" << o.detail << "; "
              << std::to_string(s).substr(0, 5) << " s]" << std::endl;
}

const fgl::FormalGroupLaw& araki24()
{
    static const auto F = fgl::fgl_from_log(fgl::build_log(fgl::Convention::araki, 4), 24);
    return F;
}

GradedSeries<TwoLocal> random_element(const projring::RingPresentation& ring, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-6, 6), den(0, 3), al(0, 4), nt(1, 3);
    std::uniform_int_distribution<int> u1(0, ring.u1_bound()), u2(0, ring.u2_bound()), v(0, 7);
    const int odd[] = {1, 3, 5, 7};
    GradedSeries<TwoLocal> s(ring.table());
    for (int i = 0, n = nt(rng); i < n; ++i) {
        projring::Key k{v(rng), al(rng), u1(rng), ring.product() ? u2(rng) : 0};
        if (k.level() == 0)
            k.u1 = 1;
        s.add_term(ring.exponents_of(k), TwoLocal::normalize(num(rng), odd[den(rng)]));
    }
    return s;
}

std::string labels(const std::vector<bss::Label>& v)
{
    std::string s;
    for (const auto& l : v)
        s += (s.empty() ? "" : ",") + to_string(l);
    return "{" + s + "}";
}

} // namespace

int main()
{
    criterion(1, "Araki [2](t) = 2t +F v1 t^2 +F v2 t^4 at D = 24", 10, [] {
        const auto& F = araki24();
        auto lhs = fgl::two_series(F).series;
        auto rhs = fgl::araki_two_series_rhs(F);
        return Outcome{lhs == rhs, std::to_string(lhs.size()) + " coefficients compared"};
    });

    criterion(2, "rescaled [2](u) = 2u +F alpha u^2 +F u^4, 2-integral", 5, [] {
        auto R = fgl::rescale_to_er2(araki24(), -1);
        auto lhs = fgl::two_series(R, "u").series;
        bool eq = lhs == fgl::araki_two_series_rhs(R, "u");
        bool integral = true;
        for (const auto* s : {&R.F, &lhs})
            for (const auto& [e, c] : s->terms())
                if (mpz_even_p(c.denominator().get_mpz_t()))
                    integral = false;
        return Outcome{eq && integral, std::string(eq ? "equal" : "differs") + ", " +
                                           (integral ? "all denominators odd" : "even denominator")};
    });

    criterion(3, "unit, symmetry, associativity at D = 20", 30, [] {
        using S = GradedSeries<TwoLocal>;
        auto F = fgl::fgl_from_log(fgl::build_log(fgl::Convention::araki, 4), 20);
        auto tab = fgl::classical_table({"x", "y", "z"}, 20);
        auto x = S::variable(tab, "x"), y = S::variable(tab, "y"), z = S::variable(tab, "z");
        bool unit = fgl::formal_sum(F, x, S(tab)) == x && fgl::formal_sum(F, S(tab), y) == y;
        bool sym = fgl::formal_sum(F, x, y) == fgl::formal_sum(F, y, x);
        bool assoc = fgl::formal_sum(F, fgl::formal_sum(F, x, y), z) == fgl::formal_sum(F, x, fgl::formal_sum(F, y, z));
        return Outcome{unit && sym && assoc, std::string("unit ") + (unit ? "ok" : "no") + ", symmetry " +
                                                 (sym ? "ok" : "no") + ", associativity " + (assoc ? "ok" : "no")};
    });

    criterion(4, "point: E2 = F2[alpha]{1,v2^2,v2^4,v2^6}, E4 = {1,v2^4}, E8 = 0", 0, [] {
        auto p = bss::run_spectral_sequence(bss::BssSpace::point());
        std::set<bss::Label> e2;
        for (int v = 0; v < 8; v += 2)
            for (int k = 0; k <= 12; ++k)
                e2.insert(bss::even(v, k, 0));
        bool ok = p[1].report_basis() == e2 && p[3].report_basis() == std::set<bss::Label>{bss::even(0, 0, 0), bss::even(4, 0, 0)} &&
                  p[7].report_basis().empty();
        int diffs = 0;
        for (const auto& d : bss::verify_all(p))
            diffs += !d.empty();
        return Outcome{ok && diffs == 0, std::to_string(diffs) + " page mismatches"};
    });

    criterion(5, "RP^infty pages and x^1, x^3, x^7 torsion", 0, [] {
        auto p = bss::run_spectral_sequence(bss::BssSpace::rp_infty());
        int diffs = 0;
        for (const auto& d : bss::verify_all(p))
            diffs += !d.empty();
        auto t = bss::extract_torsion(p);
        int tors = 0;
        for (const auto& ft : p.front().ctx->fixtures.torsion)
            tors += t.order(ft.r) != ft.generators;
        for (int r : {2, 4, 5, 6})
            tors += !t.order(r).empty();
        return Outcome{diffs == 0 && tors == 0,
                       std::to_string(diffs) + " page mismatches, " + std::to_string(tors) + " torsion mismatches"};
    });

    criterion(6, "RP^{16K+9}, K = 0, 1: only v2^{2,6} alpha^3 i differ; unique d7 repair", 0, [] {
        const std::vector<bss::Label> extra{bss::odd_i(2, 3), bss::odd_i(6, 3)};
        std::string detail;
        bool ok = true;
        for (int K : {0, 1}) {
            auto e = bss::erratum_report(bss::BssSpace::rp_odd(K));
            for (const auto& d : e.page_diffs)
                ok = ok && d.only_table.empty() && d.only_computed == extra;
            ok = ok && !e.page_diffs.empty() && e.e8_survivors == extra && e.repair_unique() && e.forced &&
                 e.forced->source == bss::odd_i(6, 3) && e.forced->target == bss::odd_i(2, 3) &&
                 bss::differential_degree(7) == 24 && e.repaired_e8_zero && e.degree_violations.empty();
            detail += "K=" + std::to_string(K) + ": E8 survivors " + labels(e.e8_survivors) + ", " +
                      std::to_string(e.repairs.size()) + " repair(s)" +
                      (e.forced ? ", d7(" + to_string(e.forced->source) + ") = " + to_string(e.forced->target) : "") +
                      "; ";
        }
        return Outcome{ok, detail + "shift 17*7+1 = 24 mod 48"};
    });

    criterion(7, "every differential shifts degree by 17r+1 mod 48", 0, [] {
        std::size_t bad = 0, spaces = 0;
        for (auto s : {bss::BssSpace::point(), bss::BssSpace::rp_infty(), bss::BssSpace::rp_odd(0), bss::BssSpace::rp_odd(1)})
            for (auto mode : {bss::D7Mode::tabulated, bss::D7Mode::repaired}) {
                auto p = bss::run_spectral_sequence(s, {}, mode);
                bad += bss::check_degree_law(p).size() + bss::check_fixture_degree_law(*p.front().ctx).size();
                ++spaces;
            }
        return Outcome{bad == 0, std::to_string(bad) + " violations over " + std::to_string(spaces) + " runs"};
    });

    criterion(8, "normal-form confluence and idempotence, 1000 elements per ring", 0, [] {
        using namespace projring;
        auto log = fgl::build_log(fgl::Convention::araki, 4);
        auto two = fgl::rescale_to_er2(fgl::two_series_from_log(log, 24), 16, "u");
        auto F4 = fgl::rescale_to_er2(fgl::fgl_from_log(log, 4), 16);
        Caps c;
        c.u = 24;
        std::vector<RingPresentation> rings{make_ring(SpaceSpec::rp_even(7), two, c),
                                            make_ring(SpaceSpec::rp_infty(), two, c),
                                            make_ring(SpaceSpec::product_even_odd(7, 2), two, c, F4)};
        std::mt19937_64 rng(4711);
        std::string detail;
        bool ok = true;
        for (const auto& ring : rings) {
            int agree = 0;
            for (int i = 0; i < 1000; ++i) {
                auto e = random_element(ring, rng);
                auto a = normal_form(e, ring, Strategy::degree_ordered);
                auto b = normal_form(e, ring, Strategy::leftmost_innermost);
                agree += a == b && normal_form(to_series(a, ring), ring) == a;
            }
            ok = ok && agree == 1000;
            detail += ring.space().str() + " " + std::to_string(agree) + "/1000; ";
        }
        std::mt19937_64 rng2(99);
        int er2_agree = 0;
        for (int i = 0; i < 1000; ++i) {
            er2::RawWord r;
            r.x = static_cast<int>(rng2() % 8);
            r.w = static_cast<int>(rng2() % 4);
            r.alpha = static_cast<int>(rng2() % 4);
            for (int s = 1; s < 4; ++s)
                r.s[s] = static_cast<int>(rng2() % 3);
            er2::WordSum sum{{TwoLocal(static_cast<long>(rng2() % 9) - 4), r}};
            er2_agree += er2::er2_normalize(sum) == er2::er2_normalize_random(sum, rng2);
        }
        ok = ok && er2_agree == 1000;
        return Outcome{ok, detail + "ER(2) words " + std::to_string(er2_agree) + "/1000"};
    });

    criterion(9, "m = 6: RP^14 does not immerse in R^21, stable survivors", 60, [] {
        auto p = obstruct::derive_parameters(6);
        auto c = obstruct::choose_L(p.n, p.k, obstruct::Caps{});
        auto r = obstruct::evaluate_obstruction(p, c, obstruct::Caps{});
        std::string surv;
        for (const auto& k : r.survivors)
            surv += obstruct::key_string(k) + " ";
        bool ok = c.L == 6 && c.K == 2 && c.N == 25 && !r.survivors.empty() && r.stable &&
                  r.verdict == obstruct::Verdict::nonzero && r.statement() == "RP^{14} does not immerse in R^{21}" &&
                  check_gates(p).residue_class == "(6,2)";
        return Outcome{ok, "L=6 K=2 N=25, survivors " + surv + "over " + std::to_string(r.runs.size()) + " runs"};
    });

    criterion(10, "m = 4086: RP^{2^13-2} in R^{2^14-59}, gate (6,2), CapExceeded", 0, [] {
        auto p = obstruct::derive_parameters(4086);
        auto g = obstruct::check_gates(p);
        bool dims = p.source_dim() == (1 << 13) - 2 && p.target_dim() == (1 << 14) - 59;
        std::string msg;
        bool capped = false;
        try {
            obstruct::choose_L(p.n, p.k, obstruct::Caps{});
        } catch (const Error& e) {
            capped = e.code() == ErrorCode::cap_exceeded;
            msg = e.what();
        }
        return Outcome{dims && g.pass() && g.residue_class == "(6,2)" && capped,
                       "n=" + std::to_string(p.n) + " k=" + std::to_string(p.k) + "; " + msg};
    });

    criterion(11, "K = 0 basis counts equal x-torsion counts; u^{8K+8} = 0, u^{8K+6} = x^2 z_{16K-14}", 0, [] {
        auto pages = bss::run_spectral_sequence(bss::BssSpace::rp_odd(0), {}, bss::D7Mode::repaired);
        auto t = bss::extract_torsion(pages);
        int mismatched = 0, total = 0;
        for (int d = 0; d < 48; ++d) {
            int a = er2::count_basis(0, d, 12);
            mismatched += a != er2::torsion_count(t, d, 12);
            total += a;
        }
        auto eight = er2::module_reduce({8, 0, false, 0, false}, 0);
        auto six = er2::module_reduce({6, 0, false, 0, false}, 0);
        bool rel = eight.is_zero() && six.basis.empty() && six.z == std::set<er2::ZTerm>{{2, -14, 0, false}};
        return Outcome{mismatched == 0 && total > 0 && rel,
                       std::to_string(total) + " basis elements, " + std::to_string(mismatched) +
                           " degree mismatches; u^8 -> " + eight.str() + ", u^6 -> " + six.str()};
    });

    std::cout << (failures ? "FAILED " + std::to_string(failures) + " criteria" : "all criteria passed") << std::endl;
    return failures ? 1 : 0;
}

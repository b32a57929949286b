#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "realjw/bss/report.hpp"
#include "realjw/er2/module.hpp"
#include "realjw/fgl/formal_group.hpp"
#include "realjw/obstruct/pipeline.hpp"

using namespace realjw;

namespace {

// exit codes: 0 ran, 1 error, 2 gate refusal, 3 beyond caps
constexpr int kRefused = 2;
constexpr int kBeyondCaps = 3;

void write_out(const std::string& body, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << body) || !f.flush())
        throw Error(ErrorCode::io_failure, "cannot write " + path);
}

struct CheckArgs {
    long long m = 0, n = 0, k = 0;
    int L = 0;
    int alpha_cap = 0;
    std::string format = "text", out;
};

int run_check(const CheckArgs& a)
{
    auto caps = obstruct::caps_from_env();
    if (a.alpha_cap > 0)
        caps.alpha = a.alpha_cap;
    auto p = a.m > 0 ? obstruct::derive_parameters(a.m) : obstruct::parameters_from_nk(a.n, a.k);
    auto g = obstruct::check_gates(p);
    if (!g.pass()) {
        std::cerr << "refused: k = " << g.k_mod8 << " mod 8 (need 2), n = " << g.n_mod8
                  << " mod 8 (need 0 or 7)\n";
        return kRefused;
    }
    obstruct::LChoice c;
    if (a.L > 0) {
        if (!obstruct::l_admissible(p.n, p.k, a.L)) {
            std::cerr << "refused: L = " << a.L << " does not give 2^L - 2k - 3 = 16K + 9 with n <= 8M < 8M+8 < 8K+5\n";
            return kRefused;
        }
        c = obstruct::l_choice(p.n, p.k, a.L);
    } else {
        c = obstruct::choose_L(p.n, p.k, caps);
    }
    write_out(obstruct::render(obstruct::evaluate_obstruction(p, c, caps), a.format), a.out);
    return 0;
}

struct BssArgs {
    std::string space = "point";
    int K = 0;
    int page = 0;
    int alpha_cap = 0;
    bool erratum = false;
    bool repaired = false;
    std::string format = "json", out;
};

int run_bss(const BssArgs& a)
{
    auto space = bss::parse_space(a.space, a.K);
    bss::BssCaps caps;
    if (const char* v = std::getenv("ER2_ALPHA_CAP"); v && *v)
        caps.alpha = std::stoi(v);
    if (a.alpha_cap > 0)
        caps.alpha = a.alpha_cap;
    if (a.erratum) {
        write_out(to_json(bss::erratum_report(space, caps)).dump(2) + "\n", a.out);
        return 0;
    }
    auto pages = bss::run_spectral_sequence(space, caps, a.repaired ? bss::D7Mode::repaired : bss::D7Mode::tabulated);
    std::ostringstream os;
    if (a.page > 0) {
        if (a.page > 8)
            throw Error(ErrorCode::invalid_argument, "pages run from E1 to E8");
        const auto& p = pages[static_cast<std::size_t>(a.page - 1)];
        if (a.format == "csv")
            bss::write_page_csv(os, p);
        else
            os << to_json(p).dump(2) << '\n';
    } else {
        if (a.format == "csv") {
            for (const auto& p : pages)
                bss::write_page_csv(os, p);
        } else {
            auto j = nlohmann::json::array();
            for (const auto& p : pages)
                j.push_back(to_json(p));
            os << j.dump(2) << '\n';
        }
    }
    write_out(os.str(), a.out);
    return 0;
}

struct FglArgs {
    std::string convention = "araki";
    int depth = 8;
    bool rescaled = false;
    bool two = false;
    std::string out;
};

int run_fgl(const FglArgs& a)
{
    auto conv = fgl::parse_convention(a.convention);
    int N = 1;
    while ((1 << (N + 1)) <= a.depth)
        ++N;
    auto log = fgl::build_log(conv, N);
    std::ostringstream os;
    if (a.two) {
        auto s = fgl::two_series_from_log(log, a.depth);
        if (a.rescaled)
            s = fgl::rescale_to_er2(s, fgl::kDefaultAlphaCap, "u");
        fgl::write_coefficients_csv(s.series, os);
    } else {
        auto F = fgl::fgl_from_log(log, a.depth);
        if (a.rescaled)
            F = fgl::rescale_to_er2(F);
        fgl::write_coefficients_csv(F.F, os);
    }
    write_out(os.str(), a.out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Real Johnson-Wilson computations for projective spaces"};
    app.require_subcommand(1);

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "non-immersion obstruction for RP^{2n} in R^{2k+1}");
    auto* om = check->add_option("--m", ca.m, "n = m + alpha(m) - 1, k = 2m - alpha(m)");
    auto* on = check->add_option("--n", ca.n);
    auto* ok = check->add_option("--k", ca.k);
    om->excludes(on)->excludes(ok);
    on->needs(ok);
    ok->needs(on);
    check->add_option("--L", ca.L, "use this L instead of the smallest admissible one");
    check->add_option("--format", ca.format)->check(CLI::IsMember({"json", "csv", "text"}));
    check->add_option("--alpha-cap", ca.alpha_cap, "alpha cap A (also ER2_ALPHA_CAP)");
    check->add_option("--out", ca.out);

    BssArgs ba;
    auto* bs = app.add_subcommand("bss", "Bockstein spectral sequence pages");
    bs->add_option("--space", ba.space)->check(CLI::IsMember({"point", "rp-infty", "rp-odd"}));
    bs->add_option("--K", ba.K, "RP^{16K+9}");
    bs->add_option("--page", ba.page, "single page r (default: all)");
    bs->add_option("--alpha-cap", ba.alpha_cap);
    bs->add_flag("--erratum", ba.erratum, "compare with the tables and report the repair");
    bs->add_flag("--repaired", ba.repaired, "include d7 on v2^{4,6} i");
    bs->add_option("--format", ba.format)->check(CLI::IsMember({"json", "csv"}));
    bs->add_option("--out", ba.out);

    FglArgs fa;
    auto* fg = app.add_subcommand("fgl", "formal group law coefficients as CSV");
    fg->add_option("--convention", fa.convention)->check(CLI::IsMember({"araki", "hazewinkel"}));
    fg->add_option("--depth", fa.depth, "truncation degree")->check(CLI::Range(1, 127));
    fg->add_flag("--rescaled", fa.rescaled, "u, alpha coordinates");
    fg->add_flag("--two-series", fa.two, "[2](t) instead of F(x, y)");
    fg->add_option("--out", fa.out);

    int kcap = 12, basisK = 0;
    std::string basis_out;
    auto* eb = app.add_subcommand("er2-basis", "2-adic basis of ER(2)^{8*}(RP^{16K+9}) as CSV");
    eb->add_option("--K", basisK);
    eb->add_option("--k-cap", kcap);
    eb->add_option("--out", basis_out);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*check) {
            if (ca.m <= 0 && ca.n <= 0) {
                std::cerr << "check needs --m or --n/--k\n";
                return 1;
            }
            return run_check(ca);
        }
        if (*bs)
            return run_bss(ba);
        if (*fg)
            return run_fgl(fa);
        if (*eb) {
            std::ostringstream os;
            er2::write_basis_csv(os, basisK, kcap);
            write_out(os.str(), basis_out);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        if (e.code() == ErrorCode::cap_exceeded) {
            std::cerr << "this case is beyond desk scale; only the parameter and gate arithmetic is checked\n";
            return kBeyondCaps;
        }
        if (e.code() == ErrorCode::side_condition_failed)
            return kRefused;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

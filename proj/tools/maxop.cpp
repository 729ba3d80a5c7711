#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maxop/corpus.hpp"
#include "maxop/oracle.hpp"
#include "maxop/report_io.hpp"
#include "maxop/scalespace.hpp"
#include "maxop/suite.hpp"
#include "maxop/verify.hpp"

namespace {

using namespace maxop;

KernelFamily parse_family(const std::string& s) {
    if (s == "poisson") return KernelFamily::poisson;
    if (s == "heat") return KernelFamily::heat;
    if (s == "fracpoisson") return KernelFamily::fractional_poisson;
    throw CLI::ValidationError("--kernel", "must be poisson|heat|fracpoisson");
}

struct KernelFlags {
    std::string name = "poisson";
    double alpha = 0.5;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kernel", name, "Kernel family: poisson|heat|fracpoisson")
            ->default_val("poisson");
        cmd->add_option("--alpha", alpha, "Fractional exponent in [0.01, 0.99]")
            ->default_val(0.5)
            ->check(CLI::Range(0.01, 0.99));
    }
    KernelSpec make() const { return make_kernel(parse_family(name), alpha); }
};

PiecewiseLinearFn load_function(const std::string& inline_json, const std::string& file,
                                const std::string& gen, unsigned long long seed) {
    if (!inline_json.empty()) return function_from_json(nlohmann::json::parse(inline_json));
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw CLI::ValidationError("--function-file", "cannot open " + file);
        nlohmann::json j;
        in >> j;
        return function_from_json(j);
    }
    if (!gen.empty()) {
        nlohmann::json j{{"type", gen}, {"seed", seed}};
        return function_from_json(j);
    }
    return make_tent(0.0, 1.0, 1.0);
}

// A JSON config given with --config overrides the command-line flags.
void apply_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("kernel")) cfg.kernel = parse_family(j["kernel"].get<std::string>());
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("suite")) cfg.suite = j["suite"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned long long>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("grid_n")) cfg.grid_n = j["grid_n"].get<int>();
    if (j.contains("grid_span")) cfg.grid_span = j["grid_span"].get<double>();
    if (j.contains("corpus_n")) cfg.corpus_n = j["corpus_n"].get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("function")) cfg.function_json = j["function"].dump();
}

int cmd_kernel_tabulate(const KernelFlags& kf, double xmin, double xmax, int n,
                        const std::string& out, const std::string& svg) {
    KernelSpec k = kf.make();
    CsvWriter csv(out);
    csv.row({"x", "phi"});
    SvgSeries series;
    series.label = family_name(k.family());
    for (int i = 0; i < n; ++i) {
        double x = xmin + (xmax - xmin) * i / (n - 1);
        double v = k(x);
        csv.row({format_sig17(x), format_sig17(v)});
        series.x.push_back(x);
        series.y.push_back(v);
    }
    if (!svg.empty()) write_svg_plot(svg, {series}, "kernel " + series.label, "x", "phi(x)");
    return 0;
}

int cmd_maximal(const KernelFlags& kf, const PiecewiseLinearFn& u, int grid_n, double span,
                double tol, const std::string& out, const std::string& svg) {
    KernelSpec k = kf.make();
    if (span <= 0.0) {
        MaximalEvalFn ev = [&](const PiecewiseLinearFn& w, double x) {
            return maximal_at(w, k, x, tol).value;
        };
        span = 1.3 * pick_tail_radius(abs_part(u), nullptr, ev, 0.1);
    }
    std::vector<double> grid = uniform_grid(-span, span, grid_n);
    MaximalProfile prof = maximal_profile(u, k, grid, tol);
    CsvWriter csv(out);
    csv.row({"x", "u", "ustar", "tstar"});
    SvgSeries su, sstar;
    su.label = "u";
    su.color = "#888888";
    sstar.label = "u*";
    sstar.color = "#d62728";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.row({format_sig17(grid[i]), format_sig17(u(grid[i])), format_sig17(prof.ustar[i]),
                 format_sig17(prof.tstar[i])});
        su.x.push_back(grid[i]);
        su.y.push_back(u(grid[i]));
        sstar.x.push_back(grid[i]);
        sstar.y.push_back(prof.ustar[i]);
    }
    if (!svg.empty())
        write_svg_plot(svg, {su, sstar}, "maximal function (" + family_name(k.family()) + ")", "x",
                       "value");
    return 0;
}

int cmd_bruteforce(const KernelFlags& kf, unsigned long long seed, int corpus_n, int points,
                   double tol, const std::string& out) {
    KernelSpec k = kf.make();
    auto corpus = generate_corpus(seed, corpus_n);
    CsvWriter csv(out);
    csv.row({"function", "x", "maximal", "bruteforce", "gap"});
    double max_gap = 0.0;
    oracle::Options opts;
    opts.ladder = 4096;
    opts.subintervals = 24;
    for (int fi = 0; fi < corpus_n; ++fi) {
        PiecewiseLinearFn ua = abs_part(corpus[fi]);
        MaximalEvalFn ev = [&](const PiecewiseLinearFn& w, double x) {
            return maximal_at(w, k, x, tol).value;
        };
        double R = pick_tail_radius(ua, nullptr, ev, 0.1);
        double t_min = ua.min_gap() / 10.0;
        ScaleSearchOptions sopts;
        sopts.tol = tol;
        sopts.t_min = t_min;
        opts.t_lo = t_min;
        ExtensionEvaluator evx(ua, k);
        for (int p = 0; p < points; ++p) {
            double x = -R + 2.0 * R * p / (points - 1);
            double a = maximal_at(evx, x, sopts).value;
            double b = oracle::dense_maximal(ua, k, x, opts).value;
            double gap = std::abs(a - b);
            max_gap = std::max(max_gap, gap);
            csv.row({std::to_string(fi), format_sig17(x), format_sig17(a), format_sig17(b),
                     format_sig17(gap)});
        }
    }
    std::printf("bruteforce cross-check: max |maximal - oracle| = %.3g over %d functions x %d points\n",
                max_gap, corpus_n, points);
    double bound = std::max(tol, 1e-5);
    if (max_gap > bound) {
        std::printf("FAIL: gap exceeds %.1g (report: %s)\n", bound, out.c_str());
        return 2;
    }
    return 0;
}

int cmd_continuity(const KernelFlags& kf, const std::string& mode_name_arg, int grid_n, double tol,
                   const std::string& out_dir) {
    KernelSpec k = kf.make();
    PerturbationMode mode = PerturbationMode::additive;
    if (mode_name_arg == "translate") mode = PerturbationMode::translate;
    else if (mode_name_arg == "mollify") mode = PerturbationMode::mollify;
    else if (mode_name_arg != "additive")
        throw CLI::ValidationError("--mode", "must be additive|translate|mollify");

    PiecewiseLinearFn base = make_tent(0.0, 1.0, 1.0);
    PiecewiseLinearFn g = make_tent(0.4, 0.7, 0.5);
    ContinuitySequence seq =
        ContinuitySequence::make(base, g, {1, 2, 4, 8, 16, 32, 64}, mode, 11);
    MaximalEvalFn ev = [&](const PiecewiseLinearFn& w, double x) {
        return maximal_at(w, k, x, tol).value;
    };
    double du = norm_l1(derivative(base));
    double R = pick_tail_radius(base, nullptr, ev, 0.01 * du);
    std::vector<double> grid = uniform_grid(-R - 1.0, R + 1.0, grid_n);

    ContinuityTable table = continuity_experiment(seq, k, grid, tol);
    std::filesystem::create_directories(out_dir);
    CsvWriter csv(out_dir + "/continuity.csv");
    csv.row({"j", "w11_diff", "sup_diff", "e_total", "e_contact", "e_detach"});
    std::printf("%6s %14s %14s %14s %14s %14s\n", "j", "||u_j-u||_1,1", "sup|uj*-u*|", "E_j",
                "E_contact", "E_detach");
    SvgSeries ej;
    ej.label = "E_j";
    for (const auto& row : table.rows) {
        csv.row({std::to_string(row.j), format_sig17(row.w11_diff), format_sig17(row.sup_diff),
                 format_sig17(row.e_total), format_sig17(row.e_contact),
                 format_sig17(row.e_detach)});
        std::printf("%6d %14.6g %14.6g %14.6g %14.6g %14.6g\n", row.j, row.w11_diff, row.sup_diff,
                    row.e_total, row.e_contact, row.e_detach);
        ej.x.push_back(row.j);
        ej.y.push_back(row.e_total);
    }
    write_svg_plot(out_dir + "/continuity_convergence.svg", {ej}, "derivative L1 error vs j", "j",
                   "E_j", true);
    write_report_json(out_dir + "/report_continuity.json", table.verdict);
    std::printf("verdict: %s (E_final=%.6g, threshold=%.6g)\n",
                table.verdict.passed ? "PASS" : "FAIL", table.verdict.lhs, table.verdict.rhs);
    if (!table.verdict.passed) {
        std::printf("report: %s/report_continuity.json\n", out_dir.c_str());
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maxop: numerical laboratory for convolution-type maximal operators"};
    app.require_subcommand(1);

    // kernel tabulate
    auto* kernel_cmd = app.add_subcommand("kernel", "Kernel utilities");
    auto* tab = kernel_cmd->add_subcommand("tabulate", "Emit CSV (x, phi(x)) and optional SVG");
    KernelFlags kf_tab;
    kf_tab.attach(tab);
    double xmin = -5.0, xmax = 5.0;
    int tab_n = 201;
    std::string tab_out = "kernel.csv", tab_svg;
    tab->add_option("--xmin", xmin);
    tab->add_option("--xmax", xmax);
    tab->add_option("--n", tab_n)->check(CLI::PositiveNumber);
    tab->add_option("--out", tab_out);
    tab->add_option("--svg", tab_svg);

    // maximal
    auto* maxc = app.add_subcommand("maximal", "Sample u and u* on a grid");
    KernelFlags kf_max;
    kf_max.attach(maxc);
    std::string fn_json, fn_file, fn_gen;
    unsigned long long fn_seed = 7;
    int grid_n = 512;
    double grid_span = 0.0, tol = 1e-5;
    std::string max_out = "maximal.csv", max_svg;
    maxc->add_option("--function", fn_json, "Inline function JSON");
    maxc->add_option("--function-file", fn_file, "Path to function JSON");
    maxc->add_option("--gen", fn_gen, "Generator: tent|steps|sawtooth|random_pl");
    maxc->add_option("--gen-seed", fn_seed);
    maxc->add_option("--grid-n", grid_n)->check(CLI::Range(16, 1 << 22));
    maxc->add_option("--grid-span", grid_span);
    maxc->add_option("--tol", tol)->check(CLI::PositiveNumber);
    maxc->add_option("--out", max_out);
    maxc->add_option("--svg", max_svg);

    // verify
    auto* ver = app.add_subcommand("verify", "Run lemma verification suites");
    RunConfig cfg;
    std::string ver_kernel = "poisson", config_path;
    ver->add_option("--kernel", ver_kernel, "poisson|heat|fracpoisson");
    ver->add_option("--alpha", cfg.alpha)->check(CLI::Range(0.01, 0.99));
    ver->add_option("--suite", cfg.suite,
                    "all|subharmonicity|uniform|tail|lemma6|prop5|continuity");
    ver->add_option("--seed", cfg.seed);
    ver->add_option("--tol", cfg.tol)->check(CLI::PositiveNumber);
    ver->add_option("--delta", cfg.delta);
    ver->add_option("--grid-n", cfg.grid_n);
    ver->add_option("--grid-span", cfg.grid_span);
    ver->add_option("--corpus-n", cfg.corpus_n)->check(CLI::PositiveNumber);
    ver->add_option("--out-dir", cfg.out_dir);
    ver->add_option("--function", cfg.function_json, "Inline function JSON");
    ver->add_option("--config", config_path, "JSON config overriding flags");

    // continuity
    auto* cont = app.add_subcommand("continuity", "Desk-scale continuity theorem experiment");
    KernelFlags kf_cont;
    kf_cont.attach(cont);
    std::string cont_mode = "additive", cont_out = "maxop-out";
    int cont_grid_n = 1024;
    double cont_tol = 1e-5;
    cont->add_option("--mode", cont_mode, "additive|translate|mollify");
    cont->add_option("--grid-n", cont_grid_n)->check(CLI::Range(16, 1 << 22));
    cont->add_option("--tol", cont_tol)->check(CLI::PositiveNumber);
    cont->add_option("--out-dir", cont_out);

    // bruteforce
    auto* bf = app.add_subcommand("bruteforce", "Dense-ladder oracle cross-check");
    KernelFlags kf_bf;
    kf_bf.attach(bf);
    unsigned long long bf_seed = 7;
    int bf_corpus = 4, bf_points = 9;
    double bf_tol = 1e-7;
    std::string bf_out = "bruteforce.csv";
    bf->add_option("--seed", bf_seed);
    bf->add_option("--corpus-n", bf_corpus)->check(CLI::PositiveNumber);
    bf->add_option("--points", bf_points)->check(CLI::Range(2, 1 << 20));
    bf->add_option("--tol", bf_tol)->check(CLI::PositiveNumber);
    bf->add_option("--out", bf_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (tab->parsed()) return cmd_kernel_tabulate(kf_tab, xmin, xmax, tab_n, tab_out, tab_svg);
        if (maxc->parsed()) {
            PiecewiseLinearFn u = load_function(fn_json, fn_file, fn_gen, fn_seed);
            return cmd_maximal(kf_max, u, grid_n, grid_span, tol, max_out, max_svg);
        }
        if (ver->parsed()) {
            cfg.kernel = parse_family(ver_kernel);
            if (!config_path.empty()) apply_config(config_path, cfg);
            int rc = run_verify_suite(cfg);
            if (rc != 0)
                std::printf("verification failures; reports in %s\n", cfg.out_dir.c_str());
            return rc;
        }
        if (cont->parsed())
            return cmd_continuity(kf_cont, cont_mode, cont_grid_n, cont_tol, cont_out);
        if (bf->parsed())
            return cmd_bruteforce(kf_bf, bf_seed, bf_corpus, bf_points, bf_tol, bf_out);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

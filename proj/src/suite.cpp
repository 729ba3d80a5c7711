#include "maxop/suite.hpp"

#include <cmath>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "maxop/corpus.hpp"
#include "maxop/report_io.hpp"
#include "maxop/scalespace.hpp"
#include "maxop/verify.hpp"

namespace maxop {

namespace {

void validate(const RunConfig& cfg) {
    if (cfg.grid_n < 16) throw std::invalid_argument("config: grid-n must be >= 16");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
    double delta = cfg.delta > 0.0 ? cfg.delta : 10.0 * cfg.tol;
    if (!(delta > cfg.tol)) throw std::invalid_argument("config: delta must exceed tol");
    static const char* suites[] = {"all",    "subharmonicity", "uniform", "tail",
                                   "lemma6", "prop5",          "continuity"};
    for (const char* s : suites)
        if (cfg.suite == s) return;
    throw std::invalid_argument("config: unknown suite '" + cfg.suite + "'");
}

bool want(const RunConfig& cfg, const std::string& s) {
    return cfg.suite == "all" || cfg.suite == s;
}

}  // namespace

int run_verify_suite(const RunConfig& cfg) {
    validate(cfg);
    double delta = cfg.delta > 0.0 ? cfg.delta : 10.0 * cfg.tol;
    std::filesystem::create_directories(cfg.out_dir);
    KernelSpec kernel = make_kernel(cfg.kernel, cfg.alpha);

    std::vector<PiecewiseLinearFn> corpus;
    if (!cfg.function_json.empty()) {
        corpus.push_back(function_from_json(nlohmann::json::parse(cfg.function_json)));
    } else {
        corpus = generate_corpus(cfg.seed, cfg.corpus_n);
    }

    MaximalEvalFn maxeval = [&](const PiecewiseLinearFn& w, double x) {
        return maximal_at(w, kernel, x, cfg.tol).value;
    };

    std::vector<PropertyReport> reports;
    CsvWriter summary(cfg.out_dir + "/summary.csv");
    summary.row({"check", "function", "kernel", "passed", "lhs", "rhs", "slack"});

    auto emit = [&](PropertyReport r, int fn_index) {
        std::string id = r.name + "_" + std::to_string(fn_index);
        write_report_json(cfg.out_dir + "/report_" + id + ".json", r);
        summary.row({r.name, std::to_string(fn_index), family_name(cfg.kernel),
                     r.passed ? "true" : "false", format_sig17(r.lhs), format_sig17(r.rhs),
                     format_sig17(r.slack)});
        reports.push_back(std::move(r));
    };

    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    bool per_function = want(cfg, "subharmonicity") || want(cfg, "uniform") || want(cfg, "tail") ||
                        want(cfg, "lemma6");
    if (per_function) {
        for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
            PiecewiseLinearFn ua = abs_part(corpus[fi]);
            double R = cfg.grid_span > 0.0
                           ? cfg.grid_span
                           : 1.3 * pick_tail_radius(ua, nullptr, maxeval, 0.1);
            std::vector<double> grid =
                union_grid(uniform_grid(-R, R, cfg.grid_n), ua.breakpoints());
            MaximalProfile prof = maximal_profile(ua, kernel, grid, cfg.tol);

            if (want(cfg, "subharmonicity")) emit(check_subharmonicity(prof, ua, delta), (int)fi);
            if (want(cfg, "tail")) {
                double Rt = pick_tail_radius(ua, nullptr, maxeval, 0.1);
                emit(check_tail_bound(ua, prof, Rt), (int)fi);
            }
            if (want(cfg, "uniform") || want(cfg, "lemma6")) {
                PiecewiseLinearFn g = make_tent(u01() * 2.0 - 1.0, 0.5 + u01(), 0.5 + u01());
                if (want(cfg, "uniform")) {
                    PiecewiseLinearFn uj = add(ua, scale(g, 0.1 + 0.4 * u01()));
                    MaximalProfile prof_j = maximal_profile(uj, kernel, grid, cfg.tol);
                    emit(check_uniform_bound(ua, uj, prof, prof_j), (int)fi);
                }
                if (want(cfg, "lemma6")) {
                    PiecewiseLinearFn uj = add(ua, scale(g, 0.02));
                    MaximalProfile prof_j = maximal_profile(uj, kernel, grid, cfg.tol);
                    double eps = l1_diff(derivative(ua), derivative(uj)) * (1.0 + 1e-9) + 1e-12;
                    emit(check_lemma6(ua, uj, prof_j, derivative(ua), eps, delta), (int)fi);
                }
            }
            if (cfg.suite == "all")
                emit(check_variation_diminishing(ua, prof), (int)fi);
        }
    }

    if (want(cfg, "prop5") || want(cfg, "continuity")) {
        PiecewiseLinearFn base =
            cfg.function_json.empty() ? abs_part(corpus[0]) : abs_part(corpus[0]);
        PiecewiseLinearFn g = make_tent(0.4, 0.8, 0.5 * norm_w11(base));
        ContinuitySequence seq =
            ContinuitySequence::make(base, g, {1, 2, 4, 8, 16}, PerturbationMode::additive);
        double du = norm_l1(derivative(base));
        double R = cfg.grid_span > 0.0
                       ? cfg.grid_span
                       : pick_tail_radius(abs_part(base), nullptr, maxeval,
                                          std::max(0.01 * du, 1e-9));
        std::vector<double> grid = uniform_grid(-R - 1.0, R + 1.0, cfg.grid_n);

        if (want(cfg, "prop5")) {
            std::vector<ProfilePair> pairs = continuity_profiles(seq, kernel, grid, cfg.tol);
            emit(check_prop5(base, seq, pairs, grid.front(), grid.back()), 0);
            emit(check_finite_intervals(base, seq, pairs, std::max(0.05 * du, 1e-9), delta), 0);
        }
        if (want(cfg, "continuity")) {
            ContinuityTable table = continuity_experiment(seq, kernel, grid, cfg.tol);
            CsvWriter csv(cfg.out_dir + "/continuity.csv");
            csv.row({"j", "w11_diff", "sup_diff", "e_total", "e_contact", "e_detach"});
            SvgSeries ej;
            ej.label = "E_j";
            for (const auto& row : table.rows) {
                csv.row({std::to_string(row.j), format_sig17(row.w11_diff),
                         format_sig17(row.sup_diff), format_sig17(row.e_total),
                         format_sig17(row.e_contact), format_sig17(row.e_detach)});
                ej.x.push_back(row.j);
                ej.y.push_back(row.e_total);
            }
            write_svg_plot(cfg.out_dir + "/continuity_convergence.svg", {ej},
                           "derivative L1 error vs j", "j", "E_j", true);
            emit(table.verdict, 0);
        }
    }

    for (const PropertyReport& r : reports)
        if (!r.passed) return 2;
    return 0;
}

}  // namespace maxop

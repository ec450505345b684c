// Command-line surface: ingest call-quote CSVs, repair them, compute
// martingale-transport price bounds with their hedging certificates, run
// improvement reports and marginal-inclusion sweeps, and reproduce the named
// example studies. Outputs are deterministic JSON/CSV files.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mot/analysis.hpp"
#include "mot/hedging.hpp"
#include "mot/json_io.hpp"
#include "mot/market.hpp"
#include "mot/measure.hpp"
#include "mot/mot.hpp"
#include "mot/payoff.hpp"

namespace {

using namespace mot;

constexpr int kExitValidation = 2;
constexpr int kExitParse = 3;
constexpr int kExitSolver = 4;
constexpr int kExitAcceptance = 5;

struct Common {
    std::string input;
    std::string out_dir = ".";
    std::string payoff = "straddle";
    std::size_t atoms = 200;
    std::string sense = "min";
    bool repair = false;
    int jobs = 1;
    unsigned seed = 0;
    double tol = 1e-8;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::vector<DiscreteMeasure> load_marginals(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("bad marginals JSON: " + std::string(e.what()));
    }
    std::vector<DiscreteMeasure> out;
    try {
        for (const auto& m : j) out.push_back(measure_from_json(m));
    } catch (const std::exception& e) {
        throw ParseError("bad marginals JSON: " + std::string(e.what()));
    }
    if (out.size() < 2) throw ParseError("need at least two marginals");
    return out;
}

PayoffSpec parse_payoff_cli(const std::string& text) {
    try {
        return parse_payoff(text);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int cmd_marginals(const Common& cfg) {
    std::ifstream in(cfg.input);
    if (!in) {
        std::cerr << "cannot open " << cfg.input << "\n";
        return kExitParse;
    }
    IngestResult ingest = read_quotes_csv(in);
    const auto violations = validate(ingest.surface, cfg.tol);
    Json report;
    report["synthesized"] = ingest.synthesized;
    report["violations"] = to_json(violations);

    CallQuoteSurface surface = ingest.surface;
    if (!violations.empty()) {
        if (!cfg.repair) {
            std::cerr << "surface fails validation (" << violations.size()
                      << " violation(s)); rerun with --repair\n";
            write_file(std::filesystem::path(cfg.out_dir) / "repair_report.json",
                       dump_json(report));
            return kExitValidation;
        }
        const RepairReport repaired = repair_l1(surface);
        surface = repaired.repaired;
        report["repair"] = to_json(repaired);
    }
    const auto marginals = implied_marginals(surface);
    Json out = Json::array();
    for (const auto& m : marginals) out.push_back(to_json(m));
    write_file(std::filesystem::path(cfg.out_dir) / "marginals.json", dump_json(out));
    write_file(std::filesystem::path(cfg.out_dir) / "repair_report.json", dump_json(report));
    std::cout << "wrote " << marginals.size() << " marginals to " << cfg.out_dir
              << "/marginals.json\n";
    return 0;
}

int cmd_bound(const Common& cfg, const std::vector<int>& use) {
    const auto all = load_marginals(cfg.input);
    MotProblem problem;
    if (use.empty()) {
        problem.marginals = all;
    } else {
        for (int i : use) {
            if (i < 1 || static_cast<std::size_t>(i) > all.size()) {
                std::cerr << "--marginals index " << i << " out of range\n";
                return kExitParse;
            }
            problem.marginals.push_back(all[static_cast<std::size_t>(i) - 1]);
        }
    }
    const PayoffSpec spec = parse_payoff_cli(cfg.payoff);
    problem.payoff = bind_payoff(spec, problem.marginals.size());
    problem.sense = cfg.sense == "max" ? Sense::maximize : Sense::minimize;

    const MotSolution sol = solve_mot(problem);
    write_file(std::filesystem::path(cfg.out_dir) / "bound.json", dump_json(to_json(sol)));

    if (problem.marginals.size() == 2 || problem.marginals.size() == 3) {
        const auto strat = strategy_from_certificate(sol.dual, problem.marginals);
        const auto c = [&spec](double x1, double x3) { return spec.fn(x1, x3, spec.param); };
        const auto& mid =
            problem.marginals.size() == 3 ? problem.marginals[1] : problem.marginals[0];
        const auto gap = gap_H(strat, c, problem.marginals.front().atoms, mid.atoms,
                               problem.marginals.back().atoms);
        std::ostringstream os;
        write_gap_csv(gap, os);
        write_file(std::filesystem::path(cfg.out_dir) / "gap.csv", os.str());
    }
    std::cout << "objective " << format_double(sol.objective) << " (payoff " << spec.name
              << ", " << cfg.sense << ", " << problem.marginals.size() << " marginals)\n";
    return 0;
}

int cmd_improve(const Common& cfg) {
    const auto all = load_marginals(cfg.input);
    if (all.size() != 3) {
        std::cerr << "improve needs exactly three marginals\n";
        return kExitParse;
    }
    const PayoffSpec spec = parse_payoff_cli(cfg.payoff);
    const auto rep = improvement_report(all, spec);
    write_file(std::filesystem::path(cfg.out_dir) / "improvement.json",
               dump_json(to_json(rep)));
    std::ostringstream csv;
    csv << "payoff,lower_13,lower_123,upper_123,upper_13,rel_lower,rel_upper\n";
    csv << rep.payoff << ',' << format_double(rep.lower_13) << ','
        << format_double(rep.lower_123) << ',' << format_double(rep.upper_123) << ','
        << format_double(rep.upper_13) << ',' << format_double(rep.rel_lower) << ','
        << format_double(rep.rel_upper) << '\n';
    write_file(std::filesystem::path(cfg.out_dir) / "improvement.csv", csv.str());
    auto pct = [](double v) { return std::abs(v) < 5e-13 ? 0.0 : 100.0 * v; };
    std::printf("%-24s %8.2f %8.2f %8.2f %8.2f  %6.2f%% %6.2f%%\n", rep.payoff.c_str(),
                rep.lower_13, rep.lower_123, rep.upper_123, rep.upper_13,
                pct(rep.rel_lower), pct(rep.rel_upper));
    return 0;
}

int cmd_sweep(const Common& cfg, const std::string& order) {
    const auto all = load_marginals(cfg.input);
    const PayoffSpec spec = parse_payoff_cli(cfg.payoff);
    const auto sweep = inclusion_sweep(
        all, spec, order == "right" ? SweepOrder::right : SweepOrder::left, {}, cfg.jobs);
    write_file(std::filesystem::path(cfg.out_dir) / "sweep.json", dump_json(to_json(sweep)));
    std::ostringstream csv;
    csv << "step,included,lower,upper\n";
    for (std::size_t k = 0; k < sweep.entries.size(); ++k) {
        csv << k << ',';
        for (std::size_t i = 0; i < sweep.entries[k].included.size(); ++i) {
            csv << (i ? " " : "") << sweep.entries[k].included[i] + 1;
        }
        csv << ',' << format_double(sweep.entries[k].lower) << ','
            << format_double(sweep.entries[k].upper) << '\n';
    }
    write_file(std::filesystem::path(cfg.out_dir) / "sweep.csv", csv.str());
    for (const auto& e : sweep.entries) {
        std::printf("included {");
        for (std::size_t i = 0; i < e.included.size(); ++i) {
            std::printf("%s%d", i ? "," : "", e.included[i] + 1);
        }
        std::printf("}: [%.6f, %.6f]\n", e.lower, e.upper);
    }
    return 0;
}

// --- named example reproductions -------------------------------------------

struct CheckList {
    int failures = 0;
    void expect(const std::string& label, bool ok, const std::string& detail) {
        std::printf("%-58s %s%s%s\n", label.c_str(), ok ? "PASS" : "FAIL",
                    detail.empty() ? "" : "  ", detail.c_str());
        if (!ok) ++failures;
    }
    void expect_near(const std::string& label, double got, double want, double tol) {
        char detail[96];
        std::snprintf(detail, sizeof(detail), "got %.6f want %.6f +-%g", got, want, tol);
        expect(label, std::abs(got - want) <= tol, detail);
    }
};

CallQuoteSurface example_surface() {
    CallQuoteSurface s;
    s.spot = 100.0;
    const std::vector<double> strikes = {0, 50, 80, 100, 120, 200, 250};
    s.maturities = {
        {0.25, strikes, {100, 50, 23, 6, 3, 0.2, 0}},
        {0.50, strikes, {100, 53, 24.8, 6, 5.2, 2, 0}},
        {1.00, strikes, {100, 57, 34, 20, 8, 2, 0}},
    };
    return s;
}

int example_table2(const std::string& out_dir) {
    CheckList checks;
    const auto mu = implied_marginals(example_surface());
    struct Row {
        PayoffSpec payoff;
        double l13, l123, u123, u13;
    };
    const std::vector<Row> rows = {
        {straddle_payoff(), 28.13, 31.63, 39.99, 39.99},
        {asian_payoff(70.0), 33.57, 33.68, 35.01, 35.14},
        {asian_payoff(100.0), 11.08, 11.11, 12.83, 13.00},
        {asian_payoff(130.0), 3.26, 3.58, 4.60, 4.75},
    };
    Json json = Json::array();
    std::ostringstream csv;
    csv << "payoff,lower_13,lower_123,upper_123,upper_13,rel_lower,rel_upper\n";
    for (const auto& row : rows) {
        const auto rep = improvement_report(mu, row.payoff);
        checks.expect_near(row.payoff.name + " lower_13", rep.lower_13, row.l13, 0.01);
        checks.expect_near(row.payoff.name + " lower_123", rep.lower_123, row.l123, 0.01);
        checks.expect_near(row.payoff.name + " upper_123", rep.upper_123, row.u123, 0.01);
        checks.expect_near(row.payoff.name + " upper_13", rep.upper_13, row.u13, 0.01);
        json.push_back(to_json(rep));
        csv << rep.payoff << ',' << format_double(rep.lower_13) << ','
            << format_double(rep.lower_123) << ',' << format_double(rep.upper_123) << ','
            << format_double(rep.upper_13) << ',' << format_double(rep.rel_lower) << ','
            << format_double(rep.rel_upper) << '\n';
    }
    write_file(std::filesystem::path(out_dir) / "table2.json", dump_json(json));
    write_file(std::filesystem::path(out_dir) / "table2.csv", csv.str());
    return checks.failures;
}

int example_straddle(std::size_t atoms) {
    CheckList checks;
    const auto mu1 = quantize(ContinuousLawSpec::uniform(-1.0, 1.0), atoms);
    const auto mu2 = quantize(ContinuousLawSpec::two_point(-1.0, 1.0), 2);
    const auto mu3 = quantize(ContinuousLawSpec::uniform(-2.0, 2.0), atoms);

    MotProblem two;
    two.marginals = {mu1, mu3};
    two.payoff = bind_payoff(straddle_payoff(), 2);
    const double low2 = solve_mot(two).objective;
    checks.expect_near("two-marginal straddle lower bound", low2, 0.5931, 0.01);

    MotProblem three;
    three.marginals = {mu1, mu2, mu3};
    three.payoff = bind_payoff(straddle_payoff(), 3);
    const double low3 = solve_mot(three).objective;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "got %.6f want >= 0.66", low3);
    checks.expect("three-marginal straddle lower bound", low3 >= 0.66, detail);

    const auto sub = verify_subhedge(
        straddle_strategy(), [](double a, double b) { return std::abs(a - b); }, mu1, mu2, mu3);
    checks.expect("closed-form sub-hedge verifies", sub.ok, "");
    checks.expect_near("closed-form sub-hedge value", sub.value, 2.0 / 3.0, 5e-3);
    return checks.failures;
}

int example_leftcurtain(std::size_t atoms) {
    CheckList checks;
    const auto mu1 = quantize(ContinuousLawSpec::uniform(-1.0, 1.0), atoms);
    const auto mu2 = quantize(ContinuousLawSpec::two_point(-1.0, 1.0), 2);
    const auto mu3 = quantize(ContinuousLawSpec::uniform(-2.0, 2.0), atoms);

    MotProblem two;
    two.marginals = {mu1, mu3};
    two.payoff = bind_payoff(spence_mirrlees_payoff(), 2);
    two.sense = Sense::maximize;
    checks.expect_near("two-marginal upper bound", solve_mot(two).objective, 0.5, 0.02);

    MotProblem three;
    three.marginals = {mu1, mu2, mu3};
    three.payoff = bind_payoff(spence_mirrlees_payoff(), 3);
    three.sense = Sense::maximize;
    checks.expect_near("three-marginal upper bound", solve_mot(three).objective, 0.0, 0.02);

    const RealMap up = [](double x) { return x > -1.0 ? 1.5 * x + 0.5 : x; };
    const RealMap down = [](double x) { return x > -1.0 ? -0.5 * x - 1.5 : x; };
    checks.expect("coin escapes the two-map corridor",
                  !corridor_feasible(mu1, mu2, down, up), "");
    return checks.failures;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
    std::ostringstream csv;
    csv << "step,included,lower,upper\n";
    for (std::size_t k = 0; k < sweep.entries.size(); ++k) {
        csv << k << ',';
        for (std::size_t i = 0; i < sweep.entries[k].included.size(); ++i) {
            csv << (i ? " " : "") << sweep.entries[k].included[i] + 1;
        }
        csv << ',' << format_double(sweep.entries[k].lower) << ','
            << format_double(sweep.entries[k].upper) << '\n';
    }
    write_file(path, csv.str());
}

int example_binomial(const std::string& order, const std::string& out_dir) {
    CheckList checks;
    std::vector<DiscreteMeasure> marginals;
    for (int k = 1; k <= 6; ++k) marginals.push_back(binomial_marginal(100.0, k));

    const auto left = inclusion_sweep(marginals, forward_call_payoff(), SweepOrder::left);
    const auto right = inclusion_sweep(marginals, forward_call_payoff(), SweepOrder::right);
    write_sweep_csv(std::filesystem::path(out_dir) / "binomial_left.csv", left);
    write_sweep_csv(std::filesystem::path(out_dir) / "binomial_right.csv", right);
    const auto& shown = order == "left" ? left : right;
    for (const auto& e : shown.entries) {
        std::printf("  included {");
        for (std::size_t i = 0; i < e.included.size(); ++i) {
            std::printf("%s%d", i ? "," : "", e.included[i] + 1);
        }
        std::printf("}: [%.7f, %.7f]\n", e.lower, e.upper);
    }
    const auto& last = right.entries.back();
    checks.expect_near("full-inclusion bounds coincide", last.upper - last.lower, 0.0, 1e-7);
    checks.expect_near("full-inclusion value", last.lower, 0.9375, 1e-7);
    const bool tighter = right.entries[1].lower >= left.entries[1].lower - 1e-8 &&
                         right.entries[1].upper <= left.entries[1].upper + 1e-8 &&
                         (right.entries[1].upper - right.entries[1].lower) <
                             (left.entries[1].upper - left.entries[1].lower);
    checks.expect("right order tightens faster after one inclusion", tighter, "");
    return checks.failures;
}

int example_mixture(unsigned seed) {
    CheckList checks;
    const auto mu = implied_marginals(example_surface());
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
        const auto& spec =
            payoff_registry()[static_cast<std::size_t>(rep) % payoff_registry().size()];
        const std::vector<double> ts = {unif(rng), unif(rng)};
        for (const auto& e : no_improvement_suite(mu[0], mu[2], spec, ts)) {
            worst = std::max(worst, e.abs_gap);
        }
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "max |gap| %.3e", worst);
    checks.expect("mixture marginals never improve the bounds",
                  worst <= 1e-7 * (1 + 100.0), detail);
    return checks.failures;
}

int example_convexinterp(unsigned seed) {
    CheckList checks;
    const auto mu1 = DiscreteMeasure::make({0.0, 10.0}, {0.5, 0.5});
    const auto mu3 = DiscreteMeasure::make({-1.0, 1.0, 9.0, 11.0}, {0.25, 0.25, 0.25, 0.25});
    const RealMap down = [](double x) { return x - 1.0; };
    const RealMap up = [](double x) { return x + 1.0; };

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::vector<double> ts = {0.0, unif(rng), unif(rng), 1.0};
    bool corridor_ok = true;
    for (double t : ts) {
        const auto mu2 = convex_interpolate(mu1, down, up, t);
        corridor_ok = corridor_ok && corridor_feasible(mu1, mu2, down, up);
    }
    double worst = 0.0;
    for (const auto& e : no_improvement_suite(mu1, mu3, straddle_payoff(), ts, &down, &up)) {
        if (e.construction == "convex_interpolate") worst = std::max(worst, e.abs_gap);
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "max |gap| %.3e", worst);
    checks.expect("interpolated marginals never improve the bounds",
                  worst <= 1e-7 * (1 + 10.0), detail);
    checks.expect("interpolated marginals stay corridor-feasible", corridor_ok, "");
    return checks.failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"model-independent price bounds from call-quote marginals"};
    app.require_subcommand(1);

    Common cfg;
    std::vector<int> use_marginals;
    std::string order = "left";
    std::string example_name;

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        auto* opt = cmd->add_option("--input", cfg.input, "input file");
        if (needs_input) opt->required();
        cmd->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
        cmd->add_option("--payoff", cfg.payoff,
                        "payoff NAME[:param=v]; one of straddle, asian:strike=K, "
                        "spence_mirrlees, forward_call")
            ->capture_default_str();
        cmd->add_option("--atoms", cfg.atoms, "quantization grid size")->capture_default_str();
        cmd->add_option("--sense", cfg.sense, "min or max")
            ->check(CLI::IsMember({"min", "max"}))
            ->capture_default_str();
        cmd->add_flag("--repair", cfg.repair, "repair an arbitrageable surface");
        cmd->add_option("--jobs", cfg.jobs, "parallel solves for sweeps")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "seed for randomized checks")
            ->capture_default_str();
        cmd->add_option("--tol", cfg.tol, "validation tolerance")->capture_default_str();
    };

    auto* marginals_cmd =
        app.add_subcommand("marginals", "validate/repair quotes and imply marginals");
    add_common(marginals_cmd, true);

    auto* bound_cmd = app.add_subcommand("bound", "price bound for one payoff");
    add_common(bound_cmd, true);
    bound_cmd->add_option("--marginals", use_marginals,
                          "1-based marginal indices to include (default: all)");

    auto* improve_cmd =
        app.add_subcommand("improve", "two- vs three-marginal bound table row");
    add_common(improve_cmd, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "marginal-inclusion sweep");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--order", order, "left or right")
        ->check(CLI::IsMember({"left", "right"}))
        ->capture_default_str();

    auto* example_cmd = app.add_subcommand("example", "run a named reproduction");
    example_cmd
        ->add_option("name", example_name,
                     "table2, straddle, leftcurtain, binomial, mixture, convexinterp")
        ->required();
    add_common(example_cmd, false);
    example_cmd->add_option("--order", order, "left or right (binomial)")
        ->check(CLI::IsMember({"left", "right"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (marginals_cmd->parsed()) return cmd_marginals(cfg);
        if (bound_cmd->parsed()) return cmd_bound(cfg, use_marginals);
        if (improve_cmd->parsed()) return cmd_improve(cfg);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, order);
        if (example_cmd->parsed()) {
            int failures = 0;
            if (example_name == "table2") {
                failures = example_table2(cfg.out_dir);
            } else if (example_name == "straddle") {
                failures = example_straddle(cfg.atoms);
            } else if (example_name == "leftcurtain") {
                failures = example_leftcurtain(cfg.atoms);
            } else if (example_name == "binomial") {
                failures = example_binomial(order, cfg.out_dir);
            } else if (example_name == "mixture") {
                failures = example_mixture(cfg.seed);
            } else if (example_name == "convexinterp") {
                failures = example_convexinterp(cfg.seed);
            } else {
                std::cerr << "unknown example: " << example_name << "\n";
                return kExitParse;
            }
            if (failures > 0) {
                std::cerr << failures << " check(s) failed\n";
                return kExitAcceptance;
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SolverStalled& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cph/cli.hpp"
#include "json.hpp"

namespace cph::cli {

int exit_code(const Error& e) {
    switch (e.code()) {
    case Errc::ConfigError:
    case Errc::NotIntensityMatrix:
    case Errc::ReducibleChain:
    case Errc::ZeroExitRate:
    case Errc::NoRealArrivals:
    case Errc::InvalidService:
    case Errc::UnsupportedFamily:
    case Errc::StateSpaceTooLarge:
        return 1;
    case Errc::Unstable:
    case Errc::UnstableSimulation:
        return 2;
    default:
        return 3;
    }
}

namespace {

struct Options {
    std::string model;
    std::string grid = "0.01:50:200:log";
    double epsilon = -1.0;
    int reps = 20;
    std::uint64_t seed = 12345;
    std::int64_t arrivals = 1000000;
    std::string out = ".";
    bool no_sim = false;
    bool check = false;
    double kappa = 2.0;
};

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::ConfigError, "cannot write '" + p.string() + "'");
    f << text;
}

std::filesystem::path out_dir(const Options& o) {
    std::filesystem::path d(o.out);
    std::error_code ec;
    std::filesystem::create_directories(d, ec);
    if (ec) throw Error(Errc::ConfigError, "cannot create output directory '" + o.out + "'");
    return d;
}

ModelConfig load(const Options& o) {
    ModelConfig cfg = load_config(o.model);
    if (o.epsilon >= 0.0) {
        if (!(o.epsilon < 1.0)) throw Error(Errc::ConfigError, "--epsilon must lie in [0, 1)");
        cfg.service.epsilon = o.epsilon;
    }
    return cfg;
}

SimOptions sim_options(const Options& o) {
    SimOptions s;
    s.reps = o.reps;
    s.seed = o.seed;
    s.arrivals = o.arrivals;
    return s;
}

void print_cplx_list(std::ostream& os, const char* name, const std::vector<cplx>& v) {
    os << name << ':';
    for (const auto& z : v) {
        os << ' ' << format_num(z.real());
        if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << format_num(std::abs(z.imag())) << 'i';
    }
    os << '\n';
}

void print_stats(std::ostream& os, const ErrorStats& s) {
    os << "max |corrected - simplified|: " << format_num(s.max_diff_approx) << '\n'
       << "|exact - corrected| range:    [" << format_num(s.abs_err_corrected_lo) << ", "
       << format_num(s.abs_err_corrected_hi) << "]\n"
       << "|exact - simplified| range:   [" << format_num(s.abs_err_simplified_lo) << ", "
       << format_num(s.abs_err_simplified_hi) << "]\n"
       << "tail relative error:          " << format_num(s.tail_rel_err) << '\n';
}

std::string figure_svg(const std::string& title, const std::vector<double>& grid, const Curves& c) {
    std::vector<Series> s{{"phase-type base", c.base, "#1f77b4", false},
                          {"corrected", c.corrected, "#d62728", false},
                          {"simplified", c.simplified, "#2ca02c", true}};
    if (!c.exact.empty()) s.push_back({"exact", c.exact, "black", true});
    return render_svg(title, grid, s);
}

int cmd_solve(const Options& o) {
    const ModelConfig cfg = load(o);
    const std::vector<double> grid = parse_grid(o.grid);
    const StabilityReport st = stability(cfg.model, cfg.service);
    if (!st.stable) throw Error(Errc::Unstable, "load " + format_num(st.load) + " is not below one");
    const std::vector<Curves> curves = compute_curves(cfg, grid, false, nullptr);
    const BaseSolution base = solve_base(cfg.model, cfg.service.phase);

    std::ostream& os = std::cout;
    os << "states: " << cfg.model.n << '\n'
       << "load: " << format_num(st.load) << '\n'
       << "stability margin: " << format_num(st.margin) << '\n';
    print_cplx_list(os, "roots s", base.s_roots);
    std::vector<cplx> xs;
    for (const auto& x : base.x_roots) xs.push_back(x.value);
    print_cplx_list(os, "roots x", xs);
    os << "u:";
    for (int i = 0; i < base.n; ++i) os << ' ' << format_num(base.u(i));
    os << "\npi:";
    for (int i = 0; i < base.n; ++i) os << ' ' << format_num(cfg.model.pi(i));
    os << '\n';

    std::ostringstream csv;
    csv << "t,state,base,corrected\n";
    for (const auto& c : curves)
        for (size_t k = 0; k < grid.size(); ++k)
            csv << format_num(grid[k]) << ',' << c.label << ',' << format_num(c.base[k]) << ','
                << format_num(c.corrected[k]) << '\n';
    write_file(out_dir(o) / "solve.csv", csv.str());
    return 0;
}

int cmd_approximate(const Options& o) {
    const ModelConfig cfg = load(o);
    const std::vector<double> grid = parse_grid(o.grid);
    write_file(out_dir(o) / "approximate.csv", curves_csv(grid, compute_curves(cfg, grid, false, nullptr)));
    return 0;
}

int cmd_compare(const Options& o) {
    const ModelConfig cfg = load(o);
    const std::vector<double> grid = parse_grid(o.grid);
    const SimOptions so = sim_options(o);
    const std::vector<Curves> curves = compute_curves(cfg, grid, true, o.no_sim ? nullptr : &so);
    const auto dir = out_dir(o);
    write_file(dir / "compare.csv", curves_csv(grid, curves));
    const Curves& total = curves[static_cast<size_t>(cfg.model.n)];
    write_file(dir / "compare.svg", figure_svg("Workload tail", grid, total));
    print_stats(std::cout, error_stats(total.exact, total.corrected, total.simplified));
    return 0;
}

int cmd_simulate(const Options& o) {
    const ModelConfig cfg = load(o);
    const std::vector<double> grid = parse_grid(o.grid);
    const SimEstimate est = simulate(cfg.model, cfg.service, grid, sim_options(o));
    std::ostringstream csv;
    csv << "t,state,simulated,sim_se\n";
    auto rows = [&](const std::string& label, const std::vector<double>& v, const std::vector<double>& se) {
        for (size_t k = 0; k < grid.size(); ++k)
            csv << format_num(grid[k]) << ',' << label << ',' << format_num(v[k]) << ',' << format_num(se[k]) << '\n';
    };
    for (int i = 0; i < cfg.model.n; ++i)
        rows(std::to_string(i + 1), est.tail[static_cast<size_t>(i)], est.se[static_cast<size_t>(i)]);
    rows("total", est.total_tail, est.total_se);
    rows("wait", est.wait_tail, est.wait_se);
    write_file(out_dir(o) / "simulate.csv", csv.str());
    return 0;
}

int cmd_reproduce(const Options& o) {
    const ModelConfig cfg = figure_config(o.kappa, o.epsilon >= 0.0 ? o.epsilon : 0.01);
    const std::vector<double> grid = parse_grid(o.grid);
    const SimOptions so = sim_options(o);
    const std::vector<Curves> curves = compute_curves(cfg, grid, true, o.no_sim ? nullptr : &so);
    const FigureData fd = figure_data(cfg, grid, curves);
    const auto dir = out_dir(o);
    write_file(dir / "fig1.csv", curves_csv(grid, curves));
    write_file(dir / "fig1.svg", figure_svg("Workload tail, two-state MMPP", grid, curves[static_cast<size_t>(cfg.model.n)]));

    nlohmann::ordered_json j;
    j["max_diff_approx"] = fd.stats.max_diff_approx;
    j["abs_err_corrected"] = {fd.stats.abs_err_corrected_lo, fd.stats.abs_err_corrected_hi};
    j["abs_err_simplified"] = {fd.stats.abs_err_simplified_lo, fd.stats.abs_err_simplified_hi};
    j["tail_rel_err"] = fd.stats.tail_rel_err;
    j["load"] = fd.load;
    j["grid"] = o.grid;
    write_file(dir / "errors.json", j.dump(2) + "\n");

    std::cout << "load: " << format_num(fd.load) << '\n';
    print_stats(std::cout, fd.stats);
    if (!o.check) return 0;
    bool ok = true;
    for (const auto& c : figure_checks(fd)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_num(c.value) << " (expected "
                  << c.expected << ")\n";
        ok = ok && c.pass;
    }
    return ok ? 0 : 4;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Workload of a MAP queue with mixture service: phase-type base, corrected approximations, oracles"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* c, bool needs_model) {
        if (needs_model) c->add_option("--model", o.model, "JSON model file")->required();
        c->add_option("--grid", o.grid, "time grid MIN:MAX:N[:log|:lin]")->capture_default_str();
        c->add_option("--epsilon", o.epsilon, "override the mixture weight of the heavy component");
        c->add_option("--out", o.out, "output directory")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* c) {
        c->add_option("--reps", o.reps, "simulation replications")->capture_default_str()->check(CLI::PositiveNumber);
        c->add_option("--seed", o.seed, "simulation seed")->capture_default_str();
        c->add_option("--arrivals", o.arrivals, "arrivals per replication")->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "phase-type base solution and stability report");
    add_common(solve, true);
    auto* approx = app.add_subcommand("approximate", "base, corrected and simplified tails");
    add_common(approx, true);
    auto* compare = app.add_subcommand("compare", "approximations against the exact and simulated tails");
    add_common(compare, true);
    add_sim(compare);
    compare->add_flag("--no-sim", o.no_sim, "skip the simulation columns");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the tails");
    add_common(sim, true);
    add_sim(sim);
    auto* fig = app.add_subcommand("reproduce-fig1", "two-state MMPP reproduction with error statistics");
    add_common(fig, false);
    add_sim(fig);
    fig->add_flag("--no-sim", o.no_sim, "skip the simulation columns");
    fig->add_flag("--check", o.check, "exit with code 4 when a reproduction tolerance is violated");
    fig->add_option("--kappa", o.kappa, "heavy-tail parameter")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*solve) return cmd_solve(o);
        if (*approx) return cmd_approximate(o);
        if (*compare) return cmd_compare(o);
        if (*sim) return cmd_simulate(o);
        return cmd_reproduce(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace cph::cli

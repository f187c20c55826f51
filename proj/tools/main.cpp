#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "perhor/cli.hpp"

namespace {

std::vector<double> parse_eta(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) throw perhor::cli::ConfigError("eta: empty component in '" + text + "'");
        char* end = nullptr;
        const double v = std::strtod(cur.c_str(), &end);
        if (end != cur.c_str() + cur.size() || !std::isfinite(v))
            throw perhor::cli::ConfigError("eta: bad number '" + cur + "'");
        out.push_back(v);
        cur.clear();
    };
    for (char ch : text) {
        if (ch == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            cur += ch;
    }
    flush();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perhor - discounted periodic-horizon toolkit"};
    app.set_config("--config", "", "INI config file (key=value); flags override file values");

    perhor::cli::RunConfig cfg;
    std::string eta_text = "1.0";

    app.add_option("--r", cfg.r, "discount rate (> 0)");
    app.add_option("--T", cfg.T, "period (> 0)");
    app.add_option("--m", cfg.m, "samples per period (>= 2)");
    app.add_option("--K", cfg.K, "periods retained (0 = derive from input)");
    app.add_option("--alpha", cfg.alpha, "norm order (>= 1)");
    app.add_option("--tail", cfg.tail, "tail policy: zero | periodic");
    app.add_option("--lagrangian", cfg.lagrangian,
                   "built-in integrand: dirichlet | quadratic | tracking | modulated");
    app.add_option("--eta", eta_text, "boundary value, comma-separated list");
    app.add_flag("--oracle", cfg.oracle, "also run the brute-force decomposition oracle");
    app.add_option("--seed", cfg.seed, "seed for randomized checks and multistarts");
    app.add_option("--out", cfg.out, "report path (default: stdout)");
    app.add_option("--input", cfg.input, "input CSV (header t,x1..xn)");
    app.add_option("--tol", cfg.tol, "series truncation tolerance");
    app.add_option("--max-terms", cfg.max_terms, "series term cap");
    app.add_option("--max-iters", cfg.max_iters, "solver iteration cap");
    app.add_option("--grad-tol", cfg.grad_tol, "solver gradient tolerance");
    app.add_option("--multistart", cfg.multistart, "number of solver starts");
    app.add_flag("--unweighted-objective", cfg.unweighted_objective,
                 "minimize the unweighted finite-horizon integrand");
    app.add_option("--el-tol", cfg.el_tol, "assert the Euler-Lagrange residual below this");
    app.add_option("--amp-cos", cfg.amp_cos, "tracking target cosine amplitude");
    app.add_option("--amp-sin", cfg.amp_sin, "tracking target sine amplitude");
    app.add_option("--offset", cfg.offset, "tracking target offset");
    app.add_option("--kappa", cfg.kappa, "modulated decay rate");
    app.add_option("--verify-signals", cfg.verify_signals, "random fixtures per verify check");

    auto* decompose = app.add_subcommand("decompose", "seasonality + trend split of a CSV signal");
    auto* project = app.add_subcommand("project", "project a CSV signal onto periodic signals");
    auto* solve = app.add_subcommand("solve", "reduce and solve a built-in variational problem");
    auto* verify = app.add_subcommand("verify", "run the randomized invariant suite");
    for (auto* sub : {decompose, project, solve, verify}) sub->fallthrough();
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        cfg.eta = parse_eta(eta_text);
        perhor::cli::CommandResult res;
        if (decompose->parsed())
            res = perhor::cli::cmd_decompose(cfg);
        else if (project->parsed())
            res = perhor::cli::cmd_project(cfg);
        else if (solve->parsed())
            res = perhor::cli::cmd_solve(cfg);
        else
            res = perhor::cli::cmd_verify(cfg);
        return res.exit_code;
    } catch (const perhor::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

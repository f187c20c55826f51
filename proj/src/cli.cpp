#include "perhor/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>

#include "perhor/catalog.hpp"
#include "perhor/rng.hpp"

namespace perhor::cli {

using nlohmann::json;

namespace {

// ---- logging (PERIODIC_HORIZON_LOG = off|error|warn|info|debug) ----

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("PERIODIC_HORIZON_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "error") return 1;
        if (v == "warn") return 2;
        if (v == "info") return 3;
        if (v == "debug") return 4;
        return std::atoi(env);
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 3) std::cerr << "[perhor] " << msg << "\n";
}
void log_debug(const std::string& msg) {
    if (log_level() >= 4) std::cerr << "[perhor:debug] " << msg << "\n";
}

// ---- small helpers ----

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

json config_echo(const RunConfig& c) {
    return json{{"r", c.r},
                {"T", c.T},
                {"m", c.m},
                {"K", c.K},
                {"alpha", c.alpha},
                {"tail", c.tail},
                {"lagrangian", c.lagrangian},
                {"eta", c.eta},
                {"oracle", c.oracle},
                {"seed", c.seed},
                {"input", c.input},
                {"out", c.out},
                {"tol", c.tol},
                {"max_terms", c.max_terms},
                {"max_iters", c.max_iters},
                {"grad_tol", c.grad_tol},
                {"multistart", c.multistart},
                {"unweighted_objective", c.unweighted_objective},
                {"el_tol", c.el_tol},
                {"amp_cos", c.amp_cos},
                {"amp_sin", c.amp_sin},
                {"offset", c.offset},
                {"kappa", c.kappa},
                {"verify_signals", c.verify_signals}};
}

// Accumulates named pass/fail rows; every row names its tolerance.
struct Checks {
    json rows = json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, double measured, double tolerance,
             json witness = nullptr) {
        json row{{"name", name}, {"pass", pass}, {"measured", measured}, {"tolerance", tolerance}};
        if (!pass && !witness.is_null()) row["witness"] = witness;
        rows.push_back(std::move(row));
        all_pass = all_pass && pass;
        log_debug(name + (pass ? ": pass" : ": FAIL"));
    }
};

json report_skeleton(const char* command, const RunConfig& cfg) {
    return json{{"command", command}, {"config", config_echo(cfg)}};
}

void emit(const RunConfig& cfg, const json& report) {
    if (cfg.out.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream out(cfg.out);
    if (!out) throw ConfigError("cannot write report to " + cfg.out);
    out << report.dump(2) << "\n";
}

json period_to_json(const PeriodSignal& p) {
    json rows = json::array();
    for (int i = 0; i < p.m; ++i) {
        json row = json::array();
        row.push_back(p.time(i));
        for (int c = 0; c < p.dim; ++c) row.push_back(p.at(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

double signal_scale(const Signal& x) {
    double s = 1.0;
    for (double v : x.values) s = std::max(s, std::abs(v));
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double parse_number(const std::string& tok, const std::string& path, int lineno) {
    const std::string t = trim(tok);
    if (t.empty())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": empty field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + t + "'");
    if (!std::isfinite(v))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": non-finite value");
    return v;
}

}  // namespace

TailPolicy RunConfig::tail_policy() const {
    if (tail == "zero") return TailPolicy::ZeroExtend;
    if (tail == "periodic") return TailPolicy::ExactPeriodic;
    throw ConfigError("tail must be 'zero' or 'periodic', got '" + tail + "'");
}

Signal ingest_csv(const std::string& path, const RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(path + ": empty file (expected header t,x1..xn)");
    const auto header = split_csv_line(line);
    if (header.empty() || trim(header[0]) != "t")
        throw ConfigError(path + ":1: header must start with column 't'");
    const int dim = static_cast<int>(header.size()) - 1;
    if (dim < 1) throw ConfigError(path + ":1: need at least one data column");

    std::vector<double> tcol;
    std::vector<double> vals;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != dim + 1)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(dim + 1) + " fields, got " +
                              std::to_string(fields.size()));
        tcol.push_back(parse_number(fields[0], path, lineno));
        for (int c = 1; c <= dim; ++c) vals.push_back(parse_number(fields[c], path, lineno));
    }
    const int rows = static_cast<int>(tcol.size());
    if (rows == 0) throw ConfigError(path + ": no data rows");
    if (rows < 2) throw ConfigError(path + ": need at least 2 rows");

    const double dt = tcol[1] - tcol[0];
    if (!(dt > 0.0)) throw ConfigError(path + ":3: time column must be strictly increasing");
    if (std::abs(tcol[0]) > 1e-9 * std::max(1.0, std::abs(dt)))
        throw ConfigError(path + ":2: time column must start at 0");
    for (int i = 0; i < rows; ++i) {
        const double expected = i * dt;
        if (std::abs(tcol[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
            throw ConfigError(path + ":" + std::to_string(i + 2) +
                              ": non-uniform time spacing (expected t = " + fmt17(expected) +
                              ", got " + fmt17(tcol[i]) + ")");
    }

    if (rows % cfg.m != 0)
        throw ConfigError(path + ": row count " + std::to_string(rows) +
                          " is not divisible by m = " + std::to_string(cfg.m));
    const int K = rows / cfg.m;
    if (cfg.K > 0 && cfg.K != K)
        throw ConfigError(path + ": file holds " + std::to_string(K) +
                          " periods but config pins K = " + std::to_string(cfg.K));
    if (std::abs(cfg.m * dt - cfg.T) > 1e-9 * std::max(1.0, cfg.T))
        throw ConfigError(path + ": m * dt = " + fmt17(cfg.m * dt) +
                          " does not match the configured period T = " + fmt17(cfg.T));

    return Signal(make_grid(cfg.discount(), cfg.m, K), dim, std::move(vals),
                  cfg.tail_policy());
}

void write_period_csv(const std::string& path, const PeriodSignal& p) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV to " + path);
    out << "t";
    for (int c = 1; c <= p.dim; ++c) out << ",x" << c;
    out << "\n";
    for (int i = 0; i < p.m; ++i) {
        out << fmt17(p.time(i));
        for (int c = 0; c < p.dim; ++c) out << "," << fmt17(p.at(i, c));
        out << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& u) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV to " + path);
    out << "t";
    for (int c = 1; c <= u.dim; ++c) out << ",x" << c;
    out << "\n";
    for (int j = 0; j <= u.m; ++j) {
        out << fmt17(u.time(j));
        for (int c = 0; c < u.dim; ++c) out << "," << fmt17(u.at(j, c));
        out << "\n";
    }
}

std::string stable_payload(const json& report) {
    json copy = report;
    copy.erase("timings");
    return copy.dump();
}

CommandResult cmd_decompose(const RunConfig& cfg) {
    const double t0 = now_ms();
    if (cfg.input.empty()) throw ConfigError("decompose: an --input CSV is required");
    log_info("decompose: reading " + cfg.input);
    const Signal x = ingest_csv(cfg.input, cfg);
    const double scale = signal_scale(x);

    const Decomposition dec = decompose(x);

    json report = report_skeleton("decompose", cfg);
    Checks checks;
    json result;
    result["a_hat"] = dec.a_hat;
    result["residual_energy"] = dec.residual_energy;
    result["p_hat"] = period_to_json(dec.p_hat);

    if (cfg.oracle) {
        const Decomposition ref = decompose_oracle(x);
        double dp = 0.0, da = 0.0;
        for (size_t i = 0; i < dec.p_hat.values.size(); ++i)
            dp = std::max(dp, std::abs(dec.p_hat.values[i] - ref.p_hat.values[i]));
        for (int c = 0; c < x.dim; ++c)
            da = std::max(da, std::abs(dec.a_hat[c] - ref.a_hat[c]));
        const double tol = 1e-6 * scale;
        checks.add("decomposition-oracle-agreement", dp <= tol && da <= tol, std::max(dp, da),
                   tol, json{{"max_dp", dp}, {"max_da", da}});
        result["oracle"] = json{{"a_hat", ref.a_hat},
                                {"residual_energy", ref.residual_energy},
                                {"max_dp", dp},
                                {"max_da", da}};
    }

    // Residual orthogonality to the periodic subspace: exact stationarity
    // under the truncated zero-extension objective.
    if (x.tail == TailPolicy::ZeroExtend) {
        std::vector<double> rv(x.values.size());
        for (int j = 0; j < x.grid.num_nodes(); ++j) {
            const double t = x.grid.time(j);
            for (int c = 0; c < x.dim; ++c)
                rv[static_cast<size_t>(j) * x.dim + c] =
                    x.at(j, c) - dec.p_hat.at(j % x.grid.m, c) - t * dec.a_hat[c];
        }
        const Signal residual(x.grid, x.dim, std::move(rv), TailPolicy::ZeroExtend);
        const double orth = orthogonality_residual(residual);
        checks.add("residual-orthogonality", orth <= 1e-9 * scale, orth, 1e-9 * scale);
    }

    if (!cfg.out.empty()) {
        const std::string csv_path = cfg.out + ".seasonal.csv";
        write_period_csv(csv_path, dec.p_hat);
        result["seasonal_csv"] = csv_path;
    }

    report["result"] = std::move(result);
    report["checks"] = checks.rows;
    report["timings"] = json{{"total_ms", now_ms() - t0}};
    emit(cfg, report);
    return {std::move(report), checks.all_pass ? 0 : 1};
}

CommandResult cmd_project(const RunConfig& cfg) {
    const double t0 = now_ms();
    if (cfg.input.empty()) throw ConfigError("project: an --input CSV is required");
    const Signal x = ingest_csv(cfg.input, cfg);
    const double scale = signal_scale(x);

    const PeriodicProjection proj = project_periodic(x);

    // Projecting the lift again must reproduce it sample for sample.
    const PeriodicProjection again = project_periodic(proj.lifted);
    double idem = 0.0;
    for (size_t i = 0; i < proj.lifted.values.size(); ++i)
        idem = std::max(idem, std::abs(proj.lifted.values[i] - again.lifted.values[i]));

    json report = report_skeleton("project", cfg);
    Checks checks;
    checks.add("projection-idempotence", idem <= 1e-14 * scale, idem, 1e-14 * scale);

    std::vector<double> rv(x.values.size());
    for (size_t i = 0; i < rv.size(); ++i) rv[i] = x.values[i] - proj.lifted.values[i];
    const Signal residual(x.grid, x.dim, std::move(rv), x.tail);

    json result;
    result["period"] = period_to_json(proj.period);
    result["signal_norm"] = weighted_lp_norm(x, NormOrder(cfg.alpha));
    result["projection_norm"] = weighted_lp_norm(proj.lifted, NormOrder(cfg.alpha),
                                                 TailPolicy::ExactPeriodic);
    result["residual_norm"] = weighted_lp_norm(residual, NormOrder(cfg.alpha));
    result["residual_orthogonality"] = orthogonality_residual(residual);

    if (!cfg.out.empty()) {
        const std::string csv_path = cfg.out + ".period.csv";
        write_period_csv(csv_path, proj.period);
        result["period_csv"] = csv_path;
    }

    report["result"] = std::move(result);
    report["checks"] = checks.rows;
    report["timings"] = json{{"total_ms", now_ms() - t0}};
    emit(cfg, report);
    return {std::move(report), checks.all_pass ? 0 : 1};
}

CommandResult cmd_solve(const RunConfig& cfg) {
    const double t0 = now_ms();
    const int n = static_cast<int>(cfg.eta.size());
    if (n < 1) throw ConfigError("solve: eta must have at least one component");

    Lagrangian L;
    try {
        L = make_catalog_lagrangian(cfg.lagrangian, n, cfg.T,
                                    {cfg.amp_cos, cfg.amp_sin, cfg.offset, cfg.kappa});
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const DiscountConfig d = cfg.discount();
    const AveragingParams params = cfg.averaging();
    const FiniteHorizonProblem prob =
        reduce_problem(L, d, cfg.eta, params, !cfg.unweighted_objective);

    SolveOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.grad_tol = cfg.grad_tol;
    opts.multistart = cfg.multistart;
    opts.seed = cfg.seed;
    log_info("solve: lagrangian=" + cfg.lagrangian + " m=" + std::to_string(cfg.m));
    const SolveResult res = solve_finite_horizon(prob, cfg.m, opts);

    const int K = cfg.K > 0 ? cfg.K : 8;
    const Signal lifted = lift_solution(res.trajectory, K);
    const double obj_infinite = objective_value(lifted, L, params);
    const double dt = d.T / cfg.m;

    json report = report_skeleton("solve", cfg);
    Checks checks;
    checks.add("solver-converged", res.converged, res.grad_norm, cfg.grad_tol);

    bool monotone = true;
    for (size_t i = 1; i < res.objective_history.size(); ++i)
        monotone = monotone && res.objective_history[i] <= res.objective_history[i - 1];
    checks.add("objective-monotone", monotone, monotone ? 0.0 : 1.0, 0.0);

    if (!cfg.unweighted_objective) {
        const double denom = std::max(std::abs(obj_infinite), 1e-30);
        const double rel = std::abs(obj_infinite - res.objective) / denom;
        checks.add("reduction-identity", rel < 10.0 * dt || std::abs(obj_infinite) < 1e-12,
                   rel, 10.0 * dt);
    }

    const PeriodSignal el =
        euler_lagrange_residual(res.trajectory, prob.averaged, !cfg.unweighted_objective);
    double el_max = 0.0;
    for (double v : el.values) el_max = std::max(el_max, std::abs(v));
    if (cfg.el_tol > 0.0) checks.add("el-residual", el_max <= cfg.el_tol, el_max, cfg.el_tol);

    const Signal raw = euler_lagrange_residual_raw(lifted, L);
    double raw_max = 0.0;
    for (double v : raw.values) raw_max = std::max(raw_max, std::abs(v));

    json result;
    result["objective_reduced"] = res.objective;
    result["objective_infinite_horizon"] = obj_infinite;
    result["iterations"] = res.iterations;
    result["chosen_start"] = res.chosen_start;
    result["gradient_norm"] = res.grad_norm;
    result["el_residual_max"] = el_max;
    result["raw_el_residual_max"] = raw_max;  // reported, not asserted

    json traj = json::array();
    for (int j = 0; j <= res.trajectory.m; ++j) {
        json row = json::array();
        row.push_back(res.trajectory.time(j));
        for (int c = 0; c < n; ++c) row.push_back(res.trajectory.at(j, c));
        traj.push_back(std::move(row));
    }
    result["trajectory"] = std::move(traj);

    if (!cfg.out.empty()) {
        const std::string csv_path = cfg.out + ".trajectory.csv";
        write_trajectory_csv(csv_path, res.trajectory);
        result["trajectory_csv"] = csv_path;
    }

    report["result"] = std::move(result);
    report["checks"] = checks.rows;
    report["timings"] = json{{"total_ms", now_ms() - t0}};
    emit(cfg, report);
    return {std::move(report), checks.all_pass ? 0 : 1};
}

namespace {

PeriodSignal random_period(Rng& rng, const DiscountConfig& d, int m, int dim) {
    std::vector<double> vals(static_cast<size_t>(m) * dim);
    for (auto& v : vals) v = rng.uniform(-1.0, 1.0);
    return PeriodSignal(d, m, dim, std::move(vals));
}

Signal random_signal(Rng& rng, const Grid& g, int dim, TailPolicy tail) {
    std::vector<double> vals(static_cast<size_t>(g.num_nodes()) * dim);
    for (auto& v : vals) v = rng.uniform(-1.0, 1.0);
    return Signal(g, dim, std::move(vals), tail);
}

}  // namespace

CommandResult cmd_verify(const RunConfig& cfg) {
    const double t0 = now_ms();
    const DiscountConfig d = cfg.discount();
    const int m = cfg.m;
    const int K = cfg.K > 0 ? cfg.K : 6;
    const double dt = d.T / m;
    const Grid grid = make_grid(d, m, K);
    const int n_sig = std::max(1, cfg.verify_signals);

    json report = report_skeleton("verify", cfg);
    Checks checks;

    {  // tiled-extension norm identity
        Rng rng(cfg.seed + 1);
        double worst = 0.0;
        json witness;
        for (int i = 0; i < n_sig; ++i) {
            const PeriodSignal p = random_period(rng, d, m, 1 + i % 2);
            const Signal lift = periodic_extend(p, K);
            for (double a : {1.0, 2.0}) {
                const double lhs = weighted_lp_norm(lift, NormOrder(a), TailPolicy::ExactPeriodic);
                const double rhs =
                    std::pow(1.0 / (1.0 - d.q()), 1.0 / a) * weighted_lp_norm(p, NormOrder(a));
                const double rel = std::abs(lhs - rhs) / std::max(rhs, 1e-30);
                if (rel > worst) {
                    worst = rel;
                    witness = json{{"signal", i}, {"alpha", a}, {"lhs", lhs}, {"rhs", rhs}};
                }
            }
        }
        checks.add("extension-norm-identity", worst < 10.0 * dt, worst, 10.0 * dt, witness);
    }

    {  // averaging operator bound
        Rng rng(cfg.seed + 2);
        double worst = 0.0;
        bool all_ok = true;
        json witness;
        for (int i = 0; i < n_sig; ++i) {
            const Signal s = random_signal(rng, grid, 1 + i % 2,
                                           i % 2 ? TailPolicy::ExactPeriodic
                                                 : TailPolicy::ZeroExtend);
            for (double a : {1.0, 2.0, 3.0}) {
                const OperatorNormReport rep = operator_norm_check(s, NormOrder(a));
                const double ratio = rep.rhs > 0.0 ? rep.lhs / (rep.rhs * (1.0 + rep.slack)) : 0.0;
                if (!rep.ok) {
                    all_ok = false;
                    witness = json{{"signal", i}, {"alpha", a}, {"lhs", rep.lhs}, {"rhs", rep.rhs}};
                }
                worst = std::max(worst, ratio);
            }
        }
        checks.add("averaging-bound", all_ok, worst, 1.0, witness);
    }

    {  // projection: idempotence, Pythagoras, residual orthogonality
        Rng rng(cfg.seed + 3);
        double worst_idem = 0.0, worst_pyth = 0.0, worst_orth = 0.0;
        for (int i = 0; i < n_sig; ++i) {
            const Signal x = random_signal(rng, grid, 1, TailPolicy::ExactPeriodic);
            const PeriodicProjection proj = project_periodic(x);
            const PeriodicProjection again = project_periodic(proj.lifted);
            for (size_t j = 0; j < proj.lifted.values.size(); ++j)
                worst_idem = std::max(worst_idem, std::abs(proj.lifted.values[j] -
                                                           again.lifted.values[j]));

            std::vector<double> rv(x.values.size());
            for (size_t j = 0; j < rv.size(); ++j) rv[j] = x.values[j] - proj.lifted.values[j];
            const Signal residual(x.grid, 1, std::move(rv), TailPolicy::ExactPeriodic);

            const double nx = weighted_lp_norm(x, NormOrder(2.0));
            const double np = weighted_lp_norm(proj.lifted, NormOrder(2.0));
            const double nr = weighted_lp_norm(residual, NormOrder(2.0));
            worst_pyth = std::max(
                worst_pyth, std::abs(nx * nx - np * np - nr * nr) / std::max(nx * nx, 1e-30));
            worst_orth = std::max(worst_orth, orthogonality_residual(residual));
        }
        checks.add("projection-idempotence", worst_idem <= 1e-14, worst_idem, 1e-14);
        checks.add("projection-pythagoras", worst_pyth < 10.0 * dt, worst_pyth, 10.0 * dt);
        checks.add("orthogonality-residual", worst_orth < 1e-10, worst_orth, 1e-10);
    }

    {  // decomposition against the brute-force oracle + analytic fixtures
        Rng rng(cfg.seed + 4);
        double worst = 0.0;
        const int runs = std::min(n_sig, 10);
        for (int i = 0; i < runs; ++i) {
            const int dim = 1 + i % 2;
            const Grid gsmall = make_grid(d, std::min(m, 16), std::max(2, K));
            const Signal x = random_signal(rng, gsmall, dim,
                                           i % 2 ? TailPolicy::ExactPeriodic
                                                 : TailPolicy::ZeroExtend);
            const Decomposition a = decompose(x);
            const Decomposition b = decompose_oracle(x);
            for (size_t j = 0; j < a.p_hat.values.size(); ++j)
                worst = std::max(worst, std::abs(a.p_hat.values[j] - b.p_hat.values[j]));
            for (int c = 0; c < dim; ++c)
                worst = std::max(worst, std::abs(a.a_hat[c] - b.a_hat[c]));
        }
        checks.add("decomposition-oracle-agreement", worst < 1e-6, worst, 1e-6);

        const Grid gfix = make_grid(d, m, std::max(2, K));
        const Signal ramp = Signal::from_scalar_function(gfix, [](double t) { return t; });
        const double a_ramp = decompose(ramp).a_hat[0];
        const Signal flat = Signal::from_scalar_function(gfix, [](double) { return 0.75; });
        const double a_flat = decompose(flat).a_hat[0];
        const double fix_err = std::max(std::abs(a_ramp - 1.0), std::abs(a_flat));
        checks.add("decomposition-fixtures", fix_err < 1e-8, fix_err, 1e-8,
                   json{{"a_ramp", a_ramp}, {"a_flat", a_flat}});
    }

    {  // reduction identity for three integrand families
        Rng rng(cfg.seed + 5);
        double worst = 0.0;
        json witness;
        const AveragingParams params(d, cfg.tol, cfg.max_terms);
        const Lagrangian Ls[3] = {make_dirichlet(1), make_tracking(1, d.T, {}),
                                  make_modulated(1, {})};
        for (const Lagrangian& L : Ls) {
            for (int i = 0; i < 5; ++i) {
                const double eta = rng.uniform(-1.0, 1.0);
                const double a1 = rng.uniform(-1.0, 1.0);
                const double a2 = rng.uniform(-1.0, 1.0);
                Trajectory u(d, m, {eta});
                for (int j = 1; j < m; ++j) {
                    const double s = u.time(j);
                    const double w = 2.0 * std::numbers::pi * s / d.T;
                    u.at(j) = eta + a1 * std::sin(w) + a2 * (1.0 - std::cos(w));
                }
                const FiniteHorizonProblem prob =
                    reduce_problem(L, d, {eta}, params, true);
                const double reduced = reduced_objective(prob, u);
                const double infinite = objective_value(lift_solution(u, K), L, params);
                const double rel =
                    std::abs(infinite - reduced) / std::max(std::abs(infinite), 1e-30);
                if (rel > worst) {
                    worst = rel;
                    witness = json{{"lagrangian", L.name}, {"run", i}};
                }
            }
        }
        checks.add("reduction-identity", worst < 10.0 * dt, worst, 10.0 * dt, witness);
    }

    {  // averaged gradient against finite differences of the averaged value
        Rng rng(cfg.seed + 6);
        const AveragingParams tight(d, 1e-13, cfg.max_terms);
        const AveragedLagrangian AL(make_modulated(1, {}), tight);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double s = rng.uniform(0.0, d.T);
            const std::vector<double> x{rng.uniform(-2.0, 2.0)};
            const std::vector<double> y{rng.uniform(-2.0, 2.0)};
            double ds;
            std::vector<double> dx(1), dy(1);
            AL.grad(s, x, y, ds, dx, dy);
            const double hx = 1e-5 * std::max(1.0, std::abs(x[0]));
            const std::vector<double> xp{x[0] + hx}, xm{x[0] - hx};
            const double fd_x = (AL.value(s, xp, y) - AL.value(s, xm, y)) / (2.0 * hx);
            const double hy = 1e-5 * std::max(1.0, std::abs(y[0]));
            const std::vector<double> yp{y[0] + hy}, ym{y[0] - hy};
            const double fd_y = (AL.value(s, x, yp) - AL.value(s, x, ym)) / (2.0 * hy);
            worst = std::max(worst, std::abs(dx[0] - fd_x) /
                                        std::max({1.0, std::abs(dx[0]), std::abs(fd_x)}));
            worst = std::max(worst, std::abs(dy[0] - fd_y) /
                                        std::max({1.0, std::abs(dy[0]), std::abs(fd_y)}));
        }
        checks.add("gradient-pass-through", worst < 1e-5, worst, 1e-5);
    }

    {  // the constant trajectory solves the Dirichlet problem
        const AveragingParams params(d, cfg.tol, cfg.max_terms);
        const FiniteHorizonProblem prob =
            reduce_problem(make_dirichlet(1), d, {1.0}, params, true);
        const SolveResult res = solve_finite_horizon(prob, m, {});
        double drift = 0.0;
        for (int j = 0; j <= m; ++j) drift = std::max(drift, std::abs(res.trajectory.at(j) - 1.0));
        checks.add("solver-dirichlet", std::abs(res.objective) <= 1e-10 && drift == 0.0,
                   std::max(std::abs(res.objective), drift), 1e-10);
    }

    report["result"] = json{{"checks_run", checks.rows.size()}};
    report["checks"] = checks.rows;
    report["timings"] = json{{"total_ms", now_ms() - t0}};
    emit(cfg, report);
    return {std::move(report), checks.all_pass ? 0 : 1};
}

}  // namespace perhor::cli

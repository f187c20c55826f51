#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "perhor/decomposition.hpp"
#include "perhor/variational.hpp"

namespace perhor::cli {

/// Raised for malformed configuration or input files; the driver maps it
/// to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Everything a command run needs, loadable from an INI-style config
/// file with command-line overrides. Numeric constraints of the owning
/// modules are re-validated when the config is turned into domain
/// objects.
struct RunConfig {
    double r = 1.0;
    double T = 1.0;
    int m = 16;
    int K = 0;  ///< 0 = derive from the input row count
    double alpha = 2.0;
    std::string tail = "zero";  ///< "zero" | "periodic"
    std::string lagrangian = "dirichlet";
    std::vector<double> eta = {1.0};
    bool oracle = false;
    unsigned long long seed = 42;
    std::string input;
    std::string out;  ///< report path; empty = stdout

    double tol = 1e-10;
    long max_terms = 1000000;

    int max_iters = 2000;
    double grad_tol = 1e-9;
    int multistart = 1;
    bool unweighted_objective = false;
    double el_tol = 0.0;  ///< >0 asserts the Euler-Lagrange residual bound

    double amp_cos = 1.0;
    double amp_sin = 0.0;
    double offset = 0.0;
    double kappa = 1.0;

    int verify_signals = 25;

    DiscountConfig discount() const { return DiscountConfig(r, T); }
    TailPolicy tail_policy() const;
    AveragingParams averaging() const { return AveragingParams(discount(), tol, max_terms); }
};

struct CommandResult {
    nlohmann::json report;
    int exit_code = 0;  ///< 0 ok, 1 check failure (2 = config error, via ConfigError)
};

/// Reads `t,x1..xn` CSV onto the configured grid. Rejects missing or bad
/// headers, non-numeric or non-finite entries, non-uniform or shifted
/// time columns (relative deviation > 1e-9), and row counts that do not
/// match m (and K, when pinned); every rejection names the line.
Signal ingest_csv(const std::string& path, const RunConfig& cfg);

/// 17-significant-digit CSV writers (doubles round-trip exactly).
void write_period_csv(const std::string& path, const PeriodSignal& p);
void write_trajectory_csv(const std::string& path, const Trajectory& u);

CommandResult cmd_decompose(const RunConfig& cfg);
CommandResult cmd_project(const RunConfig& cfg);
CommandResult cmd_solve(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);

/// Report payload with the volatile fields (timings) stripped; two runs
/// with the same config and seed produce identical strings.
std::string stable_payload(const nlohmann::json& report);

}  // namespace perhor::cli

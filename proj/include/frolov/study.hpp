#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "frolov/frolov_matrix.hpp"
#include "frolov/integrands.hpp"

namespace frolov {

enum class Method { frolov_det, frolov_rand, frolov_rand_transformed, mc };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

/// Plain Monte Carlo: (1/n) sum f(X_i), X_i iid uniform on [0,1]^d from the
/// stream keyed on (seed, replicate).
double mc_baseline(const Integrand& f, std::int64_t n, std::uint64_t seed,
                   std::uint64_t replicate = 0);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares on (log n, log err). Points with err <= 0 are ignored;
/// throws DomainError if fewer than 3 remain.
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

struct BudgetResult {
    std::int64_t budget = 0;
    double a = 0.0;  // dilation used (0 for mc)
    double nodes_mean = 0.0;
    double mean_abs_error = 0.0;
    double stderr_of_error = 0.0;
    double estimate_mean = 0.0;
    double max_abs_error = 0.0;  // worst of the K sampled realizations
};

struct ConvergenceReport {
    Method method = Method::mc;
    std::string integrand;
    int dim = 0;
    Construction construction = Construction::general_poly;
    int replications = 1;
    std::uint64_t seed = 0;
    bool pinned_draw = false;
    std::vector<BudgetResult> rows;
    SlopeFit fit;
    bool slope_available = false;
    double resolution_floor = 0.0;  // errors at or below this are left out of the fit
};

/// Multiple of eps * |I| under which a mean error counts as zero for fitting.
inline constexpr double kResolutionUlps = 8.0;

struct StudyConfig {
    Method method = Method::mc;
    std::vector<std::int64_t> budgets;  // strictly increasing
    int replications = 1;               // ignored for frolov_det
    std::uint64_t seed = 0;
    int workers = 1;
    bool pin_draw = false;  // u = 1, v = 0 for the randomized Frolov methods
};

/// Error statistics of `method` on f at each budget. Frolov budgets are
/// mapped to a dilation with choose_a_for_budget; randomized methods report
/// the mean absolute error over the replications, frolov_det the single
/// deterministic error. The slope is fitted over budgets whose error exceeds
/// kResolutionUlps * eps * |I| and is omitted if fewer than 3 remain.
ConvergenceReport run_convergence(const StudyConfig& config, const Integrand& f,
                                  const FrolovMatrix& b);

inline constexpr std::string_view kStudyCsvHeader =
    "method,integrand,d,n_budget,n_nodes_mean,mean_abs_error,stderr,estimate_mean,seed";

void write_csv(const ConvergenceReport& report, std::ostream& out, bool header = true);
nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace frolov

#include "frolov/study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "frolov/compensated_sum.hpp"
#include "frolov/counter_rng.hpp"
#include "frolov/error.hpp"
#include "frolov/randomized.hpp"
#include "frolov/transform.hpp"

namespace frolov {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::frolov_det: return "frolov_det";
        case Method::frolov_rand: return "frolov_rand";
        case Method::frolov_rand_transformed: return "frolov_rand_transformed";
        case Method::mc: return "mc";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    for (Method m : {Method::frolov_det, Method::frolov_rand, Method::frolov_rand_transformed,
                     Method::mc}) {
        if (name == to_string(m)) return m;
    }
    throw DomainError("unknown method '" + std::string(name) + "'");
}

double mc_baseline(const Integrand& f, std::int64_t n, std::uint64_t seed,
                   std::uint64_t replicate) {
    if (n < 1) throw DomainError("mc_baseline: n must be >= 1");
    CounterRng rng(seed, stream_id::monte_carlo, replicate);
    std::vector<double> x(f.dim);
    CompensatedSum acc;
    for (std::int64_t i = 0; i < n; ++i) {
        for (double& xj : x) xj = rng.uniform();
        acc.add(f.eval(x));
    }
    return acc.value() / static_cast<double>(n);
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& [n, err] : points) {
        if (n > 0.0 && err > 0.0 && std::isfinite(err)) logs.emplace_back(std::log(n), std::log(err));
    }
    if (logs.size() < 3) throw DomainError("fit_slope: need at least 3 points with positive error");
    const double k = static_cast<double>(logs.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : logs) {
        mx += x;
        my += y;
    }
    mx /= k;
    my /= k;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_slope: budgets must not all coincide");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

namespace {

Estimate single_estimate(Method method, bool pin_draw, double a, const FrolovMatrix& b,
                         const Integrand& f, std::int64_t budget, std::uint64_t seed,
                         std::uint64_t k) {
    const auto realization = [&] { return pin_draw ? deterministic_draw(f.dim) : draw(seed, k, f.dim); };
    switch (method) {
        case Method::frolov_det: return m_estimate(a, b, f, deterministic_draw(f.dim));
        case Method::frolov_rand: return m_estimate(a, b, f, realization());
        case Method::frolov_rand_transformed: return transformed_estimate(a, b, f, realization());
        case Method::mc: return {mc_baseline(f, budget, seed, k), budget};
    }
    throw DomainError("unhandled method");
}

}  // namespace

ConvergenceReport run_convergence(const StudyConfig& config, const Integrand& f,
                                  const FrolovMatrix& b) {
    if (config.budgets.empty()) throw DomainError("run_convergence: budget list is empty");
    for (std::size_t i = 0; i < config.budgets.size(); ++i) {
        if (config.budgets[i] < 1 || (i > 0 && config.budgets[i] <= config.budgets[i - 1])) {
            throw DomainError("run_convergence: budgets must be positive and strictly increasing");
        }
    }
    if (config.replications < 1) throw DomainError("run_convergence: K must be >= 1");
    if (config.method != Method::mc && b.dim != f.dim) {
        throw DomainError("run_convergence: integrand and matrix dimensions differ");
    }

    if (config.pin_draw && config.method == Method::mc) {
        throw DomainError("run_convergence: a pinned draw has no meaning for Monte Carlo");
    }
    const bool deterministic = config.method == Method::frolov_det || config.pin_draw;
    const int k = deterministic ? 1 : config.replications;

    ConvergenceReport report;
    report.method = config.method;
    report.integrand = f.name;
    report.dim = f.dim;
    report.construction = b.construction;
    report.replications = k;
    report.seed = config.seed;
    report.pinned_draw = config.pin_draw || config.method == Method::frolov_det;

    std::vector<std::pair<double, double>> points;
    for (std::int64_t n : config.budgets) {
        BudgetResult row;
        row.budget = n;
        row.a = config.method == Method::mc ? 0.0 : choose_a_for_budget(n, b);
        const SingleDrawEstimator estimator = [&](std::uint64_t seed, std::uint64_t rep) {
            return single_estimate(config.method, config.pin_draw, row.a, b, f, n, seed, rep);
        };

        std::vector<double> estimates;
        std::vector<std::int64_t> counts;
        if (k == 1) {
            const Estimate e = estimator(config.seed, 0);
            estimates = {e.value};
            counts = {e.node_count};
        } else {
            auto batch = replicate(estimator, k, config.seed, std::string(to_string(config.method)),
                                   config.workers);
            estimates = std::move(batch.estimates);
            counts = std::move(batch.node_counts);
        }

        std::vector<double> abs_errors(estimates.size());
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            abs_errors[i] = std::abs(estimates[i] - f.exact_integral);
        }
        const auto kd = static_cast<double>(estimates.size());
        row.estimate_mean = compensated_total(estimates) / kd;
        row.mean_abs_error = compensated_total(abs_errors) / kd;
        row.max_abs_error = *std::max_element(abs_errors.begin(), abs_errors.end());
        double node_total = 0.0;
        for (auto c : counts) node_total += static_cast<double>(c);
        row.nodes_mean = node_total / kd;
        if (estimates.size() > 1) {
            CompensatedSum sq;
            for (double e : abs_errors) sq.add((e - row.mean_abs_error) * (e - row.mean_abs_error));
            row.stderr_of_error = std::sqrt(sq.value() / (kd - 1.0) / kd);
        }
        points.emplace_back(static_cast<double>(n), row.mean_abs_error);
        report.rows.push_back(row);
    }

    // Errors at or below the double-precision resolution of the integral are
    // indistinguishable from zero and carry no rate information.
    report.resolution_floor = kResolutionUlps * std::numeric_limits<double>::epsilon() *
                              std::abs(f.exact_integral);
    std::erase_if(points, [&](const auto& p) { return !(p.second > report.resolution_floor); });
    if (points.size() >= 3) {
        report.fit = fit_slope(points);
        report.slope_available = true;
    }
    return report;
}

namespace {

std::string format_double(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

}  // namespace

void write_csv(const ConvergenceReport& report, std::ostream& out, bool header) {
    if (header) out << kStudyCsvHeader << '\n';
    for (const auto& row : report.rows) {
        out << to_string(report.method) << ',' << report.integrand << ',' << report.dim << ','
            << row.budget << ',' << format_double(row.nodes_mean) << ','
            << format_double(row.mean_abs_error) << ',' << format_double(row.stderr_of_error)
            << ',' << format_double(row.estimate_mean) << ',' << report.seed << '\n';
    }
}

nlohmann::json to_json(const ConvergenceReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"n_budget", row.budget},
                        {"a", row.a},
                        {"n_nodes_mean", row.nodes_mean},
                        {"mean_abs_error", row.mean_abs_error},
                        {"stderr", row.stderr_of_error},
                        {"estimate_mean", row.estimate_mean},
                        {"max_abs_error_sampled", row.max_abs_error}});
    }
    nlohmann::json fit = nullptr;
    if (report.slope_available) {
        fit = {{"slope", report.fit.slope}, {"intercept", report.fit.intercept}, {"r2", report.fit.r2}};
    }
    return {{"method", to_string(report.method)},
            {"integrand", report.integrand},
            {"d", report.dim},
            {"construction", to_string(report.construction)},
            {"K", report.replications},
            {"seed", report.seed},
            {"pinned_draw", report.pinned_draw},
            {"fit_resolution_floor", report.resolution_floor},
            {"rows", std::move(rows)},
            {"fit", std::move(fit)}};
}

}  // namespace frolov

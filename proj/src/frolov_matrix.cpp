#include "frolov/frolov_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "frolov/counter_rng.hpp"
#include "frolov/error.hpp"
#include "frolov/lattice_rule.hpp"

namespace frolov {

std::string_view to_string(Construction c) {
    switch (c) {
        case Construction::general_poly: return "general_poly";
        case Construction::chebyshev: return "chebyshev";
    }
    return "unknown";
}

Construction construction_from_string(std::string_view name) {
    if (name == "general_poly" || name == "general") return Construction::general_poly;
    if (name == "chebyshev") return Construction::chebyshev;
    throw DomainError("unknown construction '" + std::string(name) +
                      "' (expected general or chebyshev)");
}

double matrix_one_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

FrolovMatrix make_frolov_matrix(std::vector<double> roots, Construction construction) {
    const int d = static_cast<int>(roots.size());
    if (d < 1) throw DomainError("make_frolov_matrix: need at least one root");
    for (int i = 0; i < d; ++i) {
        for (int k = i + 1; k < d; ++k) {
            if (!(std::abs(roots[i] - roots[k]) > 1e-8)) {
                throw DomainError("make_frolov_matrix: roots are not pairwise distinct");
            }
        }
    }

    FrolovMatrix b;
    b.dim = d;
    b.construction = construction;
    b.entries.resize(d, d);
    for (int i = 0; i < d; ++i) {
        double power = 1.0;
        for (int j = 0; j < d; ++j) {
            b.entries(i, j) = power;
            power *= roots[i];
        }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(b.entries);
    b.abs_det = std::abs(lu.determinant());
    if (!(b.abs_det > 0.0)) throw NumericalError("make_frolov_matrix: singular Vandermonde matrix");
    b.inv_transpose = lu.inverse().transpose();
    b.one_norm = matrix_one_norm(b.entries);
    b.roots = std::move(roots);
    return b;
}

double general_poly_value(int d, double x) {
    double prod = 1.0;
    for (int k = 1; k <= d; ++k) prod *= x - (2.0 * k - 1.0);
    return prod - 1.0;
}

double general_poly_derivative(int d, double x) {
    double sum = 0.0;
    for (int k = 1; k <= d; ++k) {
        double prod = 1.0;
        for (int i = 1; i <= d; ++i) {
            if (i != k) prod *= x - (2.0 * i - 1.0);
        }
        sum += prod;
    }
    return sum;
}

std::vector<double> general_poly_roots(int d) {
    if (d < 1 || d > kMaxFrolovDim) {
        throw DomainError("general polynomial construction supports 1 <= d <= " +
                          std::to_string(kMaxFrolovDim) + ", got " + std::to_string(d));
    }
    const auto p = [d](double x) { return general_poly_value(d, x); };

    // Sign-change scan over [-2, 2d + 1]; all roots lie within one unit of
    // the odd integers 1, 3, ..., 2d - 1, and the largest is at most 2d.
    constexpr double kStep = 0.01;
    const int steps = static_cast<int>(std::lround((2.0 * d + 3.0) / kStep));
    std::vector<double> roots;
    double x_prev = -2.0;
    double p_prev = p(x_prev);
    for (int i = 1; i <= steps; ++i) {
        const double x = -2.0 + i * kStep;
        const double px = p(x);
        if (p_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (px != 0.0 && std::signbit(px) != std::signbit(p_prev)) {
            double lo = x_prev;
            double hi = x;
            const bool lo_negative = p_prev < 0.0;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                const double pm = p(mid);
                if (pm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((pm < 0.0) == lo_negative) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            double root = 0.5 * (lo + hi);
            for (int polish = 0; polish < 2; ++polish) {
                const double dp = general_poly_derivative(d, root);
                if (dp == 0.0) break;
                const double next = root - p(root) / dp;
                // Newton must stay in the (slightly widened) bracket.
                if (!(next >= lo - 1e-12 && next <= hi + 1e-12)) {
                    throw NumericalError("general_poly_roots: Newton polish left the bracket");
                }
                root = next;
            }
            roots.push_back(root);
        }
        x_prev = x;
        p_prev = px;
    }
    if (static_cast<int>(roots.size()) != d) {
        throw NumericalError("general_poly_roots: found " + std::to_string(roots.size()) +
                             " roots for degree " + std::to_string(d));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

FrolovMatrix build_general_poly_matrix(int d) {
    return make_frolov_matrix(general_poly_roots(d), Construction::general_poly);
}

FrolovMatrix build_chebyshev_matrix(int d) {
    if (d < 1 || d > kMaxFrolovDim || (d & (d - 1)) != 0) {
        throw DomainError("Chebyshev construction needs d a power of two in [1, " +
                          std::to_string(kMaxFrolovDim) + "], got " + std::to_string(d));
    }
    std::vector<double> roots(d);
    for (int j = 1; j <= d; ++j) {
        const int numerator = 2 * j - 1;
        // cos(pi/2) is not exactly zero in floating point.
        roots[j - 1] = numerator == d ? 0.0 : 2.0 * std::cos(numerator * std::numbers::pi / (2.0 * d));
    }
    return make_frolov_matrix(std::move(roots), Construction::chebyshev);
}

FrolovMatrix build_frolov_matrix(Construction construction, int d) {
    return construction == Construction::chebyshev ? build_chebyshev_matrix(d)
                                                   : build_general_poly_matrix(d);
}

LatticePropertyReport verify_property_b(const Eigen::MatrixXd& generator, int radius, double tol) {
    if (radius < 1) throw DomainError("verify_property_b: radius must be >= 1");
    const int d = static_cast<int>(generator.rows());
    LatticePropertyReport report;
    report.radius = radius;
    report.min_abs_product = std::numeric_limits<double>::infinity();
    report.max_count_excess = std::numeric_limits<double>::quiet_NaN();

    std::vector<int> m(d, -radius);
    Eigen::VectorXd y(d);
    for (;;) {
        bool zero = true;
        for (int i = 0; i < d; ++i) zero = zero && m[i] == 0;
        if (!zero) {
            y.setZero();
            for (int k = 0; k < d; ++k) {
                if (m[k] != 0) y += static_cast<double>(m[k]) * generator.col(k);
            }
            double prod = 1.0;
            for (int i = 0; i < d; ++i) prod *= y[i];
            report.min_abs_product = std::min(report.min_abs_product, std::abs(prod));
            ++report.points_searched;
        }
        int i = d - 1;
        while (i >= 0 && m[i] == radius) {
            m[i] = -radius;
            --i;
        }
        if (i < 0) break;
        ++m[i];
    }
    report.passed = report.min_abs_product >= 1.0 - tol;
    return report;
}

std::int64_t count_lattice_points_in_box(const Eigen::MatrixXd& generator,
                                         const std::vector<double>& lower,
                                         const std::vector<double>& upper) {
    // B m = S^-T m with S = B^-T.
    const Eigen::MatrixXd s = generator.inverse().transpose();
    const std::vector<double> zero(generator.rows(), 0.0);
    return static_cast<std::int64_t>(enumerate_nodes(s, zero, SupportBox{lower, upper}).size());
}

LatticePropertyReport verify_property_c(const Eigen::MatrixXd& generator, int trials,
                                        std::uint64_t rng_seed) {
    if (trials < 1) throw DomainError("verify_property_c: trials must be >= 1");
    const int d = static_cast<int>(generator.rows());
    LatticePropertyReport report;
    report.box_trials = trials;
    report.min_abs_product = std::numeric_limits<double>::quiet_NaN();
    report.max_count_excess = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        CounterRng rng(rng_seed, stream_id::property_c, static_cast<std::uint64_t>(t));
        std::vector<double> lower(d);
        std::vector<double> upper(d);
        double volume = 1.0;
        for (int j = 0; j < d; ++j) {
            lower[j] = rng.uniform(-50.0, 50.0);
            const double edge = rng.uniform(0.1, 20.0);
            upper[j] = lower[j] + edge;
            volume *= edge;
        }
        const auto count = count_lattice_points_in_box(generator, lower, upper);
        report.max_count_excess =
            std::max(report.max_count_excess, static_cast<double>(count) - volume);
        report.points_searched += count;
    }
    report.passed = report.max_count_excess <= 1.0 + 1e-9;
    return report;
}

nlohmann::json to_json(const FrolovMatrix& matrix) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < matrix.dim; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < matrix.dim; ++j) row.push_back(matrix.entries(i, j));
        entries.push_back(std::move(row));
    }
    return {{"dim", matrix.dim},
            {"roots", matrix.roots},
            {"entries", std::move(entries)},
            {"construction", to_string(matrix.construction)},
            {"abs_det", matrix.abs_det},
            {"one_norm", matrix.one_norm}};
}

nlohmann::json to_json(const LatticePropertyReport& report) {
    nlohmann::json j{{"radius", report.radius},
                     {"points_searched", report.points_searched},
                     {"box_trials", report.box_trials},
                     {"passed", report.passed}};
    j["min_abs_product"] = std::isfinite(report.min_abs_product)
                               ? nlohmann::json(report.min_abs_product)
                               : nlohmann::json(nullptr);
    j["max_count_excess"] = std::isfinite(report.max_count_excess)
                                ? nlohmann::json(report.max_count_excess)
                                : nlohmann::json(nullptr);
    return j;
}

}  // namespace frolov

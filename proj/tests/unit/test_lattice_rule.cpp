#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "frolov/compensated_sum.hpp"
#include "frolov/counter_rng.hpp"
#include "frolov/error.hpp"
#include "frolov/frolov_matrix.hpp"
#include "frolov/integrands.hpp"
#include "frolov/lattice_rule.hpp"

using namespace frolov;

namespace {

Eigen::MatrixXd scalar_matrix(double s) { return Eigen::MatrixXd::Constant(1, 1, s); }

std::vector<double> node_points_1d(const NodeSet& nodes) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < nodes.size(); ++i) xs.push_back(nodes.point(i)[0]);
    return xs;
}

// Every m in [-w, w]^d whose node S^-T (m + v) lies in the box, computed with
// an explicit inverse rather than an LU solve.
std::set<std::vector<std::int64_t>> brute_force_indices(const Eigen::MatrixXd& s,
                                                        const std::vector<double>& v,
                                                        const SupportBox& box, int w) {
    const int d = static_cast<int>(s.rows());
    const Eigen::MatrixXd inv_t = s.inverse().transpose();
    std::set<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> m(d, -w);
    for (;;) {
        Eigen::VectorXd rhs(d);
        for (int i = 0; i < d; ++i) rhs[i] = static_cast<double>(m[i]) + v[i];
        const Eigen::VectorXd x = inv_t * rhs;
        if (box.contains({x.data(), static_cast<std::size_t>(d)}, kBoundarySlack)) out.insert(m);
        int i = d - 1;
        while (i >= 0 && m[i] == w) {
            m[i] = -w;
            --i;
        }
        if (i < 0) break;
        ++m[i];
    }
    return out;
}

std::set<std::vector<std::int64_t>> indices_of(const NodeSet& nodes) {
    std::set<std::vector<std::int64_t>> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto idx = nodes.index(i);
        out.emplace(idx.begin(), idx.end());
    }
    return out;
}

}  // namespace

TEST_CASE("1-d grid S = [4], v = 0 includes both endpoints") {
    const std::vector<double> v{0.0};
    const auto nodes = enumerate_nodes(scalar_matrix(4.0), v, SupportBox::unit_cube(1));
    CHECK(node_points_1d(nodes) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(nodes.m == std::vector<std::int64_t>{0, 1, 2, 3, 4});
    CHECK(nodes.weight == 0.25);
}

TEST_CASE("1-d grid S = [4], v = 1/2 is the midpoint grid") {
    const std::vector<double> v{0.5};
    const auto nodes = enumerate_nodes(scalar_matrix(4.0), v, SupportBox::unit_cube(1));
    CHECK(node_points_1d(nodes) == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    CHECK(nodes.m == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("S = 3B in d = 2 matches a brute-force scan and the node-count bound") {
    const auto b = build_general_poly_matrix(2);
    const Eigen::MatrixXd s = 3.0 * b.entries;
    const std::vector<double> v{0.0, 0.0};
    const auto box = SupportBox::unit_cube(2);
    const auto nodes = enumerate_nodes(s, v, box);
    CHECK(indices_of(nodes) == brute_force_indices(s, v, box, 60));
    const double bound = std::pow(matrix_one_norm(s) + 1.0, 2);
    CHECK(static_cast<double>(nodes.size()) <= bound);
    CHECK(nodes.weight * std::abs(s.determinant()) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(box.contains(nodes.point(i)));
}

TEST_CASE("enumeration agrees with brute force on random generators, shifts and boxes") {
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        CounterRng rng(2024, 7, trial);
        const int d = 1 + static_cast<int>(trial % 3);
        Eigen::MatrixXd s(d, d);
        do {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) s(i, j) = rng.uniform(-4.0, 4.0);
        } while (std::abs(s.determinant()) < 0.5);
        std::vector<double> v(d);
        SupportBox box{std::vector<double>(d), std::vector<double>(d)};
        for (int j = 0; j < d; ++j) {
            v[j] = rng.uniform();
            box.lower[j] = rng.uniform(-1.0, 1.0);
            box.upper[j] = box.lower[j] + rng.uniform(0.0, 2.0);
        }
        // |S^T x|_inf <= |S|_1 |x|_inf with |x|_inf <= 3 inside the box.
        const int w = static_cast<int>(std::ceil(3.0 * matrix_one_norm(s))) + 2;
        const auto nodes = enumerate_nodes(s, v, box);
        CAPTURE(trial);
        CHECK(indices_of(nodes) == brute_force_indices(s, v, box, w));
    }
}

TEST_CASE("node counts obey the (l |B|_1 + 1)^d a^d bound") {
    for (int d : {1, 2, 3}) {
        const auto b = build_general_poly_matrix(d);
        const std::vector<double> v(d, 0.0);
        for (double a : {1.0, 2.0, 5.0, 10.0}) {
            CAPTURE(d);
            CAPTURE(a);
            const auto nodes = enumerate_nodes(a * b.entries, v, SupportBox::unit_cube(d));
            CHECK(static_cast<double>(nodes.size()) <=
                  std::pow(b.one_norm + 1.0, d) * std::pow(a, d));
        }
    }
}

TEST_CASE("singular generators and oversized budgets are rejected") {
    const std::vector<double> v{0.0, 0.0};
    CHECK_THROWS_AS(enumerate_nodes(Eigen::MatrixXd::Zero(2, 2), v, SupportBox::unit_cube(2)),
                    NumericalError);
    EnumerationOptions small;
    small.candidate_cap = 10;
    CHECK_THROWS_AS(enumerate_nodes(100.0 * Eigen::MatrixXd::Identity(2, 2), v,
                                    SupportBox::unit_cube(2), small),
                    NumericalError);
    CHECK_THROWS_AS(enumerate_nodes(Eigen::MatrixXd::Identity(2, 2), v,
                                    SupportBox{{0.0, 1.0}, {1.0, 0.0}}),
                    DomainError);
}

TEST_CASE("apply_rule on x(1-x) with S = [2] sums to 1/8") {
    const std::vector<double> v{0.0};
    const auto nodes = enumerate_nodes(scalar_matrix(2.0), v, SupportBox::unit_cube(1));
    // Direct sum: (1/2) (f(0) + f(1/2) + f(1)) = (1/2)(0 + 1/4 + 0).
    const double q = apply_rule(nodes, [](std::span<const double> x) { return x[0] * (1.0 - x[0]); });
    CHECK(q == 0.125);
}

TEST_CASE("apply_rule on the zero function is zero") {
    const auto b = build_general_poly_matrix(2);
    const std::vector<double> v{0.3, 0.6};
    const auto nodes = enumerate_nodes(4.0 * b.entries, v, SupportBox::unit_cube(2));
    CHECK(apply_rule(nodes, [](std::span<const double>) { return 0.0; }) == 0.0);
}

TEST_CASE("S = [n], v = 1/2 is the midpoint rule, exact on x") {
    for (int n = 1; n <= 40; ++n) {
        const std::vector<double> v{0.5};
        const auto nodes = enumerate_nodes(scalar_matrix(n), v, SupportBox::unit_cube(1));
        CHECK(nodes.size() == static_cast<std::size_t>(n));
        CHECK(apply_rule(nodes, [](std::span<const double> x) { return x[0]; }) ==
              doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("S = [n] reproduces the shifted rectangle rule bit for bit") {
    const auto f = [](std::span<const double> x) { return std::exp(x[0]) * std::sin(3.0 * x[0]); };
    for (int n = 1; n <= 64; ++n) {
        for (std::uint64_t k = 0; k < 10; ++k) {
            CounterRng rng(5, 3, static_cast<std::uint64_t>(n) * 100 + k);
            const double v = rng.uniform();
            const std::vector<double> shift{v};
            const auto nodes = enumerate_nodes(scalar_matrix(n), shift, SupportBox::unit_cube(1));
            CompensatedSum ref;
            for (int m = 0; m <= n; ++m) {
                const double x = (m + v) / n;
                if (x <= 1.0) ref.add(f(std::span<const double>(&x, 1)));
            }
            CHECK(apply_rule(nodes, f) == (1.0 / n) * ref.value());
        }
    }
}

TEST_CASE("apply_rule is linear in the integrand") {
    const auto b = build_general_poly_matrix(3);
    for (std::uint64_t t = 0; t < 20; ++t) {
        CounterRng rng(17, 1, t);
        const std::vector<double> v{rng.uniform(), rng.uniform(), rng.uniform()};
        const auto nodes = enumerate_nodes(3.0 * b.entries, v, SupportBox::unit_cube(3));
        const double alpha = rng.uniform(-3.0, 3.0);
        const double beta = rng.uniform(-3.0, 3.0);
        const double c = rng.uniform(1.0, 5.0);
        const ScalarField f = [c](std::span<const double> x) { return std::cos(c * x[0]) * x[1] + x[2]; };
        const ScalarField g = [c](std::span<const double> x) { return std::exp(-c * x[0] * x[1] * x[2]); };
        const double combined = apply_rule(nodes, [&](std::span<const double> x) {
            return alpha * f(x) + beta * g(x);
        });
        CHECK(std::abs(combined - (alpha * apply_rule(nodes, f) + beta * apply_rule(nodes, g))) <= 1e-12);
    }
}

TEST_CASE("Fourier bound of the zero transform is zero and grows with truncation") {
    const auto b = build_general_poly_matrix(2);
    CHECK(fourier_error_bound(2.0 * b.entries, [](std::span<const double>) { return 0.0; }, 5) == 0.0);
    const auto tri = corpus_integrand("triangle", 2);
    double previous = 0.0;
    for (int m : {1, 2, 4, 8, 16, 32}) {
        const double bound = fourier_error_bound(2.0 * b.entries, *tri.fourier_abs, m);
        CHECK(bound >= previous);
        previous = bound;
    }
    CHECK_THROWS_AS(fourier_error_bound(b.entries, *tri.fourier_abs, 0), DomainError);
}

TEST_CASE("1-d triangle error is below the truncated Fourier bound plus its tail") {
    const auto tri = corpus_integrand("triangle", 1);
    const double s = 10.0;
    const int truncation = 500;
    const std::vector<double> v{0.0};
    const auto nodes = enumerate_nodes(scalar_matrix(s), v, tri.support);
    const double error = std::abs(apply_rule(nodes, tri.eval) - tri.exact_integral);
    const double bound = fourier_error_bound(scalar_matrix(s), *tri.fourier_abs, truncation);
    // sum_{|m| > M} 2 / (pi^2 s^2 m^2) <= 4 / (pi^2 s^2 M)
    const double tail = 4.0 / (std::numbers::pi * std::numbers::pi * s * s * truncation);
    CHECK(std::isfinite(bound));
    CHECK(error <= bound + tail);
    // The dyadic tail bound covers the same region.
    const double dyadic = separable_fourier_tail_bound(s, Eigen::MatrixXd::Identity(1, 1), truncation,
                                                       triangle_fourier_envelope);
    CHECK(dyadic >= 0.0);
    CHECK(error <= bound + dyadic);
}

TEST_CASE("dyadic tail bound dominates a long explicit tail sum") {
    const auto b = build_general_poly_matrix(2);
    const auto tri = corpus_integrand("triangle", 2);
    const double a = 2.0;
    const int inner = 5;
    const int outer = 200;
    const Eigen::MatrixXd s = a * b.entries;
    const double explicit_tail =
        fourier_error_bound(s, *tri.fourier_abs, outer) - fourier_error_bound(s, *tri.fourier_abs, inner);
    const double bound = separable_fourier_tail_bound(a, b.entries, inner, triangle_fourier_envelope);
    CHECK(explicit_tail <= bound);
    CHECK(bound < 1.0);
}

TEST_CASE("node CSV has m and x columns") {
    const std::vector<double> v{0.5, 0.5};
    const auto nodes = enumerate_nodes(2.0 * Eigen::MatrixXd::Identity(2, 2), v, SupportBox::unit_cube(2));
    std::ostringstream out;
    write_csv(nodes, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "m_1,m_2,x_1,x_2");
    std::string row;
    std::getline(in, row);
    CHECK(row == "0,0,0.25,0.25");
    int rows = 1;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == 4);
}

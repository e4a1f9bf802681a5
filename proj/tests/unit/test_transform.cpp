#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "frolov/counter_rng.hpp"
#include "frolov/error.hpp"
#include "frolov/frolov_matrix.hpp"
#include "frolov/integrands.hpp"
#include "frolov/randomized.hpp"
#include "frolov/transform.hpp"

using namespace frolov;

namespace {

// Independent psi: adaptive quadrature of h from 0 to x over the adaptive
// quadrature of h from 0 to 1.
double psi_by_quadrature(double x) {
    boost::math::quadrature::tanh_sinh<double> ts;
    static const double mass = ts.integrate(PsiTransform::density, 0.0, 1.0, 1e-15);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return ts.integrate(PsiTransform::density, 0.0, x, 1e-15) / mass;
}

// Per-coordinate bisection inverse of psi on (0, 1).
double psi_inverse(double y) {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("psi fixed points and clamped tails") {
    CHECK(std::abs(psi(0.5) - 0.5) <= 1e-12);
    CHECK(psi(0.0) == 0.0);
    CHECK(psi(1.0) == 1.0);
    CHECK(psi(-3.0) == 0.0);
    CHECK(psi(7.0) == 1.0);
    CHECK(psi_prime(0.0) == 0.0);
    CHECK(psi_prime(1.0) == 0.0);
    CHECK(psi_prime(-1.0) == 0.0);
}

TEST_CASE("psi(1/4) regression value") {
    // 40-digit arbitrary-precision quadrature: 0.1229672832773290780857...
    CHECK(std::abs(psi(0.25) - 0.12296728327732908) <= 1e-12);
    CHECK(std::abs(psi(0.25) - psi_by_quadrature(0.25)) <= 1e-12);
}

TEST_CASE("total mass of h") {
    CHECK(std::abs(PsiTransform::instance().total_mass() - 0.22199690808403971891) <= 1e-14);
}

TEST_CASE("psi agrees with adaptive quadrature to 1e-12") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        CounterRng rng(1, 0, t);
        const double x = rng.uniform();
        CAPTURE(x);
        CHECK(std::abs(psi(x) - psi_by_quadrature(x)) <= 1e-12);
    }
}

TEST_CASE("psi is nondecreasing with nonnegative derivative") {
    double previous = psi(0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double x = i / 10000.0;
        const double value = psi(x);
        CHECK(value >= previous);
        CHECK(psi_prime(x) >= 0.0);
        previous = value;
    }
}

TEST_CASE("psi' matches centered differences of psi") {
    // Grid on [0.05, 0.95]: closer to the ends psi' drops below the rounding
    // level of psi differences.
    const double step = 1e-5;
    for (int i = 0; i < 1000; ++i) {
        const double x = 0.05 + 0.9 * i / 999.0;
        const double fd = (psi(x + step) - psi(x - step)) / (2.0 * step);
        CAPTURE(x);
        CHECK(std::abs(fd - psi_prime(x)) <= 1e-6 * psi_prime(x));
    }
}

TEST_CASE("psi' integrates to one") {
    double error = 0.0;
    const double total = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        psi_prime, 0.0, 1.0, 20, 1e-14, &error);
    CHECK(std::abs(total - 1.0) <= 1e-10);
}

TEST_CASE("Psi composed with a bisection inverse is the identity") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        CounterRng rng(2, 0, t);
        const double y = rng.uniform(1e-6, 1.0 - 1e-6);
        CHECK(std::abs(psi(psi_inverse(y)) - y) <= 1e-8);
    }
}

TEST_CASE("big_psi at the center, outside the cube, and in d = 1") {
    const double dpsi_half = std::exp(-1.0) / PsiTransform::instance().total_mass();
    CHECK(std::abs(dpsi_half - 1.6571376797382103) <= 1e-13);
    for (int d : {1, 2, 5, 9}) {
        const auto image = big_psi(std::vector<double>(d, 0.5));
        for (double y : image.y) CHECK(std::abs(y - 0.5) <= 1e-12);
        CHECK(image.jacobian == doctest::Approx(std::pow(dpsi_half, d)).epsilon(1e-13));
    }
    CHECK(big_psi(std::vector<double>{0.3, 1.2}).jacobian == 0.0);
    CHECK(big_psi(std::vector<double>{0.0, 0.5}).jacobian == 0.0);
    CHECK(big_psi(std::vector<double>(10, 0.5)).jacobian > 0.0);
    const auto one = big_psi(std::vector<double>{0.37});
    CHECK(one.y[0] == psi(0.37));
    CHECK(one.jacobian == psi_prime(0.37));
}

TEST_CASE("big_psi Jacobian survives where a direct product underflows") {
    // 12 factors of psi'(0.004) ~ exp(-62) each would underflow as a running
    // product only below 1e-308; check the log-space path agrees with it.
    std::vector<double> x(12, 0.02);
    double direct = 1.0;
    for (double xj : x) direct *= psi_prime(xj);
    CHECK(big_psi(x).jacobian == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("transformed rule on f = 1 at a = 8, d = 2, deterministic draw") {
    const auto b = build_general_poly_matrix(2);
    Integrand one = corpus_integrand("product_polynomial", 2);
    one.eval = [](std::span<const double>) { return 1.0; };
    one.exact_integral = 1.0;
    const auto e = transformed_estimate(8.0, b, one, deterministic_draw(2));
    CHECK(std::abs(e.value - 1.0) <= 1e-3);
    CHECK(e.node_count > 0);

    Integrand zero = one;
    zero.eval = [](std::span<const double>) { return 0.0; };
    for (std::uint64_t k = 0; k < 10; ++k) CHECK(transformed_estimate(3.0, b, zero, draw(1, k, 2)).value == 0.0);
}

TEST_CASE("transformed rule on f = 1 averages to 1 over draws") {
    const auto b = build_general_poly_matrix(2);
    Integrand one = corpus_integrand("product_polynomial", 2);
    one.eval = [](std::span<const double>) { return 1.0; };
    const auto batch = replicate(
        [&](std::uint64_t seed, std::uint64_t k) { return transformed_estimate(2.0, b, one, draw(seed, k, 2)); },
        1000, 21);
    CHECK(std::abs(batch.mean - 1.0) <= 4.0 * batch.stderr_of_mean);
}

TEST_CASE("transformed rule on f(x) = x in d = 1 is unbiased") {
    const auto b = build_general_poly_matrix(1);
    const auto f = corpus_integrand("product_polynomial", 1);
    const auto batch = replicate(
        [&](std::uint64_t seed, std::uint64_t k) { return transformed_estimate(3.0, b, f, draw(seed, k, 1)); },
        1000, 8);
    CHECK(std::abs(batch.mean - 0.5) <= 4.0 * batch.stderr_of_mean);
}

TEST_CASE("transformed rule equals the plain rule on f o Psi times |D Psi|") {
    const auto b = build_general_poly_matrix(2);
    const auto f = corpus_integrand("product_sine", 2);
    Integrand pulled_back = f;
    pulled_back.eval = [&](std::span<const double> x) {
        const auto image = big_psi(x);
        return image.jacobian == 0.0 ? 0.0 : f.eval(image.y) * image.jacobian;
    };
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto r = draw(99, k, 2);
        const auto tilde = transformed_estimate(5.0, b, f, r);
        const auto plain = m_estimate(5.0, b, pulled_back, r);
        CHECK(std::abs(tilde.value - plain.value) <= 1e-12);
        CHECK(tilde.node_count == plain.node_count);
    }
}

TEST_CASE("budget mapping: plug-in value and degenerate branch") {
    const auto b1 = build_general_poly_matrix(1);  // |B|_1 = 1, c1 = 2
    CHECK(choose_a_for_budget(2 * 2 * 2, b1) == doctest::Approx(2.0).epsilon(1e-15));
    const auto b2 = build_general_poly_matrix(2);  // |B|_1 = 4, c1 = 25
    CHECK(choose_a_for_budget(2 * 25 * 4, b2) == doctest::Approx(2.0).epsilon(1e-15));

    // n < 4 c1: at most one node for every realization.
    const auto f = corpus_integrand("product_sine", 2);
    for (std::int64_t n : {1, 10, 99}) {
        const double a = choose_a_for_budget(n, b2);
        for (std::uint64_t k = 0; k < 200; ++k) {
            CHECK(transformed_estimate(a, b2, f, draw(4, k, 2)).node_count <= 1);
            CHECK(m_estimate(a, b2, f, draw(4, k, 2)).node_count <= 1);
        }
    }
    CHECK_THROWS_AS(choose_a_for_budget(0, b2), DomainError);
}

TEST_CASE("budget mapping keeps node counts within the budget") {
    const auto b = build_general_poly_matrix(2);
    const auto f = corpus_integrand("product_sine", 2);
    const double a = choose_a_for_budget(10000, b);
    for (std::uint64_t k = 0; k < 100; ++k) {
        CHECK(transformed_estimate(a, b, f, draw(6, k, 2)).node_count <= 10000);
    }
    const auto cheb = build_chebyshev_matrix(4);
    const auto f4 = corpus_integrand("bump", 4);
    const double a4 = choose_a_for_budget(50000, cheb);
    for (std::uint64_t k = 0; k < 10; ++k) {
        CHECK(m_estimate(a4, cheb, f4, draw(6, k, 4)).node_count <= 50000);
    }
}

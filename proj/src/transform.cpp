#include "frolov/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "frolov/compensated_sum.hpp"
#include "frolov/error.hpp"

namespace frolov {
namespace {

constexpr double kHalf = 0.5;
constexpr double kPanelWidth = kHalf / PsiTransform::kPanels;
// Panels below x = 1/64 are integrated directly instead of interpolated.
constexpr int kDirectPanels = 64;

double integrate_density(double lo, double hi) {
    return boost::math::quadrature::gauss<double, 20>::integrate(PsiTransform::density, lo, hi);
}

}  // namespace

double PsiTransform::density(double x) noexcept {
    if (!(x > 0.0 && x < 1.0)) return 0.0;
    const double t = 2.0 * x - 1.0;
    const double gap = t * t - 1.0;
    // t * t can round to 1 next to the endpoints.
    if (!(gap < 0.0)) return 0.0;
    return std::exp(1.0 / gap);
}

PsiTransform::PsiTransform()
    : base_(kPanels), panel_top_(kPanels), coefficients_(kPanels) {
    constexpr int n = kDegree + 1;
    std::array<double, n> cheb_nodes{};
    for (int i = 0; i < n; ++i) cheb_nodes[i] = std::cos(std::numbers::pi * (i + 0.5) / n);

    // Mass from the panel's left edge to its Chebyshev points, so each
    // interpolant is accurate relative to the local size of h.
    std::vector<std::array<double, n>> samples(kPanels);
    std::vector<double> panel_mass(kPanels);
    CompensatedSum running;
    for (int k = 0; k < kPanels; ++k) {
        const double left = k * kPanelWidth;
        base_[k] = running.value();
        for (int i = 0; i < n; ++i) {
            const double t = left + 0.5 * kPanelWidth * (cheb_nodes[i] + 1.0);
            samples[k][i] = integrate_density(left, t);
        }
        panel_mass[k] = integrate_density(left, left + kPanelWidth);
        running.add(panel_mass[k]);
    }
    const double half_mass = running.value();
    total_mass_ = 2.0 * half_mass;
    for (int k = 0; k < kPanels; ++k) {
        base_[k] /= total_mass_;
        panel_top_[k] = panel_mass[k] / total_mass_;
    }

    for (int k = 0; k < kPanels; ++k) {
        for (int j = 0; j < n; ++j) {
            CompensatedSum c;
            for (int i = 0; i < n; ++i) {
                c.add(samples[k][i] * std::cos(std::numbers::pi * j * (i + 0.5) / n));
            }
            coefficients_[k][j] = (j == 0 ? 1.0 : 2.0) / n * c.value() / total_mass_;
        }
    }
}

const PsiTransform& PsiTransform::instance() {
    static const PsiTransform shared;
    return shared;
}

double PsiTransform::value(double x) const noexcept {
    if (!(x > 0.0)) return 0.0;
    if (!(x < 1.0)) return 1.0;
    if (x > kHalf) return 1.0 - value(1.0 - x);

    const int k = std::min(static_cast<int>(x / kPanelWidth), kPanels - 1);
    if (k < kDirectPanels) {
        // h changes by orders of magnitude across these panels.
        return base_[k] + integrate_density(k * kPanelWidth, x) / total_mass_;
    }
    const double t = 2.0 * (x - k * kPanelWidth) / kPanelWidth - 1.0;
    const auto& c = coefficients_[k];
    // Clenshaw recurrence.
    double b1 = 0.0;
    double b2 = 0.0;
    for (int j = kDegree; j >= 1; --j) {
        const double b0 = 2.0 * t * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    const double within = std::clamp(t * b1 - b2 + c[0], 0.0, panel_top_[k]);
    return std::min(base_[k] + within, kHalf);
}

double psi(double x) { return PsiTransform::instance().value(x); }

double psi_prime(double x) { return PsiTransform::instance().derivative(x); }

PsiImage big_psi(std::span<const double> x) {
    const auto& transform = PsiTransform::instance();
    const std::size_t d = x.size();
    PsiImage out{std::vector<double>(d), 1.0};
    bool any_zero = false;
    double log_jacobian = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        out.y[j] = transform.value(x[j]);
        const double dpsi = transform.derivative(x[j]);
        if (dpsi == 0.0) any_zero = true;
        if (d >= 8) {
            if (dpsi > 0.0) log_jacobian += std::log(dpsi);
        } else {
            out.jacobian *= dpsi;
        }
    }
    if (any_zero) {
        out.jacobian = 0.0;
    } else if (d >= 8) {
        out.jacobian = std::exp(log_jacobian);
    }
    return out;
}

Estimate transformed_estimate(double a, const FrolovMatrix& b, const Integrand& f,
                              const RandomDraw& draw, const EnumerationOptions& options) {
    if (f.dim != b.dim) {
        throw DomainError("transformed_estimate: integrand and matrix dimensions differ");
    }
    const auto nodes =
        enumerate_nodes(dilated_generator(a, b, draw.u), draw.v, SupportBox::unit_cube(b.dim), options);
    CompensatedSum acc;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const PsiImage image = big_psi(nodes.point(i));
        if (image.jacobian == 0.0) continue;
        acc.add(f.eval(image.y) * image.jacobian);
    }
    return {nodes.weight * acc.value(), static_cast<std::int64_t>(nodes.size())};
}

double choose_a_for_budget(std::int64_t n, const FrolovMatrix& b, double edge) {
    if (n < 1) throw DomainError("choose_a_for_budget: budget must be >= 1");
    if (!(edge > 0.0)) throw DomainError("choose_a_for_budget: edge length must be positive");
    const int d = b.dim;
    const double c1 = std::pow(edge * b.one_norm + 1.0, d);
    if (static_cast<double>(n) >= 4.0 * c1) return std::pow(n / (2.0 * c1), 1.0 / d);
    // Each candidate range then has width edge * |a diag(u) B|_1 < 1, so at
    // most one integer per coordinate.
    return 0.5 / (edge * std::pow(2.0, 1.0 / d) * b.one_norm);
}

}  // namespace frolov

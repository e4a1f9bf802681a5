#include "frolov/integrands.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "frolov/error.hpp"

namespace frolov {

double bump_1d(double x) {
    if (!(x > 0.0 && x < 1.0)) return 0.0;
    return std::exp(-1.0 / (x * (1.0 - x)));
}

double triangle_1d(double x) { return std::max(0.0, 1.0 - std::abs(2.0 * x - 1.0)); }

double triangle_fourier_abs_1d(double y) {
    const double t = 0.5 * std::numbers::pi * y;
    if (std::abs(t) < 1e-8) return 0.5;
    const double sinc = std::sin(t) / t;
    return 0.5 * sinc * sinc;
}

double triangle_fourier_envelope(double t) {
    t = std::abs(t);
    // Inflated by 1e-12 so rounding cannot put |fhat| above it where they touch.
    const double decay = (1.0 + 1e-12) * 2.0 / (std::numbers::pi * std::numbers::pi * t * t);
    return t == 0.0 ? 0.5 : std::min(0.5, decay);
}

double reference_integral_1d(const std::function<double(double)>& g, double tol) {
    if (!(tol >= 1e-14)) throw DomainError("reference_integral_1d: tol must be >= 1e-14");
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        g, 0.0, 1.0, 30, tol, &error, &l1);
    if (!(error <= tol) || !std::isfinite(value)) {
        throw NumericalError("reference_integral_1d: error estimate " + std::to_string(error) +
                             " above tolerance " + std::to_string(tol));
    }
    return value;
}

namespace {

// f(x) = prod_j factor(x_j) on [0,1]^d, zero outside.
ScalarField separable(int d, double (*factor)(double)) {
    return [d, factor](std::span<const double> x) {
        double prod = 1.0;
        for (int j = 0; j < d; ++j) {
            if (!(x[j] >= 0.0 && x[j] <= 1.0)) return 0.0;
            prod *= factor(x[j]);
        }
        return prod;
    };
}

double identity_1d(double x) { return x; }
double sine_1d(double x) { return std::sin(std::numbers::pi * x); }
double cosine_1d(double x) { return std::cos(2.0 * std::numbers::pi * x); }

Integrand base(std::string name, int d) {
    Integrand f;
    f.name = std::move(name);
    f.dim = d;
    f.support = SupportBox::unit_cube(d);
    return f;
}

}  // namespace

std::vector<std::string> corpus_names() {
    return {"product_polynomial", "product_sine", "bump", "triangle", "cos_oscillator"};
}

std::vector<Integrand> corpus(int d) {
    if (d < 1 || d > kMaxCorpusDim) {
        throw DomainError("corpus: dimension must be in [1, " + std::to_string(kMaxCorpusDim) +
                          "], got " + std::to_string(d));
    }
    std::vector<Integrand> out;

    Integrand poly = base("product_polynomial", d);
    poly.eval = separable(d, identity_1d);
    poly.exact_integral = std::pow(0.5, d);
    poly.smoothness = {-1, -1, "polynomial"};
    out.push_back(std::move(poly));

    Integrand sine = base("product_sine", d);
    sine.eval = separable(d, sine_1d);
    sine.exact_integral = std::pow(2.0 / std::numbers::pi, d);
    sine.smoothness = {-1, -1, "C^inf"};
    out.push_back(std::move(sine));

    Integrand bump = base("bump", d);
    bump.eval = separable(d, bump_1d);
    bump.compact_in_cube = true;
    bump.exact_integral = std::pow(kBumpIntegral1d, d);
    bump.provenance = IntegralProvenance::reference_quadrature;
    bump.reference_tolerance = 1e-13;
    bump.smoothness = {-1, -1, "C^inf_c"};
    out.push_back(std::move(bump));

    Integrand tri = base("triangle", d);
    tri.eval = separable(d, triangle_1d);
    tri.compact_in_cube = true;
    tri.exact_integral = std::pow(0.5, d);
    tri.smoothness = {1, 1, "C^0"};
    tri.fourier_abs = [d](std::span<const double> y) {
        double prod = 1.0;
        for (int j = 0; j < d; ++j) prod *= triangle_fourier_abs_1d(y[j]);
        return prod;
    };
    out.push_back(std::move(tri));

    Integrand osc = base("cos_oscillator", d);
    osc.eval = separable(d, cosine_1d);
    osc.exact_integral = 0.0;
    osc.smoothness = {-1, -1, "C^inf"};
    out.push_back(std::move(osc));

    return out;
}

Integrand corpus_integrand(const std::string& name, int d) {
    for (auto& f : corpus(d)) {
        if (f.name == name) return f;
    }
    throw DomainError("unknown integrand '" + name + "'");
}

nlohmann::json to_json(const Integrand& f) {
    auto order = [](int r) { return r < 0 ? nlohmann::json("inf") : nlohmann::json(r); };
    nlohmann::json j{
        {"name", f.name},
        {"d", f.dim},
        {"exact_integral", f.exact_integral},
        {"provenance", f.provenance == IntegralProvenance::closed_form ? "closed-form"
                                                                       : "reference-quadrature"},
        {"smoothness",
         {{"label", f.smoothness.label},
          {"mixed_order", order(f.smoothness.mixed_order)},
          {"isotropic_order", order(f.smoothness.isotropic_order)}}},
        {"compact_in_cube", f.compact_in_cube},
        {"has_fourier_abs", f.fourier_abs.has_value()}};
    if (f.provenance == IntegralProvenance::reference_quadrature) {
        j["reference_tolerance"] = f.reference_tolerance;
    }
    return j;
}

}  // namespace frolov

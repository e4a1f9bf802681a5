#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "frolov/lattice_rule.hpp"

namespace frolov {

enum class IntegralProvenance { closed_form, reference_quadrature };

/// Declared smoothness, used to pick expected convergence slopes.
/// mixed_order / isotropic_order of -1 mean "every order".
struct Smoothness {
    int mixed_order = 0;
    int isotropic_order = 0;
    std::string label;  // e.g. "C^inf_c", "C^0"
};

/// Test function on R^d with a known integral over its support.
struct Integrand {
    std::string name;
    int dim = 0;
    ScalarField eval;  // zero outside `support`
    SupportBox support;
    bool compact_in_cube = false;  // vanishes with all derivatives on the cube boundary
    double exact_integral = 0.0;
    IntegralProvenance provenance = IntegralProvenance::closed_form;
    double reference_tolerance = 0.0;  // set when provenance is reference_quadrature
    Smoothness smoothness;
    std::optional<ScalarField> fourier_abs;  // |fhat| with fhat(y) = int f(x) e^{-2 pi i <x,y>} dx
};

inline constexpr int kMaxCorpusDim = 6;

/// product_polynomial, product_sine, bump, triangle, cos_oscillator in
/// dimension d (1 <= d <= 6). All are separable products supported on the
/// unit cube and extended by zero.
std::vector<Integrand> corpus(int d);

/// Look up one corpus entry by name; throws DomainError for unknown names.
Integrand corpus_integrand(const std::string& name, int d);

std::vector<std::string> corpus_names();

/// Adaptive Gauss-Kronrod estimate of int_0^1 g with error estimate below tol.
/// Throws NumericalError if the subdivision cap is reached first.
double reference_integral_1d(const std::function<double(double)>& g, double tol);

/// exp(-1/(x(1-x))) on (0, 1), zero elsewhere.
double bump_1d(double x);

/// int_0^1 bump_1d, minted with reference_integral_1d at tolerance 1e-13.
inline constexpr double kBumpIntegral1d = 0.0070298584066096562;

/// max(0, 1 - |2x - 1|).
double triangle_1d(double x);

/// |fhat| of triangle_1d: (1/2) sinc^2(pi y / 2).
double triangle_fourier_abs_1d(double y);

/// Nonincreasing majorant of triangle_fourier_abs_1d: min(1/2, 2 / (pi^2 t^2)).
double triangle_fourier_envelope(double t);

nlohmann::json to_json(const Integrand& f);

}  // namespace frolov

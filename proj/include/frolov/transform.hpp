#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "frolov/frolov_matrix.hpp"
#include "frolov/integrands.hpp"
#include "frolov/randomized.hpp"

namespace frolov {

/// psi(x) = int_{-inf}^x h / int h with h(x) = exp(1 / ((2x-1)^2 - 1)) on
/// (0, 1) and 0 elsewhere. psi is C^inf, 0 left of 0, 1 right of 1, and
/// maps (0, 1) onto itself with psi(1 - x) = 1 - psi(x).
///
/// The cumulative is tabulated once on 2048 equal panels of [0, 1/2] with a
/// degree-16 Chebyshev interpolant per panel, except below x = 1/64 where
/// h is too steep for a fixed-degree fit and a 20-point Gauss rule is applied
/// on the spot. Values on (1/2, 1] come from the symmetry.
class PsiTransform {
  public:
    static constexpr int kPanels = 2048;
    static constexpr int kDegree = 16;

    /// Shared immutable instance.
    static const PsiTransform& instance();

    /// The unnormalized density h.
    static double density(double x) noexcept;

    [[nodiscard]] double total_mass() const noexcept { return total_mass_; }
    [[nodiscard]] double value(double x) const noexcept;
    [[nodiscard]] double derivative(double x) const noexcept { return density(x) / total_mass_; }

  private:
    PsiTransform();

    double total_mass_ = 0.0;
    std::vector<double> base_;       // psi at each panel's left edge
    std::vector<double> panel_top_;  // psi increase across each panel
    // Chebyshev coefficients per panel of psi(x) - psi(left edge).
    std::vector<std::array<double, kDegree + 1>> coefficients_;
};

double psi(double x);
double psi_prime(double x);

struct PsiImage {
    std::vector<double> y;
    double jacobian = 0.0;  // prod_j psi'(x_j)
};

/// Psi(x) = (psi(x_1), ..., psi(x_d)) and |D Psi(x)|. The Jacobian is
/// accumulated as a sum of logs for d >= 8, with an exact zero whenever
/// any factor vanishes.
PsiImage big_psi(std::span<const double> x);

/// Transformed randomized rule: nodes of Q_{a diag(u) B, v} in [0,1]^d are
/// mapped through Psi and weighted by |D Psi|. Nodes with zero Jacobian are
/// skipped without evaluating f. node_count is the number of lattice nodes
/// in the unit cube.
Estimate transformed_estimate(double a, const FrolovMatrix& b, const Integrand& f,
                              const RandomDraw& draw, const EnumerationOptions& options = {});

/// Dilation for a budget of n function values: (n / (2 c1))^(1/d) with
/// c1 = (l |B|_1 + 1)^d when n >= 4 c1; otherwise a dilation small enough
/// that every realization has at most one node in a box of edge l.
double choose_a_for_budget(std::int64_t n, const FrolovMatrix& b, double edge = 1.0);

}  // namespace frolov

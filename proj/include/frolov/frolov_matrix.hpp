#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace frolov {

enum class Construction { general_poly, chebyshev };

std::string_view to_string(Construction c);
Construction construction_from_string(std::string_view name);

inline constexpr int kMaxFrolovDim = 12;

/// Generator matrix B = (zeta_i^(j-1)) built from the d distinct real roots of
/// a monic irreducible integer polynomial. Nonzero points of B Z^d satisfy
/// |prod_j (Bm)_j| >= 1 and any box of volume V holds at most V + 1 of them.
struct FrolovMatrix {
    int dim = 0;
    Eigen::MatrixXd entries;
    Eigen::MatrixXd inv_transpose;  // (B^-1)^T
    double abs_det = 0.0;
    double one_norm = 0.0;  // max absolute column sum
    Construction construction = Construction::general_poly;
    std::vector<double> roots;
};

/// Vandermonde matrix of the given roots with all derived quantities filled.
/// Throws DomainError if the roots are not pairwise separated by 1e-8.
FrolovMatrix make_frolov_matrix(std::vector<double> roots, Construction construction);

/// p(x) = (x-1)(x-3)...(x-2d+1) - 1, evaluated in factored form.
double general_poly_value(int d, double x);
double general_poly_derivative(int d, double x);

/// Roots of general_poly_value for degree d, ascending. 1 <= d <= 12.
std::vector<double> general_poly_roots(int d);

FrolovMatrix build_general_poly_matrix(int d);

/// Roots zeta_j = 2 cos((2j-1) pi / (2d)), j = 1..d, of 2 T_d(x/2).
/// d must be a power of two no larger than kMaxFrolovDim.
FrolovMatrix build_chebyshev_matrix(int d);

FrolovMatrix build_frolov_matrix(Construction construction, int d);

/// Max absolute column sum.
double matrix_one_norm(const Eigen::MatrixXd& m);

struct LatticePropertyReport {
    int radius = 0;
    double min_abs_product = 0.0;
    std::int64_t points_searched = 0;
    int box_trials = 0;
    double max_count_excess = 0.0;
    bool passed = false;
};

/// Exhaustive scan of 0 < |m|_inf <= radius for min |prod_j (Bm)_j|.
/// Passes iff the minimum is at least 1 - tol.
LatticePropertyReport verify_property_b(const Eigen::MatrixXd& generator, int radius, double tol);

/// Draws random axis-aligned boxes with edges in [0.1, 20] and counts the
/// lattice points B m inside each one. Passes iff count - volume <= 1 + 1e-9
/// for every box.
LatticePropertyReport verify_property_c(const Eigen::MatrixXd& generator, int trials,
                                        std::uint64_t rng_seed);

/// Number of points B m inside the closed box [lower, upper].
std::int64_t count_lattice_points_in_box(const Eigen::MatrixXd& generator,
                                         const std::vector<double>& lower,
                                         const std::vector<double>& upper);

nlohmann::json to_json(const FrolovMatrix& matrix);
nlohmann::json to_json(const LatticePropertyReport& report);

}  // namespace frolov

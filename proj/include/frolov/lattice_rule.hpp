#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace frolov {

using ScalarField = std::function<double(std::span<const double>)>;

/// Closed axis-parallel box [lower, upper].
struct SupportBox {
    std::vector<double> lower;
    std::vector<double> upper;

    static SupportBox unit_cube(int d);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(lower.size()); }
    [[nodiscard]] double volume() const;
    [[nodiscard]] double max_edge() const;
    [[nodiscard]] bool contains(std::span<const double> x, double slack = 0.0) const noexcept;

    /// Throws DomainError unless lower/upper have equal size and lower <= upper.
    void validate() const;
};

/// Nodes x = S^-T (m + v) of the lattice rule that fall in a support box.
/// Node i occupies m[i*dim .. i*dim+dim) and x[i*dim .. i*dim+dim).
struct NodeSet {
    int dim = 0;
    Eigen::MatrixXd generator;
    std::vector<double> shift;
    std::vector<std::int64_t> m;
    std::vector<double> x;
    double weight = 0.0;  // 1 / |det S|

    [[nodiscard]] std::size_t size() const noexcept {
        return dim == 0 ? 0 : x.size() / static_cast<std::size_t>(dim);
    }
    [[nodiscard]] std::span<const double> point(std::size_t i) const noexcept {
        return {x.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    [[nodiscard]] std::span<const std::int64_t> index(std::size_t i) const noexcept {
        return {m.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

struct EnumerationOptions {
    std::uint64_t candidate_cap = 100'000'000;
};

/// Relative tolerance for boundary membership in enumerate_nodes.
inline constexpr double kBoundarySlack = 1e-12;

/// Every integer m with S^-T (m + v) inside the closed box.
///
/// Candidates come from the integer hull of S^T box - v, computed per
/// coordinate from the signs of the columns of S; each candidate is kept iff
/// its node lies in the box (boundary included). A node within
/// kBoundarySlack * (1 + |bound|) of a face counts as on it and is snapped
/// onto the face, so lattice points that land on the boundary in exact
/// arithmetic survive rounding. Nodes are ordered lexicographically in m with
/// the last coordinate varying fastest.
///
/// Throws NumericalError if |det S| <= 1e-300 or the candidate count exceeds
/// options.candidate_cap.
NodeSet enumerate_nodes(const Eigen::MatrixXd& generator, std::span<const double> shift,
                        const SupportBox& box, const EnumerationOptions& options = {});

/// Number of integer candidates enumerate_nodes would examine.
std::uint64_t candidate_count(const Eigen::MatrixXd& generator, std::span<const double> shift,
                              const SupportBox& box);

/// weight * sum_i f(x_i), accumulated with compensated summation in node order.
double apply_rule(const NodeSet& nodes, const ScalarField& f);

/// sum over 0 < |m|_inf <= truncation of fhat_abs(S m); a truncation of the
/// Fourier-side bound |Q_{S,v}(f) - I(f)| <= sum_{m != 0} |fhat(S m)|.
double fourier_error_bound(const Eigen::MatrixXd& generator, const ScalarField& fhat_abs,
                           int truncation);

/// Upper bound on sum over |m|_inf > truncation of prod_j g(|(S m)_j|) for
/// S = a B with B a Frolov matrix and g a nonincreasing envelope of the
/// one-dimensional factors of |fhat|.
///
/// The tail region is covered by dyadic cells {2^k_j <= |y_j| < 2^(k_j+1)};
/// each cell holds at most vol / a^d + 1 lattice points and no nonzero point
/// has prod |y_j| < a^d. Cells with some |k_j| above 80 are dropped; for
/// envelopes decaying like t^-2 their total is below 2^-70.
double separable_fourier_tail_bound(double a, const Eigen::MatrixXd& frolov_generator,
                                    int truncation, const std::function<double(double)>& envelope);

/// Columns m_1..m_d, x_1..x_d, one row per node.
void write_csv(const NodeSet& nodes, std::ostream& out);

}  // namespace frolov

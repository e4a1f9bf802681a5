#include "frolov/lattice_rule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "frolov/compensated_sum.hpp"
#include "frolov/error.hpp"

namespace frolov {

SupportBox SupportBox::unit_cube(int d) {
    if (d < 1) throw DomainError("unit_cube: dimension must be positive");
    return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

double SupportBox::volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < lower.size(); ++j) v *= upper[j] - lower[j];
    return v;
}

double SupportBox::max_edge() const {
    double l = 0.0;
    for (std::size_t j = 0; j < lower.size(); ++j) l = std::max(l, upper[j] - lower[j]);
    return l;
}

bool SupportBox::contains(std::span<const double> x, double slack) const noexcept {
    for (std::size_t j = 0; j < lower.size(); ++j) {
        if (!(x[j] >= lower[j] - slack * (1.0 + std::abs(lower[j])) &&
              x[j] <= upper[j] + slack * (1.0 + std::abs(upper[j])))) {
            return false;
        }
    }
    return true;
}

void SupportBox::validate() const {
    if (lower.empty() || lower.size() != upper.size()) {
        throw DomainError("support box: lower and upper must be nonempty and of equal length");
    }
    for (std::size_t j = 0; j < lower.size(); ++j) {
        if (!(lower[j] <= upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
            throw DomainError("support box: need finite lower[j] <= upper[j] (j = " +
                              std::to_string(j) + ")");
        }
    }
}

namespace {

struct CandidateRange {
    std::vector<std::int64_t> first;
    std::vector<std::int64_t> last;
    double count = 1.0;  // as double so that huge ranges do not overflow
};

CandidateRange candidate_range(const Eigen::MatrixXd& s, std::span<const double> shift,
                               const SupportBox& box) {
    const int d = box.dim();
    if (s.rows() != d || s.cols() != d || static_cast<int>(shift.size()) != d) {
        throw DomainError("enumerate_nodes: generator, shift and box dimensions disagree");
    }
    CandidateRange range{std::vector<std::int64_t>(d), std::vector<std::int64_t>(d), 1.0};
    for (int i = 0; i < d; ++i) {
        // (S^T x)_i = sum_j S(j, i) x_j, extremal per term over the box.
        double lo = 0.0;
        double hi = 0.0;
        for (int j = 0; j < d; ++j) {
            const double a = s(j, i) * box.lower[j];
            const double b = s(j, i) * box.upper[j];
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
        lo -= shift[i];
        hi -= shift[i];
        const double slack = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
        const double first = std::ceil(lo - slack);
        const double last = std::floor(hi + slack);
        if (!(std::abs(first) < 9e15 && std::abs(last) < 9e15)) {
            throw NumericalError("enumerate_nodes: candidate range exceeds integer precision");
        }
        range.first[i] = static_cast<std::int64_t>(first);
        range.last[i] = static_cast<std::int64_t>(last);
        range.count *= std::max(0.0, last - first + 1.0);
    }
    return range;
}

}  // namespace

std::uint64_t candidate_count(const Eigen::MatrixXd& generator, std::span<const double> shift,
                              const SupportBox& box) {
    box.validate();
    const double count = candidate_range(generator, shift, box).count;
    if (count >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(count);
}

NodeSet enumerate_nodes(const Eigen::MatrixXd& generator, std::span<const double> shift,
                        const SupportBox& box, const EnumerationOptions& options) {
    box.validate();
    const int d = box.dim();
    const CandidateRange range = candidate_range(generator, shift, box);

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(generator.transpose());
    const double abs_det = std::abs(lu.determinant());
    if (!(abs_det > 1e-300) || !std::isfinite(abs_det)) {
        throw NumericalError("enumerate_nodes: generator is singular");
    }
    if (range.count > static_cast<double>(options.candidate_cap)) {
        throw NumericalError("enumerate_nodes: " + std::to_string(range.count) +
                             " candidates exceed the cap of " +
                             std::to_string(options.candidate_cap));
    }

    NodeSet nodes;
    nodes.dim = d;
    nodes.generator = generator;
    nodes.shift.assign(shift.begin(), shift.end());
    nodes.weight = 1.0 / abs_det;
    if (range.count == 0.0) return nodes;

    std::vector<std::int64_t> m(range.first);
    Eigen::VectorXd rhs(d);
    Eigen::VectorXd x(d);
    for (;;) {
        for (int i = 0; i < d; ++i) rhs[i] = static_cast<double>(m[i]) + shift[i];
        x = lu.solve(rhs);
        if (box.contains({x.data(), static_cast<std::size_t>(d)}, kBoundarySlack)) {
            for (int j = 0; j < d; ++j) x[j] = std::clamp(x[j], box.lower[j], box.upper[j]);
            nodes.m.insert(nodes.m.end(), m.begin(), m.end());
            nodes.x.insert(nodes.x.end(), x.data(), x.data() + d);
        }
        int i = d - 1;
        while (i >= 0 && m[i] == range.last[i]) {
            m[i] = range.first[i];
            --i;
        }
        if (i < 0) break;
        ++m[i];
    }
    return nodes;
}

double apply_rule(const NodeSet& nodes, const ScalarField& f) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc.add(f(nodes.point(i)));
    return nodes.weight * acc.value();
}

double fourier_error_bound(const Eigen::MatrixXd& generator, const ScalarField& fhat_abs,
                           int truncation) {
    if (truncation < 1) throw DomainError("fourier_error_bound: truncation must be >= 1");
    const int d = static_cast<int>(generator.rows());
    std::vector<std::int64_t> m(d, -truncation);
    Eigen::VectorXd mv(d);
    Eigen::VectorXd y(d);
    CompensatedSum acc;
    for (;;) {
        bool zero = true;
        for (int i = 0; i < d; ++i) {
            mv[i] = static_cast<double>(m[i]);
            zero = zero && m[i] == 0;
        }
        if (!zero) {
            y.noalias() = generator * mv;
            acc.add(fhat_abs({y.data(), static_cast<std::size_t>(d)}));
        }
        int i = d - 1;
        while (i >= 0 && m[i] == truncation) {
            m[i] = -truncation;
            --i;
        }
        if (i < 0) break;
        ++m[i];
    }
    return acc.value();
}

namespace {

struct TailCells {
    int d;
    double log2_a_power;  // d * log2(a)
    double log2_radius;
    double inv_a_power;   // a^-d
    const std::function<double(double)>& envelope;
    std::vector<double> envelope_at;  // envelope(2^k) for k = -kCellLimit..kCellLimit
    CompensatedSum total;
};

constexpr int kCellLimit = 80;

void sum_cells(TailCells& cells, int j, int k_sum, int k_max, double volume, double envelope_prod) {
    if (j == cells.d) {
        // Some lattice point must satisfy prod |y| >= a^d and |y|_inf > R.
        if (k_sum + cells.d <= cells.log2_a_power) return;
        if (k_max + 1 <= cells.log2_radius) return;
        cells.total.add((volume * cells.inv_a_power + 1.0) * envelope_prod);
        return;
    }
    for (int k = -kCellLimit; k <= kCellLimit; ++k) {
        // Remaining coordinates can add at most kCellLimit + 1 each to log2 of the product.
        if (k_sum + k + cells.d + (cells.d - j - 1) * kCellLimit <= cells.log2_a_power) {
            continue;
        }
        const double g = cells.envelope_at[k + kCellLimit];
        if (g == 0.0) continue;
        sum_cells(cells, j + 1, k_sum + k, std::max(k_max, k), volume * std::ldexp(1.0, k),
                  envelope_prod * g);
    }
}

}  // namespace

double separable_fourier_tail_bound(double a, const Eigen::MatrixXd& frolov_generator,
                                    int truncation,
                                    const std::function<double(double)>& envelope) {
    if (!(a > 0.0)) throw DomainError("separable_fourier_tail_bound: a must be positive");
    if (truncation < 1) throw DomainError("separable_fourier_tail_bound: truncation must be >= 1");
    const int d = static_cast<int>(frolov_generator.rows());
    const Eigen::MatrixXd s_inv = (a * frolov_generator).inverse();
    const double inf_norm = s_inv.cwiseAbs().rowwise().sum().maxCoeff();
    // |m|_inf > M implies |S m|_inf > M / |S^-1|_inf.
    const double radius = truncation / inf_norm;

    TailCells cells{d, d * std::log2(a), std::log2(radius), std::pow(a, -d), envelope, {}, {}};
    cells.envelope_at.resize(2 * kCellLimit + 1);
    for (int k = -kCellLimit; k <= kCellLimit; ++k) {
        cells.envelope_at[k + kCellLimit] = envelope(std::ldexp(1.0, k));
    }
    sum_cells(cells, 0, 0, -kCellLimit - 1, 1.0, 1.0);
    return std::ldexp(cells.total.value(), d);  // 2^d sign patterns
}

void write_csv(const NodeSet& nodes, std::ostream& out) {
    const int d = nodes.dim;
    for (int j = 1; j <= d; ++j) out << "m_" << j << ',';
    for (int j = 1; j <= d; ++j) out << "x_" << j << (j == d ? "\n" : ",");
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::int64_t mi : nodes.index(i)) out << mi << ',';
        const auto p = nodes.point(i);
        for (int j = 0; j < d; ++j) out << p[j] << (j + 1 == d ? "\n" : ",");
    }
    out.precision(old_precision);
}

}  // namespace frolov

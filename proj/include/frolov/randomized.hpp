#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "frolov/frolov_matrix.hpp"
#include "frolov/integrands.hpp"
#include "frolov/lattice_rule.hpp"

namespace frolov {

/// One realization of the random dilation u in [1, 2^(1/d)]^d and shift v in [0, 1)^d.
struct RandomDraw {
    std::vector<double> u;
    std::vector<double> v;
    std::uint64_t seed = 0;
    std::uint64_t replicate_index = 0;
};

/// Draw keyed on (seed, replicate_index); the same key always gives the same draw.
RandomDraw draw(std::uint64_t seed, std::uint64_t replicate_index, int d);

/// u = (1, ..., 1), v = 0: turns the randomized rule into Q_{aB,0}.
RandomDraw deterministic_draw(int d);

struct Estimate {
    double value = 0.0;
    std::int64_t node_count = 0;
};

/// S = a diag(u) B.
Eigen::MatrixXd dilated_generator(double a, const FrolovMatrix& b, const std::vector<double>& u);

/// Randomized Frolov rule Q_{a diag(u) B, v}(f) over f's support box.
Estimate m_estimate(double a, const FrolovMatrix& b, const Integrand& f, const RandomDraw& draw,
                    const EnumerationOptions& options = {});

struct EstimateBatch {
    std::string method;
    double a = 0.0;  // dilation used, filled by the caller
    int dim = 0;
    std::vector<double> estimates;
    std::vector<std::int64_t> node_counts;
    double mean = 0.0;
    double stderr_of_mean = 0.0;  // sample std / sqrt(K)
};

/// Single-replicate estimator: (seed, replicate index) -> estimate.
using SingleDrawEstimator = std::function<Estimate(std::uint64_t seed, std::uint64_t replicate)>;

/// Raised by replicate() when one replication throws.
class ReplicateError : public std::runtime_error {
  public:
    ReplicateError(std::uint64_t index, const std::string& what)
        : std::runtime_error("replicate " + std::to_string(index) + " failed: " + what),
          index_(index) {}
    [[nodiscard]] std::uint64_t index() const noexcept { return index_; }

  private:
    std::uint64_t index_;
};

/// Runs replicates 0..K-1 and summarizes them. With workers > 1 replicates
/// are spread across threads; results land in replicate order so the batch
/// does not depend on scheduling.
EstimateBatch replicate(const SingleDrawEstimator& estimator, int replications,
                        std::uint64_t seed, std::string method = {}, int workers = 1);

/// Mean and stderr of a sample (K >= 2), mean via compensated summation.
void summarize(EstimateBatch& batch);

nlohmann::json to_json(const EstimateBatch& batch);

}  // namespace frolov

#include "frolov/randomized.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "frolov/compensated_sum.hpp"
#include "frolov/counter_rng.hpp"
#include "frolov/error.hpp"

namespace frolov {

RandomDraw draw(std::uint64_t seed, std::uint64_t replicate_index, int d) {
    if (d < 1) throw DomainError("draw: dimension must be positive");
    CounterRng rng(seed, stream_id::draw, replicate_index);
    const double u_max = std::pow(2.0, 1.0 / d);
    RandomDraw out{std::vector<double>(d), std::vector<double>(d), seed, replicate_index};
    for (int j = 0; j < d; ++j) out.u[j] = rng.uniform(1.0, u_max);
    for (int j = 0; j < d; ++j) out.v[j] = rng.uniform();
    return out;
}

RandomDraw deterministic_draw(int d) {
    if (d < 1) throw DomainError("deterministic_draw: dimension must be positive");
    return {std::vector<double>(d, 1.0), std::vector<double>(d, 0.0), 0, 0};
}

Eigen::MatrixXd dilated_generator(double a, const FrolovMatrix& b, const std::vector<double>& u) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("dilation a must be positive");
    if (static_cast<int>(u.size()) != b.dim) throw DomainError("dilation vector has wrong length");
    Eigen::MatrixXd s = b.entries;
    for (int i = 0; i < b.dim; ++i) s.row(i) *= a * u[i];
    return s;
}

Estimate m_estimate(double a, const FrolovMatrix& b, const Integrand& f, const RandomDraw& draw,
                    const EnumerationOptions& options) {
    if (f.dim != b.dim) throw DomainError("m_estimate: integrand and matrix dimensions differ");
    const auto nodes = enumerate_nodes(dilated_generator(a, b, draw.u), draw.v, f.support, options);
    return {apply_rule(nodes, f.eval), static_cast<std::int64_t>(nodes.size())};
}

void summarize(EstimateBatch& batch) {
    const auto k = static_cast<double>(batch.estimates.size());
    batch.mean = compensated_total(batch.estimates) / k;
    CompensatedSum squares;
    for (double e : batch.estimates) squares.add((e - batch.mean) * (e - batch.mean));
    const double variance = k > 1.0 ? squares.value() / (k - 1.0) : 0.0;
    batch.stderr_of_mean = std::sqrt(variance / k);
}

EstimateBatch replicate(const SingleDrawEstimator& estimator, int replications,
                        std::uint64_t seed, std::string method, int workers) {
    if (replications < 2) throw DomainError("replicate: need at least 2 replications");
    const auto count = static_cast<std::size_t>(replications);
    EstimateBatch batch;
    batch.method = std::move(method);
    batch.estimates.resize(count);
    batch.node_counts.resize(count);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    std::uint64_t failed_index = 0;
    std::string failure_message;

    auto work = [&] {
        for (std::size_t k = next++; k < count && !failed; k = next++) {
            try {
                const Estimate e = estimator(seed, k);
                batch.estimates[k] = e.value;
                batch.node_counts[k] = e.node_count;
            } catch (const std::exception& ex) {
                std::lock_guard lock(failure_mutex);
                if (!failed || k < failed_index) {
                    failed_index = k;
                    failure_message = ex.what();
                }
                failed = true;
            }
        }
    };

    const int threads = std::clamp(workers, 1, replications);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (failed) throw ReplicateError(failed_index, failure_message);

    summarize(batch);
    return batch;
}

nlohmann::json to_json(const EstimateBatch& batch) {
    return {{"method", batch.method},
            {"a", batch.a},
            {"d", batch.dim},
            {"K", batch.estimates.size()},
            {"mean", batch.mean},
            {"stderr", batch.stderr_of_mean},
            {"node_counts", batch.node_counts}};
}

}  // namespace frolov

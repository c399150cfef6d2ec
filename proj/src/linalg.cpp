#include "boed/linalg.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace boed {

namespace {
std::atomic<std::uint64_t> g_jitter_events{0};
}

Eigen::LLT<Eigen::MatrixXd> factorize_spd(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw FactorizationError("factorize_spd: matrix is not square");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
        return llt;
    }
    Eigen::MatrixXd jittered = a;
    jittered.diagonal().array() += kCholeskyJitter;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("covariance matrix is not positive definite (" +
                                 std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                 ", jitter did not help)");
    }
    g_jitter_events.fetch_add(1, std::memory_order_relaxed);
    return llt;
}

std::uint64_t jitter_events() noexcept { return g_jitter_events.load(); }
void reset_jitter_events() noexcept { g_jitter_events.store(0); }

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(i, j) = a(rows[i], cols[j]);
        }
    }
    return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace boed

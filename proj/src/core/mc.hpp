// Draw-parallel Monte-Carlo driver. Results are stored per draw index and
// reduced in index order, so output does not depend on the thread count.
#pragma once

#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace doflab {

template <class T>
std::vector<T> run_draws(int draws, int threads, const std::function<T(int)>& f) {
    std::vector<T> out(static_cast<size_t>(draws));
    const int workers = std::max(1, std::min(threads, draws));
    if (workers == 1) {
        for (int d = 0; d < draws; ++d) out[static_cast<size_t>(d)] = f(d);
        return out;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int d = w; d < draws; d += workers) out[static_cast<size_t>(d)] = f(d);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

struct MeanSe {
    double mean = 0;
    double se = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe r;
    if (v.empty()) return r;
    double s = 0;
    for (double x : v) s += x;
    r.mean = s / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)) /
               std::sqrt(static_cast<double>(v.size()));
    }
    return r;
}

}  // namespace doflab

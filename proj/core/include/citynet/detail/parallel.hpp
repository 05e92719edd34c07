#ifndef CITYNET_DETAIL_PARALLEL_HPP
#define CITYNET_DETAIL_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace citynet::detail {

/// Strided index fan-out over hardware threads. The callable owns slot i
/// exclusively, so results assemble deterministically by index.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::max<std::size_t>(
        1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace citynet::detail

#endif

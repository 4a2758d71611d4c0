#include "fieldsim/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fieldsim {

int worker_count() {
    if (const char* env = std::getenv("FIELDSIM_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
            // fall through to the default below
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& chunk) {
    if (n == 0) return;
    const int workers = worker_count();
    if (workers == 1 || n == 1) {
        chunk(0, n);
        return;
    }
    const auto w = static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t begin = n * t / w;
        const std::size_t end = n * (t + 1) / w;
        if (begin == end) continue;
        pool.emplace_back([&chunk, begin, end] { chunk(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fieldsim

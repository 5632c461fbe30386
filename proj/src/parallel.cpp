#include "riskdyn/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "riskdyn/errors.hpp"

namespace riskdyn {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RISKDYN_WORKERS")) {
        std::string s(env);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
            throw ValidationError("RISKDYN_WORKERS must be a positive integer, got '" + s + "'");
        return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t w = std::min<std::size_t>(std::max(workers, 1), count);
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    // Contiguous blocks; any worker's exception is rethrown after join.
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    const std::size_t base = count / w, extra = count % w;
    std::size_t begin = 0;
    for (std::size_t t = 0; t < w; ++t) {
        const std::size_t len = base + (t < extra ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&, t, begin, end]() {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace riskdyn

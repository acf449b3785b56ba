#include "comseq/common.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace comseq {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void parallel_chunks(std::size_t count, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t workers = threads == 0 ? 1 : threads;
    if (workers > count) workers = count;
    if (workers <= 1) {
        fn(0, count);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&](std::size_t begin, std::size_t end) {
        try {
            fn(begin, end);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    std::size_t chunk = (count + workers - 1) / workers;
    std::size_t begin = chunk;  // chunk 0 runs on this thread
    for (std::size_t w = 1; w < workers && begin < count; ++w) {
        std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back(run, begin, end);
        begin = end;
    }
    run(0, std::min(chunk, count));
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace comseq

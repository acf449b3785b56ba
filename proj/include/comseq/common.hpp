#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace comseq {

inline constexpr const char* kVersion = "0.1.0";

using NodeId = std::uint32_t;
using CommunityId = std::uint32_t;

// Error classes map onto distinct CLI exit codes: config problems are usage
// errors (1), malformed input files are data errors (2), and tripped guards
// (candidate cap) are resource errors (3).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Loaders report recoverable oddities (duplicate rows) through this instead
// of deciding on their own whether stderr is appropriate.
using WarningSink = std::function<void(const std::string&)>;

// Shortest decimal string that round-trips the value. Used for every float
// we write to disk so that reruns are byte-identical.
std::string format_double(double v);

// Runs fn(begin, end) over [0, count) split into contiguous chunks on up to
// `threads` workers. threads <= 1 runs inline. The first worker exception is
// rethrown after all workers joined.
void parallel_chunks(std::size_t count, unsigned threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace comseq

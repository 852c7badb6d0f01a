#pragma once

#include <cstdint>
#include <istream>
#include <vector>

namespace gecko {

struct TraceRecord {
    enum class Op : uint8_t { Write, Read };
    Op op = Op::Write;
    uint32_t lba = 0;
};

// One record per line, `W,<lba>` or `R,<lba>`, decimal; `#` starts a comment.
// Throws TraceParseError with the offending line number.
std::vector<TraceRecord> parse_trace(std::istream& in, uint64_t lba_limit);

} // namespace gecko

#include "gecko/workload.hpp"

#include <string>

#include "gecko/errors.hpp"

namespace gecko {

std::vector<TraceRecord> parse_trace(std::istream& in, uint64_t lba_limit) {
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        std::string body = line.substr(start, end - start + 1);

        if (body.size() < 3 || body[1] != ',')
            throw TraceParseError("expected 'W,<lba>' or 'R,<lba>', got '" + body + "'",
                                  line_no);
        TraceRecord rec;
        if (body[0] == 'W')
            rec.op = TraceRecord::Op::Write;
        else if (body[0] == 'R')
            rec.op = TraceRecord::Op::Read;
        else
            throw TraceParseError("unknown op '" + body.substr(0, 1) + "'", line_no);

        uint64_t lba = 0;
        std::size_t i = 2;
        if (i >= body.size())
            throw TraceParseError("missing lba", line_no);
        for (; i < body.size(); ++i) {
            char c = body[i];
            if (c < '0' || c > '9')
                throw TraceParseError("bad lba digit '" + std::string(1, c) + "'", line_no);
            lba = lba * 10 + static_cast<uint64_t>(c - '0');
            if (lba > 0xFFFFFFFFull)
                throw TraceParseError("lba overflows", line_no);
        }
        if (lba >= lba_limit)
            throw TraceParseError("lba " + std::to_string(lba) + " outside logical space (" +
                                      std::to_string(lba_limit) + " pages)",
                                  line_no);
        rec.lba = static_cast<uint32_t>(lba);
        out.push_back(rec);
    }
    return out;
}

} // namespace gecko

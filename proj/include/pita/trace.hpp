#ifndef PITA_TRACE_HPP
#define PITA_TRACE_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace pita {

// Global cycle counter. Advances exactly once per simulation step; all
// module ticks within a cycle observe the same value.
struct CycleClock {
    uint64_t now = 0;
    void advance() { ++now; }
};

struct TraceRecord {
    uint64_t cycle;
    std::string module;
    std::string verb;
    uint32_t flow;
    std::string detail;
};

// Deterministic record of per-cycle module activity. Emitted as
// line-oriented text: `cycle,module,verb,flow,detail`. Collection is off by
// default; tests enable in-memory capture, the CLI streams to a file.
class Trace {
public:
    void enable_memory() { mem_enabled_ = true; }
    void enable_file(const std::string& path) {
        file_.open(path);
        file_enabled_ = file_.is_open();
    }
    bool enabled() const { return mem_enabled_ || file_enabled_; }

    void log(uint64_t cycle, const char* module, const char* verb, uint32_t flow,
             const std::string& detail) {
        if (mem_enabled_) records_.push_back({cycle, module, verb, flow, detail});
        if (file_enabled_)
            file_ << cycle << ',' << module << ',' << verb << ',' << flow << ','
                  << detail << '\n';
    }

    const std::vector<TraceRecord>& records() const { return records_; }
    void clear() { records_.clear(); }

    std::string text() const {
        std::string out;
        for (const auto& r : records_) {
            out += std::to_string(r.cycle);
            out += ',';
            out += r.module;
            out += ',';
            out += r.verb;
            out += ',';
            out += std::to_string(r.flow);
            out += ',';
            out += r.detail;
            out += '\n';
        }
        return out;
    }

private:
    bool mem_enabled_ = false;
    bool file_enabled_ = false;
    std::ofstream file_;
    std::vector<TraceRecord> records_;
};

} // namespace pita

#endif

#ifndef PITA_HARNESS_KV_HPP
#define PITA_HARNESS_KV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pita/config.hpp"
#include "pita/harness/link.hpp"

namespace pita {

// Request/response latency statistics from one end-to-end run.
struct LatencyReport {
    struct Phase {
        std::string name;
        uint64_t samples = 0;
        double avg_cycles = 0;
        uint64_t p90_cycles = 0;
    };
    std::vector<Phase> phases; // "congestion" and "all"
    uint64_t requests_issued = 0;
    uint64_t responses = 0;
    uint64_t link_drops = 0;
    uint64_t link_marks = 0;
    uint32_t queue_peak = 0;
    bool aborted = false; // cycle budget exhausted before all samples resolved

    const Phase& phase(const std::string& n) const;
};

// Two datapath instances (client, server) wired through bidirectional links
// with a congestible request-path queue; open-loop key/value workload.
// Congestion is induced by stepping the request-path drain rate down to half
// the request byte rate inside [congestion_start, congestion_end).
LatencyReport run_kv_e2e(const SimConfig& cfg);

// Delivery-correctness runs used by the acceptance suite.
struct TcpStreamResult {
    bool exact = false;        // received stream equals sent stream, exactly once, in order
    uint64_t bytes = 0;
    uint64_t retransmissions = 0;
    uint64_t cycles = 0;
    bool aborted = false;
};
TcpStreamResult run_tcp_stream(const SimConfig& cfg, uint32_t stream_len);

struct RoceWqeResult {
    bool exact = false;        // every message delivered once, completions in MSN order
    uint64_t messages = 0;
    uint64_t naks = 0;         // go-back-N recovery exercised when > 0
    uint64_t cycles = 0;
    bool aborted = false;
};
RoceWqeResult run_roce_wqes(const SimConfig& cfg, uint32_t wqe_count, uint32_t max_wqe_len);

} // namespace pita

#endif

#ifndef PITA_CONFIG_HPP
#define PITA_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

namespace pita {

// All simulation parameters, addressable by dotted key (section.name).
// Defaults follow the reference parameter table: 64B bus at 250MHz, so the
// 100Gbps line-rate threshold is (100e9/8)/250e6 = 50 bytes/cycle.
struct SimConfig {
    // sim.*
    uint32_t flow_count = 1024;
    uint32_t bus_width = 64;          // bytes per cycle on the wire bus
    double clock_freq = 250e6;        // Hz
    uint64_t rng_seed = 1;
    uint64_t max_cycles = 5'000'000;  // harness abort budget

    // scheduler.*
    uint32_t event_buffer_depth = 32; // events per flow, power of two

    // ple.*
    uint32_t event_width = 64;        // bits
    uint32_t context_width = 938;     // bits
    uint32_t ple_depth_override = 0;  // 0 = use per-event-type depths

    // pktgen.*
    uint32_t header_width = 168;          // bits
    uint32_t instr_queue_depth = 8;       // instructions per flow, power of two
    uint32_t prefetch_buffer_len = 64;    // 64B chunks per flow, power of two
    uint32_t preempt_quantum = 16;        // packets before an instruction is requeued
    uint32_t pktgen_bp_threshold = 6;     // queue occupancy above which backpressure asserts
    uint32_t mem_latency = 20;            // payload memory access latency, cycles
    uint32_t mem_bandwidth = 64;          // payload memory bytes/cycle
    uint32_t payload_mem_bytes = 4 << 20; // flat payload memory size

    // reassembly.*
    uint32_t reassembly_buffer_len = 256; // 64B chunks per flow, power of two
    uint32_t reassembly_queue_depth = 8;
    uint32_t reassembly_bp_threshold = 6;
    uint32_t temp_pool_chunks = 1024;     // 4 * reassembly_buffer_len

    // protocol
    std::string protocol = "tcp_aimd";    // tcp_aimd | rocev2_dcqcn

    // tcp.*
    uint32_t tcp_mss = 1460;
    uint32_t tcp_init_cwnd_segs = 10;
    uint32_t tcp_dupack_threshold = 3;
    uint64_t tcp_rto_cycles = 8000;
    uint32_t tcp_max_window = 12 * 1024;

    // roce.*
    uint32_t roce_mtu = 1024;
    uint32_t roce_g_shift = 8;            // g = 1/256
    uint64_t roce_cnp_interval = 12500;   // 50us at 250MHz
    uint64_t roce_alpha_timer = 13750;    // 55us
    uint64_t roce_rate_timer = 13750;     // 55us
    uint32_t roce_fast_recovery = 5;      // stages before additive increase
    uint32_t roce_rate_ai_fp = 640;       // additive increase, bytes/cycle in 1/256 units (2.5 B/c)
    uint32_t roce_min_rate_fp = 16;       // 1/16 B/cycle
    uint64_t roce_rto_cycles = 20000;
    uint32_t roce_psn_window = 12;        // max in-flight packets per QP
    uint32_t roce_max_outstanding = 12;   // outstanding operations per QP

    // link.*
    uint64_t link_one_way_delay = 800;    // cycles; RTT 6.4us = 1600 cycles
    uint32_t link_queue_capacity = 12 * 1024;
    uint32_t link_ecn_threshold = 3 * 1024;
    uint32_t link_drain_fp = 50 * 256;    // bytes/cycle in 1/256 units
    uint32_t link_congested_drain_fp = 0; // 0 = derive from kv request byte rate / 2
    std::string link_mode = "drop_tail";  // drop_tail | ecn_mark
    uint32_t link_loss_denom = 0;         // random loss: drop 1 in N packets (0 = off)
    uint32_t link_reorder_jitter = 0;     // extra uniform delay in [0,j] cycles (0 = off)

    // kv.*
    uint32_t kv_key_size = 4;
    uint32_t kv_value_size = 64;
    uint64_t kv_interval_num = 125;       // request interval = num/den cycles (31.25)
    uint64_t kv_interval_den = 4;
    uint64_t kv_congestion_start = 20000;
    uint64_t kv_congestion_end = 70000;   // spec default window: 50,000 cycles
    uint64_t kv_total_cycles = 160000;

    // derived
    double line_rate_bytes_per_cycle() const { return (100e9 / 8.0) / clock_freq; }
    uint32_t header_bytes() const { return (header_width + 7) / 8; }

    void set(const std::string& dotted_key, const std::string& value);
    std::string get(const std::string& dotted_key) const;
    void validate() const;
    static SimConfig from_file(const std::string& path);
    void apply_file(const std::string& path);
    static const std::map<std::string, std::string>& key_table(); // key -> description
};

} // namespace pita

#endif

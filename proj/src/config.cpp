#include "pita/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "pita/error.hpp"

namespace pita {

namespace {

struct Field {
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
    try {
        if constexpr (std::is_same_v<T, double>) return std::stod(v);
        else return static_cast<T>(std::stoull(v));
    } catch (...) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
}

template <typename T>
Field num_field(T SimConfig::* member) {
    return Field{
        [member](SimConfig& c, const std::string& v) { c.*member = parse_num<T>("", v); },
        [member](const SimConfig& c) {
            std::ostringstream os;
            os << c.*member;
            return os.str();
        }};
}

Field str_field(std::string SimConfig::* member) {
    return Field{[member](SimConfig& c, const std::string& v) { c.*member = v; },
                 [member](const SimConfig& c) { return c.*member; }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> f = {
        {"sim.flow_count", num_field(&SimConfig::flow_count)},
        {"sim.bus_width", num_field(&SimConfig::bus_width)},
        {"sim.clock_freq", num_field(&SimConfig::clock_freq)},
        {"sim.rng_seed", num_field(&SimConfig::rng_seed)},
        {"sim.max_cycles", num_field(&SimConfig::max_cycles)},
        {"scheduler.event_buffer_depth", num_field(&SimConfig::event_buffer_depth)},
        {"ple.event_width", num_field(&SimConfig::event_width)},
        {"ple.context_width", num_field(&SimConfig::context_width)},
        {"ple.depth_override", num_field(&SimConfig::ple_depth_override)},
        {"pktgen.header_width", num_field(&SimConfig::header_width)},
        {"pktgen.instr_queue_depth", num_field(&SimConfig::instr_queue_depth)},
        {"pktgen.prefetch_buffer_len", num_field(&SimConfig::prefetch_buffer_len)},
        {"pktgen.preempt_quantum", num_field(&SimConfig::preempt_quantum)},
        {"pktgen.bp_threshold", num_field(&SimConfig::pktgen_bp_threshold)},
        {"pktgen.mem_latency", num_field(&SimConfig::mem_latency)},
        {"pktgen.mem_bandwidth", num_field(&SimConfig::mem_bandwidth)},
        {"pktgen.payload_mem_bytes", num_field(&SimConfig::payload_mem_bytes)},
        {"reassembly.buffer_len", num_field(&SimConfig::reassembly_buffer_len)},
        {"reassembly.queue_depth", num_field(&SimConfig::reassembly_queue_depth)},
        {"reassembly.bp_threshold", num_field(&SimConfig::reassembly_bp_threshold)},
        {"reassembly.temp_pool_chunks", num_field(&SimConfig::temp_pool_chunks)},
        {"protocol.name", str_field(&SimConfig::protocol)},
        {"protocol", str_field(&SimConfig::protocol)},
        {"tcp.mss", num_field(&SimConfig::tcp_mss)},
        {"tcp.init_cwnd_segs", num_field(&SimConfig::tcp_init_cwnd_segs)},
        {"tcp.dupack_threshold", num_field(&SimConfig::tcp_dupack_threshold)},
        {"tcp.rto_cycles", num_field(&SimConfig::tcp_rto_cycles)},
        {"tcp.max_window", num_field(&SimConfig::tcp_max_window)},
        {"roce.mtu", num_field(&SimConfig::roce_mtu)},
        {"roce.g_shift", num_field(&SimConfig::roce_g_shift)},
        {"roce.cnp_interval", num_field(&SimConfig::roce_cnp_interval)},
        {"roce.alpha_timer", num_field(&SimConfig::roce_alpha_timer)},
        {"roce.rate_timer", num_field(&SimConfig::roce_rate_timer)},
        {"roce.fast_recovery", num_field(&SimConfig::roce_fast_recovery)},
        {"roce.rate_ai_fp", num_field(&SimConfig::roce_rate_ai_fp)},
        {"roce.min_rate_fp", num_field(&SimConfig::roce_min_rate_fp)},
        {"roce.rto_cycles", num_field(&SimConfig::roce_rto_cycles)},
        {"roce.psn_window", num_field(&SimConfig::roce_psn_window)},
        {"roce.max_outstanding", num_field(&SimConfig::roce_max_outstanding)},
        {"link.one_way_delay", num_field(&SimConfig::link_one_way_delay)},
        {"link.queue_capacity", num_field(&SimConfig::link_queue_capacity)},
        {"link.ecn_threshold", num_field(&SimConfig::link_ecn_threshold)},
        {"link.drain_fp", num_field(&SimConfig::link_drain_fp)},
        {"link.congested_drain_fp", num_field(&SimConfig::link_congested_drain_fp)},
        {"link.mode", str_field(&SimConfig::link_mode)},
        {"link.loss_denom", num_field(&SimConfig::link_loss_denom)},
        {"link.reorder_jitter", num_field(&SimConfig::link_reorder_jitter)},
        {"kv.key_size", num_field(&SimConfig::kv_key_size)},
        {"kv.value_size", num_field(&SimConfig::kv_value_size)},
        {"kv.interval_num", num_field(&SimConfig::kv_interval_num)},
        {"kv.interval_den", num_field(&SimConfig::kv_interval_den)},
        {"kv.congestion_start", num_field(&SimConfig::kv_congestion_start)},
        {"kv.congestion_end", num_field(&SimConfig::kv_congestion_end)},
        {"kv.total_cycles", num_field(&SimConfig::kv_total_cycles)},
    };
    return f;
}

bool power_of_two(uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

void SimConfig::set(const std::string& key, const std::string& value) {
    auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key: " + key);
    try {
        it->second.set(*this, value);
    } catch (const ConfigError&) {
        throw ConfigError("bad value for " + key + ": '" + value + "'");
    }
}

std::string SimConfig::get(const std::string& key) const {
    auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key: " + key);
    return it->second.get(*this);
}

void SimConfig::validate() const {
    auto check = [](bool ok, const std::string& m) {
        if (!ok) throw ConfigError("config: " + m);
    };
    check(power_of_two(event_buffer_depth), "scheduler.event_buffer_depth must be a power of two");
    check(power_of_two(instr_queue_depth), "pktgen.instr_queue_depth must be a power of two");
    check(power_of_two(prefetch_buffer_len), "pktgen.prefetch_buffer_len must be a power of two");
    check(power_of_two(reassembly_buffer_len), "reassembly.buffer_len must be a power of two");
    check(flow_count > 0, "sim.flow_count must be positive");
    check(bus_width > 0, "sim.bus_width must be positive");
    check(protocol == "tcp_aimd" || protocol == "rocev2_dcqcn" || protocol == "bench",
          "protocol.name must be tcp_aimd, rocev2_dcqcn or bench");
    check(link_mode == "drop_tail" || link_mode == "ecn_mark",
          "link.mode must be drop_tail or ecn_mark");
    check(kv_interval_den > 0, "kv.interval_den must be positive");
}

// Config files are INI-style: `[section]` headers with `key = value` lines,
// or fully dotted `section.key = value` lines. `#` and `;` start comments.
void SimConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
        set(key, value);
    }
}

SimConfig SimConfig::from_file(const std::string& path) {
    SimConfig c;
    c.apply_file(path);
    c.validate();
    return c;
}

const std::map<std::string, std::string>& SimConfig::key_table() {
    static std::map<std::string, std::string> t = [] {
        std::map<std::string, std::string> m;
        SimConfig d;
        for (auto& [k, f] : fields()) m[k] = f.get(d);
        return m;
    }();
    return t;
}

} // namespace pita

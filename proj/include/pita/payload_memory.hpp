#ifndef PITA_PAYLOAD_MEMORY_HPP
#define PITA_PAYLOAD_MEMORY_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "pita/types.hpp"

namespace pita {

// Flat byte-addressable payload memory with a single fetch channel:
// requests are served FIFO at `bandwidth` bytes/cycle, and each response
// chunk arrives `access_latency` cycles after its service slot. Direct
// reads/writes (application data, reassembly sources) are not modeled as
// channel traffic; only packet-generation prefetch competes for bandwidth.
class PayloadMemory {
public:
    PayloadMemory(uint32_t size_bytes, uint32_t access_latency, uint32_t bandwidth)
        : bytes_(size_bytes, 0), latency_(access_latency), bandwidth_(bandwidth) {}

    uint32_t size() const { return uint32_t(bytes_.size()); }

    void write(uint32_t addr, const uint8_t* data, uint32_t len) {
        PITA_CHECK(uint64_t(addr) + len <= bytes_.size(), "payload memory write in bounds");
        std::copy(data, data + len, bytes_.begin() + addr);
    }
    void read(uint32_t addr, uint32_t len, uint8_t* out) const {
        PITA_CHECK(uint64_t(addr) + len <= bytes_.size(), "payload memory read in bounds");
        std::copy(bytes_.begin() + addr, bytes_.begin() + addr + len, out);
    }
    uint8_t at(uint32_t addr) const {
        PITA_CHECK(addr < bytes_.size(), "payload memory read in bounds");
        return bytes_[addr];
    }

    struct Arrival {
        FlowId flow;
        uint64_t instr_seq;
        std::vector<uint8_t> bytes;
    };

    void issue_fetch(FlowId flow, uint64_t instr_seq, uint32_t addr, uint32_t len, uint64_t now) {
        PITA_CHECK(uint64_t(addr) + len <= bytes_.size(), "payload fetch in bounds");
        uint64_t start = std::max(now + 1, channel_free_);
        uint32_t cycles = (len + bandwidth_ - 1) / bandwidth_;
        channel_free_ = start + cycles;
        for (uint32_t k = 0; k < cycles; ++k) {
            uint32_t off = k * bandwidth_;
            pending_.push_back({start + latency_ + k, flow, instr_seq, addr + off,
                                std::min(bandwidth_, len - off)});
        }
    }

    // Chunk deliveries due this cycle (channel serialization keeps at most
    // bandwidth bytes arriving per cycle).
    std::vector<Arrival> tick(uint64_t now) {
        std::vector<Arrival> out;
        while (!pending_.empty() && pending_.front().cycle <= now) {
            const auto& d = pending_.front();
            Arrival a{d.flow, d.instr_seq, {}};
            a.bytes.resize(d.len);
            read(d.addr, d.len, a.bytes.data());
            out.push_back(std::move(a));
            pending_.pop_front();
        }
        return out;
    }

    uint32_t access_latency() const { return latency_; }
    uint32_t bandwidth() const { return bandwidth_; }

private:
    struct Delivery {
        uint64_t cycle;
        FlowId flow;
        uint64_t instr_seq;
        uint32_t addr;
        uint32_t len;
    };

    std::vector<uint8_t> bytes_;
    uint32_t latency_;
    uint32_t bandwidth_;
    uint64_t channel_free_ = 0;
    std::deque<Delivery> pending_;
};

// Ring allocator over a region of payload memory for received-packet
// payloads. Entries are reclaimed front-to-back once released (an add-data-seg
// consumed them, or the event that owned them retired without one).
class PayloadPool {
public:
    PayloadPool(PayloadMemory& mem, uint32_t base, uint32_t capacity)
        : mem_(mem), base_(base), capacity_(capacity) {}

    std::optional<uint32_t> alloc(const uint8_t* data, uint32_t len) {
        PITA_CHECK(len > 0 && len <= capacity_, "payload pool entry fits");
        uint64_t vstart = tail_;
        if (vstart % capacity_ + len > capacity_) {
            // entries never wrap: skip the tail gap with a pre-released entry
            uint64_t gap_end = (vstart / capacity_ + 1) * capacity_;
            if (gap_end + len - head_ > capacity_) return std::nullopt;
            entries_.push_back({vstart, gap_end, 0, true});
            tail_ = vstart = gap_end;
        }
        if (vstart + len - head_ > capacity_) return std::nullopt;
        uint32_t addr = base_ + uint32_t(vstart % capacity_);
        mem_.write(addr, data, len);
        entries_.push_back({vstart, vstart + len, addr, false});
        tail_ = vstart + len;
        return addr;
    }

    // Accepts any address inside an entry (add-data-seg sources may be
    // trimmed forward).
    void release(uint32_t addr) {
        for (auto& e : entries_) {
            if (!e.released && addr >= e.addr && addr < e.addr + uint32_t(e.vend - e.vstart)) {
                e.released = true;
                break;
            }
        }
        while (!entries_.empty() && entries_.front().released) {
            head_ = entries_.front().vend;
            entries_.pop_front();
        }
    }

    uint32_t in_use() const { return uint32_t(tail_ - head_); }
    uint32_t base() const { return base_; }
    uint32_t capacity() const { return capacity_; }

private:
    struct Entry {
        uint64_t vstart, vend;
        uint32_t addr;
        bool released;
    };

    PayloadMemory& mem_;
    uint32_t base_;
    uint32_t capacity_;
    uint64_t head_ = 0, tail_ = 0;
    std::deque<Entry> entries_;
};

} // namespace pita

#endif

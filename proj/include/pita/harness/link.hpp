#ifndef PITA_HARNESS_LINK_HPP
#define PITA_HARNESS_LINK_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <random>

#include "pita/types.hpp"

namespace pita {

// Unidirectional link: a congestible queue (drop-tail or ECN marking) that
// drains at a modulated byte rate, followed by fixed propagation delay.
// Optional random loss and reorder jitter for robustness tests.
class Link {
public:
    enum class Mode { DropTail, EcnMark };

    struct Options {
        uint64_t one_way_delay = 800;
        uint32_t queue_capacity = 12 * 1024;
        uint32_t ecn_threshold = 3 * 1024;
        uint64_t drain_fp = 50 * 256; // bytes/cycle in 1/256 units
        Mode mode = Mode::DropTail;
        uint32_t loss_denom = 0;      // drop 1 in N (0 = off)
        uint32_t reorder_jitter = 0;  // uniform extra delay in [0, j]
    };

    Link(const Options& opt, uint64_t rng_seed) : opt_(opt), drain_fp_(opt.drain_fp), rng_(rng_seed) {}

    void set_drain_fp(uint64_t fp) { drain_fp_ = fp; }
    uint64_t drain_fp() const { return drain_fp_; }

    void enqueue(WirePacket&& p, uint64_t now) {
        uint32_t sz = uint32_t(p.bytes.size());
        bytes_in_ += sz;
        if (opt_.loss_denom && lose_()) {
            bytes_dropped_ += sz;
            ++pkts_dropped_;
            return;
        }
        if (occupancy_ + sz > opt_.queue_capacity) {
            bytes_dropped_ += sz;
            ++pkts_dropped_;
            return; // full: both modes tail-drop at capacity
        }
        if (opt_.mode == Mode::EcnMark && occupancy_ >= opt_.ecn_threshold) {
            p.ecn = true;
            ++pkts_marked_;
        }
        occupancy_ += sz;
        if (occupancy_ > occupancy_peak_) occupancy_peak_ = occupancy_;
        p.emit_cycle = now;
        queue_.push_back(std::move(p));
    }

    // Advance one cycle: drain whole packets as credit allows, deliver
    // packets whose propagation completed.
    void tick(uint64_t now, const std::function<void(WirePacket&&)>& deliver) {
        if (queue_.empty()) {
            credit_fp_ = 0;
        } else {
            credit_fp_ += drain_fp_;
            while (!queue_.empty() &&
                   credit_fp_ >= (uint64_t(queue_.front().bytes.size()) << 8)) {
                WirePacket p = std::move(queue_.front());
                queue_.pop_front();
                uint32_t sz = uint32_t(p.bytes.size());
                credit_fp_ -= uint64_t(sz) << 8;
                occupancy_ -= sz;
                bytes_out_ += sz;
                uint64_t extra = opt_.reorder_jitter ? jitter_() : 0;
                in_flight_.push_back({now + opt_.one_way_delay + extra, std::move(p)});
            }
        }
        // in_flight_ is kept sorted by delivery cycle (jitter can reorder)
        std::sort(in_flight_.begin(), in_flight_.end(),
                  [](const InFlight& a, const InFlight& b) { return a.deliver_at < b.deliver_at; });
        while (!in_flight_.empty() && in_flight_.front().deliver_at <= now) {
            deliver(std::move(in_flight_.front().pkt));
            in_flight_.pop_front();
        }
    }

    uint32_t occupancy() const { return occupancy_; }
    uint32_t occupancy_peak() const { return occupancy_peak_; }
    uint64_t bytes_in() const { return bytes_in_; }
    uint64_t bytes_out() const { return bytes_out_; }
    uint64_t bytes_dropped() const { return bytes_dropped_; }
    uint64_t pkts_dropped() const { return pkts_dropped_; }
    uint64_t pkts_marked() const { return pkts_marked_; }
    bool empty() const { return queue_.empty() && in_flight_.empty(); }

    // Queue conservation: in = out + dropped + resident.
    bool conserves() const {
        return bytes_in_ == bytes_out_ + bytes_dropped_ + occupancy_;
    }

private:
    struct InFlight {
        uint64_t deliver_at;
        WirePacket pkt;
    };

    bool lose_() {
        return std::uniform_int_distribution<uint32_t>(0, opt_.loss_denom - 1)(rng_) == 0;
    }
    uint64_t jitter_() {
        return std::uniform_int_distribution<uint32_t>(0, opt_.reorder_jitter)(rng_);
    }

    Options opt_;
    uint64_t drain_fp_;
    std::mt19937_64 rng_;
    std::deque<WirePacket> queue_;
    std::deque<InFlight> in_flight_;
    uint64_t credit_fp_ = 0;
    uint32_t occupancy_ = 0;
    uint32_t occupancy_peak_ = 0;
    uint64_t bytes_in_ = 0, bytes_out_ = 0, bytes_dropped_ = 0;
    uint64_t pkts_dropped_ = 0, pkts_marked_ = 0;
};

} // namespace pita

#endif

#include "bdg/offline.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cassert>
#include <deque>
#include <map>
#include <queue>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bdg {

namespace {

bool is_uniform(const ArrivalSequence& seq) {
    for (const Packet& p : seq.packets)
        if (p.deadline - p.arrival != seq.params.d) return false;
    return true;
}

bool is_complete(const Frame& f) {
    return f.size > 0 && static_cast<int>(f.packets.size()) == f.size;
}

std::vector<FrameId> admission_order(const ArrivalSequence& seq, AdmissionOrder order) {
    std::vector<FrameId> ids;
    for (const Frame& f : seq.frames)
        if (is_complete(f)) ids.push_back(f.id);
    auto first_arrival = [&](FrameId f) { return seq.packet(seq.frame(f).packets.front()).arrival; };
    auto last_arrival = [&](FrameId f) { return seq.packet(seq.frame(f).packets.back()).arrival; };
    std::sort(ids.begin(), ids.end(), [&](FrameId a, FrameId b) {
        switch (order) {
            case AdmissionOrder::LastPacketArrival:
                if (last_arrival(a) != last_arrival(b)) return last_arrival(a) < last_arrival(b);
                [[fallthrough]];
            case AdmissionOrder::FirstPacketArrival:
                if (first_arrival(a) != first_arrival(b))
                    return first_arrival(a) < first_arrival(b);
                [[fallthrough]];
            case AdmissionOrder::FrameIdOrder:
                break;
        }
        return a < b;
    });
    return ids;
}

std::vector<Packet> union_packets(const ArrivalSequence& seq, std::span<const FrameId> frames) {
    std::vector<Packet> pkts;
    for (FrameId f : frames)
        for (PacketId p : seq.frame(f).packets) pkts.push_back(seq.packet(p));
    return pkts;
}

/// Max-subarray segment tree over per-slot weights (arrivals minus one).
/// For d-uniform traffic a packet set is schedulable iff no arrival window
/// collects more than (window length + d) packets, i.e. the maximum
/// subarray of the weight sequence stays <= d (Hall's condition for unit
/// jobs with uniform slack).
class OccupancyTree {
public:
    explicit OccupancyTree(const std::vector<Slot>& arrival_slots) {
        // Base elements alternate arrival slots (weight -1 until packets are
        // admitted) and the idle gaps between them (fixed negative weight).
        std::vector<Slot> slots = arrival_slots;
        std::sort(slots.begin(), slots.end());
        slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
        std::vector<long long> base;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (i > 0 && slots[i] - slots[i - 1] > 1)
                base.push_back(-(slots[i] - slots[i - 1] - 1));
            pos_[slots[i]] = base.size();
            base.push_back(-1);
        }
        n_ = base.size();
        if (n_ == 0) return;
        node_.resize(2 * size_up(n_));
        build(1, 0, n_ - 1, base);
    }

    void add(Slot slot, int delta) { update(1, 0, n_ - 1, pos_.at(slot), delta); }

    long long max_subarray() const { return n_ == 0 ? 0 : node_[1].best; }

private:
    struct Node {
        long long total = 0, pref = 0, suf = 0, best = 0;
    };

    static std::size_t size_up(std::size_t n) {
        std::size_t s = 1;
        while (s < n) s <<= 1;
        return 2 * s;
    }

    static Node merge(const Node& a, const Node& b) {
        Node r;
        r.total = a.total + b.total;
        r.pref = std::max(a.pref, a.total + b.pref);
        r.suf = std::max(b.suf, b.total + a.suf);
        r.best = std::max({a.best, b.best, a.suf + b.pref});
        return r;
    }

    static Node leaf(long long w) {
        Node r;
        r.total = w;
        r.pref = r.suf = r.best = w;
        return r;
    }

    void build(std::size_t v, std::size_t lo, std::size_t hi, const std::vector<long long>& base) {
        if (lo == hi) {
            node_[v] = leaf(base[lo]);
            return;
        }
        std::size_t mid = (lo + hi) / 2;
        build(2 * v, lo, mid, base);
        build(2 * v + 1, mid + 1, hi, base);
        node_[v] = merge(node_[2 * v], node_[2 * v + 1]);
    }

    void update(std::size_t v, std::size_t lo, std::size_t hi, std::size_t i, int delta) {
        if (lo == hi) {
            node_[v] = leaf(node_[v].total + delta);
            return;
        }
        std::size_t mid = (lo + hi) / 2;
        if (i <= mid)
            update(2 * v, lo, mid, i, delta);
        else
            update(2 * v + 1, mid + 1, hi, i, delta);
        node_[v] = merge(node_[2 * v], node_[2 * v + 1]);
    }

    std::size_t n_ = 0;
    std::vector<Node> node_;
    std::map<Slot, std::size_t> pos_;
};

OfflineSolution finalize(const ArrivalSequence& seq, std::vector<FrameId> accepted) {
    OfflineSolution sol;
    std::sort(accepted.begin(), accepted.end());
    sol.accepted = std::move(accepted);
    sol.goodput = static_cast<int>(sol.accepted.size());
    sol.sequence_digest = sequence_digest(seq);
    auto sched = edf_schedule(seq, sol.accepted);
    if (!sched) throw std::logic_error("accepted frame set has no EDF witness");
    sol.schedule = std::move(*sched);
    return sol;
}

}  // namespace

OfflineSolution benchmark_offline(const ArrivalSequence& seq, AdmissionOrder order) {
    if (!is_uniform(seq)) return benchmark_offline_reference(seq, order);
    std::vector<Slot> slots;
    for (const Packet& p : seq.packets) slots.push_back(p.arrival);
    OccupancyTree tree(slots);
    const Slot d = seq.params.d;

    std::vector<FrameId> accepted;
    for (FrameId f : admission_order(seq, order)) {
        for (PacketId p : seq.frame(f).packets) tree.add(seq.packet(p).arrival, 1);
        if (tree.max_subarray() <= d) {
            accepted.push_back(f);
        } else {
            for (PacketId p : seq.frame(f).packets) tree.add(seq.packet(p).arrival, -1);
        }
    }
    return finalize(seq, std::move(accepted));
}

OfflineSolution benchmark_offline_reference(const ArrivalSequence& seq, AdmissionOrder order) {
    std::vector<FrameId> accepted;
    for (FrameId f : admission_order(seq, order)) {
        accepted.push_back(f);
        if (!edf_feasible(union_packets(seq, accepted), 0)) accepted.pop_back();
    }
    return finalize(seq, std::move(accepted));
}

namespace {

OfflineSolution brute_force_impl(const ArrivalSequence& seq, int max_frames, bool parallel) {
    std::vector<FrameId> candidates;
    for (const Frame& f : seq.frames)
        if (is_complete(f)) candidates.push_back(f.id);
    const int F = static_cast<int>(candidates.size());
    if (F > max_frames)
        throw std::invalid_argument("brute_force_optimal: instance has " + std::to_string(F) +
                                    " frames, limit is " + std::to_string(max_frames));

    const std::uint64_t total = 1ULL << F;
    std::atomic<int> best_count{0};
    int global_count = 0;
    std::uint64_t global_mask = 0;

    auto feasible = [&](std::uint64_t mask, std::vector<FrameId>& scratch) {
        scratch.clear();
        for (int i = 0; i < F; ++i)
            if (mask & (1ULL << i)) scratch.push_back(candidates[i]);
        return edf_feasible(union_packets(seq, scratch), 0);
    };

    auto scan = [&](std::uint64_t lo, std::uint64_t hi, int& out_count, std::uint64_t& out_mask) {
        std::vector<FrameId> scratch;
        int local_count = -1;
        std::uint64_t local_mask = 0;
        for (std::uint64_t mask = lo; mask < hi; ++mask) {
            int c = std::popcount(mask);
            if (c < best_count.load(std::memory_order_relaxed)) continue;
            if (c < local_count || (c == local_count && mask > local_mask)) continue;
            if (!feasible(mask, scratch)) continue;
            if (c > local_count || mask < local_mask) {
                local_count = c;
                local_mask = mask;
                int prev = best_count.load(std::memory_order_relaxed);
                while (prev < c &&
                       !best_count.compare_exchange_weak(prev, c, std::memory_order_relaxed)) {
                }
            }
        }
        out_count = local_count;
        out_mask = local_mask;
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            int nt = omp_get_num_threads();
            int id = omp_get_thread_num();
            std::uint64_t chunk = (total + nt - 1) / nt;
            int lc;
            std::uint64_t lm;
            scan(std::min<std::uint64_t>(id * chunk, total),
                 std::min<std::uint64_t>((id + 1) * chunk, total), lc, lm);
#pragma omp critical
            {
                if (lc > global_count || (lc == global_count && lm < global_mask)) {
                    global_count = lc;
                    global_mask = lm;
                }
            }
        }
#else
        scan(0, total, global_count, global_mask);
#endif
    } else {
        scan(0, total, global_count, global_mask);
    }

    std::vector<FrameId> accepted;
    for (int i = 0; i < F; ++i)
        if (global_mask & (1ULL << i)) accepted.push_back(candidates[i]);
    return finalize(seq, std::move(accepted));
}

}  // namespace

OfflineSolution brute_force_optimal(const ArrivalSequence& seq, int max_frames) {
    return brute_force_impl(seq, max_frames, true);
}

OfflineSolution brute_force_optimal_serial(const ArrivalSequence& seq, int max_frames) {
    return brute_force_impl(seq, max_frames, false);
}

bool fifo_feasibility_check(const ArrivalSequence& seq, std::span<const FrameId> frames) {
    std::vector<const Packet*> pkts;
    std::vector<char> chosen(seq.frames.size(), 0);
    for (FrameId f : frames) chosen[f] = 1;
    for (const Packet& p : seq.packets)
        if (chosen[p.frame]) pkts.push_back(&p);
    std::sort(pkts.begin(), pkts.end(), [](const Packet* a, const Packet* b) {
        return std::tuple(a->arrival, a->frame, a->index) <
               std::tuple(b->arrival, b->frame, b->index);
    });

    const Slot d = seq.params.d;
    std::deque<const Packet*> queue;
    std::size_t i = 0;
    Slot t = pkts.empty() ? 0 : pkts.front()->arrival;
    while (i < pkts.size() || !queue.empty()) {
        if (queue.empty()) t = std::max(t, pkts[i]->arrival);
        while (i < pkts.size() && pkts[i]->arrival <= t) queue.push_back(pkts[i++]);
        queue.pop_front();  // one delivery per slot; arrivals may pass through
        if (static_cast<Slot>(queue.size()) > d) return false;
        ++t;
    }
    return true;
}

std::optional<std::vector<std::pair<Slot, PacketId>>> edf_schedule(
    const ArrivalSequence& seq, std::span<const FrameId> frames) {
    std::vector<const Packet*> pkts;
    std::vector<char> chosen(seq.frames.size(), 0);
    for (FrameId f : frames) chosen[f] = 1;
    for (const Packet& p : seq.packets)
        if (chosen[p.frame]) pkts.push_back(&p);
    std::sort(pkts.begin(), pkts.end(),
              [](const Packet* a, const Packet* b) { return a->arrival < b->arrival; });

    using Key = std::tuple<Slot, FrameId, int, PacketId>;  // deadline, frame, index
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    std::vector<std::pair<Slot, PacketId>> out;
    std::vector<int> last_index(seq.frames.size(), 0);
    std::size_t i = 0;
    Slot t = pkts.empty() ? 0 : pkts.front()->arrival;
    while (i < pkts.size() || !ready.empty()) {
        if (ready.empty()) t = std::max(t, pkts[i]->arrival);
        while (i < pkts.size() && pkts[i]->arrival <= t) {
            const Packet* p = pkts[i++];
            ready.emplace(p->deadline, p->frame, p->index, p->id);
        }
        auto [dl, fr, idx, pid] = ready.top();
        ready.pop();
        if (dl < t) return std::nullopt;
        assert(idx == last_index[fr] + 1);
        last_index[fr] = idx;
        out.emplace_back(t, pid);
        ++t;
    }
    return out;
}

}  // namespace bdg

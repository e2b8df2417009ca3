// Shared helpers for the unit tests: hand-built sequences, a burst-respecting
// random instance generator, and an exhaustive slot-assignment oracle used to
// cross-check the EDF feasibility test.

#ifndef BDG_TESTS_SUPPORT_HPP
#define BDG_TESTS_SUPPORT_HPP

#include <algorithm>
#include <vector>

#include "bdg/core.hpp"
#include "bdg/rng.hpp"

namespace bdgtest {

using namespace bdg;

/// Sequence with uniform slack d. frame_arrivals[f] lists the arrival slots
/// of frame f's packets in index order; a list shorter than k leaves the
/// frame incomplete. streams[f] is optional (0 = streamless).
inline ArrivalSequence make_sequence(int k, int d, int b,
                                     const std::vector<std::vector<Slot>>& frame_arrivals,
                                     const std::vector<StreamId>& streams = {}) {
    ArrivalSequence seq;
    seq.params = {k, d, b};
    for (std::size_t f = 0; f < frame_arrivals.size(); ++f) {
        Frame frame;
        frame.id = static_cast<FrameId>(f);
        frame.stream = f < streams.size() ? streams[f] : 0;
        frame.size = k;
        seq.frames.push_back(frame);
    }
    // Packets in global (arrival, frame, index) order so ids follow time.
    struct Item {
        Slot at;
        FrameId f;
        int idx;
    };
    std::vector<Item> items;
    for (std::size_t f = 0; f < frame_arrivals.size(); ++f)
        for (std::size_t i = 0; i < frame_arrivals[f].size(); ++i)
            items.push_back({frame_arrivals[f][i], static_cast<FrameId>(f),
                             static_cast<int>(i) + 1});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.at != b.at) return a.at < b.at;
        if (a.f != b.f) return a.f < b.f;
        return a.idx < b.idx;
    });
    for (const Item& it : items) {
        Packet p;
        p.id = static_cast<PacketId>(seq.packets.size());
        p.frame = it.f;
        p.index = it.idx;
        p.arrival = it.at;
        p.deadline = it.at + d;
        seq.packets.push_back(p);
    }
    for (Packet& p : seq.packets) {
        // frame.packets must be index-ordered; the global sort above keeps
        // in-frame order only if arrivals are nondecreasing per frame, which
        // make_sequence requires of its callers.
        seq.frames[p.frame].packets.push_back(p.id);
    }
    seq.recompute_horizon();
    return seq;
}

/// Random d-uniform instance that honors the burst bound: at most b arrivals
/// per slot, in-frame arrivals nondecreasing.
inline ArrivalSequence random_instance(int frames, int k, int d, int b, std::uint64_t seed,
                                       Slot span = 0) {
    SplitMix64 rng(seed);
    if (span <= 0) span = std::max<Slot>(4, frames * k / std::max(1, b) + d);
    std::vector<std::vector<Slot>> arrivals(frames);
    std::vector<int> load(static_cast<std::size_t>(span + static_cast<Slot>(k) * frames + d),
                          0);
    for (int f = 0; f < frames; ++f) {
        Slot at = static_cast<Slot>(rng.bounded(static_cast<std::uint64_t>(span)));
        for (int i = 0; i < k; ++i) {
            while (load[static_cast<std::size_t>(at)] >= b) ++at;
            ++load[static_cast<std::size_t>(at)];
            arrivals[f].push_back(at);
            if (rng.bounded(2) == 0) ++at;
        }
    }
    return make_sequence(k, d, b, arrivals);
}

/// Exhaustive feasibility oracle: can the packets be assigned distinct slots
/// s(p) with max(start, arrival) <= s(p) <= deadline? Backtracking; intended
/// for at most ~8 packets.
inline bool assignment_feasible(std::vector<Packet> ps, Slot start) {
    std::sort(ps.begin(), ps.end(),
              [](const Packet& a, const Packet& b) { return a.deadline < b.deadline; });
    std::vector<Slot> used;
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == ps.size()) return true;
        Slot lo = std::max(start, ps[i].arrival);
        for (Slot s = lo; s <= ps[i].deadline; ++s) {
            if (std::find(used.begin(), used.end(), s) != used.end()) continue;
            used.push_back(s);
            if (self(self, i + 1)) return true;
            used.pop_back();
        }
        return false;
    };
    return rec(rec, 0);
}

}  // namespace bdgtest

#endif

#ifndef BDG_OFFLINE_HPP
#define BDG_OFFLINE_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdg/core.hpp"

namespace bdg {

/// A frame set together with an EDF witness schedule delivering every packet
/// of every accepted frame within its window, one per slot, in frame order.
struct OfflineSolution {
    std::vector<FrameId> accepted;
    std::vector<std::pair<Slot, PacketId>> schedule;  // sorted by slot
    int goodput = 0;
    std::string sequence_digest;
};

enum class AdmissionOrder {
    LastPacketArrival,   // default: ascending last arrival, ties by first, then id
    FirstPacketArrival,
    FrameIdOrder,
};

/// Greedy frame admission with EDF-union feasibility; a (k+1)-approximation
/// of the optimal goodput.
OfflineSolution benchmark_offline(const ArrivalSequence& seq,
                                  AdmissionOrder order = AdmissionOrder::LastPacketArrival);

/// Same admission rule, checked with a fresh EDF simulation per candidate.
/// Slower; kept as the reference for the incremental fast path.
OfflineSolution benchmark_offline_reference(
    const ArrivalSequence& seq, AdmissionOrder order = AdmissionOrder::LastPacketArrival);

/// Exact maximum-goodput frame subset by exhaustive enumeration, parallelized
/// over subset ranges. Rejects instances with more than max_frames frames.
/// Among maximum-cardinality solutions the lexicographically smallest frame
/// set is returned, so results are deterministic.
OfflineSolution brute_force_optimal(const ArrivalSequence& seq, int max_frames = 20);

/// Single-threaded reference for brute_force_optimal.
OfflineSolution brute_force_optimal_serial(const ArrivalSequence& seq, int max_frames = 20);

/// Size-d FIFO cross-check: admits only packets of the chosen frames into a
/// FIFO queue delivering one packet per slot; true iff no overflow, i.e. the
/// chosen frames form a feasible d-bounded-FIFO solution.
bool fifo_feasibility_check(const ArrivalSequence& seq, std::span<const FrameId> frames);

/// EDF witness for a frame set; empty result if the union is infeasible.
/// Deadline ties break by (frame, index) which preserves in-frame order for
/// monotone-deadline frames.
std::optional<std::vector<std::pair<Slot, PacketId>>> edf_schedule(
    const ArrivalSequence& seq, std::span<const FrameId> frames);

}  // namespace bdg

#endif

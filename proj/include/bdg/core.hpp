#ifndef BDG_CORE_HPP
#define BDG_CORE_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace bdg {

using Slot = std::int64_t;
using PacketId = std::int32_t;
using FrameId = std::int32_t;
using StreamId = std::int32_t;

/// Unit-size work item. `index` is the 1-based position within its frame.
struct Packet {
    PacketId id = 0;
    FrameId frame = 0;
    int index = 1;
    Slot arrival = 0;
    Slot deadline = 0;
};

/// Ordered group of `size` packets; worth one unit of goodput only if all
/// of them are delivered by their deadlines. `stream` is 0 for frames that
/// do not originate from a video stream.
struct Frame {
    FrameId id = 0;
    StreamId stream = 0;
    int size = 0;
    std::vector<PacketId> packets;  // ordered by index; may be shorter than
                                    // `size` if later packets never arrive
};

struct SequenceParams {
    int k = 0;  // frame size
    int d = 0;  // uniform slack
    int b = 0;  // declared burst bound
};

/// Slot-indexed arrival process. Frame and packet ids are dense indices
/// into `frames` and `packets`.
struct ArrivalSequence {
    SequenceParams params;
    std::vector<Frame> frames;
    std::vector<Packet> packets;
    Slot horizon = -1;  // last slot with an arrival

    const Packet& packet(PacketId p) const { return packets[p]; }
    const Frame& frame(FrameId f) const { return frames[f]; }
    void recompute_horizon();
};

enum class FrameStatus : std::uint8_t { Alive, Expired, Successful };

enum class DropReason : std::uint8_t {
    ExpiredDeadline,      // residual slack reached 0 undelivered
    FrameInfeasible,      // frame can no longer become successful
    FrameDeadOnArrival,   // arrived for a frame that had already expired
    ProactivePolicyDrop,  // dropped by a policy decision
};

const char* drop_reason_name(DropReason r);
std::optional<DropReason> drop_reason_from_name(std::string_view name);

struct Drop {
    PacketId packet;
    DropReason reason;
};

/// r_t(p) = e(p) - t. Rejects t past the deadline.
Slot residual_slack(const Packet& p, Slot t);

/// Exact unit-job feasibility: true iff the packets can be assigned distinct
/// slots s(p) with max(start, a(p)) <= s(p) <= e(p). EDF simulation.
bool edf_feasible(std::span<const Packet> packets, Slot start);

/// Pending queue and per-frame bookkeeping for one simulation run.
/// Mutation follows the slot substep order: apply_arrivals, then the
/// scheduling substep (drop_proactive / deliver), then cleanup, which also
/// advances the clock.
class SimulationState {
public:
    explicit SimulationState(const ArrivalSequence& seq);

    const ArrivalSequence& sequence() const { return *seq_; }
    Slot now() const { return now_; }

    FrameStatus frame_status(FrameId f) const { return status_[f]; }
    /// w(f): packets of f delivered so far.
    int delivered_count(FrameId f) const { return delivered_[f]; }
    /// n_t(f): packets of f currently pending.
    int pending_count(FrameId f) const { return pending_[f]; }
    /// I_t(f) = w(f) + 1.
    int first_pending_index(FrameId f) const { return delivered_[f] + 1; }
    std::optional<PacketId> first_pending_packet(FrameId f) const;

    bool is_pending(PacketId p) const;
    bool is_delivered(PacketId p) const;

    /// Frames that currently have pending packets (any status).
    const std::set<FrameId>& pending_frames() const { return frames_with_pending_; }

    int total_delivered() const { return total_delivered_; }
    int goodput() const;

    /// Substep (i): insert this slot's arrivals. Packets of already-expired
    /// frames are refused with FrameDeadOnArrival.
    std::vector<Drop> apply_arrivals(std::span<const PacketId> arrivals);

    /// Scheduling substep: policy-initiated drops. Each dropped packet's
    /// frame is marked expired.
    std::vector<Drop> drop_proactive(std::span<const PacketId> packets);

    /// Scheduling substep: deliver one packet. Throws std::invalid_argument
    /// on any contract violation (not pending, out of frame order, expired
    /// frame, past deadline).
    void deliver(PacketId p);

    /// Substep (iii): expire zero-slack packets, kill frames whose own
    /// pending set is EDF-infeasible from the next slot, advance the clock.
    std::vector<Drop> cleanup();

private:
    void drop_packet(PacketId p, DropReason reason, std::vector<Drop>& out);

    const ArrivalSequence* seq_;
    Slot now_ = 0;

    enum class PState : std::uint8_t { NotArrived, Pending, Delivered, Dropped };
    std::vector<PState> pstate_;         // per packet
    std::vector<FrameStatus> status_;    // per frame
    std::vector<int> delivered_;         // per frame, w(f)
    std::vector<int> pending_;           // per frame, n_t(f)
    std::set<FrameId> frames_with_pending_;
    int total_delivered_ = 0;
};

struct SlotResult {
    std::optional<PacketId> delivered;
    std::vector<Drop> drops;
};

/// One full time slot: arrivals, optional proactive drops and delivery,
/// cleanup. Convenience wrapper over the SimulationState substeps.
SlotResult advance_slot(SimulationState& state,
                        std::span<const PacketId> arrivals,
                        std::optional<PacketId> delivery,
                        std::span<const PacketId> proactive_drops = {});

/// Arrival lists per slot, indexed 0..horizon.
std::vector<std::vector<PacketId>> arrivals_by_slot(const ArrivalSequence& seq);

/// FNV-1a fingerprint of the sequence contents, as a hex string. Used to
/// refuse mismatched trace/benchmark pairs.
std::string sequence_digest(const ArrivalSequence& seq);

}  // namespace bdg

#endif

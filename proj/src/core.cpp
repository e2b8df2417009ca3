#include "bdg/core.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <stdexcept>

namespace bdg {

void ArrivalSequence::recompute_horizon() {
    horizon = -1;
    for (const Packet& p : packets) horizon = std::max(horizon, p.arrival);
}

const char* drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::ExpiredDeadline: return "expired_deadline";
        case DropReason::FrameInfeasible: return "frame_infeasible";
        case DropReason::FrameDeadOnArrival: return "frame_dead_on_arrival";
        case DropReason::ProactivePolicyDrop: return "proactive_policy_drop";
    }
    return "?";
}

std::optional<DropReason> drop_reason_from_name(std::string_view name) {
    for (DropReason r : {DropReason::ExpiredDeadline, DropReason::FrameInfeasible,
                         DropReason::FrameDeadOnArrival, DropReason::ProactivePolicyDrop}) {
        if (name == drop_reason_name(r)) return r;
    }
    return std::nullopt;
}

Slot residual_slack(const Packet& p, Slot t) {
    if (t > p.deadline)
        throw std::invalid_argument("residual_slack: packet already expired");
    return p.deadline - t;
}

bool edf_feasible(std::span<const Packet> packets, Slot start) {
    if (packets.empty()) return true;
    std::vector<std::pair<Slot, Slot>> jobs;  // (release, deadline)
    jobs.reserve(packets.size());
    for (const Packet& p : packets)
        jobs.emplace_back(std::max(start, p.arrival), p.deadline);
    std::sort(jobs.begin(), jobs.end());

    std::priority_queue<Slot, std::vector<Slot>, std::greater<>> deadlines;
    std::size_t i = 0;
    Slot t = jobs.front().first;
    while (i < jobs.size() || !deadlines.empty()) {
        if (deadlines.empty()) t = std::max(t, jobs[i].first);
        while (i < jobs.size() && jobs[i].first <= t) deadlines.push(jobs[i++].second);
        if (deadlines.top() < t) return false;
        deadlines.pop();
        ++t;
    }
    return true;
}

SimulationState::SimulationState(const ArrivalSequence& seq) : seq_(&seq) {
    pstate_.resize(seq.packets.size(), PState::NotArrived);
    status_.resize(seq.frames.size(), FrameStatus::Alive);
    delivered_.resize(seq.frames.size(), 0);
    pending_.resize(seq.frames.size(), 0);
}

std::optional<PacketId> SimulationState::first_pending_packet(FrameId f) const {
    const Frame& fr = seq_->frame(f);
    for (std::size_t i = delivered_[f]; i < fr.packets.size(); ++i)
        if (pstate_[fr.packets[i]] == PState::Pending) return fr.packets[i];
    return std::nullopt;
}

bool SimulationState::is_pending(PacketId p) const {
    return pstate_[p] == PState::Pending;
}

bool SimulationState::is_delivered(PacketId p) const {
    return pstate_[p] == PState::Delivered;
}

int SimulationState::goodput() const {
    int g = 0;
    for (FrameStatus s : status_)
        if (s == FrameStatus::Successful) ++g;
    return g;
}

void SimulationState::drop_packet(PacketId p, DropReason reason, std::vector<Drop>& out) {
    pstate_[p] = PState::Dropped;
    FrameId f = seq_->packet(p).frame;
    if (--pending_[f] == 0) frames_with_pending_.erase(f);
    out.push_back({p, reason});
}

std::vector<Drop> SimulationState::apply_arrivals(std::span<const PacketId> arrivals) {
    // The sequence may have grown since construction (adaptive generators
    // append packets while co-simulating).
    pstate_.resize(seq_->packets.size(), PState::NotArrived);
    status_.resize(seq_->frames.size(), FrameStatus::Alive);
    delivered_.resize(seq_->frames.size(), 0);
    pending_.resize(seq_->frames.size(), 0);

    std::vector<Drop> drops;
    for (PacketId p : arrivals) {
        const Packet& pk = seq_->packet(p);
        if (pstate_[p] != PState::NotArrived)
            throw std::invalid_argument("apply_arrivals: duplicate arrival");
        if (status_[pk.frame] == FrameStatus::Expired) {
            pstate_[p] = PState::Dropped;
            drops.push_back({p, DropReason::FrameDeadOnArrival});
            continue;
        }
        pstate_[p] = PState::Pending;
        ++pending_[pk.frame];
        frames_with_pending_.insert(pk.frame);
    }
    return drops;
}

std::vector<Drop> SimulationState::drop_proactive(std::span<const PacketId> packets) {
    std::vector<Drop> drops;
    for (PacketId p : packets) {
        if (pstate_[p] != PState::Pending)
            throw std::invalid_argument("drop_proactive: packet not pending");
        drop_packet(p, DropReason::ProactivePolicyDrop, drops);
        status_[seq_->packet(p).frame] = FrameStatus::Expired;
    }
    return drops;
}

void SimulationState::deliver(PacketId p) {
    const Packet& pk = seq_->packet(p);
    if (pstate_[p] != PState::Pending)
        throw std::invalid_argument("deliver: packet not pending");
    if (status_[pk.frame] != FrameStatus::Alive)
        throw std::invalid_argument("deliver: frame is not alive");
    if (pk.index != first_pending_index(pk.frame))
        throw std::invalid_argument("deliver: in-frame order violation");
    if (residual_slack(pk, now_) < 0)
        throw std::invalid_argument("deliver: past deadline");

    pstate_[p] = PState::Delivered;
    ++total_delivered_;
    FrameId f = pk.frame;
    if (--pending_[f] == 0) frames_with_pending_.erase(f);
    if (++delivered_[f] == seq_->frame(f).size) status_[f] = FrameStatus::Successful;
}

std::vector<Drop> SimulationState::cleanup() {
    std::vector<Drop> drops;
    std::vector<FrameId> frames(frames_with_pending_.begin(), frames_with_pending_.end());
    std::vector<Packet> scratch;
    for (FrameId f : frames) {
        const Frame& fr = seq_->frame(f);
        // Expire zero-slack packets; an expired packet kills its frame.
        for (PacketId p : fr.packets) {
            if (pstate_[p] == PState::Pending && seq_->packet(p).deadline == now_) {
                drop_packet(p, DropReason::ExpiredDeadline, drops);
                status_[f] = FrameStatus::Expired;
            }
        }
        if (pending_[f] == 0) continue;
        // Remaining pending packets of a dead frame, or of a frame whose own
        // pending set cannot be scheduled from the next slot, are discarded.
        bool kill = status_[f] == FrameStatus::Expired;
        if (!kill) {
            scratch.clear();
            for (PacketId p : fr.packets)
                if (pstate_[p] == PState::Pending) scratch.push_back(seq_->packet(p));
            kill = !edf_feasible(scratch, now_ + 1);
        }
        if (kill) {
            status_[f] = FrameStatus::Expired;
            for (PacketId p : fr.packets)
                if (pstate_[p] == PState::Pending)
                    drop_packet(p, DropReason::FrameInfeasible, drops);
        }
    }
    ++now_;
    return drops;
}

SlotResult advance_slot(SimulationState& state,
                        std::span<const PacketId> arrivals,
                        std::optional<PacketId> delivery,
                        std::span<const PacketId> proactive_drops) {
    SlotResult res;
    res.drops = state.apply_arrivals(arrivals);
    auto pd = state.drop_proactive(proactive_drops);
    res.drops.insert(res.drops.end(), pd.begin(), pd.end());
    if (delivery) {
        state.deliver(*delivery);
        res.delivered = *delivery;
    }
    auto cd = state.cleanup();
    res.drops.insert(res.drops.end(), cd.begin(), cd.end());
    return res;
}

std::vector<std::vector<PacketId>> arrivals_by_slot(const ArrivalSequence& seq) {
    std::vector<std::vector<PacketId>> slots(seq.horizon + 1);
    for (const Packet& p : seq.packets) slots[p.arrival].push_back(p.id);
    return slots;
}

std::string sequence_digest(const ArrivalSequence& seq) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    mix(seq.params.k);
    mix(seq.params.d);
    mix(seq.params.b);
    for (const Frame& f : seq.frames) {
        mix(f.stream);
        mix(f.size);
    }
    for (const Packet& p : seq.packets) {
        mix(p.frame);
        mix(p.index);
        mix(static_cast<std::uint64_t>(p.arrival));
        mix(static_cast<std::uint64_t>(p.deadline));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace bdg

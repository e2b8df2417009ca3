#ifndef BDG_POLICIES_HPP
#define BDG_POLICIES_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bdg/core.hpp"

namespace bdg {

/// At most one delivery plus an optional set of policy-initiated drops,
/// produced at the scheduling substep.
struct PolicyDecision {
    std::optional<PacketId> deliver;
    std::vector<PacketId> proactive_drops;
};

enum class TieBreak : std::uint8_t {
    MinResidualSlackOfFirstPending,
    MinPendingCount,
    FixedRandomPriority,
};

struct PolicyConfig {
    /// Applied in order after the primary criterion; FixedRandomPriority is
    /// appended automatically if absent so decisions are total.
    std::vector<TieBreak> tie_breaks;
    std::uint64_t seed = 0;
    /// Provisional-schedule occupancy rule: count(slack <= s) <= s (true)
    /// instead of the default <= s+1.
    bool literal_overflow_rule = false;
};

/// Fixed random priority over frames, seeded per run. Frames of a stream
/// share the stream's rank; streamless frames get their own shuffled rank.
class FramePriority {
public:
    FramePriority(const ArrivalSequence& seq, std::uint64_t seed);
    /// Total order: lower is preferred.
    std::uint64_t rank(FrameId f) const { return rank_[f]; }

private:
    std::vector<std::uint64_t> rank_;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string_view name() const = 0;
    virtual PolicyDecision decide(const SimulationState& state) = 0;
};

/// Admitted frame set F_t for the opportunistic scheduler: frames are taken
/// in decreasing lexicographic order of (I_t(f), d - r_t(f)) and admitted
/// while the slack-occupancy test passes.
std::vector<FrameId> build_provisional_schedule(const SimulationState& state,
                                                const FramePriority& priority,
                                                bool literal_overflow_rule = false);

/// Names: "pg", "greedy", "greedy-slack", "opportunistic".
std::unique_ptr<Policy> make_policy(std::string_view name,
                                    const ArrivalSequence& seq,
                                    const PolicyConfig& cfg = {});

const std::vector<std::string>& policy_names();

}  // namespace bdg

#endif

#ifndef BDG_ENGINE_HPP
#define BDG_ENGINE_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "bdg/core.hpp"
#include "bdg/policies.hpp"

namespace bdg {

struct SlotRecord {
    std::optional<PacketId> delivered;
    std::vector<Drop> drops;
};

/// Per-slot delivery/drop record of one run, replayable through the core
/// substeps.
struct ScheduleTrace {
    std::string policy;
    std::uint64_t seed = 0;
    std::string sequence_digest;
    std::vector<SlotRecord> slots;
    std::vector<FrameStatus> final_status;

    int goodput() const;
    std::array<int, 4> drops_by_reason() const;  // indexed by DropReason
    int total_delivered() const;
};

/// Simulate the sequence under the policy: for every slot, arrivals, policy
/// decision, delivery, cleanup. Policy contract violations propagate as
/// exceptions.
ScheduleTrace run(const ArrivalSequence& seq, Policy& policy, std::uint64_t seed);

/// Convenience: construct the named policy with the given config and run.
ScheduleTrace run(const ArrivalSequence& seq, std::string_view policy_name,
                  const PolicyConfig& cfg = {});

/// Independent trace checker; shares only the domain types with the engine.
/// Returns human-readable violation descriptions, empty when clean.
std::vector<std::string> verify_trace(const ArrivalSequence& seq, const ScheduleTrace& trace);

void write_trace(const ScheduleTrace& trace, std::ostream& os);
ScheduleTrace read_trace(std::istream& is);
void write_trace_file(const ScheduleTrace& trace, const std::string& path);
ScheduleTrace read_trace_file(const std::string& path);

}  // namespace bdg

#endif

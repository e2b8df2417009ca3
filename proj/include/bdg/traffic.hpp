#ifndef BDG_TRAFFIC_HPP
#define BDG_TRAFFIC_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "bdg/core.hpp"
#include "bdg/policies.hpp"

namespace bdg {

/// Interleaved video streams: per stream a random start offset, then frames
/// every frame_interval slots as k-packet bursts with per-packet jitter.
struct VideoScenario {
    int streams = 50;
    int frames_per_stream = 3600;
    int k = 6;
    int d = 6;
    Slot frame_interval = 0;  // 0 means k * 50 (aggregate rate = service rate)
    int jitter_max = 5;
    std::uint64_t seed = 1;
};

ArrivalSequence gen_video(const VideoScenario& spec);

enum class AdversaryVariant { BurstBounded, TokenBucket };

/// Three-stage adversarial construction parameters. For the burst-bounded
/// variant n is the number of stage-1 slots (b first-packets each); for the
/// token-bucket variant it is the number of stage-1 bursts (2d first-packets
/// each, spaced 2d slots apart).
struct AdversarySpec {
    int b = 4;
    int d = 2;
    int k = 2;
    int n = 6;
    AdversaryVariant variant = AdversaryVariant::BurstBounded;
};

struct AdversaryInstance {
    ArrivalSequence seq;
    /// Frames the adversary completes; lower bound on the optimal goodput.
    std::vector<FrameId> adversary_frames;
    /// The adversary's witness deliveries, replayable through advance_slot.
    std::vector<std::pair<Slot, PacketId>> witness;
};

/// Adaptive lower-bound generator: co-simulates the target online policy to
/// decide which later-round packets arrive when. The emitted sequence is a
/// fixed, replayable instance for that policy.
AdversaryInstance gen_lower_bound(const AdversarySpec& spec, std::string_view policy_name,
                                  const PolicyConfig& cfg = {});

/// Checks burst bound, intra-frame arrival monotonicity, d-uniformity and
/// k <= d. Empty result means valid.
std::vector<std::string> validate_sequence(const ArrivalSequence& seq);

void write_sequence(const ArrivalSequence& seq, std::ostream& os);
ArrivalSequence read_sequence(std::istream& is);
void write_sequence_file(const ArrivalSequence& seq, const std::string& path);
ArrivalSequence read_sequence_file(const std::string& path);

}  // namespace bdg

#endif

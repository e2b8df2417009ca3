#include "bdg/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdg {

MetricsReport compute_report(const ArrivalSequence& seq, const ScheduleTrace& trace,
                             const OfflineSolution& benchmark) {
    const std::string digest = sequence_digest(seq);
    if (trace.sequence_digest != digest || benchmark.sequence_digest != digest)
        throw std::invalid_argument("compute_report: trace/benchmark sequence mismatch");

    MetricsReport rep;
    rep.goodput = trace.goodput();
    rep.benchmark_goodput = benchmark.goodput;
    if (rep.benchmark_goodput == 0)
        rep.goodput_ratio = rep.goodput == 0 ? 1.0 : 0.0;
    else
        rep.goodput_ratio = static_cast<double>(rep.goodput) / rep.benchmark_goodput;

    const Slot run_end = static_cast<Slot>(trace.slots.size()) - 1;
    for (const Frame& f : seq.frames) {
        // Offered: all packets present and arrived within the run horizon.
        bool offered = f.size > 0 && static_cast<int>(f.packets.size()) == f.size &&
                       seq.packet(f.packets.back()).arrival <= run_end;
        if (offered) ++rep.per_stream_offered[f.stream];
        if (f.id < static_cast<FrameId>(trace.final_status.size()) &&
            trace.final_status[f.id] == FrameStatus::Successful)
            ++rep.per_stream_completed[f.stream];
    }
    for (auto [stream, offered] : rep.per_stream_offered) {
        int completed = rep.per_stream_completed.count(stream)
                            ? rep.per_stream_completed.at(stream)
                            : 0;
        rep.per_stream_fraction[stream] =
            offered == 0 ? 0.0 : static_cast<double>(completed) / offered;
    }
    rep.drops_by_reason = trace.drops_by_reason();
    rep.total_delivered = trace.total_delivered();
    return rep;
}

std::vector<double> completion_cdf(const MetricsReport& report) {
    std::vector<double> fractions;
    for (auto [stream, frac] : report.per_stream_fraction) fractions.push_back(frac);
    std::sort(fractions.begin(), fractions.end());
    return fractions;
}

}  // namespace bdg

#ifndef BDG_METRICS_HPP
#define BDG_METRICS_HPP

#include <array>
#include <map>
#include <vector>

#include "bdg/core.hpp"
#include "bdg/engine.hpp"
#include "bdg/offline.hpp"

namespace bdg {

struct MetricsReport {
    int goodput = 0;
    int benchmark_goodput = 0;
    /// Online goodput over benchmark goodput. May exceed 1: the benchmark is
    /// an approximation an online policy can beat. 0/0 reports 1.
    double goodput_ratio = 0.0;
    std::map<StreamId, int> per_stream_offered;
    std::map<StreamId, int> per_stream_completed;
    std::map<StreamId, double> per_stream_fraction;
    std::array<int, 4> drops_by_reason{};  // indexed by DropReason
    int total_delivered = 0;
};

/// Pure function of (trace, benchmark); rejects pairs whose sequence digests
/// differ.
MetricsReport compute_report(const ArrivalSequence& seq, const ScheduleTrace& trace,
                             const OfflineSolution& benchmark);

/// Non-decreasing per-stream completion fractions, for CDF plotting.
std::vector<double> completion_cdf(const MetricsReport& report);

}  // namespace bdg

#endif

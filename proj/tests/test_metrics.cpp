#include <doctest.h>

#include "bdg/metrics.hpp"
#include "bdg/traffic.hpp"
#include "support.hpp"

using namespace bdg;
using namespace bdgtest;

TEST_CASE("report combines online and benchmark goodput") {
    ArrivalSequence seq =
        make_sequence(2, 4, 2, {{0, 0}, {1, 1}, {3, 3}}, {1, 2, 1});
    ScheduleTrace trace = run(seq, "greedy", {});
    OfflineSolution bench = benchmark_offline(seq);
    MetricsReport rep = compute_report(seq, trace, bench);
    CHECK(rep.goodput == trace.goodput());
    CHECK(rep.benchmark_goodput == bench.goodput);
    CHECK(rep.goodput_ratio ==
          doctest::Approx(static_cast<double>(rep.goodput) / rep.benchmark_goodput));
    CHECK(rep.per_stream_offered[1] == 2);
    CHECK(rep.per_stream_offered[2] == 1);
    int completed = 0;
    for (auto [s, c] : rep.per_stream_completed) completed += c;
    CHECK(completed == rep.goodput);
    CHECK(rep.total_delivered == trace.total_delivered());
}

TEST_CASE("ratio of an empty run is one by convention") {
    ArrivalSequence seq = make_sequence(2, 3, 2, {});
    ScheduleTrace trace = run(seq, "greedy", {});
    OfflineSolution bench = benchmark_offline(seq);
    MetricsReport rep = compute_report(seq, trace, bench);
    CHECK(rep.goodput == 0);
    CHECK(rep.benchmark_goodput == 0);
    CHECK(rep.goodput_ratio == doctest::Approx(1.0));
}

TEST_CASE("mismatched trace and benchmark are refused") {
    ArrivalSequence a = make_sequence(2, 3, 2, {{0, 0}});
    ArrivalSequence b = make_sequence(2, 3, 2, {{1, 1}});
    ScheduleTrace trace = run(a, "greedy", {});
    OfflineSolution bench = benchmark_offline(b);
    CHECK_THROWS_AS(compute_report(a, trace, bench), std::invalid_argument);
    CHECK_THROWS_AS(compute_report(b, run(b, "greedy", {}), benchmark_offline(a)),
                    std::invalid_argument);
}

TEST_CASE("deliveries and drops account for every arrived packet") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        ArrivalSequence seq = random_instance(20, 3, 6, 4, seed);
        for (const auto& name : policy_names()) {
            ScheduleTrace trace = run(seq, name, {});
            OfflineSolution bench = benchmark_offline(seq);
            MetricsReport rep = compute_report(seq, trace, bench);
            int dropped = 0;
            for (int r = 0; r < 4; ++r) dropped += rep.drops_by_reason[r];
            CHECK(rep.total_delivered + dropped == static_cast<int>(seq.packets.size()));
        }
    }
}

TEST_CASE("completion fractions come out sorted and bounded") {
    VideoScenario spec;
    spec.streams = 8;
    spec.frames_per_stream = 20;
    spec.k = 4;
    spec.d = 8;
    spec.seed = 6;
    ArrivalSequence seq = gen_video(spec);
    ScheduleTrace trace = run(seq, "greedy-slack", {});
    MetricsReport rep = compute_report(seq, trace, benchmark_offline(seq));
    auto cdf = completion_cdf(rep);
    CHECK(cdf.size() == 8);
    double prev = 0.0;
    for (double f : cdf) {
        CHECK(f >= prev);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        prev = f;
    }
}

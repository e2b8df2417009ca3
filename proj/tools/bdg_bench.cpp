// Compares the OpenMP-parallel kernels against their serial references:
// exhaustive subset enumeration and the incremental benchmark admission.
// Prints wall times and checks that results agree.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "bdg/offline.hpp"
#include "bdg/rng.hpp"
#include "bdg/traffic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace bdg;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Random d-uniform instance honoring the burst bound b: per slot at most b
// arrivals, frames emit packets in order with nondecreasing arrivals.
ArrivalSequence random_instance(int frames, int k, int d, int b, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ArrivalSequence seq;
    seq.params = {k, d, b};
    const Slot span = frames * k / std::max(1, b / 2) + d + 4;
    std::vector<int> load(static_cast<std::size_t>(span) + static_cast<std::size_t>(k) * frames,
                          0);
    for (int f = 0; f < frames; ++f) {
        Frame frame;
        frame.id = f;
        frame.size = k;
        Slot at = static_cast<Slot>(rng.bounded(static_cast<std::uint64_t>(span)));
        for (int i = 1; i <= k; ++i) {
            while (load[at] >= b) ++at;
            ++load[at];
            Packet p;
            p.id = static_cast<PacketId>(seq.packets.size());
            p.frame = f;
            p.index = i;
            p.arrival = at;
            p.deadline = at + d;
            frame.packets.push_back(p.id);
            seq.packets.push_back(p);
            at += rng.bounded(3) == 0 ? 1 : 0;
        }
        seq.frames.push_back(frame);
    }
    seq.recompute_horizon();
    return seq;
}

}  // namespace

int main(int argc, char** argv) {
    int frames = argc > 1 ? std::atoi(argv[1]) : 22;
    int reps = argc > 2 ? std::atoi(argv[2]) : 3;
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both sides run serially\n");
#endif

    double par_total = 0, ser_total = 0;
    for (int r = 0; r < reps; ++r) {
        ArrivalSequence seq = random_instance(frames, 3, 5, 3, 1000 + r);

        auto t0 = clock_type::now();
        OfflineSolution par = brute_force_optimal(seq, frames);
        double par_s = seconds_since(t0);

        t0 = clock_type::now();
        OfflineSolution ser = brute_force_optimal_serial(seq, frames);
        double ser_s = seconds_since(t0);

        bool ok = par.goodput == ser.goodput && par.accepted == ser.accepted;
        std::printf("brute force %2d frames rep %d: parallel %.3fs serial %.3fs %s\n", frames,
                    r, par_s, ser_s, ok ? "match" : "MISMATCH");
        if (!ok) return 1;
        par_total += par_s;
        ser_total += ser_s;
    }
    std::printf("brute force totals: parallel %.3fs serial %.3fs speedup %.2fx\n", par_total,
                ser_total, ser_total / std::max(par_total, 1e-9));

    // Benchmark admission: incremental occupancy structure vs per-candidate
    // EDF re-simulation.
    ArrivalSequence big = random_instance(4000, 4, 8, 4, 7);
    auto t0 = clock_type::now();
    OfflineSolution fast = benchmark_offline(big);
    double fast_s = seconds_since(t0);
    t0 = clock_type::now();
    OfflineSolution ref = benchmark_offline_reference(big);
    double ref_s = seconds_since(t0);
    bool ok = fast.goodput == ref.goodput && fast.accepted == ref.accepted;
    std::printf("benchmark admission 4000 frames: fast %.3fs reference %.3fs %s\n", fast_s,
                ref_s, ok ? "match" : "MISMATCH");
    return ok ? 0 : 1;
}

#include "bdg/traffic.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "bdg/rng.hpp"

namespace bdg {

namespace {

/// Reassign packet ids in (arrive, frame, idx) order, the canonical order of
/// the sequence file format, so write/read round-trips are identities.
void canonicalize(ArrivalSequence& seq) {
    std::vector<Packet> pkts = seq.packets;
    std::sort(pkts.begin(), pkts.end(), [](const Packet& a, const Packet& b) {
        return std::tuple(a.arrival, a.frame, a.index) < std::tuple(b.arrival, b.frame, b.index);
    });
    for (Frame& f : seq.frames) f.packets.clear();
    for (std::size_t i = 0; i < pkts.size(); ++i) {
        pkts[i].id = static_cast<PacketId>(i);
        seq.frames[pkts[i].frame].packets.push_back(pkts[i].id);
    }
    for (Frame& f : seq.frames)
        std::sort(f.packets.begin(), f.packets.end(), [&](PacketId a, PacketId b) {
            return pkts[a].index < pkts[b].index;
        });
    seq.packets = std::move(pkts);
    seq.recompute_horizon();
}

int observed_burst(const ArrivalSequence& seq) {
    std::map<Slot, int> per_slot;
    int burst = 0;
    for (const Packet& p : seq.packets) burst = std::max(burst, ++per_slot[p.arrival]);
    return burst;
}

}  // namespace

ArrivalSequence gen_video(const VideoScenario& spec) {
    if (spec.k > spec.d) throw std::invalid_argument("gen_video: requires k <= d");
    if (spec.jitter_max < 0) throw std::invalid_argument("gen_video: jitter_max < 0");
    const Slot interval = spec.frame_interval > 0 ? spec.frame_interval : Slot{spec.k} * 50;

    ArrivalSequence seq;
    seq.params = {spec.k, spec.d, 0};
    SplitMix64 rng(mix_seed(spec.seed, 0x766964656fULL));
    for (StreamId s = 1; s <= spec.streams; ++s) {
        const Slot start = static_cast<Slot>(rng.bounded(interval));
        for (int j = 0; j < spec.frames_per_stream; ++j) {
            Frame f;
            f.id = static_cast<FrameId>(seq.frames.size());
            f.stream = s;
            f.size = spec.k;
            const Slot nominal = start + j * interval;
            std::vector<Slot> arrivals(spec.k);
            for (Slot& a : arrivals)
                a = nominal + static_cast<Slot>(rng.bounded(spec.jitter_max + 1));
            std::sort(arrivals.begin(), arrivals.end());
            for (int i = 0; i < spec.k; ++i) {
                Packet p;
                p.id = static_cast<PacketId>(seq.packets.size());
                p.frame = f.id;
                p.index = i + 1;
                p.arrival = arrivals[i];
                p.deadline = arrivals[i] + spec.d;
                f.packets.push_back(p.id);
                seq.packets.push_back(p);
            }
            seq.frames.push_back(std::move(f));
        }
    }
    canonicalize(seq);
    seq.params.b = observed_burst(seq);
    return seq;
}

AdversaryInstance gen_lower_bound(const AdversarySpec& spec, std::string_view policy_name,
                                  const PolicyConfig& cfg) {
    const bool token = spec.variant == AdversaryVariant::TokenBucket;
    if (spec.k < 2) throw std::invalid_argument("gen_lower_bound: requires k >= 2");
    if (spec.k > spec.d) throw std::invalid_argument("gen_lower_bound: requires k <= d");
    if (spec.b < 2 * spec.d) throw std::invalid_argument("gen_lower_bound: requires b >= 2d");
    if (spec.n < 1) throw std::invalid_argument("gen_lower_bound: requires n >= 1");
    if (!token && (spec.n + spec.d) % spec.b != 0)
        throw std::invalid_argument("gen_lower_bound: n+d must be a multiple of b");

    const int b = spec.b, d = spec.d, k = spec.k, n = spec.n;
    const int burst1 = token ? 2 * d : b;       // stage-1 burst size
    const Slot spacing1 = token ? 2 * d : 1;    // stage-1 burst spacing

    AdversaryInstance out;
    ArrivalSequence& seq = out.seq;
    seq.params = {k, d, b};
    const int nframes = n * burst1;
    for (FrameId f = 0; f < nframes; ++f) seq.frames.push_back({f, 0, k, {}});

    auto policy = make_policy(policy_name, seq, cfg);
    SimulationState st(seq);
    std::vector<int> emitted(nframes, 0);
    std::vector<char> is_adv(nframes, 0);

    Slot t = 0;
    long long level = b;  // token-bucket level, refilled 1/slot from slot 1 on

    auto peek_level = [&] { return std::min<long long>(b, level + (t > 0 ? 1 : 0)); };

    auto add_packet = [&](FrameId f) {
        Packet p;
        p.id = static_cast<PacketId>(seq.packets.size());
        p.frame = f;
        p.index = ++emitted[f];
        p.arrival = t;
        p.deadline = t + d;
        seq.packets.push_back(p);
        seq.frames[f].packets.push_back(p.id);
        return p.id;
    };

    auto step = [&](const std::vector<PacketId>& arrivals) {
        if (token) {
            if (t > 0) level = std::min<long long>(b, level + 1);
            level -= static_cast<long long>(arrivals.size());
            if (level < 0) throw std::logic_error("gen_lower_bound: token bucket violated");
        }
        st.apply_arrivals(arrivals);
        PolicyDecision dec = policy->decide(st);
        st.drop_proactive(dec.proactive_drops);
        if (dec.deliver) st.deliver(*dec.deliver);
        st.cleanup();
        ++t;
    };

    // Stage 1: first packets of all frames, burst1 per burst.
    for (int i = 0; i < n; ++i) {
        while (t < i * spacing1) step({});
        std::vector<PacketId> burst;
        for (int j = 0; j < burst1; ++j) burst.push_back(add_packet(i * burst1 + j));
        step(burst);
    }

    auto eligible = [&](int round) {
        std::vector<FrameId> v;
        for (FrameId f = 0; f < nframes; ++f)
            if (!is_adv[f] && emitted[f] == round - 1 && st.delivered_count(f) == round - 1)
                v.push_back(f);
        return v;
    };
    auto awaiting = [&](int round) {
        for (FrameId f = 0; f < nframes; ++f)
            if (!is_adv[f] && emitted[f] == round - 1 && st.pending_count(f) > 0) return true;
        return false;
    };

    // Stage 2 of a round: round-index packets arrive, as densely as the
    // burst/token envelope permits, for frames whose previous packet the
    // online policy delivered.
    auto stage2 = [&](int round) {
        Slot next_burst = t;
        while (true) {
            auto el = eligible(round);
            if (el.empty() && !awaiting(round)) break;
            std::vector<PacketId> burst;
            const int m = static_cast<int>(std::min<std::size_t>(b, el.size()));
            if (m > 0 && t >= next_burst && (!token || peek_level() >= m)) {
                for (int i = 0; i < m; ++i) burst.push_back(add_packet(el[i]));
                next_burst = t + (token ? b : 1);
            }
            step(burst);
        }
    };

    // Adversary designation: EDF over the first-packet windows of frames the
    // online policy did not serve. These frames receive their remaining
    // packets one per slot and are completable with no adversary drops.
    auto designate = [&] {
        using Cand = std::pair<Slot, FrameId>;  // (first-packet arrival, frame)
        std::vector<Cand> cands;
        for (FrameId f = 0; f < nframes; ++f)
            if (emitted[f] == 1 && st.delivered_count(f) == 0)
                cands.emplace_back(seq.packet(seq.frames[f].packets[0]).arrival, f);
        std::sort(cands.begin(), cands.end());

        std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;  // (deadline, f)
        std::size_t i = 0;
        Slot s = cands.empty() ? 0 : cands.front().first;
        while (i < cands.size() || !heap.empty()) {
            if (heap.empty()) s = std::max(s, cands[i].first);
            while (i < cands.size() && cands[i].first <= s)
                heap.emplace(cands[i].first + d, cands[i].second), ++i;
            while (!heap.empty() && heap.top().first < s) heap.pop();
            if (!heap.empty()) {
                auto [dl, f] = heap.top();
                heap.pop();
                is_adv[f] = 1;
                out.adversary_frames.push_back(f);
                out.witness.emplace_back(s, seq.frames[f].packets[0]);
            }
            ++s;
        }
    };

    auto stage3 = [&](int round) {
        for (FrameId f : out.adversary_frames) {
            assert(emitted[f] == round - 1);
            if (token)
                while (peek_level() < 1) step({});
            PacketId p = add_packet(f);
            out.witness.emplace_back(t, p);
            step({p});
        }
    };

    for (int round = 2; round <= k; ++round) {
        stage2(round);
        if (round == 2) designate();
        stage3(round);
    }

    seq.recompute_horizon();
    std::sort(out.witness.begin(), out.witness.end());
    return out;
}

std::vector<std::string> validate_sequence(const ArrivalSequence& seq) {
    std::vector<std::string> out;
    if (seq.params.k > seq.params.d)
        out.push_back("k=" + std::to_string(seq.params.k) + " exceeds d=" +
                      std::to_string(seq.params.d));

    std::map<Slot, int> per_slot;
    for (const Packet& p : seq.packets) ++per_slot[p.arrival];
    for (auto [slot, count] : per_slot)
        if (count > seq.params.b)
            out.push_back("burst bound violated at slot " + std::to_string(slot) + ": " +
                          std::to_string(count) + " arrivals, bound " +
                          std::to_string(seq.params.b));

    for (const Packet& p : seq.packets)
        if (p.deadline - p.arrival != seq.params.d)
            out.push_back("packet " + std::to_string(p.id) + " is not d-uniform (slack " +
                          std::to_string(p.deadline - p.arrival) + ")");

    for (const Frame& f : seq.frames) {
        if (f.size != seq.params.k)
            out.push_back("frame " + std::to_string(f.id) + " declares size " +
                          std::to_string(f.size) + ", expected k=" +
                          std::to_string(seq.params.k));
        if (static_cast<int>(f.packets.size()) > f.size)
            out.push_back("frame " + std::to_string(f.id) + " has too many packets");
        for (std::size_t i = 0; i < f.packets.size(); ++i) {
            const Packet& p = seq.packet(f.packets[i]);
            if (p.index != static_cast<int>(i) + 1)
                out.push_back("frame " + std::to_string(f.id) + ": packet indices not 1.." +
                              std::to_string(f.packets.size()));
            if (i > 0 && p.arrival < seq.packet(f.packets[i - 1]).arrival)
                out.push_back("frame " + std::to_string(f.id) +
                              ": arrivals not monotone at index " + std::to_string(p.index));
        }
    }
    return out;
}

void write_sequence(const ArrivalSequence& seq, std::ostream& os) {
    os << "k=" << seq.params.k << " d=" << seq.params.d << " b=" << seq.params.b << "\n";
    std::vector<const Packet*> pkts;
    for (const Packet& p : seq.packets) pkts.push_back(&p);
    std::sort(pkts.begin(), pkts.end(), [](const Packet* a, const Packet* b) {
        return std::tuple(a->arrival, a->frame, a->index) <
               std::tuple(b->arrival, b->frame, b->index);
    });
    for (const Packet* p : pkts)
        os << "frame=" << p->frame << " stream=" << seq.frame(p->frame).stream
           << " idx=" << p->index << " arrive=" << p->arrival << " deadline=" << p->deadline
           << "\n";
}

ArrivalSequence read_sequence(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& field, const std::string& what) {
        throw std::runtime_error("sequence parse error at line " + std::to_string(lineno) +
                                 ", field '" + field + "': " + what);
    };
    auto parse_kv = [&](const std::string& l) {
        std::map<std::string, long long> kv;
        std::istringstream ls(l);
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) fail(tok, "expected key=value");
            try {
                kv[tok.substr(0, eq)] = std::stoll(tok.substr(eq + 1));
            } catch (const std::exception&) {
                fail(tok.substr(0, eq), "not an integer");
            }
        }
        return kv;
    };
    auto require = [&](std::map<std::string, long long>& kv, const std::string& key) {
        if (!kv.count(key)) fail(key, "missing");
        return kv[key];
    };

    ArrivalSequence seq;
    bool have_header = false;
    struct Row {
        long long frame, stream, idx;
        Slot arrive, deadline;
    };
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto kv = parse_kv(line);
        if (!have_header) {
            seq.params.k = static_cast<int>(require(kv, "k"));
            seq.params.d = static_cast<int>(require(kv, "d"));
            seq.params.b = static_cast<int>(require(kv, "b"));
            have_header = true;
            continue;
        }
        Row r;
        r.frame = require(kv, "frame");
        r.stream = require(kv, "stream");
        r.idx = require(kv, "idx");
        r.arrive = require(kv, "arrive");
        r.deadline = require(kv, "deadline");
        if (r.idx < 1 || r.idx > seq.params.k) fail("idx", "must be in 1..k");
        if (r.deadline < r.arrive) fail("deadline", "precedes arrival");
        if (r.arrive < 0) fail("arrive", "negative slot");
        rows.push_back(r);
    }
    if (!have_header) throw std::runtime_error("sequence parse error: missing header line");

    // Remap file frame ids to dense ids in ascending order.
    std::vector<long long> ids;
    for (const Row& r : rows) ids.push_back(r.frame);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::map<long long, FrameId> remap;
    for (std::size_t i = 0; i < ids.size(); ++i) remap[ids[i]] = static_cast<FrameId>(i);

    seq.frames.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        seq.frames[i].id = static_cast<FrameId>(i);
        seq.frames[i].size = seq.params.k;
        seq.frames[i].stream = -1;
    }
    std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        return std::tuple(a.arrive, remap[a.frame], a.idx) <
               std::tuple(b.arrive, remap[b.frame], b.idx);
    });
    for (const Row& r : rows) {
        FrameId f = remap[r.frame];
        if (seq.frames[f].stream == -1)
            seq.frames[f].stream = static_cast<StreamId>(r.stream);
        else if (seq.frames[f].stream != r.stream)
            throw std::runtime_error("sequence parse error: frame " + std::to_string(r.frame) +
                                     " listed with two stream ids");
        Packet p;
        p.id = static_cast<PacketId>(seq.packets.size());
        p.frame = f;
        p.index = static_cast<int>(r.idx);
        p.arrival = r.arrive;
        p.deadline = r.deadline;
        seq.frames[f].packets.push_back(p.id);
        seq.packets.push_back(p);
    }
    for (Frame& f : seq.frames) {
        std::sort(f.packets.begin(), f.packets.end(), [&](PacketId a, PacketId b) {
            return seq.packet(a).index < seq.packet(b).index;
        });
        for (std::size_t i = 0; i < f.packets.size(); ++i)
            if (seq.packet(f.packets[i]).index != static_cast<int>(i) + 1)
                throw std::runtime_error("sequence parse error: frame " + std::to_string(f.id) +
                                         " has non-contiguous packet indices");
    }
    seq.recompute_horizon();
    return seq;
}

void write_sequence_file(const ArrivalSequence& seq, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_sequence(seq, os);
}

ArrivalSequence read_sequence_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_sequence(is);
}

}  // namespace bdg

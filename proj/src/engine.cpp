#include "bdg/engine.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bdg {

int ScheduleTrace::goodput() const {
    int g = 0;
    for (FrameStatus s : final_status)
        if (s == FrameStatus::Successful) ++g;
    return g;
}

std::array<int, 4> ScheduleTrace::drops_by_reason() const {
    std::array<int, 4> counts{};
    for (const SlotRecord& r : slots)
        for (const Drop& d : r.drops) ++counts[static_cast<int>(d.reason)];
    return counts;
}

int ScheduleTrace::total_delivered() const {
    int n = 0;
    for (const SlotRecord& r : slots)
        if (r.delivered) ++n;
    return n;
}

ScheduleTrace run(const ArrivalSequence& seq, Policy& policy, std::uint64_t seed) {
    ScheduleTrace trace;
    trace.policy = std::string(policy.name());
    trace.seed = seed;
    trace.sequence_digest = sequence_digest(seq);

    auto slots = arrivals_by_slot(seq);
    Slot max_deadline = 0;
    for (const Packet& p : seq.packets) max_deadline = std::max(max_deadline, p.deadline);

    SimulationState state(seq);
    static const std::vector<PacketId> kNone;
    for (Slot t = 0; t <= seq.horizon || !state.pending_frames().empty(); ++t) {
        if (t > max_deadline + 1)
            throw std::logic_error("run: pending packets past the last deadline");
        SlotRecord rec;
        const auto& arrivals = t <= seq.horizon ? slots[t] : kNone;
        rec.drops = state.apply_arrivals(arrivals);

        PolicyDecision dec = policy.decide(state);
        if (dec.deliver)
            for (PacketId p : dec.proactive_drops)
                if (p == *dec.deliver)
                    throw std::invalid_argument("policy delivered a packet it also dropped");
        auto pd = state.drop_proactive(dec.proactive_drops);
        rec.drops.insert(rec.drops.end(), pd.begin(), pd.end());
        if (dec.deliver) {
            state.deliver(*dec.deliver);
            rec.delivered = dec.deliver;
        }
        auto cd = state.cleanup();
        rec.drops.insert(rec.drops.end(), cd.begin(), cd.end());
        trace.slots.push_back(std::move(rec));
    }

    trace.final_status.resize(seq.frames.size());
    for (FrameId f = 0; f < static_cast<FrameId>(seq.frames.size()); ++f)
        trace.final_status[f] = state.frame_status(f);
    return trace;
}

ScheduleTrace run(const ArrivalSequence& seq, std::string_view policy_name,
                  const PolicyConfig& cfg) {
    auto policy = make_policy(policy_name, seq, cfg);
    return run(seq, *policy, cfg.seed);
}

std::vector<std::string> verify_trace(const ArrivalSequence& seq, const ScheduleTrace& trace) {
    std::vector<std::string> violations;
    auto complain = [&](const std::string& msg) { violations.push_back(msg); };

    if (trace.sequence_digest != sequence_digest(seq))
        complain("sequence digest mismatch");
    if (trace.final_status.size() != seq.frames.size())
        complain("final status count does not match frame count");

    enum class Fate : std::uint8_t { Unseen, Delivered, Dropped };
    std::vector<Fate> fate(seq.packets.size(), Fate::Unseen);
    std::vector<int> delivered_count(seq.frames.size(), 0);
    std::vector<int> next_index(seq.frames.size(), 1);

    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
        const SlotRecord& rec = trace.slots[t];
        const Slot slot = static_cast<Slot>(t);
        if (rec.delivered) {
            PacketId pid = *rec.delivered;
            if (pid < 0 || pid >= static_cast<PacketId>(seq.packets.size())) {
                complain("slot " + std::to_string(t) + ": unknown packet delivered");
                continue;
            }
            const Packet& p = seq.packet(pid);
            if (fate[pid] != Fate::Unseen)
                complain("packet " + std::to_string(pid) + " consumed twice");
            fate[pid] = Fate::Delivered;
            if (slot < p.arrival)
                complain("packet " + std::to_string(pid) + " delivered before arrival");
            if (slot > p.deadline)
                complain("packet " + std::to_string(pid) + " delivered after deadline");
            if (p.index != next_index[p.frame])
                complain("frame " + std::to_string(p.frame) + ": index " +
                         std::to_string(p.index) + " delivered out of order");
            else
                ++next_index[p.frame];
            ++delivered_count[p.frame];
        }
        for (const Drop& d : rec.drops) {
            if (d.packet < 0 || d.packet >= static_cast<PacketId>(seq.packets.size())) {
                complain("slot " + std::to_string(t) + ": unknown packet dropped");
                continue;
            }
            if (fate[d.packet] != Fate::Unseen)
                complain("packet " + std::to_string(d.packet) + " consumed twice");
            fate[d.packet] = Fate::Dropped;
        }
    }

    // Conservation: every arriving packet is delivered or dropped-with-reason.
    for (const Packet& p : seq.packets)
        if (fate[p.id] == Fate::Unseen && p.deadline < static_cast<Slot>(trace.slots.size()))
            complain("packet " + std::to_string(p.id) + " neither delivered nor dropped");

    for (const Frame& f : seq.frames) {
        bool success = f.size > 0 && delivered_count[f.id] == f.size;
        if (f.id < static_cast<FrameId>(trace.final_status.size())) {
            bool marked = trace.final_status[f.id] == FrameStatus::Successful;
            if (success != marked)
                complain("frame " + std::to_string(f.id) +
                         (marked ? " marked successful without all deliveries"
                                 : " delivered fully but not marked successful"));
        }
    }
    return violations;
}

namespace {

const char* status_name(FrameStatus s) {
    switch (s) {
        case FrameStatus::Alive: return "alive";
        case FrameStatus::Expired: return "expired";
        case FrameStatus::Successful: return "successful";
    }
    return "?";
}

FrameStatus status_from_name(const std::string& s) {
    if (s == "alive") return FrameStatus::Alive;
    if (s == "expired") return FrameStatus::Expired;
    if (s == "successful") return FrameStatus::Successful;
    throw std::runtime_error("bad frame status '" + s + "'");
}

}  // namespace

void write_trace(const ScheduleTrace& trace, std::ostream& os) {
    os << "# bdg trace\n";
    os << "policy=" << trace.policy << "\n";
    os << "seed=" << trace.seed << "\n";
    os << "digest=" << trace.sequence_digest << "\n";
    os << "slots=" << trace.slots.size() << "\n";
    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
        const SlotRecord& rec = trace.slots[t];
        if (rec.delivered) os << "slot=" << t << " deliver=" << *rec.delivered << "\n";
        for (const Drop& d : rec.drops)
            os << "slot=" << t << " drop=" << d.packet
               << " reason=" << drop_reason_name(d.reason) << "\n";
    }
    for (std::size_t f = 0; f < trace.final_status.size(); ++f)
        os << "frame=" << f << " status=" << status_name(trace.final_status[f]) << "\n";
}

ScheduleTrace read_trace(std::istream& is) {
    ScheduleTrace trace;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("trace parse error at line " + std::to_string(lineno) + ": " +
                                 what);
    };
    bool saw_policy = false, saw_seed = false, saw_digest = false, saw_slots = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        std::map<std::string, std::string> kv;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) fail("expected key=value, got '" + tok + "'");
            kv[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
        try {
            if (kv.count("policy")) {
                trace.policy = kv["policy"];
                saw_policy = true;
            } else if (kv.count("seed")) {
                trace.seed = std::stoull(kv["seed"]);
                saw_seed = true;
            } else if (kv.count("digest")) {
                trace.sequence_digest = kv["digest"];
                saw_digest = true;
            } else if (kv.count("slots")) {
                trace.slots.resize(std::stoull(kv["slots"]));
                saw_slots = true;
            } else if (kv.count("slot")) {
                std::size_t t = std::stoull(kv["slot"]);
                if (t >= trace.slots.size()) trace.slots.resize(t + 1);
                if (kv.count("deliver")) {
                    trace.slots[t].delivered = std::stoi(kv["deliver"]);
                } else if (kv.count("drop")) {
                    auto reason = drop_reason_from_name(kv["reason"]);
                    if (!reason) fail("unknown drop reason '" + kv["reason"] + "'");
                    trace.slots[t].drops.push_back({std::stoi(kv["drop"]), *reason});
                } else {
                    fail("slot line without deliver/drop");
                }
            } else if (kv.count("frame")) {
                std::size_t f = std::stoull(kv["frame"]);
                if (f >= trace.final_status.size()) trace.final_status.resize(f + 1);
                trace.final_status[f] = status_from_name(kv["status"]);
            } else {
                fail("unrecognized line");
            }
        } catch (const std::invalid_argument&) {
            fail("bad integer field");
        }
    }
    if (!saw_policy || !saw_seed || !saw_digest || !saw_slots)
        throw std::runtime_error("trace parse error: missing policy/seed/digest/slots header");
    return trace;
}

void write_trace_file(const ScheduleTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_trace(trace, os);
}

ScheduleTrace read_trace_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_trace(is);
}

}  // namespace bdg

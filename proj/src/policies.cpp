#include "bdg/policies.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

#include "bdg/rng.hpp"

namespace bdg {

FramePriority::FramePriority(const ArrivalSequence& seq, std::uint64_t seed) {
    rank_.resize(seq.frames.size());
    SplitMix64 rng(mix_seed(seed, 0x7072696f72697479ULL));

    std::vector<StreamId> streams;
    for (const Frame& f : seq.frames)
        if (f.stream > 0) streams.push_back(f.stream);
    std::sort(streams.begin(), streams.end());
    streams.erase(std::unique(streams.begin(), streams.end()), streams.end());
    rng.shuffle(streams);
    std::map<StreamId, std::uint64_t> stream_rank;
    for (std::size_t i = 0; i < streams.size(); ++i) stream_rank[streams[i]] = i;

    std::vector<FrameId> loose;
    for (const Frame& f : seq.frames)
        if (f.stream <= 0) loose.push_back(f.id);
    rng.shuffle(loose);

    // Streamed frames share their stream's rank; streamless frames follow.
    for (const Frame& f : seq.frames)
        if (f.stream > 0) rank_[f.id] = stream_rank[f.stream];
    for (std::size_t i = 0; i < loose.size(); ++i)
        rank_[loose[i]] = streams.size() + i;
}

namespace {

std::vector<TieBreak> normalize_chain(std::vector<TieBreak> chain) {
    if (std::find(chain.begin(), chain.end(), TieBreak::FixedRandomPriority) == chain.end())
        chain.push_back(TieBreak::FixedRandomPriority);
    return chain;
}

/// Picks the best frame among alive pending frames: max I_t(f), ties per
/// chain, final tie by frame id.
class FrameSelector {
public:
    FrameSelector(const ArrivalSequence& seq, const PolicyConfig& cfg)
        : chain_(normalize_chain(cfg.tie_breaks)), priority_(seq, cfg.seed) {}

    const FramePriority& priority() const { return priority_; }

    std::optional<FrameId> select(const SimulationState& st) const {
        std::optional<FrameId> best;
        for (FrameId f : st.pending_frames()) {
            if (st.frame_status(f) != FrameStatus::Alive) continue;
            if (!best || better(st, f, *best)) best = f;
        }
        return best;
    }

private:
    bool better(const SimulationState& st, FrameId a, FrameId b) const {
        if (st.first_pending_index(a) != st.first_pending_index(b))
            return st.first_pending_index(a) > st.first_pending_index(b);
        for (TieBreak tb : chain_) {
            switch (tb) {
                case TieBreak::MinResidualSlackOfFirstPending: {
                    Slot ra = slack_of_first(st, a), rb = slack_of_first(st, b);
                    if (ra != rb) return ra < rb;
                    break;
                }
                case TieBreak::MinPendingCount:
                    if (st.pending_count(a) != st.pending_count(b))
                        return st.pending_count(a) < st.pending_count(b);
                    break;
                case TieBreak::FixedRandomPriority:
                    if (priority_.rank(a) != priority_.rank(b))
                        return priority_.rank(a) < priority_.rank(b);
                    break;
            }
        }
        return a < b;
    }

    static Slot slack_of_first(const SimulationState& st, FrameId f) {
        return residual_slack(st.sequence().packet(*st.first_pending_packet(f)), st.now());
    }

    std::vector<TieBreak> chain_;
    FramePriority priority_;
};

class GreedyPolicy : public Policy {
public:
    GreedyPolicy(std::string name, const ArrivalSequence& seq, const PolicyConfig& cfg,
                 bool proactive)
        : name_(std::move(name)), selector_(seq, cfg), proactive_(proactive) {}

    std::string_view name() const override { return name_; }

    PolicyDecision decide(const SimulationState& st) override {
        PolicyDecision dec;
        auto f = selector_.select(st);
        if (!f) return dec;
        dec.deliver = *st.first_pending_packet(*f);
        if (proactive_) {
            for (FrameId g : st.pending_frames()) {
                if (g == *f) continue;
                const Frame& fr = st.sequence().frame(g);
                for (PacketId p : fr.packets)
                    if (st.is_pending(p)) dec.proactive_drops.push_back(p);
            }
        }
        return dec;
    }

private:
    std::string name_;
    FrameSelector selector_;
    bool proactive_;
};

class OpportunisticPolicy : public Policy {
public:
    OpportunisticPolicy(const ArrivalSequence& seq, const PolicyConfig& cfg)
        : priority_(seq, cfg.seed), literal_(cfg.literal_overflow_rule) {}

    std::string_view name() const override { return "opportunistic"; }

    PolicyDecision decide(const SimulationState& st) override {
        PolicyDecision dec;
        auto admitted = build_provisional_schedule(st, priority_, literal_);
        // Deliver the minimum-residual-slack first-pending packet among
        // admitted frames; ties go to the earlier-admitted frame.
        std::optional<PacketId> pick;
        Slot pick_slack = 0;
        for (FrameId f : admitted) {
            PacketId p = *st.first_pending_packet(f);
            Slot r = residual_slack(st.sequence().packet(p), st.now());
            if (!pick || r < pick_slack) {
                pick = p;
                pick_slack = r;
            }
        }
        dec.deliver = pick;
        return dec;
    }

private:
    FramePriority priority_;
    bool literal_;
};

}  // namespace

std::vector<FrameId> build_provisional_schedule(const SimulationState& st,
                                                const FramePriority& priority,
                                                bool literal_overflow_rule) {
    const ArrivalSequence& seq = st.sequence();
    Slot now = st.now();

    std::vector<FrameId> order;
    for (FrameId f : st.pending_frames())
        if (st.frame_status(f) == FrameStatus::Alive) order.push_back(f);
    auto first_slack = [&](FrameId f) {
        return residual_slack(seq.packet(*st.first_pending_packet(f)), now);
    };
    std::sort(order.begin(), order.end(), [&](FrameId a, FrameId b) {
        if (st.first_pending_index(a) != st.first_pending_index(b))
            return st.first_pending_index(a) > st.first_pending_index(b);
        if (first_slack(a) != first_slack(b)) return first_slack(a) < first_slack(b);
        if (priority.rank(a) != priority.rank(b)) return priority.rank(a) < priority.rank(b);
        return a < b;
    });

    Slot smax = seq.params.d;
    for (FrameId f : order)
        for (PacketId p : seq.frame(f).packets)
            if (st.is_pending(p)) smax = std::max(smax, residual_slack(seq.packet(p), now));

    std::vector<int> count(smax + 1, 0);  // count[s]: admitted packets with slack s
    std::vector<FrameId> admitted;
    for (FrameId f : order) {
        for (PacketId p : seq.frame(f).packets)
            if (st.is_pending(p)) ++count[residual_slack(seq.packet(p), now)];
        // Slots now..now+s give s+1 delivery opportunities for packets with
        // residual slack <= s (delivery at slack 0 is legal); the literal
        // rule demands one fewer.
        bool ok = true;
        long long cum = 0;
        for (Slot s = 0; s <= smax && ok; ++s) {
            cum += count[s];
            ok = cum <= (literal_overflow_rule ? s : s + 1);
        }
        if (ok) {
            admitted.push_back(f);
        } else {
            for (PacketId p : seq.frame(f).packets)
                if (st.is_pending(p)) --count[residual_slack(seq.packet(p), now)];
        }
    }
    assert(order.empty() || literal_overflow_rule ||
           (!admitted.empty() && admitted.front() == order.front()));
    return admitted;
}

std::unique_ptr<Policy> make_policy(std::string_view name,
                                    const ArrivalSequence& seq,
                                    const PolicyConfig& cfg) {
    if (name == "pg")
        return std::make_unique<GreedyPolicy>("pg", seq, cfg, true);
    if (name == "greedy")
        return std::make_unique<GreedyPolicy>("greedy", seq, cfg, false);
    if (name == "greedy-slack") {
        PolicyConfig c = cfg;
        c.tie_breaks = {TieBreak::MinResidualSlackOfFirstPending};
        return std::make_unique<GreedyPolicy>("greedy-slack", seq, c, false);
    }
    if (name == "opportunistic")
        return std::make_unique<OpportunisticPolicy>(seq, cfg);
    std::string msg = "unknown policy '" + std::string(name) + "'; valid:";
    for (const auto& n : policy_names()) msg += " " + n;
    throw std::invalid_argument(msg);
}

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names = {"pg", "greedy", "greedy-slack",
                                                   "opportunistic"};
    return names;
}

}  // namespace bdg

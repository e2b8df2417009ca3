// Command-line front end: scenario generation, single runs, parameter
// sweeps, the offline oracle, and trace verification.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bdg/engine.hpp"
#include "bdg/metrics.hpp"
#include "bdg/offline.hpp"
#include "bdg/policies.hpp"
#include "bdg/rng.hpp"
#include "bdg/traffic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace bdg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
public:
    static Config load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open config file " + path);
        Config cfg;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line is not key=value: '" + line + "'");
            cfg.kv_[line.substr(0, eq)] = line.substr(eq + 1);
        }
        return cfg;
    }

    std::string str(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing config field '" + key + "'");
        return it->second;
    }

    std::string str_or(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    long long integer(const std::string& key) const {
        try {
            return std::stoll(str(key));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config field '" + key + "' is not an integer");
        }
    }

    long long integer_or(const std::string& key, long long fallback) const {
        return kv_.count(key) ? integer(key) : fallback;
    }

    std::vector<long long> int_list(const std::string& key) const {
        std::vector<long long> out;
        std::istringstream ss(str(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stoll(tok));
            } catch (const std::exception&) {
                throw ConfigError("config field '" + key + "' has a non-integer entry '" +
                                  tok + "'");
            }
        }
        if (out.empty()) throw ConfigError("config field '" + key + "' is empty");
        return out;
    }

    std::vector<std::string> str_list(const std::string& key) const {
        std::vector<std::string> out;
        std::istringstream ss(str(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(tok);
        if (out.empty()) throw ConfigError("config field '" + key + "' is empty");
        return out;
    }

private:
    std::map<std::string, std::string> kv_;
};

void echo_validation(const ArrivalSequence& seq) {
    auto violations = validate_sequence(seq);
    if (violations.empty()) {
        std::cout << "validation: ok (" << seq.frames.size() << " frames, "
                  << seq.packets.size() << " packets, horizon " << seq.horizon << ")\n";
    } else {
        std::cout << "validation: " << violations.size() << " violation(s)\n";
        for (const auto& v : violations) std::cout << "  " << v << "\n";
    }
}

int cmd_generate(const std::string& config_path, const std::string& out_path) {
    Config cfg = Config::load(config_path);
    const std::string kind = cfg.str("kind");
    if (kind == "video") {
        VideoScenario spec;
        spec.streams = static_cast<int>(cfg.integer("streams"));
        spec.frames_per_stream = static_cast<int>(cfg.integer("frames_per_stream"));
        spec.k = static_cast<int>(cfg.integer("k"));
        spec.d = static_cast<int>(cfg.integer("d"));
        spec.frame_interval = cfg.integer_or("frame_interval", 0);
        spec.jitter_max = static_cast<int>(cfg.integer_or("jitter_max", 5));
        spec.seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
        ArrivalSequence seq = gen_video(spec);
        write_sequence_file(seq, out_path);
        echo_validation(seq);
        return kExitOk;
    }
    if (kind == "adversary") {
        AdversarySpec spec;
        const std::string variant = cfg.str_or("variant", "burst");
        if (variant == "burst")
            spec.variant = AdversaryVariant::BurstBounded;
        else if (variant == "token")
            spec.variant = AdversaryVariant::TokenBucket;
        else
            throw ConfigError("config field 'variant' must be burst or token");
        spec.b = static_cast<int>(cfg.integer("b"));
        spec.d = static_cast<int>(cfg.integer("d"));
        spec.k = static_cast<int>(cfg.integer("k"));
        spec.n = static_cast<int>(cfg.integer("n"));
        PolicyConfig pc;
        pc.seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
        AdversaryInstance inst = gen_lower_bound(spec, cfg.str("policy"), pc);
        write_sequence_file(inst.seq, out_path);
        std::ofstream side(out_path + ".adversary");
        if (!side) throw std::runtime_error("cannot open " + out_path + ".adversary");
        side << "# frames completable by the adversary\n";
        for (FrameId f : inst.adversary_frames) side << f << "\n";
        echo_validation(inst.seq);
        std::cout << "adversary frames: " << inst.adversary_frames.size() << "\n";
        return kExitOk;
    }
    throw ConfigError("config field 'kind' must be video or adversary");
}

int cmd_run(const std::string& seq_path, const std::string& policy_name, std::uint64_t seed,
            const std::string& out_path) {
    ArrivalSequence seq = read_sequence_file(seq_path);
    PolicyConfig pc;
    pc.seed = seed;
    ScheduleTrace trace = run(seq, policy_name, pc);
    OfflineSolution bench = benchmark_offline(seq);
    MetricsReport rep = compute_report(seq, trace, bench);

    std::cout << "policy " << policy_name << " on " << seq_path << " (seed " << seed << ")\n";
    std::cout << "  goodput            " << rep.goodput << "\n";
    std::cout << "  benchmark goodput  " << rep.benchmark_goodput << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", rep.goodput_ratio);
    std::cout << "  goodput ratio      " << buf << "\n";
    std::cout << "  delivered packets  " << rep.total_delivered << "\n";
    for (int r = 0; r < 4; ++r)
        if (rep.drops_by_reason[r] > 0)
            std::cout << "  drops (" << drop_reason_name(static_cast<DropReason>(r)) << ") "
                      << rep.drops_by_reason[r] << "\n";
    if (!out_path.empty()) {
        write_trace_file(trace, out_path);
        std::cout << "trace written to " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path) {
    Config cfg = Config::load(config_path);
    if (cfg.str("kind") != "sweep") throw ConfigError("config field 'kind' must be sweep");
    auto policies = cfg.str_list("policies");
    auto ks = cfg.int_list("k");
    auto ds = cfg.int_list("d");
    std::vector<long long> jitters{cfg.integer_or("jitter_max", 5)};
    try {
        jitters = cfg.int_list("jitter_max");
    } catch (const ConfigError&) {
    }
    const int streams = static_cast<int>(cfg.integer_or("streams", 50));
    const int frames_per_stream = static_cast<int>(cfg.integer("frames_per_stream"));
    const int nseeds = static_cast<int>(cfg.integer_or("seeds", 1));
    const std::uint64_t master = static_cast<std::uint64_t>(cfg.integer_or("master_seed", 1));

    struct Cell {
        std::string policy;
        int k, d, jitter, seed_index;
    };
    std::vector<Cell> cells;
    for (const auto& p : policies)
        for (long long k : ks)
            for (long long d : ds)
                for (long long j : jitters)
                    for (int s = 0; s < nseeds; ++s)
                        cells.push_back({p, static_cast<int>(k), static_cast<int>(d),
                                         static_cast<int>(j), s});

    std::vector<std::string> rows(cells.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        char buf[256];
        try {
            // Split the master seed so cells are independent yet reproducible:
            // each cell mixes the master with its coordinate tuple.
            std::uint64_t cell_seed = master;
            cell_seed = mix_seed(cell_seed, std::hash<std::string>{}(c.policy));
            cell_seed = mix_seed(cell_seed, static_cast<std::uint64_t>(c.k) << 32 | c.d);
            cell_seed = mix_seed(cell_seed,
                                 static_cast<std::uint64_t>(c.jitter) << 32 | c.seed_index);

            VideoScenario spec;
            spec.streams = streams;
            spec.frames_per_stream = frames_per_stream;
            spec.k = c.k;
            spec.d = c.d;
            spec.jitter_max = c.jitter;
            spec.seed = cell_seed;
            ArrivalSequence seq = gen_video(spec);
            PolicyConfig pc;
            pc.seed = cell_seed;
            ScheduleTrace trace = run(seq, c.policy, pc);
            OfflineSolution bench = benchmark_offline(seq);
            MetricsReport rep = compute_report(seq, trace, bench);
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%d,%d,%.6f", c.policy.c_str(), c.k,
                          c.d, c.jitter, c.seed_index, rep.goodput, rep.benchmark_goodput,
                          rep.goodput_ratio);
            rows[i] = buf;
        } catch (const std::exception& e) {
            std::snprintf(buf, sizeof buf, "# cell %s,%d,%d,%d,%d failed: %s",
                          c.policy.c_str(), c.k, c.d, c.jitter, c.seed_index, e.what());
            rows[i] = buf;
        }
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open " + out_path + " for writing");
        os = &file;
    }
    *os << "policy,k,d,jitter,seed,goodput,benchmark_goodput,ratio\n";
    for (const auto& r : rows) *os << r << "\n";
    if (!out_path.empty()) std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& seq_path, int max_frames) {
    ArrivalSequence seq = read_sequence_file(seq_path);
    OfflineSolution opt;
    try {
        opt = brute_force_optimal(seq, max_frames);
    } catch (const std::invalid_argument& e) {
        std::cerr << "oracle: " << e.what() << "\n";
        return kExitValidation;
    }
    OfflineSolution bench = benchmark_offline(seq);

    auto print_solution = [](const char* name, const OfflineSolution& sol) {
        std::cout << name << ": goodput " << sol.goodput << "\n";
        std::cout << "  accepted frames:";
        for (FrameId f : sol.accepted) std::cout << " " << f;
        std::cout << "\n  schedule:";
        for (auto [slot, p] : sol.schedule) std::cout << " " << slot << ":" << p;
        std::cout << "\n";
    };
    print_solution("optimal (brute force)", opt);
    print_solution("benchmark (greedy admission)", bench);
    return kExitOk;
}

int cmd_verify(const std::string& seq_path, const std::string& trace_path) {
    ArrivalSequence seq = read_sequence_file(seq_path);
    ScheduleTrace trace = read_trace_file(trace_path);
    auto violations = verify_trace(seq, trace);
    if (violations.empty()) {
        std::cout << "trace ok: goodput " << trace.goodput() << "\n";
        return kExitOk;
    }
    std::cout << violations.size() << " violation(s):\n";
    for (const auto& v : violations) std::cout << "  " << v << "\n";
    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded-delay goodput scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path, seq_path, trace_path, out_path, policy = "greedy";
    std::uint64_t seed = 1;
    int max_frames = 20;

    auto* gen = app.add_subcommand("generate", "generate a sequence file from a scenario config");
    gen->add_option("--config", config_path, "scenario config (key=value lines)")->required();
    gen->add_option("--out", out_path, "output sequence file")->required();

    auto* runc = app.add_subcommand("run", "simulate one policy over a sequence file");
    runc->add_option("--seq", seq_path, "sequence file")->required();
    runc->add_option("--policy", policy, "policy name");
    runc->add_option("--seed", seed, "tie-break seed");
    runc->add_option("--out", out_path, "trace output file");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep, emit CSV");
    sweep->add_option("--config", config_path, "sweep config")->required();
    sweep->add_option("--out", out_path, "CSV output file (default stdout)");

    auto* oracle = app.add_subcommand("oracle", "exact optimum and offline benchmark");
    oracle->add_option("--seq", seq_path, "sequence file")->required();
    oracle->add_option("--max-frames", max_frames, "brute-force frame limit");

    auto* verify = app.add_subcommand("verify", "check a trace against its sequence");
    verify->add_option("--seq", seq_path, "sequence file")->required();
    verify->add_option("--trace", trace_path, "trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_generate(config_path, out_path);
        if (runc->parsed()) return cmd_run(seq_path, policy, seed, out_path);
        if (sweep->parsed()) return cmd_sweep(config_path, out_path);
        if (oracle->parsed()) return cmd_oracle(seq_path, max_frames);
        if (verify->parsed()) return cmd_verify(seq_path, trace_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}

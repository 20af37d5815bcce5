#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fixedform/annealer.hpp"
#include "fixedform/bank_io.hpp"
#include "fixedform/counts.hpp"
#include "fixedform/errors.hpp"
#include "fixedform/fit.hpp"
#include "fixedform/irt.hpp"
#include "fixedform/sampler.hpp"
#include "fixedform/target.hpp"

namespace fixedform::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Exit code 1 with a message, for argument combinations CLI11 cannot check.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every flag of a command, so that values can be filled from a --config
// JSON object (flags on the command line win) and dumped into the manifest.
class ParamSet {
public:
    template <typename T>
    CLI::Option* option(CLI::App& app, const std::string& flags, const std::string& key, T& field,
                        const std::string& help) {
        CLI::Option* opt = app.add_option(flags, field, help)->capture_default_str();
        entries_.push_back({key, opt, [&field](const json& j) { field = j.get<T>(); },
                            [&field] { return json(field); }, false});
        return opt;
    }

    CLI::Option* flag(CLI::App& app, const std::string& flags, const std::string& key, bool& field,
                      const std::string& help) {
        CLI::Option* opt = app.add_flag(flags, field, help);
        entries_.push_back({key, opt, [&field](const json& j) { field = j.get<bool>(); },
                            [&field] { return json(field); }, false});
        return opt;
    }

    void apply_config(const json& params) {
        for (auto& e : entries_) {
            if (e.opt->count() == 0 && params.contains(e.key) && !params[e.key].is_null()) {
                try {
                    e.load(params[e.key]);
                } catch (const json::exception& ex) {
                    throw UsageError("config key '" + e.key + "': " + ex.what());
                }
                e.from_config = true;
            }
        }
    }

    bool was_set(const std::string& key) const {
        for (const auto& e : entries_) {
            if (e.key == key) return e.opt->count() > 0 || e.from_config;
        }
        return false;
    }

    json dump() const {
        json j = json::object();
        for (const auto& e : entries_) {
            j[e.key] = e.save();
        }
        return j;
    }

private:
    struct Entry {
        std::string key;
        CLI::Option* opt;
        std::function<void(const json&)> load;
        std::function<json()> save;
        bool from_config;
    };
    std::vector<Entry> entries_;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_fingerprint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

json load_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    try {
        json j = json::parse(in);
        if (j.contains("params") && j["params"].is_object()) {
            return j["params"];
        }
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), 1);
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.empty()) {
        throw IoError("empty output path");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

void write_manifest(const std::string& command, const ParamSet& params, const fs::path& out_path,
                    const json& extra) {
    json m;
    m["command"] = command;
    m["tool"] = "fixedform";
    m["version"] = kToolVersion;
    m["timestamp"] = utc_timestamp();
    m["params"] = params.dump();
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        m[it.key()] = it.value();
    }
    m["replay"] = "fixedform " + command + " --config " + out_path.string() + ".manifest.json";
    write_text(fs::path(out_path.string() + ".manifest.json"), m.dump(2) + "\n");
}

// Shared by commands that evaluate information against a target.
struct TargetOptions {
    std::string target = "lsat";
    double target_scale = 1.0;
    std::size_t grid_points = AbilityGrid::kDefaultPoints;
    double epsilon = kDefaultEpsilon;

    void add(CLI::App& app, ParamSet& params) {
        params.option(app, "--target", "target", target,
                      "'lsat' or comma-separated polynomial coefficients, highest degree first");
        params.option(app, "--target-scale", "target-scale", target_scale, "Multiply the target by this factor");
        params.option(app, "--grid-points", "grid-points", grid_points, "Nodes of the uniform grid on [-3, 3]");
        params.option(app, "--epsilon", "epsilon", epsilon, "Target meeting error for the L2 conditions");
    }

    TargetSpec spec() const {
        if (!(target_scale > 0.0)) {
            throw UsageError("--target-scale must be > 0");
        }
        return parse_target(target).scaled(target_scale);
    }

    AbilityGrid grid() const {
        if (grid_points < 2) {
            throw UsageError("--grid-points must be >= 2");
        }
        return AbilityGrid(grid_points);
    }

    void check_epsilon() const {
        if (!(epsilon > 0.0)) {
            throw UsageError("--epsilon must be > 0");
        }
    }

    json describe() const {
        const TargetSpec s = spec();
        return json{{"coefficients_descending", s.descending()}, {"grid_points", grid_points}};
    }
};

void resolve_seed(ParamSet& params, std::uint64_t& seed, std::ostream& err) {
    if (params.was_set("seed")) {
        return;
    }
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    err << "seed: " << seed << "\n";
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

json fit_json(const FitReport& r) {
    return json{{"l2", r.l2_distance}, {"lambda", r.lambda},         {"energy", r.energy},
                {"exceeding", r.exceeding}, {"absolute", r.absolute_meeting}, {"relative", r.relative_meeting}};
}

// ---- commands ----------------------------------------------------------

struct GenBankCmd {
    BankGenSpec spec;
    std::string out;
    std::string config;
    ParamSet params;

    void add(CLI::App& app) {
        params.option(app, "--m", "m", spec.m, "Number of items");
        params.option(app, "--a-min", "a-min", spec.a_min, "Lower bound of discrimination");
        params.option(app, "--a-max", "a-max", spec.a_max, "Upper bound of discrimination");
        params.option(app, "--b-min", "b-min", spec.b_min, "Lower bound of difficulty");
        params.option(app, "--b-max", "b-max", spec.b_max, "Upper bound of difficulty");
        params.option(app, "--c", "c", spec.c_fixed, "Guessing probability shared by all items");
        params.option(app, "--seed", "seed", spec.seed, "Generator seed");
        params.option(app, "-o,--out", "out", out, "Output bank CSV");
    }

    int run(std::ostream& out_stream, std::ostream& err) {
        resolve_seed(params, spec.seed, err);
        if (out.empty()) throw UsageError("--out is required");
        try {
            spec.validate();
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        const ItemBank bank = generate_bank(spec);
        save_bank(bank, out);
        write_manifest("gen-bank", params, out, json{{"outputs", {out}}});
        out_stream << "wrote " << bank.size() << " items to " << out << "\n";
        return kExitOk;
    }
};

struct SweepCmd {
    std::string bank_path;
    std::string modes = "absolute,relative,exceeding";
    std::uint64_t k_all = 0;
    std::uint64_t k_meeting = 2'000'000;
    std::uint64_t k_exceeding = 100'000;
    std::size_t n_from = 10;
    std::size_t n_to = 130;
    std::size_t n_step = 5;
    std::string n_list;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out;
    TargetOptions target;
    ParamSet params;
    CLI::Option* k_all_opt = nullptr;

    void add(CLI::App& app) {
        params.option(app, "--bank", "bank", bank_path, "Bank CSV");
        params.option(app, "--modes", "modes", modes, "Comma-separated subset of absolute,relative,exceeding");
        k_all_opt = app.add_option("--K", k_all, "Draws per test length for every mode");
        params.option(app, "--K-meeting", "K-meeting", k_meeting, "Draws for absolute and relative meeting");
        params.option(app, "--K-exceeding", "K-exceeding", k_exceeding, "Draws for exceeding");
        params.option(app, "--n-from", "n-from", n_from, "First test length");
        params.option(app, "--n-to", "n-to", n_to, "Last test length (inclusive)");
        params.option(app, "--n-step", "n-step", n_step, "Test length increment");
        params.option(app, "--n-list", "n-list", n_list, "Explicit comma-separated test lengths (overrides the range)");
        params.option(app, "--seed", "seed", seed, "Master seed");
        params.option(app, "--workers", "workers", workers, "Worker threads; output does not depend on it");
        params.option(app, "-o,--out", "out", out, "Output sweep CSV");
        target.add(app, params);
    }

    int run(std::ostream& out_stream, std::ostream& err) {
        resolve_seed(params, seed, err);
        if (out.empty()) throw UsageError("--out is required");
        if (bank_path.empty()) throw UsageError("--bank is required");
        if (k_all_opt->count() > 0) {
            if (!params.was_set("K-meeting")) k_meeting = k_all;
            if (!params.was_set("K-exceeding")) k_exceeding = k_all;
        }
        if (workers < 1) throw UsageError("--workers must be >= 1");
        target.check_epsilon();

        const ItemBank bank = load_bank(bank_path);
        SweepConfig config;
        config.absolute = config.relative = config.exceeding = false;
        for (const auto& m : split_list(modes)) {
            EstimateMode mode;
            try {
                mode = parse_mode(m);
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
            if (mode == EstimateMode::absolute) config.absolute = true;
            if (mode == EstimateMode::relative) config.relative = true;
            if (mode == EstimateMode::exceeding) config.exceeding = true;
        }
        if (!config.absolute && !config.relative && !config.exceeding) throw UsageError("--modes is empty");
        if ((config.absolute || config.relative) && k_meeting < 1) throw UsageError("--K-meeting must be >= 1");
        if (config.exceeding && k_exceeding < 1) throw UsageError("--K-exceeding must be >= 1");

        if (!n_list.empty()) {
            for (const auto& s : split_list(n_list)) {
                std::size_t v = 0;
                try {
                    v = std::stoul(s);
                } catch (const std::exception&) {
                    throw UsageError("bad --n-list entry '" + s + "'");
                }
                config.n_values.push_back(v);
            }
        } else {
            if (n_step < 1) throw UsageError("--n-step must be >= 1");
            if (n_from > n_to) throw UsageError("--n-from must not exceed --n-to");
            for (std::size_t n = n_from; n <= n_to; n += n_step) config.n_values.push_back(n);
        }
        for (std::size_t n : config.n_values) {
            if (n < 1 || n > bank.size()) {
                throw UsageError("test length " + std::to_string(n) + " outside [1, " + std::to_string(bank.size()) +
                                 "]");
            }
        }
        config.draws_meeting = k_meeting;
        config.draws_exceeding = k_exceeding;
        config.epsilon = target.epsilon;
        config.workers = workers;

        const Curve target_curve = tabulate_target(target.spec(), target.grid());
        const auto rows = sweep(bank, config, target_curve, seed);
        std::ostringstream csv;
        write_sweep_csv(rows, config, seed, csv);
        write_text(out, csv.str());
        write_manifest("sweep", params, out,
                       json{{"target", target.describe()},
                            {"inputs", {{"bank", {{"path", bank_path}, {"fnv1a64", file_fingerprint(bank_path)}}}}},
                            {"outputs", {out}}});
        out_stream << "wrote " << rows.size() << " rows to " << out << "\n";
        return kExitOk;
    }
};

struct AssembleCmd {
    std::string bank_path;
    std::size_t n = 65;
    AnnealConfig anneal_config;
    std::string trace_path;
    std::string out;
    TargetOptions target;
    ParamSet params;

    void add(CLI::App& app) {
        params.option(app, "--bank", "bank", bank_path, "Bank CSV");
        params.option(app, "--n", "n", n, "Test length");
        params.option(app, "--T0", "T0", anneal_config.t0, "Initial temperature");
        params.option(app, "--alpha", "alpha", anneal_config.alpha, "Geometric cooling factor");
        params.option(app, "--iters-per-temp", "iters-per-temp", anneal_config.iters_per_temp,
                      "Proposals per temperature level");
        params.option(app, "--max-proposals", "max-proposals", anneal_config.max_proposals, "Total proposal budget");
        params.flag(app, "--greedy-start", "greedy-start", anneal_config.greedy_start,
                    "Start from the n items with the largest information area");
        params.option(app, "--trace-stride", "trace-stride", anneal_config.trace_stride,
                      "Proposals between energy-trace samples");
        params.option(app, "--seed", "seed", anneal_config.seed, "Chain seed");
        params.option(app, "--trace", "trace", trace_path, "Optional energy-trace CSV");
        params.option(app, "-o,--out", "out", out, "Output test JSON");
        target.add(app, params);
    }

    int run(std::ostream& out_stream, std::ostream& err) {
        resolve_seed(params, anneal_config.seed, err);
        if (out.empty()) throw UsageError("--out is required");
        if (bank_path.empty()) throw UsageError("--bank is required");
        try {
            anneal_config.validate();
        } catch (const ConfigError& e) {
            throw UsageError(e.what());
        }
        target.check_epsilon();
        const ItemBank bank = load_bank(bank_path);
        if (n < 1 || n >= bank.size()) {
            throw UsageError("--n must lie in [1, " + std::to_string(bank.size() - 1) + "] for a bank of " +
                             std::to_string(bank.size()) + " items");
        }
        const Curve target_curve = tabulate_target(target.spec(), target.grid());
        const AnnealResult result = anneal(bank, n, target_curve, anneal_config);
        const Curve info = test_information(bank, result.test, target_curve.grid());

        json j;
        j["items"] = result.test.ids();
        j["energy"] = result.energy;
        j["succeeded"] = result.succeeded;
        j["proposals"] = result.proposals;
        j["accepted"] = result.accepted;
        j["final_T"] = result.final_t;
        j["n"] = n;
        j["seed"] = anneal_config.seed;
        j["fit"] = fit_json(fit_report(info, target_curve, target.epsilon));
        write_text(out, j.dump(2) + "\n");

        json outputs = json::array({out});
        if (!trace_path.empty()) {
            std::ostringstream trace;
            write_trace_csv(result.energy_trace, trace);
            write_text(trace_path, trace.str());
            outputs.push_back(trace_path);
        }
        write_manifest("assemble", params, out,
                       json{{"target", target.describe()},
                            {"inputs", {{"bank", {{"path", bank_path}, {"fnv1a64", file_fingerprint(bank_path)}}}}},
                            {"outputs", outputs}});
        if (!result.succeeded) {
            err << "no target-exceeding test found within " << result.proposals << " proposals (E = " << result.energy
                << ")\n";
            return kExitBudget;
        }
        out_stream << "found a target-exceeding test after " << result.proposals << " proposals\n";
        return kExitOk;
    }
};

struct CountsCmd {
    std::string sweep_path;
    std::string bank_path;
    std::size_t m = 0;
    std::size_t anchor = 50;
    std::string out;
    ParamSet params;

    void add(CLI::App& app) {
        params.option(app, "--sweep", "sweep", sweep_path, "Sweep CSV produced by 'sweep'");
        params.option(app, "--bank", "bank", bank_path, "Bank CSV (supplies m)");
        params.option(app, "--m", "m", m, "Bank size, if --bank is not given");
        params.option(app, "--anchor", "anchor", anchor, "Test length whose ratio anchors the extrapolation");
        params.option(app, "-o,--out", "out", out, "Output counts CSV");
    }

    int run(std::ostream& out_stream, std::ostream&) {
        if (out.empty()) throw UsageError("--out is required");
        if (sweep_path.empty()) throw UsageError("--sweep is required");
        json inputs;
        if (!bank_path.empty()) {
            m = load_bank(bank_path).size();
            inputs["bank"] = {{"path", bank_path}, {"fnv1a64", file_fingerprint(bank_path)}};
        }
        if (m < 1) throw UsageError("give --bank or --m");
        std::ifstream in(sweep_path, std::ios::binary);
        if (!in) throw IoError("cannot open sweep file " + sweep_path);
        const auto rows = read_sweep_csv(in);
        inputs["sweep"] = {{"path", sweep_path}, {"fnv1a64", file_fingerprint(sweep_path)}};

        std::vector<CountsRow> counts;
        try {
            counts = counts_from_sweep(rows, m, anchor);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        std::ostringstream csv;
        write_counts_csv(counts, csv);
        write_text(out, csv.str());
        write_manifest("counts", params, out, json{{"inputs", inputs}, {"outputs", {out}}});
        out_stream << "wrote " << counts.size() << " rows to " << out << "\n";
        return kExitOk;
    }
};

struct EnumerateCmd {
    std::string bank_path;
    std::size_t n = 0;
    std::uint64_t budget = kEnumerationBudget;
    std::string out;
    TargetOptions target;
    ParamSet params;

    void add(CLI::App& app) {
        params.option(app, "--bank", "bank", bank_path, "Bank CSV");
        params.option(app, "--n", "n", n, "Test length");
        params.option(app, "--budget", "budget", budget, "Refuse when C(m, n) exceeds this");
        params.option(app, "-o,--out", "out", out, "Output counts JSON");
        target.add(app, params);
    }

    int run(std::ostream& out_stream, std::ostream&) {
        if (out.empty()) throw UsageError("--out is required");
        if (bank_path.empty()) throw UsageError("--bank is required");
        target.check_epsilon();
        const ItemBank bank = load_bank(bank_path);
        if (n < 1 || n > bank.size()) {
            throw UsageError("--n must lie in [1, " + std::to_string(bank.size()) + "]");
        }
        const Curve target_curve = tabulate_target(target.spec(), target.grid());
        const ExactCounts c = enumerate_exact(bank, n, target_curve, target.epsilon, budget);
        json j;
        j["m"] = bank.size();
        j["n"] = n;
        j["N"] = c.total;
        j["N_A"] = c.absolute;
        j["N_R"] = c.relative;
        j["N_E"] = c.exceeding;
        j["epsilon"] = target.epsilon;
        write_text(out, j.dump(2) + "\n");
        write_manifest("enumerate", params, out,
                       json{{"target", target.describe()},
                            {"inputs", {{"bank", {{"path", bank_path}, {"fnv1a64", file_fingerprint(bank_path)}}}}},
                            {"outputs", {out}}});
        out_stream << "N=" << c.total << " N_A=" << c.absolute << " N_R=" << c.relative << " N_E=" << c.exceeding
                   << "\n";
        return kExitOk;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Target-exceeding fixed-form test assembly and test-count estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    GenBankCmd gen_bank;
    SweepCmd sweep_cmd;
    AssembleCmd assemble;
    CountsCmd counts;
    EnumerateCmd enumerate;
    std::string config_path;

    struct Entry {
        CLI::App* app;
        ParamSet* params;
        std::function<int()> run;
    };
    std::vector<Entry> commands;
    auto register_cmd = [&](const char* name, const char* help, auto& cmd) {
        CLI::App* sub = app.add_subcommand(name, help);
        cmd.add(*sub);
        sub->add_option("--config", config_path, "JSON parameters or a run manifest; flags take precedence");
        commands.push_back({sub, &cmd.params, [&cmd, &out, &err] { return cmd.run(out, err); }});
    };
    register_cmd("gen-bank", "Generate a synthetic 3PL item bank", gen_bank);
    register_cmd("sweep", "Estimate meeting/exceeding ratios over a range of test lengths", sweep_cmd);
    register_cmd("assemble", "Search for a target-exceeding test by simulated annealing", assemble);
    register_cmd("counts", "Turn a ratio sweep into log10 test counts", counts);
    register_cmd("enumerate", "Exactly count meeting/exceeding tests on a small bank", enumerate);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (auto& c : commands) {
            if (!c.app->parsed()) continue;
            if (!config_path.empty()) {
                c.params->apply_config(load_json(config_path));
            }
            return c.run();
        }
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace fixedform::cli

#include "fixedform/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>

#include "fixedform/errors.hpp"

namespace fixedform {

std::string to_string(EstimateMode mode) {
    switch (mode) {
        case EstimateMode::absolute:
            return "absolute";
        case EstimateMode::relative:
            return "relative";
        case EstimateMode::exceeding:
            return "exceeding";
    }
    return "?";
}

EstimateMode parse_mode(std::string_view text) {
    if (text == "absolute") return EstimateMode::absolute;
    if (text == "relative") return EstimateMode::relative;
    if (text == "exceeding") return EstimateMode::exceeding;
    throw ConfigError("unknown mode '" + std::string(text) + "'; expected absolute, relative or exceeding");
}

EstimateResult make_estimate(std::size_t n, std::uint64_t draws, std::uint64_t hits, EstimateMode mode,
                             std::optional<double> epsilon, std::uint64_t seed) {
    EstimateResult r;
    r.n = n;
    r.draws = draws;
    r.hits = hits;
    r.mu_hat = draws == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(draws);
    r.std_err = draws == 0 ? 0.0 : std::sqrt(r.mu_hat * (1.0 - r.mu_hat) / static_cast<double>(draws));
    r.mode = mode;
    r.epsilon = epsilon;
    r.seed = seed;
    return r;
}

SubsetDrawer::SubsetDrawer(std::size_t m) : perm_(m) { reset(); }

void SubsetDrawer::reset() { std::iota(perm_.begin(), perm_.end(), ItemId{0}); }

std::span<const ItemId> SubsetDrawer::draw(std::size_t n, Rng& rng) {
    const std::size_t m = perm_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, m - i));
        std::swap(perm_[i], perm_[j]);
    }
    return {perm_.data(), n};
}

namespace {

void require_length(std::size_t n, std::size_t m) {
    if (n < 1 || n > m) {
        throw DomainError("test length n = " + std::to_string(n) + " must lie in [1, " + std::to_string(m) + "]");
    }
}

void require_draws(std::uint64_t draws) {
    if (draws < 1) {
        throw ConfigError("number of draws K must be >= 1");
    }
}

}  // namespace

TestForm draw_random_test(const ItemBank& bank, std::size_t n, Rng& rng) {
    require_length(n, bank.size());
    SubsetDrawer drawer(bank.size());
    const auto picked = drawer.draw(n, rng);
    return TestForm::from_ids({picked.begin(), picked.end()}, bank);
}

HitCounts count_hits(const ItemCurveTable& table, const FitClassifier& classifier, std::size_t n,
                     const DrawBudget& budget, std::uint64_t seed, unsigned workers) {
    require_length(n, table.items());
    if (!(table.grid() == classifier.target().grid())) {
        throw GridError("item curves and target are tabulated on different grids");
    }
    const std::uint64_t total = std::max({budget.absolute, budget.relative, budget.exceeding});
    const std::uint64_t chunks = (total + kChunkDraws - 1) / kChunkDraws;
    std::vector<HitCounts> per_chunk(chunks);

    auto run_chunk = [&](std::uint64_t c, SubsetDrawer& drawer, std::vector<double>& curve) {
        Rng rng(derive_seed(seed, c));
        drawer.reset();
        HitCounts hits;
        const std::uint64_t begin = c * kChunkDraws;
        const std::uint64_t end = std::min(total, begin + kChunkDraws);
        for (std::uint64_t i = begin; i < end; ++i) {
            unsigned modes = 0;
            if (i < budget.absolute) modes |= kAbsolute;
            if (i < budget.relative) modes |= kRelative;
            if (i < budget.exceeding) modes |= kExceeding;
            table.sum_into(drawer.draw(n, rng), curve);
            const unsigned got = classifier.classify(curve, modes);
            hits.absolute += (got & kAbsolute) ? 1 : 0;
            hits.relative += (got & kRelative) ? 1 : 0;
            hits.exceeding += (got & kExceeding) ? 1 : 0;
        }
        per_chunk[c] = hits;
    };

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        SubsetDrawer drawer(table.items());
        std::vector<double> curve(table.points());
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            run_chunk(c, drawer, curve);
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(chunks, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    HitCounts sum;
    for (const auto& h : per_chunk) {
        sum.absolute += h.absolute;
        sum.relative += h.relative;
        sum.exceeding += h.exceeding;
    }
    return sum;
}

EstimateResult estimate_mu(const ItemBank& bank, std::size_t n, std::uint64_t draws, EstimateMode mode,
                           const Curve& target_curve, std::optional<double> epsilon, std::uint64_t seed,
                           unsigned workers) {
    require_draws(draws);
    require_length(n, bank.size());
    if (mode == EstimateMode::relative) {
        throw ConfigError("relative meeting is estimated by estimate_mu_relative");
    }
    if ((mode == EstimateMode::absolute) != epsilon.has_value()) {
        throw ConfigError("epsilon must be given for absolute meeting and only then");
    }
    const ItemCurveTable table(bank, target_curve.grid());
    const FitClassifier classifier(target_curve, epsilon.value_or(kDefaultEpsilon));
    DrawBudget budget;
    if (mode == EstimateMode::absolute) {
        budget.absolute = draws;
    } else {
        budget.exceeding = draws;
    }
    const HitCounts hits = count_hits(table, classifier, n, budget, seed, workers);
    return make_estimate(n, draws, mode == EstimateMode::absolute ? hits.absolute : hits.exceeding, mode, epsilon,
                         seed);
}

EstimateResult estimate_mu_relative(const ItemBank& bank, std::size_t n, std::uint64_t draws,
                                    const Curve& target_curve, double epsilon, std::uint64_t seed,
                                    unsigned workers) {
    require_draws(draws);
    require_length(n, bank.size());
    const ItemCurveTable table(bank, target_curve.grid());
    const FitClassifier classifier(target_curve, epsilon);
    DrawBudget budget;
    budget.relative = draws;
    const HitCounts hits = count_hits(table, classifier, n, budget, seed, workers);
    return make_estimate(n, draws, hits.relative, EstimateMode::relative, epsilon, seed);
}

std::vector<SweepRow> sweep(const ItemBank& bank, const SweepConfig& config, const Curve& target_curve,
                            std::uint64_t seed) {
    if (config.n_values.empty()) {
        throw ConfigError("sweep needs at least one test length");
    }
    if (!config.absolute && !config.relative && !config.exceeding) {
        throw ConfigError("sweep needs at least one mode");
    }
    if (config.exceeding) require_draws(config.draws_exceeding);
    if (config.absolute || config.relative) require_draws(config.draws_meeting);
    for (std::size_t n : config.n_values) {
        require_length(n, bank.size());
    }

    const ItemCurveTable table(bank, target_curve.grid());
    const FitClassifier classifier(target_curve, config.epsilon);
    DrawBudget budget;
    budget.absolute = config.absolute ? config.draws_meeting : 0;
    budget.relative = config.relative ? config.draws_meeting : 0;
    budget.exceeding = config.exceeding ? config.draws_exceeding : 0;

    std::vector<SweepRow> rows;
    rows.reserve(config.n_values.size());
    for (std::size_t n : config.n_values) {
        const std::uint64_t sub_seed = derive_seed(seed, n);
        const HitCounts hits = count_hits(table, classifier, n, budget, sub_seed, config.workers);
        SweepRow row;
        row.n = n;
        if (config.absolute) {
            row.absolute = make_estimate(n, budget.absolute, hits.absolute, EstimateMode::absolute, config.epsilon,
                                         sub_seed);
        }
        if (config.relative) {
            row.relative = make_estimate(n, budget.relative, hits.relative, EstimateMode::relative, config.epsilon,
                                         sub_seed);
        }
        if (config.exceeding) {
            row.exceeding = make_estimate(n, budget.exceeding, hits.exceeding, EstimateMode::exceeding,
                                          std::nullopt, sub_seed);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

void put_estimate(std::ostream& out, const std::optional<EstimateResult>& e) {
    if (e) {
        out << e->mu_hat << ',' << e->std_err;
    } else {
        out << ',';
    }
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) {
            return fields;
        }
        pos = comma + 1;
    }
}

template <typename T>
std::optional<T> parse_field(std::string_view field, std::size_t line_no) {
    if (field.empty()) {
        return std::nullopt;
    }
    T value{};
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size()) {
        throw ParseError("bad numeric field '" + std::string(field) + "'", line_no);
    }
    return value;
}

}  // namespace

void write_sweep_csv(std::span<const SweepRow> rows, const SweepConfig& config, std::uint64_t seed,
                     std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "n,mu_A,se_A,mu_R,se_R,mu_E,se_E,K_meeting,K_exceeding,seed\n";
    const bool meeting = config.absolute || config.relative;
    for (const auto& row : rows) {
        out << row.n << ',';
        put_estimate(out, row.absolute);
        out << ',';
        put_estimate(out, row.relative);
        out << ',';
        put_estimate(out, row.exceeding);
        out << ',';
        if (meeting) out << config.draws_meeting;
        out << ',';
        if (config.exceeding) out << config.draws_exceeding;
        out << ',' << seed << '\n';
    }
    out.precision(old_precision);
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("missing sweep header", 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "n,mu_A,se_A,mu_R,se_R,mu_E,se_E,K_meeting,K_exceeding,seed") {
        throw ParseError("unexpected sweep header '" + line + "'", line_no);
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 10) {
            throw ParseError("expected 10 fields, got " + std::to_string(f.size()), line_no);
        }
        const auto n = parse_field<std::size_t>(f[0], line_no);
        if (!n) throw ParseError("missing n", line_no);
        const auto k_meeting = parse_field<std::uint64_t>(f[7], line_no);
        const auto k_exceeding = parse_field<std::uint64_t>(f[8], line_no);
        const std::uint64_t seed = parse_field<std::uint64_t>(f[9], line_no).value_or(0);

        auto read_mode = [&](std::string_view mu_field, std::optional<std::uint64_t> draws,
                             EstimateMode mode) -> std::optional<EstimateResult> {
            const auto mu = parse_field<double>(mu_field, line_no);
            if (!mu) return std::nullopt;
            if (!(*mu >= 0.0 && *mu <= 1.0)) throw ParseError("ratio outside [0, 1]", line_no);
            const std::uint64_t k = draws.value_or(0);
            const auto hits = static_cast<std::uint64_t>(std::llround(*mu * static_cast<double>(k)));
            EstimateResult r = make_estimate(*n, k, hits, mode, std::nullopt, derive_seed(seed, *n));
            r.mu_hat = *mu;
            return r;
        };
        SweepRow row;
        row.n = *n;
        row.absolute = read_mode(f[1], k_meeting, EstimateMode::absolute);
        row.relative = read_mode(f[3], k_meeting, EstimateMode::relative);
        row.exceeding = read_mode(f[5], k_exceeding, EstimateMode::exceeding);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace fixedform

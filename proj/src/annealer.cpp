#include "fixedform/annealer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "fixedform/errors.hpp"
#include "fixedform/fit.hpp"
#include "fixedform/sampler.hpp"

namespace fixedform {

void AnnealConfig::validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) {
        throw ConfigError("initial temperature T0 must be > 0");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("cooling factor alpha must lie in (0, 1)");
    }
    if (iters_per_temp < 1) {
        throw ConfigError("iters_per_temp must be >= 1");
    }
    if (max_proposals < 1) {
        throw ConfigError("max_proposals must be >= 1");
    }
}

double acceptance_probability(double e_old, double e_new, double t) {
    if (!(t > 0.0)) {
        throw DomainError("temperature must be > 0");
    }
    if (e_new <= e_old) {
        return 1.0;
    }
    return std::exp(-(e_new - e_old) / t);
}

TestForm propose_swap(const TestForm& test, const ItemBank& bank, Rng& rng) {
    const std::size_t n = test.size();
    const std::size_t m = bank.size();
    if (n >= m) {
        throw NoMoveError("test already contains every bank item; no swap exists");
    }
    std::vector<ItemId> outside;
    outside.reserve(m - n);
    for (std::size_t id = 0; id < m; ++id) {
        if (!test.contains(static_cast<ItemId>(id))) {
            outside.push_back(static_cast<ItemId>(id));
        }
    }
    std::vector<ItemId> ids = test.ids();
    const auto leaving = static_cast<std::size_t>(uniform_index(rng, n));
    const auto entering = static_cast<std::size_t>(uniform_index(rng, outside.size()));
    ids[leaving] = outside[entering];
    return TestForm::from_ids(std::move(ids), bank);
}

namespace {

// Chain state: test members, the items outside the test, and the test's
// information curve maintained by adding and subtracting item rows.
struct Chain {
    std::vector<ItemId> members;
    std::vector<ItemId> outside;
    std::vector<double> curve;
};

Chain initial_chain(const ItemCurveTable& table, std::size_t n, const AnnealConfig& config, Rng& rng) {
    const std::size_t m = table.items();
    std::vector<ItemId> order(m);
    std::iota(order.begin(), order.end(), ItemId{0});
    if (config.greedy_start) {
        const double step = table.grid().step();
        std::vector<double> area(m);
        for (std::size_t i = 0; i < m; ++i) {
            area[i] = kernels::trapezoid(table.row(static_cast<ItemId>(i)), step);
        }
        std::stable_sort(order.begin(), order.end(), [&](ItemId x, ItemId y) { return area[x] > area[y]; });
    } else {
        SubsetDrawer drawer(m);
        const auto picked = drawer.draw(n, rng);
        std::vector<bool> in(m, false);
        for (ItemId id : picked) in[id] = true;
        order.assign(picked.begin(), picked.end());
        for (std::size_t id = 0; id < m; ++id) {
            if (!in[id]) order.push_back(static_cast<ItemId>(id));
        }
    }
    Chain chain;
    chain.members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    chain.outside.assign(order.begin() + static_cast<std::ptrdiff_t>(n), order.end());
    chain.curve.resize(table.points());
    table.sum_into(chain.members, chain.curve);
    return chain;
}

// Strict exceeding on a curve recomputed from the item parameters, not from
// the incrementally maintained sums.
bool verified_exceeding(const ItemBank& bank, const TestForm& form, const Curve& target_curve) {
    return is_exceeding(test_information(bank, form, target_curve.grid()), target_curve);
}

}  // namespace

AnnealResult anneal(const ItemBank& bank, std::size_t n, const Curve& target_curve, const AnnealConfig& config) {
    config.validate();
    const std::size_t m = bank.size();
    if (n < 1 || n >= m) {
        throw DomainError("annealing needs 1 <= n < m; got n = " + std::to_string(n) + ", m = " + std::to_string(m));
    }
    const ItemCurveTable table(bank, target_curve.grid());
    const auto target = target_curve.values();
    const double step = target_curve.grid().step();

    Rng rng(config.seed);
    Chain chain = initial_chain(table, n, config, rng);
    double energy = kernels::deficiency(chain.curve, target, step);
    double temperature = config.t0;

    AnnealResult result;
    auto record = [&](std::uint64_t proposal) {
        result.energy_trace.push_back({proposal, energy, temperature});
    };
    auto try_finish = [&]() -> bool {
        if (energy != 0.0 || !kernels::exceeds(chain.curve, target)) {
            return false;
        }
        return verified_exceeding(bank, TestForm::from_ids(chain.members, bank), target_curve);
    };
    auto resync = [&] {
        table.sum_into(chain.members, chain.curve);
        energy = kernels::deficiency(chain.curve, target, step);
    };

    if (config.trace_stride > 0) record(0);
    bool done = try_finish();
    std::vector<double> scratch(table.points());
    const std::size_t outside_count = m - n;

    std::uint64_t proposals = 0;
    while (!done && proposals < config.max_proposals) {
        const auto leaving = static_cast<std::size_t>(uniform_index(rng, n));
        const auto entering = static_cast<std::size_t>(uniform_index(rng, outside_count));
        std::copy(chain.curve.begin(), chain.curve.end(), scratch.begin());
        table.subtract_row(chain.members[leaving], scratch);
        table.add_row(chain.outside[entering], scratch);
        const double proposed = kernels::deficiency(scratch, target, step);
        ++proposals;

        bool accept = proposed <= energy;
        if (!accept) {
            accept = uniform01(rng) < acceptance_probability(energy, proposed, temperature);
        }
        if (accept) {
            std::swap(chain.members[leaving], chain.outside[entering]);
            chain.curve.swap(scratch);
            energy = proposed;
            ++result.accepted;
            done = try_finish();
        }

        if (!done && proposals % config.iters_per_temp == 0) {
            temperature *= config.alpha;
            // Bound floating-point drift of the running sums.
            resync();
            done = try_finish();
        }
        if (config.trace_stride > 0 && (done || proposals % config.trace_stride == 0)) {
            record(proposals);
        }
    }
    if (config.trace_stride > 0 && result.energy_trace.back().proposal != proposals) {
        record(proposals);
    }

    result.test = TestForm::from_ids(chain.members, bank);
    result.energy = energy;
    result.succeeded = done;
    result.proposals = proposals;
    result.final_t = temperature;
    return result;
}

std::vector<AnnealResult> anneal_many(const ItemBank& bank, std::size_t n, const Curve& target_curve,
                                      const AnnealConfig& config, std::size_t runs, unsigned workers) {
    config.validate();
    if (n < 1 || n >= bank.size()) {
        throw DomainError("annealing needs 1 <= n < m");
    }
    std::vector<AnnealResult> results(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            AnnealConfig run_config = config;
            run_config.seed = derive_seed(config.seed, r);
            results[r] = anneal(bank, n, target_curve, run_config);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(runs, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return results;
}

void write_trace_csv(std::span<const TraceSample> trace, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "proposal,energy,temperature\n";
    for (const auto& s : trace) {
        out << s.proposal << ',' << s.energy << ',' << s.temperature << '\n';
    }
    out.precision(old_precision);
}

}  // namespace fixedform

#pragma once

// Importance-sampling search for a target-exceeding test.
//
// A Markov chain over length-n tests moves by swapping one test item for one
// bank item outside the test and accepts with the Metropolis rule on the
// deficiency energy E (integrated shortfall below the target). The
// temperature cools geometrically, T <- alpha * T, after every
// iters_per_temp proposals. The chain stops at the first test with E = 0
// whose freshly recomputed information curve strictly exceeds the target at
// every node, or when the proposal budget runs out.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fixedform/irt.hpp"
#include "fixedform/rng.hpp"

namespace fixedform {

struct AnnealConfig {
    double t0 = 0.05;
    double alpha = 0.9;
    std::uint64_t iters_per_temp = 1'000;
    std::uint64_t max_proposals = 100'000;
    std::uint64_t seed = 0;
    // Start from the n items with the largest information area instead of a
    // uniform random test.
    bool greedy_start = false;
    // Record (proposal, E, T) every trace_stride proposals; 0 disables.
    std::uint64_t trace_stride = 100;

    void validate() const;  // throws ConfigError
};

struct TraceSample {
    std::uint64_t proposal = 0;
    double energy = 0.0;
    double temperature = 0.0;
};

struct AnnealResult {
    TestForm test;
    double energy = 0.0;
    bool succeeded = false;
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    std::vector<TraceSample> energy_trace;
    double final_t = 0.0;
};

// min(1, exp(-(e_new - e_old) / t)). Throws DomainError for t <= 0.
double acceptance_probability(double e_old, double e_new, double t);

// Replaces one uniformly chosen test item with one uniformly chosen bank item
// not in the test. Throws NoMoveError when the test already holds the bank.
TestForm propose_swap(const TestForm& test, const ItemBank& bank, Rng& rng);

// Runs one chain seeded with config.seed. Requires 1 <= n < m. Budget
// exhaustion is reported through succeeded = false, not an exception.
AnnealResult anneal(const ItemBank& bank, std::size_t n, const Curve& target_curve, const AnnealConfig& config);

// Independent chains with seeds derive_seed(config.seed, r) for r in [0, runs).
std::vector<AnnealResult> anneal_many(const ItemBank& bank, std::size_t n, const Curve& target_curve,
                                      const AnnealConfig& config, std::size_t runs, unsigned workers = 1);

// Header: proposal,energy,temperature.
void write_trace_csv(std::span<const TraceSample> trace, std::ostream& out);

}  // namespace fixedform

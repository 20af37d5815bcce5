#pragma once

// Monte Carlo estimation of the fractions of all length-n tests that meet
// (absolutely or relatively) or exceed a target information function.
//
// Reproducibility contract: a run with master seed s draws its tests in
// fixed chunks of kChunkDraws. Chunk c uses the stream Rng(derive_seed(s, c))
// and starts its subset sampler from the identity permutation. Hit counts are
// summed over chunks, so results do not depend on the worker count, and the
// first K draws of a run are the same whatever the total K.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fixedform/fit.hpp"
#include "fixedform/irt.hpp"
#include "fixedform/rng.hpp"

namespace fixedform {

inline constexpr std::uint64_t kChunkDraws = 4096;

enum class EstimateMode { absolute, relative, exceeding };

std::string to_string(EstimateMode mode);
EstimateMode parse_mode(std::string_view text);  // throws ConfigError

struct EstimateResult {
    std::size_t n = 0;
    std::uint64_t draws = 0;
    std::uint64_t hits = 0;
    double mu_hat = 0.0;
    double std_err = 0.0;
    EstimateMode mode = EstimateMode::exceeding;
    std::optional<double> epsilon;
    std::uint64_t seed = 0;
};

// Builds a result from counts; mu_hat = hits / draws, std_err the binomial one.
EstimateResult make_estimate(std::size_t n, std::uint64_t draws, std::uint64_t hits, EstimateMode mode,
                             std::optional<double> epsilon, std::uint64_t seed);

// Partial Fisher-Yates over a persistent permutation of 0..m-1. Each draw is
// an exactly uniform n-subset regardless of the permutation's current state.
class SubsetDrawer {
public:
    explicit SubsetDrawer(std::size_t m);

    // Returns the first n entries of the permutation after shuffling them in.
    std::span<const ItemId> draw(std::size_t n, Rng& rng);
    void reset();

private:
    std::vector<ItemId> perm_;
};

// A uniformly random test of n distinct items. Throws DomainError unless 1 <= n <= m.
TestForm draw_random_test(const ItemBank& bank, std::size_t n, Rng& rng);

// Mode is absolute or exceeding; epsilon must be given exactly when mode is
// absolute (ConfigError otherwise).
EstimateResult estimate_mu(const ItemBank& bank, std::size_t n, std::uint64_t draws, EstimateMode mode,
                           const Curve& target_curve, std::optional<double> epsilon, std::uint64_t seed,
                           unsigned workers = 1);

// Relative meeting: per draw lambda = S_J / S_I and a hit iff lambda < 1 and
// ||lambda I - J|| < epsilon. S_J is computed once.
EstimateResult estimate_mu_relative(const ItemBank& bank, std::size_t n, std::uint64_t draws,
                                    const Curve& target_curve, double epsilon, std::uint64_t seed,
                                    unsigned workers = 1);

// Hit counts for several predicates evaluated on one shared stream of draws.
// Draw i is classified for mode X iff i < draws_per_mode[X].
struct HitCounts {
    std::uint64_t absolute = 0;
    std::uint64_t relative = 0;
    std::uint64_t exceeding = 0;
};

struct DrawBudget {
    std::uint64_t absolute = 0;
    std::uint64_t relative = 0;
    std::uint64_t exceeding = 0;
};

HitCounts count_hits(const ItemCurveTable& table, const FitClassifier& classifier, std::size_t n,
                     const DrawBudget& budget, std::uint64_t seed, unsigned workers = 1);

struct SweepConfig {
    std::vector<std::size_t> n_values;
    std::uint64_t draws_exceeding = 100'000;
    std::uint64_t draws_meeting = 2'000'000;
    double epsilon = kDefaultEpsilon;
    bool absolute = true;
    bool relative = true;
    bool exceeding = true;
    unsigned workers = 1;
};

struct SweepRow {
    std::size_t n = 0;
    std::optional<EstimateResult> absolute;
    std::optional<EstimateResult> relative;
    std::optional<EstimateResult> exceeding;
};

// Row for length n uses the sub-seed derive_seed(seed, n), so each row equals
// what estimate_mu / estimate_mu_relative return for that sub-seed.
std::vector<SweepRow> sweep(const ItemBank& bank, const SweepConfig& config, const Curve& target_curve,
                            std::uint64_t seed);

// Header: n,mu_A,se_A,mu_R,se_R,mu_E,se_E,K_meeting,K_exceeding,seed.
// Fields of modes that were not run are left empty.
void write_sweep_csv(std::span<const SweepRow> rows, const SweepConfig& config, std::uint64_t seed,
                     std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace fixedform

#pragma once

// Exact and extrapolated test counts. Counts overflow 64 bits quickly
// (C(300, 150) is about 1e89), so they travel as log10 values.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fixedform/irt.hpp"
#include "fixedform/sampler.hpp"

namespace fixedform {

struct BinomialCount {
    double log10 = 0.0;
    std::optional<std::uint64_t> exact;  // present for m <= 64
};

// C(m, n). Throws DomainError when n > m.
BinomialCount binom_total(std::uint64_t m, std::uint64_t n);

// Counts N_X(n) over a set of test lengths, derived from one anchor length.
struct CountCurve {
    std::vector<std::size_t> n_values;
    std::vector<std::optional<double>> log10_counts;  // nullopt: mu = 0, no estimate
    std::size_t anchor_n = 0;
    double anchor_log10 = 0.0;
};

// Walks from the anchor count to every n in mu_curve with the binomial
// step ratios (m - j) / (j + 1) upward and j / (m - j + 1) downward, scaled
// by mu(n) / mu(anchor). Throws DomainError if the anchor is missing or has
// mu = 0; other entries with mu = 0 come back as nullopt.
CountCurve extrapolate_counts(std::size_t anchor_n, double anchor_count_log10,
                              const std::map<std::size_t, double>& mu_curve, std::size_t m);

// log10 of mu * C(m, n), the count implied by a ratio estimate.
double count_from_ratio_log10(std::size_t m, std::size_t n, double mu);

struct ExactCounts {
    std::uint64_t total = 0;
    std::uint64_t absolute = 0;
    std::uint64_t relative = 0;
    std::uint64_t exceeding = 0;
};

inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

// Classifies every n-subset of the bank, in lexicographic order. Throws
// BudgetError naming C(m, n) when it exceeds `budget`.
ExactCounts enumerate_exact(const ItemBank& bank, std::size_t n, const Curve& target_curve, double epsilon,
                            std::uint64_t budget = kEnumerationBudget);

// One row of the counts table built from a ratio sweep.
struct CountsRow {
    std::size_t n = 0;
    double log10_total = 0.0;
    std::optional<double> log10_absolute;
    std::optional<double> log10_relative;
    std::optional<double> log10_exceeding;
    std::vector<std::string> flags;
};

// Converts sweep ratios into count curves anchored at anchor_n. A mode that
// was swept but has mu = 0 at the anchor raises DomainError.
std::vector<CountsRow> counts_from_sweep(std::span<const SweepRow> rows, std::size_t m, std::size_t anchor_n);

// Header: n,log10_N,log10_N_A,log10_N_R,log10_N_E,flags.
void write_counts_csv(std::span<const CountsRow> rows, std::ostream& out);

}  // namespace fixedform

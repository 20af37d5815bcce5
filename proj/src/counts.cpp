#include "fixedform/counts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "fixedform/errors.hpp"
#include "fixedform/fit.hpp"

namespace fixedform {

BinomialCount binom_total(std::uint64_t m, std::uint64_t n) {
    if (n > m) {
        throw DomainError("C(m, n) needs n <= m; got m = " + std::to_string(m) + ", n = " + std::to_string(n));
    }
    BinomialCount out;
    if (m <= 64) {
        const std::uint64_t k = std::min(n, m - n);
        unsigned __int128 value = 1;
        // value stays C(m - k + i, i), an integer at every step.
        for (std::uint64_t i = 1; i <= k; ++i) {
            value = value * (m - k + i) / i;
        }
        out.exact = static_cast<std::uint64_t>(value);
        out.log10 = std::log10(static_cast<double>(*out.exact));
        return out;
    }
    const auto md = static_cast<double>(m);
    const auto nd = static_cast<double>(n);
    out.log10 = (std::lgamma(md + 1.0) - std::lgamma(nd + 1.0) - std::lgamma(md - nd + 1.0)) / std::log(10.0);
    return out;
}

double count_from_ratio_log10(std::size_t m, std::size_t n, double mu) {
    if (!(mu > 0.0)) {
        throw DomainError("count from ratio needs mu > 0");
    }
    return std::log10(mu) + binom_total(m, n).log10;
}

CountCurve extrapolate_counts(std::size_t anchor_n, double anchor_count_log10,
                              const std::map<std::size_t, double>& mu_curve, std::size_t m) {
    const auto anchor = mu_curve.find(anchor_n);
    if (anchor == mu_curve.end()) {
        throw DomainError("anchor n = " + std::to_string(anchor_n) + " has no ratio estimate");
    }
    if (!(anchor->second > 0.0)) {
        throw DomainError("ratio at anchor n = " + std::to_string(anchor_n) + " is zero; choose another anchor");
    }
    const double log_mu_anchor = std::log10(anchor->second);

    CountCurve curve;
    curve.anchor_n = anchor_n;
    curve.anchor_log10 = anchor_count_log10;
    for (const auto& [n, mu] : mu_curve) {
        if (n > m) {
            throw DomainError("test length " + std::to_string(n) + " exceeds bank size " + std::to_string(m));
        }
        curve.n_values.push_back(n);
        if (!(mu > 0.0)) {
            curve.log10_counts.emplace_back(std::nullopt);
            continue;
        }
        double log_steps = 0.0;
        if (n > anchor_n) {
            for (std::size_t j = anchor_n; j < n; ++j) {
                log_steps += std::log10(static_cast<double>(m - j) / static_cast<double>(j + 1));
            }
        } else {
            for (std::size_t j = anchor_n; j > n; --j) {
                log_steps += std::log10(static_cast<double>(j) / static_cast<double>(m - j + 1));
            }
        }
        curve.log10_counts.emplace_back(anchor_count_log10 + (std::log10(mu) - log_mu_anchor) + log_steps);
    }
    return curve;
}

ExactCounts enumerate_exact(const ItemBank& bank, std::size_t n, const Curve& target_curve, double epsilon,
                            std::uint64_t budget) {
    const std::size_t m = bank.size();
    if (n < 1 || n > m) {
        throw DomainError("test length n = " + std::to_string(n) + " must lie in [1, " + std::to_string(m) + "]");
    }
    const BinomialCount total = binom_total(m, n);
    if (!total.exact || *total.exact > budget) {
        throw BudgetError("enumeration of C(" + std::to_string(m) + ", " + std::to_string(n) + ") = 10^" +
                          std::to_string(total.log10) + " subsets exceeds the budget of " +
                          std::to_string(budget));
    }

    const ItemCurveTable table(bank, target_curve.grid());
    const FitClassifier classifier(target_curve, epsilon);
    std::vector<ItemId> subset(n);
    std::iota(subset.begin(), subset.end(), ItemId{0});
    std::vector<double> curve(table.points());

    ExactCounts counts;
    while (true) {
        table.sum_into(subset, curve);
        const unsigned hits = classifier.classify(curve, kAbsolute | kRelative | kExceeding);
        ++counts.total;
        counts.absolute += (hits & kAbsolute) ? 1 : 0;
        counts.relative += (hits & kRelative) ? 1 : 0;
        counts.exceeding += (hits & kExceeding) ? 1 : 0;

        // Next combination in lexicographic order.
        std::size_t i = n;
        while (i > 0 && subset[i - 1] == m - n + (i - 1)) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++subset[i - 1];
        for (std::size_t j = i; j < n; ++j) {
            subset[j] = subset[j - 1] + 1;
        }
    }
    return counts;
}

std::vector<CountsRow> counts_from_sweep(std::span<const SweepRow> rows, std::size_t m, std::size_t anchor_n) {
    std::map<std::size_t, double> mu_a, mu_r, mu_e;
    bool has_a = false, has_r = false, has_e = false;
    for (const auto& row : rows) {
        if (row.absolute) { mu_a[row.n] = row.absolute->mu_hat; has_a = true; }
        if (row.relative) { mu_r[row.n] = row.relative->mu_hat; has_r = true; }
        if (row.exceeding) { mu_e[row.n] = row.exceeding->mu_hat; has_e = true; }
    }

    auto curve_for = [&](const std::map<std::size_t, double>& mu, bool present,
                         const char* name) -> std::optional<CountCurve> {
        if (!present) return std::nullopt;
        const auto it = mu.find(anchor_n);
        if (it == mu.end() || !(it->second > 0.0)) {
            throw DomainError(std::string("mu_") + name + " is zero or missing at anchor n = " +
                              std::to_string(anchor_n) + "; pick an anchor where it was observed");
        }
        return extrapolate_counts(anchor_n, count_from_ratio_log10(m, anchor_n, it->second), mu, m);
    };
    const auto curve_a = curve_for(mu_a, has_a, "A");
    const auto curve_r = curve_for(mu_r, has_r, "R");
    const auto curve_e = curve_for(mu_e, has_e, "E");

    auto lookup = [](const std::optional<CountCurve>& curve, std::size_t n, const char* name,
                     std::vector<std::string>& flags) -> std::optional<double> {
        if (!curve) return std::nullopt;
        for (std::size_t i = 0; i < curve->n_values.size(); ++i) {
            if (curve->n_values[i] == n) {
                if (!curve->log10_counts[i]) {
                    flags.push_back(std::string("no_estimate_") + name);
                }
                return curve->log10_counts[i];
            }
        }
        flags.push_back(std::string("not_swept_") + name);
        return std::nullopt;
    };

    std::vector<CountsRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        CountsRow c;
        c.n = row.n;
        c.log10_total = binom_total(m, row.n).log10;
        c.log10_absolute = lookup(curve_a, row.n, "A", c.flags);
        c.log10_relative = lookup(curve_r, row.n, "R", c.flags);
        c.log10_exceeding = lookup(curve_e, row.n, "E", c.flags);
        out.push_back(std::move(c));
    }
    return out;
}

void write_counts_csv(std::span<const CountsRow> rows, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "n,log10_N,log10_N_A,log10_N_R,log10_N_E,flags\n";
    for (const auto& row : rows) {
        out << row.n << ',' << row.log10_total << ',';
        if (row.log10_absolute) out << *row.log10_absolute;
        out << ',';
        if (row.log10_relative) out << *row.log10_relative;
        out << ',';
        if (row.log10_exceeding) out << *row.log10_exceeding;
        out << ',';
        for (std::size_t i = 0; i < row.flags.size(); ++i) {
            out << (i ? ";" : "") << row.flags[i];
        }
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace fixedform

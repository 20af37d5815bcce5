#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "fixedform/irt.hpp"

namespace fixedform {

// Polynomial target information function. coefficients[k] multiplies theta^k.
class TargetSpec {
public:
    explicit TargetSpec(std::vector<double> ascending);

    // Accepts the human-readable highest-degree-first order.
    static TargetSpec from_descending(std::span<const double> descending);

    const std::vector<double>& coefficients() const noexcept { return coefficients_; }
    std::vector<double> descending() const;

    TargetSpec scaled(double factor) const;

    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;

private:
    std::vector<double> coefficients_;
};

// Horner evaluation.
double eval_target(const TargetSpec& spec, double theta);

// The LSAT information target
// 0.0046t^6 + 0.0303t^5 + 0.0093t^4 - 0.6154t^3 - 1.6408t^2 + 3.5254t + 13.328.
TargetSpec builtin_lsat_target();

// Throws DomainError if the target is not strictly positive at every node.
Curve tabulate_target(const TargetSpec& spec, const AbilityGrid& grid);

// "lsat" or a comma-separated coefficient list, highest degree first.
// Throws ConfigError on anything else.
TargetSpec parse_target(std::string_view text);

}  // namespace fixedform

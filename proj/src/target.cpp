#include "fixedform/target.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "fixedform/errors.hpp"

namespace fixedform {

TargetSpec::TargetSpec(std::vector<double> ascending) : coefficients_(std::move(ascending)) {
    if (coefficients_.empty()) {
        throw DomainError("target polynomial needs at least one coefficient");
    }
    for (double c : coefficients_) {
        if (!std::isfinite(c)) {
            throw DomainError("target coefficients must be finite");
        }
    }
}

TargetSpec TargetSpec::from_descending(std::span<const double> descending) {
    return TargetSpec(std::vector<double>(descending.rbegin(), descending.rend()));
}

std::vector<double> TargetSpec::descending() const {
    return {coefficients_.rbegin(), coefficients_.rend()};
}

TargetSpec TargetSpec::scaled(double factor) const {
    std::vector<double> out(coefficients_);
    for (double& c : out) {
        c *= factor;
    }
    return TargetSpec(std::move(out));
}

double eval_target(const TargetSpec& spec, double theta) {
    const auto& c = spec.coefficients();
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * theta + *it;
    }
    return acc;
}

TargetSpec builtin_lsat_target() {
    return TargetSpec({13.328, 3.5254, -1.6408, -0.6154, 0.0093, 0.0303, 0.0046});
}

Curve tabulate_target(const TargetSpec& spec, const AbilityGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double theta = grid.node(k);
        values[k] = eval_target(spec, theta);
        if (!(values[k] > 0.0)) {
            throw DomainError("target information must be positive; J(" + std::to_string(theta) +
                              ") = " + std::to_string(values[k]));
        }
    }
    return Curve(grid, std::move(values));
}

TargetSpec parse_target(std::string_view text) {
    if (text == "lsat") {
        return builtin_lsat_target();
    }
    std::vector<double> descending;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view field = text.substr(pos, comma - pos);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        double value = 0.0;
        const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
            throw ConfigError("bad target coefficient '" + std::string(field) +
                              "'; expected 'lsat' or a comma-separated list");
        }
        descending.push_back(value);
        pos = comma + 1;
    }
    try {
        return TargetSpec::from_descending(descending);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace fixedform

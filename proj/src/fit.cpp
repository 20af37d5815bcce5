#include "fixedform/fit.hpp"

#include <algorithm>
#include <cmath>

#include "fixedform/errors.hpp"

namespace fixedform {

namespace kernels {

double trapezoid(std::span<const double> f, double step) noexcept {
    if (f.size() < 2) {
        return 0.0;
    }
    double interior = 0.0;
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
        interior += f[k];
    }
    return step * (interior + 0.5 * (f.front() + f.back()));
}

double l2_distance(std::span<const double> f, std::span<const double> g, double step, double scale) noexcept {
    const std::size_t n = f.size();
    double interior = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double d = scale * f[k] - g[k];
        interior += d * d;
    }
    const double d0 = scale * f[0] - g[0];
    const double d1 = scale * f[n - 1] - g[n - 1];
    return std::sqrt(step * (interior + 0.5 * (d0 * d0 + d1 * d1)));
}

double deficiency(std::span<const double> test, std::span<const double> target, double step) noexcept {
    const std::size_t n = test.size();
    double interior = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        interior += std::max(target[k] - test[k], 0.0);
    }
    const double ends = std::max(target[0] - test[0], 0.0) + std::max(target[n - 1] - test[n - 1], 0.0);
    return step * (interior + 0.5 * ends);
}

bool exceeds(std::span<const double> test, std::span<const double> target) noexcept {
    for (std::size_t k = 0; k < test.size(); ++k) {
        if (!(test[k] > target[k])) {
            return false;
        }
    }
    return true;
}

}  // namespace kernels

namespace {

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("target meeting error epsilon must be positive");
    }
}

}  // namespace

double l2_distance(const Curve& f, const Curve& g) {
    require_same_grid(f, g);
    return kernels::l2_distance(f.values(), g.values(), f.grid().step());
}

double area_under(const Curve& f) { return kernels::trapezoid(f.values(), f.grid().step()); }

double lambda_of(double s_target, double s_test) {
    if (!(s_test > 0.0)) {
        throw DomainError("test information area must be positive to form lambda");
    }
    return s_target / s_test;
}

double deficiency_energy(const Curve& test_curve, const Curve& target_curve) {
    require_same_grid(test_curve, target_curve);
    return kernels::deficiency(test_curve.values(), target_curve.values(), test_curve.grid().step());
}

bool is_exceeding(const Curve& test_curve, const Curve& target_curve) {
    require_same_grid(test_curve, target_curve);
    return kernels::exceeds(test_curve.values(), target_curve.values());
}

bool is_absolute_meeting(const Curve& test_curve, const Curve& target_curve, double epsilon) {
    require_epsilon(epsilon);
    return l2_distance(test_curve, target_curve) < epsilon;
}

RelativeFit is_relative_meeting(const Curve& test_curve, const Curve& target_curve, double epsilon) {
    require_epsilon(epsilon);
    require_same_grid(test_curve, target_curve);
    const double lambda = lambda_of(area_under(target_curve), area_under(test_curve));
    if (!(lambda < 1.0)) {
        return {false, lambda};
    }
    const double d = kernels::l2_distance(test_curve.values(), target_curve.values(), test_curve.grid().step(), lambda);
    return {d < epsilon, lambda};
}

FitReport fit_report(const Curve& test_curve, const Curve& target_curve, double epsilon) {
    FitReport r;
    r.l2_distance = l2_distance(test_curve, target_curve);
    const RelativeFit rel = is_relative_meeting(test_curve, target_curve, epsilon);
    r.lambda = rel.lambda;
    r.relative_meeting = rel.meets;
    r.energy = deficiency_energy(test_curve, target_curve);
    r.exceeding = is_exceeding(test_curve, target_curve);
    r.absolute_meeting = r.l2_distance < epsilon;
    return r;
}

FitClassifier::FitClassifier(const Curve& target_curve, double epsilon)
    : target_(target_curve),
      epsilon_(epsilon),
      step_(target_curve.grid().step()),
      target_area_(area_under(target_curve)) {
    require_epsilon(epsilon);
}

unsigned FitClassifier::classify(std::span<const double> test_values, unsigned modes) const noexcept {
    const auto target = target_.values();
    unsigned hits = 0;
    if ((modes & kExceeding) && kernels::exceeds(test_values, target)) {
        hits |= kExceeding;
    }
    if ((modes & kAbsolute) && kernels::l2_distance(test_values, target, step_) < epsilon_) {
        hits |= kAbsolute;
    }
    if (modes & kRelative) {
        const double s_test = kernels::trapezoid(test_values, step_);
        if (s_test > 0.0) {
            const double lambda = target_area_ / s_test;
            if (lambda < 1.0 && kernels::l2_distance(test_values, target, step_, lambda) < epsilon_) {
                hits |= kRelative;
            }
        }
    }
    return hits;
}

}  // namespace fixedform

#pragma once

// Distances, areas and the three target-fit predicates. All integrals are
// composite trapezoid sums on the curves' shared uniform grid.

#include <span>

#include "fixedform/irt.hpp"

namespace fixedform {

inline constexpr double kDefaultEpsilon = 1.225;

struct FitReport {
    double l2_distance = 0.0;
    double lambda = 0.0;
    double energy = 0.0;
    bool exceeding = false;
    bool absolute_meeting = false;
    bool relative_meeting = false;
};

struct RelativeFit {
    bool meets = false;
    double lambda = 0.0;
};

double l2_distance(const Curve& f, const Curve& g);
double area_under(const Curve& f);
double lambda_of(double s_target, double s_test);

// Integrated shortfall of the test curve below the target: trapezoid of max(J - I, 0).
double deficiency_energy(const Curve& test_curve, const Curve& target_curve);

// Strict I > J at every node.
bool is_exceeding(const Curve& test_curve, const Curve& target_curve);
bool is_absolute_meeting(const Curve& test_curve, const Curve& target_curve, double epsilon);
RelativeFit is_relative_meeting(const Curve& test_curve, const Curve& target_curve, double epsilon);

FitReport fit_report(const Curve& test_curve, const Curve& target_curve, double epsilon);

// Raw kernels over tabulated values with a known node spacing. The Curve
// overloads above delegate here; hot loops call them directly.
namespace kernels {

double trapezoid(std::span<const double> f, double step) noexcept;
// sqrt of trapezoid((scale * f - g)^2).
double l2_distance(std::span<const double> f, std::span<const double> g, double step, double scale = 1.0) noexcept;
double deficiency(std::span<const double> test, std::span<const double> target, double step) noexcept;
bool exceeds(std::span<const double> test, std::span<const double> target) noexcept;

}  // namespace kernels

// Which predicates to evaluate.
enum FitMode : unsigned {
    kAbsolute = 1u << 0,
    kRelative = 1u << 1,
    kExceeding = 1u << 2,
};

// Classifies raw test curves against one target, caching the target area.
class FitClassifier {
public:
    FitClassifier(const Curve& target_curve, double epsilon);

    // Bitmask of FitMode predicates that hold, restricted to `modes`.
    unsigned classify(std::span<const double> test_values, unsigned modes) const noexcept;

    const Curve& target() const noexcept { return target_; }
    double epsilon() const noexcept { return epsilon_; }
    double target_area() const noexcept { return target_area_; }

private:
    Curve target_;
    double epsilon_;
    double step_;
    double target_area_;
};

}  // namespace fixedform

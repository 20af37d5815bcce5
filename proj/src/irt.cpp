#include "fixedform/irt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fixedform/errors.hpp"

namespace fixedform {

namespace {

// Logistic function in a form that never overflows exp().
double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_member(ItemId id, std::size_t m) {
    if (id >= m) {
        throw MembershipError("item id " + std::to_string(id) + " not in bank of " + std::to_string(m) +
                              " items");
    }
}

}  // namespace

void ItemParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
        throw DomainError("item parameters must be finite");
    }
    if (a <= 0.0) {
        throw DomainError("discrimination a must be > 0, got " + std::to_string(a));
    }
    if (c < 0.0 || c >= 1.0) {
        throw DomainError("guessing probability c must lie in [0, 1), got " + std::to_string(c));
    }
}

ItemBank::ItemBank(std::vector<ItemParams> items) : items_(std::move(items)) {
    if (items_.empty()) {
        throw DomainError("item bank must contain at least one item");
    }
    for (const auto& item : items_) {
        item.validate();
    }
}

const ItemParams& ItemBank::at(ItemId id) const {
    check_member(id, items_.size());
    return items_[id];
}

TestForm TestForm::from_ids(std::vector<ItemId> ids, const ItemBank& bank) {
    if (ids.empty()) {
        throw DomainError("a test must contain at least one item");
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw DomainError("test contains a duplicate item id");
    }
    check_member(ids.back(), bank.size());
    TestForm form;
    form.ids_ = std::move(ids);
    return form;
}

bool TestForm::contains(ItemId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
}

AbilityGrid::AbilityGrid(std::size_t num_points, double lo, double hi)
    : lo_(lo), hi_(hi), num_points_(num_points) {
    if (num_points < 2) {
        throw DomainError("ability grid needs at least 2 points");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw DomainError("ability grid needs finite lo < hi");
    }
}

double AbilityGrid::node(std::size_t k) const noexcept {
    if (k + 1 == num_points_) {
        return hi_;
    }
    return lo_ + (hi_ - lo_) * static_cast<double>(k) / static_cast<double>(num_points_ - 1);
}

Curve::Curve(AbilityGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw GridError("curve has " + std::to_string(values_.size()) + " values for a grid of " +
                        std::to_string(grid_.size()) + " nodes");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("curve values must be finite");
        }
    }
}

Curve Curve::zeros(const AbilityGrid& grid) { return Curve(grid, std::vector<double>(grid.size(), 0.0)); }

Curve Curve::scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& v : out) {
        v *= factor;
    }
    return Curve(grid_, std::move(out));
}

Curve Curve::operator+(const Curve& other) const {
    require_same_grid(*this, other);
    std::vector<double> out(values_);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += other.values_[k];
    }
    return Curve(grid_, std::move(out));
}

Curve Curve::operator-(const Curve& other) const {
    require_same_grid(*this, other);
    std::vector<double> out(values_);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] -= other.values_[k];
    }
    return Curve(grid_, std::move(out));
}

void require_same_grid(const Curve& f, const Curve& g) {
    if (!(f.grid() == g.grid())) {
        throw GridError("curves are tabulated on different grids");
    }
}

double prob_correct(const ItemParams& item, double theta) {
    item.validate();
    if (!std::isfinite(theta)) {
        throw DomainError("ability must be finite");
    }
    return item.c + (1.0 - item.c) * logistic(item.a * (theta - item.b));
}

double item_information(const ItemParams& item, double theta) {
    const double p = prob_correct(item, theta);
    // (p - c) / (1 - c) and 1 - p written through the logistic so the tails
    // do not cancel catastrophically.
    const double z = item.a * (theta - item.b);
    const double above_guess = logistic(z);
    const double q = (1.0 - item.c) * logistic(-z);
    const double slope = item.a * above_guess;
    return slope * slope * (q / p);
}

Curve item_information_curve(const ItemParams& item, const AbilityGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = item_information(item, grid.node(k));
    }
    return Curve(grid, std::move(values));
}

Curve sum_information(const ItemBank& bank, std::span<const ItemId> ids, const AbilityGrid& grid) {
    std::vector<double> values(grid.size(), 0.0);
    for (ItemId id : ids) {
        const ItemParams& item = bank.at(id);
        for (std::size_t k = 0; k < values.size(); ++k) {
            values[k] += item_information(item, grid.node(k));
        }
    }
    return Curve(grid, std::move(values));
}

Curve test_information(const ItemBank& bank, const TestForm& test, const AbilityGrid& grid) {
    return sum_information(bank, test.ids(), grid);
}

double standard_error(double info) {
    if (!(info > 0.0) || !std::isfinite(info)) {
        throw DomainError("standard error needs positive finite information");
    }
    return 1.0 / std::sqrt(info);
}

ItemCurveTable::ItemCurveTable(const ItemBank& bank, const AbilityGrid& grid)
    : grid_(grid), items_(bank.size()), data_(bank.size() * grid.size()) {
    const std::size_t g = grid.size();
    for (std::size_t i = 0; i < items_; ++i) {
        for (std::size_t k = 0; k < g; ++k) {
            data_[i * g + k] = item_information(bank[static_cast<ItemId>(i)], grid.node(k));
        }
    }
}

void ItemCurveTable::sum_into(std::span<const ItemId> ids, std::span<double> out) const noexcept {
    std::fill(out.begin(), out.end(), 0.0);
    for (ItemId id : ids) {
        add_row(id, out);
    }
}

void ItemCurveTable::add_row(ItemId id, std::span<double> out) const noexcept {
    const double* row = data_.data() + static_cast<std::size_t>(id) * points();
    double* dst = out.data();
    const std::size_t g = points();
    for (std::size_t k = 0; k < g; ++k) {
        dst[k] += row[k];
    }
}

void ItemCurveTable::subtract_row(ItemId id, std::span<double> out) const noexcept {
    const double* row = data_.data() + static_cast<std::size_t>(id) * points();
    double* dst = out.data();
    const std::size_t g = points();
    for (std::size_t k = 0; k < g; ++k) {
        dst[k] -= row[k];
    }
}

Curve ItemCurveTable::curve_of(std::span<const ItemId> ids) const {
    for (ItemId id : ids) {
        check_member(id, items_);
    }
    std::vector<double> values(points());
    sum_into(ids, values);
    return Curve(grid_, std::move(values));
}

}  // namespace fixedform

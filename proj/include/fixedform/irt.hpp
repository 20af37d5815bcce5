#pragma once

// Three-parameter logistic (3PL) item response model: response probability,
// item information, and test information tabulated on an ability grid.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fixedform {

using ItemId = std::uint32_t;

struct ItemParams {
    double a = 1.0;  // discrimination, > 0
    double b = 0.0;  // difficulty
    double c = 0.0;  // guessing probability, in [0, 1)

    // Throws DomainError when a <= 0, c outside [0, 1) or anything non-finite.
    void validate() const;

    friend bool operator==(const ItemParams&, const ItemParams&) = default;
};

// Items are addressed by their position: ids are 0..m-1.
class ItemBank {
public:
    explicit ItemBank(std::vector<ItemParams> items);

    std::size_t size() const noexcept { return items_.size(); }
    const ItemParams& operator[](ItemId id) const { return items_[id]; }
    const ItemParams& at(ItemId id) const;
    const std::vector<ItemParams>& items() const noexcept { return items_; }

    friend bool operator==(const ItemBank&, const ItemBank&) = default;

private:
    std::vector<ItemParams> items_;
};

// A set of distinct item ids, kept sorted.
class TestForm {
public:
    TestForm() = default;  // empty placeholder; from_ids is the only way to fill one

    // Sorts the ids and checks that they are distinct members of the bank.
    static TestForm from_ids(std::vector<ItemId> ids, const ItemBank& bank);

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<ItemId>& ids() const noexcept { return ids_; }
    bool contains(ItemId id) const;

    friend bool operator==(const TestForm&, const TestForm&) = default;

private:
    std::vector<ItemId> ids_;
};

class AbilityGrid {
public:
    static constexpr std::size_t kDefaultPoints = 121;

    explicit AbilityGrid(std::size_t num_points = kDefaultPoints, double lo = -3.0, double hi = 3.0);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t size() const noexcept { return num_points_; }
    double step() const noexcept { return (hi_ - lo_) / static_cast<double>(num_points_ - 1); }

    // Both endpoints are reproduced exactly.
    double node(std::size_t k) const noexcept;

    friend bool operator==(const AbilityGrid&, const AbilityGrid&) = default;

private:
    double lo_;
    double hi_;
    std::size_t num_points_;
};

// Function values tabulated on every node of a grid.
class Curve {
public:
    Curve(AbilityGrid grid, std::vector<double> values);
    static Curve zeros(const AbilityGrid& grid);

    const AbilityGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }

    Curve scaled(double factor) const;
    Curve operator+(const Curve& other) const;
    Curve operator-(const Curve& other) const;

private:
    AbilityGrid grid_;
    std::vector<double> values_;
};

// Throws GridError unless both curves live on the same grid.
void require_same_grid(const Curve& f, const Curve& g);

double prob_correct(const ItemParams& item, double theta);
double item_information(const ItemParams& item, double theta);

Curve item_information_curve(const ItemParams& item, const AbilityGrid& grid);

// Sum of item information over the test's items at every grid node.
Curve test_information(const ItemBank& bank, const TestForm& test, const AbilityGrid& grid);

// Same sum over an arbitrary id list; an empty list gives the zero curve.
// Throws MembershipError for ids outside the bank.
Curve sum_information(const ItemBank& bank, std::span<const ItemId> ids, const AbilityGrid& grid);

// Standard error of the ability estimate, info^(-1/2).
double standard_error(double info);

// Every item's information curve, precomputed once per (bank, grid).
// Row-major: row id holds the item's values at each grid node.
class ItemCurveTable {
public:
    ItemCurveTable(const ItemBank& bank, const AbilityGrid& grid);

    const AbilityGrid& grid() const noexcept { return grid_; }
    std::size_t items() const noexcept { return items_; }
    std::size_t points() const noexcept { return grid_.size(); }

    std::span<const double> row(ItemId id) const noexcept {
        return {data_.data() + static_cast<std::size_t>(id) * points(), points()};
    }

    // out[k] = sum over ids of row(id)[k]. out must have points() entries.
    void sum_into(std::span<const ItemId> ids, std::span<double> out) const noexcept;
    void add_row(ItemId id, std::span<double> out) const noexcept;
    void subtract_row(ItemId id, std::span<double> out) const noexcept;

    Curve curve_of(std::span<const ItemId> ids) const;

private:
    AbilityGrid grid_;
    std::size_t items_;
    std::vector<double> data_;
};

}  // namespace fixedform

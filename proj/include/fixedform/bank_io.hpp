#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "fixedform/irt.hpp"

namespace fixedform {

// Recipe for a synthetic bank: a and b uniform on their ranges, c fixed.
struct BankGenSpec {
    std::size_t m = 300;
    double a_min = 1.0;
    double a_max = 3.0;
    double b_min = -3.0;
    double b_max = 3.0;
    double c_fixed = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

// One Rng stream seeded with spec.seed; per item, a is drawn before b.
ItemBank generate_bank(const BankGenSpec& spec);

// CSV, header "id,a,b,c", 17 significant digits, LF line endings.
void write_bank_csv(const ItemBank& bank, std::ostream& out);
void save_bank(const ItemBank& bank, const std::filesystem::path& path);

// Throws ParseError (with line number) for malformed rows, duplicate or
// missing ids, and parameter-invariant violations; IoError if unreadable.
ItemBank read_bank_csv(std::istream& in);
ItemBank load_bank(const std::filesystem::path& path);

}  // namespace fixedform

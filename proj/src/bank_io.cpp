#include "fixedform/bank_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fixedform/errors.hpp"
#include "fixedform/rng.hpp"

namespace fixedform {

void BankGenSpec::validate() const {
    if (m < 1) {
        throw DomainError("bank size m must be >= 1");
    }
    if (!(a_min > 0.0) || !(a_min <= a_max) || !std::isfinite(a_max)) {
        throw DomainError("need 0 < a_min <= a_max");
    }
    if (!(b_min <= b_max) || !std::isfinite(b_min) || !std::isfinite(b_max)) {
        throw DomainError("need finite b_min <= b_max");
    }
    if (!(c_fixed >= 0.0 && c_fixed < 1.0)) {
        throw DomainError("need 0 <= c < 1");
    }
}

ItemBank generate_bank(const BankGenSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<ItemParams> items(spec.m);
    for (auto& item : items) {
        item.a = uniform_real(rng, spec.a_min, spec.a_max);
        item.b = uniform_real(rng, spec.b_min, spec.b_max);
        item.c = spec.c_fixed;
    }
    return ItemBank(std::move(items));
}

void write_bank_csv(const ItemBank& bank, std::ostream& out) {
    out << "id,a,b,c\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto& item = bank[static_cast<ItemId>(i)];
        out << i << ',' << item.a << ',' << item.b << ',' << item.c << '\n';
    }
}

void save_bank(const ItemBank& bank, const std::filesystem::path& path) {
    if (path.empty()) {
        throw IoError("empty output path for bank");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_bank_csv(bank, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view field) {
    T value{};
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

}  // namespace

ItemBank read_bank_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };

    if (!next_line()) {
        throw ParseError("missing header", 1);
    }
    if (line != "id,a,b,c") {
        throw ParseError("expected header 'id,a,b,c', got '" + line + "'", line_no);
    }

    struct Row {
        std::uint32_t id;
        ItemParams item;
        std::size_t line;
    };
    std::vector<Row> rows;
    while (next_line()) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split_commas(line);
        if (fields.size() != 4) {
            throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
        }
        const auto id = parse_number<std::uint32_t>(fields[0]);
        const auto a = parse_number<double>(fields[1]);
        const auto b = parse_number<double>(fields[2]);
        const auto c = parse_number<double>(fields[3]);
        if (!id || !a || !b || !c) {
            throw ParseError("non-numeric field in '" + line + "'", line_no);
        }
        const ItemParams item{*a, *b, *c};
        try {
            item.validate();
        } catch (const DomainError& e) {
            throw ParseError(e.what(), line_no);
        }
        rows.push_back({*id, item, line_no});
    }

    if (rows.empty()) {
        throw ParseError("bank has no items", line_no);
    }
    std::vector<std::optional<ItemParams>> slots(rows.size());
    for (const Row& row : rows) {
        if (row.id >= slots.size()) {
            throw ParseError("item id " + std::to_string(row.id) + " out of range for " +
                                 std::to_string(rows.size()) + " items; ids must be 0..m-1",
                             row.line);
        }
        if (slots[row.id]) {
            throw ParseError("duplicate item id " + std::to_string(row.id), row.line);
        }
        slots[row.id] = row.item;
    }
    std::vector<ItemParams> items;
    items.reserve(slots.size());
    for (const auto& slot : slots) {
        items.push_back(*slot);
    }
    return ItemBank(std::move(items));
}

ItemBank load_bank(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open bank file " + path.string());
    }
    return read_bank_csv(in);
}

}  // namespace fixedform

#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace selzip {

/// Data-type tag attached to every payload ("text", "image", ...).
/// Lower-cased and trimmed on construction; never empty.
class DataTypeLabel {
public:
    explicit DataTypeLabel(std::string_view name);

    const std::string& str() const noexcept { return name_; }

    friend auto operator<=>(const DataTypeLabel&, const DataTypeLabel&) = default;
    friend bool operator==(const DataTypeLabel&, const DataTypeLabel&) = default;

private:
    std::string name_;
};

}  // namespace selzip

template <>
struct std::hash<selzip::DataTypeLabel> {
    std::size_t operator()(const selzip::DataTypeLabel& l) const noexcept {
        return std::hash<std::string>{}(l.str());
    }
};

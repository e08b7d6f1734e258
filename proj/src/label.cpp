#include "selzip/label.hpp"

#include <algorithm>
#include <cctype>

#include "selzip/error.hpp"

namespace selzip {

DataTypeLabel::DataTypeLabel(std::string_view name) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!name.empty() && is_space(name.front())) name.remove_prefix(1);
    while (!name.empty() && is_space(name.back())) name.remove_suffix(1);
    if (name.empty()) throw InvalidArgumentError("data-type label must be non-empty");
    name_.reserve(name.size());
    std::transform(name.begin(), name.end(), std::back_inserter(name_),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
}

}  // namespace selzip

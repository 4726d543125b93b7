#ifndef PATHWAYS_CONFIG_HPP
#define PATHWAYS_CONFIG_HPP

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace pathways::config {

// A small TOML subset: [table], [[array-of-tables]], key = value with numbers,
// "strings", true/false and flat arrays of numbers; `#` starts a comment.
using Value = std::variant<double, std::string, bool, std::vector<double>>;

struct Entry {
    Value value;
    std::size_t line = 0;
};

struct Table {
    std::string name;  // "" for the root
    std::size_t line = 0;
    std::map<std::string, Entry> entries;
};

struct Document {
    std::map<std::string, Table> tables;                 // includes "" for the root
    std::map<std::string, std::vector<Table>> arrays;    // [[name]] blocks in order
};

// Throws ParseError with the line number.
Document parse(const std::string& text);

} // namespace pathways::config

#endif // PATHWAYS_CONFIG_HPP

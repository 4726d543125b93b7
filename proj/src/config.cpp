#include "pathways/config.hpp"

#include "pathways/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace pathways::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment, leaving '#' inside quotes alone.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (quoted && s[i] == '\\') ++i;
        else if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char ch : k)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
    return true;
}

double parse_number(std::string s, std::size_t line) {
    std::string clean;
    for (char ch : s)
        if (ch != '_') clean += ch;
    if (!clean.empty() && clean.front() == '+') clean.erase(0, 1);
    double v = 0.0;
    const auto r = std::from_chars(clean.data(), clean.data() + clean.size(), v);
    if (clean.empty() || r.ec != std::errc{} || r.ptr != clean.data() + clean.size() || !std::isfinite(v))
        throw ParseError("invalid number '" + s + "'", line);
    return v;
}

Value parse_value(const std::string& raw, std::size_t line) {
    const std::string s = trim(raw);
    if (s.empty()) throw ParseError("missing value", line);
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') throw ParseError("unterminated string", line);
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) {
                const char n = s[++i];
                out += n == 'n' ? '\n' : n == 't' ? '\t' : n;
            } else if (s[i] == '"') {
                throw ParseError("unexpected quote in string", line);
            } else {
                out += s[i];
            }
        }
        return out;
    }
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '[') {
        if (s.back() != ']') throw ParseError("unterminated array", line);
        std::vector<double> items;
        std::stringstream body(s.substr(1, s.size() - 2));
        std::string item;
        while (std::getline(body, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                if (body.eof()) break;  // trailing comma
                throw ParseError("empty array element", line);
            }
            items.push_back(parse_number(item, line));
        }
        return items;
    }
    return parse_number(s, line);
}

} // namespace

Document parse(const std::string& text) {
    Document doc;
    doc.tables[""] = Table{"", 0, {}};
    Table* current = &doc.tables[""];
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (lineno == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.rfind("[[", 0) == 0) {
            if (line.size() < 5 || line.substr(line.size() - 2) != "]]") throw ParseError("malformed [[table]]", lineno);
            const std::string name = trim(line.substr(2, line.size() - 4));
            if (!valid_key(name)) throw ParseError("invalid table name '" + name + "'", lineno);
            if (doc.tables.count(name)) throw ParseError("'" + name + "' is already a table", lineno);
            auto& vec = doc.arrays[name];
            vec.push_back(Table{name, lineno, {}});
            current = &vec.back();
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("malformed [table]", lineno);
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) throw ParseError("invalid table name '" + name + "'", lineno);
            if (doc.tables.count(name) || doc.arrays.count(name))
                throw ParseError("duplicate table [" + name + "]", lineno);
            current = &(doc.tables[name] = Table{name, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) throw ParseError("invalid key '" + key + "'", lineno);
        if (current->entries.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
        current->entries[key] = Entry{parse_value(line.substr(eq + 1), lineno), lineno};
    }
    return doc;
}

} // namespace pathways::config

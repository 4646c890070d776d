#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qhhg/common.hpp"

namespace qhhg::minitoml {

// Small TOML reader covering what the configuration files use: comments,
// [section] headers, [[array-of-tables]], dotted keys, strings, booleans,
// integers, floats, and single-line homogeneous arrays.

struct Value {
    enum class Kind { Bool, Int, Float, String, Array };
    Kind kind = Kind::Int;
    bool b = false;
    long long i = 0;
    double f = 0.0;
    std::string s;
    std::vector<Value> arr;

    double as_double() const {
        if (kind == Kind::Float) return f;
        if (kind == Kind::Int) return static_cast<double>(i);
        throw config_error("expected a number, got '" + s + "'");
    }
    long long as_int() const {
        if (kind == Kind::Int) return i;
        throw config_error("expected an integer");
    }
    bool as_bool() const {
        if (kind == Kind::Bool) return b;
        throw config_error("expected true/false");
    }
    const std::string& as_string() const {
        if (kind == Kind::String) return s;
        throw config_error("expected a quoted string");
    }
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;  // flattened dotted keys: "section.key"
    std::vector<std::pair<std::string, Table>> table_arrays;  // [[name]] blocks in order
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            return false;
    return true;
}

inline Value parse_scalar(const std::string& raw, int line_no, const std::string& src) {
    const std::string t = trim(raw);
    auto fail = [&](const std::string& why) {
        throw config_error(src + ":" + std::to_string(line_no) + ": " + why + " in '" + t + "'");
    };
    if (t.empty()) fail("empty value");
    Value v;
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"') fail("unterminated string");
        v.kind = Value::Kind::String;
        std::string out;
        for (std::size_t i = 1; i + 1 < t.size(); ++i) {
            if (t[i] == '\\' && i + 2 < t.size()) {
                ++i;
                out += t[i] == 'n' ? '\n' : t[i] == 't' ? '\t' : t[i];
            } else {
                out += t[i];
            }
        }
        v.s = out;
        return v;
    }
    if (t == "true" || t == "false") {
        v.kind = Value::Kind::Bool;
        v.b = t == "true";
        return v;
    }
    const bool looks_float = t.find_first_of(".eE") != std::string::npos &&
                             t.find_first_not_of("+-0123456789.eE_") == std::string::npos;
    char* end = nullptr;
    if (!looks_float) {
        const long long i = std::strtoll(t.c_str(), &end, 10);
        if (end != nullptr && *end == '\0') {
            v.kind = Value::Kind::Int;
            v.i = i;
            return v;
        }
    }
    const double f = std::strtod(t.c_str(), &end);
    if (end == nullptr || *end != '\0') fail("unparsable value");
    v.kind = Value::Kind::Float;
    v.f = f;
    return v;
}

inline Value parse_value(const std::string& raw, int line_no, const std::string& src) {
    const std::string t = trim(raw);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']')
            throw config_error(src + ":" + std::to_string(line_no) +
                               ": arrays must close on the same line");
        Value v;
        v.kind = Value::Kind::Array;
        std::string body = t.substr(1, t.size() - 2);
        std::string cur;
        bool in_string = false;
        for (char c : body) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                if (!trim(cur).empty()) v.arr.push_back(parse_scalar(cur, line_no, src));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!trim(cur).empty()) v.arr.push_back(parse_scalar(cur, line_no, src));
        return v;
    }
    return parse_scalar(raw, line_no, src);
}

}  // namespace detail

inline Document parse(const std::string& text, const std::string& source = "<config>") {
    Document doc;
    std::string prefix;
    Table* target = &doc.root;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(detail::strip_comment(line));
        if (t.empty()) continue;
        if (t.size() >= 4 && t.substr(0, 2) == "[[" && t.substr(t.size() - 2) == "]]") {
            const std::string name = detail::trim(t.substr(2, t.size() - 4));
            if (!detail::valid_key(name))
                throw config_error(source + ":" + std::to_string(line_no) + ": bad table name");
            doc.table_arrays.push_back({name, {}});
            target = &doc.table_arrays.back().second;
            prefix.clear();
            continue;
        }
        if (t.front() == '[' && t.back() == ']') {
            const std::string name = detail::trim(t.substr(1, t.size() - 2));
            if (!detail::valid_key(name))
                throw config_error(source + ":" + std::to_string(line_no) + ": bad section name");
            prefix = name + ".";
            target = &doc.root;
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(source + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(t.substr(0, eq));
        if (!detail::valid_key(key))
            throw config_error(source + ":" + std::to_string(line_no) + ": bad key '" + key + "'");
        Value v = detail::parse_value(t.substr(eq + 1), line_no, source);
        const std::string full = (target == &doc.root ? prefix : "") + key;
        if (!target->emplace(full, std::move(v)).second)
            throw config_error(source + ":" + std::to_string(line_no) + ": duplicate key '" +
                               full + "'");
    }
    return doc;
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path);
}

// typed lookups -------------------------------------------------------------

inline const Value* find(const Table& table, const std::string& key) {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
}

inline double get_double(const Table& t, const std::string& k, double fallback) {
    const Value* v = find(t, k);
    return v != nullptr ? v->as_double() : fallback;
}
inline long long get_int(const Table& t, const std::string& k, long long fallback) {
    const Value* v = find(t, k);
    return v != nullptr ? v->as_int() : fallback;
}
inline bool get_bool(const Table& t, const std::string& k, bool fallback) {
    const Value* v = find(t, k);
    return v != nullptr ? v->as_bool() : fallback;
}
inline std::string get_string(const Table& t, const std::string& k, const std::string& fallback) {
    const Value* v = find(t, k);
    return v != nullptr ? v->as_string() : fallback;
}
inline std::vector<double> get_double_array(const Table& t, const std::string& k) {
    const Value* v = find(t, k);
    if (v == nullptr) return {};
    if (v->kind != Value::Kind::Array) throw config_error("'" + k + "' must be an array");
    std::vector<double> out;
    for (const Value& e : v->arr) out.push_back(e.as_double());
    return out;
}

}  // namespace qhhg::minitoml

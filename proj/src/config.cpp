#include "fracdiff/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fracdiff/error.hpp"

namespace fracdiff {

using nlohmann::json;

namespace {

class Reader {
public:
    explicit Reader(const std::string& text) : s_(text) {}

    json parse() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_blank_lines();
            if (at_end()) break;
            if (peek() == '[') {
                table = header(root);
            } else {
                key_value(*table);
            }
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorCode::Parse, "config line " + std::to_string(line_) + ": " + what);
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    char take() {
        const char c = s_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_space() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }
    void skip_comment() {
        if (peek() == '#') {
            while (!at_end() && peek() != '\n') ++pos_;
        }
    }
    // Whitespace, comments and newlines (inside arrays, and between statements).
    void skip_blank_lines() {
        while (!at_end()) {
            skip_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                take();
            } else {
                break;
            }
        }
    }
    void end_of_line() {
        skip_space();
        skip_comment();
        if (peek() == '\r') ++pos_;
        if (at_end()) return;
        if (peek() != '\n') error("unexpected trailing characters");
        take();
    }

    std::string bare_or_quoted_key() {
        skip_space();
        if (peek() == '"' || peek() == '\'') return string_value();
        std::string k;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                             peek() == '-')) {
            k += take();
        }
        if (k.empty()) error("expected a key");
        return k;
    }

    std::vector<std::string> dotted_key() {
        std::vector<std::string> parts{bare_or_quoted_key()};
        skip_space();
        while (peek() == '.') {
            ++pos_;
            parts.push_back(bare_or_quoted_key());
            skip_space();
        }
        return parts;
    }

    // Walks into nested tables, following the last element of arrays of tables.
    json* descend(json* node, const std::string& key) {
        json& child = (*node)[key];
        if (child.is_null()) child = json::object();
        if (child.is_array()) {
            if (child.empty() || !child.back().is_object()) error("'" + key + "' is not a table");
            return &child.back();
        }
        if (!child.is_object()) error("'" + key + "' is not a table");
        return &child;
    }

    json* header(json& root) {
        ++pos_;
        const bool array = peek() == '[';
        if (array) ++pos_;
        const auto parts = dotted_key();
        for (int i = 0; i < (array ? 2 : 1); ++i) {
            if (peek() != ']') error("malformed table header");
            ++pos_;
        }
        json* node = &root;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = descend(node, parts[i]);
        json& last = (*node)[parts.back()];
        if (array) {
            if (last.is_null()) last = json::array();
            if (!last.is_array()) error("'" + parts.back() + "' is not an array of tables");
            last.push_back(json::object());
            return &last.back();
        }
        if (last.is_null()) last = json::object();
        if (!last.is_object()) error("'" + parts.back() + "' redefined");
        return &last;
    }

    void key_value(json& table) {
        const auto parts = dotted_key();
        if (peek() != '=') error("expected '='");
        ++pos_;
        json* node = &table;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = descend(node, parts[i]);
        if (node->contains(parts.back())) error("duplicate key '" + parts.back() + "'");
        (*node)[parts.back()] = value();
    }

    json value() {
        skip_space();
        const char c = peek();
        if (c == '"' || c == '\'') return string_value();
        if (c == '[') return array_value();
        if (c == '{') return inline_table();
        std::string tok;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                             peek() == '-' || peek() == '.' || peek() == '_')) {
            tok += take();
        }
        if (tok.empty()) error("expected a value");
        if (tok == "true") return true;
        if (tok == "false") return false;
        return number(tok);
    }

    json number(std::string tok) {
        std::string digits;
        for (char ch : tok) {
            if (ch != '_') digits += ch;
        }
        const bool negative = !digits.empty() && digits[0] == '-';
        const std::string body = (digits[0] == '+' || digits[0] == '-') ? digits.substr(1) : digits;
        if (body == "inf") {
            return negative ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
        }
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        const bool is_float = body.find_first_of(".eE") != std::string::npos;
        std::size_t used = 0;
        try {
            if (is_float) {
                const double v = std::stod(digits, &used);
                if (used == digits.size()) return v;
            } else {
                const long long v = std::stoll(digits, &used, 10);
                if (used == digits.size()) return v;
            }
        } catch (const std::exception&) {
        }
        error("invalid value '" + tok + "'");
    }

    std::string string_value() {
        const char quote = take();
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') error("unterminated string");
            char c = take();
            if (c == quote) break;
            if (quote == '"' && c == '\\') {
                if (at_end() || peek() == '\n') error("unterminated string");
                const char e = take();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '\\': out += '\\'; break;
                    case '"': out += '"'; break;
                    default: error(std::string("unsupported escape \\") + e);
                }
                continue;
            }
            out += c;
        }
        return out;
    }

    json array_value() {
        ++pos_;
        json arr = json::array();
        while (true) {
            skip_blank_lines();
            if (peek() == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(value());
            skip_blank_lines();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != ']') {
                error("expected ',' or ']' in array");
            }
        }
    }

    json inline_table() {
        ++pos_;
        json t = json::object();
        skip_space();
        if (peek() == '}') {
            ++pos_;
            return t;
        }
        while (true) {
            key_value(t);
            skip_space();
            const char c = at_end() ? '\0' : take();
            if (c == '}') return t;
            if (c != ',') error("expected ',' or '}' in inline table");
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

const json* lookup(const json& node, const std::string& key) {
    if (!node.is_object()) return nullptr;
    auto it = node.find(key);
    return it == node.end() ? nullptr : &*it;
}

}  // namespace

json parse_config(const std::string& text) { return Reader(text).parse(); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_config(const std::string& path) { return parse_config(read_text_file(path)); }

double config_number(const json& node, const std::string& key, double fallback) {
    const json* v = lookup(node, key);
    if (!v) return fallback;
    if (v->is_string()) {
        const std::string s = v->get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    }
    if (!v->is_number()) {
        fail(ErrorCode::Parse, "config key '" + key + "' must be a number");
    }
    return v->get<double>();
}

double config_number(const json& node, const std::string& key) {
    if (!lookup(node, key)) {
        fail(ErrorCode::Parse, "config key '" + key + "' is required");
    }
    return config_number(node, key, 0.0);
}

int config_int(const json& node, const std::string& key, int fallback) {
    const json* v = lookup(node, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
        fail(ErrorCode::Parse, "config key '" + key + "' must be an integer");
    }
    return v->get<int>();
}

bool config_bool(const json& node, const std::string& key, bool fallback) {
    const json* v = lookup(node, key);
    if (!v) return fallback;
    if (!v->is_boolean()) {
        fail(ErrorCode::Parse, "config key '" + key + "' must be true or false");
    }
    return v->get<bool>();
}

std::string config_string(const json& node, const std::string& key, const std::string& fallback) {
    const json* v = lookup(node, key);
    if (!v) return fallback;
    if (!v->is_string()) {
        fail(ErrorCode::Parse, "config key '" + key + "' must be a string");
    }
    return v->get<std::string>();
}

}  // namespace fracdiff

#include "flapkit/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "flapkit/error.hpp"

namespace flapkit::cfg {

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
    std::ostringstream os;
    os << "config parse error at line " << c.line << ", column " << c.col << ": " << msg;
    throw ConfigParseError(os.str(), c.line, c.col);
}

void skip_ws(Cursor& c, bool stop_at_newline) {
    while (!c.eof()) {
        const char ch = c.peek();
        if (ch == ' ' || ch == '\t') {
            c.take();
        } else if (!stop_at_newline && (ch == '\n' || ch == '\r')) {
            c.take();
        } else if (ch == '#') {
            while (!c.eof() && c.peek() != '\n') c.take();
        } else {
            break;
        }
    }
}

std::string parse_key(Cursor& c) {
    std::string key;
    while (!c.eof()) {
        const char ch = c.peek();
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
            ch == '.') {
            key.push_back(c.take());
        } else {
            break;
        }
    }
    if (key.empty()) fail(c, "expected a key");
    return key;
}

std::string parse_string_value(Cursor& c) {
    c.take();  // opening quote
    std::string s;
    while (true) {
        if (c.eof()) fail(c, "unterminated string");
        const char ch = c.take();
        if (ch == '"') break;
        if (ch == '\\') {
            if (c.eof()) fail(c, "unterminated escape");
            const char e = c.take();
            switch (e) {
                case 'n': s.push_back('\n'); break;
                case 't': s.push_back('\t'); break;
                case '"': s.push_back('"'); break;
                case '\\': s.push_back('\\'); break;
                default: fail(c, std::string("unknown escape \\") + e);
            }
        } else {
            s.push_back(ch);
        }
    }
    return s;
}

Value parse_scalar_token(Cursor& c, const std::string& tok) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    try {
        std::size_t used = 0;
        if (!looks_float) {
            const std::int64_t i = std::stoll(tok, &used);
            if (used == tok.size()) return i;
        }
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return d;
    } catch (const std::exception&) {
    }
    fail(c, "cannot parse value '" + tok + "'");
}

std::string take_bare_token(Cursor& c) {
    std::string tok;
    while (!c.eof()) {
        const char ch = c.peek();
        if (ch == '\n' || ch == '#' || ch == ',' || ch == ']' || ch == ' ' ||
            ch == '\t' || ch == '\r')
            break;
        tok.push_back(c.take());
    }
    return tok;
}

Value parse_value(Cursor& c) {
    skip_ws(c, true);
    if (c.eof()) fail(c, "expected a value");
    const char ch = c.peek();
    if (ch == '"') return parse_string_value(c);
    if (ch == '[') {
        c.take();
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool is_string = false;
        bool first = true;
        while (true) {
            skip_ws(c, false);
            if (c.eof()) fail(c, "unterminated array");
            if (c.peek() == ']') {
                c.take();
                break;
            }
            if (!first) {
                if (c.peek() != ',') fail(c, "expected ',' in array");
                c.take();
                skip_ws(c, false);
                if (!c.eof() && c.peek() == ']') {  // trailing comma
                    c.take();
                    break;
                }
            }
            first = false;
            if (c.peek() == '"') {
                is_string = true;
                strs.push_back(parse_string_value(c));
            } else {
                const std::string tok = take_bare_token(c);
                const Value v = parse_scalar_token(c, tok);
                if (std::holds_alternative<std::int64_t>(v))
                    nums.push_back(static_cast<double>(std::get<std::int64_t>(v)));
                else if (std::holds_alternative<double>(v))
                    nums.push_back(std::get<double>(v));
                else
                    fail(c, "arrays hold numbers or strings");
            }
        }
        if (is_string) return strs;
        return nums;
    }
    const std::string tok = take_bare_token(c);
    if (tok.empty()) fail(c, "expected a value");
    return parse_scalar_token(c, tok);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    Cursor c{text};
    std::string table;
    while (true) {
        skip_ws(c, false);
        if (c.eof()) break;
        if (c.peek() == '[') {
            c.take();
            skip_ws(c, true);
            table = parse_key(c);
            skip_ws(c, true);
            if (c.eof() || c.peek() != ']') fail(c, "expected ']' after table name");
            c.take();
            continue;
        }
        const std::string key = parse_key(c);
        skip_ws(c, true);
        if (c.eof() || c.peek() != '=') fail(c, "expected '=' after key '" + key + "'");
        c.take();
        Value v = parse_value(c);
        skip_ws(c, true);
        if (!c.eof() && c.peek() != '\n' && c.peek() != '\r')
            fail(c, "unexpected trailing characters after value");
        const std::string full = table.empty() ? key : table + "." + key;
        cfg.values_[full] = std::move(v);
    }
    return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open config file: " + path.string(), 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

namespace {

[[noreturn]] void type_error(const std::string& key, const char* want) {
    throw ValidationError("config key '" + key + "' has the wrong type (expected " +
                          want + ")");
}

}  // namespace

double Config::get_double(const std::string& key, double def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&it->second))
        return static_cast<double>(*i);
    type_error(key, "number");
}

std::int64_t Config::get_int(const std::string& key, std::int64_t def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
    type_error(key, "integer");
}

bool Config::get_bool(const std::string& key, bool def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    if (const auto* b = std::get_if<bool>(&it->second)) return *b;
    type_error(key, "boolean");
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return def;
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    type_error(key, "string");
}

std::vector<double> Config::get_double_array(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return {};
    if (const auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
    if (const auto* d = std::get_if<double>(&it->second)) return {*d};
    if (const auto* i = std::get_if<std::int64_t>(&it->second))
        return {static_cast<double>(*i)};
    type_error(key, "number array");
}

double Config::require_double(const std::string& key) const {
    if (!has(key)) throw ValidationError("missing required config key '" + key + "'");
    return get_double(key, 0.0);
}

std::string Config::require_string(const std::string& key) const {
    if (!has(key)) throw ValidationError("missing required config key '" + key + "'");
    return get_string(key, "");
}

void Config::set_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override must be key=value: '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    if (raw == "true") {
        values_[key] = true;
        return;
    }
    if (raw == "false") {
        values_[key] = false;
        return;
    }
    try {
        std::size_t used = 0;
        if (raw.find_first_of(".eE") == std::string::npos) {
            const std::int64_t i = std::stoll(raw, &used);
            if (used == raw.size()) {
                values_[key] = i;
                return;
            }
        }
        const double d = std::stod(raw, &used);
        if (used == raw.size()) {
            values_[key] = d;
            return;
        }
    } catch (const std::exception&) {
    }
    values_[key] = raw;  // string fallback
}

std::string command_name(Command c) {
    switch (c) {
        case Command::StarGen: return "star-gen";
        case Command::CpgGen: return "cpg-gen";
        case Command::SimRun: return "sim-run";
        case Command::SimSweep: return "sim-sweep";
        case Command::FitContour: return "fit-contour";
        case Command::Metrics: return "metrics";
        case Command::BenchAnalyze: return "bench-analyze";
    }
    return "?";
}

std::optional<Command> command_from_name(const std::string& name) {
    for (Command c : {Command::StarGen, Command::CpgGen, Command::SimRun,
                      Command::SimSweep, Command::FitContour, Command::Metrics,
                      Command::BenchAnalyze}) {
        if (command_name(c) == name) return c;
    }
    return std::nullopt;
}

}  // namespace flapkit::cfg

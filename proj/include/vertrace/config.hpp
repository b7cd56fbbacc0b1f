#ifndef VERTRACE_CONFIG_HPP
#define VERTRACE_CONFIG_HPP

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertrace {

/// Parse failure with position information (exit code 2 at the CLI).
struct ConfigParseError : std::runtime_error {
  int line;
  int column;
  ConfigParseError(const std::string& msg, int l, int c)
      : std::runtime_error(msg + " at line " + std::to_string(l) + ", column " + std::to_string(c)),
        line(l),
        column(c) {}
};

/// Semantic failure: unknown keys, bad values (exit code 3 at the CLI).
struct ConfigValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plain-text structured configuration: `key = value` lines grouped under
/// `[section]` headers; `#` starts a comment. Keys are addressed as
/// "section.key" (top-of-file keys have no section prefix).
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text) {
    ExperimentConfig cfg;
    cfg.text_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto strip = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
      };
      std::string t = strip(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw ConfigParseError("unterminated section header", lineno, int(line.find('[')) + 1);
        section = strip(t.substr(1, t.size() - 2));
        if (section.empty()) throw ConfigParseError("empty section name", lineno, 1);
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigParseError("expected 'key = value'", lineno, int(line.find(t)) + 1);
      std::string key = strip(t.substr(0, eq));
      std::string val = strip(t.substr(eq + 1));
      if (key.empty()) throw ConfigParseError("empty key", lineno, 1);
      std::string full = section.empty() ? key : section + "." + key;
      if (cfg.values_.count(full))
        throw ConfigParseError("duplicate key '" + full + "'", lineno, 1);
      cfg.values_[full] = val;
    }
    return cfg;
  }

  const std::string& text() const { return text_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigValidationError("missing required key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }
  long get_int(const std::string& key) const {
    double v = get_double(key);
    long r = long(v);
    if (double(r) != v) throw ConfigValidationError("key '" + key + "' must be an integer");
    return r;
  }
  long get_int(const std::string& key, long dflt) const { return has(key) ? get_int(key) : dflt; }

  std::vector<double> get_doubles(const std::string& key) const {
    std::istringstream in(get_string(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(key, tok));
    if (out.empty()) throw ConfigValidationError("key '" + key + "' must hold at least one number");
    return out;
  }
  std::vector<double> get_doubles(const std::string& key, std::vector<double> dflt) const {
    return has(key) ? get_doubles(key) : dflt;
  }

  /// Reject keys outside the allowed set (prefix-qualified names).
  void require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : values_) {
      bool ok = false;
      for (const auto& a : allowed) ok = ok || (k == a);
      if (!ok) throw ConfigValidationError("unknown key '" + k + "'");
    }
  }

 private:
  static double to_double(const std::string& key, const std::string& s) {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigValidationError("key '" + key + "': cannot parse number from '" + s + "'");
    }
  }

  std::string text_;
  std::map<std::string, std::string> values_;
};

}  // namespace vertrace

#endif

#include "cat0/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cat0 {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

Config Config::parse(std::string_view text) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  long long v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + it->second + "'");
  }
}

Rational Config::get_rational(const std::string& key, const Rational& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return parse_rational(it->second);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a rational, got '" + it->second + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.empty()) return {};
  return split(it->second, ',');
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : entries_)
    if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

std::string Config::echo() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

WeightAssignment parse_weights(std::string_view text, const GroupFamily& family) {
  std::vector<Rational> w(static_cast<std::size_t>(family.generator_count()), Rational(1));
  const auto items = split(text, ',');
  bool named = false, positional = false;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& item = items[i];
    if (item.empty()) throw ConfigError("weights: empty entry");
    const auto eq = item.find('=');
    try {
      if (eq == std::string::npos) {
        positional = true;
        if (i >= w.size()) throw ConfigError("weights: more values than generators");
        w[i] = parse_rational(item);
      } else {
        named = true;
        const int gen = family.generator_index(trim(std::string_view(item).substr(0, eq)));
        w[static_cast<std::size_t>(gen)] = parse_rational(trim(std::string_view(item).substr(eq + 1)));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("weights: ") + e.what());
    }
  }
  if (named && positional) throw ConfigError("weights: mix of named and positional entries");
  for (const auto& x : w)
    if (x <= 0) throw ConfigError("weights must be positive");
  return WeightAssignment(std::move(w));
}

std::vector<std::vector<Rational>> parse_basis(std::string_view text) {
  std::vector<std::vector<Rational>> columns;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',') {
      ++i;
      continue;
    }
    if (text[i] != '(') throw ConfigError("basis: expected '(' in '" + std::string(text) + "'");
    const auto close = text.find(')', i);
    if (close == std::string_view::npos) throw ConfigError("basis: unbalanced parenthesis");
    std::vector<Rational> col;
    for (const auto& entry : split(text.substr(i + 1, close - i - 1), ',')) {
      try {
        col.push_back(parse_rational(entry));
      } catch (const std::exception&) {
        throw ConfigError("basis: bad entry '" + entry + "'");
      }
    }
    columns.push_back(std::move(col));
    i = close + 1;
  }
  const std::size_t n = columns.size();
  if (n == 0) throw ConfigError("basis: no columns");
  for (const auto& c : columns)
    if (c.size() != n) throw ConfigError("basis: must be square");
  // Stored by rows: basis[r][c] is entry r of column c.
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) rows[r][c] = columns[c][r];
  return rows;
}

namespace {

class FamilyParser {
 public:
  explicit FamilyParser(std::string_view s) : s_(s) {}

  FamilyPtr parse_top(std::vector<std::string> names) {
    FamilyPtr f = expr(std::move(names));
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(s_.substr(pos_)) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError("family: " + what); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }
  int number() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) fail("expected a number");
    return std::stoi(std::string(s_.substr(b, pos_ - b)));
  }

  FamilyPtr expr(std::vector<std::string> names) {
    std::vector<FamilyPtr> parts{term({})};
    while (eat('*')) parts.push_back(term({}));
    if (parts.size() == 1) {
      if (!names.empty()) return rename(parts[0], std::move(names));
      return parts[0];
    }
    return free_product(std::move(parts), std::move(names));
  }

  // Re-creates a family with explicit generator names.
  FamilyPtr rename(const FamilyPtr& f, std::vector<std::string> names) {
    switch (f->kind()) {
      case FamilyKind::FreeGroup: return free_group(f->rank(), std::move(names));
      case FamilyKind::FreeAbelian: return free_abelian(f->rank(), std::move(names));
      case FamilyKind::FiniteCyclic: return finite_cyclic(f->order(), std::move(names));
      case FamilyKind::FreeProduct: return free_product(f->factors(), std::move(names));
      case FamilyKind::DirectWithLine: return direct_with_line(f->base(), f->line_kind(), std::move(names));
    }
    return f;
  }

  FamilyPtr term(std::vector<std::string> names) {
    FamilyPtr f = atom();
    skip();
    const std::size_t save = pos_;
    if (ident() == "x") {
      const std::string line = ident();
      if (line == "Z") return direct_with_line(f, LineKind::Translation, std::move(names));
      if (line == "Dinf") return direct_with_line(f, LineKind::Dihedral, std::move(names));
      fail("expected Z or Dinf after 'x'");
    }
    pos_ = save;
    return f;
  }

  FamilyPtr atom() {
    if (eat('(')) {
      FamilyPtr f = expr({});
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    const std::string name = ident();
    if (name == "Z") return free_abelian(1);
    if (!eat('(')) fail("expected '(' after '" + name + "'");
    const int n = number();
    if (!eat(')')) fail("expected ')'");
    try {
      if (name == "free") return free_group(n);
      if (name == "abelian") return free_abelian(n);
      if (name == "cyclic") return finite_cyclic(n);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    fail("unknown family '" + name + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

FamilyPtr parse_family(std::string_view text, std::vector<std::string> names) {
  try {
    return FamilyParser(text).parse_top(std::move(names));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }
}

}  // namespace cat0

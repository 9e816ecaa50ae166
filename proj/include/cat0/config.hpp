#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cat0/groups.hpp"
#include "cat0/rational.hpp"

namespace cat0 {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Key-value text: one "key = value" per line, '#' starts a comment. Later
// lines override earlier ones. Getters throw ConfigError on malformed values.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  Rational get_rational(const std::string& key, const Rational& fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma separated; empty when absent.
  std::vector<std::string> get_list(const std::string& key) const;

  // Throws ConfigError naming the first key outside the allowed set.
  void require_known(const std::set<std::string>& allowed) const;

  // "key = value" lines in key order; parse() of the result is identical.
  std::string echo() const;

 private:
  std::map<std::string, std::string> entries_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Weights per generator, either positional "2, 1" or named "a=2, b=1/2".
// Unnamed generators keep weight 1.
WeightAssignment parse_weights(std::string_view text, const GroupFamily& family);

// Square matrix given by columns: "(1,0),(1,1)" has columns (1,0) and (1,1).
std::vector<std::vector<Rational>> parse_basis(std::string_view text);

// Family expressions: free(k), abelian(n), cyclic(m), products "A * B",
// direct products "A x Z" and "A x Dinf", with parentheses. Generator names
// are assigned by the factories unless given.
FamilyPtr parse_family(std::string_view text, std::vector<std::string> names = {});

}  // namespace cat0

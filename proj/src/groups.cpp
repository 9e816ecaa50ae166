#include "cat0/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace cat0 {

namespace {

std::vector<std::string> letter_names(int k) {
  std::vector<std::string> names;
  if (k <= 26) {
    for (int i = 0; i < k; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  } else {
    for (int i = 0; i < k; ++i) names.push_back("a" + std::to_string(i + 1));
  }
  return names;
}

void check_names(const std::vector<std::string>& names, int expected) {
  if (static_cast<int>(names.size()) != expected)
    throw std::invalid_argument("expected " + std::to_string(expected) + " generator names, got " +
                                std::to_string(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& n = names[i];
    if (n.empty() || !std::isalpha(static_cast<unsigned char>(n[0])))
      throw std::invalid_argument("bad generator name '" + n + "'");
    for (char c : n)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        throw std::invalid_argument("bad generator name '" + n + "'");
    if (n == "e") throw std::invalid_argument("'e' is reserved for the identity");
    for (std::size_t j = 0; j < i; ++j)
      if (names[j] == n) throw std::invalid_argument("duplicate generator name '" + n + "'");
  }
}

// Renames colliding names by appending 1, 2, ... to every member of a clash.
std::vector<std::string> dedupe(std::vector<std::string> names) {
  std::vector<std::string> out = names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    int count = 0;
    for (const auto& n : names) count += n == names[i];
    if (count > 1) {
      int ordinal = 0;
      for (std::size_t j = 0; j <= i; ++j) ordinal += names[j] == names[i];
      out[i] = names[i] + std::to_string(ordinal);
    }
  }
  return out;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void hash_mix(std::size_t& seed, std::size_t v) { seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); }

bool tree_factor(const GroupFamily& f) {
  return f.kind() == FamilyKind::FreeGroup || (f.kind() == FamilyKind::FreeAbelian && f.rank() == 1) ||
         (f.kind() == FamilyKind::FiniteCyclic && f.order() == 2);
}

}  // namespace

FamilyPtr free_group(int k, std::vector<std::string> names) {
  if (k < 1) throw std::invalid_argument("free group rank must be >= 1");
  if (names.empty()) names = letter_names(k);
  check_names(names, k);
  auto f = std::make_shared<GroupFamily>();
  f->kind_ = FamilyKind::FreeGroup;
  f->rank_ = k;
  f->names_ = std::move(names);
  return f;
}

FamilyPtr free_abelian(int n, std::vector<std::string> names) {
  if (n < 1) throw std::invalid_argument("free abelian rank must be >= 1");
  if (names.empty()) {
    if (n <= 4) {
      static const char* xs[] = {"x", "y", "z", "w"};
      for (int i = 0; i < n; ++i) names.emplace_back(xs[i]);
    } else {
      for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    }
  }
  check_names(names, n);
  auto f = std::make_shared<GroupFamily>();
  f->kind_ = FamilyKind::FreeAbelian;
  f->rank_ = n;
  f->names_ = std::move(names);
  return f;
}

FamilyPtr finite_cyclic(int m, std::vector<std::string> names) {
  if (m < 2) throw std::invalid_argument("cyclic order must be >= 2");
  if (names.empty()) names = {"s"};
  check_names(names, 1);
  auto f = std::make_shared<GroupFamily>();
  f->kind_ = FamilyKind::FiniteCyclic;
  f->order_ = m;
  f->names_ = std::move(names);
  return f;
}

FamilyPtr free_product(std::vector<FamilyPtr> factors, std::vector<std::string> names) {
  if (factors.size() < 2) throw std::invalid_argument("free product needs at least two factors");
  auto f = std::make_shared<GroupFamily>();
  f->kind_ = FamilyKind::FreeProduct;
  std::vector<std::string> flat;
  for (const auto& factor : factors) {
    if (!factor) throw std::invalid_argument("null factor");
    if (factor->kind() == FamilyKind::FreeProduct)
      throw std::invalid_argument("nested free products must be flattened");
    f->offsets_.push_back(static_cast<int>(flat.size()));
    for (const auto& n : factor->generator_names()) flat.push_back(n);
  }
  if (names.empty()) names = dedupe(flat);
  check_names(names, static_cast<int>(flat.size()));
  f->factors_ = std::move(factors);
  f->names_ = std::move(names);
  return f;
}

FamilyPtr direct_with_line(FamilyPtr base, LineKind line, std::vector<std::string> names) {
  if (!base) throw std::invalid_argument("null base family");
  if (base->kind() == FamilyKind::DirectWithLine)
    throw std::invalid_argument("nested direct products with a line are not supported");
  auto f = std::make_shared<GroupFamily>();
  f->kind_ = FamilyKind::DirectWithLine;
  f->line_kind_ = line;
  const int count = base->generator_count() + (line == LineKind::Translation ? 1 : 2);
  if (names.empty()) {
    names = base->generator_names();
    if (line == LineKind::Translation) {
      names.push_back("t");
    } else {
      names.push_back("c1");
      names.push_back("c2");
    }
    names = dedupe(names);
  }
  check_names(names, count);
  f->base_ = std::move(base);
  f->names_ = std::move(names);
  return f;
}

int GroupFamily::generator_index(std::string_view name) const {
  for (int i = 0; i < generator_count(); ++i)
    if (names_[i] == name) return i;
  throw std::invalid_argument("unknown generator '" + std::string(name) + "' in " + describe());
}

int GroupFamily::factor_of_generator(int gen) const {
  if (kind_ != FamilyKind::FreeProduct) throw std::invalid_argument("not a free product");
  if (gen < 0 || gen >= generator_count()) throw std::out_of_range("generator index");
  int f = static_cast<int>(offsets_.size()) - 1;
  while (offsets_[f] > gen) --f;
  return f;
}

int GroupFamily::line_generator() const {
  if (kind_ != FamilyKind::DirectWithLine) throw std::invalid_argument("not a direct product with a line");
  return base_->generator_count();
}

bool GroupFamily::is_involution(int gen) const {
  switch (kind_) {
    case FamilyKind::FreeGroup:
    case FamilyKind::FreeAbelian:
      return false;
    case FamilyKind::FiniteCyclic:
      return order_ == 2;
    case FamilyKind::FreeProduct: {
      const int f = factor_of_generator(gen);
      return factors_[f]->is_involution(gen - offsets_[f]);
    }
    case FamilyKind::DirectWithLine:
      if (gen < base_->generator_count()) return base_->is_involution(gen);
      return line_kind_ == LineKind::Dihedral;
  }
  return false;
}

bool GroupFamily::has_tree_cayley_graph() const {
  if (kind_ == FamilyKind::FreeGroup) return true;
  if (kind_ != FamilyKind::FreeProduct) return false;
  return std::all_of(factors_.begin(), factors_.end(), [](const FamilyPtr& f) { return tree_factor(*f); });
}

std::string GroupFamily::describe() const {
  switch (kind_) {
    case FamilyKind::FreeGroup:
      return "F" + std::to_string(rank_);
    case FamilyKind::FreeAbelian:
      return rank_ == 1 ? "Z" : "Z^" + std::to_string(rank_);
    case FamilyKind::FiniteCyclic:
      return "Z_" + std::to_string(order_);
    case FamilyKind::FreeProduct: {
      std::string s;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += " * ";
        const bool paren = factors_[i]->kind() == FamilyKind::DirectWithLine;
        s += paren ? "(" + factors_[i]->describe() + ")" : factors_[i]->describe();
      }
      return s;
    }
    case FamilyKind::DirectWithLine: {
      const bool paren = base_->kind() == FamilyKind::FreeProduct;
      const std::string b = paren ? "(" + base_->describe() + ")" : base_->describe();
      return b + (line_kind_ == LineKind::Translation ? " x Z" : " x Dinf");
    }
  }
  return "?";
}

bool same_family(const GroupFamily& a, const GroupFamily& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.rank() != b.rank() || a.order() != b.order()) return false;
  if (a.generator_names() != b.generator_names()) return false;
  if (a.kind() == FamilyKind::FreeProduct) {
    if (a.factors().size() != b.factors().size()) return false;
    for (std::size_t i = 0; i < a.factors().size(); ++i)
      if (!same_family(*a.factors()[i], *b.factors()[i])) return false;
  }
  if (a.kind() == FamilyKind::DirectWithLine)
    return a.line_kind() == b.line_kind() && same_family(*a.base(), *b.base());
  return true;
}

// ---------------------------------------------------------------------------

GroupElement GroupElement::identity(FamilyPtr family) {
  if (!family) throw std::invalid_argument("null family");
  GroupElement g;
  g.family_ = std::move(family);
  switch (g.family_->kind()) {
    case FamilyKind::FreeAbelian:
      g.coords_.assign(g.family_->rank(), 0);
      break;
    case FamilyKind::FiniteCyclic:
      g.coords_.assign(1, 0);
      break;
    case FamilyKind::DirectWithLine:
      g.base_.push_back(identity(g.family_->base()));
      break;
    default:
      break;
  }
  return g;
}

GroupElement GroupElement::generator(FamilyPtr family, int gen, std::int64_t exp) {
  GroupElement g = identity(family);
  const GroupFamily& f = *g.family_;
  if (gen < 0 || gen >= f.generator_count()) throw std::out_of_range("generator index out of range");
  switch (f.kind()) {
    case FamilyKind::FreeGroup:
      if (exp != 0) g.runs_.push_back({gen, exp});
      break;
    case FamilyKind::FreeAbelian:
      g.coords_[gen] = exp;
      break;
    case FamilyKind::FiniteCyclic:
      g.coords_[0] = mod(exp, f.order());
      break;
    case FamilyKind::FreeProduct: {
      const int fi = f.factor_of_generator(gen);
      GroupElement v = generator(f.factors()[fi], gen - f.factor_offset(fi), exp);
      if (!v.is_identity()) {
        g.syllable_factor_.push_back(fi);
        g.syllable_value_.push_back(std::move(v));
      }
      break;
    }
    case FamilyKind::DirectWithLine: {
      const int lg = f.line_generator();
      if (gen < lg) {
        g.base_[0] = generator(f.base(), gen, exp);
      } else if (f.line_kind() == LineKind::Translation) {
        g.line_ = exp;
      } else {
        const bool odd = (exp % 2) != 0;
        g.line_ = odd ? (gen == lg ? 1 : -1) : 0;
      }
      break;
    }
  }
  return g;
}

GroupElement GroupElement::abelian(FamilyPtr family, std::vector<std::int64_t> coords) {
  GroupElement g = identity(family);
  if (g.family_->kind() == FamilyKind::FreeAbelian) {
    if (static_cast<int>(coords.size()) != g.family_->rank()) throw std::invalid_argument("coordinate count");
    g.coords_ = std::move(coords);
  } else if (g.family_->kind() == FamilyKind::FiniteCyclic) {
    if (coords.size() != 1) throw std::invalid_argument("coordinate count");
    g.coords_[0] = mod(coords[0], g.family_->order());
  } else {
    throw std::invalid_argument("abelian(): family is not abelian");
  }
  return g;
}

GroupElement GroupElement::direct(FamilyPtr family, GroupElement base, std::int64_t line) {
  GroupElement g = identity(family);
  if (g.family_->kind() != FamilyKind::DirectWithLine) throw std::invalid_argument("direct(): not a direct product");
  if (!same_family(*base.family(), *g.family_->base())) throw std::invalid_argument("direct(): base family mismatch");
  g.base_[0] = std::move(base);
  g.line_ = line;
  return g;
}

GroupElement GroupElement::syllable(FamilyPtr product, int factor, GroupElement value) {
  GroupElement g = identity(product);
  if (g.family_->kind() != FamilyKind::FreeProduct) throw std::invalid_argument("syllable(): not a free product");
  if (factor < 0 || factor >= static_cast<int>(g.family_->factors().size()))
    throw std::out_of_range("syllable(): factor index");
  if (!same_family(*value.family(), *g.family_->factors()[factor]))
    throw std::invalid_argument("syllable(): factor family mismatch");
  if (!value.is_identity()) {
    g.syllable_factor_.push_back(factor);
    g.syllable_value_.push_back(std::move(value));
  }
  return g;
}

bool GroupElement::is_identity() const {
  switch (family_->kind()) {
    case FamilyKind::FreeGroup:
      return runs_.empty();
    case FamilyKind::FreeAbelian:
    case FamilyKind::FiniteCyclic:
      return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t c) { return c == 0; });
    case FamilyKind::FreeProduct:
      return syllable_factor_.empty();
    case FamilyKind::DirectWithLine:
      return line_ == 0 && base_[0].is_identity();
  }
  return false;
}

void GroupElement::check_same_family(const GroupElement& other) const {
  if (!family_ || !other.family_ || (family_ != other.family_ && !same_family(*family_, *other.family_)))
    throw std::invalid_argument("group family mismatch");
}

GroupElement& GroupElement::operator*=(const GroupElement& other) {
  if (&other == this) {
    const GroupElement copy = other;
    return *this *= copy;
  }
  check_same_family(other);
  switch (family_->kind()) {
    case FamilyKind::FreeGroup:
      for (const Run& r : other.runs_) {
        if (!runs_.empty() && runs_.back().gen == r.gen) {
          runs_.back().exp += r.exp;
          if (runs_.back().exp == 0) runs_.pop_back();
        } else {
          runs_.push_back(r);
        }
      }
      break;
    case FamilyKind::FreeAbelian:
      for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
      break;
    case FamilyKind::FiniteCyclic:
      coords_[0] = mod(coords_[0] + other.coords_[0], family_->order());
      break;
    case FamilyKind::FreeProduct:
      for (std::size_t i = 0; i < other.syllable_factor_.size(); ++i) {
        const int f = other.syllable_factor_[i];
        if (!syllable_factor_.empty() && syllable_factor_.back() == f) {
          syllable_value_.back() *= other.syllable_value_[i];
          if (syllable_value_.back().is_identity()) {
            syllable_value_.pop_back();
            syllable_factor_.pop_back();
          }
        } else {
          syllable_factor_.push_back(f);
          syllable_value_.push_back(other.syllable_value_[i]);
        }
      }
      break;
    case FamilyKind::DirectWithLine:
      base_[0] *= other.base_[0];
      if (family_->line_kind() == LineKind::Translation)
        line_ += other.line_;
      else
        line_ += (line_ % 2 == 0) ? other.line_ : -other.line_;
      break;
  }
  return *this;
}

GroupElement operator*(GroupElement g, const GroupElement& h) {
  g *= h;
  return g;
}

GroupElement GroupElement::inverse() const {
  GroupElement g = identity(family_);
  switch (family_->kind()) {
    case FamilyKind::FreeGroup:
      g.runs_.assign(runs_.rbegin(), runs_.rend());
      for (Run& r : g.runs_) r.exp = -r.exp;
      break;
    case FamilyKind::FreeAbelian:
      for (std::size_t i = 0; i < coords_.size(); ++i) g.coords_[i] = -coords_[i];
      break;
    case FamilyKind::FiniteCyclic:
      g.coords_[0] = mod(-coords_[0], family_->order());
      break;
    case FamilyKind::FreeProduct:
      g.syllable_factor_.assign(syllable_factor_.rbegin(), syllable_factor_.rend());
      for (auto it = syllable_value_.rbegin(); it != syllable_value_.rend(); ++it)
        g.syllable_value_.push_back(it->inverse());
      break;
    case FamilyKind::DirectWithLine:
      g.base_[0] = base_[0].inverse();
      if (family_->line_kind() == LineKind::Translation)
        g.line_ = -line_;
      else
        g.line_ = (line_ % 2 == 0) ? -line_ : line_;
      break;
  }
  return g;
}

void GroupElement::append_letters(std::vector<int>& out, int offset) const {
  auto push = [&](int gen, std::int64_t exp) {
    const int code = 2 * (gen + offset) + (exp < 0 ? 1 : 0);
    for (std::int64_t i = 0; i < std::abs(exp); ++i) out.push_back(code);
  };
  switch (family_->kind()) {
    case FamilyKind::FreeGroup:
      for (const Run& r : runs_) push(r.gen, r.exp);
      break;
    case FamilyKind::FreeAbelian:
      for (std::size_t i = 0; i < coords_.size(); ++i) push(static_cast<int>(i), coords_[i]);
      break;
    case FamilyKind::FiniteCyclic: {
      const std::int64_t m = family_->order();
      const std::int64_t c = coords_[0];
      if (c <= m - c)
        push(0, c);
      else
        push(0, -(m - c));
      break;
    }
    case FamilyKind::FreeProduct:
      for (std::size_t i = 0; i < syllable_factor_.size(); ++i)
        syllable_value_[i].append_letters(out, offset + family_->factor_offset(syllable_factor_[i]));
      break;
    case FamilyKind::DirectWithLine: {
      base_[0].append_letters(out, offset);
      const int lg = family_->line_generator();
      if (family_->line_kind() == LineKind::Translation) {
        push(lg, line_);
      } else {
        // t > 0 reads c1 c2 c1 ..., t < 0 reads c2 c1 c2 ...
        int gen = line_ > 0 ? lg : lg + 1;
        for (std::int64_t i = 0; i < std::abs(line_); ++i) {
          out.push_back(2 * (gen + offset));
          gen = gen == lg ? lg + 1 : lg;
        }
      }
      break;
    }
  }
}

std::vector<int> GroupElement::letters() const {
  std::vector<int> out;
  append_letters(out, 0);
  return out;
}

std::size_t GroupElement::letter_count() const {
  switch (family_->kind()) {
    case FamilyKind::FreeGroup: {
      std::size_t n = 0;
      for (const Run& r : runs_) n += static_cast<std::size_t>(std::abs(r.exp));
      return n;
    }
    case FamilyKind::FreeProduct: {
      std::size_t n = 0;
      for (const auto& v : syllable_value_) n += v.letter_count();
      return n;
    }
    case FamilyKind::DirectWithLine:
      return base_[0].letter_count() + static_cast<std::size_t>(std::abs(line_));
    default:
      return letters().size();
  }
}

namespace {

// Renders a normal form with flattened generator names starting at offset.
void render(const GroupElement& g, int offset, const std::vector<std::string>& names, std::vector<std::string>& out) {
  auto run = [&](int gen, std::int64_t exp) {
    out.push_back(names[gen + offset] + (exp != 1 ? "^" + std::to_string(exp) : ""));
  };
  const GroupFamily& f = *g.family();
  switch (f.kind()) {
    case FamilyKind::FreeGroup:
      for (const Run& r : g.runs()) run(r.gen, r.exp);
      break;
    case FamilyKind::FreeAbelian:
      for (std::size_t i = 0; i < g.coords().size(); ++i)
        if (g.coords()[i] != 0) run(static_cast<int>(i), g.coords()[i]);
      break;
    case FamilyKind::FiniteCyclic:
      if (g.coords()[0] != 0) run(0, g.coords()[0]);
      break;
    case FamilyKind::FreeProduct:
      for (std::size_t i = 0; i < g.syllable_factors().size(); ++i)
        render(g.syllable_values()[i], offset + f.factor_offset(g.syllable_factors()[i]), names, out);
      break;
    case FamilyKind::DirectWithLine: {
      render(g.base(), offset, names, out);
      const int lg = f.line_generator();
      if (f.line_kind() == LineKind::Translation) {
        if (g.line() != 0) run(lg, g.line());
      } else {
        int gen = g.line() > 0 ? lg : lg + 1;
        for (std::int64_t i = 0; i < std::abs(g.line()); ++i) {
          run(gen, 1);
          gen = gen == lg ? lg + 1 : lg;
        }
      }
      break;
    }
  }
}

}  // namespace

std::string GroupElement::to_string() const {
  if (is_identity()) return "e";
  std::vector<std::string> parts;
  render(*this, 0, family_->generator_names(), parts);
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : " ") + p;
  return s;
}

std::size_t GroupElement::hash() const {
  std::size_t seed = static_cast<std::size_t>(family_->kind());
  switch (family_->kind()) {
    case FamilyKind::FreeGroup:
      for (const Run& r : runs_) {
        hash_mix(seed, static_cast<std::size_t>(r.gen));
        hash_mix(seed, static_cast<std::size_t>(r.exp));
      }
      break;
    case FamilyKind::FreeAbelian:
    case FamilyKind::FiniteCyclic:
      for (auto c : coords_) hash_mix(seed, static_cast<std::size_t>(c));
      break;
    case FamilyKind::FreeProduct:
      for (std::size_t i = 0; i < syllable_factor_.size(); ++i) {
        hash_mix(seed, static_cast<std::size_t>(syllable_factor_[i]));
        hash_mix(seed, syllable_value_[i].hash());
      }
      break;
    case FamilyKind::DirectWithLine:
      hash_mix(seed, base_[0].hash());
      hash_mix(seed, static_cast<std::size_t>(line_));
      break;
  }
  return seed;
}

bool GroupElement::operator==(const GroupElement& other) const {
  if (!family_ || !other.family_) return family_ == other.family_;
  if (family_ != other.family_ && !same_family(*family_, *other.family_)) return false;
  return runs_ == other.runs_ && coords_ == other.coords_ && syllable_factor_ == other.syllable_factor_ &&
         syllable_value_ == other.syllable_value_ && base_ == other.base_ && line_ == other.line_;
}

// ---------------------------------------------------------------------------

GroupElement reduce(const RawWord& word, const FamilyPtr& family) {
  GroupElement g = GroupElement::identity(family);
  for (const auto& [gen, exp] : word) g *= GroupElement::generator(family, gen, exp);
  return g;
}

GroupElement multiply(const GroupElement& g, const GroupElement& h) { return g * h; }

GroupElement power(const GroupElement& g, std::int64_t n) {
  GroupElement base = n < 0 ? g.inverse() : g;
  std::int64_t k = n < 0 ? -n : n;
  GroupElement result = GroupElement::identity(g.family());
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

GroupElement parse_element(std::string_view text, const FamilyPtr& family) {
  RawWord word;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*' || text[i] == '.'))
      ++i;
  };
  skip();
  while (i < text.size()) {
    const std::size_t start = i;
    if (!std::isalnum(static_cast<unsigned char>(text[i])) && text[i] != '_')
      throw std::invalid_argument("unexpected character in word: '" + std::string(text) + "'");
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
    const std::string name(text.substr(start, i - start));
    std::int64_t exp = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      const std::size_t es = i;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      const std::string e(text.substr(es, i - es));
      if (e.empty() || e == "-" || e == "+") throw std::invalid_argument("bad exponent in '" + std::string(text) + "'");
      exp = std::stoll(e);
    }
    if (name == "e" || name == "1") {
      if (exp != 1) throw std::invalid_argument("exponent on identity");
    } else {
      word.emplace_back(family->generator_index(name), exp);
    }
    skip();
  }
  return reduce(word, family);
}

std::vector<std::pair<int, GroupElement>> syllables(const GroupElement& g) {
  if (g.family()->kind() != FamilyKind::FreeProduct) throw std::invalid_argument("syllables(): not a free product");
  std::vector<std::pair<int, GroupElement>> out;
  for (std::size_t i = 0; i < g.syllable_factors().size(); ++i)
    out.emplace_back(g.syllable_factors()[i], g.syllable_values()[i]);
  return out;
}

// ---------------------------------------------------------------------------

WeightAssignment::WeightAssignment(std::vector<Rational> weights) : weights_(std::move(weights)) {
  for (const auto& w : weights_)
    if (w <= 0) throw std::invalid_argument("weights must be positive");
}

WeightAssignment WeightAssignment::unit(const GroupFamily& family) {
  return WeightAssignment(std::vector<Rational>(family.generator_count(), Rational(1)));
}

Rational WeightAssignment::min_weight() const {
  if (weights_.empty()) throw std::logic_error("empty weight assignment");
  return *std::min_element(weights_.begin(), weights_.end());
}

Rational WeightAssignment::max_weight() const {
  if (weights_.empty()) throw std::logic_error("empty weight assignment");
  return *std::max_element(weights_.begin(), weights_.end());
}

WeightAssignment WeightAssignment::slice(int offset, int count) const {
  return WeightAssignment(std::vector<Rational>(weights_.begin() + offset, weights_.begin() + offset + count));
}

Rational word_length(const GroupElement& g, const WeightAssignment& w) {
  const GroupFamily& f = *g.family();
  if (static_cast<int>(w.size()) != f.generator_count()) throw std::invalid_argument("weight count mismatch");
  Rational total(0);
  switch (f.kind()) {
    case FamilyKind::FreeGroup:
      for (const Run& r : g.runs()) total += w[r.gen] * Rational(std::abs(r.exp));
      break;
    case FamilyKind::FreeAbelian:
      for (std::size_t i = 0; i < g.coords().size(); ++i)
        total += w[static_cast<int>(i)] * Rational(std::abs(g.coords()[i]));
      break;
    case FamilyKind::FiniteCyclic: {
      const std::int64_t c = g.coords()[0];
      total = w[0] * Rational(std::min(c, f.order() - c));
      break;
    }
    case FamilyKind::FreeProduct:
      for (std::size_t i = 0; i < g.syllable_factors().size(); ++i) {
        const int fi = g.syllable_factors()[i];
        const auto& factor = *f.factors()[fi];
        total += word_length(g.syllable_values()[i], w.slice(f.factor_offset(fi), factor.generator_count()));
      }
      break;
    case FamilyKind::DirectWithLine: {
      const int lg = f.line_generator();
      total = word_length(g.base(), w.slice(0, lg));
      const std::int64_t t = g.line();
      if (f.line_kind() == LineKind::Translation) {
        total += w[lg] * Rational(std::abs(t));
      } else {
        const std::int64_t n = std::abs(t);
        const int first = t > 0 ? lg : lg + 1;
        const int second = t > 0 ? lg + 1 : lg;
        total += w[first] * Rational((n + 1) / 2) + w[second] * Rational(n / 2);
      }
      break;
    }
  }
  return total;
}

Rational weighted_length(const GroupElement& g, const WeightAssignment& weights) {
  if (!g.family()->has_tree_cayley_graph())
    throw std::invalid_argument("weighted_length(): " + g.family()->describe() + " has no tree Cayley graph");
  return word_length(g, weights);
}

// ---------------------------------------------------------------------------

namespace {

void append_tree_runs(const GroupElement& g, int offset, TreeWord& out) {
  const GroupFamily& f = *g.family();
  switch (f.kind()) {
    case FamilyKind::FreeGroup:
      for (const Run& r : g.runs()) out.push_back({r.gen + offset, r.exp > 0 ? 1 : -1, std::abs(r.exp)});
      break;
    case FamilyKind::FreeAbelian:
      if (f.rank() != 1) throw std::invalid_argument("tree_word(): Z^n factor with n > 1");
      if (g.coords()[0] != 0) out.push_back({offset, g.coords()[0] > 0 ? 1 : -1, std::abs(g.coords()[0])});
      break;
    case FamilyKind::FiniteCyclic:
      if (f.order() != 2) throw std::invalid_argument("tree_word(): cyclic factor of order > 2");
      if (g.coords()[0] != 0) out.push_back({offset, 1, 1});
      break;
    case FamilyKind::FreeProduct:
      for (std::size_t i = 0; i < g.syllable_factors().size(); ++i)
        append_tree_runs(g.syllable_values()[i], offset + f.factor_offset(g.syllable_factors()[i]), out);
      break;
    case FamilyKind::DirectWithLine:
      throw std::invalid_argument("tree_word(): nested direct product");
  }
}

}  // namespace

TreeWord tree_word(const GroupElement& g) {
  const GroupElement& t = g.family()->kind() == FamilyKind::DirectWithLine ? g.base() : g;
  if (!t.family()->has_tree_cayley_graph())
    throw std::invalid_argument("tree_word(): " + t.family()->describe() + " has no tree Cayley graph");
  TreeWord out;
  append_tree_runs(t, 0, out);
  return out;
}

GroupElement from_tree_word(const FamilyPtr& tree_family, const TreeWord& word) {
  GroupElement g = GroupElement::identity(tree_family);
  for (const TreeRun& r : word) g *= GroupElement::generator(tree_family, r.gen, r.sign * r.count);
  return g;
}

void append_run(TreeWord& word, TreeRun run, const GroupFamily& tree_family) {
  if (run.count == 0) return;
  const bool inv = tree_family.is_involution(run.gen);
  if (inv) {
    run.sign = 1;
    run.count %= 2;
    if (run.count == 0) return;
  }
  while (run.count > 0 && !word.empty() && word.back().gen == run.gen) {
    TreeRun& last = word.back();
    if (inv) {
      word.pop_back();
      return;
    }
    if (last.sign == run.sign) {
      last.count += run.count;
      return;
    }
    const std::int64_t cancel = std::min(last.count, run.count);
    last.count -= cancel;
    run.count -= cancel;
    if (last.count == 0) word.pop_back();
  }
  if (run.count > 0) word.push_back(run);
}

Rational tree_word_length(const TreeWord& word, const WeightAssignment& weights) {
  Rational total(0);
  for (const TreeRun& r : word) total += weights[r.gen] * Rational(r.count);
  return total;
}

std::int64_t tree_word_letters(const TreeWord& word) {
  std::int64_t n = 0;
  for (const TreeRun& r : word) n += r.count;
  return n;
}

std::string tree_word_string(const TreeWord& word, const GroupFamily& tree_family) {
  if (word.empty()) return "e";
  std::string s;
  for (const TreeRun& r : word) {
    if (!s.empty()) s += " ";
    s += tree_family.generator_name(r.gen);
    const std::int64_t e = r.sign * r.count;
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

}  // namespace cat0

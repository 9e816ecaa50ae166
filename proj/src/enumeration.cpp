#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_set>

#include "cat0/groups.hpp"

namespace cat0 {

// Breadth-first search over the Cayley graph restricted to the ball. Every
// element of the ball is reached because each prefix of a geodesic word is no
// longer than the word itself.
void for_each_in_ball(const FamilyPtr& family, const WeightAssignment& weights, const Rational& L,
                      const std::function<void(const GroupElement&)>& visit) {
  if (static_cast<int>(weights.size()) != family->generator_count())
    throw std::invalid_argument("ball(): weight count mismatch");
  if (L < 0) return;
  std::vector<GroupElement> steps;
  for (int gen = 0; gen < family->generator_count(); ++gen) {
    steps.push_back(GroupElement::generator(family, gen, 1));
    if (!family->is_involution(gen)) steps.push_back(GroupElement::generator(family, gen, -1));
  }
  std::unordered_set<GroupElement, GroupElementHash> seen;
  std::deque<GroupElement> queue;
  GroupElement e = GroupElement::identity(family);
  seen.insert(e);
  queue.push_back(e);
  while (!queue.empty()) {
    GroupElement g = std::move(queue.front());
    queue.pop_front();
    visit(g);
    for (const auto& s : steps) {
      GroupElement h = g * s;
      if (seen.count(h)) continue;
      if (word_length(h, weights) > L) continue;
      seen.insert(h);
      queue.push_back(std::move(h));
    }
  }
}

std::vector<GroupElement> ball(const FamilyPtr& family, const WeightAssignment& weights, const Rational& L) {
  struct Entry {
    Rational length;
    std::vector<int> letters;
    GroupElement element;
  };
  std::vector<Entry> entries;
  for_each_in_ball(family, weights, L, [&](const GroupElement& g) {
    entries.push_back({word_length(g, weights), g.letters(), g});
  });
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.letters < b.letters;
  });
  std::vector<GroupElement> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.element));
  return out;
}

}  // namespace cat0

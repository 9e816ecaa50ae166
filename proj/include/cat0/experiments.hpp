#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cat0/actions.hpp"
#include "cat0/config.hpp"
#include "cat0/report.hpp"

namespace cat0 {

// F2 x Z on T x R with the dot action (natural) and the star action, where
// the height shift is 0 for a and 2 for b.
struct ActionPair {
  FamilyPtr group;
  ActionSpec x, y;
};
ActionPair bowers_ruane_pair();

// g_1 = x y, g_n = g_{n-1} x^(2^(n-1)) for even n and g_{n-1} y^(2^(n-1)) for
// odd n, in a free group with generators x, y. Returns g_1, ..., g_count.
std::vector<GroupElement> doubling_sequence(const FamilyPtr& free2, int x, int y, int count);

// Involution version on Z_2 * Z_2 * Z_2: g_1 = u w, g_n = g_{n-1} (u w)^(2^(n-2))
// for even n and g_{n-1} (v w)^(2^(n-2)) for odd n. The letter count of g_n
// is 2^n.
std::vector<GroupElement> coxeter_doubling_sequence(const FamilyPtr& coxeter3, int u, int v, int w, int count);

// The same sequence as run-length tree words, cheap for large counts.
std::vector<TreeWord> coxeter_doubling_words(const FamilyPtr& coxeter3, int u, int v, int w, int count);

// Lifts base elements g_n to (g_n, 2^n) in the direct product.
std::vector<GroupElement> lift_with_heights(const FamilyPtr& direct, const std::vector<GroupElement>& base);

// Angle of the translation direction of (w, k) acting on the tree x line
// piece of the complex for (F2 x Z) * Z_2 with edge lengths p (a) and q (b).
// Read off the complex metric from the orbit of (w, k)^n.
double conjecture_angle(const Rational& p, const Rational& q, const GroupElement& wk, int power = 8);

Report run_bowers_ruane(const Config& cfg);
Report run_doubling_family(const Config& cfg);
Report run_rigid_family(const Config& cfg);
Report run_coxeter_family(const Config& cfg);
Report run_conjecture_scan(const Config& cfg);

std::vector<std::string> experiment_names();
// Throws ConfigError for unknown names.
Report run_experiment(const std::string& name, const Config& cfg);

inline constexpr const char* kSamplingDisclaimer =
    "invariant sampling only: spectrum distances are a heuristic signal and do not decide whether the "
    "boundaries are homeomorphic";

}  // namespace cat0

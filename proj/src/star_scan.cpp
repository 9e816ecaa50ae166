#include "cat0/star_scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "cat0/closed_forms.hpp"

namespace cat0 {

namespace {

constexpr double kRel = 1e-9;

bool exact_within(const Rational& D, const Rational& H, const Rational& s, const Rational& delta, const Rational& h,
                  const Rational& K) {
  if (auto r = strip_within_sq(D, H, s, delta, h, K)) return *r;
  return strip_point_segment_sq<Rational>(D, H, s, delta, h) <= K;
}

bool is_product_action(const ActionSpec& A) { return std::holds_alternative<ProductSpace>(A.space); }

void run_tasks(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Partial result of one task, merged in task order for determinism.
struct Partial {
  std::vector<double> max_y;  // squared
  std::vector<std::optional<std::pair<GroupElement, GroupElement>>> argmax;
  std::vector<std::optional<Rational>> max_y_sq;
  std::size_t elements = 0, hits = 0, failures = 0;
  std::optional<std::pair<GroupElement, GroupElement>> failure;
  int failure_len = 0;

  explicit Partial(int L) : max_y(L + 1, -1.0), argmax(L + 1), max_y_sq(L + 1) {}

  void offer_failure(const GroupElement& g, const GroupElement& a) {
    ++failures;
    if (!failure || ball_order_less(g, failure->first) ||
        (g == failure->first && ball_order_less(a, failure->second))) {
      failure = std::make_pair(g, a);
      failure_len = static_cast<int>(word_length(g, WeightAssignment::unit(*g.family())).numerator());
    }
  }
};

PairScanResult merge(std::vector<Partial>& parts, int L) {
  PairScanResult out;
  out.L = L;
  out.max_y_by_length.assign(L + 1, -1.0);
  out.max_y_sq_by_length.assign(L + 1, std::nullopt);
  out.argmax_by_length.assign(L + 1, std::nullopt);
  std::vector<double> best(L + 1, -1.0);
  for (auto& p : parts) {
    out.elements += p.elements;
    out.hits += p.hits;
    out.failures += p.failures;
    for (int l = 0; l <= L; ++l) {
      if (!p.argmax[l]) continue;
      bool better = p.max_y[l] > best[l];
      if (p.max_y_sq[l] && out.max_y_sq_by_length[l]) better = *p.max_y_sq[l] > *out.max_y_sq_by_length[l];
      if (!out.argmax_by_length[l] || better) {
        best[l] = p.max_y[l];
        out.argmax_by_length[l] = p.argmax[l];
        out.max_y_sq_by_length[l] = p.max_y_sq[l];
      }
    }
    if (p.failure && (!out.first_failure || ball_order_less(p.failure->first, out.first_failure->first) ||
                      (p.failure->first == out.first_failure->first &&
                       ball_order_less(p.failure->second, out.first_failure->second))))
      out.first_failure = p.failure;
  }
  for (int l = 0; l <= L; ++l) out.max_y_by_length[l] = best[l] < 0 ? -1.0 : std::sqrt(best[l]);
  return out;
}

// ---- fast path ---------------------------------------------------------------

struct Side {
  std::vector<double> w;
  std::vector<Rational> wr;
  std::vector<double> shift;
  std::vector<Rational> shift_r;
  double unit = 1;
  Rational unit_r{1};
};

Side side_of(const ActionSpec& A) {
  const auto& T = std::get<ProductSpace>(A.space).tree;
  Side s;
  const int k = T.family->generator_count();
  for (int g = 0; g < k; ++g) {
    s.wr.push_back(T.weights[g]);
    s.w.push_back(T.weight(g));
    const Rational sh = A.shift.empty() ? Rational(0) : A.shift[g];
    s.shift_r.push_back(sh);
    s.shift.push_back(to_double(sh));
  }
  s.unit_r = A.line_unit;
  s.unit = to_double(A.line_unit);
  return s;
}

struct Letter {
  int gen;
  int sign;
};

// Path leaving the arc [e, w] at an arc vertex. The empty branch is the arc
// vertex itself. Offsets are tree distance (d) and height shift (h).
struct Branch {
  std::vector<Letter> letters;
  double dx = 0, dy = 0, hx = 0, hy = 0;
  Rational dx_r, dy_r, hx_r, hy_r;
};

class FastScan {
 public:
  FastScan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, std::optional<Rational> M, int L)
      : AX_(AX), AY_(AY), L_(L), X_(side_of(AX)), Y_(side_of(AY)) {
    group_ = AX.group;
    tree_family_ = group_->base();
    F_ = tree_family_.get();
    for (int g = 0; g < F_->generator_count(); ++g) {
      letters_.push_back({g, 1});
      if (!F_->is_involution(g)) letters_.push_back({g, -1});
    }
    N_ = to_double(N);
    N2_ = N_ * N_;
    N2r_ = N * N;
    if (M) {
      M2r_ = *M * *M;
      M2_ = to_double(*M2r_);
    }
    // Branch sets per (previous arc letter, next arc letter), -1 for none.
    const int nl = static_cast<int>(letters_.size());
    branch_sets_.resize(static_cast<std::size_t>((nl + 1) * (nl + 1)));
    for (int back = -1; back < nl; ++back)
      for (int next = -1; next < nl; ++next) {
        auto& set = branch_sets_[static_cast<std::size_t>((back + 1) * (nl + 1) + next + 1)];
        set.push_back(Branch{});
        std::optional<Letter> fb, fn;
        if (back >= 0) fb = letters_[back];
        if (next >= 0) fn = letters_[next];
        grow(Branch{}, fn, fb, set);
      }
  }

  const std::vector<Letter>& letters() const { return letters_; }

  bool inverse(const Letter& a, const Letter& b) const {
    return a.gen == b.gen && (F_->is_involution(a.gen) || a.sign == -b.sign);
  }

  // Runs the subtree of reduced words starting with prefix; with deep ==
  // false only the prefix itself is processed.
  void run(const std::vector<Letter>& prefix, bool deep, Partial& out) {
    word_.clear();
    idx_.clear();
    px_ = {0.0};
    py_ = {0.0};
    pxr_ = {Rational(0)};
    pyr_ = {Rational(0)};
    shx_ = {0.0};
    shy_ = {0.0};
    shxr_ = {Rational(0)};
    shyr_ = {Rational(0)};
    for (const Letter& l : prefix) push(index_of(l));
    if (deep)
      dfs(out);
    else
      process(out);
  }

 private:
  int index_of(const Letter& l) const {
    for (std::size_t i = 0; i < letters_.size(); ++i)
      if (letters_[i].gen == l.gen && letters_[i].sign == l.sign) return static_cast<int>(i);
    throw std::logic_error("fast scan: unknown letter");
  }

  void push(int li) {
    const Letter& l = letters_[li];
    word_.push_back(l);
    idx_.push_back(li);
    px_.push_back(px_.back() + X_.w[l.gen]);
    py_.push_back(py_.back() + Y_.w[l.gen]);
    pxr_.push_back(pxr_.back() + X_.wr[l.gen]);
    pyr_.push_back(pyr_.back() + Y_.wr[l.gen]);
    shx_.push_back(shx_.back() + l.sign * X_.shift[l.gen]);
    shy_.push_back(shy_.back() + l.sign * Y_.shift[l.gen]);
    shxr_.push_back(shxr_.back() + Rational(l.sign) * X_.shift_r[l.gen]);
    shyr_.push_back(shyr_.back() + Rational(l.sign) * Y_.shift_r[l.gen]);
  }

  void pop() {
    word_.pop_back();
    idx_.pop_back();
    px_.pop_back();
    py_.pop_back();
    pxr_.pop_back();
    pyr_.pop_back();
    shx_.pop_back();
    shy_.pop_back();
    shxr_.pop_back();
    shyr_.pop_back();
  }

  void dfs(Partial& out) {
    process(out);
    if (static_cast<int>(word_.size()) >= L_) return;
    for (int li = 0; li < static_cast<int>(letters_.size()); ++li) {
      if (!word_.empty() && inverse(word_.back(), letters_[li])) continue;
      push(li);
      dfs(out);
      pop();
    }
  }

  // Extends a branch by letters keeping the X tree offset within N.
  void grow(const Branch& c, std::optional<Letter> forbid_next, std::optional<Letter> back,
            std::vector<Branch>& out) const {
    for (const Letter& l : letters_) {
      if (forbid_next && l.gen == forbid_next->gen && l.sign == forbid_next->sign) continue;
      if (back && inverse(*back, l)) continue;
      const double ndx = c.dx + X_.w[l.gen];
      if (ndx > N_ * (1 + kRel)) continue;
      Branch d = c;
      d.letters.push_back(l);
      d.dx = ndx;
      d.dy += Y_.w[l.gen];
      d.dx_r += X_.wr[l.gen];
      d.dy_r += Y_.wr[l.gen];
      d.hx += l.sign * X_.shift[l.gen];
      d.hy += l.sign * Y_.shift[l.gen];
      d.hx_r += Rational(l.sign) * X_.shift_r[l.gen];
      d.hy_r += Rational(l.sign) * Y_.shift_r[l.gen];
      out.push_back(d);
      grow(d, std::nullopt, l, out);
    }
  }

  // Branches at arc vertex i avoid the arc in both directions: the next
  // letter, and the inverse of the previous one (excluded by grow()).
  const std::vector<Branch>& branches_at(int i) const {
    const int nl = static_cast<int>(letters_.size());
    const int n = static_cast<int>(word_.size());
    const int prev = i > 0 ? idx_[i - 1] : -1;
    const int next = i < n ? idx_[i] : -1;
    return branch_sets_[static_cast<std::size_t>((prev + 1) * (nl + 1) + next + 1)];
  }

  GroupElement element_g(std::int64_t k) const {
    TreeWord w;
    for (const Letter& l : word_) append_run(w, {l.gen, l.sign, 1}, *F_);
    return GroupElement::direct(group_, from_tree_word(tree_family_, w), k);
  }

  GroupElement element_a(int arc, const Branch& b, std::int64_t j) const {
    TreeWord w;
    for (int i = 0; i < arc; ++i) append_run(w, {word_[i].gen, word_[i].sign, 1}, *F_);
    for (const Letter& l : b.letters) append_run(w, {l.gen, l.sign, 1}, *F_);
    return GroupElement::direct(group_, from_tree_word(tree_family_, w), j);
  }

  void process(Partial& out) {
    const int n = static_cast<int>(word_.size());
    const double Dx = px_[n], Dy = py_[n];
    const Rational Dxr = pxr_[n], Dyr = pyr_[n];
    for (std::int64_t k = -(L_ - n); k <= L_ - n; ++k) {
      ++out.elements;
      const int len = n + static_cast<int>(std::abs(k));
      const double Hx = X_.unit * static_cast<double>(k) + shx_[n];
      const double Hy = Y_.unit * static_cast<double>(k) + shy_[n];
      const double stretch = Dx > 0 ? std::sqrt(Dx * Dx + Hx * Hx) / Dx : 0.0;
      std::optional<GroupElement> g_elem;
      for (int i = 0; i <= n; ++i) {
        const double sx = px_[i], sy = py_[i];
        for (const Branch& br : branches_at(i)) {
          // Tree offset dx leaves sqrt(N^2 - dx^2) for the planar distance.
          const double room = std::sqrt(std::max(0.0, N2_ - br.dx * br.dx)) * (1 + kRel) + 1e-12;
          double lo, hi, centre = 0;
          if (Dx > 0) {
            centre = sx * Hx / Dx;
            lo = centre - room * stretch;
            hi = centre + room * stretch;
          } else {
            lo = std::min(0.0, Hx) - room;
            hi = std::max(0.0, Hx) + room;
          }
          const double ch = shx_[i] + br.hx;
          const double slack = 1e-9 * std::max(1.0, std::abs(lo) + std::abs(hi));
          const auto j0 = static_cast<std::int64_t>(std::ceil((lo - ch) / X_.unit - slack));
          const auto j1 = static_cast<std::int64_t>(std::floor((hi - ch) / X_.unit + slack));
          for (std::int64_t j = j0; j <= j1; ++j) {
            const double hx = X_.unit * static_cast<double>(j) + ch;
            const double dx2 = strip_point_segment_sq<double>(Dx, Hx, sx, br.dx, hx);
            const double tol = kRel * std::max(1.0, N2_);
            if (dx2 > N2_ + tol) continue;
            if (dx2 >= N2_ - tol) {
              const Rational Hxr = X_.unit_r * Rational(k) + shxr_[n];
              const Rational hxr = X_.unit_r * Rational(j) + shxr_[i] + br.hx_r;
              if (!exact_within(Dxr, Hxr, pxr_[i], br.dx_r, hxr, N2r_)) continue;
            }
            ++out.hits;
            const double hy = Y_.unit * static_cast<double>(j) + shy_[i] + br.hy;
            const double dy2 = strip_point_segment_sq<double>(Dy, Hy, sy, br.dy, hy);
            if (dy2 > out.max_y[len]) {
              out.max_y[len] = dy2;
              if (!g_elem) g_elem = element_g(k);
              out.argmax[len] = std::make_pair(*g_elem, element_a(i, br, j));
            }
            if (M2r_) {
              const double mtol = kRel * std::max(1.0, M2_);
              bool fail = dy2 > M2_ + mtol;
              if (!fail && dy2 >= M2_ - mtol) {
                const Rational Hyr = Y_.unit_r * Rational(k) + shyr_[n];
                const Rational hyr = Y_.unit_r * Rational(j) + shyr_[i] + br.hy_r;
                fail = !exact_within(Dyr, Hyr, pyr_[i], br.dy_r, hyr, *M2r_);
              }
              if (fail) {
                if (!out.failure || len <= out.failure_len) {
                  if (!g_elem) g_elem = element_g(k);
                  out.offer_failure(*g_elem, element_a(i, br, j));
                } else {
                  ++out.failures;
                }
              }
            }
          }
        }
      }
    }
  }

  const ActionSpec& AX_;
  const ActionSpec& AY_;
  int L_;
  Side X_, Y_;
  FamilyPtr group_, tree_family_;
  const GroupFamily* F_ = nullptr;
  std::vector<Letter> letters_;
  double N_ = 0, N2_ = 0, M2_ = 0;
  Rational N2r_;
  std::optional<Rational> M2r_;

  std::vector<std::vector<Branch>> branch_sets_;
  std::vector<Letter> word_;
  std::vector<int> idx_;
  std::vector<double> px_, py_, shx_, shy_;
  std::vector<Rational> pxr_, pyr_, shxr_, shyr_;
};

}  // namespace

using i128 = __int128;

// Lengths are scaled to integers; each quadratic piece of the convex
// function t -> (delta + |tD - s|)^2 + (h - tH)^2 is compared with K at its
// critical point and at the interval ends by cross-multiplication.
std::optional<bool> strip_within_sq(const Rational& D, const Rational& H, const Rational& s, const Rational& delta,
                                    const Rational& h, const Rational& K) {
  std::int64_t scale = 1;
  for (const Rational* r : {&D, &H, &s, &delta, &h}) {
    scale = std::lcm(scale, r->denominator());
    if (scale > (std::int64_t(1) << 20)) return std::nullopt;
  }
  auto lift = [&](const Rational& r) -> std::optional<i128> {
    const i128 v = static_cast<i128>(r.numerator()) * (scale / r.denominator());
    if (v > (i128(1) << 40) || v < -(i128(1) << 40)) return std::nullopt;
    return v;
  };
  const auto d = lift(D), hh = lift(H), ss = lift(s), de = lift(delta), h0 = lift(h);
  if (!d || !hh || !ss || !de || !h0) return std::nullopt;
  // K scales by scale^2.
  const i128 kp = static_cast<i128>(K.numerator()) * scale * scale;
  const i128 kq = K.denominator();
  const i128 A = *d * *d + *hh * *hh;
  auto within_at = [&](i128 a, i128 b, i128 B, i128 C) {  // t = a / b, b > 0
    return (A * a * a + B * a * b + C * b * b) * kq <= kp * b * b;
  };
  // Piece with t in [lo_a/lo_b, hi_a/hi_b] and value A t^2 + B t + C.
  auto piece = [&](i128 B, i128 C, i128 lo_a, i128 lo_b, i128 hi_a, i128 hi_b) {
    if (within_at(lo_a, lo_b, B, C) || within_at(hi_a, hi_b, B, C)) return true;
    if (A == 0) return false;
    // Critical point t* = -B / (2A) inside the interval.
    const i128 ta = -B, tb = 2 * A;
    if (ta * lo_b < lo_a * tb || ta * hi_b > hi_a * tb) return false;
    return (4 * A * C - B * B) * kq <= 4 * A * kp;
  };
  if (A == 0) return (*de + (*ss < 0 ? -*ss : *ss)) * (*de + (*ss < 0 ? -*ss : *ss)) * kq + *h0 * *h0 * kq <= kp;
  if (*d == 0) {
    const i128 a0 = *de + (*ss < 0 ? -*ss : *ss);
    return piece(-2 * *h0 * *hh, a0 * a0 + *h0 * *h0, 0, 1, 1, 1);
  }
  // split = s / D with D > 0 for tree arcs.
  const i128 sa = *ss, sb = *d;
  const bool hi = piece(2 * (*d * (*de - *ss) - *hh * *h0), (*de - *ss) * (*de - *ss) + *h0 * *h0, sa, sb, 1, 1);
  if (hi) return true;
  return piece(-2 * (*d * (*de + *ss) + *hh * *h0), (*de + *ss) * (*de + *ss) + *h0 * *h0, 0, 1, sa, sb);
}

bool ball_order_less(const GroupElement& a, const GroupElement& b) {
  const WeightAssignment unit = WeightAssignment::unit(*a.family());
  const Rational la = word_length(a, unit), lb = word_length(b, unit);
  if (la != lb) return la < lb;
  return a.letters() < b.letters();
}

bool fast_scan_supported(const ActionSpec& AX, const ActionSpec& AY) {
  return is_product_action(AX) && is_product_action(AY) && same_family(*AX.group, *AY.group);
}

PairScanResult fast_pair_scan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N,
                              std::optional<Rational> M, int L, int threads) {
  if (!fast_scan_supported(AX, AY)) throw std::invalid_argument("fast scan needs two tree x line actions");
  if (L < 0) throw std::invalid_argument("scan radius must be nonnegative");
  // Tasks: the words of length <= 1 on their own, then one subtree per
  // reduced word of length 2.
  FastScan probe(AX, AY, N, M, L);
  struct Task {
    std::vector<Letter> prefix;
    bool deep;
  };
  std::vector<Task> tasks;
  tasks.push_back({{}, L < 2 ? true : false});
  if (L >= 2) {
    for (const Letter& a : probe.letters()) {
      tasks.push_back({{a}, false});
      for (const Letter& b : probe.letters())
        if (!probe.inverse(a, b)) tasks.push_back({{a, b}, true});
    }
  }
  std::vector<Partial> parts(tasks.size(), Partial(L));
  run_tasks(tasks.size(), threads, [&](std::size_t i) {
    FastScan scan(AX, AY, N, M, L);
    scan.run(tasks[i].prefix, tasks[i].deep, parts[i]);
  });
  // Exact values for the maximizing pairs.
  for (auto& p : parts)
    for (int l = 0; l <= L; ++l)
      if (p.argmax[l]) p.max_y_sq[l] = orbit_segment_distance_sq(AY, p.argmax[l]->first, p.argmax[l]->second);
  PairScanResult out = merge(parts, L);
  out.fast_path = true;
  for (int l = 0; l <= L; ++l)
    if (out.max_y_sq_by_length[l]) out.max_y_by_length[l] = sqrt_of(*out.max_y_sq_by_length[l]);
  return out;
}

PairScanResult generic_pair_scan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N,
                                 std::optional<Rational> M, int L, int threads) {
  if (!same_family(*AX.group, *AY.group)) throw std::invalid_argument("scan: actions of different groups");
  const WeightAssignment unit = unit_weights(AX);
  const auto elems = ball(AX.group, unit, Rational(L));
  const double n = to_double(N);
  const Rational N2 = N * N;
  const GroupElement e = GroupElement::identity(AX.group);
  const SpacePoint x0 = orbit_point(AX, e);
  const std::size_t chunk = 64;
  const std::size_t count = (elems.size() + chunk - 1) / chunk;
  std::vector<Partial> parts(count, Partial(L));
  run_tasks(count, threads, [&](std::size_t t) {
    Partial& out = parts[t];
    for (std::size_t gi = t * chunk; gi < std::min(elems.size(), (t + 1) * chunk); ++gi) {
      const GroupElement& g = elems[gi];
      ++out.elements;
      const int len = static_cast<int>(word_length(g, unit).numerator());
      const GeodesicPath path = geodesic(AX.space, x0, orbit_point(AX, g));
      const int samples = std::max(1, static_cast<int>(std::ceil(path.total / n)));
      std::unordered_set<GroupElement, GroupElementHash> seen;
      std::vector<GroupElement> cands;
      for (int k = 0; k <= samples; ++k) {
        const SpacePoint z = path_eval(AX.space, path, std::min(path.total, path.total * k / samples));
        for (auto& near : elements_near_point(AX, z, 1.5 * n + 1e-9))
          if (seen.insert(near.element).second) cands.push_back(near.element);
      }
      std::sort(cands.begin(), cands.end(), ball_order_less);
      for (const GroupElement& a : cands) {
        bool hit;
        if (auto sq = orbit_segment_distance_sq(AX, g, a))
          hit = *sq <= N2;
        else
          hit = orbit_segment_distance(AX, g, a) <= n + 1e-9;
        if (!hit) continue;
        ++out.hits;
        const auto ysq = orbit_segment_distance_sq(AY, g, a);
        const double y = ysq ? sqrt_of(*ysq) : orbit_segment_distance(AY, g, a);
        bool better = y * y > out.max_y[len];
        if (ysq && out.max_y_sq[len]) better = *ysq > *out.max_y_sq[len];
        if (!out.argmax[len] || better) {
          out.max_y[len] = y * y;
          out.max_y_sq[len] = ysq;
          out.argmax[len] = std::make_pair(g, a);
        }
        if (M) {
          const bool fail = ysq ? *ysq > *M * *M : y > to_double(*M) + 1e-9;
          if (fail) out.offer_failure(g, a);
        }
      }
    }
  });
  return merge(parts, L);
}

PairScanResult pair_scan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, std::optional<Rational> M,
                         int L, int threads) {
  if (fast_scan_supported(AX, AY)) return fast_pair_scan(AX, AY, N, M, L, threads);
  return generic_pair_scan(AX, AY, N, M, L, threads);
}

}  // namespace cat0

#include "cat0/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cat0 {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Non-finite doubles are not valid JSON numbers.
Json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

const GroupFamily* tree_family_of(const Space& X) {
  if (const auto* t = std::get_if<WeightedTree>(&X)) return t->family.get();
  if (const auto* p = std::get_if<ProductSpace>(&X)) return p->tree.family.get();
  return nullptr;
}

}  // namespace

std::string csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_cell(cells[i]);
    out += "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

Json Report::to_json() const {
  Json j;
  j["experiment"] = experiment;
  Json cfg = Json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["verdicts"] = verdicts;
  Json tabs = Json::object();
  for (const auto& [name, t] : tables) tabs[name] = {{"columns", t.header}, {"rows", t.rows.size()}};
  j["tables"] = tabs;
  j["invariant_violation"] = invariant_violation;
  j["seconds"] = seconds;
  return j;
}

std::vector<std::string> write_report(const Report& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  const std::filesystem::path base(out_dir);
  {
    const auto path = (base / (r.experiment + ".json")).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << r.to_json().dump(2) << "\n";
    written.push_back(path);
  }
  for (const auto& [name, t] : r.tables) {
    const auto path = (base / (r.experiment + "_" + name + ".csv")).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << csv(t);
    written.push_back(path);
  }
  return written;
}

Json to_json(const Rational& r) { return to_string(r); }

Json to_json(const GroupElement& g) { return g.to_string(); }

Json to_json(const End& e, const GroupFamily& F) {
  return {{"prefix", tree_word_string(e.prefix, F)},
          {"period", tree_word_string(e.period, F)},
          {"approximate", e.approximate},
          {"finite", e.is_finite()}};
}

Json to_json(const Space& X, const BoundaryPoint& a) {
  Json j;
  j["text"] = describe_boundary(X, a);
  switch (a.kind) {
    case BoundaryKind::TreeEnd:
    case BoundaryKind::ProductEnd: {
      const GroupFamily* F = tree_family_of(X);
      if (F) {
        const Json e = to_json(a.end, *F);
        j["prefix"] = e["prefix"];
        j["period"] = e["period"];
        j["approximate"] = e["approximate"];
      }
      if (a.kind == BoundaryKind::ProductEnd) j["theta"] = num(a.theta);
      break;
    }
    case BoundaryKind::FlatDirection: {
      Json d = Json::array();
      for (double c : a.direction) d.push_back(num(c));
      j["direction"] = d;
      break;
    }
    case BoundaryKind::ComplexDirection:
      if (a.prefix) j["prefix"] = a.prefix->to_string();
      if (a.period) j["period"] = a.period->to_string();
      break;
  }
  return j;
}

std::string verdict_name(CauchyVerdict v) {
  switch (v) {
    case CauchyVerdict::Cauchy: return "Cauchy";
    case CauchyVerdict::NotCauchy: return "NotCauchy";
    case CauchyVerdict::Bounded: return "Bounded";
  }
  return "?";
}

std::string limit_name(LimitKind k) {
  switch (k) {
    case LimitKind::ConvergesTo: return "ConvergesTo";
    case LimitKind::Divergent: return "Divergent";
    case LimitKind::Bounded: return "Bounded";
  }
  return "?";
}

namespace {

Json witness_json(const std::optional<CauchyWitness>& w) {
  if (!w) return nullptr;
  return {{"r", num(w->r)}, {"i0", w->i0}, {"i", w->i}, {"gap", num(w->gap)}};
}

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

Json to_json(const CauchyReport& r) {
  return {{"verdict", verdict_name(r.verdict)},
          {"horizon", r.horizon},
          {"radii", doubles(r.radii)},
          {"i0", r.i0},
          {"witness", witness_json(r.witness)}};
}

Json to_json(const Space& X, const ConvergenceVerdict& v) {
  Json j;
  j["kind"] = limit_name(v.kind);
  j["limit"] = to_json(X, v.limit);
  j["mean_angle"] = num(v.mean_angle);
  j["spread"] = num(v.spread);
  Json cl = Json::array();
  for (const auto& c : v.clusters)
    cl.push_back({{"size", c.indices.size()}, {"limit", to_json(X, c.limit)}, {"spread", num(c.spread)}});
  j["clusters"] = cl;
  j["witness"] = witness_json(v.witness);
  j["horizon"] = v.horizon;
  j["radii"] = doubles(v.radii);
  return j;
}

Json to_json(const QiConstants& q) {
  return {{"lambda", to_json(q.lambda)},
          {"C", to_json(q.C)},
          {"certified_ball_radius", to_json(q.ball_radius)},
          {"pairs_checked", q.pairs_checked}};
}

Json to_json(const CocompactnessRadius& c) {
  Json j;
  j["N"] = num(c.N);
  j["N_squared_exact"] = c.exact_sq ? to_json(*c.exact_sq) : Json(nullptr);
  j["sampled"] = num(c.sampled);
  j["sample_horizon"] = to_json(c.horizon);
  j["samples"] = c.samples;
  return j;
}

Json to_json(const ConstantSet& k) {
  return {{"lambda", to_json(k.lambda)}, {"C", to_json(k.C)},     {"N", to_json(k.N)},
          {"M", to_json(k.M)},           {"N_tilde", to_json(k.N_tilde)}, {"R", to_json(k.R)},
          {"M_tilde", to_json(k.M_tilde)}, {"M_prime", to_json(k.M_prime)}, {"r", to_json(k.r)}};
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["N"] = to_json(r.N);
  j["M"] = to_json(r.M);
  j["ball_radius"] = r.ball_radius;
  j["covering_x"] = to_json(r.covering_x);
  j["covering_y"] = to_json(r.covering_y);
  j["covers"] = r.covers;
  j["holds_on_ball"] = r.holds;
  j["elements"] = r.elements;
  j["pairs_hit"] = r.pairs_hit;
  j["failures"] = r.failures;
  j["fast_path"] = r.fast_path;
  if (r.witness) {
    j["witness"] = {{"g", to_json(r.witness->g)},
                    {"a", to_json(r.witness->a)},
                    {"x_distance", num(r.witness->x_distance)},
                    {"x_parameter", num(r.witness->x_parameter)},
                    {"y_distance", num(r.witness->y_distance)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const MapBoundsReport& r, const Space& Y) {
  Json j;
  j["constants"] = to_json(r.constants);
  j["image"] = to_json(Y, r.image);
  j["sequence_length"] = r.sequence.size();
  Json b = Json::array();
  for (const auto& c : r.bounds) {
    Json e = {{"name", c.name},       {"bound", num(c.bound)},           {"worst", num(c.worst)},
              {"checked", c.checked}, {"violations", c.violations}};
    if (c.first_violation)
      e["first_violation"] = {c.first_violation->first, c.first_violation->second};
    b.push_back(e);
  }
  j["bounds"] = b;
  j["total_violations"] = r.total_violations();
  return j;
}

Json to_json(const Space& X, const GeodesicPath& p) {
  Json segs = Json::array();
  for (const auto& s : p.segments)
    segs.push_back({{"start", describe_point(X, s.start)}, {"end", describe_point(X, s.end)}, {"length", num(s.length)}});
  return {{"segments", segs}, {"total", num(p.total)}};
}

Table m_table(const std::vector<MTableRow>& rows) {
  Table t;
  t.header = {"L", "M_hat", "M_hat_squared", "g", "a"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.L), format_double(r.M_hat), r.M_hat_sq ? to_string(*r.M_hat_sq) : "",
                      r.g ? r.g->to_string() : "", r.a ? r.a->to_string() : ""});
  return t;
}

}  // namespace cat0

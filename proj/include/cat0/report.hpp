#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cat0/actions.hpp"
#include "cat0/boundary.hpp"
#include "cat0/conditions.hpp"
#include "cat0/config.hpp"

namespace cat0 {

using Json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string experiment;
  Config config;
  Json verdicts = Json::object();
  std::map<std::string, Table> tables;
  double seconds = 0;
  // A bound check or certificate failed.
  bool invariant_violation = false;

  Json to_json() const;
};

std::string format_double(double x);
std::string csv(const Table& t);

// Writes <out>/<experiment>.json and one <out>/<experiment>_<table>.csv per
// table; returns the paths written.
std::vector<std::string> write_report(const Report& r, const std::string& out_dir);

Json to_json(const Rational& r);
Json to_json(const GroupElement& g);
Json to_json(const End& e, const GroupFamily& tree_family);
Json to_json(const Space& X, const BoundaryPoint& a);
Json to_json(const CauchyReport& r);
Json to_json(const Space& X, const ConvergenceVerdict& v);
Json to_json(const QiConstants& q);
Json to_json(const CocompactnessRadius& c);
Json to_json(const ConstantSet& k);
Json to_json(const ConditionReport& r);
Json to_json(const MapBoundsReport& r, const Space& Y);
Json to_json(const Space& X, const GeodesicPath& p);

std::string verdict_name(CauchyVerdict v);
std::string limit_name(LimitKind k);

Table m_table(const std::vector<MTableRow>& rows);

}  // namespace cat0

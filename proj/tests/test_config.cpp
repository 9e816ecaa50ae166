#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cat0/config.hpp"
#include "cat0/experiments.hpp"
#include "cat0/report.hpp"

using namespace cat0;

TEST_CASE("config parsing") {
  const Config c = Config::parse("# comment\nhorizon = 20\n weights = a=2, b=1/2  # trailing\nflag = yes\n\n");
  CHECK(c.get_int("horizon", 0) == 20);
  CHECK(c.get("weights", "") == "a=2, b=1/2");
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(Config::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(Config::parse("= 3"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x = 3a").get_int("x", 0), ConfigError);
  CHECK_THROWS_AS(Config::parse("x = maybe").get_bool("x", false), ConfigError);
  CHECK_THROWS_AS(Config::parse("x = 1").require_known({"y"}), ConfigError);
  CHECK(Config::parse("x = 3/4").get_rational("x", Rational(0)) == Rational(3, 4));
  CHECK(Config::parse("x = 0.125").get_rational("x", Rational(0)) == Rational(1, 8));
  CHECK_THROWS_AS(Config::load("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("weights, bases and families") {
  const auto F2 = free_group(2, {"a", "b"});
  CHECK(parse_weights("a=2, b=1", *F2)[0] == Rational(2));
  CHECK(parse_weights("2, 1/2", *F2)[1] == Rational(1, 2));
  CHECK(parse_weights("b=3", *F2)[0] == Rational(1));
  CHECK_THROWS_AS(parse_weights("a=2, 1", *F2), ConfigError);
  CHECK_THROWS_AS(parse_weights("a=0", *F2), ConfigError);
  CHECK_THROWS_AS(parse_weights("c=1", *F2), ConfigError);
  CHECK_THROWS_AS(parse_weights("1,2,3", *F2), ConfigError);

  const auto B = parse_basis("(1,0),(1,1)");
  CHECK(B[0][1] == Rational(1));
  CHECK(B[1][0] == Rational(0));
  CHECK_THROWS_AS(parse_basis("(1,0),(1)"), ConfigError);
  CHECK_THROWS_AS(parse_basis("1,0"), ConfigError);

  const auto G = parse_family("(free(2) x Z) * cyclic(2)");
  CHECK(G->kind() == FamilyKind::FreeProduct);
  CHECK(G->factors()[0]->kind() == FamilyKind::DirectWithLine);
  const auto W = parse_family("(cyclic(2) * cyclic(2) * cyclic(2)) x Dinf");
  CHECK(W->line_kind() == LineKind::Dihedral);
  CHECK(parse_family("free(2)", {"p", "q"})->generator_name(1) == "q");
  CHECK_THROWS_AS(parse_family("free(0)"), ConfigError);
  CHECK_THROWS_AS(parse_family("cyclic(2) x Q"), ConfigError);
  CHECK_THROWS_AS(parse_family("free(2"), ConfigError);
}

TEST_CASE("csv quoting and report files") {
  Table t{{"name", "value"}, {{"a,b", "1"}, {"say \"hi\"", "2"}}};
  CHECK(csv(t) == "name,value\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n");
  Report r;
  r.experiment = "demo";
  r.config = Config::parse("x = 1");
  r.verdicts["ok"] = true;
  r.tables["t"] = t;
  const auto dir = std::filesystem::temp_directory_path() / "cat0_report_test";
  std::filesystem::remove_all(dir);
  const auto files = write_report(r, dir.string());
  CHECK(files.size() == 2);
  std::ifstream in(dir / "demo.json");
  const Json j = Json::parse(in);
  CHECK(j["verdicts"]["ok"] == true);
  CHECK(j["config"]["x"] == "1");
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiments reject bad configs") {
  CHECK_THROWS_AS(run_experiment("nope", Config()), ConfigError);
  CHECK_THROWS_AS(run_experiment("doubling-family", Config::parse("horizon = 0")), ConfigError);
  CHECK_THROWS_AS(run_experiment("doubling-family", Config::parse("bogus = 1")), ConfigError);
  CHECK_THROWS_AS(run_experiment("bowers-ruane", Config::parse("N = 1/4")), ConfigError);
  CHECK_THROWS_AS(run_experiment("conjecture-scan", Config::parse("pairs = 1:2")), ConfigError);
}

TEST_CASE("experiments are deterministic") {
  const Config c = Config::parse("horizon = 12");
  const Report a = run_experiment("doubling-family", c);
  const Report b = run_experiment("doubling-family", c);
  CHECK(a.verdicts.dump() == b.verdicts.dump());
  for (const auto& [name, t] : a.tables) CHECK(csv(t) == csv(b.tables.at(name)));
  const Report s = run_experiment("conjecture-scan", Config::parse("max_length = 3"));
  CHECK(s.verdicts.dump().find("invariant sampling only") != std::string::npos);
}

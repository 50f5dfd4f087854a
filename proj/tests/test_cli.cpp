#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "vecmag/errors.hpp"
#include "vecmag/table_io.hpp"

using namespace vecmag;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run vecmag_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vecmag");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Table parse(const std::string& text) {
  std::istringstream is(text);
  return read_table(is);
}

}  // namespace

TEST_CASE("angle and grid grammar") {
  CHECK(cli::parse_angle("0.06pi") == doctest::Approx(0.06 * M_PI));
  CHECK(cli::parse_angle("pi") == doctest::Approx(M_PI));
  CHECK(cli::parse_angle("pi/4") == doctest::Approx(M_PI / 4));
  CHECK(cli::parse_angle("-0.5pi") == doctest::Approx(-M_PI / 2));
  CHECK(cli::parse_angle("1e-3") == doctest::Approx(1e-3));
  CHECK_THROWS_AS(cli::parse_angle("0.06tau"), InvalidArgument);
  const auto b = cli::parse_triple("10,-6,2");
  CHECK(b[1] == -6.0);
  CHECK_THROWS_AS(cli::parse_triple("1,2"), InvalidArgument);
  const auto g = cli::parse_grid("0:6:4");
  REQUIRE(g.size() == 4);
  CHECK(g[3] == 6.0);
  CHECK(g[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(cli::parse_grid("0:6"), InvalidArgument);
  const auto n = cli::parse_int_range("4:12:4");
  CHECK(n == std::vector<int>{4, 8, 12});
  CHECK(cli::parse_int_range("3,5") == std::vector<int>{3, 5});
}

TEST_CASE("worker resolution") {
  CHECK(cli::resolve_workers(3) == 3);
  setenv("VECMAG_WORKERS", "2", 1);
  CHECK(cli::resolve_workers(0) == 2);
  setenv("VECMAG_WORKERS", "lots", 1);
  CHECK_THROWS_AS(cli::resolve_workers(0), InvalidArgument);
  unsetenv("VECMAG_WORKERS");
  CHECK(cli::resolve_workers(0) >= 1);
}

TEST_CASE("table round trip") {
  Table t;
  t.metadata = {{"tool", "vecmag"}, {"x", 0.1}};
  t.columns = {"a", "b"};
  const std::vector<double> vals{0.1, 1.0 / 3.0, -2.5e-300, 1e308, std::nan(""), HUGE_VAL};
  for (double v : vals) t.add_row({format_number(v), format_number(-v)});
  std::ostringstream os;
  write_table(os, t);
  CHECK(os.str().rfind("# {", 0) == 0);
  const Table back = parse(os.str());
  CHECK(back.metadata == t.metadata);
  CHECK(back.columns == t.columns);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double v = back.number(i, "a");
    if (std::isnan(vals[i])) {
      CHECK(std::isnan(v));
    } else {
      CHECK(v == vals[i]);
    }
  }
  CHECK_THROWS_AS(t.add_row({"1"}), DimensionMismatch);
}

TEST_CASE("simulate reproduces the parallel GHZ trace") {
  const Run r = vecmag_cli({"simulate", "--scheme", "parallel", "--probe", "ghz", "--N", "10", "--B", "2,2,2",
                            "--axis", "z", "--grid", "0:6:2048", "--workers", "2"});
  REQUIRE(r.code == 0);
  const Table t = parse(r.out);
  CHECK(t.rows.size() == 2048);
  CHECK(t.metadata["command"] == "simulate");
  CHECK(t.metadata["config"]["N"] == 10);
  for (std::size_t i = 0; i < t.rows.size(); i += 97) {
    const double tt = t.number(i, "T");
    CHECK(t.number(i, "jz") == doctest::Approx(5 * std::sin(20 * tt)).epsilon(1e-10));
  }
  const Run scs = vecmag_cli({"simulate", "--probe", "scs", "--B", "2,2,2", "--axis", "z", "--grid", "0:6:64"});
  const Table s = parse(scs.out);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(std::abs(s.number(i, "jz") - 5 * std::sin(2 * s.number(i, "T"))) < 1e-10);
  }
}

TEST_CASE("simulate: exact pulses stay close to the closed form") {
  const std::vector<std::string> common{"simulate", "--probe", "scs", "--B", "2,2,2", "--axis", "x", "--grid", "0:2:21"};
  auto exact = common;
  exact.insert(exact.end(), {"--evolution", "exact", "--tau", "1e-3"});
  const Table a = parse(vecmag_cli(common).out);
  const Table e = parse(vecmag_cli(exact).out);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(std::abs(a.number(i, "jz") - e.number(i, "jz")) < 1e-3);
}

TEST_CASE("output is byte-identical across worker counts") {
  const std::vector<std::string> base{"simulate", "--scheme", "sequential", "--probe", "scs", "--B", "10,6,2",
                                      "--evolution", "effective", "--grid", "0:1:40"};
  auto one = base, three = base;
  one.insert(one.end(), {"--workers", "1"});
  three.insert(three.end(), {"--workers", "3"});
  CHECK(vecmag_cli(one).out == vecmag_cli(three).out);

  const Run a = vecmag_cli({"robustness", "--N", "4", "--axis-time", "0.1", "--trials", "3", "--seed", "7"});
  const Run b = vecmag_cli({"robustness", "--N", "4", "--axis-time", "0.1", "--trials", "3", "--seed", "7", "--workers", "2"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("robustness with eta = 0 is identically one") {
  const Run r = vecmag_cli({"robustness", "--N", "4", "--eta", "0", "--axis-time", "0.1", "--trials", "2"});
  REQUIRE(r.code == 0);
  const Table t = parse(r.out);
  CHECK(t.columns == std::vector<std::string>{"eta", "mode", "t", "F2_mean", "F2_std"});
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.rows[i][3] == "1");
}

TEST_CASE("spectrum recovers the field and reports failures") {
  const Run ok = vecmag_cli({"spectrum", "--probe", "scs", "--B", "10,6,2"});
  REQUIRE(ok.code == 0);
  const Table t = parse(ok.out);
  const auto& rec = t.metadata["recovered"];
  CHECK(rec["bx"].get<double>() == doctest::Approx(10).epsilon(1e-6));
  CHECK(rec["by"].get<double>() == doctest::Approx(6).epsilon(1e-6));
  CHECK(rec["bz"].get<double>() == doctest::Approx(2).epsilon(1e-6));

  const Run coll = vecmag_cli({"spectrum", "--B", "10,6,6"});
  CHECK(coll.code == 4);
  CHECK(coll.err.find("\"error\":\"under-resolved\"") != std::string::npos);
  CHECK(coll.err.find("\"found\"") != std::string::npos);

  const Run ghz = vecmag_cli({"spectrum", "--probe", "ghz", "--B", "10,6,2"});
  CHECK(ghz.code == 4);
  CHECK(ghz.err.find("ambiguous-sign") != std::string::npos);
  const Table g = parse(ghz.out);
  CHECK(g.metadata["recovered"]["scale"] == 10.0);
  CHECK(g.metadata["recovered"]["bx"].get<double>() == doctest::Approx(10).epsilon(0.02));

  const Run unsigned_ghz = vecmag_cli({"spectrum", "--probe", "ghz", "--no-signs"});
  CHECK(unsigned_ghz.code == 0);
}

TEST_CASE("bad flags exit with 2 and name the flag") {
  const Run a = vecmag_cli({"simulate", "--B", "1,2"});
  CHECK(a.code == 2);
  CHECK(a.err.find("--B") != std::string::npos);
  CHECK(vecmag_cli({"simulate", "--grid", "0:1"}).code == 2);
  CHECK(vecmag_cli({"simulate", "--evolution", "magic"}).code == 2);
  CHECK(vecmag_cli({"simulate", "--no-such-flag"}).code == 2);
  CHECK(vecmag_cli({"frobnicate"}).code == 2);
  CHECK(vecmag_cli({}).code == 2);
  const Run sp = vecmag_cli({"spectrum", "--scheme", "parallel"});
  CHECK(sp.code == 2);
  CHECK(sp.err.find("--scheme") != std::string::npos);
  CHECK(vecmag_cli({"robustness", "--eta", "0.06 pie"}).code == 2);
  CHECK(vecmag_cli({"simulate", "--help"}).code == 0);
}

TEST_CASE("scaling emits warning rows for odd GHZ sizes") {
  const Run r = vecmag_cli({"scaling", "--n-values", "4,5,6,8", "--grid-points", "24"});
  REQUIRE(r.code == 0);
  const Table t = parse(r.out);
  int warnings = 0;
  for (const auto& row : t.rows) warnings += row[5].find("warning") != std::string::npos;
  CHECK(warnings == 1);
  CHECK(t.metadata["fits"]["scs"]["x"]["slope"].get<double>() == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("precision and qfi commands") {
  const Run p = vecmag_cli({"precision", "--probe", "ghz", "--N", "10", "--B", "0.3,0.4,0.5"});
  REQUIRE(p.code == 0);
  const auto j = nlohmann::json::parse(p.out);
  CHECK(j["report"]["axes"][0]["delta_b_numeric"].get<double>() == doctest::Approx(0.1).epsilon(1e-6));
  const Run q = vecmag_cli({"qfi", "--probe", "scs", "--N", "10", "--T", "2"});
  REQUIRE(q.code == 0);
  CHECK(nlohmann::json::parse(q.out)["axes"][1]["qfi_numeric"].get<double>() == doctest::Approx(40).epsilon(1e-6));
  const Run sweep = vecmag_cli({"qfi", "--grid", "0.5:1:3"});
  CHECK(parse(sweep.out).rows.size() == 3);
}

TEST_CASE("validate filters and is deterministic") {
  const Run a = vecmag_cli({"validate", "--only", "qfi", "--seed", "7", "--seed", "7"});
  const Run b = vecmag_cli({"validate", "--only", "qfi", "--seed", "7", "--workers", "2"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["criteria"].size() == 2);
  for (const auto& c : j["criteria"]) {
    bool tagged = false;
    for (const auto& tag : c["tags"]) tagged = tagged || tag == "qfi";
    CHECK(tagged);
  }
  CHECK(vecmag_cli({"validate", "--only", "nothing-matches"}).code == 2);
  const Run text = vecmag_cli({"validate", "--only", "10", "--format", "text"});
  CHECK(text.out.rfind("PASS 10 invariants", 0) == 0);
}

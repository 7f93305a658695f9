#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "randev/errors.h"
#include "randev/experiments.h"
#include "randev/model.h"

using namespace randev;
using namespace randev::experiments;

namespace {

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("analytic grid") {
  auto g = ValidateApprox(0.02);
  REQUIRE(g.rows.size() == 120);
  CHECK(g.max_relative_error <= 0.0025);
  // Independent high-precision evaluation: 0.0024190 at (+-0.1, -0.1).
  CHECK(g.max_relative_error == doctest::Approx(0.0024190).epsilon(1e-4));
  CHECK(std::fabs(g.argmax_bias) == doctest::Approx(0.1));
  CHECK(g.argmax_a1 == doctest::Approx(-0.1));
  CHECK(g.max_abs_z == 0.0);

  // Row-major with the bias outer; (0, 0) skipped.
  CHECK(g.rows.front().bias == doctest::Approx(-0.1));
  CHECK(g.rows.front().a1 == doctest::Approx(-0.1));
  CHECK(g.rows[1].a1 == doctest::Approx(-0.08));
  for (const auto& r : g.rows) {
    REQUIRE_FALSE((r.bias == 0 && r.a1 == 0));
    REQUIRE_FALSE(r.empirical);
    REQUIRE(r.relative_error ==
            doctest::Approx(std::fabs(r.deviation_approx - r.deviation_exact) /
                            r.deviation_exact));
    // Pure-bias and pure-correlation edges peak at 0.0016706.
    if (r.bias == 0 || r.a1 == 0) REQUIRE(r.relative_error <= 0.0016707);
  }

  CHECK_THROWS_AS(ValidateApprox(0.0), ParameterError);
  CHECK_THROWS_AS(ValidateApprox(0.2), ParameterError);
}

TEST_CASE("grid step 0.1 has eight points") {
  auto g = ValidateApprox(0.1);
  CHECK(g.rows.size() == 8);
  CHECK(g.max_relative_error == doctest::Approx(0.0024190).epsilon(1e-4));
}

TEST_CASE("empirical grid") {
  auto g = ValidateApprox(0.05, 200000, 3);
  REQUIRE(g.rows.size() == 24);
  for (const auto& r : g.rows) {
    REQUIRE(r.empirical);
    REQUIRE(r.empirical->n_bits == 200000);
    REQUIRE(std::fabs(r.empirical->z_score) <= g.max_abs_z);
  }
  CHECK(g.max_abs_z <= 4.0);
  // Independent of the worker count.
  auto g3 = ValidateApprox(0.05, 200000, 3, 3);
  for (size_t i = 0; i < g.rows.size(); ++i) {
    REQUIRE(g.rows[i].empirical->deviation_plugin ==
            g3.rows[i].empirical->deviation_plugin);
  }
}

TEST_CASE("grid CSV") {
  std::ostringstream out;
  WriteGridCsv(ValidateApprox(0.1), out);
  auto lines = Lines(out.str());
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "b,a1,d_exact,d_approx,rel_err");
  CHECK(lines[1].rfind("-0.1,-0.1,0.0144619337127", 0) == 0);

  std::ostringstream emp;
  WriteGridCsv(ValidateApprox(0.1, 1000, 1), emp);
  CHECK(Lines(emp.str())[0] == "b,a1,d_exact,d_approx,rel_err,n_bits,d_plugin,z");
}

TEST_CASE("fig2 curve") {
  auto rows = Fig2Curve(-0.99, 0.99, 0.01);
  REQUIRE(rows.size() == 199);
  const auto& mid = rows[99];
  CHECK(mid.a1 == 0.0);
  CHECK(mid.mi_exact == 0.0);
  CHECK(mid.mi_approx == 0.0);
  CHECK(rows.front().a1 == doctest::Approx(-0.99));
  CHECK(rows.back().a1 == doctest::Approx(0.99));
  CHECK(rows.back().mi_exact == doctest::Approx(model::MiExactUnbiased(0.99)).epsilon(1e-12));
  for (size_t i = 1; i < rows.size(); ++i) REQUIRE(rows[i].a1 > rows[i - 1].a1);
  for (const auto& r : rows) {
    if (std::fabs(r.a1) <= 0.5) {
      REQUIRE(std::fabs(r.mi_exact - r.mi_approx) <= std::pow(r.a1, 4));
    }
  }
  CHECK(rows[109].a1 == doctest::Approx(0.1));
  CHECK(rows[109].mi_exact == doctest::Approx(0.0072256).epsilon(1e-4));
  CHECK(rows[109].mi_approx == doctest::Approx(0.0072135).epsilon(1e-4));

  auto full = Fig2Curve(-1, 1, 0.5);
  REQUIRE(full.size() == 5);
  CHECK(full.front().mi_exact == 1.0);
  CHECK(full.back().mi_exact == 1.0);
  CHECK(full.back().mi_approx == doctest::Approx(1 / (2 * std::log(2.0))));

  CHECK_THROWS_AS(Fig2Curve(0.5, 0.5, 0.1), ParameterError);
  CHECK_THROWS_AS(Fig2Curve(-1.5, 0.5, 0.1), ParameterError);
  CHECK_THROWS_AS(Fig2Curve(-0.5, 0.5, 0), ParameterError);

  std::ostringstream out;
  WriteFig2Csv(Fig2Curve(-0.1, 0.1, 0.1), out);
  CHECK(out.str() ==
        "a1,mi_exact,mi_approx\n"
        "-0.1,0.00722554601219,0.00721347520444\n"
        "0,0,0\n"
        "0.1,0.00722554601219,0.00721347520444\n");
}

TEST_CASE("concat property") {
  const uint64_t small[] = {3, 5, 8};
  CHECK(ConcatProperty(SourceConfig::Ideal(0), small, 7).pass());
  const uint64_t with_single[] = {100000, 1, 100000};
  CHECK(ConcatProperty(SourceConfig::Markov(0.1, 0.1, 0), with_single, 7).pass());
  const uint64_t halves[] = {10000, 10000};
  CHECK(ConcatProperty(SourceConfig::DeadTime(1000, 40, 0), halves, 7).pass());
  // Too short to analyze: both sides fail the same way.
  const uint64_t tiny[] = {1, 2};
  CHECK(ConcatProperty(SourceConfig::Xorshift64(0), tiny, 7).pass());
}

TEST_CASE("xorshift demonstration") {
  auto r = PrngDemo(1, 1 << 20);
  CHECK(r.length == 1u << 20);
  CHECK(r.entropy_bound == doctest::Approx(6.1035e-5).epsilon(1e-4));
  CHECK(r.reproducible);
  CHECK(r.max_abs_z <= 4.0);
  CHECK(r.analysis.deviation_plugin < 1e-4);

  auto a = Xorshift64Bits(1, 128);
  auto b = Xorshift64Bits(2, 128);
  CHECK_FALSE(a == b);

  CHECK_THROWS_AS(PrngDemo(0, 1 << 20), ParameterError);
  CHECK_THROWS_AS(PrngDemo(1, 63), ParameterError);
}

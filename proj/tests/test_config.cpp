#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iadmm/config.hpp"
#include "iadmm/runner.hpp"

using namespace iadmm;

namespace {
const std::string kFixtures = IADMM_FIXTURES;

const char* const kMinimal = R"(
# 1-D quadratic pair
function f
  kind quadratic
  dim 1
  Q
    1
  end
end
function g
  kind quadratic
  dim 1
  Q
    1
  end
  q -1
  r 0.5
end
operator L
  kind identity
  dim 1
end
)";

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("iadmm_test_" + name)).string();
}

struct CliRun {
  int code;
  std::string out, err;
};
CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

template <class F>
ParseError parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected ParseError");
  return ParseError(0, "", "");
}
}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.solver == SolverKind::Iadmm);
  REQUIRE(c.problem.has_value());
  CHECK(c.problem->n() == 1);
  CHECK(c.stop.max_iters == 100000);
  CHECK(c.stop.tol == 1e-10);
  CHECK(c.params.init_mode == InitMode::Lambda1Alpha1Zero);
  CHECK(validate(c.params, 10).ok());
}

TEST_CASE("parameter keys") {
  const RunConfig c = parse_config(std::string("gamma 2\nalpha 0.2\nmax_iters 50\ntol 1e-6\nseed 4\n") + kMinimal);
  CHECK(c.params.gamma == 2.0);
  CHECK(c.params.alpha_at(3) == 0.2);
  CHECK(c.params.delta == doctest::Approx(1.5 * delta_lower_bound(0.2, 0.01)));
  CHECK(c.stop.max_iters == 50);
  CHECK(c.seed == 4u);
  const RunConfig d = parse_config(std::string("alpha 0\nlambda 1\ninit_mode alpha2_zero\n") + kMinimal);
  CHECK(d.params.lambda_at(1) == 1.0);
}

TEST_CASE("alpha outside [0,1)") {
  const ParseError e = parse_error([] { parse_config(std::string("alpha 1.2\n") + kMinimal); });
  CHECK(std::string(e.what()).find("α must lie in [0,1)") != std::string::npos);
  CHECK(e.line() == 1);
  CHECK(e.field() == "alpha");
}

TEST_CASE("rank-deficient operator cites hypothesis (H)") {
  const ParseError e = parse_error([] { parse_config(read(kFixtures + "/rank_deficient.cfg")); });
  CHECK(std::string(e.what()).find("hypothesis (H)") != std::string::npos);
}

TEST_CASE("rejections name the line and field") {
  const ParseError a = parse_error([] { parse_config(std::string("colour blue\n") + kMinimal); });
  CHECK(a.line() == 1);
  CHECK(a.field() == "colour");
  const ParseError b = parse_error([] { parse_config(std::string("gamma 1.0e\n") + kMinimal); });
  CHECK(std::string(b.what()).find("malformed number") != std::string::npos);
  const ParseError c = parse_error([] {
    parse_config("function f\n kind cubic\n dim 1\nend\n");
  });
  CHECK(c.line() == 2);
  CHECK(std::string(c.what()).find("unknown function kind") != std::string::npos);
  const ParseError d = parse_error([] {
    parse_config("function f\n kind l1\n dim 2\n tau 1\nend\nfunction g\n kind zero\n dim 3\nend\n"
                 "operator L\n kind identity\n dim 2\nend\n");
  });
  CHECK(std::string(d.what()).find("rows must equal dim of g") != std::string::npos);
  const ParseError f = parse_error([] { parse_config("function f\n kind l1\n dim 2\n tau 1 2\nend\n"); });
  CHECK(f.field() == "tau");
  const ParseError g = parse_error([] { parse_config(std::string("solver boyd_consensus\n") + kMinimal); });
  CHECK(g.field() == "solver");
  const ParseError h = parse_error([] { parse_config("function f\n kind zero\n dim 1\n"); });
  CHECK(std::string(h.what()).find("not closed") != std::string::npos);
  const ParseError i = parse_error([] {
    parse_config("function f\n kind quadratic\n dim 2\n Q\n  1 0\n  0\n end\nend\n");
  });
  CHECK(std::string(i.what()).find("ragged") != std::string::npos);
}

TEST_CASE("consensus blocks") {
  const RunConfig c = parse_config(
      "solver consensus_sum2\nblock\n kind l1\n dim 1\n tau 1\n center 0\nend\n"
      "block\n kind l1\n dim 1\n tau 1\n center 1\nend\nblock\n kind l1\n dim 1\n tau 1\n center 10\nend\n");
  REQUIRE(c.consensus.has_value());
  CHECK(c.consensus->m() == 3);
  CHECK(c.consensus->objective(Vector::Constant(1, 1.0)) == doctest::Approx(10.0));
}

TEST_CASE("lasso fixture runs to a certified optimum") {
  const RunConfig c = parse_config(read(kFixtures + "/lasso.cfg"));
  const RunResult r = run(c);
  CHECK(r.exit_code == kExitConverged);
  REQUIRE(r.report.has_value());
  CHECK(std::abs(r.report->gap) <= 1e-8);
  CHECK(r.report->primal_value == doctest::Approx(8.03696542551651).epsilon(1e-9));
}

TEST_CASE("every solver runs from a config") {
  for (const char* s : {"iadmm", "classical_admm", "idr"}) {
    RunConfig c = parse_config(std::string("solver ") + s + "\ntol 1e-12\n" + kMinimal);
    const RunResult r = run(c);
    CHECK_MESSAGE(r.exit_code == kExitConverged, s);
    CHECK_MESSAGE(r.trace.x[0] == doctest::Approx(0.5).epsilon(1e-9), s);
  }
  const std::string blocks = "block\n kind quadratic\n dim 1\n Q\n  1\n end\n q -1\nend\n"
                             "block\n kind quadratic\n dim 1\n Q\n  1\n end\n q -3\nend\n";
  for (const char* s : {"consensus_sum1", "consensus_sum2", "boyd_consensus"}) {
    const RunConfig c = parse_config(std::string("solver ") + s + "\nalpha 0.1\n" + blocks);
    const RunResult r = run(c);
    CHECK_MESSAGE(r.exit_code == kExitConverged, s);
    CHECK_MESSAGE(r.trace.x[0] == doctest::Approx(2.0).epsilon(1e-9), s);
    CHECK_MESSAGE(r.consensus_residual <= 1e-8, s);
  }
}

TEST_CASE("cli exit codes") {
  const std::string out = temp_path("lasso.csv");
  const CliRun ok = cli({kFixtures + "/lasso.cfg", "--output", out});
  CHECK(ok.code == kExitConverged);
  CHECK(ok.out.find("status: converged") != std::string::npos);
  CHECK(read(out).rfind(kTraceCsvHeader, 0) == 0);

  const std::string partial = temp_path("budget.csv");
  const CliRun budget = cli({kFixtures + "/lasso.cfg", "--max-iters", "3", "--output", partial});
  CHECK(budget.code == kExitBudget);
  CHECK(budget.out.find("budget exhausted") != std::string::npos);
  const std::string text = read(partial);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  for (const char* bad : {"bad_alpha.cfg", "rank_deficient.cfg", "malformed_number.cfg"}) {
    const CliRun r = cli({kFixtures + "/" + bad});
    CHECK_MESSAGE(r.code == kExitInput, bad);
    CHECK_MESSAGE(r.err.rfind("error: ", 0) == 0, bad);
  }
  CHECK(cli({kFixtures + "/missing.cfg"}).code == kExitInput);
  CHECK(cli({}).code == kExitInput);
  CHECK(cli({kFixtures + "/lasso.cfg", "--solver", "consensus_sum1"}).code == kExitInput);
}

TEST_CASE("cli determinism") {
  const std::string a = temp_path("det_a.csv"), b = temp_path("det_b.csv");
  cli({kFixtures + "/lasso.cfg", "--output", a, "--seed", "5"});
  cli({kFixtures + "/lasso.cfg", "--output", b, "--seed", "5"});
  CHECK(read(a) == read(b));
  CHECK(!read(a).empty());
}

TEST_CASE("cli compare, sweep and summary modes") {
  const CliRun cmp = cli({kFixtures + "/pair.cfg", "--compare", "--max-iters", "200"});
  CHECK(cmp.code == 0);
  CHECK(cmp.out.find("max deviation w") != std::string::npos);
  const CompareResult c = compare_admm_dr(parse_config(read(kFixtures + "/pair.cfg")));
  CHECK(c.max_dev() <= 1e-9);

  const CliRun sw = cli({kFixtures + "/pair.cfg", "--sweep", "alpha=0,0.2;lambda_frac=0.5,0.9"});
  CHECK(sw.code == 0);
  CHECK(std::count(sw.out.begin(), sw.out.end(), '\n') == 5);
  CHECK(sw.out.find("converged") != std::string::npos);
  CHECK_THROWS_AS(parse_sweep("beta=1"), ParseError);
  CHECK_THROWS_AS(parse_sweep("alpha=0.1,x"), ParseError);

  const std::string summary = temp_path("summary.csv");
  CHECK(cli({kFixtures + "/pair.cfg", "--summary", summary}).code == 0);
  const std::string s = read(summary);
  CHECK(s.rfind("solver,status,iterations", 0) == 0);
}

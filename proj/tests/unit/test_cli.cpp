#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "canardkit/commands.hpp"
#include "canardkit/error.hpp"
#include "canardkit/fixtures.hpp"
#include "canardkit/pipeline.hpp"
#include "canardkit/report.hpp"
#include "canardkit/svg.hpp"
#include "canardkit/system_file.hpp"
#include "canardkit/verify.hpp"
#include "doctest.h"

using namespace canardkit;

namespace {

std::string data(const char* name) { return std::string(CANARDKIT_DATA_DIR) + "/" + name; }

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

CommandOptions on(const char* file) {
  CommandOptions o;
  o.file = data(file);
  return o;
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for: " << text);
  return ParseError("", 0, 0);
}

// Every opening tag is closed or self-closing.
bool balanced(const std::string& svg) {
  int depth = 0;
  for (std::size_t p = svg.find('<'); p != std::string::npos; p = svg.find('<', p + 1)) {
    const std::size_t end = svg.find('>', p);
    if (end == std::string::npos) return false;
    if (svg[p + 1] == '?' || svg[p + 1] == '!') continue;
    if (svg[p + 1] == '/') {
      --depth;
    } else if (svg[end - 1] != '/') {
      ++depth;
    }
    if (depth < 0) return false;
  }
  return depth == 0;
}

}  // namespace

TEST_CASE("system files") {
  const SystemFile s = load_system(data("transcritical.sys"));
  CHECK(s.x0[0].to_string() == transcritical_fixture().x0[0].to_string());
  CHECK(s.x1[1].to_string() == "1/2");
  REQUIRE(s.weights);
  CHECK(s.weights->to_string() == "1,1,4");
  REQUIRE(s.epsilon);
  CHECK(*s.epsilon == Rational(1, 1000));
  CHECK(parse_system(fixture_text("pitchfork")).x1[1].to_string() == pitchfork_fixture().x1[1].to_string());

  const SystemFile round = parse_system(s.to_text());
  CHECK(round.x0[0] == s.x0[0]);
  CHECK(round.x1[0] == s.x1[0]);

  auto e = parse_failure("X0 = x ; 0\nX1 = 1 ; 0\nmu = 3\n");
  CHECK(e.line() == 3);
  CHECK(e.column() == 1);
  e = parse_failure("X0 = x ; 0\nX0 = y ; 0\nX1 = 1 ; 0\n");
  CHECK(e.line() == 2);
  e = parse_failure("X0 = x ; 0\n  X1 = 1 ; y +* 2\n");
  CHECK(e.line() == 2);
  CHECK(e.column() > 13);
  e = parse_failure("X0 = x\nX1 = 1 ; 0\n");
  CHECK(e.line() == 1);
  e = parse_failure("X0 = x ; 0\n");
  CHECK(e.message() == "missing X1");
  e = parse_failure("X0 = x ; 0\nX1 = 1 ; 0\nepsilon = -1e-3\n");
  CHECK(e.line() == 3);
  CHECK(parse_number("2.5e-3") == Rational(1, 400));
  CHECK(parse_number("-3/6") == Rational(-1, 2));
  CHECK_THROWS_AS(parse_number("1e"), ParseError);
  CHECK_THROWS_AS(load_system(data("does_not_exist.sys")), IoError);
}

TEST_CASE("exit codes") {
  CHECK(run_command("analyze", on("transcritical.sys")).exit_code == kExitOk);
  CHECK(run_command("analyze", on("degenerate_x1.sys")).exit_code == kExitAssumption);
  CHECK(run_command("analyze", on("does_not_exist.sys")).exit_code == kExitParse);

  auto o = on("transcritical.sys");
  o.weights = "1,1,1";
  CHECK(run_command("blowup", o).exit_code == kExitAssumption);
  o.weights = "1,x,4";
  CHECK(run_command("blowup", o).exit_code == kExitAssumption);

  o = on("transcritical.sys");
  o.format = "yaml";
  CHECK(run_command("analyze", o).exit_code == kExitParse);
  o = on("transcritical.sys");
  o.eps = "banana";
  CHECK(run_command("simulate", o).exit_code == kExitParse);
  o = on("transcritical.sys");
  o.t_end = "0";
  const auto empty = run_command("simulate", o);
  CHECK(empty.exit_code == kExitOk);
  CHECK(empty.output.find("\"steps\": 0") != std::string::npos);
  CHECK(run_command("no-such-command", o).exit_code == kExitParse);

  const auto bad = run_command("analyze", on("does_not_exist.sys"));
  CHECK(bad.output.find("\"error\"") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  const auto a = run_command("analyze", on("transcritical.sys"));
  const auto b = run_command("analyze", on("transcritical.sys"));
  CHECK(a.output == b.output);
  CHECK(a.output.find("\"canard_branches\"") != std::string::npos);

  auto o = on("pitchfork.sys");
  o.section = "equator";
  const auto c = run_command("blowup", o);
  CHECK(c.exit_code == kExitOk);
  CHECK(c.output == run_command("blowup", o).output);

  o = on("transcritical.sys");
  o.format = "csv";
  o.t_end = "50";
  const auto s = run_command("simulate", o);
  CHECK(s.exit_code == kExitOk);
  CHECK(s.output.rfind("t,x,y,event\n", 0) == 0);
  CHECK(s.output == run_command("simulate", o).output);
}

TEST_CASE("out flag writes the report") {
  const auto path = std::filesystem::temp_directory_path() / "canardkit_test_out.json";
  auto o = on("transcritical.sys");
  o.out = path.string();
  const auto r = run_command("analyze", o);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.output.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == run_command("analyze", on("transcritical.sys")).output);
  std::filesystem::remove(path);
}

TEST_CASE("svg output") {
  const std::string empty = render_svg({});
  CHECK(balanced(empty));
  CHECK(count(empty, "class=\"axes\"") == 1);
  CHECK(count(empty, "class=\"branch") == 0);

  const Analysis a = run_analysis(transcritical_fixture());
  const BlowupAnalysis b = run_blowup(a, *a.system.weights, 10);
  const std::string svg = render_svg(make_scene(a, &b));
  CHECK(balanced(svg));
  CHECK(svg.find("<svg xmlns=") != std::string::npos);
  CHECK(count(svg, "class=\"branch") == 4);
  CHECK(count(svg, "class=\"branch canard\"") == 1);
  CHECK(count(svg, "class=\"equilibrium\"") == 10);
  CHECK(svg == render_svg(make_scene(a, &b)));
}

TEST_CASE("verify-paper") {
  const auto checks = verify_paper();
  for (const auto& c : checks) CHECK_MESSAGE(c.pass, c.id << ": " << c.detail);
  CHECK(all_passed(checks));
  CHECK(checks_json(checks) == checks_json(verify_paper()));

  SystemFile perturbed = transcritical_fixture();
  perturbed.x1 = PolyVectorField({MultiPoly::constant(default_vars(), Rational(1)),
                                   MultiPoly::constant(default_vars(), Rational(51, 100))});
  const auto bad = verify_paper(perturbed, pitchfork_fixture());
  bool wedge_failed = false;
  for (const auto& c : bad) {
    if (c.id == "wedge-transcritical") wedge_failed = !c.pass;
  }
  CHECK(wedge_failed);
  CHECK_FALSE(all_passed(bad));

  CommandOptions o;
  o.format = "table";
  const auto r = run_command("verify-paper", o);
  CHECK(r.exit_code == kExitOk);
  CHECK(count(r.output, "PASS") >= checks.size());
}

TEST_CASE("circle-lemma command") {
  CommandOptions o;
  const auto r = run_command("circle-lemma", o);
  CHECK(r.exit_code == kExitOk);
  CHECK(count(r.output, "\"k\":") == 4);
  o.k = 0;
  CHECK(run_command("circle-lemma", o).exit_code != kExitOk);
  o.k = 3;
  o.format = "csv";
  const auto c = run_command("circle-lemma", o);
  CHECK(count(c.output, "\n") == 1001);
}

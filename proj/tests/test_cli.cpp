// Drives the ndlr binary through a shell and checks output and exit codes.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ndlr/alpha.hpp"
#include "ndlr/rules.hpp"
#include "ndlr/syntax.hpp"

namespace {

struct Run {
  int status = -1;
  std::string out;
};

std::string src(const std::string& rel) { return std::string(NDLR_SOURCE_DIR) + "/" + rel; }

Run cli(const std::string& args, const std::string& env = "", const std::string& sig = "bool_list.sig") {
  std::string cmd = env + " " + NDLR_CLI + " --sig " + src("signatures/" + sig) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  while (auto n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("ndlr_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("cli parse") {
  auto ok = cli("parse -e '(\\x.x)   True'");
  CHECK(ok.status == 0);
  CHECK(ok.out == "((\\x.x) True)\n");
  auto bad = cli("parse -e 'Cons True Nil Nil'");
  CHECK(bad.status == 2);
  CHECK(cli("--sig /nonexistent/sig parse -e True").status == 2);
  auto from_stdin = cli("parse -", "echo 'choice True False' |");
  CHECK(from_stdin.out == "choice True False\n");
}

TEST_CASE("cli reduce") {
  auto ex = cli("reduce --open -e '((letrec x=c in \\y.y) d)'");
  CHECK(ex.out.rfind("lapp st @ε => letrec x=c in ((\\y.y) d)", 0) == 0);
  CHECK(cli("reduce -e '((letrec x=c in \\y.y) d)'").status == 2);
  auto all = cli("reduce --nd all -e 'choice True False'");
  CHECK(contains(all.out, "arms=L steps=1 RESULT Converged nd=1"));
  CHECK(contains(all.out, "arms=R steps=1 RESULT Converged nd=1"));
  CHECK(contains(cli("reduce -e 'letrec x=x in x'").out, "RESULT Stuck:Cycle nd=0"));
  auto bounded = cli("reduce --max-steps 5 -e 'letrec f=\\x.(f x) in (f True)'");
  CHECK(contains(bounded.out, "RESULT Exhausted"));
  CHECK(bounded.status == 3);
}

TEST_CASE("cli apply") {
  auto del = cli("apply --rule ldel --pos appF -e '((letrec x=c in \\y.y) d)'");
  CHECK(del.status == 0);
  CHECK(del.out.rfind("((\\y.y) d)\n", 0) == 0);
  CHECK(contains(del.out, "ldel i"));
  auto ucp = cli("apply --rule ucp --pos 'letB(x)' -e 'letrec x=True in (x x)'");
  CHECK(ucp.status == 2);
  CHECK(contains(cli("apply --rule cp --pos letIn.lam -e 'letrec x=\\y.y in (\\z.x)'").out, "cpd"));
  CHECK(contains(cli("apply --rule cp --pos letIn.appF -e 'letrec x=\\y.y in (x True)'").out, "cpt"));
}

TEST_CASE("cli enumerate") {
  auto n = cli("enumerate --size 5 --binders 2 --letrec-bindings 2 --count");
  CHECK(n.status == 0);
  auto listed = cli("enumerate --size 3");
  CHECK(std::count(listed.out.begin(), listed.out.end(), '\n') > 5);
}

TEST_CASE("cli check-diagrams") {
  auto ok = cli("check-diagrams --red llet --mode fork --size 7 --diagrams " + src("diagrams/llet.fork"));
  CHECK(ok.status == 0);
  CHECK(contains(ok.out, "counterexamples=0"));
  auto cut = temp_file("llet_cut.fork", "st,a . i,llet ~> i,llet . st,a | a in {lbeta,cpn,case,ndl,ndr}\n"
                                        "st,lll+ . i,llet ~> i,llet . st,lll+\n"
                                        "st,lll+ . i,llet ~> st,lll+\n");
  CHECK(cli("check-diagrams --red llet --mode fork --size 9 --diagrams " + cut, "", "bool.sig").status == 1);
  auto prop = cli("check-diagrams --red ldel --mode propose --size 6");
  CHECK(prop.status == 0);
  CHECK(contains(prop.out, "i,ldel . st,a ~> st,a . i,ldel"));
  auto broken = temp_file("broken.commute", "ldel . st,a ~> \n");
  CHECK(cli("check-diagrams --red ldel --mode commute --diagrams " + broken).status == 2);
}

TEST_CASE("cli results do not depend on --workers") {
  auto args = std::string("check-diagrams --red ldel --mode commute --size 7 --diagrams ") +
              src("diagrams/ldel.commute");
  CHECK(cli("--workers 1 " + args).out == cli("--workers 3 " + args).out);
}

TEST_CASE("cli check-equiv exit codes") {
  auto choice = temp_file("s.term", "choice True False");
  auto tru = temp_file("t.term", "True");
  auto v = cli("check-equiv " + choice + " " + tru + " --ctx-size 4");
  CHECK(v.status == 1);
  CHECK(contains(v.out, "Counterexample"));
  CHECK(cli("check-equiv " + tru + " " + tru + " --ctx-size 4").status == 0);
  CHECK(cli("check-equiv " + tru + " " + tru + " --ctx-size 4 --reduction-contexts").status == 0);
}

TEST_CASE("cli config file from the environment") {
  auto cfg = temp_file("config.json", "{\"signature\": \"" + src("signatures/bool.sig") + "\", \"size\": 3}");
  auto r = cli("enumerate --count", "NDLR_CONFIG=" + cfg);
  // --sig on the command line wins over the file, the size comes from the file
  auto direct = cli("enumerate --size 3 --count");
  CHECK(r.status == 0);
  CHECK(r.out == direct.out);
  auto bad = temp_file("bad.json", "{\"size\": 0}");
  CHECK(cli("enumerate --count", "NDLR_CONFIG=" + bad).status == 2);
}

TEST_CASE("cli records replay") {
  auto sig = ndlr::bool_list_signature();
  auto replay = [&](const nlohmann::json& step) {
    auto before = ndlr::parse(step["before"].get<std::string>(), sig);
    ndlr::Redex rx{*ndlr::rule_from_name(step["rule"].get<std::string>()),
                   ndlr::parse_position(step["position"].get<std::string>()),
                   step["group"].get<std::vector<std::string>>()};
    auto out = rx.rule == ndlr::Rule::cpt || rx.rule == ndlr::Rule::cpd ? ndlr::apply_cp(before, rx.pos).first
                                                                        : ndlr::apply(before, rx);
    return ndlr::alpha_eq(out, ndlr::parse(step["after"].get<std::string>(), sig));
  };

  auto red = cli("--records reduce -e 'letrec x=(\\y.y) in (x (choice True False))'");
  std::istringstream lines(red.out);
  std::string line;
  std::size_t steps = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    if (!j.contains("rule")) continue;
    CHECK(replay(j));
    ++steps;
  }
  CHECK(steps >= 3);

  auto rec = cli("--records check-diagrams --red cp --mode commute --size 7 --diagrams " +
                  src("diagrams/cp.commute"));
  std::istringstream recs(rec.out);
  std::size_t replayed = 0;
  while (std::getline(recs, line)) {
    auto j = nlohmann::json::parse(line);
    REQUIRE(j.contains("witnesses"));
    for (const auto& w : j["witnesses"])
      for (const auto& s : w) {
        CHECK(replay(s));
        ++replayed;
      }
  }
  CHECK(replayed > 10);
}

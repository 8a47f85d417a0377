#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "smd2cpn/cli.hpp"
#include "smd2cpn/cpn_emit.hpp"
#include "support/corpus.hpp"

using namespace smd2cpn;
using namespace smd2cpn::testing;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "smd2cpn_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("translate writes the document and reports counts") {
  const auto cpn = scratch("cd.cpn"), dot = scratch("cd.dot");
  const auto r = run({"translate", corpus_path("cdplayer.smdl"), "-o", cpn.string(), "--dot", dot.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.err.empty());
  CHECK(r.out.find("places: 18") != std::string::npos);
  CHECK(r.out.find("transitions: 26") != std::string::npos);
  CHECK(r.out.find("arcs: 104") != std::string::npos);
  CHECK(r.out.find(" ms") != std::string::npos);
  const std::string first = read_text(cpn.string());
  CHECK(parse_cpn_xml(first).places.size() == 18);
  CHECK(read_text(dot.string()).starts_with("digraph"));
  // idempotent on disk
  CHECK(run({"translate", corpus_path("cdplayer.smdl"), "-o", cpn.string()}).code == kExitOk);
  CHECK(read_text(cpn.string()) == first);
}

TEST_CASE("check") {
  CHECK(run({"check", corpus_path("cdplayer.smdl")}).code == kExitOk);
  const auto bad = scratch("bad.smdl");
  {
    std::ofstream(bad) << "machine M { state A initial; state A; }\n";
  }
  const auto r = run({"check", bad.string()});
  CHECK(r.code == kExitInvalidInput);
  CHECK(r.out.empty());
  CHECK(r.err.find("A") != std::string::npos);
  const auto broken = scratch("broken.smdl");
  {
    std::ofstream(broken) << "machine M {\n  state A initial\n";
  }
  const auto p = run({"check", broken.string()});
  CHECK(p.code == kExitInvalidInput);
  CHECK(p.err.find(":3:") != std::string::npos);
}

TEST_CASE("simulate") {
  const auto r = run({"simulate", corpus_path("cdplayer.smdl")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("reachable markings: 2432\n") != std::string::npos);
  CHECK(r.out.find("1-safe: yes") != std::string::npos);
  const auto small = run({"simulate", corpus_path("cdplayer.smdl"), "--bound", "10"});
  CHECK(small.out.find("reachable markings: 10 (truncated)") != std::string::npos);
}

TEST_CASE("equiv") {
  const auto r = run({"equiv", corpus_path("cdplayer.smdl"), "--depth", "6"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("equivalent") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"translate", corpus_path("cdplayer.smdl")}).code == kExitUsage);
  CHECK(run({"equiv", corpus_path("cdplayer.smdl"), "--depth", "0"}).code == kExitUsage);
  const auto missing = run({"check", "/nonexistent/file.smdl"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.out.empty());
  CHECK(run({"--help"}).code == kExitOk);
}

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "divconv/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "divconv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = divconv::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("constant emits json") {
  const auto r = run({"constant", "--h", "1", "--k", "2", "--l", "2", "--m", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["h"] == 1);
  CHECK(j["prime_cutoff"] == 100000);
  CHECK(j["nabla"].get<double>() == doctest::Approx(0.394277714094129).epsilon(1e-13));
  CHECK(j["error_bound"].get<double>() > 0);
  REQUIRE(j["factors"].size() == 1);
  CHECK(j["factors"][0]["p"] == 2);
  CHECK(j["factors"][0]["value_num"].is_string());
  for (const char* key : {"h", "k", "l", "m", "nabla", "error_bound", "prime_cutoff", "factors"}) {
    CHECK(j.contains(key));
  }

  const auto r12 = run({"constant", "--h", "12", "--k", "3", "--l", "2", "--m", "4", "--prime-cutoff", "100000"});
  CHECK(r12.code == 0);
  CHECK(nlohmann::json::parse(r12.out)["factors"].size() == 2);
}

TEST_CASE("validation errors exit 2 with one line") {
  const auto r = run({"constant", "--h", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("h must be >= 1") != std::string::npos);
  CHECK(lines(r.err) == 1);
  CHECK(r.out.empty());
  const auto bad = run({"constant", "--bogus"});
  CHECK(bad.code == 2);
  CHECK(lines(bad.err) == 1);
  CHECK(run({}).code == 2);
  CHECK(run({"triple", "--h", "10", "--x-grid", "5"}).code == 2);
  CHECK(run({"constant", "--prime-cutoff", "2"}).code == 2);
  CHECK(run({"triple", "--x", "12abc"}).code == 2);
  CHECK(run({"theorem4", "--x", "600"}).code == 2);
  CHECK(run({"constant", "--format", "xml"}).code == 2);
}

TEST_CASE("help exits 0") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("h < n <= x") != std::string::npos);
}

TEST_CASE("triple ratio table") {
  const auto r = run({"triple", "--h", "1", "--k", "2", "--l", "2", "--m", "2", "--x-grid", "1e3,1e4,1e5,1e6",
                      "--prime-cutoff", "10000"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out) == 5);
  CHECK(r.out.rfind("x,h,k,l,m,sum,main_term,ratio\n", 0) == 0);
  CHECK(r.out.find("\n10000,1,2,2,2,5022932,") != std::string::npos);
  const auto j = run({"triple", "--x-grid", "1e3,1e4", "--format", "json", "--prime-cutoff", "10000"});
  REQUIRE(j.code == 0);
  const auto arr = nlohmann::json::parse(j.out);
  REQUIRE(arr.size() == 2);
  CHECK(arr[1]["sum"] == "5022932");
  const auto lower = run({"triple", "--x", "1e4", "--lower-bound", "--prime-cutoff", "10000"});
  CHECK(lower.code == 0);
}

TEST_CASE("output does not depend on the thread count") {
  const std::vector<std::string> base = {"triple", "--h", "2", "--k", "3", "--x-grid", "1000,300000"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "3"});
  const auto ra = run(a), rb = run(b);
  CHECK(ra.code == 0);
  CHECK(ra.out == rb.out);
  const auto ca = run({"constant", "--h", "6", "--threads", "1"});
  const auto cb = run({"constant", "--h", "6", "--threads", "4"});
  CHECK(ca.out == cb.out);
}

TEST_CASE("other sums") {
  const auto s = run({"shifted", "--k", "2", "--l", "2", "--h", "1", "--x", "4"});
  CHECK(s.code == 0);
  CHECK(s.out == "x,h,k,l,sum,ingham_main_term,ingham_ratio\n4,1,2,2,18,,\n");
  const auto a = run({"additive", "--x", "4"});
  CHECK(a.out == "N,sum,main_term,ratio\n4,8,,\n");
  const auto t = run({"theorem4", "--x", "2", "--check-naive"});
  CHECK(t.code == 0);
  CHECK(t.out == "h,k,l,m,x,numerator,denominator,value\n1,2,2,2,2,3,1,3.00000000000000e+00\n");
  const auto e = run({"expectations", "--p", "2,5", "--x", "1e5"});
  CHECK(e.code == 0);
  CHECK(lines(e.out) == 3);
}

TEST_CASE("verify suites") {
  const auto c = run({"verify", "c-psi", "--h-max", "8", "--kl-max", "3"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("PASS c-psi", 0) == 0);
  CHECK(run({"verify", "eq-h"}).code == 0);
  CHECK(run({"verify", "routes", "--h-max", "4", "--kl-max", "3", "--p-max", "13"}).code == 0);
  CHECK(run({"verify", "g", "--h-max", "3", "--x", "12"}).code == 0);
  const auto i = run({"verify", "integral", "--r", "3", "--x", "7.389"});
  CHECK(i.code == 0);
  CHECK(i.out.find("PASS integral") != std::string::npos);
  const auto e = run({"verify", "expectations", "--p", "5", "--x", "1e6"});
  CHECK(e.code == 0);
  CHECK(e.out.find("PASS expectations") != std::string::npos);
  const auto f = run({"verify", "expectations", "--p", "5", "--x", "1e4", "--tol", "1e-9"});
  CHECK(f.code == 1);
  CHECK(f.err.rfind("FAIL expectations", 0) == 0);
  CHECK(run({"verify"}).code == 2);
}

TEST_CASE("files and caches") {
  const auto dir = std::filesystem::temp_directory_path() / "divconv_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto out = (dir / "nabla.json").string();
  CHECK(run({"constant", "--out", out, "--prime-cutoff", "1000"}).code == 0);
  std::ifstream in(out);
  CHECK(nlohmann::json::parse(in)["prime_cutoff"] == 1000);

  const auto cache = (dir / "cache").string();
  const auto s = run({"sieve-cache", "--k", "2", "--x", "1000", "--cache-dir", cache});
  CHECK(s.code == 0);
  CHECK(std::filesystem::exists(std::filesystem::path(cache) / "dk2_1_1001.dktb"));
  const auto cached = run({"triple", "--x-grid", "1e3,1e4", "--cache-dir", cache, "--prime-cutoff", "10000"});
  const auto direct = run({"triple", "--x-grid", "1e3,1e4", "--prime-cutoff", "10000"});
  CHECK(cached.code == 0);
  CHECK(cached.out == direct.out);

  // a regular file where the cache directory should be
  const auto blocker = (dir / "blocker").string();
  std::ofstream(blocker) << "x";
  CHECK(run({"sieve-cache", "--x", "100", "--cache-dir", blocker}).code == 3);
  std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int status;
  std::string out;
};

Run pfmass(const std::string& args) {
  const std::string cmd = std::string(PFMASS_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("a1 prints the closed form") {
  const auto r = pfmass("a1 --lambda 2 --kappa 0");
  CHECK(r.status == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "lambda,kappa,a1,a1_quadrature,a1_quadrature_error");
  char expected[64];
  std::snprintf(expected, sizeof expected, "%.11e", 8.0 / (3.0 * M_PI) * std::log(2.0));
  CHECK(l[1].find(std::string(",") + expected + ",") != std::string::npos);
}

TEST_CASE("bterm 4 against its closed form") {
  const auto r = pfmass("bterm --j 4 --lambda 10 --kappa 0 --out json");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double v = j["rows"][0]["value"];
  const double err = j["rows"][0]["error"];
  const double closed = -32.0 * M_PI / 3.0 * std::pow(std::log(6.0), 2);
  CHECK(std::abs(v - closed) <= err);
}

TEST_CASE("sweep CSV") {
  const auto r = pfmass("sweep --lambda-grid 1e2:1e6:geometric:9 --kappa 0 --out csv --threads 2");
  CHECK((r.status == 0 || r.status == 2));
  const auto l = lines(r.out);
  REQUIRE(l.size() == 10);
  CHECK(l[0] == "lambda,kappa,b1,b2,b3,b4,b5,b6,a2,a2_sqrt_scaled,s1,s2,s3,s4,appB_residual,err_flags");
  for (std::size_t i = 1; i < l.size(); ++i) {
    CHECK(std::count(l[i].begin(), l[i].end(), ',') == 15);
    CHECK(l[i].rfind("e+0", 17) != std::string::npos);
  }
}

TEST_CASE("thread count does not change output") {
  const auto a = pfmass("a2 --lambda 30 --kappa 1 --threads 1");
  const auto b = pfmass("a2 --lambda 30 --kappa 1 --threads 4");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  const auto c = pfmass("sweep --lambda-grid 10,40 --threads 1 --out json");
  const auto d = pfmass("sweep --lambda-grid 10,40 --threads 3 --out json");
  CHECK(c.out == d.out);
}

TEST_CASE("JSON output round-trips") {
  for (const char* args : {"a2 --lambda 8 --kappa 1 --out json", "flow --gamma 0.5 --lambda 100 --out json",
                           "meff --alpha 0.01 --lambda 12 --out json"}) {
    const auto r = pfmass(args);
    CHECK(r.status == 0);
    CHECK(nlohmann::ordered_json::parse(r.out).dump(2) + "\n" == r.out);
  }
}

TEST_CASE("flow example") {
  const auto r = pfmass("flow --gamma 0.5 --b0 1 --m-star 1 --lambda 1e4 --out json");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(double(j["rows"][0]["bare_mass"]) == doctest::Approx(1e-4));
  CHECK(double(j["rows"][0]["m_star_check"]) == doctest::Approx(1.0));
}

TEST_CASE("config file with command-line override") {
  const std::string path = "pfmass_test_config.ini";
  {
    std::ofstream f(path);
    f << "# test config\nlambda = 50\nkappa = 1   # infrared\nout = json\n";
  }
  const auto r = pfmass("a1 --config " + path + " --kappa 2");
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(double(j["rows"][0]["lambda"]) == 50.0);
  CHECK(double(j["rows"][0]["kappa"]) == 2.0);
  {
    std::ofstream f(path);
    f << "no_such_key = 3\n";
  }
  CHECK(pfmass("a1 --config " + path).status == 1);
  std::remove(path.c_str());
}

TEST_CASE("usage errors exit 1") {
  CHECK(pfmass("").status == 1);
  CHECK(pfmass("nonsense").status == 1);
  CHECK(pfmass("a1 --lambda -3").status == 1);
  CHECK(pfmass("a1 --lambda 1 --kappa 2").status == 1);
  CHECK(pfmass("a1 --unknown 3").status == 1);
  CHECK(pfmass("a1 --rel-tol 0").status == 1);
  CHECK(pfmass("bterm --j 7").status == 1);
  CHECK(pfmass("sweep --lambda-grid 1e3:1e2:geometric:3").status == 1);
  CHECK(pfmass("flow --gamma 1.5").status == 1);
  CHECK(pfmass("a1 --out xml").status == 1);
  CHECK(pfmass("a1 --output /nonexistent/dir/file.csv").status == 1);
  CHECK(pfmass("a1 --threads 0").status == 1);
}

TEST_CASE("non-converged results exit 2 and still print") {
  const auto r = pfmass("a2 --lambda 1e4 --max-subdivisions 2");
  CHECK(r.status == 2);
  CHECK(lines(r.out).size() == 2);
}

TEST_CASE("output file") {
  const std::string path = "pfmass_test_out.csv";
  const auto r = pfmass("a1 --lambda 3 --output " + path);
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "lambda,kappa,a1,a1_quadrature,a1_quadrature_error");
  std::remove(path.c_str());
}

TEST_CASE("help documents the defaults") {
  const auto r = pfmass("--help");
  CHECK(r.status == 0);
  CHECK(r.out.find("1e-8") != std::string::npos);
  CHECK(r.out.find("1e-6") != std::string::npos);
  CHECK(r.out.find("PFMASS_THREADS") != std::string::npos);
}

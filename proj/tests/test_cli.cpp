#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "impact/impact.h"

namespace {

constexpr const char* kLine =
    R"({"type":"piecewise_linear","T":1,"points":[[0,1],[1,0]]})";
constexpr const char* kMember10 =
    R"({"type":"piecewise_linear","T":1,)"
    R"("points":[[0,1],[0.5,0.5],[0.75,0.1],[1,0.1]]})";

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_raw(const std::string& command) {
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Runs the CLI with the given arguments.  stderr is merged into the captured
// output when merge_stderr is set, and silenced otherwise.
RunResult run(const std::string& args, bool merge_stderr = false) {
  return run_raw(std::string(IMPACTCTL_PATH) + " " + args +
                 (merge_stderr ? " 2>&1" : " 2>/dev/null"));
}

std::string shq(const std::string& s) { return "'" + s + "'"; }

// Temp file that removes itself; contents written at construction.
struct TempFile {
  std::string path;
  TempFile(const std::string& tag, const std::string& contents) {
    path = (std::filesystem::temp_directory_path() /
            ("impactctl_test_" + std::to_string(::getpid()) + "_" + tag))
               .string();
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("version and help") {
  RunResult r = run("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.output == std::string(imb_version()) + "\n");
  r = run("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("measure") != std::string::npos);
  CHECK(run("", true).exit_code == 1);           // a subcommand is required
  CHECK(run("frobnicate", true).exit_code == 1); // unknown subcommand
}

TEST_CASE("measure prints one value with twelve significant digits") {
  RunResult r =
      run("measure --fn '{\"type\":\"constant\",\"a\":2,\"T\":10}' "
          "--kind h --theta 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "2\n");
  r = run("measure --fn " + shq(kLine) + " --kind g --theta 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "0.666666666667\n");
  r = run("measure --fn " + shq(kLine) +
          " --kind ped --fspec '{\"type\":\"linear\",\"theta\":1}'");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "0.5\n");
  r = run("measure --fn " + shq(kLine) + " --kind mf --beta 0.3 --c 0.6");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1\n");
  r = run("measure --fn " + shq(kLine) + " --kind polar --phi 0.5");
  CHECK(r.exit_code == 0);
  CHECK(!r.output.empty());
}

TEST_CASE("measure exit codes distinguish input errors from admissibility") {
  // Domain error (theta = 0 for h) is an input problem: exit 1.
  RunResult r = run("measure --fn " + shq(kLine) + " --kind h --theta 0", true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
  // Not admissible: exit 2 and the message names the smallest usable theta.
  r = run("measure --fn '{\"type\":\"constant\",\"a\":2,\"T\":1}' "
          "--kind h --theta 1",
          true);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("smallest admissible") != std::string::npos);
  r = run("measure --fn " + shq(kLine) + " --kind h", true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("--theta") != std::string::npos);
  r = run("measure --kind h --theta 1", true);
  CHECK(r.exit_code == 1);
  r = run("measure --fn '{bad' --kind h --theta 1", true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
  r = run("measure --fn " + shq(kLine) + " --kind nope --theta 1", true);
  CHECK(r.exit_code == 1);
}

TEST_CASE("function specs load from files as well as inline JSON") {
  TempFile spec("fn.json", std::string(kLine) + "\n");
  RunResult r = run("measure --fn " + shq(spec.path) + " --kind h --theta 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "0.5\n");
}

TEST_CASE("ingest builds a model spec from citation counts") {
  TempFile csv("counts.csv", "counts\n5\n3\n1\n");
  TempFile outpath("model.json", "");
  RunResult r = run("ingest --csv " + shq(csv.path) + " --tail hold --out " +
                    shq(outpath.path));
  CHECK(r.exit_code == 0);
  CHECK(r.output ==
        "N = 3\nc1 = 5\nwrote " + outpath.path + "\n");

  // The file holds exactly the canonical model JSON.
  imb_function* fn = nullptr;
  REQUIRE(imb_function_from_counts_csv("counts\n5\n3\n1\n", 0, nullptr,
                                       nullptr, nullptr, &fn) == IMB_OK);
  char* expected = nullptr;
  REQUIRE(imb_function_to_json(fn, &expected) == IMB_OK);
  CHECK(slurp(outpath.path) == std::string(expected) + "\n");
  imb_string_free(expected);
  imb_function_free(fn);

  // The written spec feeds straight back into measure.
  r = run("measure --fn " + shq(outpath.path) +
          " --kind percentile --theta 1.5");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "2\n");
}

TEST_CASE("ingest reads stdin, warns about unsorted counts") {
  RunResult r = run_raw(std::string("printf '1\\n5\\n3\\n' | ") +
                        IMPACTCTL_PATH + " ingest --csv - --out - 2>&1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("not sorted nonincreasing") != std::string::npos);
  CHECK(r.output.find("N = 3") != std::string::npos);
  CHECK(r.output.find("piecewise_linear") != std::string::npos);
}

TEST_CASE("bundle emits curves with absent cells kept in place") {
  RunResult r = run("bundle --fn " + shq(kMember10) +
                        " --kind h --min 0.05 --max 1 --count 20 --format csv",
                    true);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("theta,value,admissible\n") != std::string::npos);
  CHECK(r.output.find("theta0 = 0.1") != std::string::npos);
  CHECK(r.output.find(",,0\n") != std::string::npos);  // inadmissible row

  // Constant model over a log grid: h = a/theta everywhere, all admissible.
  r = run("bundle --fn '{\"type\":\"constant\",\"a\":1,\"T\":2}' "
          "--kind h --min 0.5 --max 2 --count 5 --log --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.5,2,1\n") != std::string::npos);
  CHECK(r.output.find("2,0.5,1\n") != std::string::npos);
  CHECK(r.output.find(",,0\n") == std::string::npos);

  TempFile outpath("curve.json", "");
  r = run("bundle --fn " + shq(kMember10) +
          " --kind h --min 0.05 --max 1 --count 20 --format json --out " +
          shq(outpath.path));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "theta0 = 0.1\nwrote " + outpath.path + "\n");
  const nlohmann::json j = nlohmann::json::parse(slurp(outpath.path));
  CHECK(j.at("points").size() == 20);
  CHECK(j.at("theta0") == 0.1);
}

TEST_CASE("converge reports verdicts for the built-in families") {
  RunResult r = run("converge --family figure1 --kind mu");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: uniform-evidence\n");

  r = run("converge --family figure1 --kind h --boundary-probes");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: pointwise-only-evidence\n");

  r = run("converge --family constants --an 1/n --kind g --boundary-probes");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: pointwise-only-evidence\n");

  // Probes are what demote these families; without them the fixed grid
  // alone looks uniform.
  r = run("converge --family constants --an 1/n --kind g --no-boundary-probes");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: uniform-evidence\n");

  r = run("converge --family constants --an 0.5+1/n --kind mu");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: uniform-evidence\n");

  // A short member list stops short of useful decay.
  r = run("converge --family figure1 --kind mu --n-list 3,10");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: no-convergence-evidence\n");

  r = run("converge --family nope --kind h", true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("converge writes report bodies on request") {
  RunResult r =
      run("converge --family figure1 --kind mu --format csv --out -");
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("scenario,n,theta,error\n", 0) == 0);
  CHECK(r.output.find("figure1,3,") != std::string::npos);

  TempFile outpath("report.json", "");
  r = run("converge --family figure1 --kind h --format json --out " +
          shq(outpath.path));
  CHECK(r.exit_code == 0);
  CHECK(r.output ==
        "verdict: pointwise-only-evidence\nwrote " + outpath.path + "\n");
  const nlohmann::json j = nlohmann::json::parse(slurp(outpath.path));
  CHECK(j.at("verdict") == "pointwise-only-evidence");
  CHECK(j.at("family") == "figure1");
  CHECK(j.at("boundary_probes") == true);
  CHECK(j.at("probes").is_array());
}

TEST_CASE("user families run from JSON specs") {
  const std::string family =
      R"({"family":"user","limit":{"type":"constant","a":0,"T":1},)"
      R"("members":[{"n":3,"fn":{"type":"constant","a":0.3333333333333333,"T":1}},)"
      R"({"n":10,"fn":{"type":"constant","a":0.1,"T":1}}]})";
  TempFile spec("family.json", family);
  RunResult r = run("converge --family user --family-json " + shq(spec.path) +
                    " --kind g --n-list 3,10");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "verdict: no-convergence-evidence\n");
}

TEST_CASE("classify runs the scenario suite") {
  RunResult r = run("classify");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[PASS] S1") != std::string::npos);
  CHECK(r.output.find("bundle") != std::string::npos);
  CHECK(r.output.find("mlimit") != std::string::npos);

  r = run("classify --format json");
  CHECK(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.output);
  CHECK(j.at("all_pass") == true);
  CHECK(j.at("scenarios").size() == 12);
  bool saw_mf = false;
  for (const auto& row : j.at("classification")) {
    if (row.at("bundle") == "mf") {
      saw_mf = true;
      CHECK(row.at("pc") == false);
      CHECK(row.at("uc") == true);
    }
  }
  CHECK(saw_mf);
}

TEST_CASE("config files supply defaults that flags override") {
  TempFile cfg("cfg.ini", "[bundle]\ncount=5\n");
  const std::string base = "--config " + shq(cfg.path) + " bundle --fn " +
                           shq(kLine) + " --kind i --format csv";
  RunResult r = run(base);
  CHECK(r.exit_code == 0);
  auto rows = [](const std::string& body) {
    size_t n = 0;
    for (char ch : body) n += (ch == '\n');
    return n - 1;  // minus the header line
  };
  CHECK(rows(r.output) == 5);
  r = run(base + " --count 3");
  CHECK(r.exit_code == 0);
  CHECK(rows(r.output) == 3);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "infometer/cli.hpp"
#include "infometer/manifest.hpp"

using namespace infometer;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "infometer_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& body) {
  const fs::path p = scratch(name);
  std::ofstream(p) << body;
  return p.string();
}

std::string simulate(const std::string& name, std::vector<std::string> args) {
  args.insert(args.begin(), "simulate");
  const Run r = invoke(args);
  REQUIRE(r.code == cli::kExitOk);
  return write(name, r.out);
}

void check_manifests(const Json& doc) {
  REQUIRE(doc.contains("results"));
  REQUIRE_FALSE(doc.at("results").empty());
  for (const Json& m : doc.at("results")) CHECK_NOTHROW(ReportManifest::parse(m));
}

}  // namespace

TEST_CASE("usage errors exit with 64") {
  CHECK(invoke({"entropy", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("validation errors exit with 2") {
  CHECK(invoke({"entropy", "--input", scratch("missing.csv").string(), "--seed", "1"}).code == cli::kExitValidation);
  const std::string bad = write("bad_tpm.json", R"({"n": 1, "tpm": [[0.5, 0.6], [1, 0]]})");
  const Run r = invoke({"ei", "--tpm", bad});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("InvalidInput") != std::string::npos);
  const std::string big = write("big_tpm.json", R"({"n": 13, "tpm": []})");
  CHECK(invoke({"phi", "--tpm", big}).code == cli::kExitValidation);
  CHECK(invoke({"kl", "--p", "0.5,0.5", "--q", "1,0"}).code == cli::kExitValidation);
}

TEST_CASE("exact TPM commands") {
  const std::string id = simulate("identity.json", {"identity", "--nodes", "3"});
  const Run ei = invoke({"ei", "--tpm", id});
  REQUIRE(ei.code == 0);
  const Json doc = Json::parse(ei.out);
  check_manifests(doc);
  const Json& m = doc.at("results").at(0);
  CHECK(m.at("result").at("value").get<double>() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m.at("result").at("unit") == "bits");
  CHECK(m.at("significance").at("applicable") == false);

  const std::string deg = simulate("degenerate.json", {"degenerate"});
  const Run em = invoke({"emergence", "--tpm", deg, "--grain", "0,0,0,1"});
  REQUIRE(em.code == 0);
  check_manifests(Json::parse(em.out));

  const std::string disc = simulate("discordance.json", {"discordance"});
  const std::string eps = simulate("episodes.csv", {"discordance-episodes", "--episodes", "30", "--length", "50",
                                                    "--seed", "3"});
  const Run au = invoke({"autonomy", "--tpm", disc, "--input", eps, "--v-nodes", "0", "--e-nodes", "1", "--seed", "2",
                      "--replicates", "100"});
  REQUIRE(au.code == 0);
  check_manifests(Json::parse(au.out));
}

TEST_CASE("every data command emits complete manifests") {
  const std::string ar = simulate("ar.csv", {"coupled-ar", "--n", "400", "--seed", "5"});
  const std::string gauss = simulate("gauss.csv", {"gaussian", "--n", "300", "--seed", "6"});
  const std::vector<std::vector<std::string>> commands{
      {"entropy", "--input", gauss, "--column", "x"},
      {"entropy", "--input", gauss, "--column", "x,y", "--estimator", "knn"},
      {"entropy", "--input", gauss, "--column", "x", "--bins", "8"},
      {"mi", "--input", gauss, "--x", "x", "--y", "y"},
      {"cmi", "--input", ar, "--x", "x", "--y", "y", "--z", "x"},
      {"te", "--input", ar, "--source", "y", "--target", "x"},
      {"ais", "--input", ar, "--column", "x"},
      {"predinfo", "--input", ar, "--column", "x", "--window", "2"},
      {"kl", "--p", "0.2,0.8", "--q", "0.5,0.5"},
  };
  for (auto args : commands) {
    for (const char* extra : {"--seed", "9", "--surrogates", "39", "--replicates", "100"}) args.push_back(extra);
    CAPTURE(args[0]);
    const Run r = invoke(args);
    REQUIRE(r.code == 0);
    const Json doc = Json::parse(r.out);
    check_manifests(doc);
    CHECK(doc.at("seed") == 9);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const std::string ar = simulate("ar_det.csv", {"coupled-ar", "--n", "500", "--seed", "8"});
  const std::string net = simulate("net_det.csv", {"planted-network", "--n", "300", "--seed", "8"});
  const std::vector<std::vector<std::string>> commands{
      {"te", "--input", ar, "--source", "y", "--target", "x", "--surrogates", "39", "--replicates", "100"},
      {"scan", "--input", net, "--surrogates", "19", "--alpha", "0.05"},
      {"entropy", "--input", ar, "--column", "x,y", "--replicates", "100"},
  };
  for (auto args : commands) {
    args.insert(args.end(), {"--seed", "123"});
    auto one = args, four = args;
    one.insert(one.end(), {"--workers", "1"});
    four.insert(four.end(), {"--workers", "4"});
    const Run a = invoke(one), b = invoke(four);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("bits conversion and csv summary") {
  const std::string gauss = simulate("gauss_bits.csv", {"gaussian", "--n", "300", "--seed", "6"});
  const Run nats = invoke({"mi", "--input", gauss, "--x", "x", "--y", "y", "--seed", "1", "--surrogates", "19",
                        "--replicates", "100"});
  const Run bits = invoke({"mi", "--input", gauss, "--x", "x", "--y", "y", "--seed", "1", "--surrogates", "19",
                        "--replicates", "100", "--bits"});
  REQUIRE(nats.code == 0);
  REQUIRE(bits.code == 0);
  const Json a = Json::parse(nats.out).at("results").at(0);
  const Json b = Json::parse(bits.out).at("results").at(0);
  CHECK(b.at("result").at("unit") == "bits");
  CHECK(b.at("result").at("value").get<double>() ==
        doctest::Approx(a.at("result").at("value").get<double>() / std::log(2.0)));

  const Run csv = invoke({"mi", "--input", gauss, "--x", "x", "--y", "y", "--seed", "1", "--surrogates", "19",
                       "--replicates", "100", "--format", "csv-summary"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("measure,value,unit,ci_low,ci_high,p_value\n", 0) == 0);
}

TEST_CASE("a missing seed is generated and reported") {
  const std::string gauss = simulate("gauss_seed.csv", {"gaussian", "--n", "200", "--seed", "6"});
  const Run r = invoke({"entropy", "--input", gauss, "--column", "x", "--replicates", "100"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc.at("seed_source") == "generated");
  CHECK(doc.at("seed").is_number_unsigned());
}

TEST_CASE("advise command") {
  const Run r = invoke({"advise", "--objective", "dependence", "--continuous", "--dim", "2", "--samples", "5000"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc.at("recommendation").at("estimator") == "ksg");
  CHECK(invoke({"advise", "--objective", "nonsense"}).code == cli::kExitValidation);
}

TEST_CASE("output file option") {
  const fs::path out = scratch("out.json");
  fs::remove(out);
  const std::string id = simulate("identity2.json", {"identity", "--nodes", "2"});
  const Run r = invoke({"phi", "--tpm", id, "--output", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  check_manifests(Json::parse(buf.str()));
}

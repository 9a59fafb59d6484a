#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nnrw/cli.hpp"
#include "support.hpp"

using namespace nnrw;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data_flag() { return testing::data_dir().string(); }

}  // namespace

TEST_CASE("mac subcommand") {
  CHECK(run({"mac", "-N", "36", "-M", "500", "-A", "2", "-P", "6"}).out == "24000\n");
  CHECK(run({"mac", "-N", "784", "-M", "7000", "-A", "1", "-P", "10"}).out == "5558000\n");
  CHECK(run({"mac", "-N", "784", "-M", "0", "-A", "1", "-P", "10"}).code == kExitUsage);
  CHECK(run({"mac", "-N", "784", "-M", "-3", "-A", "1", "-P", "10"}).code == kExitUsage);
  CHECK(run({"mac", "-N", "784"}).code == kExitUsage);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"train"}).code == kExitUsage);
  CHECK(run({"train", "--dataset", "cifar"}).code == kExitUsage);
  for (const char* sub : {"train", "eval", "sweep", "mac", "fetch"}) {
    const Run r = run({sub, "--help"});
    CHECK(r.code == kExitOk);
    CHECK(!r.out.empty());
  }
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"train", "--dataset", "satimage", "--data-dir", data_flag(), "--activations", "swish"}).code ==
        kExitUsage);
  CHECK(run({"train", "--dataset", "satimage", "--data-dir", data_flag(), "--solver", "qr"}).code == kExitUsage);
  CHECK(run({"sweep", "--dataset", "satimage", "--data-dir", data_flag(), "--trials", "0"}).code == kExitUsage);
  CHECK(run({"sweep", "--dataset", "satimage", "--data-dir", data_flag(), "--hidden", "10..5:1"}).code ==
        kExitUsage);
}

TEST_CASE("missing data directory") {
  testing::TempDir tmp;
  const Run r = run({"train", "--dataset", "satimage", "--data-dir", (tmp / "nowhere").string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("train, save and eval round trip") {
  testing::TempDir tmp;
  const std::string model = (tmp / "sat.nnrw").string();
  const Run t = run({"train", "--dataset", "satimage", "--data-dir", data_flag(), "--hidden", "500", "--seed", "4",
                     "--model-out", model});
  REQUIRE(t.code == kExitOk);
  CHECK(t.out.find("dataset=satimage M=500 activations=sigmoid+gaussian solver=ridge lambda=0.01 seed=4") == 0);
  CHECK(t.out.find("macs=24000\n") != std::string::npos);
  const auto at = t.out.find("accuracy=");
  REQUIRE(at != std::string::npos);
  const std::string acc_line = t.out.substr(at, t.out.find('\n', at) - at + 1);

  const Run e = run({"eval", "--model", model, "--dataset", "satimage", "--data-dir", data_flag()});
  REQUIRE(e.code == kExitOk);
  CHECK(e.out == acc_line);

  // Wrong input width for this model.
  CHECK(run({"eval", "--model", model, "--dataset", "letter", "--data-dir", data_flag()}).code == kExitUsage);

  const std::string bytes = testing::read_file(model);
  testing::write_file(tmp / "truncated.nnrw", bytes.substr(0, bytes.size() / 2));
  const Run tr = run({"eval", "--model", (tmp / "truncated.nnrw").string(), "--dataset", "satimage", "--data-dir",
                      data_flag()});
  CHECK(tr.code == kExitData);
  std::string bad = bytes;
  bad[0] = 'X';
  testing::write_file(tmp / "magic.nnrw", bad);
  CHECK(run({"eval", "--model", (tmp / "magic.nnrw").string(), "--dataset", "satimage", "--data-dir", data_flag()})
            .code == kExitData);
  CHECK(run({"eval", "--model", (tmp / "absent.nnrw").string(), "--dataset", "satimage", "--data-dir", data_flag()})
            .code == kExitData);
}

TEST_CASE("duplicate activations warn") {
  const Run r = run({"train", "--dataset", "satimage", "--data-dir", data_flag(), "--hidden", "20", "--activations",
                     "sigmoid+sigmoid"});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("warning:") != std::string::npos);
}

TEST_CASE("singular system exits with the numeric code") {
  const Run r = run({"sweep", "--dataset", "satimage", "--data-dir", data_flag(), "--hidden", "10", "--trials", "1",
                     "--activations", "sigmoid+sigmoid", "--lambda", "0", "--solver", "ridge"});
  CHECK(r.code == kExitNumeric);
  CHECK(r.err.find("M=10") != std::string::npos);
}

TEST_CASE("sweep output is reproducible") {
  testing::TempDir tmp;
  auto sweep = [&](const std::string& tag, const std::string& threads) {
    return run({"sweep", "--dataset", "satimage", "--data-dir", data_flag(), "--hidden", "20..40:20", "--trials",
                "3", "--activations", "sigmoid+gaussian,gaussian", "--threads", threads, "--out",
                (tmp / (tag + ".csv")).string(), "--trials-out", (tmp / (tag + "-trials.csv")).string(), "--json",
                (tmp / (tag + ".json")).string()});
  };
  const Run a = sweep("a", "1");
  REQUIRE(a.code == kExitOk);
  const Run b = sweep("b", "3");
  REQUIRE(b.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("best: dataset=satimage") == 0);
  const std::string csv = testing::read_file(tmp / "a.csv");
  CHECK(csv == testing::read_file(tmp / "b.csv"));
  CHECK(testing::read_file(tmp / "a-trials.csv") == testing::read_file(tmp / "b-trials.csv"));
  // Header plus 2 sets x 2 grid points.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(!testing::read_file(tmp / "a.json").empty());

  const Run stdout_run = run({"sweep", "--dataset", "satimage", "--data-dir", data_flag(), "--hidden", "20..40:20",
                              "--trials", "3", "--activations", "sigmoid+gaussian,gaussian"});
  CHECK(stdout_run.out.rfind(csv, 0) == 0);
}

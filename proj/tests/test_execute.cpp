#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dtc/execute.hpp"

using namespace dtc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dtc_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_run(const fs::path& dir) {
  ExperimentConfig c;
  c.hamiltonian.n_sites = 6;
  c.drive.epsilon = 0.0;
  c.drive.n_periods = 64;
  c.output_dir = dir.string();
  return c;
}

}  // namespace

TEST_SUITE("execute") {
  TEST_CASE("a perfect-kick run writes an alternating series with provenance") {
    const auto dir = scratch("run");
    const auto c = small_run(dir);
    const auto result = execute(c);
    REQUIRE(result.files.size() == 3);
    CHECK(result.files.back().filename() == "meta.json");
    std::istringstream csv(slurp(dir / "mx.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "# config_hash=" + config_hash(c));
    std::getline(csv, line);
    CHECK(line == "n,mx");
    int n = 0;
    while (std::getline(csv, line)) {
      const auto comma = line.find(',');
      CHECK(std::stoi(line.substr(0, comma)) == n);
      const double m = std::stod(line.substr(comma + 1));
      CHECK(std::abs(m - (n % 2 == 0 ? 1.0 : -1.0)) < 1e-12);
      ++n;
    }
    CHECK(n == 64);
    const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
    CHECK(meta["config_hash"] == config_hash(c));
    CHECK(meta["result"]["kld"].get<double>() < 1e-6);
    CHECK(meta["versions"]["dtcsim"] == std::string(kProgramVersion));
    fs::remove_all(dir);
  }

  TEST_CASE("same config gives identical bytes") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    auto ca = small_run(a);
    ca.drive.epsilon = 0.04;
    ca.drive.noise_bound = 0.02;
    ca.realizations = 3;
    auto cb = ca;
    cb.output_dir = b.string();
    cb.threads = 2;
    execute(ca);
    execute(cb);
    for (const char* f : {"mx.csv", "spectrum.csv", "meta.json"}) {
      if (std::string(f) == "meta.json") {
        // The embedded config differs in output_dir and threads only.
        auto ma = nlohmann::json::parse(slurp(a / f));
        auto mb = nlohmann::json::parse(slurp(b / f));
        CHECK(ma["result"] == mb["result"]);
        CHECK(ma["config_hash"] == mb["config_hash"]);
      } else {
        CHECK(slurp(a / f) == slurp(b / f));
      }
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("atomic write leaves no temporary behind") {
    const auto dir = scratch("atomic");
    fs::create_directories(dir);
    write_atomic(dir / "x.txt", "first");
    write_atomic(dir / "x.txt", "second");
    CHECK(slurp(dir / "x.txt") == "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) {
      ++entries;
    }
    CHECK(entries == 1);
    CHECK_THROWS(write_atomic(dir / "missing" / "y.txt", "z"));
    fs::remove_all(dir);
  }

  TEST_CASE("a failing run raises and the csv table guards its width") {
    auto c = small_run(scratch("bad"));
    c.hamiltonian.n_sites = 40;
    CHECK_THROWS(execute(c));
    CsvTable t("abc", {"a", "b"});
    CHECK_THROWS_AS(t.row({"1"}), std::logic_error);
    t.row({"1", "2"});
    CHECK(t.str() == "# config_hash=abc\na,b\n1,2\n");
  }

  TEST_CASE("error json") {
    const auto j = nlohmann::json::parse(error_json("config", "n_sites \"bad\""));
    CHECK(j["error"]["type"] == "config");
    CHECK(j["error"]["message"] == "n_sites \"bad\"");
  }

  TEST_CASE("doubles print with 17 significant digits and round trip") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    for (double v : {0.1 + 0.2, 1.0 / 3.0, -7.25e12, 5e-324}) {
      const auto s = format_double(v);
      double back = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == v);
    }
  }
}

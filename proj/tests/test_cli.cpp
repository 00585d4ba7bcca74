// End-to-end tests of the command-line tool: exit codes, artifact shape,
// determinism, and config error handling.  The binary path and the shipped
// config directory come from the environment (set by CTest).

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("WEYLCHARGE_CLI");
  REQUIRE(p != nullptr);
  return p;
}
std::string config_dir() {
  const char* p = std::getenv("WEYLCHARGE_CONFIG_DIR");
  REQUIRE(p != nullptr);
  return p;
}

// Run the CLI; returns the process exit code.
int run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + cli_path() + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      ++i;
    } else {
      field += c;
    }
  }
  return rows;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("weylcharge_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("weyl command: artifacts, schema, and determinism") {
  fs::path out1 = fresh_dir("weyl1"), out2 = fresh_dir("weyl2");
  std::string cfg = config_dir() + "/canonical.json";
  REQUIRE(run_cli("weyl --config " + cfg + " --out " + out1.string()) == 0);
  REQUIRE(run_cli("weyl --config " + cfg + " --out " + out2.string()) == 0);

  std::string csv = slurp(out1 / "weyl.csv");
  CHECK(csv == slurp(out2 / "weyl.csv"));  // byte-identical

  auto rows = parse_csv(csv);
  REQUIRE(rows.size() >= 4);
  CHECK(rows[0] == std::vector<std::string>{"script", "n_generators", "angle",
                                            "omega0_re", "omega0_im",
                                            "gauge_invariant"});

  json j1 = json::parse(slurp(out1 / "weyl.json"));
  json j2 = json::parse(slurp(out2 / "weyl.json"));
  CHECK(j1.contains("wall_time_s"));
  j1.erase("wall_time_s");
  j2.erase("wall_time_s");
  CHECK(j1 == j2);  // identical apart from the wall-time field

  CHECK(j1.at("command") == "weyl");
  CHECK(j1.at("inputs_digest").get<std::string>().size() == 16);
  bool saw_invariant = false, saw_not = false;
  for (const auto& row : j1.at("rows")) {
    CHECK(row.contains("angle"));
    CHECK(row.at("rho").contains("atoms"));
    CHECK(row.at("m").contains("atoms"));
    if (row.at("gauge_invariant").get<bool>()) {
      REQUIRE(row.at("omega0").is_array());
      CHECK(row.at("omega0").size() == 2);
      saw_invariant = true;
    } else {
      CHECK(row.at("omega0").is_null());
      saw_not = true;
    }
  }
  CHECK(saw_invariant);
  CHECK(saw_not);
}

TEST_CASE("gauss command reproduces the charge table on the shipped config") {
  fs::path out = fresh_dir("gauss");
  std::string cfg = config_dir() + "/canonical.json";
  REQUIRE(run_cli("gauss --config " + cfg + " --out " + out.string()) == 0);

  json j = json::parse(slurp(out / "gauss.json"));
  int determinate = 0, indeterminate = 0;
  for (const auto& row : j.at("rows")) {
    if (row.at("case") == "indeterminate") {
      ++indeterminate;
      CHECK(row.at("pass").is_null());  // excluded from pass/fail, reported
      continue;
    }
    ++determinate;
    double q = row.at("charge").get<double>();
    double expected = row.at("expected").get<double>();
    double readout = row.at("readout").get<double>();
    INFO(row.at("scenario").get<std::string>());
    CHECK(std::abs(readout - expected) <= 1e-3 * std::max(1.0, std::abs(q)));
    CHECK(row.at("pass").get<bool>());
  }
  CHECK(determinate >= 5);
  CHECK(indeterminate >= 1);

  // CSV mirrors the JSON rows
  auto rows = parse_csv(slurp(out / "gauss.csv"));
  CHECK(rows.size() == j.at("rows").size() + 1);
}

TEST_CASE("config errors exit with code 3") {
  fs::path out = fresh_dir("err");
  std::string good = config_dir() + "/canonical.json";

  SECTION("nonexistent config file") {
    CHECK(run_cli("weyl --config /nonexistent.json --out " + out.string()) ==
          3);
  }
  SECTION("malformed JSON") {
    fs::path bad = out / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("weyl --config " + bad.string() + " --out " + out.string()) ==
          3);
  }
  SECTION("config defining no objects") {
    fs::path bad = out / "empty.json";
    std::ofstream(bad) << R"({"functions": {}})";
    CHECK(run_cli("weyl --config " + bad.string() + " --out " + out.string()) ==
          3);
  }
  SECTION("unknown function reference") {
    json j = json::parse(slurp(good));
    j["limit"]["probe"] = "no_such_function";
    fs::path bad = out / "badref.json";
    std::ofstream(bad) << j.dump();
    CHECK(run_cli("limit --config " + bad.string() + " --out " + out.string()) ==
          3);
  }
  SECTION("command without its block") {
    json j = json::parse(slurp(good));
    j.erase("energy");
    fs::path bad = out / "noblock.json";
    std::ofstream(bad) << j.dump();
    CHECK(run_cli("energy --config " + bad.string() + " --out " +
                  out.string()) == 3);
  }
}

TEST_CASE("tolerance violations exit with code 2") {
  fs::path out = fresh_dir("tol");
  json j = json::parse(slurp(config_dir() + "/canonical.json"));
  // a single cheap scenario on a deliberately coarse grid
  j["gauss"]["scenarios"] = json::array(
      {j["gauss"]["scenarios"][0]});
  j["gauss"]["quadrature"] = {{"p_max", 15.0}, {"radial_panels", 4},
                              {"radial_order", 6}, {"n_theta", 8},
                              {"n_phi", 8}};
  fs::path cfg = out / "coarse.json";
  std::ofstream(cfg) << j.dump();
  CHECK(run_cli("gauss --config " + cfg.string() + " --out " + out.string() +
                " --tolerance-scale 1e-6") == 2);
  // the same run passes when the tolerance is scaled up instead
  CHECK(run_cli("gauss --config " + cfg.string() + " --out " + out.string() +
                " --tolerance-scale 1e3") == 0);
}

TEST_CASE("kernel cache directory is created and persisted") {
  fs::path out = fresh_dir("cache_out");
  fs::path cache = fresh_dir("cache_dir");
  fs::remove_all(cache);
  std::string cfg = config_dir() + "/canonical.json";
  REQUIRE(run_cli("weyl --config " + cfg + " --out " + out.string(),
                  "WEYLCHARGE_CACHE_DIR=" + cache.string()) == 0);
  REQUIRE(fs::exists(cache / "dflat_cache.json"));
  json j = json::parse(slurp(cache / "dflat_cache.json"));
  CHECK(!j.at("entries").empty());
  // second run with a warm cache reproduces the same artifacts
  fs::path out2 = fresh_dir("cache_out2");
  REQUIRE(run_cli("weyl --config " + cfg + " --out " + out2.string(),
                  "WEYLCHARGE_CACHE_DIR=" + cache.string()) == 0);
  CHECK(slurp(out / "weyl.csv") == slurp(out2 / "weyl.csv"));
}

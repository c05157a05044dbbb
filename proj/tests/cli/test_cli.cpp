// Runs the latdisc executable as a subprocess.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" LATDISC_CLI_PATH "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

const fs::path& scratch_dir() {
  static const struct Dir {
    fs::path path = fs::temp_directory_path() / ("latdisc_cli_test_" + std::to_string(getpid()));
    Dir() { fs::create_directories(path); }
    ~Dir() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } dir;
  return dir.path;
}

fs::path scratch(const std::string& name) {
  const fs::path& dir = scratch_dir();
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("output is byte-identical across worker counts") {
  const std::string args = "sweep --domain disk --r-min 64 --r-max 512 --r-steps 4 --p 2,4 --grid 16 --reproducible";
  const Run one = run("--workers 1 " + args);
  REQUIRE(one.status == 0);
  CHECK(run("--workers 4 " + args).out == one.out);
  CHECK(run("--workers 8 " + args).out == one.out);
  const std::string mc = "moment --domain annulus:0.3 --radius 40,80 --mc 5000 --seed 9 --p 2 --reproducible";
  CHECK(run("--workers 1 " + mc).out == run("--workers 8 " + mc).out);
}

TEST_CASE("csv header and timestamp") {
  const Run r = run("count --radius 5");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("# latdisc 1.0.0\n# command: count\n# config: ", 0) == 0);
  CHECK(r.out.find("# created: ") != std::string::npos);
  CHECK(run("count --radius 5 --reproducible").out.find("# created") == std::string::npos);
  CHECK(r.out.find("disk,closed,5,0,0,81,") != std::string::npos);
}

TEST_CASE("json output carries the configuration") {
  const Run r = run("--format json disc --domain ellipse:2,1 --radius 3 --shift 0.1,0.7 --reproducible");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["config"]["domain"] == "ellipse:2,1");
  CHECK(doc["config"]["command"] == "disc");
  CHECK(doc["results"][0]["count"] == 56);
}

TEST_CASE("cache hits reproduce the output and add no records") {
  const fs::path cache = scratch("cache.jsonl");
  const std::string args = "--cache " + cache.string() + " moment --radius 30,60 --p 2,4 --grid 8 --reproducible";
  const Run first = run(args);
  REQUIRE(first.status == 0);
  const std::string after_first = slurp(cache);
  CHECK(line_count(after_first) == 4);
  const Run second = run(args);
  CHECK(second.out == first.out);
  CHECK(slurp(cache) == after_first);
  // A new exponent only adds its own cells.
  CHECK(run("--cache " + cache.string() + " moment --radius 30,60 --p 2,6 --grid 8").status == 0);
  CHECK(line_count(slurp(cache)) == 6);
  // Verification recomputes the sampled hits and must agree.
  CHECK(run("--verify-cache " + args).status == 0);
}

TEST_CASE("verification catches a tampered record with a valid checksum") {
  auto fnv1a = [](const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  };
  // Find a radius whose key falls in the verified sample.
  int radius = 0;
  std::string key;
  for (int R = 1; R < 5000 && !radius; ++R) {
    char hex[40];
    std::snprintf(hex, sizeof hex, "%a", double(R));
    key = std::string("count|disk|closed|R=") + hex + "|x=0x0p+0,0x0p+0";
    if (fnv1a(key) % 100 == 0) radius = R;
  }
  REQUIRE(radius > 0);
  const fs::path cache = scratch("tampered.jsonl");
  const std::string args = "--cache " + cache.string() + " count --radius " + std::to_string(radius);
  REQUIRE(run(args).status == 0);
  auto rec = nlohmann::ordered_json::parse(slurp(cache));
  REQUIRE(rec["key"] == key);
  rec["value"]["count"] = "1";
  char sum[24];
  std::snprintf(sum, sizeof sum, "%016llx",
                static_cast<unsigned long long>(fnv1a(key + "\n" + rec["value"].dump())));
  rec["checksum"] = sum;
  std::ofstream(cache) << rec.dump() << "\n";
  // Loads cleanly, serves the bad value without verification, fails with it.
  const Run plain = run(args);
  CHECK(plain.status == 0);
  CHECK(plain.out.find(",1,") != std::string::npos);
  CHECK(run("--verify-cache " + args).status == 3);
}

TEST_CASE("the environment variable overrides --cache") {
  const fs::path env_cache = scratch("env.jsonl");
  const fs::path flag_cache = scratch("flag.jsonl");
  REQUIRE(run("--cache " + flag_cache.string() + " count --radius 10", "LATDISC_CACHE=" + env_cache.string()).status == 0);
  CHECK(fs::exists(env_cache));
  CHECK_FALSE(fs::exists(flag_cache));
}

TEST_CASE("a corrupted cache is refused") {
  const fs::path cache = scratch("bad.jsonl");
  REQUIRE(run("--cache " + cache.string() + " count --radius 10,20").status == 0);
  std::string text = slurp(cache);
  const auto pos = text.find("0x");
  REQUIRE(pos != std::string::npos);
  text[pos + 2] = text[pos + 2] == '1' ? '2' : '1';
  std::ofstream(cache) << text;
  CHECK(run("--cache " + cache.string() + " count --radius 10,20").status == 3);
  std::ofstream(cache) << "not json\n";
  CHECK(run("--cache " + cache.string() + " count --radius 10").status == 3);
}

TEST_CASE("invalid input exits with status 2") {
  CHECK(run("count --radius 0.5").status == 2);
  CHECK(run("count --domain hexagon --radius 5").status == 2);
  CHECK(run("moment --radius 10 --grid 4 --mc 200").status == 2);
  CHECK(run("count").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("--format xml count --radius 5").status == 2);
  // A failing cell still prints the rest of the sweep.
  const Run partial = run("moment --radius 0.5,10 --grid 4 --reproducible");
  CHECK(partial.status == 2);
  CHECK(partial.out.find("disk,10,") != std::string::npos);
}

TEST_CASE("figure data") {
  const Run two = run("figures --fig 2 --samples 50 --reproducible");
  REQUIRE(two.status == 0);
  CHECK(two.out.find("R,N,scaled_discrepancy,within_gauss_bound\n") != std::string::npos);
  CHECK(two.out.find(",false\n") == std::string::npos);
  CHECK(line_count(two.out) == 4 + 50);
  const Run three = run("figures --fig 3 --samples 20 --reproducible");
  REQUIRE(three.status == 0);
  CHECK(line_count(three.out) == 4 + 3 * 20);
  CHECK(run("figures --fig 7").status == 2);
}

TEST_CASE("fourier, envelope and histogram commands") {
  const Run table = run("fourier --kind a --radius 16 --trunc-n 3 --reproducible");
  REQUIRE(table.status == 0);
  CHECK(table.out.find("n1,n2,re,im\n-3,0,") != std::string::npos);
  const Run pars = run("fourier --kind annulus --mode parseval --domain annulus:0.2 --radius 10 --trunc-n 32");
  CHECK(pars.status == 0);
  const Run env = run("envelope --domain annulus --alpha -0.5 --radius 64,128 --p 2 --grid 8");
  CHECK(env.status == 0);
  CHECK(env.out.find("annulus_m2_area") != std::string::npos);
  const Run hist = run("histogram --domain annulus:0.1 --radius 30 --shifts 1000");
  CHECK(hist.status == 0);
  CHECK(hist.out.find("# summary: ") != std::string::npos);
  CHECK(run("histogram --domain annulus:0.1 --radius 30 --shifts 10").status == 2);
}

TEST_CASE("output file") {
  const fs::path out = scratch("out.csv");
  REQUIRE(run("--out " + out.string() + " count --radius 7 --reproducible").status == 0);
  CHECK(slurp(out) == run("count --radius 7 --reproducible").out);
}

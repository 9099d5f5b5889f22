#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "cec/image.hpp"
#include "cec/io.hpp"
#include "support/svg.hpp"
#include "support/synthetic.hpp"

using namespace cec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Workdir {
 public:
  explicit Workdir(const std::string& name) : dir_(fs::temp_directory_path() / ("cec_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& f) const { return dir_ / f; }

  Outcome cec(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(CEC_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
  }

 private:
  fs::path dir_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("cli: missing or bad options exit 2") {
  Workdir w("opts");
  write_text(w / "p.csv", "1,2\n3,4\n5,7\n");

  Outcome o = w.cec("--family full:1");
  CHECK(o.code == 2);
  CHECK(o.err.find("error:ConfigError") != std::string::npos);

  o = w.cec("--input " + (w / "p.csv").string());
  CHECK(o.code == 2);
  CHECK(o.err.find("--family") != std::string::npos);

  o = w.cec("--input " + (w / "p.csv").string() + " --family fixed-radius:-1:2");
  CHECK(o.code == 2);
  CHECK(o.err.find("error:ConfigError") != std::string::npos);
  CHECK(o.err.find("-1") != std::string::npos);

  o = w.cec("--input " + (w / "p.csv").string() + " --family full:1 --threshold median");
  CHECK(o.code == 2);

  o = w.cec("--input " + (w / "p.csv").string() + " --family full:1 --removal never");
  CHECK(o.code == 2);
  CHECK(o.err.find("never") != std::string::npos);

  o = w.cec("--input " + (w / "missing.csv").string() + " --family full:1");
  CHECK(o.code == 2);
  CHECK(o.err.find("error:IoError") != std::string::npos);
}

TEST_CASE("cli: empty or degenerate data exit 3") {
  Workdir w("degenerate");
  std::string same;
  for (int i = 0; i < 20; ++i) same += "4,4\n";
  write_text(w / "same.csv", same);
  Outcome o = w.cec("--input " + (w / "same.csv").string() + " --family full:2");
  CHECK(o.code == 3);
  CHECK(o.err.find("error:DegenerateCluster") != std::string::npos);

  write_text(w / "empty.csv", "x,y\n");
  o = w.cec("--input " + (w / "empty.csv").string() + " --family full:2");
  CHECK(o.code == 3);
  CHECK(o.err.find("error:EmptyInput") != std::string::npos);

  // All-white image with dark foreground: no points at all.
  save_png(GrayImage{16, 16, std::vector<std::uint8_t>(256, 255)}, (w / "white.png").string());
  o = w.cec("--input " + (w / "white.png").string() + " --family full:2 --threshold fixed:128");
  CHECK(o.code == 3);

  o = w.cec("--input " + (w / "white.png").string() + " --family full:2");
  CHECK(o.code == 2);
  CHECK(o.err.find("error:ConstantImage") != std::string::npos);
}

TEST_CASE("cli: same seed gives byte-identical output") {
  Workdir w("determinism");
  std::mt19937_64 rng(31);
  const auto data = testing::gaussian_blobs({{0, 0}, {12, 3}, {4, 13}}, 1.2, 120, rng);
  save_csv_points(data.points, (w / "blobs.csv").string());
  const std::string base = "--input " + (w / "blobs.csv").string() + " --family full:6 --seed 5 --restarts 4";
  REQUIRE(w.cec(base + " --out-json " + (w / "a.json").string() + " --out-svg " + (w / "a.svg").string()).code == 0);
  REQUIRE(w.cec(base + " --out-json " + (w / "b.json").string() + " --out-svg " + (w / "b.svg").string()).code == 0);
  CHECK(slurp(w / "a.json") == slurp(w / "b.json"));
  CHECK(slurp(w / "a.svg") == slurp(w / "b.svg"));

  // stdout carries the same document when no path is given, up to the svg.
  const Outcome o = w.cec(base);
  CHECK(o.code == 0);
  CHECK(o.out == slurp(w / "a.json"));

  const json j = json::parse(slurp(w / "a.json"));
  CHECK(j["clusters"].size() == 3);
  CHECK(j["config"]["removal"] == "online");
  CHECK(json::parse(w.cec(base + " --removal sweep").out)["config"]["removal"] == "sweep");
  CHECK(j.find("timing_ms") == j.end());
  const Outcome t = w.cec(base + " --report-timing");
  CHECK(json::parse(t.out).contains("timing_ms"));
}

TEST_CASE("cli: toothpicks with the measured spectrum") {
  // Half-length and width matching a spectrum of (4938.5, 5.7).
  Workdir w("toothpicks");
  const double a = std::sqrt(3.0 * 4938.5), jitter = std::sqrt(5.7);
  std::mt19937_64 rng(41);
  const auto scene = testing::toothpicks(5, 300, a, jitter, 40.0, 900.0, rng);
  save_csv_points(scene.points, (w / "sticks.csv").string());
  const Outcome o = w.cec("--input " + (w / "sticks.csv").string() + " --family fixed-eigs:4938.5,5.7:10 --seed 0 --out-svg " +
                          (w / "sticks.svg").string());
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["clusters"].size() == 5);
  CHECK(testing::svg_ellipses(slurp(w / "sticks.svg")).size() == j["clusters"].size());
}

TEST_CASE("cli: image and csv inputs with the same points give the same clusters") {
  Workdir w("isolation");
  const std::vector<testing::EllipseShape> shapes{{40, 50, 25, 6, testing::deg(20)},
                                                  {120, 40, 18, 10, testing::deg(-60)},
                                                  {90, 110, 30, 5, testing::deg(95)}};
  const GrayImage img = testing::render_ellipses(170, 150, shapes, 4);
  save_png(img, (w / "shapes.png").string());
  save_pgm(img, (w / "shapes.pgm").string());
  save_csv_points(mask_to_points(binarize(img, Threshold::otsu(), Polarity::Dark)), (w / "shapes.csv").string());

  const std::string flags = " --family full:8 --seed 3 --restarts 3";
  const Outcome png = w.cec("--input " + (w / "shapes.png").string() + flags);
  const Outcome pgm = w.cec("--input " + (w / "shapes.pgm").string() + flags);
  const Outcome csv = w.cec("--input " + (w / "shapes.csv").string() + flags);
  REQUIRE(png.code == 0);
  REQUIRE(pgm.code == 0);
  REQUIRE(csv.code == 0);
  json jp = json::parse(png.out), jg = json::parse(pgm.out), jc = json::parse(csv.out);
  CHECK(jp["input"]["kind"] == "png");
  CHECK(jp["input"]["width"] == 170);
  CHECK(jp["input"]["threshold"] == "otsu");
  CHECK(jc["input"]["kind"] == "csv");
  for (json* j : {&jp, &jg, &jc}) j->erase("input");
  CHECK(jp.dump() == jc.dump());
  CHECK(jg.dump() == jc.dump());
  CHECK(jc["clusters"].size() == 3);
}

TEST_CASE("cli: svg needs 2-D data but json is still written") {
  Workdir w("dim3");
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  PointCloud pts;
  for (int i = 0; i < 60; ++i) {
    const double p[3] = {g(rng), g(rng), g(rng)};
    pts.push_back(p);
  }
  save_csv_points(pts, (w / "p3.csv").string());
  const Outcome o = w.cec("--input " + (w / "p3.csv").string() + " --family spherical:2 --out-json " +
                          (w / "r.json").string() + " --out-svg " + (w / "r.svg").string());
  CHECK(o.code == 2);
  CHECK(o.err.find("error:UnsupportedDimensionForSvg") != std::string::npos);
  CHECK(json::parse(slurp(w / "r.json"))["input"]["dim"] == 3);
  CHECK_FALSE(fs::exists(w / "r.svg"));
}

TEST_CASE("cli: reordered spectrum warns on stderr") {
  Workdir w("warn");
  std::mt19937_64 rng(3);
  const auto data = testing::gaussian_blobs({{0, 0}}, 1.0, 50, rng);
  save_csv_points(data.points, (w / "p.csv").string());
  const Outcome o = w.cec("--input " + (w / "p.csv").string() + " --family fixed-eigs:1,2:1");
  CHECK(o.code == 0);
  CHECK(o.err.find("warning:") != std::string::npos);
  const json j = json::parse(o.out);
  REQUIRE(!j["warnings"].empty());
  CHECK(j["warnings"][0].get<std::string>().find("reordered") != std::string::npos);
}

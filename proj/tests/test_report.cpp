#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "cec/error.hpp"
#include "cec/report.hpp"
#include "support/svg.hpp"
#include "support/synthetic.hpp"

using namespace cec;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::string& spec) {
  try {
    parse_family_spec(spec);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error for " << spec);
  return ErrorKind::IoError;
}

RunReport single_cluster_report(const Vector& mean, const SymMatrix& cov) {
  ClusteringResult res;
  res.clusters.push_back({0, 10, 1.0, 0.0, {mean, cov}});
  res.labels.assign(10, 0);
  EngineConfig cfg;
  cfg.family_pool = {{family::Full{}, 1}};
  InputDescriptor in{"memory", "memory", 10, mean.size()};
  return make_report(res, cfg, {}, in);
}

}  // namespace

TEST_CASE("family spec parsing") {
  {
    const auto f = parse_family_spec("fixed-eigs:4938.5,5.7");
    const auto* fe = std::get_if<family::FixedEigenvalues>(&f.spec);
    REQUIRE(fe);
    CHECK(fe->lambdas == Vector{4938.5, 5.7});
    CHECK(f.warnings.empty());
  }
  CHECK(std::holds_alternative<family::Spherical>(parse_family_spec("spherical").spec));
  CHECK(std::holds_alternative<family::Full>(parse_family_spec("full").spec));
  CHECK(std::holds_alternative<family::Diagonal>(parse_family_spec("diag").spec));
  {
    const auto f = parse_family_spec("fixed-radius:2.5");
    REQUIRE(std::holds_alternative<family::FixedRadius>(f.spec));
    CHECK(std::get<family::FixedRadius>(f.spec).r == 2.5);
  }
  CHECK(kind_of("fixed-radius:-1") == ErrorKind::ConfigError);
  CHECK(kind_of("fixed-radius:0") == ErrorKind::ConfigError);
  CHECK(kind_of("fixed-radius:abc") == ErrorKind::ConfigError);
  CHECK(kind_of("ellipse") == ErrorKind::ConfigError);
  CHECK(kind_of("full:3") == ErrorKind::ConfigError);
  CHECK(kind_of("fixed-eigs:1,-2") == ErrorKind::ConfigError);
  CHECK(kind_of("fixed-eigs:") == ErrorKind::ConfigError);
  CHECK(kind_of("fixed-cov:@/nonexistent/cov.txt") == ErrorKind::ConfigError);

  try {
    parse_family_spec("fixed-radius:-1");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("-1") != std::string::npos);
  }
}

TEST_CASE("fixed-eigs values are reordered with a warning") {
  const auto f = parse_family_spec("fixed-eigs:5.7,4938.5");
  CHECK(std::get<family::FixedEigenvalues>(f.spec).lambdas == Vector{4938.5, 5.7});
  CHECK(f.warnings.size() == 1);
}

TEST_CASE("fixed-cov reads a matrix file") {
  const auto path = std::filesystem::temp_directory_path() / "cec_test_report_cov.txt";
  {
    std::ofstream out(path);
    out << "4 1\n1 3\n";
  }
  const auto f = parse_family_spec("fixed-cov:@" + path.string());
  const auto* fc = std::get_if<family::FixedCovariance>(&f.spec);
  REQUIRE(fc);
  CHECK(fc->sigma(0, 1) == 1.0);
  CHECK(std::abs(fc->log_det - std::log(11.0)) < 1e-12);
  {
    std::ofstream out(path);
    out << "1 2\n2 1\n";  // indefinite
  }
  CHECK(kind_of("fixed-cov:@" + path.string()) == ErrorKind::ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("pool entries") {
  const auto e = parse_pool_entry("fixed-eigs:4938.5,5.7:10");
  CHECK(e.count == 10);
  CHECK(e.family.text == "fixed-eigs:4938.5,5.7");
  CHECK(parse_pool_entry("full:3").count == 3);
  CHECK_THROWS_AS(parse_pool_entry("full"), Error);
  CHECK_THROWS_AS(parse_pool_entry("full:0"), Error);
  CHECK_THROWS_AS(parse_pool_entry("full:x"), Error);
}

TEST_CASE("round_sig9") {
  CHECK(round_sig9(0.0) == 0.0);
  CHECK(round_sig9(1.23456789012) == 1.23456789);
  CHECK(round_sig9(-98765.4321987) == -98765.4322);
  CHECK(round_sig9(1e-300) == 1e-300);
}

TEST_CASE("svg ellipse for an axis-aligned covariance") {
  const RunReport rep = single_cluster_report({10, 10}, SymMatrix::diagonal(Vector{4, 1}));
  const auto ellipses = testing::svg_ellipses(render_svg(rep));
  REQUIRE(ellipses.size() == 1);
  CHECK(ellipses[0].id == "cluster-0");
  CHECK(ellipses[0].cx == 10.0);
  CHECK(ellipses[0].cy == 10.0);
  CHECK(ellipses[0].rx == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ellipses[0].ry == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(ellipses[0].angle) < 1e-9);
}

TEST_CASE("svg ellipse for a rotated covariance") {
  for (double a : {30.0, -30.0, 75.0, 90.0, -89.0}) {
    const SymMatrix cov = testing::rotated_2x2(testing::deg(a), 4, 1);
    const RunReport rep = single_cluster_report({3, -2}, cov);
    const auto ellipses = testing::svg_ellipses(render_svg(rep));
    REQUIRE(ellipses.size() == 1);
    CHECK(ellipses[0].rx == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(ellipses[0].ry == doctest::Approx(2.0).epsilon(1e-8));
    // Axis direction: angles equal modulo 180 degrees.
    double diff = std::fmod(ellipses[0].angle - a + 360.0, 180.0);
    if (diff > 90.0) diff -= 180.0;
    CHECK(std::abs(diff) < 0.1);
    CHECK(ellipses[0].angle > -90.0);
    CHECK(ellipses[0].angle <= 90.0);
  }
}

TEST_CASE("svg with zero clusters is still a document") {
  ClusteringResult res;
  EngineConfig cfg;
  cfg.family_pool = {{family::Full{}, 1}};
  const RunReport rep = make_report(res, cfg, {}, InputDescriptor{"memory", "memory", 0, 2});
  const std::string svg = render_svg(rep);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(testing::svg_ellipses(svg).empty());
}

TEST_CASE("svg needs 2-D data") {
  const RunReport rep = single_cluster_report({0, 0, 0}, SymMatrix::identity(3));
  try {
    render_svg(rep);
    FAIL("expected UnsupportedDimensionForSvg");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDimensionForSvg);
  }
  // JSON is fine in any dimension.
  const json j = json::parse(report_to_json(rep));
  CHECK(j["clusters"][0]["orientation_deg"].is_null());
}

TEST_CASE("svg point layer and mask canvas") {
  PointCloud pts;
  const double a[2] = {1.5, 2.5}, b[2] = {7.5, 3.5};
  pts.push_back(a);
  pts.push_back(b);
  const std::vector<int> labels{0, 0};
  const RunReport rep = single_cluster_report({4.5, 3.0}, SymMatrix::diagonal(Vector{9, 0.25}));
  BinaryMask mask{12, 8, std::vector<std::uint8_t>(96, 0)};
  const std::string svg = render_svg(rep, {&pts, labels, &mask});
  CHECK(svg.find("viewBox=\"0 0 12 8\"") != std::string::npos);
  CHECK(svg.find("<circle cx=\"1.5\" cy=\"2.5\"") != std::string::npos);
  CHECK(svg.find(palette_color(0)) != std::string::npos);
}

TEST_CASE("report json from a real run") {
  std::mt19937_64 rng(21);
  const auto data = testing::gaussian_blobs({{0, 0}, {15, 2}, {5, 14}}, 1.5, 150, rng);
  EngineConfig cfg;
  cfg.family_pool = {{family::Full{}, 6}};
  cfg.seed = 4;
  const auto res = run(data.points, cfg);
  const std::vector<std::string> texts{"full"};
  const RunReport rep = make_report(res, cfg, texts, {"blobs.csv", "csv", data.points.size(), 2});
  const std::string text = report_to_json(rep);
  const json j = json::parse(text);

  CHECK(j["schema"] == kReportSchema);
  CHECK(j["input"]["points"] == 450);
  CHECK(j["config"]["families"][0]["spec"] == "full");
  CHECK(j["config"]["families"][0]["initial_clusters"] == 6);
  CHECK(j.find("timing_ms") == j.end());
  REQUIRE(j["clusters"].size() == 3);

  double total = 0.0;
  std::size_t count = 0;
  for (const auto& c : j["clusters"]) {
    total += c["weight"].get<double>();
    count += c["count"].get<std::size_t>();
    // Serialized covariance is symmetric positive definite.
    const auto& m = c["covariance"];
    CHECK(m[0][1].get<double>() == m[1][0].get<double>());
    const Vector rows{m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(),
                      m[1][1].get<double>()};
    const SymMatrix cov = SymMatrix::from_rows(2, rows);
    double ld = 0.0;
    CHECK(log_det_pd(cov, ld));
    CHECK(c["eigenvalues"][0].get<double>() >= c["eigenvalues"][1].get<double>());
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
  CHECK(count == 450);
  CHECK(j["energy_trace"].back().get<double>() == j["final_energy"].get<double>());

  // SVG semi-axes agree with the serialized eigenvalues.
  const auto ellipses = testing::svg_ellipses(render_svg(rep, {&data.points, res.labels, nullptr}));
  REQUIRE(ellipses.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double l1 = j["clusters"][k]["eigenvalues"][0].get<double>();
    const double l2 = j["clusters"][k]["eigenvalues"][1].get<double>();
    CHECK(std::abs(ellipses[k].rx - 2.0 * std::sqrt(l1)) < 1e-6);
    CHECK(std::abs(ellipses[k].ry - 2.0 * std::sqrt(l2)) < 1e-6);
    CHECK(ellipses[k].cx == j["clusters"][k]["mean"][0].get<double>());
  }

  // Same inputs, same bytes.
  CHECK(report_to_json(make_report(run(data.points, cfg), cfg, texts, {"blobs.csv", "csv", 450, 2})) == text);
}

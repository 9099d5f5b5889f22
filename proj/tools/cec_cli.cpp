// Command-line driver: input (PNG/PGM/CSV) -> clustering -> JSON report and
// SVG overlay. Talks to the library only through the C interface.

#include <cec/cec.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

template <class T, void (*Destroy)(T)>
struct Handle {
  T ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(ptr); }
  T* out() { return &ptr; }
  T get() const { return ptr; }
};

using Points = Handle<cec_points, cec_points_destroy>;
using Image = Handle<cec_image, cec_image_destroy>;
using Mask = Handle<cec_mask, cec_mask_destroy>;
using Config = Handle<cec_config, cec_config_destroy>;
using Result = Handle<cec_result, cec_result_destroy>;
using Report = Handle<cec_report, cec_report_destroy>;

struct CString {
  char* ptr = nullptr;
  ~CString() { cec_string_free(ptr); }
};

int exit_code_for(cec_status status) {
  switch (status) {
    case CEC_OK: return 0;
    case CEC_ERR_DEGENERATE_CLUSTER:
    case CEC_ERR_EMPTY_INPUT:
    case CEC_ERR_EMPTY_CLUSTER: return 3;
    case CEC_ERR_INTERNAL: return 1;
    default: return 2;
  }
}

struct Failure {
  cec_status status;
  std::string message;
};

void check(cec_status status) {
  if (status != CEC_OK) throw Failure{status, cec_last_error()};
}

[[noreturn]] void config_failure(const std::string& message) { throw Failure{CEC_ERR_CONFIG, message}; }

std::string lower_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

void write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{CEC_ERR_IO, "cannot write '" + path + "'"};
  out << text;
  if (!out) throw Failure{CEC_ERR_IO, "short write to '" + path + "'"};
}

struct Options {
  std::string input;
  std::vector<std::string> families;
  std::optional<double> min_weight;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_sweeps;
  std::optional<double> epsilon;
  std::optional<std::size_t> min_cluster_size;
  std::string threshold = "otsu";
  std::string polarity = "dark";
  std::string removal = "online";
  std::string out_json;
  std::string out_svg;
  bool despeckle = false;
  bool svg_points = true;
  bool report_timing = false;
};

int run(const Options& opt) {
  Config config;
  check(cec_config_create(config.out()));
  if (opt.families.empty()) config_failure("at least one --family <spec>:<count> is required");
  for (const auto& f : opt.families) check(cec_config_add_pool_entry(config.get(), f.c_str()));
  for (std::size_t i = 0; i < cec_config_warning_count(config.get()); ++i) {
    std::cerr << "warning:" << cec_config_warning(config.get(), i) << "\n";
  }
  if (opt.min_weight) check(cec_config_set_min_weight(config.get(), *opt.min_weight));
  if (opt.removal != "online" && opt.removal != "sweep") {
    config_failure("'" + opt.removal + "': removal must be online or sweep");
  }
  check(cec_config_set_removal(config.get(), opt.removal == "online" ? CEC_REMOVAL_ONLINE : CEC_REMOVAL_SWEEP));
  if (opt.restarts) check(cec_config_set_restarts(config.get(), *opt.restarts));
  if (opt.seed) check(cec_config_set_seed(config.get(), *opt.seed));
  if (opt.max_sweeps) check(cec_config_set_max_sweeps(config.get(), *opt.max_sweeps));
  if (opt.epsilon) check(cec_config_set_epsilon(config.get(), *opt.epsilon));
  if (opt.min_cluster_size) {
    if (*opt.min_cluster_size == 0) config_failure("'0': --min-cluster-size must be at least 1");
    check(cec_config_set_min_cluster_size(config.get(), *opt.min_cluster_size));
  }

  cec_threshold_method method = CEC_THRESHOLD_OTSU;
  int fixed_threshold = 0;
  if (opt.threshold.rfind("fixed:", 0) == 0) {
    method = CEC_THRESHOLD_FIXED;
    const std::string t = opt.threshold.substr(6);
    try {
      std::size_t used = 0;
      fixed_threshold = std::stoi(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      config_failure("'" + t + "': threshold must be an integer in 0..255");
    }
  } else if (opt.threshold != "otsu") {
    config_failure("'" + opt.threshold + "': threshold must be otsu or fixed:<t>");
  }
  if (opt.polarity != "dark" && opt.polarity != "bright") {
    config_failure("'" + opt.polarity + "': polarity must be dark or bright");
  }

  const std::string ext = lower_extension(opt.input);
  const bool is_csv = ext == "csv" || ext == "txt";
  Points points;
  Image image;
  Mask mask;
  std::string kind;
  if (is_csv) {
    kind = "csv";
    check(cec_points_load_csv(opt.input.c_str(), points.out()));
  } else {
    check(cec_image_load(opt.input.c_str(), image.out()));
    kind = ext == "pgm" ? "pgm" : "png";
    check(cec_image_binarize(image.get(), method, fixed_threshold,
                             opt.polarity == "dark" ? CEC_POLARITY_DARK : CEC_POLARITY_BRIGHT,
                             opt.despeckle ? 1 : 0, mask.out()));
    check(cec_mask_to_points(mask.get(), points.out()));
  }

  Result result;
  check(cec_run(points.get(), config.get(), result.out()));
  for (std::size_t i = 0; i < cec_result_warning_count(result.get()); ++i) {
    std::cerr << "warning:" << cec_result_warning(result.get(), i) << "\n";
  }

  cec_input_info info{};
  info.path = opt.input.c_str();
  info.kind = kind.c_str();
  if (!is_csv) {
    info.threshold = opt.threshold.c_str();
    info.polarity = opt.polarity.c_str();
    info.mask = mask.get();
  }
  Report report;
  check(cec_report_create(result.get(), config.get(), points.get(), &info, opt.report_timing ? 1 : 0,
                          report.out()));

  CString json;
  check(cec_report_json(report.get(), &json.ptr));
  if (opt.out_json.empty()) {
    std::cout << json.ptr;
  } else {
    write_file(opt.out_json, json.ptr);
  }

  if (!opt.out_svg.empty()) {
    CString svg;
    check(cec_report_svg(report.get(), opt.svg_points ? points.get() : nullptr, mask.get(), &svg.ptr));
    write_file(opt.out_svg, svg.ptr);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-entropy clustering: detect ellipse-shaped point groups in images or point clouds"};
  Options opt;
  app.add_option("--input", opt.input, "Input file: PNG, binary PGM, or CSV point cloud")->required();
  app.add_option("--family", opt.families,
                 "Coding family and initial cluster count, <spec>:<count>; repeatable. Specs: full, diag, "
                 "spherical, fixed-radius:<r>, fixed-eigs:<l1>,...,<lN>, fixed-cov:@<matrix-file>")
      ->take_all();
  app.add_option("--min-weight", opt.min_weight, "Clusters below this share of the points are removed (0.02)");
  app.add_option("--removal", opt.removal, "When underweight clusters go: online (only if the energy drops) or sweep")
      ->capture_default_str();
  app.add_option("--restarts", opt.restarts, "Number of random restarts (10)");
  app.add_option("--seed", opt.seed, "Random seed (0)");
  app.add_option("--max-sweeps", opt.max_sweeps, "Maximum Hartigan sweeps per restart (100)");
  app.add_option("--epsilon", opt.epsilon, "Covariance regularization for full/diag/spherical (1e-6)");
  app.add_option("--min-cluster-size", opt.min_cluster_size,
                 "Smallest allowed cluster (default N+1 for full/diag/spherical, else 1)");
  app.add_option("--threshold", opt.threshold, "Binarization: otsu or fixed:<t>")->capture_default_str();
  app.add_option("--polarity", opt.polarity, "Foreground pixels: dark or bright")->capture_default_str();
  app.add_flag("--despeckle", opt.despeckle, "Drop isolated foreground pixels before clustering");
  app.add_option("--out-json", opt.out_json, "Report path (stdout when omitted)");
  app.add_option("--out-svg", opt.out_svg, "SVG overlay path");
  app.add_flag("!--no-svg-points", opt.svg_points, "Omit the labelled point layer from the SVG");
  app.add_flag("--report-timing", opt.report_timing, "Include wall-clock timing in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:ConfigError:" << e.what() << "\n";
    return 2;
  }

  try {
    return run(opt);
  } catch (const Failure& f) {
    std::cerr << "error:" << cec_status_kind(f.status) << ":" << f.message << "\n";
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error:InternalError:" << e.what() << "\n";
    return 1;
  }
}

#include "cec/cec.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "cec/engine.hpp"
#include "cec/error.hpp"
#include "cec/image.hpp"
#include "cec/io.hpp"
#include "cec/report.hpp"

struct cec_points_t {
  cec::PointCloud cloud;
};

struct cec_image_t {
  cec::GrayImage image;
};

struct cec_mask_t {
  cec::BinaryMask mask;
};

struct cec_config_t {
  cec::EngineConfig engine;
  std::vector<std::string> family_texts;
  std::vector<std::string> warnings;
};

struct cec_result_t {
  cec::ClusteringResult result;
  std::size_t dim = 0;
  double elapsed_ms = 0.0;
};

struct cec_report_t {
  cec::RunReport report;
  std::vector<int> labels;
};

namespace {

thread_local std::string g_last_error;

cec_status to_status(cec::ErrorKind kind) {
  using cec::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidMatrix: return CEC_ERR_INVALID_MATRIX;
    case ErrorKind::DimensionMismatch: return CEC_ERR_DIMENSION_MISMATCH;
    case ErrorKind::EmptyCluster: return CEC_ERR_EMPTY_CLUSTER;
    case ErrorKind::DegenerateCluster: return CEC_ERR_DEGENERATE_CLUSTER;
    case ErrorKind::InvalidSpectrum: return CEC_ERR_INVALID_SPECTRUM;
    case ErrorKind::EmptyInput: return CEC_ERR_EMPTY_INPUT;
    case ErrorKind::ConstantImage: return CEC_ERR_CONSTANT_IMAGE;
    case ErrorKind::ConfigError: return CEC_ERR_CONFIG;
    case ErrorKind::IoError: return CEC_ERR_IO;
    case ErrorKind::UnsupportedDimensionForSvg: return CEC_ERR_UNSUPPORTED_DIMENSION;
  }
  return CEC_ERR_INTERNAL;
}

cec_status fail(cec_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
cec_status guarded(F&& body) {
  try {
    body();
    return CEC_OK;
  } catch (const cec::Error& e) {
    return fail(to_status(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CEC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CEC_ERR_INTERNAL, "unknown error");
  }
}

#define CEC_REQUIRE(cond)                                                  \
  do {                                                                     \
    if (!(cond)) return fail(CEC_ERR_INVALID_ARGUMENT, "invalid argument: " #cond); \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

CEC_API const char* cec_version(void) { return "1.0.0"; }

CEC_API const char* cec_status_kind(cec_status status) {
  switch (status) {
    case CEC_OK: return "Ok";
    case CEC_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case CEC_ERR_CONFIG: return "ConfigError";
    case CEC_ERR_IO: return "IoError";
    case CEC_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case CEC_ERR_INVALID_MATRIX: return "InvalidMatrix";
    case CEC_ERR_INVALID_SPECTRUM: return "InvalidSpectrum";
    case CEC_ERR_EMPTY_CLUSTER: return "EmptyCluster";
    case CEC_ERR_DEGENERATE_CLUSTER: return "DegenerateCluster";
    case CEC_ERR_EMPTY_INPUT: return "EmptyInput";
    case CEC_ERR_CONSTANT_IMAGE: return "ConstantImage";
    case CEC_ERR_UNSUPPORTED_DIMENSION: return "UnsupportedDimensionForSvg";
    case CEC_ERR_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

CEC_API const char* cec_last_error(void) { return g_last_error.c_str(); }

CEC_API void cec_string_free(char* s) { delete[] s; }

// ---- points ---------------------------------------------------------------

CEC_API cec_status cec_points_create(size_t dim, const double* coords, size_t count, cec_points* out) {
  CEC_REQUIRE(out);
  *out = nullptr;
  CEC_REQUIRE(dim > 0);
  CEC_REQUIRE(coords || count == 0);
  for (std::size_t i = 0; i < dim * count; ++i) {
    if (!std::isfinite(coords[i])) return fail(CEC_ERR_INVALID_ARGUMENT, "coordinate " + std::to_string(i) + " is not finite");
  }
  return guarded([&] {
    *out = new cec_points_t{cec::PointCloud(dim, std::vector<double>(coords, coords + dim * count))};
  });
}

CEC_API cec_status cec_points_load_csv(const char* path, cec_points* out) {
  CEC_REQUIRE(path && out);
  return guarded([&] { *out = new cec_points_t{cec::load_csv_points(path)}; });
}

CEC_API cec_status cec_points_save_csv(cec_points points, const char* path) {
  CEC_REQUIRE(points && path);
  return guarded([&] { cec::save_csv_points(points->cloud, path); });
}

CEC_API size_t cec_points_count(cec_points points) { return points ? points->cloud.size() : 0; }
CEC_API size_t cec_points_dim(cec_points points) { return points ? points->cloud.dim() : 0; }
CEC_API const double* cec_points_data(cec_points points) {
  return points ? points->cloud.coords().data() : nullptr;
}
CEC_API void cec_points_destroy(cec_points points) { delete points; }

// ---- images ---------------------------------------------------------------

CEC_API cec_status cec_image_load(const char* path, cec_image* out) {
  CEC_REQUIRE(path && out);
  return guarded([&] { *out = new cec_image_t{cec::load_image(path)}; });
}

CEC_API cec_status cec_image_create(size_t width, size_t height, const uint8_t* pixels, cec_image* out) {
  CEC_REQUIRE(out);
  CEC_REQUIRE(pixels || width * height == 0);
  return guarded([&] {
    *out = new cec_image_t{
        cec::GrayImage{width, height, std::vector<std::uint8_t>(pixels, pixels + width * height)}};
  });
}

CEC_API size_t cec_image_width(cec_image image) { return image ? image->image.width : 0; }
CEC_API size_t cec_image_height(cec_image image) { return image ? image->image.height : 0; }
CEC_API void cec_image_destroy(cec_image image) { delete image; }

CEC_API cec_status cec_image_binarize(cec_image image, cec_threshold_method method, int fixed_threshold,
                                      cec_polarity polarity, int despeckle, cec_mask* out) {
  CEC_REQUIRE(image && out);
  CEC_REQUIRE(method == CEC_THRESHOLD_OTSU || method == CEC_THRESHOLD_FIXED);
  CEC_REQUIRE(polarity == CEC_POLARITY_DARK || polarity == CEC_POLARITY_BRIGHT);
  return guarded([&] {
    const cec::Threshold t =
        method == CEC_THRESHOLD_OTSU ? cec::Threshold::otsu() : cec::Threshold::fixed(fixed_threshold);
    cec::BinaryMask mask = cec::binarize(
        image->image, t, polarity == CEC_POLARITY_DARK ? cec::Polarity::Dark : cec::Polarity::Bright);
    if (despeckle) mask = cec::despeckle(mask);
    *out = new cec_mask_t{std::move(mask)};
  });
}

CEC_API size_t cec_mask_width(cec_mask mask) { return mask ? mask->mask.width : 0; }
CEC_API size_t cec_mask_height(cec_mask mask) { return mask ? mask->mask.height : 0; }
CEC_API size_t cec_mask_foreground_count(cec_mask mask) { return mask ? mask->mask.foreground_count() : 0; }
CEC_API int cec_mask_threshold(cec_mask mask) { return mask ? mask->mask.threshold : -1; }

CEC_API cec_status cec_mask_to_points(cec_mask mask, cec_points* out) {
  CEC_REQUIRE(mask && out);
  return guarded([&] { *out = new cec_points_t{cec::mask_to_points(mask->mask)}; });
}

CEC_API void cec_mask_destroy(cec_mask mask) { delete mask; }

// ---- configuration --------------------------------------------------------

CEC_API cec_status cec_config_create(cec_config* out) {
  CEC_REQUIRE(out);
  return guarded([&] { *out = new cec_config_t{}; });
}

CEC_API void cec_config_destroy(cec_config config) { delete config; }

CEC_API cec_status cec_config_add_family(cec_config config, const char* spec, size_t initial_clusters) {
  CEC_REQUIRE(config && spec);
  if (initial_clusters == 0) return fail(CEC_ERR_CONFIG, "'0': cluster count must be at least 1");
  return guarded([&] {
    cec::ParsedFamily parsed = cec::parse_family_spec(spec);
    config->engine.family_pool.push_back({std::move(parsed.spec), initial_clusters});
    config->family_texts.push_back(parsed.text);
    config->warnings.insert(config->warnings.end(), parsed.warnings.begin(), parsed.warnings.end());
  });
}

CEC_API cec_status cec_config_add_pool_entry(cec_config config, const char* entry) {
  CEC_REQUIRE(config && entry);
  return guarded([&] {
    cec::ParsedPoolEntry parsed = cec::parse_pool_entry(entry);
    config->engine.family_pool.push_back({std::move(parsed.family.spec), parsed.count});
    config->family_texts.push_back(parsed.family.text);
    config->warnings.insert(config->warnings.end(), parsed.family.warnings.begin(),
                            parsed.family.warnings.end());
  });
}

CEC_API size_t cec_config_family_count(cec_config config) {
  return config ? config->engine.family_pool.size() : 0;
}
CEC_API size_t cec_config_warning_count(cec_config config) { return config ? config->warnings.size() : 0; }
CEC_API const char* cec_config_warning(cec_config config, size_t index) {
  return config && index < config->warnings.size() ? config->warnings[index].c_str() : nullptr;
}

CEC_API cec_status cec_config_set_min_weight(cec_config config, double min_weight) {
  CEC_REQUIRE(config);
  if (!(min_weight > 0.0 && min_weight < 1.0)) return fail(CEC_ERR_CONFIG, "min-weight must lie in (0, 1)");
  config->engine.min_weight = min_weight;
  return CEC_OK;
}

CEC_API cec_status cec_config_set_removal(cec_config config, cec_removal removal) {
  CEC_REQUIRE(config);
  switch (removal) {
    case CEC_REMOVAL_ONLINE: config->engine.removal = cec::Removal::Online; return CEC_OK;
    case CEC_REMOVAL_SWEEP: config->engine.removal = cec::Removal::AfterSweep; return CEC_OK;
  }
  return fail(CEC_ERR_CONFIG, "unknown removal mode");
}

CEC_API cec_status cec_config_set_max_sweeps(cec_config config, int max_sweeps) {
  CEC_REQUIRE(config);
  if (max_sweeps < 0) return fail(CEC_ERR_CONFIG, "max-sweeps must be nonnegative");
  config->engine.max_sweeps = max_sweeps;
  return CEC_OK;
}

CEC_API cec_status cec_config_set_restarts(cec_config config, int restarts) {
  CEC_REQUIRE(config);
  if (restarts < 1) return fail(CEC_ERR_CONFIG, "restarts must be at least 1");
  config->engine.restarts = restarts;
  return CEC_OK;
}

CEC_API cec_status cec_config_set_seed(cec_config config, uint64_t seed) {
  CEC_REQUIRE(config);
  config->engine.seed = seed;
  return CEC_OK;
}

CEC_API cec_status cec_config_set_epsilon(cec_config config, double epsilon) {
  CEC_REQUIRE(config);
  if (!(epsilon >= 0.0) || epsilon > 1e300) return fail(CEC_ERR_CONFIG, "epsilon must be finite and nonnegative");
  config->engine.epsilon = epsilon;
  return CEC_OK;
}

CEC_API cec_status cec_config_set_min_cluster_size(cec_config config, size_t min_cluster_size) {
  CEC_REQUIRE(config);
  if (min_cluster_size == 0) {
    config->engine.min_cluster_size.reset();
  } else {
    config->engine.min_cluster_size = min_cluster_size;
  }
  return CEC_OK;
}

// ---- clustering -----------------------------------------------------------

CEC_API cec_status cec_run(cec_points points, cec_config config, cec_result* out) {
  CEC_REQUIRE(points && config && out);
  return guarded([&] {
    const auto start = std::chrono::steady_clock::now();
    auto* r = new cec_result_t{cec::run(points->cloud, config->engine), points->cloud.dim(), 0.0};
    r->elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    *out = r;
  });
}

CEC_API size_t cec_result_cluster_count(cec_result result) { return result ? result->result.clusters.size() : 0; }
CEC_API size_t cec_result_dim(cec_result result) { return result ? result->dim : 0; }
CEC_API double cec_result_energy(cec_result result) { return result ? result->result.final_energy : 0.0; }
CEC_API int cec_result_sweeps(cec_result result) { return result ? result->result.sweeps_used : 0; }
CEC_API int cec_result_best_restart(cec_result result) { return result ? result->result.best_restart : 0; }
CEC_API double cec_result_elapsed_ms(cec_result result) { return result ? result->elapsed_ms : 0.0; }
CEC_API const int* cec_result_labels(cec_result result) {
  return result ? result->result.labels.data() : nullptr;
}
CEC_API size_t cec_result_label_count(cec_result result) { return result ? result->result.labels.size() : 0; }

CEC_API cec_status cec_result_cluster(cec_result result, size_t index, double* weight, double* mean,
                                      double* covariance) {
  CEC_REQUIRE(result);
  if (index >= result->result.clusters.size()) return fail(CEC_ERR_INVALID_ARGUMENT, "cluster index out of range");
  const auto& c = result->result.clusters[index];
  if (weight) *weight = c.weight;
  if (mean) std::copy(c.gaussian.mean.begin(), c.gaussian.mean.end(), mean);
  if (covariance) {
    const auto rm = c.gaussian.covariance.row_major();
    std::copy(rm.begin(), rm.end(), covariance);
  }
  return CEC_OK;
}

CEC_API size_t cec_result_warning_count(cec_result result) { return result ? result->result.warnings.size() : 0; }
CEC_API const char* cec_result_warning(cec_result result, size_t index) {
  return result && index < result->result.warnings.size() ? result->result.warnings[index].c_str() : nullptr;
}
CEC_API void cec_result_destroy(cec_result result) { delete result; }

// ---- reports --------------------------------------------------------------

CEC_API cec_status cec_report_create(cec_result result, cec_config config, cec_points points,
                                     const cec_input_info* info, int include_timing, cec_report* out) {
  CEC_REQUIRE(result && config && out);
  return guarded([&] {
    cec::InputDescriptor in;
    in.dim = result->dim;
    in.points = result->result.labels.size();
    in.kind = "memory";
    if (points) in.dim = points->cloud.dim();
    if (info) {
      if (info->path) in.path = info->path;
      if (info->kind) in.kind = info->kind;
      if (info->threshold) in.threshold = info->threshold;
      if (info->polarity) in.polarity = info->polarity;
      if (info->mask) {
        in.width = info->mask->mask.width;
        in.height = info->mask->mask.height;
        in.threshold_applied = info->mask->mask.threshold;
      }
    }
    auto* rep = new cec_report_t{cec::make_report(result->result, config->engine, config->family_texts, in),
                                 result->result.labels};
    if (include_timing) rep->report.timing_ms = result->elapsed_ms;
    auto& w = rep->report.warnings;
    w.insert(w.begin(), config->warnings.begin(), config->warnings.end());
    *out = rep;
  });
}

CEC_API cec_status cec_report_json(cec_report report, char** out) {
  CEC_REQUIRE(report && out);
  return guarded([&] { *out = dup_string(cec::report_to_json(report->report)); });
}

CEC_API cec_status cec_report_svg(cec_report report, cec_points points, cec_mask mask, char** out) {
  CEC_REQUIRE(report && out);
  return guarded([&] {
    cec::SvgOptions opt;
    if (points) {
      opt.points = &points->cloud;
      opt.labels = report->labels;
    }
    if (mask) opt.mask = &mask->mask;
    *out = dup_string(cec::render_svg(report->report, opt));
  });
}

CEC_API void cec_report_destroy(cec_report report) { delete report; }

}  // extern "C"

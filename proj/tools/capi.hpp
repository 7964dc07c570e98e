// RAII helpers over the C interface, shared by the CLI sources.
#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>

#include "fecseg/fecseg.h"

namespace fecseg_cli {

struct CloudDeleter {
  void operator()(fecseg_cloud* c) const { fecseg_cloud_destroy(c); }
};
struct LabelsDeleter {
  void operator()(fecseg_labels* l) const { fecseg_labels_destroy(l); }
};

using Cloud = std::unique_ptr<fecseg_cloud, CloudDeleter>;
using Labels = std::unique_ptr<fecseg_labels, LabelsDeleter>;

class ApiError : public std::runtime_error {
 public:
  ApiError(fecseg_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  [[nodiscard]] fecseg_status status() const noexcept { return status_; }

 private:
  fecseg_status status_;
};

inline void check(fecseg_status status) {
  if (status == FECSEG_OK) return;
  std::string msg = fecseg_last_error();
  if (msg.empty()) msg = fecseg_status_string(status);
  throw ApiError(status, msg);
}

inline std::span<const uint32_t> view(const Labels& labels) {
  return {fecseg_labels_data(labels.get()), fecseg_labels_size(labels.get())};
}

inline Cloud read_cloud(const std::string& path, fecseg_format format) {
  fecseg_cloud* raw = nullptr;
  check(fecseg_cloud_read(path.c_str(), format, &raw));
  return Cloud(raw);
}

inline Labels read_labels(const std::string& path) {
  fecseg_labels* raw = nullptr;
  check(fecseg_labels_read(path.c_str(), &raw));
  return Labels(raw);
}

inline fecseg_format parse_format(const std::string& name) {
  fecseg_format f = FECSEG_FORMAT_AUTO;
  check(fecseg_format_from_name(name.c_str(), &f));
  return f;
}

}  // namespace fecseg_cli

#include "fecseg/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fecseg/error.hpp"

namespace fecseg {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

template <typename T>
std::optional<T> parse_uint(std::string_view s) {
  s = trim(s);
  T v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void add_point(PointCloud& cloud, double x, double y, double z,
               std::optional<float> intensity) {
  const Point3 p{x, y, z, intensity};
  if (!p.finite()) {
    throw NonFiniteError(cloud.size(), "non-finite coordinate in record " +
                                           std::to_string(cloud.size()));
  }
  cloud.push_back(p);
}

// --- kitti_bin -------------------------------------------------------------

float load_le_float(const unsigned char* bytes) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, bytes, 4);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  return std::bit_cast<float>(bits);
}

void store_le_float(float v, std::ostream& out) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  char bytes[4];
  std::memcpy(bytes, &bits, 4);
  out.write(bytes, 4);
}

PointCloud read_kitti(std::istream& in) {
  const std::vector<char> data((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
  constexpr std::size_t kRecord = 16;
  if (data.size() % kRecord != 0) {
    const auto offset = data.size() - data.size() % kRecord;
    throw FormatError("kitti_bin: truncated record at byte offset " +
                      std::to_string(offset) + " (file size " +
                      std::to_string(data.size()) +
                      " is not a multiple of 16)");
  }
  PointCloud cloud;
  cloud.reserve(data.size() / kRecord);
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t off = 0; off < data.size(); off += kRecord) {
    add_point(cloud, load_le_float(bytes + off), load_le_float(bytes + off + 4),
              load_le_float(bytes + off + 8), load_le_float(bytes + off + 12));
  }
  return cloud;
}

void write_kitti(const PointCloud& cloud, std::ostream& out) {
  for (const auto& p : cloud) {
    store_le_float(static_cast<float>(p.x), out);
    store_le_float(static_cast<float>(p.y), out);
    store_le_float(static_cast<float>(p.z), out);
    store_le_float(p.intensity.value_or(0.0f), out);
  }
}

// --- ply_ascii -------------------------------------------------------------

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
  bool has_list = false;
};

PointCloud read_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("ply: line " + std::to_string(line_no) + ": " + what);
  };

  if (!next_line() || trim(line) != "ply") throw fail("missing 'ply' magic");
  std::vector<PlyElement> elements;
  bool ascii = false;
  while (true) {
    if (!next_line()) throw fail("unexpected end of header");
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") {
        throw fail("only 'format ascii' is supported");
      }
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw fail("malformed element line");
      const auto count = parse_uint<std::size_t>(tok[2]);
      if (!count) throw fail("bad element count");
      elements.push_back({std::string(tok[1]), *count, {}, false});
    } else if (tok[0] == "property") {
      if (elements.empty() || tok.size() < 3) throw fail("stray property line");
      if (tok[1] == "list") {
        elements.back().has_list = true;
        elements.back().properties.emplace_back(tok.back());
      } else {
        elements.back().properties.emplace_back(tok[2]);
      }
    } else {
      throw fail("unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!ascii) throw fail("missing format line");

  PointCloud cloud;
  for (const auto& el : elements) {
    if (el.name != "vertex") {
      for (std::size_t i = 0; i < el.count; ++i) {
        if (!next_line()) throw fail("unexpected end of data");
      }
      continue;
    }
    if (el.has_list) throw fail("list properties on vertex are not supported");
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
      const auto it = std::find(el.properties.begin(), el.properties.end(), name);
      if (it == el.properties.end()) return std::nullopt;
      return static_cast<std::size_t>(it - el.properties.begin());
    };
    const auto cx = column("x");
    const auto cy = column("y");
    const auto cz = column("z");
    const auto ci = column("intensity");
    if (!cx || !cy || !cz) throw fail("vertex element lacks x, y or z");

    cloud.reserve(el.count);
    for (std::size_t i = 0; i < el.count; ++i) {
      if (!next_line()) throw fail("unexpected end of vertex data");
      const auto tok = split_ws(line);
      if (tok.size() < el.properties.size()) throw fail("too few vertex values");
      const auto x = parse_double(tok[*cx]);
      const auto y = parse_double(tok[*cy]);
      const auto z = parse_double(tok[*cz]);
      if (!x || !y || !z) throw fail("non-numeric coordinate");
      std::optional<float> intensity;
      if (ci) {
        const auto v = parse_double(tok[*ci]);
        if (!v) throw fail("non-numeric intensity");
        intensity = static_cast<float>(*v);
      }
      add_point(cloud, *x, *y, *z, intensity);
    }
    return cloud;
  }
  throw fail("no vertex element");
}

void write_ply_header(std::ostream& out, std::size_t n, bool intensity,
                      bool color) {
  out << "ply\nformat ascii 1.0\nelement vertex " << n
      << "\nproperty double x\nproperty double y\nproperty double z\n";
  if (intensity) out << "property float intensity\n";
  if (color) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "end_header\n";
}

bool all_have_intensity(const PointCloud& cloud) {
  return !cloud.empty() && std::all_of(cloud.begin(), cloud.end(), [](const Point3& p) {
    return p.intensity.has_value();
  });
}

void write_ply(const PointCloud& cloud, std::ostream& out) {
  const bool intensity = all_have_intensity(cloud);
  write_ply_header(out, cloud.size(), intensity, false);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : cloud) {
    out << p.x << ' ' << p.y << ' ' << p.z;
    if (intensity) {
      out << ' ' << std::setprecision(std::numeric_limits<float>::max_digits10)
          << *p.intensity << std::setprecision(std::numeric_limits<double>::max_digits10);
    }
    out << '\n';
  }
}

// --- csv_xyz ---------------------------------------------------------------

PointCloud read_csv(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    const bool was_first = first;
    first = false;
    if (was_first && !parse_double(fields[0])) continue;  // header row
    if (fields.size() < 3) {
      throw FormatError("csv: line " + std::to_string(line_no) +
                        ": expected at least 3 columns");
    }
    std::array<double, 4> v{};
    const std::size_t cols = std::min<std::size_t>(fields.size(), 4);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto parsed = parse_double(fields[c]);
      if (!parsed) {
        throw FormatError("csv: line " + std::to_string(line_no) +
                          ": non-numeric value '" + std::string(trim(fields[c])) +
                          "'");
      }
      v[c] = *parsed;
    }
    std::optional<float> intensity;
    if (cols == 4) intensity = static_cast<float>(v[3]);
    add_point(cloud, v[0], v[1], v[2], intensity);
  }
  return cloud;
}

void write_csv(const PointCloud& cloud, std::ostream& out) {
  const bool intensity = all_have_intensity(cloud);
  out << (intensity ? "x,y,z,intensity\n" : "x,y,z\n");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : cloud) {
    out << p.x << ',' << p.y << ',' << p.z;
    if (intensity) out << ',' << *p.intensity;
    out << '\n';
  }
}

std::ios::openmode mode_for(CloudFormat f) {
  return f == CloudFormat::kKittiBin ? std::ios::binary : std::ios::openmode{};
}

}  // namespace

CloudFormat detect_format(const fs::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".bin") return CloudFormat::kKittiBin;
  if (ext == ".ply") return CloudFormat::kPlyAscii;
  if (ext == ".csv" || ext == ".txt" || ext == ".xyz") return CloudFormat::kCsvXyz;
  throw FormatError("cannot infer point cloud format from '" + path.string() +
                    "'; pass the format explicitly");
}

std::optional<CloudFormat> parse_format_name(std::string_view name) {
  if (name == "kitti_bin" || name == "kitti" || name == "bin") {
    return CloudFormat::kKittiBin;
  }
  if (name == "ply_ascii" || name == "ply") return CloudFormat::kPlyAscii;
  if (name == "csv_xyz" || name == "csv") return CloudFormat::kCsvXyz;
  return std::nullopt;
}

std::string_view format_name(CloudFormat format) {
  switch (format) {
    case CloudFormat::kKittiBin: return "kitti_bin";
    case CloudFormat::kPlyAscii: return "ply_ascii";
    case CloudFormat::kCsvXyz: return "csv_xyz";
  }
  return "unknown";
}

PointCloud read_cloud(std::istream& in, CloudFormat format) {
  switch (format) {
    case CloudFormat::kKittiBin: return read_kitti(in);
    case CloudFormat::kPlyAscii: return read_ply(in);
    case CloudFormat::kCsvXyz: return read_csv(in);
  }
  throw FormatError("unknown format");
}

PointCloud read_cloud(const fs::path& path, std::optional<CloudFormat> format) {
  const auto f = format ? *format : detect_format(path);
  auto in = open_in(path, mode_for(f));
  try {
    return read_cloud(in, f);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_cloud(const PointCloud& cloud, std::ostream& out, CloudFormat format) {
  switch (format) {
    case CloudFormat::kKittiBin: write_kitti(cloud, out); return;
    case CloudFormat::kPlyAscii: write_ply(cloud, out); return;
    case CloudFormat::kCsvXyz: write_csv(cloud, out); return;
  }
}

void write_cloud(const PointCloud& cloud, const fs::path& path,
                 std::optional<CloudFormat> format) {
  const auto f = format ? *format : detect_format(path);
  auto out = open_out(path, mode_for(f));
  write_cloud(cloud, out, f);
  finish(out, path);
}

void write_labels(std::span<const Label> labels, std::ostream& out) {
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << labels[i] << '\n';
  }
}

void write_labels(std::span<const Label> labels, const fs::path& path) {
  auto out = open_out(path);
  write_labels(labels, out);
  finish(out, path);
}

LabelMap read_labels(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return FormatError("labels: line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line) != "index,label") throw fail("expected header 'index,label'");

  LabelMap labels;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    if (fields.size() != 2) throw fail("expected 2 columns");
    const auto index = parse_uint<std::size_t>(fields[0]);
    const auto label = parse_uint<Label>(fields[1]);
    if (!index || !label) throw fail("non-integer field");
    if (*index != labels.size()) throw fail("indices must be 0, 1, 2, ...");
    labels.push_back(*label);
  }
  return labels;
}

LabelMap read_labels(const fs::path& path) {
  auto in = open_in(path);
  try {
    return read_labels(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::array<std::uint8_t, 3> label_color(Label label) {
  static const auto palette = [] {
    std::array<std::array<std::uint8_t, 3>, 256> p{};
    for (std::size_t i = 0; i < p.size(); ++i) {
      // Golden-ratio hue walk; saturation and value alternate so that
      // neighboring ids differ in more than hue.
      const double h = std::fmod(static_cast<double>(i) * 0.618033988749895, 1.0) * 6.0;
      const double s = (i % 2 == 0) ? 0.85 : 0.6;
      const double v = (i % 3 == 0) ? 0.95 : 0.8;
      const double c = v * s;
      const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
      const double m = v - c;
      double r = 0, g = 0, b = 0;
      switch (static_cast<int>(h)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
      }
      p[i] = {static_cast<std::uint8_t>(std::lround((r + m) * 255.0)),
              static_cast<std::uint8_t>(std::lround((g + m) * 255.0)),
              static_cast<std::uint8_t>(std::lround((b + m) * 255.0))};
    }
    return p;
  }();
  if (label == 0) return {128, 128, 128};
  return palette[label % 256];
}

void write_colored_ply(const PointCloud& cloud, std::span<const Label> labels,
                       std::ostream& out) {
  if (cloud.size() != labels.size()) {
    throw LengthMismatchError(cloud.size(), labels.size());
  }
  write_ply_header(out, cloud.size(), false, true);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud[i];
    const auto rgb = label_color(labels[i]);
    out << p.x << ' ' << p.y << ' ' << p.z << ' ' << int{rgb[0]} << ' '
        << int{rgb[1]} << ' ' << int{rgb[2]} << '\n';
  }
}

void write_colored_ply(const PointCloud& cloud, std::span<const Label> labels,
                       const fs::path& path) {
  if (cloud.size() != labels.size()) {
    throw LengthMismatchError(cloud.size(), labels.size());
  }
  auto out = open_out(path);
  write_colored_ply(cloud, labels, out);
  finish(out, path);
}

}  // namespace fecseg

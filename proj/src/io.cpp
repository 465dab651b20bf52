#include "viewgp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "viewgp/error.hpp"

namespace viewgp::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

// Line-numbered CSV reader: header check plus typed field access.
class CsvReader {
 public:
  CsvReader(const fs::path& path) : path_(path), in_(open_in(path)) {}

  std::vector<std::string> header() {
    std::string line;
    if (!std::getline(in_, line)) fail(1, "missing header");
    line_no_ = 1;
    auto fields = split_fields(strip(line));
    for (auto& f : fields) f = strip(f);
    return fields;
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      line = strip(line);
      if (line.empty()) continue;
      fields = split_fields(line);
      for (auto& f : fields) f = strip(f);
      return true;
    }
    return false;
  }

  double number(const std::string& field) const {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
      fail(line_no_, "bad number '" + field + "'");
    return v;
  }

  int integer(const std::string& field) const {
    int v = 0;
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end) fail(line_no_, "bad integer '" + field + "'");
    return v;
  }

  void expect_columns(const std::vector<std::string>& fields, std::size_t n) const {
    if (fields.size() != n)
      fail(line_no_, "expected " + std::to_string(n) + " fields, found " + std::to_string(fields.size()));
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw_invalid(path_.string() + ": line " + std::to_string(line) + ": " + what);
  }

  std::size_t line() const { return line_no_; }

 private:
  fs::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

void expect_header(CsvReader& csv, const std::vector<std::string>& want) {
  if (csv.header() != want) {
    std::string joined;
    for (const auto& w : want) joined += (joined.empty() ? "" : ",") + w;
    csv.fail(1, "expected header " + joined);
  }
}

std::vector<std::string> code_header(Eigen::Index d) {
  std::vector<std::string> h{"frame"};
  for (Eigen::Index j = 0; j < d; ++j) h.push_back("c" + std::to_string(j));
  return h;
}

KernelSpec default_kernel(const std::string& family) {
  if (family == "translation") return TranslationParams{};
  if (family == "periodic1d") return Periodic1DParams{};
  if (family == "separable_euler") return SeparableEulerParams{};
  if (family == "quaternion") return QuaternionParams{};
  if (family == "geodesic") return GeodesicParams{};
  if (family == "view_iso") return ViewIsoParams{};
  if (family == "view_aniso") return ViewAnisoParams{};
  if (family == "pose_product") return PoseProductParams{};
  if (family == "object_view") return ObjectViewParams{};
  if (family == "linear_extrinsics") return LinearExtrinsicsParams{};
  throw_invalid("unknown kernel family '" + family + "'");
}

OrientationSpec default_orientation(const std::string& family) {
  const KernelSpec k = default_kernel(family);
  return std::visit(
      [&](const auto& h) -> OrientationSpec {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_constructible_v<OrientationSpec, T>) {
          return h;
        } else {
          throw_invalid("'" + family + "' is not an orientation family");
        }
      },
      k);
}

int* periodic_axis(KernelSpec& spec) {
  if (auto* h = std::get_if<Periodic1DParams>(&spec)) return &h->axis;
  if (auto* p = std::get_if<PoseProductParams>(&spec))
    if (auto* h = std::get_if<Periodic1DParams>(&p->orientation)) return &h->axis;
  return nullptr;
}

std::string axis_key(const KernelSpec& spec) {
  return std::holds_alternative<PoseProductParams>(spec) ? "orientation.axis" : "axis";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_poses_csv(const fs::path& path, std::span<const Pose> poses) {
  auto out = open_out(path);
  out << "frame,px,py,pz,qw,qx,qy,qz\n";
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto q = matrix_to_quat(poses[i].R);
    out << i;
    for (double v : {poses[i].p.x(), poses[i].p.y(), poses[i].p.z(), q.w(), q.x(), q.y(), q.z()})
      out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

std::vector<Pose> read_poses_csv(const fs::path& path) {
  CsvReader csv(path);
  expect_header(csv, {"frame", "px", "py", "pz", "qw", "qx", "qy", "qz"});
  std::vector<Pose> poses;
  std::vector<std::string> f;
  while (csv.next(f)) {
    csv.expect_columns(f, 8);
    if (csv.integer(f[0]) != static_cast<int>(poses.size()))
      csv.fail(csv.line(), "frames must be numbered 0, 1, 2, ... in order");
    double v[7];
    for (int k = 0; k < 7; ++k) v[k] = csv.number(f[static_cast<std::size_t>(k) + 1]);
    Pose pose;
    pose.p = {v[0], v[1], v[2]};
    try {
      pose.R = quat_to_matrix(UnitQuaternion(v[3], v[4], v[5], v[6]));
    } catch (const Error& e) {
      csv.fail(csv.line(), e.what());
    }
    poses.push_back(pose);
  }
  return poses;
}

void write_tracks_csv(const fs::path& path, const TrackDataset& data) {
  auto out = open_out(path);
  out << "track,frame,u,v,split\n";
  for (const auto& t : data.tracks)
    for (const auto& p : t.points)
      out << t.id << ',' << p.frame << ',' << format_double(p.u) << ',' << format_double(p.v) << ','
          << (p.test ? "test" : "train") << '\n';
  finish(out, path);
}

TrackDataset read_tracks_csv(const fs::path& path, std::span<const Pose> poses) {
  CsvReader csv(path);
  expect_header(csv, {"track", "frame", "u", "v", "split"});
  TrackDataset data;
  std::vector<std::string> f;
  std::map<int, std::size_t> index;
  while (csv.next(f)) {
    csv.expect_columns(f, 5);
    const int id = csv.integer(f[0]);
    const int frame = csv.integer(f[1]);
    if (frame < 0 || static_cast<std::size_t>(frame) >= poses.size())
      csv.fail(csv.line(), "frame " + std::to_string(frame) + " has no pose");
    TrackPoint p;
    p.frame = frame;
    p.pose = poses[static_cast<std::size_t>(frame)];
    p.u = csv.number(f[2]);
    p.v = csv.number(f[3]);
    if (f[4] == "test")
      p.test = true;
    else if (f[4] != "train")
      csv.fail(csv.line(), "split must be train or test");
    auto [it, inserted] = index.try_emplace(id, data.tracks.size());
    if (inserted) {
      Track t;
      t.id = id;
      data.tracks.push_back(std::move(t));
    }
    data.tracks[it->second].points.push_back(p);
  }
  return data;
}

void write_codes_csv(const fs::path& path, const Eigen::MatrixXd& codes) {
  auto out = open_out(path);
  const auto header = code_header(codes.cols());
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < codes.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < codes.cols(); ++j) out << ',' << format_double(codes(i, j));
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd read_codes_csv(const fs::path& path) {
  CsvReader csv(path);
  const auto header = csv.header();
  if (header.size() < 2 || header != code_header(static_cast<Eigen::Index>(header.size()) - 1))
    csv.fail(1, "expected header frame,c0,...,c{d-1}");
  const auto d = header.size() - 1;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> f;
  while (csv.next(f)) {
    csv.expect_columns(f, d + 1);
    if (csv.integer(f[0]) != static_cast<int>(rows.size()))
      csv.fail(csv.line(), "frames must be numbered 0, 1, 2, ... in order");
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = csv.number(f[j + 1]);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  finish(out, path);
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& field : split_fields(line)) {
      double v = 0.0;
      const auto s = strip(field);
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw_invalid(path.string() + ": line " + std::to_string(line_no) + ": bad number '" + s + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw_invalid(path.string() + ": line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  const auto cols = rows.empty() ? 0 : rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_pgm(const fs::path& path, const Eigen::MatrixXd& m) {
  const double lo = m.size() ? m.minCoeff() : 0.0;
  const double hi = m.size() ? m.maxCoeff() : 0.0;
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double t = hi > lo ? (m(i, j) - lo) / (hi - lo) : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)))));
    }
  finish(out, path);

  json side = {{"image", path.filename().string()}, {"rows", m.rows()}, {"cols", m.cols()},
               {"min", lo},  {"max", hi}};
  fs::path sidecar = path;
  sidecar.replace_extension(".json");
  write_text(sidecar, side.dump(2) + "\n");
}

KernelSpec kernel_from_json(const json& doc) {
  if (!doc.is_object()) throw_invalid("kernel document must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "family" && key != "params" && key != "orientation")
      throw_invalid("unknown kernel field '" + key + "'");
  if (!doc.contains("family") || !doc["family"].is_string()) throw_invalid("kernel document needs a string 'family'");
  const std::string family = doc["family"].get<std::string>();
  KernelSpec spec = default_kernel(family);

  if (doc.contains("orientation")) {
    auto* product = std::get_if<PoseProductParams>(&spec);
    if (!product) throw_invalid("'orientation' only applies to pose_product");
    if (!doc["orientation"].is_string()) throw_invalid("'orientation' must name an orientation family");
    product->orientation = default_orientation(doc["orientation"].get<std::string>());
  }

  if (doc.contains("params")) {
    const auto& params = doc["params"];
    if (!params.is_object()) throw_invalid("'params' must be an object");
    for (const auto& [name, value] : params.items()) {
      if (name == axis_key(spec)) {
        int* axis = periodic_axis(spec);
        if (!axis || !value.is_number_integer()) throw_invalid("'" + name + "' must be an integer 0, 1 or 2");
        *axis = value.get<int>();
        continue;
      }
      if (!value.is_number()) throw_invalid("kernel parameter '" + name + "' must be a number");
      spec = with_parameter(std::move(spec), name, value.get<double>());
    }
  }
  validate(spec);
  return spec;
}

json kernel_to_json(const KernelSpec& spec) {
  json doc;
  doc["family"] = family_name(spec);
  if (const auto* p = std::get_if<PoseProductParams>(&spec)) doc["orientation"] = family_name(p->orientation);
  json params = json::object();
  for (const auto& [name, value] : kernel_parameters(spec)) params[name] = value;
  KernelSpec copy = spec;
  if (const int* axis = periodic_axis(copy)) params[axis_key(spec)] = *axis;
  doc["params"] = params;
  return doc;
}

json load_json_argument(const std::string& text_or_path) {
  const auto first = text_or_path.find_first_not_of(" \t\r\n");
  const bool inline_doc = first != std::string::npos && (text_or_path[first] == '{' || text_or_path[first] == '[');
  const std::string text = inline_doc ? text_or_path : read_text(text_or_path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw_invalid(std::string("invalid JSON: ") + e.what());
  }
}

json report_to_json(const ExperimentReport& report) {
  json doc;
  doc["hyperparameters"] = hyper_mode_name(report.hyper);
  doc["initial_noise_variance"] = report.initial_noise_variance;
  doc["seed"] = report.seed;
  doc["tracks_used"] = report.tracks_used;
  doc["tracks_skipped"] = report.tracks_skipped;
  json rows = json::array();
  for (const auto& k : report.kernels) {
    rows.push_back({{"name", k.name},
                    {"kernel", kernel_to_json(k.kernel)},
                    {"noise_variance", k.noise_variance},
                    {"rmse", k.rmse},
                    {"nlpd", k.nlpd},
                    {"min_gram_eigenvalue", k.min_eigenvalue},
                    {"log_marginal_likelihood", k.log_marginal_likelihood},
                    {"test_values", k.test_values}});
  }
  doc["kernels"] = rows;
  return doc;
}

std::string report_to_text(const ExperimentReport& report) {
  std::size_t width = 6;
  for (const auto& k : report.kernels) width = std::max(width, k.name.size());
  std::ostringstream out;
  out << "tracks used: " << report.tracks_used << ", skipped: " << report.tracks_skipped
      << ", hyperparameters: " << hyper_mode_name(report.hyper) << "\n";
  out << std::left << std::setw(static_cast<int>(width)) << "kernel" << std::right;
  for (const char* h : {"RMSE", "NLPD", "noise", "min eig", "log ML"}) out << "  " << std::setw(14) << h;
  out << '\n';
  for (const auto& k : report.kernels) {
    out << std::left << std::setw(static_cast<int>(width)) << k.name << std::right << std::setprecision(6);
    for (double v : {k.rmse, k.nlpd, k.noise_variance, k.min_eigenvalue, k.log_marginal_likelihood})
      out << "  " << std::setw(14) << v;
    out << '\n';
  }
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace viewgp::io

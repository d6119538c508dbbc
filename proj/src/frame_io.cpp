#include "etfspectra/frame_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace etfs {

namespace {
constexpr const char* kFormat = "etfspectra-frame";
constexpr int kVersion = 1;
}  // namespace

std::string frame_to_json(const FrameMatrix& frame) {
  nlohmann::json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["rows"] = frame.m();
  doc["cols"] = frame.n();
  doc["field"] = std::string(to_string(frame.field()));
  doc["family"] = std::string(to_string(frame.family()));
  if (frame.seed())
    doc["seed"] = *frame.seed();
  else
    doc["seed"] = nullptr;

  const auto& f = frame.entries();
  const bool complex = frame.field() == Field::Complex;
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(f.size()) * (complex ? 2 : 1));
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      flat.push_back(f(r, c).real());
      if (complex) flat.push_back(f(r, c).imag());
    }
  }
  doc["entries"] = flat;
  return doc.dump();
}

FrameMatrix frame_from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text);
  if (doc.value("format", "") != kFormat) throw std::runtime_error("not an etfspectra frame file");
  if (doc.value("version", 0) != kVersion) throw std::runtime_error("unsupported frame file version");

  const auto rows = doc.at("rows").get<Eigen::Index>();
  const auto cols = doc.at("cols").get<Eigen::Index>();
  const Field field = parse_field(doc.at("field").get<std::string>());
  const FrameFamily family = parse_family(doc.at("family").get<std::string>());
  std::optional<std::uint64_t> seed;
  if (!doc.at("seed").is_null()) seed = doc.at("seed").get<std::uint64_t>();

  const auto flat = doc.at("entries").get<std::vector<double>>();
  const bool complex = field == Field::Complex;
  const std::size_t expected = static_cast<std::size_t>(rows * cols) * (complex ? 2 : 1);
  if (flat.size() != expected) throw std::runtime_error("frame entry count does not match shape");

  Eigen::MatrixXcd f(rows, cols);
  std::size_t at = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double re = flat[at++];
      double im = complex ? flat[at++] : 0.0;
      f(r, c) = {re, im};
    }
  }
  return {std::move(f), family, field, seed};
}

void save_frame(const FrameMatrix& frame, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << frame_to_json(frame) << '\n';
}

FrameMatrix load_frame(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return frame_from_json(buf.str());
}

}  // namespace etfs

#pragma once
// JSON codecs for matrices, states, and channels, plus the report envelope
// shared by every command-line report. Parsing uses nlohmann::json; writing
// goes through a single dumper so all files and reports share one number
// format.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alphaz/channels.hpp"
#include "alphaz/entropies.hpp"
#include "alphaz/errors.hpp"
#include "alphaz/matrix.hpp"
#include "alphaz/tolerances.hpp"
#include "alphaz/version.hpp"

namespace alphaz {

// Insertion-ordered so reports keep a stable, readable field layout.
using Json = nlohmann::ordered_json;

namespace detail {

// 17 significant digits round-trip every IEEE double exactly. A decimal
// marker is forced onto integral values so parsers keep them (and the sign
// of -0.0) in the floating-point lane.
inline std::string num17(double v) {
  if (!std::isfinite(v)) throw InvalidParams("json: non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string out(buf);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

inline void dump_to(std::string& out, const Json& j) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += Json(it.key()).dump();
        out += ": ";
        dump_to(out, it.value());
      }
      out += '}';
      return;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ", ";
        dump_to(out, j[i]);
      }
      out += ']';
      return;
    }
    case Json::value_t::string:
      out += j.dump();
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float:
      out += num17(j.get<double>());
      return;
    case Json::value_t::null:
      out += "null";
      return;
    default:
      throw InvalidParams("json: unsupported value type");
  }
}

inline Eigen::Index positive_dim(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw InvalidParams(std::string(what) + ": missing integer field \"" + key + "\"");
  const auto v = j.at(key).get<std::int64_t>();
  if (v < 1 || v > 4096)
    throw InvalidParams(std::string(what) + ": field \"" + key + "\" out of range");
  return static_cast<Eigen::Index>(v);
}

inline double number_at(const Json& j, const char* what) {
  if (!j.is_number()) throw InvalidParams(std::string(what) + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

inline std::string dump_json(const Json& j) {
  std::string out;
  detail::dump_to(out, j);
  return out;
}

// Matrix codec: {"rows": r, "cols": c, "data": [[re, im], ...]} with the data
// list in row-major order.
inline Json matrix_to_json(const Mat& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      data.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(data);
  return out;
}

inline Mat matrix_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidParams("matrix json: expected an object");
  const Eigen::Index rows = detail::positive_dim(j, "rows", "matrix json");
  const Eigen::Index cols = detail::positive_dim(j, "cols", "matrix json");
  if (!j.contains("data") || !j.at("data").is_array())
    throw InvalidParams("matrix json: missing array field \"data\"");
  const Json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw DimensionMismatch("matrix json: data has " + std::to_string(data.size()) +
                            " entries for a " + std::to_string(rows) + " x " +
                            std::to_string(cols) + " matrix");
  Mat m(rows, cols);
  Eigen::Index k = 0;
  for (const Json& entry : data) {
    if (!entry.is_array() || entry.size() != 2)
      throw InvalidParams("matrix json: each data entry must be [re, im]");
    const double re = detail::number_at(entry[0], "matrix json");
    const double im = detail::number_at(entry[1], "matrix json");
    m(k / cols, k % cols) = cplx(re, im);
    ++k;
  }
  return m;
}

// States use the plain matrix codec; loading re-runs the density-operator
// validation, so only faithful states survive a round trip.
inline Json state_to_json(const QuantumState& s) { return matrix_to_json(s.mat()); }

inline QuantumState state_from_json(const Json& j) { return QuantumState(matrix_from_json(j)); }

// Channel codec: {"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}.
inline Json channel_to_json(const QuantumChannel& e) {
  Json kraus = Json::array();
  for (const Mat& k : e.kraus()) kraus.push_back(matrix_to_json(k));
  Json out;
  out["dim_in"] = e.dim_in();
  out["dim_out"] = e.dim_out();
  out["kraus"] = std::move(kraus);
  return out;
}

inline QuantumChannel channel_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidParams("channel json: expected an object");
  const Eigen::Index dim_in = detail::positive_dim(j, "dim_in", "channel json");
  const Eigen::Index dim_out = detail::positive_dim(j, "dim_out", "channel json");
  if (!j.contains("kraus") || !j.at("kraus").is_array() || j.at("kraus").empty())
    throw InvalidParams("channel json: missing non-empty array field \"kraus\"");
  std::vector<Mat> kraus;
  kraus.reserve(j.at("kraus").size());
  for (const Json& kj : j.at("kraus")) {
    Mat k = matrix_from_json(kj);
    if (k.rows() != dim_out || k.cols() != dim_in)
      throw DimensionMismatch("channel json: Kraus operator is " + std::to_string(k.rows()) +
                              " x " + std::to_string(k.cols()) + ", expected " +
                              std::to_string(dim_out) + " x " + std::to_string(dim_in));
    kraus.push_back(std::move(k));
  }
  return QuantumChannel(std::move(kraus), "file");
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParams(origin + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidParams("cannot write " + path);
  out << dump_json(j) << '\n';
  if (!out) throw InvalidParams("write failed for " + path);
}

inline Mat read_matrix_file(const std::string& path) {
  return matrix_from_json(read_json_file(path));
}

inline QuantumState read_state_file(const std::string& path) {
  return state_from_json(read_json_file(path));
}

inline QuantumChannel read_channel_file(const std::string& path) {
  return channel_from_json(read_json_file(path));
}

// The numerical thresholds in effect, embedded verbatim in every report.
inline Json tolerances_json() {
  Json t;
  t["hermit"] = tol::hermit;
  t["recon"] = tol::recon;
  t["pd_floor"] = tol::pd_floor;
  t["kraus"] = tol::kraus;
  t["choi_psd"] = tol::choi_psd;
  t["dilation"] = tol::dilation;
  t["region_boundary"] = tol::region_boundary;
  t["cert"] = tol::cert;
  t["dpi_equal"] = tol::dpi_equal;
  t["degenerate_coeff"] = tol::degenerate_coeff;
  t["grad"] = tol::grad;
  t["optimize_iter_cap"] = tol::optimize_iter_cap;
  t["optimize_backtrack"] = tol::optimize_backtrack;
  t["optimize_step0"] = tol::optimize_step0;
  t["grad_stall"] = tol::grad_stall;
  t["fd_step"] = tol::fd_step;
  t["support_cut"] = tol::support_cut;
  t["state_mix"] = tol::state_mix;
  t["convexity_slack"] = tol::convexity_slack;
  return t;
}

inline Json param_point_json(const ParamPoint& pt) {
  const RegionVerdict v = region_check(pt);
  Json region;
  region["valid"] = v.valid;
  region["case"] = static_cast<int>(v.case_id);
  region["boundary"] = v.boundary;
  Json out;
  out["alpha"] = pt.alpha;
  out["z"] = pt.z;
  out["p"] = pt.p;
  out["q"] = pt.q;
  out["region"] = std::move(region);
  return out;
}

inline std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

// Common head of every report. "generated_at" is the only field exempt from
// the byte-identical determinism contract.
inline Json report_envelope(const std::string& command,
                            const std::vector<std::uint64_t>& seeds) {
  Json r;
  r["library_version"] = version();
  r["generated_at"] = timestamp_utc();
  r["command"] = command;
  r["seeds"] = seeds;
  r["tolerances"] = tolerances_json();
  return r;
}

}  // namespace alphaz

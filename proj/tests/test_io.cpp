#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "alphaz/io.hpp"
#include "fixtures.hpp"

using namespace alphaz;

namespace {

bool bit_equal(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const cplx x = a(i, j);
      const cplx y = b(i, j);
      if (x.real() != y.real() || x.imag() != y.imag()) return false;
      if (std::signbit(x.real()) != std::signbit(y.real())) return false;
      if (std::signbit(x.imag()) != std::signbit(y.imag())) return false;
    }
  return true;
}

Mat round_trip(const Mat& m) {
  return matrix_from_json(parse_json_text(dump_json(matrix_to_json(m)), "round trip"));
}

// Unique scratch path inside the test working directory; removed by each test.
std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::path("io_scratch_" + name + ".json");
}

}  // namespace

TEST_CASE("matrix codec round-trips every bit") {
  for (Eigen::Index dim : {1, 2, 3, 5, 7}) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      Rng rng(seed + static_cast<std::uint64_t>(dim) * 100);
      const Mat m = ginibre(rng, dim, dim);
      REQUIRE(bit_equal(round_trip(m), m));
    }
  }

  Mat awkward(2, 2);
  awkward << cplx(1.0 / 3.0, -0.0), cplx(0.0, 1e-308), cplx(-2.5e222, 4.9e-324),
      cplx(0.1, -1.0 / 7.0);
  REQUIRE(bit_equal(round_trip(awkward), awkward));
}

TEST_CASE("matrix writer emits 17 significant digits in row-major order") {
  Mat m(2, 3);
  m << cplx(1.0 / 3.0, 0.0), cplx(2, 0), cplx(3, 0), cplx(4, 0), cplx(5, 0), cplx(6, 0);
  const std::string text = dump_json(matrix_to_json(m));
  REQUIRE(text.find("0.33333333333333331") != std::string::npos);
  REQUIRE(text.find("\"rows\": 2") != std::string::npos);
  REQUIRE(text.find("\"cols\": 3") != std::string::npos);

  const Json j = parse_json_text(text, "layout");
  for (Eigen::Index k = 0; k < 6; ++k) {
    const double re = j.at("data")[static_cast<std::size_t>(k)][0].get<double>();
    REQUIRE(re == m(k / 3, k % 3).real());
  }
}

TEST_CASE("matrix parser rejects malformed input") {
  REQUIRE_THROWS_AS(parse_json_text("{\"rows\": 2,", "truncated"), InvalidParams);
  REQUIRE_THROWS_AS(matrix_from_json(Json::array()), InvalidParams);
  REQUIRE_THROWS_AS(matrix_from_json(parse_json_text("{\"cols\": 2, \"data\": []}", "t")),
                    InvalidParams);
  REQUIRE_THROWS_AS(
      matrix_from_json(parse_json_text("{\"rows\": 0, \"cols\": 2, \"data\": []}", "t")),
      InvalidParams);
  REQUIRE_THROWS_AS(
      matrix_from_json(parse_json_text("{\"rows\": 2, \"cols\": 2, \"data\": [[1, 0]]}", "t")),
      DimensionMismatch);
  REQUIRE_THROWS_AS(
      matrix_from_json(parse_json_text(
          "{\"rows\": 1, \"cols\": 1, \"data\": [[1, 0, 0]]}", "t")),
      InvalidParams);
  REQUIRE_THROWS_AS(
      matrix_from_json(parse_json_text("{\"rows\": 1, \"cols\": 1, \"data\": [[\"x\", 0]]}", "t")),
      InvalidParams);

  Mat bad = Mat::Identity(2, 2);
  bad(0, 0) = cplx(std::nan(""), 0.0);
  REQUIRE_THROWS_AS(dump_json(matrix_to_json(bad)), InvalidParams);
}

TEST_CASE("state codec validates on load") {
  const QuantumState s = random_state(3, 17);
  const QuantumState back = state_from_json(parse_json_text(dump_json(state_to_json(s)), "s"));
  REQUIRE((back.mat() - s.mat()).norm() <= 1e-12);

  Mat traceless = Mat::Identity(2, 2) * 0.4;
  REQUIRE_THROWS_AS(state_from_json(matrix_to_json(traceless)), InvalidParams);

  Mat signed_diag = Mat::Zero(2, 2);
  signed_diag(0, 0) = 1.5;
  signed_diag(1, 1) = -0.5;
  REQUIRE_THROWS_AS(state_from_json(matrix_to_json(signed_diag)), NotPositiveDefinite);
}

TEST_CASE("channel codec round-trips Kraus operators exactly") {
  const QuantumChannel e = make_random_cptp(3, 2, 3, 29);
  const Json j = parse_json_text(dump_json(channel_to_json(e)), "channel");
  const QuantumChannel back = channel_from_json(j);

  REQUIRE(back.dim_in() == e.dim_in());
  REQUIRE(back.dim_out() == e.dim_out());
  REQUIRE(back.kind() == "file");
  REQUIRE(back.kraus().size() == e.kraus().size());
  for (std::size_t k = 0; k < e.kraus().size(); ++k)
    REQUIRE(bit_equal(back.kraus()[k], e.kraus()[k]));

  const QuantumState probe = random_state(3, 31);
  REQUIRE((back.apply(probe.mat()) - e.apply(probe.mat())).norm() == 0.0);
}

TEST_CASE("channel parser rejects inconsistent input") {
  const QuantumChannel e = make_random_cptp(2, 2, 2, 37);
  Json j = channel_to_json(e);

  Json wrong_dims = j;
  wrong_dims["dim_out"] = 3;
  REQUIRE_THROWS_AS(channel_from_json(wrong_dims), DimensionMismatch);

  Json no_kraus = j;
  no_kraus["kraus"] = Json::array();
  REQUIRE_THROWS_AS(channel_from_json(no_kraus), InvalidParams);

  Json scaled = j;
  for (auto& kj : scaled["kraus"])
    for (auto& entry : kj["data"])
      for (auto& part : entry) part = part.get<double>() * 0.5;
  REQUIRE_THROWS_AS(channel_from_json(scaled), InvalidParams);
}

TEST_CASE("file helpers round-trip through disk") {
  const auto path = scratch("file_round_trip");
  const QuantumState s = random_state(4, 41);
  write_json_file(path.string(), state_to_json(s));
  const QuantumState back = read_state_file(path.string());
  REQUIRE((back.mat() - s.mat()).norm() <= 1e-12);

  const QuantumChannel e = make_partial_trace_channel(2, 2);
  write_json_file(path.string(), channel_to_json(e));
  const QuantumChannel eb = read_channel_file(path.string());
  REQUIRE(bit_equal(eb.kraus()[0], e.kraus()[0]));
  std::filesystem::remove(path);

  REQUIRE_THROWS_AS(read_json_file("io_scratch_does_not_exist.json"), InvalidParams);
}

TEST_CASE("dumper output is deterministic") {
  Rng rng(43);
  const Mat m = ginibre(rng, 4, 4);
  const std::string a = dump_json(matrix_to_json(m));
  const std::string b = dump_json(matrix_to_json(m));
  REQUIRE(a == b);

  Json e1 = report_envelope("entropy", {1, 2, 3});
  Json e2 = report_envelope("entropy", {1, 2, 3});
  e1.erase("generated_at");
  e2.erase("generated_at");
  REQUIRE(dump_json(e1) == dump_json(e2));
}

TEST_CASE("report envelope carries the reproducibility context") {
  const Json r = report_envelope("certify", {7, 8});
  REQUIRE(r.at("library_version").get<std::string>() == version());
  REQUIRE(r.at("command").get<std::string>() == "certify");
  REQUIRE(r.at("seeds").size() == 2);
  REQUIRE(r.at("seeds")[0].get<std::uint64_t>() == 7);
  REQUIRE(r.at("generated_at").get<std::string>().size() == 20);

  const Json t = r.at("tolerances");
  REQUIRE(t.at("cert").get<double>() == tol::cert);
  REQUIRE(t.at("dpi_equal").get<double>() == tol::dpi_equal);
  REQUIRE(t.at("optimize_iter_cap").get<int>() == tol::optimize_iter_cap);
  REQUIRE(t.size() == 19);
}

TEST_CASE("parameter point serialization includes the region verdict") {
  const Json inside = param_point_json(ParamPoint(2.0, 2.0));
  REQUIRE(inside.at("alpha").get<double>() == 2.0);
  REQUIRE(inside.at("p").get<double>() == 1.0);
  REQUIRE(inside.at("q").get<double>() == -0.5);
  REQUIRE(inside.at("region").at("valid").get<bool>());
  REQUIRE(inside.at("region").at("case").get<int>() == 2);

  const Json outside = param_point_json(ParamPoint(0.5, 0.3));
  REQUIRE_FALSE(outside.at("region").at("valid").get<bool>());
  REQUIRE(outside.at("region").at("case").get<int>() == 0);

  const Json edge = param_point_json(ParamPoint(0.5, 0.5));
  REQUIRE(edge.at("region").at("valid").get<bool>());
  REQUIRE(edge.at("region").at("boundary").get<bool>());
}

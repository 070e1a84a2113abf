#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "alphaz/entropies.hpp"
#include "alphaz/io.hpp"

using namespace alphaz;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult run_raw(const std::string& command) {
  const std::string capture = "cli_capture.txt";
  const std::string cmd = command + " > " + capture + " 2> cli_stderr.txt";
  const int rc = std::system(cmd.c_str());
  int code = -1;
  if (rc != -1 && WIFEXITED(rc)) code = WEXITSTATUS(rc);
  std::ifstream in(capture);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {code, buf.str()};
}

CliResult run_cli(const std::string& args) {
  return run_raw(std::string(ALPHAZ_CLI_PATH) + " " + args);
}

Json run_json(const std::string& args) {
  const CliResult r = run_cli(args);
  REQUIRE(r.code == 0);
  return parse_json_text(r.out, "cli stdout");
}

std::string sans_timestamp(const std::string& text) {
  Json j = parse_json_text(text, "report");
  j.erase("generated_at");
  return dump_json(j);
}

QuantumState diag_state(std::initializer_list<double> entries) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(entries.size()),
                    static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double v : entries) m(i, i) = v, ++i;
  return QuantumState(m);
}

}  // namespace

TEST_CASE("reports embed the reproducibility envelope") {
  const Json r = run_json("entropy --alpha 2 --z 1 --dim 3 --seed 5");
  REQUIRE(r.at("library_version").get<std::string>() == version());
  REQUIRE(r.at("command").get<std::string>() == "entropy");
  REQUIRE(r.at("seeds") == Json::array({5, 6}));
  REQUIRE(r.at("tolerances").contains("cert"));
  REQUIRE(r.at("params").at("p").get<double>() == 2.0);
  REQUIRE(r.at("params").at("q").get<double>() == -1.0);
  REQUIRE(r.at("params").at("region").at("valid").get<bool>());
}

TEST_CASE("entropy of a state against itself is zero") {
  REQUIRE(run_cli("gen --kind state --dim 3 --seed 9 --out cli_self.json").code == 0);
  const Json r = run_json("entropy --alpha 2 --z 1 --rho cli_self.json --sigma cli_self.json");
  REQUIRE(std::abs(r.at("results").at("d_alpha_z").get<double>()) <= 1e-12);
  REQUIRE(std::abs(r.at("results").at("d_umegaki").get<double>()) <= 1e-12);
}

TEST_CASE("entropy of commuting states matches the classical value") {
  write_json_file("cli_diag_rho.json", state_to_json(diag_state({0.5, 0.3, 0.2})));
  write_json_file("cli_diag_sigma.json", state_to_json(diag_state({0.2, 0.5, 0.3})));
  RVec pv(3), qv(3);
  pv << 0.5, 0.3, 0.2;
  qv << 0.2, 0.5, 0.3;

  for (const auto& [alpha, z] : {std::pair{2.0, 1.0}, {0.5, 1.0}, {1.5, 1.5}}) {
    const Json r = run_json("entropy --alpha " + std::to_string(alpha) + " --z " +
                            std::to_string(z) +
                            " --rho cli_diag_rho.json --sigma cli_diag_sigma.json");
    const double got = r.at("results").at("d_alpha_z").get<double>();
    REQUIRE(std::abs(got - classical_renyi(alpha, pv, qv)) <= 1e-11);
  }
}

TEST_CASE("validation failures exit with code 2 and a machine-readable object") {
  for (const std::string& args :
       {std::string("entropy --alpha 1 --z 1"), std::string("entropy --no-such-flag"),
        std::string("certify --fixture unitary --alpha 0.5 --z 0.3"),
        std::string("certify --fixture nonsense --alpha 1.5 --z 1"),
        std::string("certify --alpha 1.5 --z 1 --rho missing.json"),
        std::string("entropy --alpha 2 --z 1 --tol bogus=1"),
        std::string("entropy --alpha 2 --z 1 --tol cert=0.5")}) {
    const CliResult r = run_cli(args);
    REQUIRE(r.code == 2);
    const Json err = parse_json_text(r.out, "error object");
    REQUIRE(err.at("error").at("exit_code").get<int>() == 2);
    REQUIRE_FALSE(err.at("error").at("message").get<std::string>().empty());
  }
}

TEST_CASE("certify on equality fixtures reports all verdicts true") {
  const Json r = run_json("certify --fixture unitary --alpha 1.5 --z 1 --dim 3 --seed 11");
  const Json& c = r.at("certificate");
  REQUIRE(c.at("dpi_equal").get<bool>());
  REQUIRE(c.at("x_adjoint_ok").get<bool>());
  REQUIRE(c.at("rho_transfer_ok").get<bool>());
  REQUIRE(c.at("sigma_transfer_ok").get<bool>());
  REQUIRE(std::abs(c.at("dpi_gap").get<double>()) <= 1e-8);

  const Json id = run_json("certify --fixture identity --alpha 2 --z 2 --dim 2 --seed 3");
  REQUIRE(id.at("certificate").at("res_x_adjoint").get<double>() <= 1e-10);
  REQUIRE(id.at("certificate").at("res_rho_transfer").get<double>() <= 1e-10);
  REQUIRE(id.at("certificate").at("res_sigma_transfer").get<double>() <= 1e-10);
}

TEST_CASE("certify on a random triple reports a strict gap") {
  const Json r = run_json("certify --fixture random --alpha 1.5 --z 1 --dim 3 --seed 2");
  const Json& c = r.at("certificate");
  REQUIRE_FALSE(c.at("dpi_equal").get<bool>());
  REQUIRE_FALSE(c.at("x_adjoint_ok").get<bool>());
  REQUIRE(c.at("dpi_gap").get<double>() > 1e-5);
}

TEST_CASE("certify optional sections appear on request") {
  const Json r = run_json(
      "certify --fixture pinching --alpha 2 --z 2 --dim 3 --seed 4 "
      "--with-proof-artifacts --with-recovery");
  REQUIRE(r.at("proof_artifacts").at("h_ok").get<bool>());
  REQUIRE(r.at("proof_artifacts").at("l_mean_ok").get<bool>());
  REQUIRE(r.at("recovery").at("special_point").at("res_sigma").get<double>() <= 1e-9);
  REQUIRE(r.at("recovery").at("special_point").at("res_rho").get<double>() <= 1e-9);
  REQUIRE(r.at("recovery").at("general").at("res_sigma").get<double>() <= 1e-9);

  const Json bare = run_json("certify --fixture pinching --alpha 2 --z 2 --dim 3 --seed 4");
  REQUIRE_FALSE(bare.contains("proof_artifacts"));
  REQUIRE_FALSE(bare.contains("recovery"));
}

TEST_CASE("dpi sweep finds no violations inside the region") {
  const Json r = run_json("dpi-sweep --points 0.5:0.5,2:2 --dims 2,3 --seeds 5");
  const Json& s = r.at("summary");
  REQUIRE(s.at("completed").get<int>() == 20);
  REQUIRE(s.at("violations_in_region").get<int>() == 0);
  REQUIRE(s.at("min_gap_in_region").get<double>() >= -1e-9);
  REQUIRE_FALSE(s.at("interrupted").get<bool>());
  REQUIRE(r.at("items").size() == 20);
}

TEST_CASE("dpi sweep reports out-of-region points without asserting them") {
  const Json r = run_json("dpi-sweep --points 3:0.5 --dims 2 --seeds 4");
  const Json& p = r.at("summary").at("per_point")[0];
  REQUIRE_FALSE(p.at("in_region").get<bool>());
  REQUIRE(p.at("min_gap").is_number());
  REQUIRE(r.at("summary").at("min_gap_in_region").is_null());
  REQUIRE(r.at("summary").at("violations_in_region").get<int>() == 0);
}

TEST_CASE("dpi sweep with an empty grid succeeds with an empty report") {
  const Json r = run_json("dpi-sweep --points \"\" --seeds 3");
  REQUIRE(r.at("items").empty());
  REQUIRE(r.at("summary").at("completed").get<int>() == 0);
}

TEST_CASE("identical configuration gives identical bytes modulo the timestamp") {
  const std::string args = "dpi-sweep --points 0.5:0.5,1.5:1 --dims 2,3 --seeds 6";
  const CliResult serial =
      run_raw("env RENYI_DPI_THREADS=1 " + std::string(ALPHAZ_CLI_PATH) + " " + args);
  const CliResult threaded =
      run_raw("env RENYI_DPI_THREADS=4 " + std::string(ALPHAZ_CLI_PATH) + " " + args);
  REQUIRE(serial.code == 0);
  REQUIRE(threaded.code == 0);
  REQUIRE(sans_timestamp(serial.out) == sans_timestamp(threaded.out));
}

TEST_CASE("variational command cross-checks the closed form") {
  const Json r = run_json("variational --dim 3 --seed 7");
  const Json& res = r.at("results");
  REQUIRE(res.at("value_residual").get<double>() <= 1e-9);
  REQUIRE(res.at("gradient_check").at("max_rel_error").get<double>() <= 1e-5);
  REQUIRE(res.at("multi_start").size() == 5);
  for (const Json& row : res.at("multi_start")) {
    REQUIRE(row.at("value_rel_gap").get<double>() <= 1e-5);
    REQUIRE(row.at("h_rel_residual").get<double>() <= 1e-5);
  }
}

TEST_CASE("variational pair demo reproduces the scalar oracle") {
  const Json r = run_json("variational --pair-demo --dim 2");
  const Json& p = r.at("pair_demo");
  REQUIRE(p.at("a_max_abs_dev").get<double>() <= 1e-12);
  REQUIRE(p.at("b_max_abs_dev").get<double>() <= 1e-12);
  REQUIRE(p.at("residual_first").get<double>() <= 1e-12);
  REQUIRE(p.at("residual_second").get<double>() <= 1e-12);
  REQUIRE(p.at("a_oracle").get<double>() == std::pow(2.0, 4.0 / 3.0));
}

TEST_CASE("variational identity problem is solved by the identity") {
  const Json r = run_json("variational --identity --dim 3");
  REQUIRE(r.at("results").at("h_minus_identity").get<double>() <= 1e-12);
}

TEST_CASE("non-convergence surfaces as exit code 4") {
  const CliResult r = run_cli(
      "variational --r0 0.66666666666666663 --r1 2 --r2 1 --sense max --dim 3 --seed 3");
  REQUIRE(r.code == 4);
  const Json err = parse_json_text(r.out, "error object");
  REQUIRE(err.at("error").at("type").get<std::string>() == "NonConvergence");
  REQUIRE(err.at("error").at("exit_code").get<int>() == 4);
}

TEST_CASE("gen writes files the other commands accept") {
  REQUIRE(run_cli("gen --kind fixture --fixture unitary --dim 3 --seed 11 --out cli_fx").code ==
          0);
  const QuantumState rho = read_state_file("cli_fx.rho.json");
  REQUIRE(rho.dim() == 3);
  const QuantumChannel e = read_channel_file("cli_fx.channel.json");
  REQUIRE(e.dim_in() == 3);

  const Json r = run_json(
      "certify --alpha 1.5 --z 1 --rho cli_fx.rho.json --sigma cli_fx.sigma.json "
      "--channel cli_fx.channel.json");
  REQUIRE(r.at("certificate").at("dpi_equal").get<bool>());
  REQUIRE(r.at("certificate").at("x_adjoint_ok").get<bool>());
}

TEST_CASE("report files written with --out leave stdout empty") {
  const CliResult r = run_cli("entropy --alpha 2 --z 1 --dim 2 --seed 3 --out cli_report.json");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.empty());
  const Json file = read_json_file("cli_report.json");
  REQUIRE(file.at("command").get<std::string>() == "entropy");
}

TEST_CASE("table format flattens the same report object") {
  const CliResult r = run_cli("entropy --alpha 2 --z 1 --dim 2 --seed 3 --format table");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("results.d_alpha_z = ") != std::string::npos);
  REQUIRE(r.out.find("params.region.valid = true") != std::string::npos);
}

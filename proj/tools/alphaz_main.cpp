// alphaz: command-line surface over the library. Computes divergence values,
// runs DPI sweeps over seeded triples, certifies equality conditions with
// optional proof artifacts and recovery residuals, exercises the variational
// formulas, and generates fixture files. Reports are JSON; with identical
// configuration and seeds the bytes are identical except for "generated_at".

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "alphaz/certificates.hpp"
#include "alphaz/io.hpp"
#include "alphaz/variational.hpp"

using namespace alphaz;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void handle_interrupt(int) { g_interrupted = 1; }

// In-region sweep gaps below this floor are treated as monotonicity
// violations rather than roundoff.
constexpr double kSweepGapFloor = -1e-9;

struct RunConfig {
  std::string command;

  double alpha = 0.5;
  double z = 1.0;

  int dim = 3;
  std::uint64_t seed = 1;

  std::vector<int> dims = {2, 3, 4};
  int seed_count = 200;
  std::uint64_t seed_base = 1;
  std::string points_raw;
  bool points_given = false;

  std::vector<std::string> tol_overrides;

  std::string rho_path;
  std::string sigma_path;
  std::string channel_path;
  std::string out_path;
  std::string format = "json";

  std::string fixture;
  bool with_proof = false;
  bool with_recovery = false;

  double r0 = 1.0;
  double r1 = 2.0;
  double r2 = 2.0;
  bool triple_given = false;
  std::string sense = "min";
  bool pair_demo = false;
  bool identity_problem = false;
  int starts = 5;

  std::string gen_kind;
  int dim_out = 0;
  int kraus_count = 0;
};

std::string error_kind(const Error& e) {
  if (dynamic_cast<const InvalidParams*>(&e)) return "InvalidParams";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
  if (dynamic_cast<const ImageNotFaithful*>(&e)) return "ImageNotFaithful";
  if (dynamic_cast<const Singular*>(&e)) return "Singular";
  if (dynamic_cast<const DegenerateCoefficients*>(&e)) return "DegenerateCoefficients";
  if (dynamic_cast<const CompletionFailure*>(&e)) return "CompletionFailure";
  if (dynamic_cast<const TheoremViolation*>(&e)) return "TheoremViolation";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  return "Error";
}

int fail(int code, const std::string& kind, const std::string& message) {
  Json err;
  err["error"]["type"] = kind;
  err["error"]["message"] = message;
  err["error"]["exit_code"] = code;
  std::cout << dump_json(err) << "\n";
  return code;
}

void table_lines(const Json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      table_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      table_lines(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.push_back(prefix + " = " + dump_json(j));
  }
}

void emit(const RunConfig& cfg, const Json& report) {
  if (!cfg.out_path.empty()) {
    write_json_file(cfg.out_path, report);
    return;
  }
  if (cfg.format == "table") {
    std::vector<std::string> lines;
    table_lines(report, "", lines);
    for (const std::string& line : lines) std::cout << line << "\n";
  } else {
    std::cout << dump_json(report) << "\n";
  }
}

// Thresholds the command layer applies when turning residuals into verdicts.
// Only these two are runtime-adjustable; everything else in the tolerance
// table is compiled into the library and rejected as an override target.
struct EffectiveTols {
  double cert = tol::cert;
  double dpi_equal = tol::dpi_equal;
};

EffectiveTols apply_overrides(Json& tol_table, const std::vector<std::string>& raw) {
  EffectiveTols eff;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InvalidParams("tolerance override must be name=value, got \"" + item + "\"");
    const std::string name = item.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidParams("tolerance override has a non-numeric value: \"" + item + "\"");
    }
    if (name != "cert" && name != "dpi_equal")
      throw InvalidParams("tolerance \"" + name + "\" is not overridable at run time");
    if (!(value >= 1e-14 && value <= 1e-2))
      throw InvalidParams("tolerance override outside [1e-14, 1e-2]: \"" + item + "\"");
    tol_table[name] = value;
    (name == "cert" ? eff.cert : eff.dpi_equal) = value;
  }
  return eff;
}

QuantumState block_state(const std::vector<int>& blocks, std::uint64_t seed) {
  Eigen::Index dim = 0;
  for (int b : blocks) dim += b;
  Mat m = Mat::Zero(dim, dim);
  Rng rng(seed);
  Eigen::Index at = 0;
  for (int b : blocks) {
    const Mat g = ginibre(rng, b, b);
    m.block(at, at, b, b) = g * g.adjoint() + 1e-2 * Mat::Identity(b, b);
    at += b;
  }
  m /= m.trace();
  return QuantumState(m);
}

struct NamedTriple {
  QuantumState rho;
  QuantumState sigma;
  QuantumChannel e;
};

// The named fixtures of the certify and gen commands. The first four are
// equality cases by construction; "random" is generically strict.
NamedTriple build_fixture(const std::string& name, int dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidParams("fixture: --dim must be at least 2");
  if (name == "identity")
    return {random_state(dim, seed + 1), random_state(dim, seed + 2),
            make_identity_channel(dim)};
  if (name == "unitary") {
    Rng rng(seed);
    return {random_state(dim, seed + 3), random_state(dim, seed + 4),
            make_unitary_channel(random_unitary(rng, dim))};
  }
  if (name == "pinching") {
    const std::vector<int> blocks = {1, dim - 1};
    return {block_state(blocks, seed + 5), block_state(blocks, seed + 6),
            make_pinching_channel(blocks)};
  }
  if (name == "product_partial_trace") {
    const QuantumState tau = random_state(2, seed + 7);
    const QuantumState rho_a = random_state(dim, seed + 8);
    const QuantumState sigma_a = random_state(dim, seed + 9);
    return {QuantumState(kron(rho_a.mat(), tau.mat())),
            QuantumState(kron(sigma_a.mat(), tau.mat())),
            make_partial_trace_channel(dim, 2)};
  }
  if (name == "random")
    return {random_state(dim, seed + 1), random_state(dim, seed + 2),
            make_random_cptp(dim, dim, dim, seed + 3)};
  throw InvalidParams("unknown fixture \"" + name +
                      "\"; expected identity, unitary, pinching, product_partial_trace, "
                      "or random");
}

// ---------------------------------------------------------------------------
// entropy

int cmd_entropy(const RunConfig& cfg) {
  const ParamPoint pt(cfg.alpha, cfg.z);
  Json tol_table = tolerances_json();
  apply_overrides(tol_table, cfg.tol_overrides);

  std::optional<QuantumState> rho;
  std::optional<QuantumState> sigma;
  std::vector<std::uint64_t> seeds;
  Json inputs;
  if (!cfg.rho_path.empty() || !cfg.sigma_path.empty()) {
    if (cfg.rho_path.empty() || cfg.sigma_path.empty())
      throw InvalidParams("entropy: provide both --rho and --sigma, or neither");
    rho.emplace(read_state_file(cfg.rho_path));
    sigma.emplace(read_state_file(cfg.sigma_path));
    inputs["mode"] = "files";
    inputs["rho"] = cfg.rho_path;
    inputs["sigma"] = cfg.sigma_path;
  } else {
    rho.emplace(random_state(cfg.dim, cfg.seed));
    sigma.emplace(random_state(cfg.dim, cfg.seed + 1));
    seeds = {cfg.seed, cfg.seed + 1};
    inputs["mode"] = "generated";
    inputs["rho_seed"] = cfg.seed;
    inputs["sigma_seed"] = cfg.seed + 1;
  }
  inputs["dim"] = rho->dim();

  // The three one-parameter values can be undefined where the main point is
  // fine (negative alpha for the sandwiched family); report null there.
  auto guarded = [&](auto&& fn) -> Json {
    try {
      return fn();
    } catch (const Error&) {
      return nullptr;
    }
  };

  Json results;
  results["d_alpha_z"] = d_alpha_z(pt, *rho, *sigma);
  results["d_petz"] = guarded([&] { return d_petz(cfg.alpha, *rho, *sigma); });
  results["d_sandwiched"] = guarded([&] { return d_sandwiched(cfg.alpha, *rho, *sigma); });
  results["d_umegaki"] = d_umegaki(*rho, *sigma);

  Json report = report_envelope("entropy", seeds);
  report["tolerances"] = tol_table;
  report["params"] = param_point_json(pt);
  report["inputs"] = inputs;
  report["results"] = results;
  emit(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------
// dpi-sweep

std::vector<std::pair<double, double>> default_grid() {
  return {{0.5, 0.5}, {0.5, 1.2}, {0.25, 0.75}, {0.75, 0.75}, {1.5, 1.0}, {1.5, 0.75},
          {1.5, 1.5}, {2.0, 1.0}, {2.0, 2.0},   {3.0, 2.0},   {3.0, 3.0}, {2.5, 2.0}};
}

std::vector<std::pair<double, double>> parse_points(const std::string& raw) {
  std::vector<std::pair<double, double>> out;
  std::size_t at = 0;
  while (at < raw.size()) {
    std::size_t comma = raw.find(',', at);
    if (comma == std::string::npos) comma = raw.size();
    const std::string token = raw.substr(at, comma - at);
    const std::size_t colon = token.find(':');
    if (colon == std::string::npos)
      throw InvalidParams("--points entries must look like alpha:z, got \"" + token + "\"");
    try {
      out.emplace_back(std::stod(token.substr(0, colon)), std::stod(token.substr(colon + 1)));
    } catch (const std::exception&) {
      throw InvalidParams("--points entry is not numeric: \"" + token + "\"");
    }
    at = comma + 1;
  }
  return out;
}

struct SweepItem {
  std::size_t point_idx;
  double alpha;
  double z;
  int dim;
  std::uint64_t seed;
};

int worker_count(std::size_t items) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("RENYI_DPI_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v < 1) throw InvalidParams("RENYI_DPI_THREADS must be at least 1");
      n = static_cast<unsigned>(std::min<long>(v, 256));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidParams("RENYI_DPI_THREADS is not an integer");
    }
  }
  n = std::max(1u, std::min<unsigned>(n, 64));
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(items, 1)));
}

int cmd_dpi_sweep(const RunConfig& cfg) {
  const auto points = cfg.points_given ? parse_points(cfg.points_raw) : default_grid();
  if (cfg.seed_count < 0) throw InvalidParams("--seeds must be nonnegative");
  for (int d : cfg.dims)
    if (d < 2) throw InvalidParams("--dims entries must be at least 2");

  std::vector<ParamPoint> pts;
  pts.reserve(points.size());
  for (const auto& [a, zz] : points) pts.emplace_back(a, zz);

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.seed_count));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = cfg.seed_base + i;

  std::vector<SweepItem> items;
  for (std::size_t pi = 0; pi < pts.size(); ++pi)
    for (int dim : cfg.dims)
      for (std::uint64_t s : seeds)
        items.push_back({pi, pts[pi].alpha, pts[pi].z, dim, s});

  std::vector<Json> item_json(items.size());
  std::vector<char> done(items.size(), 0);
  std::atomic<std::size_t> next{0};

  auto run_item = [&](std::size_t i) {
    const SweepItem& it = items[i];
    const ParamPoint pt(it.alpha, it.z);
    const std::uint64_t h = it.seed * 1000003ULL + it.point_idx * 1009ULL +
                            static_cast<std::uint64_t>(it.dim);
    Json j;
    j["index"] = i;
    j["alpha"] = it.alpha;
    j["z"] = it.z;
    j["dim"] = it.dim;
    j["seed"] = it.seed;
    j["rho_seed"] = h;
    j["sigma_seed"] = h + 1;
    j["channel_seed"] = h + 2;
    try {
      const QuantumState rho = random_state(it.dim, h);
      const QuantumState sigma = random_state(it.dim, h + 1);
      const QuantumChannel ch = make_random_cptp(it.dim, it.dim, it.dim, h + 2);
      const QuantumState erho(ch.apply(rho.mat()));
      const QuantumState esigma(ch.apply(sigma.mat()));
      j["gap"] = d_alpha_z(pt, rho, sigma) - d_alpha_z(pt, erho, esigma);
    } catch (const Error& err) {
      j["error"] = std::string(err.what());
    }
    item_json[i] = std::move(j);
    done[i] = 1;
  };

  std::signal(SIGINT, handle_interrupt);
  const int workers = worker_count(items.size());
  {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (g_interrupted == 0) {
          const std::size_t i = next.fetch_add(1);
          if (i >= items.size()) return;
          run_item(i);
        }
      });
    for (std::thread& t : pool) t.join();
  }
  std::signal(SIGINT, SIG_DFL);

  Json grid = Json::array();
  for (const ParamPoint& pt : pts) grid.push_back(param_point_json(pt));

  Json item_list = Json::array();
  std::size_t completed = 0;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (done[i]) {
      item_list.push_back(item_json[i]);
      ++completed;
    }

  // Per-point minima over completed items; in-region minima are asserted
  // against the floor, out-of-region minima report the violation search.
  Json per_point = Json::array();
  double min_in_region = std::numeric_limits<double>::infinity();
  int violations = 0;
  bool any_in_region = false;
  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    const bool valid = region_check(pts[pi]).valid;
    double min_gap = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!done[i] || items[i].point_idx != pi) continue;
      ++count;
      if (item_json[i].contains("error")) {
        ++errors;
        continue;
      }
      min_gap = std::min(min_gap, item_json[i].at("gap").get<double>());
    }
    Json p;
    p["alpha"] = pts[pi].alpha;
    p["z"] = pts[pi].z;
    p["in_region"] = valid;
    p["items"] = count;
    p["item_errors"] = errors;
    p["min_gap"] = std::isfinite(min_gap) ? Json(min_gap) : Json(nullptr);
    per_point.push_back(std::move(p));
    if (valid && std::isfinite(min_gap)) {
      any_in_region = true;
      min_in_region = std::min(min_in_region, min_gap);
      for (std::size_t i = 0; i < items.size(); ++i)
        if (done[i] && items[i].point_idx == pi && !item_json[i].contains("error") &&
            item_json[i].at("gap").get<double>() < kSweepGapFloor)
          ++violations;
    }
  }

  Json summary;
  summary["completed"] = completed;
  summary["total"] = items.size();
  summary["interrupted"] = g_interrupted != 0;
  summary["gap_floor"] = kSweepGapFloor;
  summary["min_gap_in_region"] = any_in_region ? Json(min_in_region) : Json(nullptr);
  summary["violations_in_region"] = violations;
  summary["per_point"] = std::move(per_point);

  Json tol_table = tolerances_json();
  apply_overrides(tol_table, cfg.tol_overrides);
  Json report = report_envelope("dpi-sweep", seeds);
  report["tolerances"] = tol_table;
  report["grid"] = std::move(grid);
  report["dims"] = cfg.dims;
  report["items"] = std::move(item_list);
  report["summary"] = std::move(summary);
  emit(cfg, report);
  return violations > 0 ? 3 : 0;
}

// ---------------------------------------------------------------------------
// certify

int cmd_certify(const RunConfig& cfg) {
  const ParamPoint pt(cfg.alpha, cfg.z);
  Json tol_table = tolerances_json();
  const EffectiveTols eff = apply_overrides(tol_table, cfg.tol_overrides);

  std::optional<NamedTriple> nt;
  std::vector<std::uint64_t> seeds;
  Json source;
  if (!cfg.fixture.empty()) {
    if (!cfg.rho_path.empty() || !cfg.sigma_path.empty() || !cfg.channel_path.empty())
      throw InvalidParams("certify: pass either --fixture or the three file paths, not both");
    nt.emplace(build_fixture(cfg.fixture, cfg.dim, cfg.seed));
    seeds = {cfg.seed};
    source["fixture"] = cfg.fixture;
    source["dim"] = cfg.dim;
    source["seed"] = cfg.seed;
  } else {
    if (cfg.rho_path.empty() || cfg.sigma_path.empty() || cfg.channel_path.empty())
      throw InvalidParams("certify: need --rho, --sigma, and --channel, or a --fixture name");
    nt.emplace(NamedTriple{read_state_file(cfg.rho_path), read_state_file(cfg.sigma_path),
                           read_channel_file(cfg.channel_path)});
    source["rho"] = cfg.rho_path;
    source["sigma"] = cfg.sigma_path;
    source["channel"] = cfg.channel_path;
  }

  const EqualityTriple triple(nt->rho, nt->sigma, nt->e, pt);
  const CertificateReport c = check_conditions(triple);

  Json cert;
  cert["d_input"] = c.d_input;
  cert["d_output"] = c.d_output;
  cert["dpi_gap"] = c.dpi_gap;
  cert["res_x_adjoint"] = c.res_x_adjoint;
  cert["res_rho_transfer"] = c.res_rho_transfer;
  cert["res_sigma_transfer"] = c.res_sigma_transfer;
  cert["dpi_equal"] = std::abs(c.dpi_gap) <= eff.dpi_equal * (1.0 + std::abs(c.d_input));
  cert["x_adjoint_ok"] = c.res_x_adjoint <= eff.cert;
  cert["rho_transfer_ok"] = c.res_rho_transfer <= eff.cert;
  cert["sigma_transfer_ok"] = c.res_sigma_transfer <= eff.cert;
  cert["rho_transfer_necessary"] = c.rho_transfer_necessary;
  cert["sigma_transfer_necessary"] = c.sigma_transfer_necessary;

  Json report = report_envelope("certify", seeds);
  report["tolerances"] = tol_table;
  report["params"] = param_point_json(pt);
  report["source"] = source;
  report["certificate"] = cert;

  if (cfg.with_proof) {
    const ProofArtifacts pa = proof_artifacts(triple);
    Json proof;
    proof["d"] = pa.d;
    proof["operators"] = pa.h.size();
    proof["res_h"] = pa.res_h;
    proof["res_k_mean"] = pa.res_k_mean;
    proof["res_l_mean"] = pa.res_l_mean;
    proof["k_mean_necessary"] = pa.k_mean_necessary;
    proof["l_mean_necessary"] = pa.l_mean_necessary;
    proof["h_ok"] = pa.res_h <= eff.cert;
    proof["k_mean_ok"] = pa.res_k_mean <= eff.cert;
    proof["l_mean_ok"] = pa.res_l_mean <= eff.cert;
    report["proof_artifacts"] = proof;
  }

  if (cfg.with_recovery) {
    const QuantumChannel& e = triple.channel;
    const Mat es = e.apply(triple.sigma.mat());
    const Mat er = e.apply(triple.rho.mat());
    const double scale_s = std::max(1.0, triple.sigma.mat().norm());
    const double scale_r = std::max(1.0, triple.rho.mat().norm());

    Json rec;
    {
      const QuantumChannel r22 = recovery_2_2(triple.sigma, e);
      rec["special_point"]["kraus_count"] = r22.kraus().size();
      rec["special_point"]["res_sigma"] = (r22.apply(es) - triple.sigma.mat()).norm() / scale_s;
      rec["special_point"]["res_rho"] = (r22.apply(er) - triple.rho.mat()).norm() / scale_r;
    }
    {
      const PositiveDefiniteMatrix rec_sigma =
          recovery_general(pt, triple.sigma, e, PositiveDefiniteMatrix(es));
      const PositiveDefiniteMatrix rec_rho =
          recovery_general(pt, triple.sigma, e, PositiveDefiniteMatrix(er));
      rec["general"]["res_sigma"] = (rec_sigma.mat() - triple.sigma.mat()).norm() / scale_s;
      rec["general"]["res_rho"] = (rec_rho.mat() - triple.rho.mat()).norm() / scale_r;
    }
    report["recovery"] = rec;
  }

  emit(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------
// variational

int cmd_variational(const RunConfig& cfg) {
  const ParamPoint pt(cfg.alpha, cfg.z);
  Json tol_table = tolerances_json();
  apply_overrides(tol_table, cfg.tol_overrides);

  Json report = report_envelope("variational", {cfg.seed});
  report["tolerances"] = tol_table;
  report["params"] = param_point_json(pt);

  if (cfg.pair_demo) {
    // Two-equation system A^{a_i} = K B^{b_i} K* with the documented scalar
    // oracle: K = 2 I and exponents (1, 2, -1, 1) give A = 2^{4/3} I and
    // B = 2^{2/3} I.
    const Mat k = 2.0 * Mat::Identity(cfg.dim, cfg.dim);
    const PairEquation pe(k, 1.0, 2.0, -1.0, 1.0);
    const PairSolution ps = solve_pair_equation(pe);
    const double a_oracle = std::pow(2.0, 4.0 / 3.0);
    const double b_oracle = std::pow(2.0, 2.0 / 3.0);
    Json demo;
    demo["dim"] = cfg.dim;
    demo["exponents"] = Json::array({1.0, 2.0, -1.0, 1.0});
    demo["a_oracle"] = a_oracle;
    demo["b_oracle"] = b_oracle;
    demo["a_max_abs_dev"] =
        (ps.a.mat() - a_oracle * Mat::Identity(cfg.dim, cfg.dim)).cwiseAbs().maxCoeff();
    demo["b_max_abs_dev"] =
        (ps.b.mat() - b_oracle * Mat::Identity(cfg.dim, cfg.dim)).cwiseAbs().maxCoeff();
    demo["residual_first"] = ps.residual_first;
    demo["residual_second"] = ps.residual_second;
    report["pair_demo"] = demo;
    emit(cfg, report);
    return 0;
  }

  TripleExponents exps(cfg.r0, cfg.r1, cfg.r2);
  std::string exps_source = "flags";
  if (!cfg.triple_given) {
    if (pt.q > 0.0) {
      exps = TripleExponents(1.0 / (pt.p + pt.q), 1.0 / pt.p, 1.0 / pt.q);
      exps_source = "derived from (alpha, z)";
    } else {
      exps_source = "defaults";
    }
  }
  const Sense sense = cfg.sense == "max" ? Sense::maximize : Sense::minimize;

  std::optional<VariationalProblem> vp;
  if (cfg.identity_problem) {
    vp.emplace(exps, Mat(Mat::Identity(cfg.dim, cfg.dim)), Mat(Mat::Identity(cfg.dim, cfg.dim)),
               sense);
  } else {
    Rng rng(cfg.seed);
    vp.emplace(exps, ginibre(rng, cfg.dim, cfg.dim), ginibre(rng, cfg.dim, cfg.dim), sense);
  }

  Json problem;
  problem["mode"] = cfg.identity_problem ? "identity" : "seeded";
  problem["dim"] = cfg.dim;
  problem["seed"] = cfg.seed;
  problem["r0"] = exps.r0;
  problem["r1"] = exps.r1;
  problem["r2"] = exps.r2;
  problem["exponents_source"] = exps_source;
  problem["sense"] = sense == Sense::maximize ? "max" : "min";
  report["problem"] = problem;

  const Optimum opt = sense == Sense::maximize ? closed_form_max(*vp) : closed_form_min(*vp);
  const double direct = direct_trace_power(*vp);
  const double h_scale = std::max(1.0, opt.h.mat().norm());

  Json results;
  results["closed_form_value"] = opt.value;
  results["direct_trace_power"] = direct;
  results["value_residual"] = std::abs(opt.value - direct) / std::max(1.0, std::abs(direct));
  if (cfg.identity_problem)
    results["h_minus_identity"] =
        (opt.h.mat() - Mat::Identity(cfg.dim, cfg.dim)).norm();

  {
    // Analytic gradient against central finite differences along seeded
    // Hermitian directions at a generic interior point.
    Rng rng(cfg.seed + 0x9E3779B9ULL);
    const Mat g = ginibre(rng, cfg.dim, cfg.dim);
    const Mat bump = g * g.adjoint();
    const PositiveDefiniteMatrix at(Mat::Identity(cfg.dim, cfg.dim) +
                                    0.25 * bump / std::max(1.0, bump.norm()));
    const Mat grad = grad_phi(*vp, at);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      Mat dir = ginibre(rng, cfg.dim, cfg.dim);
      dir = 0.5 * (dir + dir.adjoint());
      dir /= dir.norm();
      const double fd = fd_directional_derivative(*vp, at, dir);
      const double an = (grad * dir).trace().real();
      worst = std::max(worst, std::abs(fd - an) / std::max({1e-30, std::abs(fd), std::abs(an)}));
    }
    results["gradient_check"]["directions"] = 5;
    results["gradient_check"]["max_rel_error"] = worst;
  }

  Json table = Json::array();
  Rng start_rng(cfg.seed + 0xC0FFEEULL);
  for (int s = 0; s < std::max(1, cfg.starts); ++s) {
    PositiveDefiniteMatrix h0(Mat::Identity(cfg.dim, cfg.dim));
    if (s > 0) {
      const Mat g = ginibre(start_rng, cfg.dim, cfg.dim);
      const Mat bump = g * g.adjoint();
      h0 = PositiveDefiniteMatrix(Mat::Identity(cfg.dim, cfg.dim) +
                                  bump / std::max(1.0, bump.norm()));
    }
    const OptimizeResult r = optimize_pd(*vp, h0);
    Json row;
    row["start"] = s;
    row["iterations"] = r.iterations;
    row["value"] = r.value;
    row["value_rel_gap"] = std::abs(r.value - opt.value) / std::max(1.0, std::abs(opt.value));
    row["h_rel_residual"] = (r.h.mat() - opt.h.mat()).norm() / h_scale;
    table.push_back(std::move(row));
  }
  results["multi_start"] = std::move(table);

  report["results"] = results;
  emit(cfg, report);
  return 0;
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const RunConfig& cfg) {
  if (cfg.out_path.empty()) throw InvalidParams("gen: --out is required");
  Json tol_table = tolerances_json();
  apply_overrides(tol_table, cfg.tol_overrides);

  Json report = report_envelope("gen", {cfg.seed});
  report["tolerances"] = tol_table;
  report["params"] = param_point_json(ParamPoint(cfg.alpha, cfg.z));
  report["kind"] = cfg.gen_kind;
  Json files = Json::array();

  if (cfg.gen_kind == "state") {
    write_json_file(cfg.out_path, state_to_json(random_state(cfg.dim, cfg.seed)));
    files.push_back(cfg.out_path);
    report["dim"] = cfg.dim;
  } else if (cfg.gen_kind == "channel") {
    const int dim_out = cfg.dim_out > 0 ? cfg.dim_out : cfg.dim;
    const int kraus_count = cfg.kraus_count > 0 ? cfg.kraus_count : cfg.dim;
    write_json_file(cfg.out_path, channel_to_json(make_random_cptp(
                                      cfg.dim, dim_out, kraus_count, cfg.seed)));
    files.push_back(cfg.out_path);
    report["dim_in"] = cfg.dim;
    report["dim_out"] = dim_out;
    report["kraus_count"] = kraus_count;
  } else if (cfg.gen_kind == "fixture") {
    if (cfg.fixture.empty()) throw InvalidParams("gen: --kind fixture needs --fixture");
    const NamedTriple nt = build_fixture(cfg.fixture, cfg.dim, cfg.seed);
    const std::string rho_path = cfg.out_path + ".rho.json";
    const std::string sigma_path = cfg.out_path + ".sigma.json";
    const std::string channel_path = cfg.out_path + ".channel.json";
    write_json_file(rho_path, state_to_json(nt.rho));
    write_json_file(sigma_path, state_to_json(nt.sigma));
    write_json_file(channel_path, channel_to_json(nt.e));
    files.push_back(rho_path);
    files.push_back(sigma_path);
    files.push_back(channel_path);
    report["fixture"] = cfg.fixture;
    report["dim"] = cfg.dim;
  } else {
    throw InvalidParams("gen: --kind must be state, channel, or fixture");
  }

  report["files"] = files;
  // For gen, --out names the generated data files; the report itself always
  // goes to stdout.
  RunConfig stdout_cfg = cfg;
  stdout_cfg.out_path.clear();
  emit(stdout_cfg, report);
  return 0;
}

int run(const RunConfig& cfg) {
  if (cfg.command == "entropy") return cmd_entropy(cfg);
  if (cfg.command == "dpi-sweep") return cmd_dpi_sweep(cfg);
  if (cfg.command == "certify") return cmd_certify(cfg);
  if (cfg.command == "variational") return cmd_variational(cfg);
  if (cfg.command == "gen") return cmd_gen(cfg);
  throw InvalidParams("no command given; see --help");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"alpha-z Renyi relative entropy toolkit"};
  app.set_version_flag("--version", ALPHAZ_VERSION_STRING);
  app.require_subcommand(0, 1);

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--alpha", cfg.alpha, "Renyi order alpha (alpha != 1)");
    sub->add_option("--z", cfg.z, "z parameter (z > 0)");
    sub->add_option("--out", cfg.out_path, "write the JSON report to this file");
    sub->add_option("--format", cfg.format, "stdout format")
        ->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--tol", cfg.tol_overrides,
                    "tolerance override name=value (cert, dpi_equal)");
  };

  CLI::App* entropy = app.add_subcommand("entropy", "divergence values for a state pair");
  add_common(entropy);
  entropy->add_option("--rho", cfg.rho_path, "rho state file");
  entropy->add_option("--sigma", cfg.sigma_path, "sigma state file");
  entropy->add_option("--dim", cfg.dim, "dimension of the generated pair");
  entropy->add_option("--seed", cfg.seed, "seed of the generated pair");

  CLI::App* sweep = app.add_subcommand("dpi-sweep", "gap sweep over seeded triples");
  add_common(sweep);
  auto* points_opt =
      sweep->add_option("--points", cfg.points_raw,
                        "comma-separated alpha:z list (empty for an empty grid)");
  sweep->add_option("--dims", cfg.dims, "dimensions to sweep")->delimiter(',');
  sweep->add_option("--seeds", cfg.seed_count, "number of seeds per (point, dim)");
  sweep->add_option("--seed-base", cfg.seed_base, "first seed value");

  CLI::App* certify = app.add_subcommand("certify", "equality-condition certificate");
  add_common(certify);
  certify->add_option("--fixture", cfg.fixture,
                      "identity, unitary, pinching, product_partial_trace, or random");
  certify->add_option("--dim", cfg.dim, "fixture dimension");
  certify->add_option("--seed", cfg.seed, "fixture seed");
  certify->add_option("--rho", cfg.rho_path, "rho state file");
  certify->add_option("--sigma", cfg.sigma_path, "sigma state file");
  certify->add_option("--channel", cfg.channel_path, "channel file");
  certify->add_flag("--with-proof-artifacts", cfg.with_proof,
                    "add dilation-space claim residuals");
  certify->add_flag("--with-recovery", cfg.with_recovery, "add recovery-map residuals");

  CLI::App* variational = app.add_subcommand("variational", "variational formula checks");
  add_common(variational);
  variational->add_option("--dim", cfg.dim, "problem dimension");
  variational->add_option("--seed", cfg.seed, "seed for X and Y");
  auto* r0_opt = variational->add_option("--r0", cfg.r0, "exponent r0");
  variational->add_option("--r1", cfg.r1, "exponent r1")->needs(r0_opt);
  variational->add_option("--r2", cfg.r2, "exponent r2")->needs(r0_opt);
  variational->add_option("--sense", cfg.sense, "min or max")
      ->check(CLI::IsMember({"min", "max"}));
  variational->add_option("--starts", cfg.starts, "number of optimizer starts");
  variational->add_flag("--pair-demo", cfg.pair_demo, "run the two-equation scalar demo");
  variational->add_flag("--identity", cfg.identity_problem, "use X = Y = I");

  CLI::App* gen = app.add_subcommand("gen", "write states, channels, or fixtures to files");
  add_common(gen);
  gen->add_option("--kind", cfg.gen_kind, "state, channel, or fixture")
      ->check(CLI::IsMember({"state", "channel", "fixture"}))
      ->required();
  gen->add_option("--fixture", cfg.fixture, "fixture name for --kind fixture");
  gen->add_option("--dim", cfg.dim, "dimension (input side for channels)");
  gen->add_option("--dim-out", cfg.dim_out, "channel output dimension");
  gen->add_option("--kraus", cfg.kraus_count, "channel Kraus operator count");
  gen->add_option("--seed", cfg.seed, "generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "InvalidParams", std::string("argument parsing: ") + e.what());
  }

  for (CLI::App* sub : {entropy, sweep, certify, variational, gen})
    if (sub->parsed()) cfg.command = sub->get_name();
  cfg.points_given = points_opt->count() > 0;
  cfg.triple_given = r0_opt->count() > 0;

  try {
    return run(cfg);
  } catch (const TheoremViolation& e) {
    return fail(3, "TheoremViolation", e.what());
  } catch (const NonConvergence& e) {
    return fail(4, "NonConvergence", e.what());
  } catch (const Error& e) {
    return fail(2, error_kind(e), e.what());
  } catch (const std::exception& e) {
    return fail(2, "Error", e.what());
  }
}

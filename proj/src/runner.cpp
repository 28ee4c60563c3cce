// SPDX-License-Identifier: Apache-2.0
//
// isac-hbf: hybrid beamforming for integrated sensing and communication
// Copyright (C) 2026 The isac-hbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "isac/runner.hpp"

#include <openssl/sha.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "isac/mc_validate.hpp"
#include "isac/metrics.hpp"
#include "isac/sensing_only.hpp"

namespace isac {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Reads one JSON object, remembering which keys were consumed.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    used_.insert(key);
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  const json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

json to_json(const RunConfig& c) {
  const Scenario& s = c.scenario;
  json prior = json::array();
  for (const auto& m : s.prior) {
    prior.push_back({{"weight", m.weight}, {"mean", m.mean}, {"variance", m.variance}});
  }
  return {
      {"mode", c.mode},
      {"array", {{"n_tx", s.array.n_tx}, {"n_rx", s.array.n_rx}}},
      {"n_rf", s.n_rf},
      {"power_dbm", watts_to_dbm(s.power_w)},
      {"comm_noise_dbm", watts_to_dbm(s.comm_noise_w)},
      {"sensing_noise_dbm", watts_to_dbm(s.sensing_noise_w)},
      {"snr_ratio_db", s.snr_ratio_db},
      {"num_symbols", s.num_symbols},
      {"target", {{"range_m", s.target_range_m}, {"beta0_db", linear_to_db(s.beta0)}}},
      {"prior", prior},
      {"channel",
       {{"n_user", s.channel.n_user},
        {"distance_m", s.channel.distance_m},
        {"beta0_db", linear_to_db(s.channel.beta0)},
        {"pathloss_exponent", s.channel.pathloss_exponent},
        {"rician_k_db", linear_to_db(s.channel.rician_k)},
        {"user_angle", s.channel.user_angle},
        {"seed", s.channel.seed}}},
      {"rate_target", s.rate_target},
      {"sweep", {{"rate_targets", c.rate_grid}}},
      {"quadrature", {{"panels", s.quad_panels}, {"points", s.quad_points}}},
      {"solver",
       {{"rel_tol", c.solver.rel_tol},
        {"max_outer", c.solver.max_outer},
        {"max_restarts", c.solver.max_restarts},
        {"refresh_wmmse", c.solver.refresh_wmmse},
        {"penalty", c.solver.fpp.penalty},
        {"penalty_start", c.solver.fpp.penalty_start},
        {"penalty_growth", c.solver.fpp.penalty_growth},
        {"inner_iters", c.solver.fpp.max_iters}}},
      {"mc", {{"trials", c.mc_trials}, {"grid", c.mc_grid}}},
      {"pattern", {{"points", c.pattern_points}}},
      {"seed", s.seed},
      {"output_dir", c.out_dir},
      {"workers", c.workers},
  };
}

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

class Csv {
 public:
  Csv(const std::string& schema, const RunConfig& cfg, const std::vector<std::string>& cols) {
    os_ << "# schema: " << schema << "\n";
    os_ << "# input_sha1: " << cfg.input_hash << "\n";
    os_ << "# config: " << resolved_config(cfg) << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
    os_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

json matrix_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

json solution_json(const TradeoffSolution& s) {
  return {{"pcrb_upper", s.pcrb_upper},
          {"pcrb_exact", s.pcrb_exact},
          {"rate", s.rate},
          {"objective", s.objective},
          {"rate_feasible", s.rate_feasible},
          {"converged", s.converged},
          {"stop_reason", s.stop_reason},
          {"restarts", s.restarts},
          {"counters", {{"n_out", s.n_out}, {"n_in", s.n_in}, {"n_ld", s.n_ld}}},
          {"f_rf", matrix_json(s.beamformer.f_rf)},
          {"r_bb", matrix_json(s.beamformer.r_bb)}};
}

std::vector<double> pattern_grid(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = -kPi / 2 + kPi * i / (points - 1);
  return g;
}

TradeoffOptions solver_with_seed(const RunConfig& cfg) {
  TradeoffOptions o = cfg.solver;
  o.seed = cfg.scenario.seed;
  return o;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  RunConfig c;
  Scenario& s = c.scenario;
  Fields top(doc, "config");
  top.get<std::string>("schema", "");
  c.mode = top.get<std::string>("mode", c.mode);
  if (top.has("array")) {
    Fields a(top.child("array"), "array");
    s.array.n_tx = a.get("n_tx", s.array.n_tx);
    s.array.n_rx = a.get("n_rx", s.array.n_rx);
    a.done();
  }
  s.n_rf = top.get("n_rf", s.n_rf);
  s.power_w = dbm_to_watts(top.get("power_dbm", watts_to_dbm(s.power_w)));
  s.comm_noise_w = dbm_to_watts(top.get("comm_noise_dbm", watts_to_dbm(s.comm_noise_w)));
  s.sensing_noise_w = dbm_to_watts(top.get("sensing_noise_dbm", watts_to_dbm(s.sensing_noise_w)));
  s.snr_ratio_db = top.get("snr_ratio_db", s.snr_ratio_db);
  s.num_symbols = top.get("num_symbols", s.num_symbols);
  if (top.has("target")) {
    Fields t(top.child("target"), "target");
    s.target_range_m = t.get("range_m", s.target_range_m);
    s.beta0 = db_to_linear(t.get("beta0_db", linear_to_db(s.beta0)));
    t.done();
  }
  if (top.has("prior")) {
    const json& p = top.child("prior");
    require(p.is_array() && !p.empty(), "prior: expected a non-empty array");
    s.prior.clear();
    for (std::size_t i = 0; i < p.size(); ++i) {
      Fields m(p[i], "prior[" + std::to_string(i) + "]");
      require(m.has("weight") && m.has("mean") && m.has("variance"),
              "prior[" + std::to_string(i) + "]: weight, mean and variance are required");
      s.prior.push_back({m.get("weight", 0.0), m.get("mean", 0.0), m.get("variance", 0.0)});
      m.done();
    }
  }
  if (top.has("channel")) {
    Fields ch(top.child("channel"), "channel");
    auto& p = s.channel;
    p.n_user = ch.get("n_user", p.n_user);
    p.distance_m = ch.get("distance_m", p.distance_m);
    p.beta0 = db_to_linear(ch.get("beta0_db", linear_to_db(p.beta0)));
    p.pathloss_exponent = ch.get("pathloss_exponent", p.pathloss_exponent);
    p.rician_k = db_to_linear(ch.get("rician_k_db", linear_to_db(p.rician_k)));
    p.user_angle = ch.get("user_angle", p.user_angle);
    p.seed = ch.get("seed", p.seed);
    ch.done();
  }
  s.rate_target = top.get("rate_target", s.rate_target);
  if (top.has("sweep")) {
    Fields sw(top.child("sweep"), "sweep");
    c.rate_grid = sw.get("rate_targets", c.rate_grid);
    sw.done();
  }
  if (top.has("quadrature")) {
    Fields q(top.child("quadrature"), "quadrature");
    s.quad_panels = q.get("panels", s.quad_panels);
    s.quad_points = q.get("points", s.quad_points);
    q.done();
  }
  if (top.has("solver")) {
    Fields so(top.child("solver"), "solver");
    auto& o = c.solver;
    o.rel_tol = so.get("rel_tol", o.rel_tol);
    o.max_outer = so.get("max_outer", o.max_outer);
    o.max_restarts = so.get("max_restarts", o.max_restarts);
    o.refresh_wmmse = so.get("refresh_wmmse", o.refresh_wmmse);
    o.fpp.penalty = so.get("penalty", o.fpp.penalty);
    o.fpp.penalty_start = so.get("penalty_start", o.fpp.penalty_start);
    o.fpp.penalty_growth = so.get("penalty_growth", o.fpp.penalty_growth);
    o.fpp.max_iters = so.get("inner_iters", o.fpp.max_iters);
    so.done();
  }
  if (top.has("mc")) {
    Fields m(top.child("mc"), "mc");
    c.mc_trials = m.get("trials", c.mc_trials);
    c.mc_grid = m.get("grid", c.mc_grid);
    m.done();
  }
  if (top.has("pattern")) {
    Fields p(top.child("pattern"), "pattern");
    c.pattern_points = p.get("points", c.pattern_points);
    p.done();
  }
  s.seed = top.get("seed", s.seed);
  c.out_dir = top.get("output_dir", c.out_dir);
  c.workers = top.get("workers", c.workers);
  top.done();

  bool known = false;
  for (const auto& m : kModes) known = known || m == c.mode;
  require(known, "mode: unknown mode '" + c.mode + "'");
  require(s.array.n_tx >= 1 && s.array.n_rx >= 1, "array: sizes must be positive");
  require(s.n_rf >= 1 && s.n_rf <= s.array.n_tx, "n_rf: must lie in [1, n_tx]");
  require(s.num_symbols >= 1, "num_symbols: must be positive");
  require(s.target_range_m > 0.0 && s.channel.distance_m > 0.0, "distances must be positive");
  require(s.channel.n_user >= 1, "channel.n_user: must be positive");
  double wsum = 0.0;
  for (const auto& m : s.prior) {
    require(m.weight > 0.0 && m.variance > 0.0, "prior: weights and variances must be positive");
    wsum += m.weight;
  }
  require(std::abs(wsum - 1.0) <= 1e-9, "prior: weights must sum to one");
  require(!c.rate_grid.empty(), "sweep.rate_targets: must be non-empty");
  for (std::size_t i = 1; i < c.rate_grid.size(); ++i) {
    require(c.rate_grid[i] > c.rate_grid[i - 1], "sweep.rate_targets: must be increasing");
  }
  require(s.quad_panels >= 1 && s.quad_points >= 1, "quadrature: must be positive");
  require(c.solver.rel_tol > 0.0 && c.solver.max_outer >= 1, "solver: invalid tolerance");
  require(c.mc_trials >= 100, "mc.trials: at least 100");
  require(c.mc_grid >= 3 && c.pattern_points >= 2, "grid sizes too small");
  require(c.workers >= 0, "workers: must be non-negative");
  c.input_hash = git_blob_hash(text);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string git_blob_hash(const std::string& bytes) {
  const std::string blob = "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  std::ostringstream os;
  for (unsigned char b : md) os << std::hex << std::setw(2) << std::setfill('0') << int(b);
  return os.str();
}

std::string resolved_config(const RunConfig& cfg) { return to_json(cfg).dump(); }

PcrbMinResult pcrb_min(const Instance& in, int n_rf, double power, std::uint64_t seed) {
  const DigitalOptimum opt = digital_pcrb_optimal(in.sensing, power);
  PcrbMinResult out;
  out.digital_covariance = opt.r_x;
  out.pcrb_digital = opt.pcrb;
  out.newton_steps = opt.report.iterations;
  if (n_rf == 1) {
    const SingleRfResult r = single_rf_design(in.sensing, in.prior, power, seed);
    out.hybrid = r.beamformer;
    out.pcrb_hybrid = r.pcrb;
    return out;
  }
  const RankOneExtraction f = rank_one_extract(opt.r_x, in.sensing);
  out.eig_ratio = f.eig_ratio;
  out.hybrid = hybrid_from_digital(CMatrix(f.f), n_rf, power);
  out.pcrb_hybrid = pcrb_exact(in.sensing, transmit_covariance(out.hybrid));
  return out;
}

std::vector<SweepRow> sweep_rate(const Instance& in, const RunConfig& cfg, std::ostream* log) {
  const Scenario& s = cfg.scenario;
  std::vector<SweepRow> rows;
  std::optional<CMatrix> warm;
  for (double target : cfg.rate_grid) {
    SweepRow row;
    row.rate_target = target;
    row.inherited_from = kNaN;
    const TradeoffProblem pr = in.tradeoff(target, s.n_rf, s.power_w);
    std::optional<TradeoffSolution> digital;
    try {
      digital = fully_digital_reference(pr);
    } catch (const InfeasibleRate&) {
    }
    row.pcrb_digital = digital ? digital->pcrb_upper : kNaN;

    // Two starts: the previous point's analog matrix and the phases of the
    // digital optimum's leading eigenvectors. The better one is kept.
    std::vector<std::optional<CMatrix>> starts{warm};
    if (digital) {
      starts.push_back(analog_from_covariance(transmit_covariance(digital->beamformer), s.n_rf));
    }
    bool any = false;
    for (const auto& start : starts) {
      TradeoffOptions opts = solver_with_seed(cfg);
      opts.initial_f_rf = start;
      try {
        TradeoffSolution sol = solve_tradeoff(pr, opts);
        const bool better = !any || (sol.rate_feasible && !row.proposed.rate_feasible) ||
                            (sol.rate_feasible == row.proposed.rate_feasible &&
                             sol.objective > row.proposed.objective);
        if (better) row.proposed = std::move(sol);
        any = true;
      } catch (const InfeasibleRate&) {
      }
    }
    if (any) {
      row.status = row.proposed.rate_feasible ? "ok" : "solver_failure";
      warm = row.proposed.beamformer.f_rf;
    } else {
      row.status = "infeasible";
    }
    const bool ok = row.status == "ok";
    row.pcrb_upper_proposed = ok ? row.proposed.pcrb_upper : kNaN;
    row.pcrb_exact_proposed = ok ? row.proposed.pcrb_exact : kNaN;
    row.achieved_rate = ok ? row.proposed.rate : kNaN;
    row.outer_iters = ok ? row.proposed.n_out : 0;
    try {
      row.pcrb_bench1 = benchmark_heuristic(pr, in.prior, s.channel.user_angle).pcrb_upper;
      row.bench1_feasible = true;
    } catch (const InfeasibleRate&) {
      row.pcrb_bench1 = kNaN;
    }
    const TradeoffSolution b2 = benchmark_peak_angle(pr, in.prior);
    row.pcrb_bench2 = b2.pcrb_upper;
    row.bench2_feasible = b2.rate_feasible;
    if (log) {
      *log << "sweep R=" << target << " status=" << row.status
           << " pcrb=" << num(row.pcrb_upper_proposed) << " digital=" << num(row.pcrb_digital)
           << " outer=" << row.outer_iters << std::endl;
    }
    rows.push_back(std::move(row));
  }

  // Backward repair so the proposed column is monotone.
  for (std::size_t k = rows.size() - 1; k-- > 0;) {
    SweepRow& lo = rows[k];
    const SweepRow& hi = rows[k + 1];
    if (hi.status != "ok") continue;
    if (lo.status == "ok" && lo.pcrb_upper_proposed <= hi.pcrb_upper_proposed) continue;
    const double t = lo.rate_target;
    const double from = std::isnan(hi.inherited_from) ? hi.rate_target : hi.inherited_from;
    TradeoffSolution sol = hi.proposed;
    sol.rate_feasible = sol.rate >= t - 1e-6;
    lo.proposed = sol;
    lo.status = "ok";
    lo.inherited_from = from;
    lo.pcrb_upper_proposed = sol.pcrb_upper;
    lo.pcrb_exact_proposed = sol.pcrb_exact;
    lo.achieved_rate = sol.rate;
    if (log) *log << "sweep R=" << t << " inherits the solution of R=" << from << "\n";
  }
  return rows;
}

int run_scenario(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario& s = cfg.scenario;
  const Instance in = build_instance(s);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  json result = {{"schema", "isac-hbf/result/1"},
                 {"mode", cfg.mode},
                 {"input_sha1", cfg.input_hash},
                 {"config", to_json(cfg)}};
  int code = 0;
  std::map<std::string, std::string> files;

  try {
    if (cfg.mode == "pcrb-min") {
      const PcrbMinResult r = pcrb_min(in, s.n_rf, s.power_w, s.seed);
      const double rel = std::abs(r.pcrb_hybrid - r.pcrb_digital) / r.pcrb_digital;
      result["solution"] = {{"pcrb_hybrid", r.pcrb_hybrid},
                            {"pcrb_digital", r.pcrb_digital},
                            {"relative_gap", rel},
                            {"eig_ratio", r.eig_ratio},
                            {"counters", {{"n_out", 0}, {"n_in", 0}, {"n_ld", r.newton_steps}}},
                            {"f_rf", matrix_json(r.hybrid.f_rf)},
                            {"r_bb", matrix_json(r.hybrid.r_bb)}};
      log << "pcrb hybrid " << num(r.pcrb_hybrid) << " digital " << num(r.pcrb_digital)
          << " relative gap " << num(rel) << "\n";
    } else if (cfg.mode == "tradeoff" || cfg.mode == "pattern") {
      const TradeoffProblem pr = in.tradeoff(s.rate_target, s.n_rf, s.power_w);
      const TradeoffSolution sol = solve_tradeoff(pr, solver_with_seed(cfg));
      const TradeoffSolution dig = fully_digital_reference(pr);
      result["solution"] = solution_json(sol);
      result["digital"] = {{"pcrb_upper", dig.pcrb_upper}, {"rate", dig.rate}};
      log << "pcrb upper " << num(sol.pcrb_upper) << " rate " << num(sol.rate) << " after "
          << sol.n_out << " outer iterations (" << sol.stop_reason << ")\n";
      if (!sol.converged && sol.stop_reason != "outer iteration limit") {
        throw SolverFailure(sol.stop_reason);
      }
      if (cfg.mode == "tradeoff") {
        Csv csv("isac-hbf/trace/1", cfg,
                {"iteration", "objective", "pcrb_upper", "wmmse_gap_bits"});
        const auto& sm = in.sensing;
        for (std::size_t i = 0; i < sol.trace.size(); ++i) {
          const double gap = i < sol.wmmse_gap.size() ? sol.wmmse_gap[i] : kNaN;
          csv.row({std::to_string(i), num(sol.trace[i]),
                   num(sm.noise_scale / (sm.noise_scale * sm.prior_fisher + sol.trace[i])),
                   num(gap)});
        }
        files["trace.csv"] = csv.str();
      } else {
        const auto grid = pattern_grid(cfg.pattern_points);
        const auto hyb = power_pattern(transmit_covariance(sol.beamformer), grid, s.beta0,
                                       s.target_range_m);
        const auto ful = power_pattern(transmit_covariance(dig.beamformer), grid, s.beta0,
                                       s.target_range_m);
        Csv csv("isac-hbf/pattern/1", cfg,
                {"theta_rad", "radiated_watts", "prior_pdf", "digital_watts"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
          csv.row({num(grid[i]), num(hyb[i]), num(pdf(in.prior, grid[i])), num(ful[i])});
        }
        files["pattern.csv"] = csv.str();
      }
    } else if (cfg.mode == "sweep") {
      const auto rows = sweep_rate(in, cfg, &log);
      Csv csv("isac-hbf/sweep/1", cfg,
              {"rate_target", "pcrb_upper_proposed", "pcrb_exact_proposed", "pcrb_digital",
               "pcrb_bench1", "pcrb_bench2", "bench2_feasible", "achieved_rate", "outer_iters",
               "bench1_feasible", "status", "inherited_from"});
      json points = json::array();
      for (const auto& r : rows) {
        csv.row({num(r.rate_target), num(r.pcrb_upper_proposed), num(r.pcrb_exact_proposed),
                 num(r.pcrb_digital), num(r.pcrb_bench1), num(r.pcrb_bench2),
                 r.bench2_feasible ? "1" : "0", num(r.achieved_rate),
                 std::to_string(r.outer_iters), r.bench1_feasible ? "1" : "0", r.status,
                 num(r.inherited_from)});
        json p = {{"rate_target", r.rate_target}, {"status", r.status}};
        if (r.status == "ok") p["solution"] = solution_json(r.proposed);
        points.push_back(p);
      }
      result["points"] = points;
      files["sweep.csv"] = csv.str();
    } else if (cfg.mode == "validate-mc") {
      const PcrbMinResult design = pcrb_min(in, std::max(2, s.n_rf), s.power_w, s.seed);
      McOptions mo;
      mo.map.grid = cfg.mc_grid;
      mo.workers = cfg.workers;
      const McResult mc = empirical_mse(in, design.hybrid, cfg.mc_trials, s.seed, mo);
      const double floor = mc.pcrb_exact * (1.0 - 3.0 / std::sqrt(double(mc.trials)));
      const bool holds = mc.mse >= floor;
      result["solution"] = {{"mse", mc.mse},
                            {"pcrb_exact", mc.pcrb_exact},
                            {"bias", mc.bias},
                            {"std_error", mc.std_error},
                            {"trials", mc.trials},
                            {"bound_holds", holds},
                            {"counters", {{"n_out", 0}, {"n_in", 0}, {"n_ld", design.newton_steps}}}};
      Csv csv("isac-hbf/mc/1", cfg,
              {"trials", "seed", "mse", "pcrb_exact", "mse_over_pcrb", "bias", "std_error",
               "bound_holds"});
      csv.row({std::to_string(mc.trials), std::to_string(s.seed), num(mc.mse),
               num(mc.pcrb_exact), num(mc.mse / mc.pcrb_exact), num(mc.bias), num(mc.std_error),
               holds ? "1" : "0"});
      files["mc.csv"] = csv.str();
      log << "mse " << num(mc.mse) << " pcrb " << num(mc.pcrb_exact) << "\n";
    }
    result["status"] = "ok";
  } catch (const InfeasibleRate& e) {
    result["status"] = "infeasible";
    result["message"] = e.what();
    log << "infeasible: " << e.what() << "\n";
    code = 2;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    result["status"] = "solver_failure";
    result["message"] = e.what();
    log << "solver failure: " << e.what() << "\n";
    code = 1;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result["wall_time_s"] = wall;
  for (const auto& [name, text] : files) write_atomic(dir / name, text);
  write_atomic(dir / "result.json", result.dump(2) + "\n");
  return code;
}

void csv_to_svg(const std::string& csv_path, const std::string& svg_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot read " + csv_path);
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      cols.resize(header.size());
      continue;
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      double v = kNaN;
      if (i < cells.size()) {
        try {
          v = std::stod(cells[i]);
        } catch (const std::exception&) {
        }
      }
      cols[i].push_back(v);
    }
  }
  if (cols.size() < 2 || cols[0].empty()) throw std::runtime_error("no data in " + csv_path);

  auto range = [](const std::vector<double>& v, double& lo, double& hi) {
    for (double x : v) {
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  };
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  range(cols[0], xlo, xhi);
  for (std::size_t i = 1; i < cols.size(); ++i) range(cols[i], ylo, yhi);
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  if (!(yhi > ylo)) yhi = ylo + 1.0;

  const double w = 640, h = 400, m = 40;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\">\n<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\""
     << h - 2 * m << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t i = 1; i < cols.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[(i - 1) % 10] << "\" points=\"";
    for (std::size_t k = 0; k < cols[0].size(); ++k) {
      const double x = cols[0][k], y = cols[i][k];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      os << m + (x - xlo) / (xhi - xlo) * (w - 2 * m) << ","
         << h - m - (y - ylo) / (yhi - ylo) * (h - 2 * m) << " ";
    }
    os << "\"/>\n<text x=\"" << m + 5 << "\" y=\"" << m + 14 * i << "\" font-size=\"11\" fill=\""
       << colors[(i - 1) % 10] << "\">" << header[i] << "</text>\n";
  }
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" font-size=\"12\">" << header[0]
     << "</text>\n</svg>\n";
  write_atomic(svg_path, os.str());
}

}  // namespace isac

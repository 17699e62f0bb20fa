#include <algorithm>
#include <cmath>
#include <sstream>

#include "qustat/apps/metrology.hpp"
#include "qustat/apps/testing.hpp"
#include "qustat/ccr/basis.hpp"
#include "qustat/ccr/hermite.hpp"
#include "qustat/ccr/limit.hpp"
#include "qustat/error.hpp"
#include "qustat/hoeffding.hpp"
#include "qustat/json_io.hpp"
#include "qustat/tensor.hpp"
#include "qustat/ustat.hpp"
#include "qustat_cli/cli.hpp"

namespace qustat::cli {

using nlohmann::json;

namespace {

DensityMatrix state_from(const json& s) {
  if (s.contains("matrix")) return DensityMatrix(matrix_from_json(s.at("matrix")));
  const auto ev = s.at("eigenvalues").get<std::vector<double>>();
  RealVector v(static_cast<Eigen::Index>(ev.size()));
  for (std::size_t i = 0; i < ev.size(); ++i) v(static_cast<Eigen::Index>(i)) = ev[i];
  if (s.at("rotation").is_null()) return DensityMatrix::diagonal(v);
  return DensityMatrix::from_spectrum(v, matrix_from_json(s.at("rotation")));
}

struct Problem {
  DensityMatrix rho;  // per-site state the kernel is averaged against
  Kernel kernel;
};

Kernel qubit_preset(const std::string& name, int d) {
  if (d != 2) throw ValidationError("preset '" + name + "' needs a qubit state (d = 2)");
  const Matrix x = pauli::x().matrix(), y = pauli::y().matrix();
  if (name == "pauli-xy") {
    const std::vector<HermitianOperator> f{pauli::x(), pauli::y()};
    return symmetrize_kernel(f);
  }
  return Kernel(2, 2, HermitianOperator(tensor::kron(x, x) + tensor::kron(y, y)));
}

Problem problem_from(const json& cfg) {
  const DensityMatrix rho = state_from(cfg.at("state"));
  const json& k = cfg.at("kernel");
  const double gap = cfg.at("tolerances").at("gap").get<double>();
  if (k.contains("preset")) {
    const auto name = k.at("preset").get<std::string>();
    if (name == "goodness") return {rho, apps::goodness_kernel(rho, gap)};
    if (name == "homogeneity") {
      const DensityMatrix rho2 = cfg.at("state2").is_null() ? rho : state_from(cfg.at("state2"));
      if (rho2.d() != rho.d()) throw ValidationError("state2 dimension differs from state");
      return {DensityMatrix(tensor::kron(rho.matrix(), rho2.matrix())), apps::homogeneity_kernel(rho.d())};
    }
    return {rho, qubit_preset(name, rho.d())};
  }
  if (k.contains("matrix")) {
    const int d = k.at("d").get<int>(), r = k.at("r").get<int>();
    if (d != rho.d()) throw ValidationError("kernel.d differs from the state dimension");
    const Matrix m = matrix_from_json(k.at("matrix"));
    if (static_cast<std::size_t>(m.rows()) != ipow(d, r)) throw ValidationError("kernel.matrix is not d^r x d^r");
    return {rho, Kernel(d, r, HermitianOperator(m))};
  }
  std::vector<HermitianOperator> fs;
  for (const auto& f : k.at("factors")) {
    fs.emplace_back(matrix_from_json(f));
    if (static_cast<int>(fs.back().dim()) != rho.d()) throw ValidationError("kernel factor dimension differs from the state");
  }
  return {rho, symmetrize_kernel(fs)};
}

Budget budget_from(const json& cfg) {
  Budget b;
  b.max_dim = cfg.at("budget").at("max_dim").get<std::size_t>();
  return b;
}

DegeneracyReport report_from(const json& cfg, const Problem& p) {
  const json& tol = cfg.at("tolerances").at("hoeffding");
  return kernel_components(p.kernel, p.rho, tol.is_null() ? std::nullopt : std::optional<double>(tol.get<double>()));
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

std::string fmt(double v) { return format_double(v); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Limit moments phi(U^p) by the configured route(s); "both" cross-checks.
struct LimitMoments {
  std::map<int, double> value;
  std::map<int, double> wick, fock;
};

LimitMoments limit_moments(const json& cfg, const ccr::LimitPolynomial& u, const ccr::CCRBasis& basis,
                           const std::vector<int>& ps) {
  const auto method = cfg.at("limit").at("method").get<std::string>();
  ccr::LimitOptions opt;
  opt.fock.trunc = cfg.at("limit").at("trunc").get<int>();
  opt.fock.tail_tol = cfg.at("tolerances").at("tail").get<double>();
  opt.max_terms = cfg.at("budget").at("max_terms").get<std::size_t>();
  const double route = cfg.at("tolerances").at("route").get<double>();
  LimitMoments out;
  for (int p : ps) {
    if (method == "wick" || method == "both") out.wick[p] = ccr::limit_moment(u, basis, p, ccr::MomentMethod::wick, opt);
    if (method == "fock" || method == "both") out.fock[p] = ccr::limit_moment(u, basis, p, ccr::MomentMethod::fock, opt);
    if (method == "both") {
      const double w = out.wick[p], f = out.fock[p];
      if (std::abs(w - f) > route * std::max(1.0, std::abs(w)))
        throw ToleranceError("limit moment p=" + std::to_string(p) + ": wick " + fmt(w) + " and fock " + fmt(f) +
                             " disagree beyond " + fmt(route));
    }
    out.value[p] = out.wick.count(p) ? out.wick[p] : out.fock[p];
  }
  return out;
}

Artifacts decompose(const json& cfg) {
  const auto p = problem_from(cfg);
  const auto report = report_from(cfg, p);
  Artifacts a;
  a.result = to_json(report);
  json norms = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : report.components) {
    norms.push_back(c.norm_sq);
    rows.push_back({std::to_string(c.l), fmt(c.norm_sq)});
  }
  a.result["norm_sq"] = norms;
  a.result["r"] = report.r();
  a.result["tol"] = report.tol;
  a.tables["components.csv"] = csv({"l", "norm_sq"}, rows);
  return a;
}

// Moment table shared by `moments` and `convergence`.
Artifacts moment_table(const json& cfg, const std::string& table_name) {
  const auto prob = problem_from(cfg);
  const auto report = report_from(cfg, prob);
  const auto ns = cfg.at("n_list").get<std::vector<int>>();
  const auto ps = cfg.at("p_list").get<std::vector<int>>();
  const json& sc = cfg.at("scaling");
  const int c = report.c.value_or(0);
  Scaling scaling;
  scaling.exponent = sc.at("exponent").is_null() ? std::max(c, 1) : sc.at("exponent").get<int>();
  scaling.base = sc.at("base") == "n" ? Scaling::Base::n : Scaling::Base::n_minus_1;
  const auto method = cfg.at("limit").at("method").get<std::string>();

  LimitMoments lim;
  json limit_json = nullptr;
  if (method != "none") {
    if (report.fully_degenerate() || scaling.exponent < c) {
      for (int p : ps) lim.value[p] = 0.0;
    } else if (scaling.exponent > c) {
      throw ValidationError("scaling exponent " + std::to_string(scaling.exponent) + " exceeds the degeneracy order " +
                            std::to_string(c) + "; the scaled moments diverge");
    } else {
      const auto basis = ccr::build_ccr_basis(prob.rho, cfg.at("tolerances").at("gap").get<double>());
      const auto u = ccr::kernel_to_limit(prob.kernel, report, basis);
      lim = limit_moments(cfg, u, basis, ps);
      limit_json = ccr::to_json(u);
    }
  }

  const Budget budget = budget_from(cfg);
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  std::map<int, std::vector<double>> gaps;
  for (int n : ns) {
    const auto m = centered_moments(prob.kernel, prob.rho, n, ps, scaling, budget);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const int p = ps[i];
      const double l = method == "none" ? NAN : lim.value.at(p);
      const double gap = std::abs(m[i] - l);
      gaps[p].push_back(gap);
      rows.push_back({std::to_string(n), std::to_string(p), std::to_string(scaling.exponent), fmt(m[i]), fmt(l), fmt(gap)});
      entries.push_back({{"n", n}, {"p", p}, {"moment", m[i]}, {"limit_moment", finite_or_null(l)},
                         {"abs_gap", finite_or_null(gap)}});
    }
  }

  Artifacts a;
  a.result = {{"theta", report.theta},
              {"c", report.c ? json(*report.c) : json(nullptr)},
              {"scaling_exponent", scaling.exponent},
              {"scaling_base", sc.at("base")},
              {"limit", limit_json},
              {"rows", entries}};
  if (method != "none") {
    json lm = json::object();
    for (const auto& [p, v] : lim.value) {
      json e = {{"value", v}};
      if (lim.wick.count(p)) e["wick"] = lim.wick.at(p);
      if (lim.fock.count(p)) e["fock"] = lim.fock.at(p);
      lm[std::to_string(p)] = e;
    }
    a.result["limit_moments"] = lm;
    json trend = json::object();
    for (const auto& [p, g] : gaps) {
      bool nonincreasing = true, decreasing = true;
      for (std::size_t i = 1; i < g.size(); ++i) {
        nonincreasing = nonincreasing && g[i] <= g[i - 1];
        decreasing = decreasing && g[i] < g[i - 1];
      }
      trend[std::to_string(p)] = {{"gap_nonincreasing", nonincreasing}, {"gap_strictly_decreasing", decreasing}};
    }
    a.result["trend"] = trend;
  }
  a.tables[table_name] = csv({"n", "p", "scaling_exponent", "moment", "limit_moment", "abs_gap"}, rows);
  return a;
}

Artifacts convergence(const json& cfg) {
  Artifacts a = moment_table(cfg, "convergence.csv");
  // Variance identity as an independent route check at every n.
  const auto prob = problem_from(cfg);
  const auto report = report_from(cfg, prob);
  const Budget budget = budget_from(cfg);
  const double route = cfg.at("tolerances").at("route").get<double>();
  json checks = json::array();
  for (int n : cfg.at("n_list").get<std::vector<int>>()) {
    const auto u = assemble_direct(prob.kernel, n, budget);
    const double exact = variance_exact(u, prob.rho);
    const double formula = variance_formula(report, n);
    const double rel = std::abs(exact - formula) / std::max(std::abs(exact), 1e-300);
    if (std::abs(exact - formula) > route * std::max(std::abs(exact), 1e-12))
      throw ToleranceError("variance identity fails at n=" + std::to_string(n) + ": exact " + fmt(exact) +
                           ", formula " + fmt(formula));
    checks.push_back({{"n", n}, {"variance_exact", exact}, {"variance_formula", formula}, {"rel_diff", rel}});
  }
  a.result["variance_check"] = checks;
  return a;
}

Artifacts limit_cmd(const json& cfg) {
  const auto prob = problem_from(cfg);
  const auto report = report_from(cfg, prob);
  const auto basis = ccr::build_ccr_basis(prob.rho, cfg.at("tolerances").at("gap").get<double>());
  const auto u = ccr::kernel_to_limit(prob.kernel, report, basis);
  const auto ps = cfg.at("p_list").get<std::vector<int>>();
  const auto lim = limit_moments(cfg, u, basis, ps);
  Artifacts a;
  a.result = {{"limit", ccr::to_json(u)}, {"c", u.c}};
  json sigma = json::array();
  for (const auto& o : basis.oscillator_pairs) sigma.push_back({{"j", o.j + 1}, {"k", o.k + 1}, {"sigma_sq", o.sigma_sq}});
  a.result["oscillators"] = sigma;
  std::vector<std::vector<std::string>> rows;
  json moments = json::array();
  for (int p : ps) {
    const double w = lim.wick.count(p) ? lim.wick.at(p) : NAN;
    const double f = lim.fock.count(p) ? lim.fock.at(p) : NAN;
    const double diff = std::abs(w - f);
    rows.push_back({std::to_string(p), fmt(w), fmt(f), fmt(diff)});
    moments.push_back({{"p", p}, {"wick", finite_or_null(w)}, {"fock", finite_or_null(f)}, {"abs_diff", finite_or_null(diff)}});
  }
  a.result["moments"] = moments;
  a.tables["limit_moments.csv"] = csv({"p", "wick", "fock", "abs_diff"}, rows);
  return a;
}

// Compares each oscillator block of the limit with the display form
// (Q^2 + P^2 - 2 sigma^2) / sigma^2 and reports the scale and residual.
json oscillator_forms(const ccr::LimitPolynomial& u, const ccr::CCRBasis& basis) {
  const ccr::Poly poly = ccr::limit_poly(u, basis);
  json out = json::array();
  const int nc = basis.num_classical();
  for (int o = 0; o < basis.num_oscillators(); ++o) {
    const int q = nc + 2 * o, p = q + 1;
    const double s2 = basis.oscillator_pairs[o].sigma_sq;
    auto coeff = [&](const ccr::Word& w) {
      const auto it = poly.terms().find(ccr::canonical(w, basis));
      return it == poly.terms().end() ? Complex(0.0) : it->second;
    };
    const Complex cqq = coeff({q, q}), cpp = coeff({p, p});
    const Complex cqp = coeff({q, p}) + coeff({p, q});
    const double scale = cqq.real() * s2;
    // Residual of the quadratic block against scale * display form.
    const double residual = std::max({std::abs(cqq - scale / s2), std::abs(cpp - scale / s2), std::abs(cqp)});
    out.push_back({{"oscillator", o},
                   {"j", basis.oscillator_pairs[o].j + 1},
                   {"k", basis.oscillator_pairs[o].k + 1},
                   {"sigma_sq", s2},
                   {"coeff_qq", cqq.real()},
                   {"coeff_pp", cpp.real()},
                   {"coeff_qp", cqp.real()},
                   {"display_scale", scale},
                   {"residual", residual}});
  }
  return out;
}

Artifacts test_sim(const json& cfg, int threads) {
  const json& t = cfg.at("test");
  apps::TestSpec spec{state_from(cfg.at("state"))};
  spec.alpha = t.at("alpha").get<double>();
  spec.mc_replicates = t.at("replicates").get<std::int64_t>();
  spec.limit_draws = t.at("limit_draws").get<std::int64_t>();
  spec.interval_kind = t.at("interval_kind") == "upper" ? apps::IntervalKind::upper : apps::IntervalKind::equal_tail;
  spec.base = t.at("base") == "n" ? Scaling::Base::n : Scaling::Base::n_minus_1;
  spec.trunc = t.at("trunc").get<int>();
  spec.seed = cfg.at("seed").get<std::uint64_t>();
  spec.threads = threads;
  spec.budget = budget_from(cfg);
  const double gap = cfg.at("tolerances").at("gap").get<double>();

  const Kernel k = apps::goodness_kernel(spec.null_state, gap);
  const auto report = kernel_components(k, spec.null_state);
  const auto basis = ccr::build_ccr_basis(spec.null_state, gap);
  const auto u = ccr::kernel_to_limit(k, report, basis);

  if (t.at("interval").is_null()) {
    spec.interval = apps::limit_interval(spec.null_state, spec.alpha, spec.interval_kind, spec.limit_draws, spec.seed,
                                         threads, spec.trunc);
  } else {
    const json& iv = t.at("interval");
    spec.interval = std::pair{iv[0].is_null() ? -INFINITY : iv[0].get<double>(),
                              iv[1].is_null() ? INFINITY : iv[1].get<double>()};
  }
  std::optional<DensityMatrix> alt;
  if (!t.at("alternative").is_null()) alt = state_from(t.at("alternative"));

  Artifacts a;
  json results = json::array();
  std::vector<std::vector<std::string>> rows;
  std::vector<double> ns, betas;
  for (int n : cfg.at("n_list").get<std::vector<int>>()) {
    spec.n = n;
    const auto r = apps::run_test(spec, alt);
    results.push_back(apps::to_json(r));
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); };
    rows.push_back({std::to_string(n), fmt(r.alpha_hat), fmt(r.alpha_se), opt(r.beta_hat), opt(r.beta_se)});
    if (r.beta_hat) {
      ns.push_back(n);
      betas.push_back(*r.beta_hat);
    }
  }
  a.result = {{"interval", {finite_or_null(spec.interval->first), finite_or_null(spec.interval->second)}},
              {"results", results},
              {"limit", ccr::to_json(u)},
              {"oscillator_form", oscillator_forms(u, basis)}};
  if (betas.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 1; i < betas.size(); ++i) decreasing = decreasing && betas[i] < betas[i - 1];
    // Least-squares slope of log(beta) against n, over the positive betas.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
      if (!(betas[i] > 0)) continue;
      const double y = std::log(betas[i]);
      sx += ns[i];
      sy += y;
      sxx += ns[i] * ns[i];
      sxy += ns[i] * y;
      m += 1;
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m >= 2 && denom > 0) ? (m * sxy - sx * sy) / denom : NAN;
    a.result["beta_trend"] = {{"strictly_decreasing", decreasing}, {"log_slope", finite_or_null(slope)}};
  }
  a.tables["test.csv"] = csv({"n", "alpha_hat", "alpha_se", "beta_hat", "beta_se"}, rows);
  return a;
}

Artifacts metrology(const json& cfg) {
  const auto prob = problem_from(cfg);
  const json& m = cfg.at("metrology");
  const double t = m.at("t").get<double>(), g1 = m.at("g1").get<double>(), g2 = m.at("g2").get<double>();
  const Budget budget = budget_from(cfg);
  Artifacts a;
  json results = json::array();
  std::vector<std::vector<std::string>> rows;
  std::vector<double> gaps;
  double xi1 = 0.0, limit = 0.0;
  for (int n : cfg.at("n_list").get<std::vector<int>>()) {
    const auto r = apps::metrology_overlap(prob.kernel, prob.rho, t, g1, g2, n, budget);
    xi1 = r.xi1;
    limit = r.limit;
    const double gap = std::abs(r.overlap - r.limit);
    gaps.push_back(gap);
    json e = apps::to_json(r);
    e["abs_gap"] = gap;
    results.push_back(e);
    rows.push_back({std::to_string(n), fmt(r.overlap.real()), fmt(r.overlap.imag()), fmt(r.limit), fmt(gap)});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
  a.result = {{"xi1", xi1}, {"limit", limit}, {"results", results}, {"gap_strictly_decreasing", decreasing}};
  a.tables["overlap.csv"] = csv({"n", "overlap_re", "overlap_im", "limit", "abs_gap"}, rows);
  return a;
}

Artifacts hermite_check(const json& cfg) {
  const json& h = cfg.at("hermite");
  const int max_order = h.at("max_order").get<int>();
  const int trunc = h.at("trunc").get<int>();
  const double tail = cfg.at("tolerances").at("tail").get<double>();
  const double tol = cfg.at("tolerances").at("hermite").get<double>();
  Artifacts a;
  json checks = json::array();
  std::vector<std::vector<std::string>> rows;
  double worst = 0.0;
  for (const auto& s : h.at("sigma_sq_list")) {
    const double s2 = s.get<double>();
    for (int total = 1; total <= max_order; ++total)
      for (int n = total; n >= 0; --n) {
        const int m = total - n;
        const auto r = ccr::hermite_orthogonality_check(n, m, s2, trunc, max_order, tail);
        worst = std::max(worst, r.max_residual);
        checks.push_back({{"sigma_sq", s2}, {"n", n}, {"m", m}, {"max_residual", r.max_residual},
                          {"worst_a", r.worst_a}, {"worst_b", r.worst_b}});
        rows.push_back({fmt(s2), std::to_string(n), std::to_string(m), fmt(r.max_residual)});
      }
  }
  if (worst >= tol)
    throw ToleranceError("Hermite orthogonality residual " + fmt(worst) + " exceeds " + fmt(tol));
  a.result = {{"max_residual", worst}, {"checks", checks}};
  a.tables["hermite.csv"] = csv({"sigma_sq", "n", "m", "max_residual"}, rows);
  return a;
}

}  // namespace

Artifacts execute(const Config& config, int threads) {
  const json& cfg = config.normalized;
  if (threads < 1) throw ValidationError("--threads must be >= 1");
  Artifacts a;
  if (config.command == "decompose") a = decompose(cfg);
  else if (config.command == "moments") a = moment_table(cfg, "moments.csv");
  else if (config.command == "convergence") a = convergence(cfg);
  else if (config.command == "limit") a = limit_cmd(cfg);
  else if (config.command == "test-sim") a = test_sim(cfg, threads);
  else if (config.command == "metrology") a = metrology(cfg);
  else if (config.command == "hermite-check") a = hermite_check(cfg);
  else throw ValidationError("unknown command '" + config.command + "'");
  a.result["command"] = config.command;
  return a;
}

}  // namespace qustat::cli

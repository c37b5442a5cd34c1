#pragma once

// Command dispatch for the swankit tool. Kept in a header so tests can call
// run_command in-process with captured streams.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swankit/acceptance.hpp"
#include "swankit/config.hpp"

namespace swankit {

namespace cli {

inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kCheckFailed = 2;

/// 17 significant digits; round-trips every double.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<double> row) { rows_.push_back(std::move(row)); }
  std::size_t size() const { return rows_.size(); }

  std::string csv() const {
    std::string s;
    for (std::size_t i = 0; i < header_.size(); ++i) s += (i ? "," : "") + header_[i];
    s += '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + num(r[i]);
      s += '\n';
    }
    return s;
  }

  nlohmann::json json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rows_) {
      nlohmann::json o;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::isfinite(r[i])) o[header_[i]] = r[i];
        else o[header_[i]] = num(r[i]);
      }
      rows.push_back(o);
    }
    return rows;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct Options {
  std::vector<std::string> configs;
  std::string out;
  std::size_t samples = 201;
  std::size_t k = 5;
  int j = 0;
  std::string grid;
  std::optional<double> tol;
  bool json = false;
};

/// A check with the tolerance it was judged against.
struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool passed = false;
};

class Report {
 public:
  void check(std::string name, double value, double tol) {
    checks_.push_back({std::move(name), value, tol, value <= tol});
  }
  /// Pointwise reports carry their own mixed abs/rel bound; `tol` is the abs part.
  void check(std::string name, const PointwiseReport& p, double tol) {
    checks_.push_back({std::move(name), p.max_abs_diff, tol, p.passed()});
  }
  void flag(std::string name, bool ok) { checks_.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok}); }
  void info(const std::string& key, nlohmann::json v) { info_[key] = std::move(v); }
  void table(const Table& t) { table_ = t.json(); }

  bool passed() const {
    for (const auto& c : checks_) {
      if (!c.passed) return false;
    }
    return true;
  }

  nlohmann::json json() const {
    nlohmann::json j = info_;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks_) {
      j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"passed", c.passed}});
    }
    if (!table_.is_null()) j["rows"] = table_;
    j["passed"] = passed();
    return j;
  }

  std::string text() const {
    std::ostringstream os;
    for (const auto& c : checks_) {
      os << (c.passed ? "ok    " : "FAIL  ") << c.name;
      if (c.tol > 0.0) os << " = " << acceptance::Tally::fmt(c.value) << " (tol " << acceptance::Tally::fmt(c.tol) << ")";
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<Check> checks_;
  nlohmann::json info_ = nlohmann::json::object();
  nlohmann::json table_;
};

inline Grid parse_grid(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("--grid expects MIN:MAX:N, got '" + s + "'");
  try {
    std::size_t used = 0;
    Grid g;
    g.x_min = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("");
    g.x_max = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("");
    const long long n = std::stoll(parts[2], &used);
    if (used != parts[2].size() || n < 16) throw std::invalid_argument("");
    g.n = static_cast<std::size_t>(n);
    if (!(g.x_min < g.x_max)) throw std::invalid_argument("");
    return g;
  } catch (const std::logic_error&) {
    throw ConfigError("--grid expects MIN:MAX:N with MIN < MAX and N >= 16, got '" + s + "'");
  }
}

inline ModelConfig load(const Options& o) {
  if (o.configs.empty()) throw ConfigError("--config is required");
  ModelConfig c = load_config(o.configs.front());
  if (!o.grid.empty()) {
    const Grid g = parse_grid(o.grid);
    c.domain = {g.x_min, g.x_max};
    c.grid_n = g.n;
    if (!c.domain.contains(c.x0)) throw ConfigError("--grid domain must contain x0");
  }
  if (o.tol && !(*o.tol > 0.0)) throw ConfigError("--tol must be positive");
  return c;
}

inline std::vector<double> sample_points(Interval iv, std::size_t n) {
  if (n < 2) throw ConfigError("--samples must be at least 2");
  return uniform_points(iv, n);
}

struct Output {
  std::ostream& out;
  std::ostream& err;
  const Options& opt;

  /// CSV to --out (or stdout), JSON report to stdout with --json.
  int finish(const Report& r, const Table* t) const {
    if (t && !opt.out.empty()) {
      std::ofstream f(opt.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write '" + opt.out + "'");
      f << t->csv();
    }
    if (opt.json) {
      out << r.json().dump(2) << '\n';
    } else {
      if (t && opt.out.empty()) out << t->csv();
      err << r.text();
    }
    return r.passed() ? kOk : kCheckFailed;
  }
};

inline HermitizedModel hermitized(const Model& m) {
  const SwansonParams& p = m.config.params;
  return hermitize(build_hamiltonian(p, m.eta), gauge_log_derivative(p, m.eta, m.config.domain), m.config.domain,
                   {m.config.tol.identity, m.config.tol.identity});
}

inline int cmd_hermitize(const Output& io) {
  ModelConfig c = load(io.opt);
  if (io.opt.tol) c.tol.identity = *io.opt.tol;
  const Model m = build_model(c);
  const HermitizedModel h = hermitized(m);
  Table t({"x", "V_eff", "sigma"});
  for (const double x : sample_points(c.domain, io.opt.samples)) t.add({x, evaluate(h.v_eff, x), evaluate(h.sigma, x)});
  Report r;
  r.check("sup |h_1 + w'|", h.first_order_residual, c.tol.identity);
  r.check("sup |h - h^T|", h.self_adjoint_check, c.tol.identity);
  const PointwiseReport closed =
      compare_pointwise(h.v_eff, effective_potential_closed_form(c.params, m.eta), chebyshev_points(c.domain),
                        {c.tol.identity, c.tol.identity});
  r.check("sup |V_eff - closed form|", closed, c.tol.identity);
  r.info("command", "hermitize");
  r.info("tol", c.tol.identity);
  if (io.opt.json) r.table(t);
  return io.finish(r, &t);
}

inline int cmd_pdm(const Output& io) {
  ModelConfig c = load(io.opt);
  if (io.opt.tol) c.tol.composite = *io.opt.tol;
  const Model m = build_model(c);
  if (!m.mass || !m.cv) throw ConfigError("pdm needs m_expr, or a positive a_expr with omega_tilde > 0");
  const PdmHamiltonian h = pdm_hamiltonian(c.params, *m.mass, *m.cv, {c.tol.composite, c.tol.composite});
  Table t({"x", "m", "u", "V"});
  for (const double x : sample_points(c.domain, io.opt.samples)) {
    t.add({x, evaluate(m.mass->m, x), m.cv->u(x), evaluate(h.potential, x)});
  }
  Report r;
  r.check("sup |PDM h - hermitized h|", h.agreement, c.tol.composite);
  const Interval ur = m.cv->u_range();
  r.info("command", "pdm");
  r.info("tol", c.tol.composite);
  r.info("u_range", {ur.lo, ur.hi});
  if (io.opt.json) r.table(t);
  return io.finish(r, &t);
}

inline const TypeAData& require_typea(const ModelConfig& c) {
  if (!c.typea) throw ConfigError("this command needs a 'typea' block");
  return *c.typea;
}

inline int cmd_typea_check(const Output& io) {
  ModelConfig c = load(io.opt);
  if (io.opt.tol) c.tol.nfold = c.tol.invariance = *io.opt.tol;
  const TypeAData& d = require_typea(c);
  Report r;
  r.info("command", "typea-check");

  const SectorSearch s = find_sector(d, c.tol.invariance);
  r.check("invariance remainder", s.best.remainder, c.tol.invariance);
  r.info("sign", sign_name(s.best.sign));
  r.info("c", s.best.c);
  nlohmann::json M = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.best.M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < s.best.M.cols(); ++k) row.push_back(s.best.M(i, k));
    M.push_back(row);
  }
  r.info("invariance_matrix", M);
  const SectorSpectrum sp = sector_spectrum(s.best.M);
  r.info("sector_eigenvalues", sp.real_eigenvalues);

  const ScalarExpr B0 =
      c.B0_expr ? detail::parse_field(*c.B0_expr, Var::u, "B0_expr") : ScalarExpr(0.0) * ScalarExpr::variable(Var::u);
  const ScalarExpr B2 = c.B2_expr ? detail::parse_field(*c.B2_expr, Var::u, "B2_expr") : ScalarExpr(0.5);
  const Interval dom = c.domain;
  const auto samples = chebyshev_points(dom);
  const NecessaryConditionReport nc =
      verify_necessary_condition(F_functions(c.params, B0, B2), c.params.omega_tilde(), samples,
                                 {c.tol.identity, c.tol.identity});
  r.check("sup |F1|", nc.f1, c.tol.identity);
  r.check("sup |2 F2 + wt|", nc.two_f2, c.tol.identity);
  r.check("sup |4 F3 + wt|", nc.four_f3, c.tol.identity);

  if (c.B0_expr) {
    require_regular(d, dom);
    const PointwiseReport nf =
        sup_norm(nfold_condition_residual(c.params, B0, d, s.best.sign), samples, c.tol.nfold);
    r.check("sup |F0 - V_N|", nf.max_abs_diff, c.tol.nfold);
  }
  return io.finish(r, nullptr);
}

inline int cmd_riccati(const Output& io) {
  ModelConfig c = load(io.opt);
  if (io.opt.tol) c.tol.nfold = *io.opt.tol;
  const TypeAData& d = require_typea(c);
  SolveOptions so;
  so.domain = c.domain;
  so.tol = c.tol.nfold;
  so.invariance_tol = c.tol.invariance;
  const NfoldSolution s = solve_nfold_b0(c.params, d, io.opt.j, so);
  const ScalarExpr res = nfold_condition_residual(c.params, s.B0, s.data, s.sign);
  Table t({"u", "B0", "residual"});
  const double gap = 1e-6 * s.domain.width();
  for (const double u : sample_points(s.domain, io.opt.samples)) {
    bool near_pole = false;
    for (const double z : s.poles) near_pole = near_pole || std::abs(u - z) < gap;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.add({u, near_pole ? nan : evaluate(s.B0, Var::u, u), near_pole ? nan : evaluate(res, Var::u, u)});
  }
  Report r;
  r.check("N-fold residual", s.residual, c.tol.nfold);
  r.flag("solver", s.ok);
  r.info("command", "riccati");
  r.info("R", s.data.R);
  r.info("energy", s.energy);
  r.info("poles", s.poles);
  r.info("diagnostics", s.diagnostics);
  if (io.opt.json) r.table(t);
  return io.finish(r, &t);
}

inline int cmd_spectrum(const Output& io) {
  ModelConfig c = load(io.opt);
  if (io.opt.tol) c.tol.spectral = *io.opt.tol;
  if (io.opt.k < 1) throw ConfigError("--k must be at least 1");
  const Model m = build_model(c);
  const IsospectralReport rep = isospectral_report(c.params, m.eta, c.grid(), io.opt.k);
  const DerivedConstants dc = derive_constants(c.params);
  const bool closed = dc.Omega2 > 0.0 && c.b_mode == BMode::constant_commutator;
  Table t({"n", "eigenvalue", "eigenvalue_extrapolated", "closed_form", "residual", "residual_extrapolated", "tol"});
  Report r;
  for (std::size_t n = 0; n < rep.entries.size(); ++n) {
    const auto& e = rep.entries[n];
    t.add({static_cast<double>(n), e.eigenvalue, e.eigenvalue_extrapolated,
           closed ? harmonic_level(c.params, n) : std::numeric_limits<double>::quiet_NaN(), e.residual,
           e.residual_extrapolated, c.tol.spectral});
    r.check("H-residual n=" + std::to_string(n), e.residual_extrapolated, c.tol.spectral);
  }
  r.flag("Sturm certificates", rep.spectrum.certified());
  r.flag("all eigenvalues real", rep.all_real);
  r.info("command", "spectrum");
  r.info("all_positive", rep.all_positive);
  r.info("notes", rep.notes);
  if (io.opt.json) r.table(t);
  return io.finish(r, &t);
}

/// Every check a configuration supports, in one report.
inline Report config_checks(const ModelConfig& c) {
  Report r;
  const Model m = build_model(c);
  const HermitizedModel h = hermitized(m);
  r.check("sup |h - h^T|", h.self_adjoint_check, c.tol.identity);
  if (m.mass && m.cv && c.b_mode == BMode::constant_commutator) {
    const PdmHamiltonian p = pdm_hamiltonian(c.params, *m.mass, *m.cv, {c.tol.composite, c.tol.composite});
    r.check("sup |PDM h - hermitized h|", p.agreement, c.tol.composite);
  }
  if (c.params.omega_tilde() > 0.0) {
    const IsospectralReport s = isospectral_report(c.params, m.eta, c.grid(), 3);
    double worst = 0.0;
    for (const auto& e : s.entries) worst = std::max(worst, e.residual_extrapolated);
    r.check("H-residual (3 lowest)", worst, c.tol.spectral);
    r.flag("Sturm certificates", s.spectrum.certified());
    const auto xs = chebyshev_points(c.domain, 21);
    bool constant_mass = m.mass.has_value();
    for (const double x : xs) constant_mass = constant_mass && evaluate(m.mass->m, x) == evaluate(m.mass->m, xs[0]);
    if (constant_mass && c.b_mode == BMode::constant_commutator && derive_constants(c.params).Omega2 > 0.0) {
      double err = 0.0;
      for (std::size_t n = 0; n < s.entries.size(); ++n) {
        err = std::max(err, std::abs(s.entries[n].eigenvalue_extrapolated - harmonic_level(c.params, n)));
      }
      r.check("|E_n - closed form|", err, 1e-4);
    }
  }
  if (c.typea) {
    r.check("invariance remainder", find_sector(*c.typea, c.tol.invariance).best.remainder, c.tol.invariance);
    if (c.params.alpha * c.params.beta == 0.0) {
      SolveOptions so;
      so.domain = c.domain;
      so.tol = c.tol.nfold;
      const NfoldSolution s = solve_nfold_b0(c.params, *c.typea, 0, so);
      r.check("N-fold residual (j=0)", s.residual, c.tol.nfold);
    }
  }
  return r;
}

inline int cmd_verify(const Output& io) {
  nlohmann::json j;
  j["command"] = "verify";
  j["criteria"] = nlohmann::json::array();
  bool ok = true;
  run_acceptance([&](const CriterionResult& r) {
    ok = ok && r.passed;
    if (io.opt.json) {
      j["criteria"].push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail},
                               {"seconds", r.seconds}, {"budget", r.budget}});
    } else {
      io.out << format_result(r) << '\n' << std::flush;
    }
  });
  j["configs"] = nlohmann::json::object();
  for (const auto& path : io.opt.configs) {
    ModelConfig c = load_config(path);
    const Report r = config_checks(c);
    ok = ok && r.passed();
    if (io.opt.json) {
      j["configs"][path] = r.json();
    } else {
      io.out << (r.passed() ? "PASS  " : "FAIL  ") << path << '\n' << r.text();
    }
  }
  j["passed"] = ok;
  if (io.opt.json) io.out << j.dump(2) << '\n';
  return ok ? kOk : kCheckFailed;
}

}  // namespace cli

/// Runs one subcommand; returns 0 on success, 1 on configuration or
/// validation errors, 2 when a numerical check fails.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace cli;
  CLI::App app{"swankit: extended Swanson model toolkit"};
  app.require_subcommand(1);
  Options o;
  const auto add_common = [&](CLI::App* s) {
    s->add_option("--config", o.configs, "model configuration (JSON)")->check(CLI::ExistingFile)->take_last();
    s->add_option("--out", o.out, "write the CSV table here instead of stdout");
    s->add_option("--grid", o.grid, "override domain and grid as MIN:MAX:N");
    s->add_option("--tol", o.tol, "override the tolerance the command checks against");
    s->add_flag("--json", o.json, "machine-readable report on stdout");
  };
  CLI::App* herm = app.add_subcommand("hermitize", "V_eff and sigma tables");
  CLI::App* pdm = app.add_subcommand("pdm", "m, u and V tables of the position-dependent-mass form");
  CLI::App* ta = app.add_subcommand("typea-check", "F-conditions, N-fold residual and invariance matrix");
  CLI::App* ric = app.add_subcommand("riccati", "solve for B0 and tabulate it");
  CLI::App* spec = app.add_subcommand("spectrum", "lowest eigenvalues with residuals");
  CLI::App* ver = app.add_subcommand("verify", "acceptance suite plus checks on the given configs");
  for (CLI::App* s : {herm, pdm, ta, ric, spec}) add_common(s);
  for (CLI::App* s : {herm, pdm, ric}) s->add_option("--samples", o.samples, "rows in the table");
  spec->add_option("--k", o.k, "number of eigenvalues");
  ric->add_option("--j", o.j, "which sector eigenvalue to use (0 = lowest)");
  ver->add_option("--config", o.configs, "configuration to check (repeatable)")->check(CLI::ExistingFile);
  ver->add_flag("--json", o.json, "machine-readable report on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  const Output io{out, err, o};
  try {
    if (*herm) return cmd_hermitize(io);
    if (*pdm) return cmd_pdm(io);
    if (*ta) return cmd_typea_check(io);
    if (*ric) return cmd_riccati(io);
    if (*spec) return cmd_spectrum(io);
    return cmd_verify(io);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    err << "invalid parameters: " << e.what() << '\n';
  } catch (const UnsupportedClass& e) {
    err << "unsupported: " << e.what() << '\n';
  } catch (const SingularityError& e) {
    err << "invalid input: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kConfigError;
}

}  // namespace swankit

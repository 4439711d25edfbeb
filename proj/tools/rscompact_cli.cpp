// rscompact: command-line front end for the compactified Ruijsenaars-Schneider
// numerics. Subcommands: params, qspectrum, action-map, flow, verify.
//
// Exit codes: 0 success, 1 verification or runtime-domain failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rscompact/rscompact.hpp"

namespace {

using json = nlohmann::json;
using namespace rscompact;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<int> n;
  std::optional<double> M;
  std::optional<double> g;
  std::optional<double> a;
  std::optional<double> y;
  bool negative_y = false;
  std::uint64_t seed = kDefaultSeed;
  int samples = 100;
  std::string format;
  std::string output;
  Tolerances tol;

  // command specific
  std::string suite = "all";
  std::vector<double> gamma;
  std::vector<double> theta;
  double t_final = 1.0;
  double dt = 1e-3;
  double fd_step = 1e-4;
  int every = 1;
};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ' ';
    out += fmt(v[k]);
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(v[k]);
  }
  return out;
}

std::optional<int> integer_M(double M) {
  const double r = std::round(M);
  if (std::abs(M - r) > 1e-9 * std::max(1.0, std::abs(M)) || r < 1.0) return std::nullopt;
  return static_cast<int>(r);
}

CouplingParams resolve_params(const RunConfig& cfg) {
  if (!cfg.n) throw UsageError("--n is required");
  const bool quantum_style = cfg.M.has_value() || cfg.g.has_value();
  const bool raw_style = cfg.a.has_value() || cfg.y.has_value();
  if (quantum_style == raw_style) {
    throw UsageError("supply exactly one of (--M, --g) or (--a, --y)");
  }
  try {
    if (quantum_style) {
      if (!cfg.M || !cfg.g) throw UsageError("--M and --g must be given together");
      const auto m = integer_M(*cfg.M);
      if (!m) throw UsageError("--M must be a positive integer");
      return derive_params(*cfg.n, *m, *cfg.g, cfg.negative_y);
    }
    if (!cfg.a || !cfg.y) throw UsageError("--a and --y must be given together");
    return CouplingParams::from_raw(*cfg.n, *cfg.a, cfg.negative_y ? -*cfg.y : *cfg.y);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

json params_json(const CouplingParams& p) {
  json j;
  j["n"] = p.n();
  j["M"] = p.M();
  j["g"] = p.g();
  j["a"] = p.a();
  j["y"] = p.y();
  return j;
}

std::string require_format(const RunConfig& cfg, const std::string& fallback,
                           std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw UsageError("format '" + f + "' is not supported by this command");
}

// ---------------------------------------------------------------------------

int cmd_params(const RunConfig& cfg, std::ostream& out) {
  const CouplingParams p = resolve_params(cfg);
  const std::string format = require_format(cfg, "json", {"json", "csv", "text"});
  const Polytope poly = polytope_of(p);
  if (format == "json") {
    json j = params_json(p);
    j["polytope"] = {{"lower", poly.g},
                     {"sum_upper", poly.cap()},
                     {"facets", {"gamma_k >= g for k = 1..n-1", "sum_k gamma_k <= M + (n-1) g"}}};
    out << j.dump(2) << '\n';
  } else if (format == "csv") {
    out << "n;M;g;a;y;facet_lower;facet_sum_upper\n";
    out << p.n() << ';' << fmt(p.M()) << ';' << fmt(p.g()) << ';' << fmt(p.a()) << ';'
        << fmt(p.y()) << ';' << fmt(poly.g) << ';' << fmt(poly.cap()) << '\n';
  } else {
    out << "n = " << p.n() << "\nM = " << fmt(p.M()) << "\ng = " << fmt(p.g())
        << "\na = " << fmt(p.a()) << "\ny = " << fmt(p.y()) << "\npolytope: gamma_k >= "
        << fmt(poly.g) << ", sum gamma <= " << fmt(poly.cap()) << '\n';
  }
  return kExitOk;
}

int cmd_qspectrum(const RunConfig& cfg, std::ostream& out) {
  const CouplingParams p = resolve_params(cfg);
  const std::string format = require_format(cfg, "json", {"json", "csv", "text"});
  const auto m = integer_M(p.M());
  if (!m) throw UsageError("quantization needs a positive integer M");
  const QuantizationData q{p.n(), *m, p.g(), p};
  const SpectrumTable table = spectrum_table(q);

  if (format == "json") {
    json params = params_json(p);
    params["M"] = *m;
    json states = json::array();
    for (const auto& row : table.rows) {
      json e = json::array();
      for (const auto& z : row.e) e.push_back({z.real(), z.imag()});
      states.push_back({{"nu", row.nu.nu}, {"actions", row.actions}, {"e", e}, {"h_real", row.h_real}});
    }
    out << json{{"params", params}, {"states", states}}.dump() << '\n';
    return kExitOk;
  }
  const char sep = format == "csv" ? ';' : '\t';
  out << "nu" << sep << "actions" << sep << "e_re" << sep << "e_im" << sep << "h_real" << '\n';
  for (const auto& row : table.rows) {
    std::vector<double> re, im;
    for (const auto& z : row.e) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
    out << join(row.nu.nu) << sep << join(row.actions) << sep << join(re) << sep << join(im) << sep
        << join(row.h_real) << '\n';
  }
  if (format == "text") {
    out << "# states " << table.rows.size() << ", action multiplicity "
        << table.max_action_multiplicity << ", min Hamiltonian distance "
        << (std::isfinite(table.min_hamiltonian_distance) ? fmt(table.min_hamiltonian_distance)
                                                          : std::string("n/a"))
        << '\n';
  }
  return kExitOk;
}

DarbouxPoint start_point(const RunConfig& cfg, const CouplingParams& p) {
  const auto m = static_cast<std::size_t>(p.n() - 1);
  DarbouxPoint pt;
  pt.gamma = cfg.gamma.empty() ? polytope_of(p).centroid() : cfg.gamma;
  pt.theta = cfg.theta.empty() ? std::vector<double>(m, 0.0) : cfg.theta;
  if (pt.gamma.size() != m || pt.theta.size() != m) {
    throw UsageError("--gamma and --theta need n-1 comma separated values");
  }
  if (polytope_membership(pt.gamma, polytope_of(p), cfg.tol.facet_refusal) != Membership::Interior) {
    throw UsageError("gamma is not in the interior of the polytope");
  }
  return pt;
}

int cmd_action_map(const RunConfig& cfg, std::ostream& out) {
  const CouplingParams p = resolve_params(cfg);
  const std::string format = require_format(cfg, "json", {"json", "csv", "text"});
  const DarbouxPoint pt = start_point(cfg, p);
  const auto alpha = action_map(pt, p, cfg.tol);
  const Membership member = polytope_membership(alpha, polytope_of(p), 1e-10);
  if (format == "json") {
    json j{{"params", params_json(p)},
           {"gamma", pt.gamma},
           {"theta", pt.theta},
           {"alpha", alpha},
           {"membership", std::string(to_string(member))}};
    out << j.dump(2) << '\n';
  } else if (format == "csv") {
    out << "gamma;theta;alpha;membership\n"
        << join(pt.gamma) << ';' << join(pt.theta) << ';' << join(alpha) << ';' << to_string(member)
        << '\n';
  } else {
    out << "gamma = " << join(pt.gamma) << "\ntheta = " << join(pt.theta) << "\nalpha = "
        << join(alpha) << "\nmembership = " << to_string(member) << '\n';
  }
  return kExitOk;
}

int cmd_flow(const RunConfig& cfg, std::ostream& out) {
  const CouplingParams p = resolve_params(cfg);
  const std::string format = require_format(cfg, "csv", {"csv", "json"});
  if (!(cfg.dt > 0.0) || !(cfg.t_final >= 0.0) || cfg.every < 1) {
    throw UsageError("flow needs --dt > 0, --t >= 0 and --every >= 1");
  }
  const DarbouxPoint p0 = start_point(cfg, p);
  FlowOptions options;
  options.fd_step = cfg.fd_step;
  options.facet_margin = cfg.tol.facet_refusal;
  const Trajectory traj = flow_rk4(hamiltonian_field(p), p0, p, cfg.t_final, cfg.dt, options);

  const double h0 = local_hamiltonian(p0, p);
  const auto alpha0 = action_map(p0, p, cfg.tol);
  double max_dh = 0.0;
  double max_dalpha = 0.0;
  json rows = json::array();
  if (format == "csv") out << "t;gamma;theta;H;alpha\n";
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const auto& q = traj.points[i];
    const double h = local_hamiltonian(q, p);
    const auto alpha = action_map(q, p, cfg.tol);
    max_dh = std::max(max_dh, std::abs(h - h0));
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      max_dalpha = std::max(max_dalpha, std::abs(alpha[k] - alpha0[k]));
    }
    const bool last = i + 1 == traj.points.size();
    if (i % static_cast<std::size_t>(cfg.every) != 0 && !last) continue;
    if (format == "csv") {
      out << fmt(traj.times[i]) << ';' << join(q.gamma) << ';' << join(q.theta) << ';' << fmt(h)
          << ';' << join(alpha) << '\n';
    } else {
      rows.push_back({{"t", traj.times[i]}, {"gamma", q.gamma}, {"theta", q.theta}, {"H", h},
                      {"alpha", alpha}});
    }
  }
  if (format == "csv") {
    out << "#footer;max_dH=" << fmt(max_dh) << ";max_dalpha=" << fmt(max_dalpha)
        << ";exited=" << (traj.exited ? 1 : 0) << ";steps=" << traj.points.size() - 1 << '\n';
  } else {
    json footer{{"max_dH", max_dh},
                {"max_dalpha", max_dalpha},
                {"exited", traj.exited},
                {"steps", traj.points.size() - 1}};
    out << json{{"params", params_json(p)}, {"trajectory", rows}, {"footer", footer}}.dump() << '\n';
  }
  if (traj.exited) {
    std::cerr << "flow left the polytope interior; trajectory truncated at t = "
              << fmt(traj.times.back()) << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const CouplingParams p = resolve_params(cfg);
  const std::string format = require_format(cfg, "text", {"text", "json", "csv"});
  if (cfg.samples < 1) throw UsageError("--samples must be positive");
  VerifyConfig vc{p, integer_M(p.M()), cfg.seed, cfg.samples, cfg.tol};
  if (!vc.M && (cfg.suite == "quantum" || cfg.suite == "all")) {
    throw UsageError("the quantum suite needs an integer M");
  }
  std::vector<VerifyReport> reports;
  try {
    reports = run_suite(cfg.suite, vc);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  bool pass = true;
  for (const auto& r : reports) pass = pass && r.pass();

  if (format == "json") {
    json suites = json::array();
    for (const auto& r : reports) {
      json checks = json::array();
      for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"samples", c.samples},
                          {"max_residual", c.max_residual},
                          {"tolerance", c.tolerance},
                          {"asserted", c.asserted},
                          {"pass", c.pass},
                          {"note", c.note}});
      }
      suites.push_back({{"suite", r.suite}, {"pass", r.pass()}, {"checks", checks}});
    }
    out << json{{"params", params_json(p)}, {"seed", cfg.seed}, {"samples", cfg.samples},
                {"suites", suites}, {"pass", pass}}
               .dump(2)
        << '\n';
  } else if (format == "csv") {
    out << "suite;check;samples;max_residual;tolerance;asserted;pass;note\n";
    for (const auto& r : reports) {
      for (const auto& c : r.checks) {
        out << r.suite << ';' << c.name << ';' << c.samples << ';' << fmt(c.max_residual) << ';'
            << fmt(c.tolerance) << ';' << c.asserted << ';' << c.pass << ';' << c.note << '\n';
      }
    }
  } else {
    for (const auto& r : reports) {
      out << "suite " << r.suite << (r.pass() ? " PASS" : " FAIL") << '\n';
      for (const auto& c : r.checks) {
        const char* status = !c.asserted ? "INFO" : (c.pass ? "PASS" : "FAIL");
        out << "  " << status << ' ' << c.name << " samples=" << c.samples
            << " max=" << fmt(c.max_residual) << " tol=" << fmt(c.tolerance);
        if (!c.note.empty()) out << "  (" << c.note << ')';
        out << '\n';
      }
    }
    out << "overall " << (pass ? "PASS" : "FAIL") << '\n';
  }
  return pass ? kExitOk : kExitFailure;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--n", cfg.n, "number of particles (n >= 2)");
  sub->add_option("--M", cfg.M, "positive integer M (with --g)");
  sub->add_option("--g", cfg.g, "coupling g > 0 (with --M)");
  sub->add_option("--a", cfg.a, "scale a > 0 (with --y)");
  sub->add_option("--y", cfg.y, "coupling y, 0 < |y| < pi/n (with --a)");
  sub->add_flag("--negative-y", cfg.negative_y, "use y < 0");
  sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  sub->add_option("--samples", cfg.samples, "samples per check")->capture_default_str();
  sub->add_option("--format", cfg.format, "json, csv or text");
  sub->add_option("--output", cfg.output, "write to this file instead of standard output");
  sub->add_option("--tol-unitarity", cfg.tol.unitarity)->capture_default_str();
  sub->add_option("--tol-eig", cfg.tol.eig_reconstruction)->capture_default_str();
  sub->add_option("--tol-alcove", cfg.tol.alcove_match)->capture_default_str();
  sub->add_option("--tol-bracket-imag", cfg.tol.bracket_imag)->capture_default_str();
  sub->add_option("--tol-singular", cfg.tol.singular)->capture_default_str();
  sub->add_option("--tol-facet", cfg.tol.facet_refusal)->capture_default_str();
}

void add_point(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--gamma", cfg.gamma, "n-1 positions (default: polytope centroid)")
      ->delimiter(',');
  sub->add_option("--theta", cfg.theta, "n-1 angles (default: zeros)")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for the compactified Ruijsenaars-Schneider system"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* params = app.add_subcommand("params", "derive (a, y) and the action polytope");
  auto* qspec = app.add_subcommand("qspectrum", "joint quantum spectra per lattice state");
  auto* amap = app.add_subcommand("action-map", "evaluate the action variables at a point");
  auto* flow = app.add_subcommand("flow", "RK4 flow of the local Hamiltonian");
  auto* verify = app.add_subcommand("verify", "run the seeded invariant suites");
  for (auto* sub : {params, qspec, amap, flow, verify}) add_common(sub, cfg);
  add_point(amap, cfg);
  add_point(flow, cfg);
  flow->add_option("--t", cfg.t_final, "final time")->capture_default_str();
  flow->add_option("--dt", cfg.dt, "step size")->capture_default_str();
  flow->add_option("--fd-step", cfg.fd_step, "finite-difference step")->capture_default_str();
  flow->add_option("--every", cfg.every, "emit every k-th step")->capture_default_str();
  verify->add_option("--suite", cfg.suite, "classical, double, quantum or all")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ostringstream buffer;
  int code = kExitOk;
  try {
    if (params->parsed()) code = cmd_params(cfg, buffer);
    else if (qspec->parsed()) code = cmd_qspectrum(cfg, buffer);
    else if (amap->parsed()) code = cmd_action_map(cfg, buffer);
    else if (flow->parsed()) code = cmd_flow(cfg, buffer);
    else code = cmd_verify(cfg, buffer);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kExitFailure;
  }

  if (cfg.output.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot open " << cfg.output << '\n';
      return kExitUsage;
    }
    file << buffer.str();
  }
  return code;
}

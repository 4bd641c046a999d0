#pragma once

// The causal2d command-line tool: check-map, separate, weak-deriv, gen-field
// and pair. Exit codes: 0 for a positive verdict, 1 for a negative one, 2 for
// bad input. Every report embeds the resolved configuration.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "causal2d/causal.hpp"
#include "causal2d/decomp.hpp"
#include "causal2d/errors.hpp"
#include "causal2d/expr.hpp"
#include "causal2d/io.hpp"
#include "causal2d/pairing.hpp"

namespace causal2d::cli {

using io::ordered_json;

enum ExitCode : int { kPositive = 0, kNegative = 1, kInputError = 2 };

struct Config {
  std::size_t grid = 256;
  std::string probes = "lattice:5x5";
  double tol = kDefaultWeakTol;
  std::size_t oracle_pairs = 10'000;
  std::uint64_t seed = 42;
  std::optional<std::string> mollifier;  ///< "center:radius"
  std::optional<std::string> report;
  bool deterministic = false;
};

inline ordered_json to_json(const Config& c) {
  ordered_json j;
  j["grid"] = c.grid;
  j["probes"] = c.probes;
  j["tol"] = c.tol;
  j["oracle_pairs"] = c.oracle_pairs;
  j["seed"] = c.seed;
  j["mollifier"] = c.mollifier ? ordered_json(*c.mollifier) : ordered_json(nullptr);
  return j;
}

/// Default seed, unless CAUSAL2D_SEED is set.
inline std::uint64_t env_seed() {
  const char* s = std::getenv("CAUSAL2D_SEED");
  if (!s || !*s) return 42;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (s[used] != '\0') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(std::string("CAUSAL2D_SEED is not an unsigned integer: '") + s + "'");
  }
}

/// "c:r" -> normalized bump centred at c with radius r.
inline Bump1D parse_mollifier(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidArgument("mollifier must be center:radius, got '" + spec + "'");
  try {
    return mollifier(std::stod(spec.substr(0, colon)), std::stod(spec.substr(colon + 1)));
  } catch (const std::invalid_argument&) {
    throw InvalidArgument("mollifier must be center:radius, got '" + spec + "'");
  }
}

/// "u_min,u_max,v_min,v_max".
inline Rect parse_rect(const std::string& spec) {
  std::vector<double> xs;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      xs.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InvalidArgument("rect must be u_min,u_max,v_min,v_max, got '" + spec + "'");
    }
  }
  if (xs.size() != 4) throw InvalidArgument("rect must be u_min,u_max,v_min,v_max, got '" + spec + "'");
  return Rect::make(xs[0], xs[1], xs[2], xs[3]);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

inline ordered_json verdict_to_json(const CausalVerdict& v) {
  ordered_json j;
  j["is_causal_iso"] = v.is_causal_iso;
  j["classification"] = to_string(v.classification);
  j["condition"] = v.condition ? ordered_json(to_string(*v.condition)) : ordered_json(nullptr);
  j["invariance_residual_forward"] = number_or_null(v.invariance_residual_forward);
  j["invariance_residual_backward"] = number_or_null(v.invariance_residual_backward);
  j["oracle_violations"] = v.oracle_violations;

  ordered_json d;
  d["structural_verdict"] = v.details.structural_verdict;
  d["homeomorphism"] = {{"roundtrip_error", v.details.homeomorphism.roundtrip_error},
                        {"codomain_overflow", v.details.homeomorphism.codomain_overflow},
                        {"ok", v.details.homeomorphism.ok}};
  if (v.details.split) {
    const SplitAnalysis& s = *v.details.split;
    auto dir = [](const std::optional<Direction>& x) { return x ? ordered_json(to_string(*x)) : ordered_json(nullptr); };
    d["split"] = {{"sigma_du", s.sigma_du},
                  {"sigma_dv", s.sigma_dv},
                  {"tau_du", s.tau_du},
                  {"tau_dv", s.tau_dv},
                  {"layout", s.layout == SplitLayout::direct    ? "direct"
                             : s.layout == SplitLayout::swapped ? "swapped"
                                                                : "none"},
                  {"phi_direction", dir(s.phi_direction)},
                  {"psi_direction", dir(s.psi_direction)}};
  } else {
    d["split"] = nullptr;
  }
  ordered_json inv = ordered_json::array();
  for (const auto& r : v.details.invariance)
    inv.push_back({{"solution", r.name}, {"forward", number_or_null(r.forward)}, {"backward", number_or_null(r.backward)}});
  d["invariance"] = std::move(inv);
  d["backward_probe_count"] = v.details.backward_probe_count;
  d["errors"] = v.details.errors;
  j["details"] = std::move(d);
  return j;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Output goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Config cfg;
  CLI::App app{"Causal structure of 2-D Minkowski spacetime: weak derivatives, wave-equation splits, causal maps"};
  app.name("causal2d");
  app.fallthrough();
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  app.add_option("--grid", cfg.grid, "grid nodes per axis")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 14));
  app.add_option("--probes", cfg.probes, "probe set: lattice:NxM[@radius] or random:K");
  app.add_option("--tol", cfg.tol, "tolerance for weakly zero residuals")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed_flag, "seed for probes and the order oracle (default: $CAUSAL2D_SEED or 42)");
  app.add_option("--oracle-pairs", cfg.oracle_pairs, "event pairs sampled by the order oracle");
  app.add_option("--report", cfg.report, "write the JSON report here instead of stdout");
  app.add_flag("--deterministic", cfg.deterministic, "omit timestamps and timings from reports");

  std::string input;
  auto* check_map = app.add_subcommand("check-map", "decide whether a plane map is a causal isomorphism");
  check_map->add_option("map", input, "map JSON file")->required();

  std::vector<std::string> outputs;
  auto* separate = app.add_subcommand("separate", "split a field into alpha(u) + beta(v)");
  separate->add_option("field", input, "field file (.json or .csv)")->required();
  separate->add_option("--mollifier", cfg.mollifier, "mollifier center:radius");
  separate->add_option("-o,--output", outputs, "alpha and beta CSV files")->expected(2);

  std::string order = "u";
  auto* weak = app.add_subcommand("weak-deriv", "test whether a weak derivative of a field vanishes");
  weak->add_option("field", input, "field file (.json or .csv)")->required();
  weak->add_option("--order", order, "u, v or uv")->check(CLI::IsMember({"u", "v", "uv"}));

  std::string source, rect_spec = "-1,1,-1,1", out_path;
  auto* gen = app.add_subcommand("gen-field", "sample an expression in u, v on a grid");
  gen->add_option("expr", source, "expression")->required();
  gen->add_option("--rect", rect_spec, "u_min,u_max,v_min,v_max");
  gen->add_option("-o,--output", out_path, "field file (.json or .csv)")->required();

  std::string phi_spec;
  auto* pair_cmd = app.add_subcommand("pair", "integrate a field against a test function");
  pair_cmd->add_option("field", input, "field file (.json or .csv)")->required();
  pair_cmd->add_option("--phi", phi_spec, "test function JSON, inline or as a file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPositive : kInputError;
  }

  const auto started = std::chrono::steady_clock::now();
  auto emit = [&](ordered_json report) {
    if (!cfg.deterministic) {
      report["generated_at"] = utc_timestamp();
      report["elapsed_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    const std::string text = report.dump(2) + "\n";
    if (cfg.report) io::write_atomic(*cfg.report, text);
    else out << text;
  };
  auto head = [&](const char* command) {
    ordered_json r;
    r["command"] = command;
    r["input"] = input;
    r["config"] = to_json(cfg);
    return r;
  };

  try {
    cfg.seed = seed_flag ? *seed_flag : env_seed();

    if (*check_map) {
      const PlaneMap F = io::load_map(input);
      DecisionConfig dc;
      dc.grid = cfg.grid;
      dc.probes = cfg.probes;
      dc.tol = cfg.tol;
      dc.oracle_pairs = cfg.oracle_pairs;
      dc.seed = cfg.seed;
      if (cfg.mollifier) dc.mollifier = parse_mollifier(*cfg.mollifier);
      // Probe specs and mollifiers are checked up front so that they surface as input errors.
      ProbeSet::parse(cfg.probes, Grid2D::square(F.domain(), cfg.grid), cfg.seed);
      const CausalVerdict v = decide_causal_isomorphism(F, dc);
      ordered_json r = head("check-map");
      r["kind"] = to_string(F.kind());
      r["domain"] = io::rect_to_json(F.domain());
      r["codomain"] = io::rect_to_json(F.codomain());
      r["verdict"] = detail::verdict_to_json(v);
      emit(std::move(r));
      if (cfg.report) out << "is_causal_iso: " << (v.is_causal_iso ? "true" : "false") << "\n";
      return v.is_causal_iso ? kPositive : kNegative;
    }

    if (*separate) {
      const SampledField2D f = io::load_field(input);
      const Rect& rect = f.grid().rect();
      const Bump1D phi0 = cfg.mollifier ? parse_mollifier(*cfg.mollifier)
                                        : mollifier(rect.u_range().mid(),
                                                    0.25 * std::min(rect.u_range().span(), rect.v_range().span()));
      if (!cfg.mollifier) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g:%.17g", phi0.center, phi0.radius);
        cfg.mollifier = buf;
      }
      const Separation s = additively_separate(f, phi0);
      const bool separable = s.residual < cfg.tol * std::max(1.0, f.max_abs());
      if (!outputs.empty()) {
        io::write_atomic(outputs[0], io::function_to_csv(s.alpha));
        io::write_atomic(outputs[1], io::function_to_csv(s.beta));
      }
      ordered_json r = head("separate");
      r["c"] = s.c;
      r["residual"] = s.residual;
      r["separable"] = separable;
      r["tol"] = cfg.tol;
      emit(std::move(r));
      if (cfg.report) out << "separable: " << (separable ? "true" : "false") << "\n";
      return separable ? kPositive : kNegative;
    }

    if (*weak) {
      const SampledField2D f = io::load_field(input);
      const ProbeSet probes = ProbeSet::parse(cfg.probes, f.grid(), cfg.seed);
      const WeakFunctional F = order == "u" ? weak_du(f) : order == "v" ? weak_dv(f) : weak_mixed(f);
      const double res = residual(F, probes);
      const bool zero = res < cfg.tol;
      ordered_json r = head("weak-deriv");
      r["order"] = order;
      r["residual"] = res;
      r["tol"] = cfg.tol;
      r["verdict"] = zero ? "zero" : "nonzero";
      r["probe_count"] = probes.size();
      emit(std::move(r));
      if (cfg.report) out << "verdict: " << (zero ? "zero" : "nonzero") << "\n";
      return zero ? kPositive : kNegative;
    }

    if (*gen) {
      const expr::ExprPtr e = expr::parse(source);
      const Grid2D grid = Grid2D::square(parse_rect(rect_spec), cfg.grid);
      const SampledField2D f =
          SampledField2D::sample(grid, [&](double u, double v) { return e->eval(expr::Bindings::uv(u, v)); });
      io::save_field(out_path, f);
      out << "wrote " << out_path << " (" << grid.nu() << "x" << grid.nv() << ")\n";
      return kPositive;
    }

    if (*pair_cmd) {
      const SampledField2D f = io::load_field(input);
      const std::string text =
          std::filesystem::exists(phi_spec) ? io::read_text(phi_spec) : phi_spec;
      const TestFunction2D phi = io::test_function_from_json(io::parse_json(text, "--phi"));
      const double value = pair(f, phi);
      ordered_json r = head("pair");
      r["phi"] = io::parse_json(text, "--phi");
      r["value"] = value;
      r["l1_norm"] = l1_norm(phi, f.grid());
      emit(std::move(r));
      return kPositive;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace causal2d::cli

#pragma once

// Command-line surface. run() never prints numerical results; everything
// goes to files under RunConfig::out.
//
// Exit codes: 0 all requested checks pass, 1 a check failed or a numeric
// error occurred, 2 configuration error, 3 I/O error.
//
// Artifacts (CSV columns are fixed):
//   identities   identities.json
//   diagnose     diagnose.json, <test>.json, <test>_mu_star.csv, inputs/*.tfwf
//   operator     operator.json, operator.tfwf, spectrum.csv (index,re,im,modulus), inputs/a.tfwf
//   weights      weights.json
//   demo         demo_<case>.json

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "suite.hpp"
#include "tfweyl/tfweyl.hpp"

namespace tfweyl::cli {

using json = io::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { identities, diagnose, op, weights, demo };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::identities: return "identities";
    case Command::diagnose: return "diagnose";
    case Command::op: return "operator";
    case Command::weights: return "weights";
    case Command::demo: return "demo";
  }
  return "?";
}

inline Command command_from_string(const std::string& s) {
  for (Command c : {Command::identities, Command::diagnose, Command::op, Command::weights, Command::demo})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown command '" + s + "'");
}

inline const std::vector<std::string>& demo_cases() {
  static const std::vector<std::string> c{"chirp-weyl", "rank-one", "localization-identity", "band-limited", "battery"};
  return c;
}

// ---------------------------------------------------------------------------
// Fixture specs

inline FixturePtr fixture_from_json(const json& j) {
  const json spec = j.is_string() ? json{{"kind", j.get<std::string>()}} : j;
  if (!spec.is_object() || !spec.contains("kind")) throw ConfigError("fixture spec needs a kind");
  const std::string kind = spec.at("kind").get<std::string>();
  const auto num = [&](const char* key, double dflt) { return spec.contains(key) ? spec.at(key).get<double>() : dflt; };
  const auto sub = [&](const char* key) {
    if (!spec.contains(key)) throw ConfigError(kind + " fixture needs '" + key + "'");
    return fixture_from_json(spec.at(key));
  };
  if (kind == "gaussian") return Fixture::gaussian(num("center", 0.0), num("width", 1.0), num("modulation", 0.0));
  if (kind == "hermite") return Fixture::hermite(static_cast<int>(num("order", 0)));
  if (kind == "chirp") return Fixture::chirp_symbol(static_cast<int>(num("sign", -1)), sub("factor"));
  if (kind == "bump") return Fixture::bump(num("a", 0.0), num("b", 1.0), static_cast<int>(num("smoothness", 1)));
  if (kind == "constant") {
    if (spec.contains("value") && spec.at("value").is_array())
      return Fixture::constant({spec.at("value").at(0).get<double>(), spec.at("value").at(1).get<double>()});
    return Fixture::constant(num("value", 1.0));
  }
  if (kind == "exp_quadratic") return Fixture::exp_quadratic(num("coefficient", 1.0));
  if (kind == "tensor")
    return Fixture::tensor(sub("first"), sub("second"), spec.contains("conjugate_second") && spec.at("conjugate_second").get<bool>());
  if (kind == "reflect") return Fixture::reflect(sub("inner"));
  throw ConfigError("unknown fixture kind '" + kind + "'");
}

inline json fixture_to_json(const Fixture& f) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, fixture::Gaussian>)
          return {{"kind", "gaussian"}, {"center", v.center}, {"width", v.width}, {"modulation", v.modulation}};
        else if constexpr (std::is_same_v<T, fixture::Hermite>) return {{"kind", "hermite"}, {"order", v.order}};
        else if constexpr (std::is_same_v<T, fixture::ChirpSymbol>)
          return {{"kind", "chirp"}, {"sign", v.sign}, {"factor", fixture_to_json(*v.factor)}};
        else if constexpr (std::is_same_v<T, fixture::Bump>)
          return {{"kind", "bump"}, {"a", v.a}, {"b", v.b}, {"smoothness", v.smoothness}};
        else if constexpr (std::is_same_v<T, fixture::Constant>)
          return {{"kind", "constant"}, {"value", {v.value.real(), v.value.imag()}}};
        else if constexpr (std::is_same_v<T, fixture::ExpQuadratic>)
          return {{"kind", "exp_quadratic"}, {"coefficient", v.coefficient}};
        else if constexpr (std::is_same_v<T, fixture::Tensor>)
          return {{"kind", "tensor"},
                  {"first", fixture_to_json(*v.first)},
                  {"second", fixture_to_json(*v.second)},
                  {"conjugate_second", v.conjugate_second}};
        else return {{"kind", "reflect"}, {"inner", fixture_to_json(*v.inner)}};
      },
      f.variant());
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  Command command = Command::identities;
  std::optional<std::size_t> n;  // default depends on the command
  std::optional<double> L;
  std::size_t stride = 4;
  std::string weight = "log1p";
  double a = 0.5;
  double c = 1.0;
  FixturePtr f = Fixture::hermite(2);
  FixturePtr g = Fixture::gaussian(0.5, 1.0, 1.0);
  FixturePtr psi = Fixture::gaussian();
  FixturePtr gamma = Fixture::gaussian();
  FixturePtr symbol = Fixture::tensor(Fixture::gaussian(), Fixture::gaussian());
  std::vector<double> lambda_list{0.5, 1.0, 2.0, 4.0};
  double mu_max = 16.0;
  double mu_step = 0.5;
  std::string out = "tfweyl_out";
  std::uint64_t seed = 5;
  std::string demo_case = "all";

  Weight make_weight() const {
    const WeightKind k = weight_kind_from_string(weight);
    if (k == WeightKind::log1p) return Weight::log1p(c);
    return Weight(k, a, c);
  }

  DiagnosticConfig diagnostic_config() const {
    DiagnosticConfig d;
    d.lambda_list = lambda_list;
    d.mu_grid = DiagnosticConfig::default_mu_grid(mu_max, mu_step);
    d.stride = stride;
    return d;
  }

  /// 1-d grid of the command: diagnose uses the equal-spacing Wigner grid.
  Axis base() const {
    if (command == Command::diagnose) {
      const std::size_t nn = n.value_or(64);
      return L ? Axis(nn, *L) : diagnostic_base(nn);
    }
    return Axis(n.value_or(128), L.value_or(12.0));
  }

  /// Throws ConfigError on anything run() could not act on.
  void validate() const {
    try {
      make_weight();
      base();
      diagnostic_config().validate();
    } catch (const error& e) {
      throw ConfigError(e.what());
    }
    if (stride == 0) throw ConfigError("stride must be positive");
    if (out.empty()) throw ConfigError("output directory must be set");
    if (command == Command::demo && demo_case != "all" &&
        std::find(demo_cases().begin(), demo_cases().end(), demo_case) == demo_cases().end())
      throw ConfigError("unknown demo case '" + demo_case + "'");
  }

  json to_json() const {
    const Axis b = base();
    json j;
    j["command"] = to_string(command);
    j["n"] = b.n;
    j["l"] = b.half_extent;
    j["stride"] = stride;
    j["weight"] = io::to_json(make_weight());
    j["fixtures"] = {{"f", fixture_to_json(*f)},
                     {"g", fixture_to_json(*g)},
                     {"psi", fixture_to_json(*psi)},
                     {"gamma", fixture_to_json(*gamma)},
                     {"a", fixture_to_json(*symbol)}};
    j["lambda"] = lambda_list;
    j["mu_max"] = mu_max;
    j["mu_step"] = mu_step;
    j["seed"] = seed;
    j["case"] = demo_case;
    return j;
  }
};

/// Applies a JSON config object; unknown keys are errors.
inline void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "command") cfg.command = command_from_string(v.get<std::string>());
    else if (k == "n") cfg.n = v.get<std::size_t>();
    else if (k == "l") cfg.L = v.get<double>();
    else if (k == "stride") cfg.stride = v.get<std::size_t>();
    else if (k == "weight") {
      if (v.is_string()) cfg.weight = v.get<std::string>();
      else {
        cfg.weight = v.at("kind").get<std::string>();
        if (v.contains("a")) cfg.a = v.at("a").get<double>();
        if (v.contains("c")) cfg.c = v.at("c").get<double>();
      }
    } else if (k == "a") cfg.a = v.get<double>();
    else if (k == "c") cfg.c = v.get<double>();
    else if (k == "fixtures") {
      for (auto f = v.begin(); f != v.end(); ++f) {
        const FixturePtr p = fixture_from_json(f.value());
        if (f.key() == "f") cfg.f = p;
        else if (f.key() == "g") cfg.g = p;
        else if (f.key() == "psi") cfg.psi = p;
        else if (f.key() == "gamma") cfg.gamma = p;
        else if (f.key() == "a") cfg.symbol = p;
        else throw ConfigError("unknown fixture slot '" + f.key() + "'");
      }
    } else if (k == "lambda") cfg.lambda_list = v.get<std::vector<double>>();
    else if (k == "mu_max") cfg.mu_max = v.get<double>();
    else if (k == "mu_step") cfg.mu_step = v.get<double>();
    else if (k == "out") cfg.out = v.get<std::string>();
    else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
    else if (k == "case") cfg.demo_case = v.get<std::string>();
    else throw ConfigError("unknown config key '" + k + "'");
  }
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list");
    }
    if (used != item.size()) throw ConfigError("bad number '" + item + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

/// Parses argv: the JSON file named by --config first, then explicit flags.
/// Returns std::nullopt when help was printed.
inline std::optional<RunConfig> parse(int argc, const char* const* argv) {
  CLI::App app{"Time-frequency Weyl symbol toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path, weight, lambda, out, demo_case, fixture_a;
  std::size_t n = 0, stride = 0;
  double L = 0, a = 0, c = 0, mu_max = 0, mu_step = 0;
  std::uint64_t seed = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON run configuration");
  auto* o_n = app.add_option("--n", n, "grid size (power of two)");
  auto* o_l = app.add_option("--l", L, "grid half-extent");
  auto* o_stride = app.add_option("--stride", stride, "outer lattice stride");
  auto* o_weight = app.add_option("--weight,--kind", weight, "log1p | power | logpower");
  auto* o_a = app.add_option("--a", a, "weight exponent");
  auto* o_c = app.add_option("--c", c, "weight scale");
  auto* o_lambda = app.add_option("--lambda", lambda, "comma-separated lambda list");
  auto* o_mu_max = app.add_option("--mu-max", mu_max, "largest mu on the grid");
  auto* o_mu_step = app.add_option("--mu-step", mu_step, "mu grid step");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_seed = app.add_option("--seed", seed, "seed for randomized oracle points");
  auto* o_case = app.add_option("--case", demo_case, "demo case");
  auto* o_symbol = app.add_option("--symbol", fixture_a, "JSON fixture spec of the symbol a");
  std::vector<CLI::App*> subs;
  for (Command cmd : {Command::identities, Command::diagnose, Command::op, Command::weights, Command::demo})
    subs.push_back(app.add_subcommand(to_string(cmd)));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  RunConfig cfg;
  bool have_command = false;
  if (o_config->count()) {
    json j;
    try {
      j = json::parse(io::read_file(config_path));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config parse: ") + e.what());
    }
    try {
      apply_json(cfg, j);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config value: ") + e.what());
    }
    have_command = j.contains("command");
  }
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) {
      cfg.command = command_from_string(subs[i]->get_name());
      have_command = true;
    }
  if (!have_command) throw ConfigError("no command given");
  if (o_n->count()) cfg.n = n;
  if (o_l->count()) cfg.L = L;
  if (o_stride->count()) cfg.stride = stride;
  if (o_weight->count()) cfg.weight = weight;
  if (o_a->count()) cfg.a = a;
  if (o_c->count()) cfg.c = c;
  if (o_lambda->count()) cfg.lambda_list = parse_list(lambda);
  if (o_mu_max->count()) cfg.mu_max = mu_max;
  if (o_mu_step->count()) cfg.mu_step = mu_step;
  if (o_out->count()) cfg.out = out;
  if (o_seed->count()) cfg.seed = seed;
  if (o_case->count()) cfg.demo_case = demo_case;
  if (o_symbol->count()) {
    try {
      cfg.symbol = fixture_from_json(json::parse(fixture_a));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("symbol spec: ") + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline json check_json(const suite::Check& c) {
  json j;
  j["name"] = c.name;
  j["lhs"] = io::detail::num_json(c.lhs);
  j["rhs"] = io::detail::num_json(c.rhs);
  j["relative_error"] = io::detail::num_json(c.error);
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline json criterion_json(const suite::Criterion& c) {
  json j;
  j["id"] = c.id;
  j["title"] = c.title;
  j["pass"] = c.pass();
  j["checks"] = json::array();
  for (const auto& k : c.checks) j["checks"].push_back(check_json(k));
  j["corrected"] = json::array();
  for (const auto& k : c.corrected) j["corrected"].push_back(check_json(k));
  return j;
}

/// Demo verdict: corrected checks when present, literal ones otherwise.
inline bool demo_pass(const suite::Criterion& c) {
  if (c.corrected.empty()) return c.pass();
  return std::all_of(c.corrected.begin(), c.corrected.end(), [](const suite::Check& k) { return k.pass; });
}

inline json envelope(const RunConfig& cfg) {
  json j;
  j["tool"] = "tfweyl";
  j["command"] = to_string(cfg.command);
  j["config"] = cfg.to_json();
  return j;
}

inline void write_json(const std::filesystem::path& p, const json& j) { io::write_file(p, j.dump(2) + "\n"); }

inline suite::SuiteConfig suite_config(const RunConfig& cfg) {
  suite::SuiteConfig s;
  const Axis b = cfg.base();
  s.n = b.n;
  s.L = b.half_extent;
  s.seed = cfg.seed;
  s.diag = cfg.diagnostic_config();
  return s;
}

/// Samples a fixture, writes it under inputs/ and returns its hash.
inline std::string store_input(const RunConfig& cfg, const std::string& name, const SampledFunction& f,
                               const FixturePtr& spec) {
  return io::write_field_file(std::filesystem::path(cfg.out) / "inputs" / (name + ".tfwf"), io::encode(f),
                              {{"fixture", fixture_to_json(*spec)}, {"describe", spec->describe()}});
}

inline int identities(const RunConfig& cfg) {
  const suite::Suite s(suite_config(cfg));
  json j = envelope(cfg);
  j["criteria"] = json::array();
  bool pass = true;
  for (int id = 1; id <= suite::kCriteria; ++id) {
    const auto c = s.run(id);
    pass = pass && c.pass();
    j["criteria"].push_back(criterion_json(c));
  }
  j["pass"] = pass;
  write_json(std::filesystem::path(cfg.out) / "identities.json", j);
  return pass ? 0 : 1;
}

inline int diagnose(const RunConfig& cfg) {
  const Axis base = cfg.base();
  const Weight w = cfg.make_weight();
  const DiagnosticConfig dc = cfg.diagnostic_config();
  const std::filesystem::path out(cfg.out);
  json j = envelope(cfg);
  const bool two_d = cfg.symbol->arity() != 1;
  const auto axes = two_d ? wigner_axes(base) : std::vector<Axis>{base};
  const auto a = sample(cfg.symbol, axes);
  const auto psi = sample(cfg.psi, {base}), gamma = sample(cfg.gamma, {base});
  json inputs;
  inputs["a"] = store_input(cfg, "a", a, cfg.symbol);
  inputs["psi"] = store_input(cfg, "psi", psi, cfg.psi);
  std::vector<DecayReport> reports;
  if (two_d) {
    inputs["gamma"] = store_input(cfg, "gamma", gamma, cfg.gamma);
    const auto Psi = sample(Fixture::tensor(cfg.psi, cfg.psi), axes);
    reports = {weyl_compactness_test(a, Psi, w, dc), convolutor_test(a, Psi, w, dc),
               localization_compactness_test(a, psi, gamma, Psi, w, dc)};
  } else {
    reports = {multiplier_test(a, psi, w, dc), convolutor_test(a, psi, w, dc)};
  }
  j["inputs"] = inputs;
  j["verdicts"] = json::object();
  for (const auto& r : reports) {
    json rj = io::to_json(r, inputs);
    rj["config"] = cfg.to_json();
    write_json(out / (r.test + ".json"), rj);
    io::write_file(out / (r.test + "_mu_star.csv"), io::mu_star_csv(r));
    j["verdicts"][r.test] = to_string(r.verdict);
  }
  bool pass = true;
  if (two_d) {
    ImplicationCheck chain;
    check_implications(reports[0], reports[1], reports[2], cfg.symbol->describe(), chain);
    j["implication_violations"] = chain.violations;
    j["implication_messages"] = chain.messages;
    pass = chain.violations == 0;
  }
  j["pass"] = pass;
  write_json(out / "diagnose.json", j);
  return pass ? 0 : 1;
}

inline int op(const RunConfig& cfg) {
  const Axis base = cfg.base();
  if (cfg.symbol->arity() == 1) throw error(errc::dimension_mismatch, "operator needs a 2-d symbol");
  const std::filesystem::path out(cfg.out);
  const auto a = sample_symbol(cfg.symbol, base);
  json j = envelope(cfg);
  j["inputs"] = {{"a", store_input(cfg, "a", a, cfg.symbol)}};
  const auto T = weyl_matrix(a);
  const auto ev = spectrum(T, T.size());
  const std::string spec_csv = io::spectrum_csv(ev);
  io::write_file(out / "spectrum.csv", spec_csv);
  const std::string op_hash = io::write_field_file(out / "operator.tfwf", io::encode(T),
                                                   {{"symbol", fixture_to_json(*cfg.symbol)}, {"convention", "weyl"}});
  std::size_t rank = 0;
  const double top = ev.empty() ? 0.0 : std::abs(ev.front());
  for (auto z : ev) rank += std::abs(z) > 1e-8 * std::max(top, 1e-300) ? 1 : 0;
  j["outputs"] = {{"operator", op_hash}, {"spectrum", io::sha256_hex(spec_csv)}};
  j["numerical_rank"] = rank;
  j["largest_eigenvalue"] = {ev.empty() ? 0.0 : ev.front().real(), ev.empty() ? 0.0 : ev.front().imag()};
  j["pass"] = true;
  write_json(out / "operator.json", j);
  return 0;
}

inline int weights(const RunConfig& cfg) {
  const Weight w = cfg.make_weight();
  const auto r = check_conditions(w, 1e6, 400);
  json j = envelope(cfg);
  j["conditions"] = io::to_json(r);
  // alpha' is reported but not required of a weight.
  const bool pass = r.alpha_ok && r.beta_ok && r.gamma_ok && r.delta_ok;
  j["pass"] = pass;
  write_json(std::filesystem::path(cfg.out) / "weights.json", j);
  return pass ? 0 : 1;
}

inline int demo_case(const RunConfig& cfg, const std::string& name) {
  const suite::Suite s(suite_config(cfg));
  json j = envelope(cfg);
  j["case"] = name;
  bool pass = true;
  if (name == "chirp-weyl") {
    const auto c = s.run(9);
    j["constant_output"] = criterion_json(c);
    const Axis base = diagnostic_base();
    const auto axes = wigner_axes(base);
    const auto Psi = sample(Fixture::tensor(cfg.psi, cfg.psi), axes);
    const auto r = weyl_compactness_test(sample(Fixture::chirp_symbol(-1, Fixture::gaussian()), axes), Psi,
                                         cfg.make_weight(), cfg.diagnostic_config());
    j["weyl_report"] = io::to_json(r);
    pass = demo_pass(c) && r.verdict == Verdict::fail;
  } else if (name == "rank-one") {
    const auto c = s.run(8);
    j["rank_one"] = criterion_json(c);
    pass = demo_pass(c);
  } else if (name == "localization-identity") {
    const auto c = s.run(10);
    j["localization"] = criterion_json(c);
    pass = demo_pass(c);
  } else if (name == "band-limited") {
    const auto c = s.run(12);
    j["band_limited"] = criterion_json(c);
    pass = demo_pass(c);
  } else {
    const auto c = s.run(13);
    j["battery"] = criterion_json(c);
    pass = demo_pass(c);
  }
  j["pass"] = pass;
  write_json(std::filesystem::path(cfg.out) / ("demo_" + name + ".json"), j);
  return pass ? 0 : 1;
}

inline int demo(const RunConfig& cfg) {
  if (cfg.demo_case != "all") return demo_case(cfg, cfg.demo_case);
  int code = 0;
  for (const auto& c : demo_cases()) code = std::max(code, demo_case(cfg, c));
  return code;
}

}  // namespace detail

/// Executes the command; library errors map to exit codes 1 and 3.
inline int run(const RunConfig& cfg) {
  try {
    switch (cfg.command) {
      case Command::identities: return detail::identities(cfg);
      case Command::diagnose: return detail::diagnose(cfg);
      case Command::op: return detail::op(cfg);
      case Command::weights: return detail::weights(cfg);
      case Command::demo: return detail::demo(cfg);
    }
  } catch (const error& e) {
    std::fprintf(stderr, "tfweyl: %s\n", e.what());
    return e.code() == errc::io_error ? 3 : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "tfweyl: %s\n", e.what());
    return 3;
  }
  return 1;
}

/// Full entry point: parse, then run.
inline int main(int argc, const char* const* argv) {
  try {
    const auto cfg = parse(argc, argv);
    if (!cfg) return 0;
    return run(*cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "tfweyl: config: %s\n", e.what());
    return 2;
  } catch (const error& e) {
    std::fprintf(stderr, "tfweyl: %s\n", e.what());
    return e.code() == errc::io_error ? 3 : 2;
  }
}

}  // namespace tfweyl::cli

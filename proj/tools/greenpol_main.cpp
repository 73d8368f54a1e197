// Command-line front end: loads a run config, dispatches one subcommand,
// writes JSON/CSV to stdout or --out.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "greenpol/commands.hpp"
#include "greenpol/errors.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_null, tol_pos, tol_cov, lambda_max;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration (JSON)");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_option("--tol-null", opts.tol_null, "null-classification tolerance");
  cmd->add_option("--tol-pos", opts.tol_pos, "witness position tolerance");
  cmd->add_option("--tol-cov", opts.tol_cov, "witness covector tolerance");
  cmd->add_option("--lambda-max", opts.lambda_max, "affine search range");
  cmd->add_option("--out", opts.out_path, "output path (default stdout)");
  cmd->add_option("--format", opts.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

greenpol::RunConfig resolve_config(const CommonOpts& opts) {
  greenpol::RunConfig cfg =
      opts.config_path.empty() ? greenpol::builtin_config() : greenpol::load_config_file(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.tol_null) cfg.tol.tol_null = *opts.tol_null;
  if (opts.tol_pos) cfg.tol.tol_pos = *opts.tol_pos;
  if (opts.tol_cov) cfg.tol.tol_cov = *opts.tol_cov;
  if (opts.lambda_max) cfg.tol.lambda_max = *opts.lambda_max;
  return cfg;
}

int write_output(const CommonOpts& opts, const std::string& payload) {
  if (opts.out_path.empty()) {
    std::cout << payload;
    return 0;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output path: " << opts.out_path << "\n";
    return 1;
  }
  out << payload;
  return 0;
}

greenpol::PhasePoint read_point(const greenpol::RunConfig& cfg, const std::string& xs,
                                const std::string& ks) {
  int dim = cfg.spacetime->dim();
  return {greenpol::parse_vector(xs, dim), greenpol::parse_vector(ks, dim)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bicharacteristic flow, parallel transport and polarisation fibres "
               "of Green operators for normally hyperbolic systems"};
  app.require_subcommand(1);

  CommonOpts o_geo, o_rel, o_tra, o_sym, o_pol, o_demo, o_ver;
  std::string x1, k1, x2, k2;
  double lambda0 = 0.0, lambda1 = 1.0;
  std::string which = "principal", variant = "EP", config2;
  int drop_below = 0, demo_count = 10;

  CLI::App* geodesic = app.add_subcommand("geodesic", "integrate a bicharacteristic strip");
  add_common(geodesic, o_geo);
  o_geo.format = "csv";
  geodesic->add_option("--x", x1, "base point, comma separated")->required();
  geodesic->add_option("--k", k1, "covector, comma separated")->required();
  geodesic->add_option("--lambda0", lambda0, "affine range start");
  geodesic->add_option("--lambda1", lambda1, "affine range end");

  CLI::App* relate = app.add_subcommand("relate", "decide (x,k) ~ (x',k')");
  add_common(relate, o_rel);
  relate->add_option("--x", x1)->required();
  relate->add_option("--k", k1)->required();
  relate->add_option("--x2", x2)->required();
  relate->add_option("--k2", k2)->required();

  CLI::App* transport = app.add_subcommand("transport", "parallel propagator along the witness");
  add_common(transport, o_tra);
  transport->add_option("--x", x1)->required();
  transport->add_option("--k", k1)->required();
  transport->add_option("--x2", x2)->required();
  transport->add_option("--k2", k2)->required();

  CLI::App* symbol = app.add_subcommand("symbol", "symbol-calculus tables of the operator");
  add_common(symbol, o_sym);
  symbol->add_option("--which", which, "principal | refined | subprincipal | compose | dual");
  symbol->add_option("--config2", config2, "second operator config for compose");
  symbol->add_option("--drop-below", drop_below, "truncate composed terms below this degree");

  CLI::App* polfibre = app.add_subcommand("polfibre", "polarisation fibre over a point pair");
  add_common(polfibre, o_pol);
  polfibre->add_option("--x", x1)->required();
  polfibre->add_option("--k", k1)->required();
  polfibre->add_option("--x2", x2)->required();
  polfibre->add_option("--k2", k2)->required();
  polfibre->add_option("--variant", variant, "EP | EP+ | EP- | proca");

  CLI::App* demo = app.add_subcommand("proca-demo", "sampled relation points with fibres");
  add_common(demo, o_demo);
  demo->add_option("--count", demo_count, "number of sampled points");

  CLI::App* verify = app.add_subcommand("verify", "run the full verification suite");
  add_common(verify, o_ver);

  CLI11_PARSE(app, argc, argv);

  try {
    if (geodesic->parsed()) {
      auto cfg = resolve_config(o_geo);
      auto p = read_point(cfg, x1, k1);
      return write_output(o_geo, greenpol::cmd_geodesic(cfg, p, lambda0, lambda1, o_geo.format));
    }
    if (relate->parsed()) {
      auto cfg = resolve_config(o_rel);
      return write_output(o_rel,
                          greenpol::cmd_relate(cfg, read_point(cfg, x1, k1), read_point(cfg, x2, k2)));
    }
    if (transport->parsed()) {
      auto cfg = resolve_config(o_tra);
      return write_output(
          o_tra, greenpol::cmd_transport(cfg, read_point(cfg, x1, k1), read_point(cfg, x2, k2)));
    }
    if (symbol->parsed()) {
      auto cfg = resolve_config(o_sym);
      std::optional<greenpol::RunConfig> second;
      if (!config2.empty()) second = greenpol::load_config_file(config2);
      return write_output(o_sym, greenpol::cmd_symbol(cfg, which, second, drop_below));
    }
    if (polfibre->parsed()) {
      auto cfg = resolve_config(o_pol);
      return write_output(o_pol, greenpol::cmd_polfibre(cfg, read_point(cfg, x1, k1),
                                                        read_point(cfg, x2, k2), variant));
    }
    if (demo->parsed()) {
      auto cfg = resolve_config(o_demo);
      return write_output(o_demo, greenpol::cmd_proca_demo(cfg, demo_count));
    }
    if (verify->parsed()) {
      std::optional<greenpol::RunConfig> cfg;
      if (!o_ver.config_path.empty()) cfg = resolve_config(o_ver);
      greenpol::VerifyOutcome outcome = greenpol::cmd_verify(cfg);
      int rc = write_output(o_ver, outcome.report);
      return rc != 0 ? rc : (outcome.pass ? 0 : 1);
    }
  } catch (const greenpol::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// zladder: command-line front end for the fourth-moment ladder library.
//
// Exit codes: 0 success (verify: all rows pass), 1 soft band/trend rows
// failed, 2 usage or domain errors, 3 convergence failures or falsified hard
// invariants, 4 cache errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zeta_ladder/errors.hpp"
#include "zeta_ladder/fingerprint.hpp"
#include "zeta_ladder/ladder.hpp"
#include "zeta_ladder/moments.hpp"
#include "zeta_ladder/verify.hpp"
#include "zeta_ladder/weighted_moments.hpp"
#include "zeta_ladder/zeta_core.hpp"

namespace zl = zeta_ladder;

namespace {

struct RunConfig {
  int rs_terms = 3;
  double crossover_t = 5000.0;
  double target_abs_err = 1e-8;
  int gl_order = 16;
  double rel_tol = 1e-8;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double epsilon = 0.01;
  std::string cache_path;
  std::string format = "csv";
  std::string out_path;
  unsigned threads = 1;
  bool yes = false;
};

struct Session {
  std::shared_ptr<zl::ThreadPool> pool;
  std::shared_ptr<const zl::ZEvaluator> evaluator;
  std::shared_ptr<zl::Z4PanelLattice> lattice;
  std::shared_ptr<zl::MomentTable> table;
  std::unique_ptr<zl::WeightedMomentContext> wm;
  zl::PanelPolicy policy;
  std::size_t loaded_rows = 0;

  zl::LadderContext ctx() const { return {*wm, table}; }
};

Session open_session(const RunConfig& cfg) {
  Session s;
  s.pool = std::make_shared<zl::ThreadPool>(cfg.threads == 0 ? 1 : cfg.threads);
  zl::ZEvaluatorConfig zcfg;
  zcfg.rs_terms = cfg.rs_terms;
  zcfg.crossover_t = cfg.crossover_t;
  zcfg.target_abs_err = cfg.target_abs_err;
  s.evaluator = std::make_shared<const zl::ZEvaluator>(zcfg);
  s.policy.gl_order = cfg.gl_order;
  s.policy.rel_tol = cfg.rel_tol;
  s.lattice = std::make_shared<zl::Z4PanelLattice>(s.evaluator, s.policy, s.pool);
  if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path)) {
    s.table = std::make_shared<zl::MomentTable>(
        zl::MomentTable::load(cfg.cache_path, s.lattice, s.policy));
    s.loaded_rows = s.table->rows();
  } else {
    s.table = std::make_shared<zl::MomentTable>(s.lattice, s.policy);
    s.loaded_rows = s.table->rows();
  }
  s.wm = std::make_unique<zl::WeightedMomentContext>(
      zl::MuFamily(cfg.omega1, cfg.omega2), s.lattice, s.policy);
  return s;
}

void persist_session(const Session& s, const RunConfig& cfg) {
  if (cfg.cache_path.empty()) return;
  if (s.table->rows() > s.loaded_rows ||
      !std::filesystem::exists(cfg.cache_path)) {
    s.table->save(cfg.cache_path);
  }
}

class Output {
 public:
  explicit Output(const RunConfig& cfg) : cfg_(cfg) {
    if (!cfg.out_path.empty()) {
      file_.open(cfg.out_path, std::ios::binary | std::ios::trunc);
      if (!file_) {
        throw zl::DomainError("cannot open --out path " + cfg.out_path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  const RunConfig& cfg_;
  std::ofstream file_;
};

struct Field {
  std::string name;
  std::string value;  // already formatted
  bool numeric = true;
  Field(std::string n, double v)
      : name(std::move(n)), value(zl::canonical_double(v)) {}
  Field(std::string n, std::string v)
      : name(std::move(n)), value(std::move(v)), numeric(false) {}
};

void print_record(const RunConfig& cfg, std::ostream& out,
                  const std::vector<Field>& fields) {
  if (cfg.format == "csv") {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out << (i ? "," : "") << fields[i].name;
    }
    out << "\n";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out << (i ? "," : "") << fields[i].value;
    }
    out << "\n";
  } else {
    out << "{";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out << (i ? ", " : "") << "\"" << fields[i].name << "\": ";
      if (fields[i].numeric) {
        out << fields[i].value;
      } else {
        out << "\"" << fields[i].value << "\"";
      }
    }
    out << "}\n";
  }
}

int emit_report(const RunConfig& cfg, const zl::VerificationReport& rep) {
  Output out(cfg);
  if (cfg.format == "csv") {
    zl::write_csv(rep, out.stream());
  } else {
    zl::write_structured(rep, out.stream());
  }
  if (!rep.hard_pass()) return 3;
  return rep.soft_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Fourth-moment ladder toolkit for the Hardy Z-function"};
  app.fallthrough(true);
  app.add_option("--rs-terms", cfg.rs_terms, "Riemann-Siegel correction terms (0-3)");
  app.add_option("--crossover", cfg.crossover_t,
                 "height where Riemann-Siegel takes over from the direct path");
  app.add_option("--rel-tol", cfg.rel_tol, "quadrature relative tolerance");
  app.add_option("--gl-order", cfg.gl_order, "Gauss-Legendre nodes per panel");
  app.add_option("--omega1", cfg.omega1, "mu family exponent omega1");
  app.add_option("--omega2", cfg.omega2, "mu family exponent omega2");
  app.add_option("--epsilon", cfg.epsilon, "epsilon in U = T^(13/14 + 2 eps)");
  app.add_option("--cache", cfg.cache_path, "moment table cache path")
      ->envname("ZETA_LADDER_CACHE");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"csv", "structured"}));
  app.add_option("--out", cfg.out_path, "write output to this file");
  app.add_option("--threads", cfg.threads, "worker thread count");
  app.add_flag("--yes", cfg.yes, "confirm destructive actions");

  double arg_t = 0.0, arg_T = 0.0, arg_U = 0.0, cache_to = 0.0;
  std::vector<double> grid_T, grid_U, grid_delta;
  std::string verify_name, cache_action;

  CLI::App* cmd_z = app.add_subcommand("z", "evaluate Z(t)");
  cmd_z->add_option("t", arg_t, "height")->required();

  CLI::App* cmd_moment = app.add_subcommand("moment", "fourth moment I(T)");
  cmd_moment->add_option("T", arg_T, "upper limit")->required();

  CLI::App* cmd_ladder = app.add_subcommand("ladder", "solve phi2(T)");
  cmd_ladder->add_option("T", arg_T, "height")->required();

  CLI::App* cmd_reverse =
      app.add_subcommand("reverse", "reverse interval endpoints");
  cmd_reverse->add_option("T", arg_T, "left endpoint")->required();
  cmd_reverse->add_option("U", arg_U, "interval length")->required();

  CLI::App* cmd_verify = app.add_subcommand("verify", "formula verification");
  cmd_verify->add_option("name", verify_name, "one of theorem, phi2-near-t, laplace, phi2pp, chord")
      ->required();
  cmd_verify->add_option("--T", grid_T, "T grid");
  cmd_verify->add_option("--U", grid_U, "U grid (chord)");
  cmd_verify->add_option("--delta", grid_delta, "delta grid (laplace)");

  CLI::App* cmd_cache = app.add_subcommand("cache", "moment cache management");
  cmd_cache->add_option("action", cache_action, "build | info | clear")->required();
  cmd_cache->add_option("--to", cache_to, "build: extend the table to this T");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_z->parsed()) {
      Session s = open_session(cfg);
      double z = s.evaluator->hardy_z(arg_t);
      Output out(cfg);
      print_record(cfg, out.stream(), {{"t", arg_t}, {"Z", z}});
      return 0;
    }
    if (cmd_moment->parsed()) {
      Session s = open_session(cfg);
      double I = s.table->fourth_moment(arg_T);
      Output out(cfg);
      print_record(cfg, out.stream(), {{"T", arg_T}, {"I4", I}});
      persist_session(s, cfg);
      return 0;
    }
    if (cmd_ladder->parsed()) {
      Session s = open_session(cfg);
      zl::LadderPoint p = zl::solve_phi2(arg_T, s.ctx());
      Output out(cfg);
      print_record(cfg, out.stream(),
                   {{"T", p.T},
                    {"phi2", p.phi2},
                    {"residual", p.residual},
                    {"iterations", static_cast<double>(p.iterations)}});
      persist_session(s, cfg);
      return 0;
    }
    if (cmd_reverse->parsed()) {
      Session s = open_session(cfg);
      zl::ReverseInterval r = zl::reverse_interval(arg_T, arg_U, s.ctx());
      Output out(cfg);
      print_record(cfg, out.stream(), {{"T", r.T},
                                       {"U", r.U},
                                       {"T_ring", r.T_ring},
                                       {"TU_ring", r.TU_ring}});
      persist_session(s, cfg);
      return 0;
    }
    if (cmd_verify->parsed()) {
      Session s = open_session(cfg);
      zl::VerificationReport rep;
      if (verify_name == "theorem") {
        if (grid_T.size() != 1) {
          throw zl::DomainError("verify theorem: exactly one --T is required");
        }
        rep = zl::verify_theorem(grid_T[0], cfg.epsilon, s.ctx());
      } else if (verify_name == "phi2-near-t") {
        rep = zl::verify_lemma_phi2_near_T(grid_T, s.ctx());
      } else if (verify_name == "laplace") {
        rep = zl::verify_laplace(grid_delta, s.ctx());
      } else if (verify_name == "phi2pp") {
        rep = zl::verify_phi2pp_bound(grid_T, s.ctx());
      } else if (verify_name == "chord") {
        if (grid_T.empty() || grid_T.size() != grid_U.size()) {
          throw zl::DomainError(
              "verify chord: --T and --U lists must be nonempty and equal length");
        }
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t i = 0; i < grid_T.size(); ++i) {
          pairs.emplace_back(grid_T[i], grid_U[i]);
        }
        rep = zl::verify_chord(pairs, s.ctx());
      } else {
        throw zl::DomainError("verify: unknown report name " + verify_name);
      }
      int rc = emit_report(cfg, rep);
      persist_session(s, cfg);
      return rc;
    }
    if (cmd_cache->parsed()) {
      if (cfg.cache_path.empty()) {
        throw zl::DomainError(
            "cache: no cache path (use --cache or ZETA_LADDER_CACHE)");
      }
      if (cache_action == "build") {
        if (!(cache_to > 0.0)) {
          throw zl::DomainError("cache build: --to T is required");
        }
        Session s = open_session(cfg);
        std::size_t before = s.table->rows();
        s.table->extend_to(cache_to);
        if (s.table->rows() > before || !std::filesystem::exists(cfg.cache_path)) {
          s.table->save(cfg.cache_path);
        }
        Output out(cfg);
        print_record(cfg, out.stream(),
                     {{"rows", static_cast<double>(s.table->rows())},
                      {"dT", s.table->dT()}});
        return 0;
      }
      if (cache_action == "info") {
        if (!std::filesystem::exists(cfg.cache_path)) {
          throw zl::CacheError(zl::CacheError::Kind::io,
                               "cache info: no cache file at " + cfg.cache_path);
        }
        Session s = open_session(cfg);
        Output out(cfg);
        print_record(cfg, out.stream(),
                     {Field("rows", static_cast<double>(s.table->rows())),
                      Field("dT", s.table->dT()),
                      Field("fingerprint",
                            zl::fingerprint_hex(s.table->fingerprint()))});
        return 0;
      }
      if (cache_action == "clear") {
        if (!cfg.yes) {
          std::cerr << "cache clear: pass --yes to confirm deletion\n";
          return 2;
        }
        std::error_code ec;
        std::filesystem::remove(cfg.cache_path, ec);
        if (ec) {
          throw zl::CacheError(zl::CacheError::Kind::io,
                               "cache clear: " + ec.message());
        }
        return 0;
      }
      throw zl::DomainError("cache: unknown action " + cache_action);
    }
  } catch (const zl::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const zl::CacheError& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return 4;
  } catch (const zl::BracketError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const zl::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const zl::AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

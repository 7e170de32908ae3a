#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "prandtl3d/barrier.hpp"
#include "prandtl3d/io.hpp"
#include "prandtl3d/parallel.hpp"

using namespace prandtl3d;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kLedger = 1, kUsage = 2, kNumerical = 3 };

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
};

RunConfig need_config(const Common& c) {
  if (c.config.empty()) throw ParseError("--config is required for this subcommand", 0);
  return load_config(c.config);
}

fs::path out_dir(const Common& c, const RunConfig* cfg) {
  fs::path p = !c.out.empty() ? fs::path(c.out) : fs::path(cfg ? cfg->out_dir : "out");
  fs::create_directories(p);
  return p;
}

void apply_threads(const Common& c, const RunConfig* cfg) {
  int n = c.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("PRANDTL3D_THREADS")) n = std::atoi(env);
  }
  if (n <= 0 && cfg) n = cfg->threads;
  set_thread_count(n > 0 ? n : 1);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  return f;
}

BlasiusProfile blasius_for(const RunConfig& c) {
  BlasiusProfile b = solve_blasius();
  b.x0 = c.x0;
  return b;
}

void stamp(DiagnosticsReport& r, const RunConfig& c) { r.metadata["config_hash"] = config_hash(c); }

int finish(const DiagnosticsReport& r, const fs::path& path) {
  std::ofstream f = open_out(path);
  write_report_csv(f, r);
  std::cout << path.string() << ": " << (r.all_pass() ? "pass" : "violation") << '\n';
  return r.all_pass() ? kPass : kLedger;
}

std::string tag(double eps0) {
  std::ostringstream os;
  os << eps0;
  return os.str();
}

FieldState shifted(const Grid3& g, const FieldState& s, const Field& from, const Field& to) {
  return make_state(g, like(s.u, s.u.array() + to.array() - from.array()),
                    like(s.v, s.v.array() + to.array() - from.array()), 0);
}

int cmd_blasius(const Common& c) {
  apply_threads(c, nullptr);
  const fs::path dir = out_dir(c, nullptr);
  const BlasiusProfile b = solve_blasius();
  std::ofstream f = open_out(dir / "blasius.csv");
  write_blasius_csv(f, b);
  std::cout << "fpp0=" << format_double(b.fpp0) << '\n';
  return kPass;
}

int cmd_background(const Common& c) {
  const RunConfig cfg = need_config(c);
  apply_threads(c, &cfg);
  const fs::path dir = out_dir(c, &cfg);
  const BackgroundProfile bg = build_background(blasius_for(cfg), cfg.grid(), cfg.eps0_schedule.front(), cfg.mu);
  write_snapshot((dir / "background.p3ds").string(), snapshot_of(bg));
  DiagnosticsReport r = check_assumptions(bg, cfg.barrier(bg.eps0));
  stamp(r, cfg);
  return finish(r, dir / "assumptions.csv");
}

int cmd_bcgen(const Common& c) {
  const RunConfig cfg = need_config(c);
  apply_threads(c, &cfg);
  const fs::path dir = out_dir(c, &cfg);
  const Grid3 g = cfg.grid();
  const BackgroundProfile bg = build_background(blasius_for(cfg), g, cfg.eps0_schedule.front(), cfg.mu, false);
  const PerturbationSpec p = cfg.perturbation();
  const FieldState s0 = make_state(g, bg.ubar, bg.ubar, 0);
  const BoundaryData bd = build_boundary_data(g, bg, s0, p, cfg.wall_flux);
  write_snapshot((dir / "boundary.p3ds").string(), snapshot_of(g, bd));
  DiagnosticsReport r = check_envelopes(p, bg);
  stamp(r, cfg);
  return finish(r, dir / "envelopes.csv");
}

int cmd_solve(const Common& c) {
  const RunConfig cfg = need_config(c);
  apply_threads(c, &cfg);
  const fs::path dir = out_dir(c, &cfg);
  const Grid3 g = cfg.grid();
  const BlasiusProfile b = blasius_for(cfg);
  const SolverConfig sc = cfg.solver();
  sc.validate();
  const PerturbationSpec p = cfg.perturbation(), zero = PerturbationSpec::zero();

  SolveTrace trace, ref_trace;
  std::unique_ptr<BackgroundProfile> prev_bg;
  std::unique_ptr<FieldState> prev_sol, prev_ref;
  int code = kPass;
  for (double eps0 : sc.eps0_schedule) {
    auto bg = std::make_unique<BackgroundProfile>(build_background(b, g, eps0, cfg.mu, false));
    std::unique_ptr<FieldState> warm_sol, warm_ref;
    if (prev_sol) {
      warm_sol = std::make_unique<FieldState>(shifted(g, *prev_sol, prev_bg->ubar, bg->ubar));
      warm_ref = std::make_unique<FieldState>(shifted(g, *prev_ref, prev_bg->ubar, bg->ubar));
    }
    auto provider = [&](const PerturbationSpec& ps) {
      return BoundaryProvider([&g, &bg, ps, &sc](const FieldState& s) {
        return build_boundary_data(g, *bg, s, ps, sc.wall_flux);
      });
    };
    const std::string t = tag(eps0);
    const PicardResult ref = picard_solve(g, *bg, provider(zero), sc, warm_ref.get());
    ref_trace.records.insert(ref_trace.records.end(), ref.trace.records.begin(), ref.trace.records.end());
    auto on_iterate = [&](int n, const FieldState& s) {
      if (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0)
        write_snapshot((dir / ("iterate_eps0_" + t + "_n" + std::to_string(n) + ".p3ds")).string(),
                       snapshot_of(g, s));
    };
    const PicardResult sol = picard_solve(g, *bg, provider(p), sc, warm_sol.get(), nullptr, on_iterate);
    trace.records.insert(trace.records.end(), sol.trace.records.begin(), sol.trace.records.end());
    write_snapshot((dir / ("solution_eps0_" + t + ".p3ds")).string(), snapshot_of(g, sol.state));
    write_snapshot((dir / ("reference_eps0_" + t + ".p3ds")).string(), snapshot_of(g, ref.state));

    LedgerParams lp = cfg.ledger(eps0);
    const LedgerParams cal = calibrate_ledger(ref.state, *bg, lp);
    if (!(cfg.C2 > 0)) lp.C2 = cal.C2;
    if (!(cfg.C_dzK > 0)) lp.C_dzK = cal.C_dzK;
    if (!(cfg.c0 > 0)) lp.c0 = cal.c0;
    DiagnosticsReport r = ledger_check(sol.state, *bg, lp, &ref.state);
    stamp(r, cfg);
    r.metadata["picard_iterations"] = std::to_string(sol.iterations);
    if (finish(r, dir / ("ledger_eps0_" + t + ".csv")) != kPass) code = kLedger;

    prev_bg = std::move(bg);
    prev_sol = std::make_unique<FieldState>(sol.state);
    prev_ref = std::make_unique<FieldState>(ref.state);
  }
  std::ofstream t = open_out(dir / "trace.csv");
  write_trace_csv(t, trace);
  std::ofstream rt = open_out(dir / "trace_reference.csv");
  write_trace_csv(rt, ref_trace);
  return code;
}

int cmd_verify(const Common& c, const std::string& suite, const std::string& state_path,
               const std::string& ref_path) {
  const RunConfig cfg = need_config(c);
  apply_threads(c, &cfg);
  const fs::path dir = out_dir(c, &cfg);
  const Grid3 g = cfg.grid();
  const double eps0 = cfg.eps0_schedule.front();
  if (suite == "assumptions") {
    const BackgroundProfile bg = build_background(blasius_for(cfg), g, eps0, cfg.mu);
    DiagnosticsReport r = check_assumptions(bg, cfg.barrier(eps0));
    stamp(r, cfg);
    return finish(r, dir / "assumptions.csv");
  }
  const BackgroundProfile bg = build_background(blasius_for(cfg), g, eps0, cfg.mu, false);
  if (suite == "barriers") {
    const FieldState s = make_state(g, bg.ubar, bg.ubar, 0);
    const VFContext ctx = make_context(g, s, cfg.u_floor_factor * eps0, &bg, cfg.wall_flux);
    BarrierSuiteResult res = verify_barrier_inequalities(ctx, bg.ubar, cfg.barrier(eps0));
    std::ofstream f = open_out(dir / "barriers.csv");
    write_barrier_csv(f, res);
    stamp(res.report, cfg);
    return finish(res.report, dir / "barrier_report.csv");
  }
  if (suite == "ledger") {
    auto load = [&](const std::string& path) {
      const Snapshot s = read_snapshot(path);
      if (!snapshot_grid(s).same_as(g)) throw GridMismatch("snapshot grid differs from the configured grid");
      return make_state(g, s.field("u"), s.field("v"), 0);
    };
    const FieldState s = state_path.empty() ? make_state(g, bg.ubar, bg.ubar, 0) : load(state_path);
    std::unique_ptr<FieldState> ref;
    if (!ref_path.empty()) ref = std::make_unique<FieldState>(load(ref_path));
    LedgerParams lp = cfg.ledger(eps0);
    const LedgerParams cal = calibrate_ledger(ref ? *ref : make_state(g, bg.ubar, bg.ubar, 0), bg, lp);
    if (!(cfg.C2 > 0)) lp.C2 = cal.C2;
    if (!(cfg.C_dzK > 0)) lp.C_dzK = cal.C_dzK;
    if (!(cfg.c0 > 0)) lp.c0 = cal.c0;
    DiagnosticsReport r = ledger_check(s, bg, lp, ref.get());
    stamp(r, cfg);
    return finish(r, dir / "ledger.csv");
  }
  throw ParseError("unknown suite '" + suite + "'", 0);
}

int cmd_sweep(const Common& c) {
  const RunConfig cfg = need_config(c);
  apply_threads(c, &cfg);
  const fs::path dir = out_dir(c, &cfg);
  const SolverConfig sc = cfg.solver();
  const ContinuationResult r = eps0_continuation(cfg.grid(), blasius_for(cfg), cfg.perturbation(), sc, cfg.mu);
  std::ofstream f = open_out(dir / "sweep.csv");
  f << "eps0_from,eps0_to,gap\n";
  for (std::size_t n = 0; n < r.gaps.size(); ++n)
    f << format_double(r.eps0[n]) << ',' << format_double(r.eps0[n + 1]) << ',' << format_double(r.gaps[n]) << '\n';
  std::ofstream t = open_out(dir / "sweep_trace.csv");
  write_trace_csv(t, r.trace);
  bool monotone = true;
  for (std::size_t n = 1; n < r.gaps.size(); ++n) monotone = monotone && r.gaps[n] < r.gaps[n - 1];
  std::cout << "gaps " << (monotone ? "decrease" : "do not decrease") << '\n';
  return monotone ? kPass : kLedger;
}

int cmd_plot(const Common& c, const std::string& quantity, const std::string& slice, const std::string& state_path) {
  const RunConfig cfg = need_config(c);
  apply_threads(c, &cfg);
  const fs::path dir = out_dir(c, &cfg);
  const Grid3 g = cfg.grid();
  const double eps0 = cfg.eps0_schedule.front();
  const auto eq = slice.find('=');
  if (eq == std::string::npos || eq != 1) throw ParseError("slice must look like z=3", 0);
  SliceSpec sp;
  switch (slice[0]) {
    case 'x': sp.axis = Axis::X; break;
    case 'y': sp.axis = Axis::Y; break;
    case 'z': sp.axis = Axis::Z; break;
    default: throw ParseError("slice axis must be x, y or z", 0);
  }
  try {
    sp.index = std::stol(slice.substr(2));
  } catch (const std::exception&) {
    throw ParseError("bad slice index '" + slice.substr(2) + "'", 0);
  }
  const BackgroundProfile bg = build_background(blasius_for(cfg), g, eps0, cfg.mu, false);
  FieldState s = make_state(g, bg.ubar, bg.ubar, 0);
  if (!state_path.empty()) {
    const Snapshot sn = read_snapshot(state_path);
    if (!snapshot_grid(sn).same_as(g)) throw GridMismatch("snapshot grid differs from the configured grid");
    s = make_state(g, sn.field("u"), sn.field("v"), 0);
  }
  const Field f = plot_quantity(quantity, s, bg, cfg.barrier(eps0), cfg.u_floor_factor * eps0);
  const fs::path path = dir / ("plot_" + quantity + "_" + slice.substr(0, 1) + slice.substr(2) + ".csv");
  std::ofstream out = open_out(path);
  emit_plot_data(out, g, f, sp);
  std::cout << path.string() << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prandtl3d: steady 3D boundary layer laboratory"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--config", c.config, "run configuration file");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--threads", c.threads, "worker threads (PRANDTL3D_THREADS otherwise)")->check(CLI::PositiveNumber);

  std::string suite, state, ref, quantity, slice = "z=0";
  auto* blasius = app.add_subcommand("blasius", "tabulate the Blasius profile");
  auto* background = app.add_subcommand("background", "build the lifted background and check its assumptions");
  auto* bcgen = app.add_subcommand("bcgen", "synthesize compatible boundary data");
  auto* solve = app.add_subcommand("solve", "Picard/marching solve over the eps0 schedule");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "barriers | ledger | assumptions")
      ->required()
      ->check(CLI::IsMember({"barriers", "ledger", "assumptions"}));
  verify->add_option("--state", state, "solution snapshot for the ledger suite");
  verify->add_option("--reference", ref, "zero-perturbation snapshot for the ledger suite");
  auto* sweep = app.add_subcommand("sweep", "eps0 continuation and consecutive gaps");
  auto* plot = app.add_subcommand("plot-data", "write a 2D slice of a quantity");
  plot->add_option("--quantity", quantity, "u | v | q | K | dzu | psi | residual | barrier")->required();
  plot->add_option("--slice", slice, "axis=index, e.g. z=3");
  plot->add_option("--state", state, "solution snapshot (background otherwise)");
  for (auto* s : {blasius, background, bcgen, solve, verify, sweep, plot}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*blasius) return cmd_blasius(c);
    if (*background) return cmd_background(c);
    if (*bcgen) return cmd_bcgen(c);
    if (*solve) return cmd_solve(c);
    if (*verify) return cmd_verify(c, suite, state, ref);
    if (*sweep) return cmd_sweep(c);
    if (*plot) return cmd_plot(c, quantity, slice, state);
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const UnknownQuantity& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const VersionMismatch& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const GridMismatch& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

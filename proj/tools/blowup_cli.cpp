#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "blowup/dalembert.hpp"
#include "blowup/errors.hpp"
#include "blowup/lab.hpp"
#include "blowup/oscint.hpp"
#include "blowup/report.hpp"
#include "blowup/resolvent.hpp"

using namespace blowup;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Global {
  std::string out = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "csv";
};

std::string num(double x) { return format_number(x); }

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json jcplx(cplx z) { return json{{"re", jnum(z.real())}, {"im", jnum(z.imag())}}; }

std::string option_value(const CLI::Option* o) {
  if (o->results().empty()) return o->get_default_str();
  std::string v;
  for (size_t i = 0; i < o->results().size(); ++i) v += (i ? "," : "") + o->results()[i];
  return v;
}

// Effective value of every global and subcommand option, by long name.
json config_echo(const CLI::App& app, const CLI::App& sub) {
  auto collect = [](const CLI::App& a, const std::vector<std::string>& skip) {
    json out = json::object();
    for (const CLI::Option* o : a.get_options()) {
      if (o->get_lnames().empty()) continue;
      const std::string name = o->get_lnames().front();
      if (std::find(skip.begin(), skip.end(), name) == skip.end()) out[name] = option_value(o);
    }
    return out;
  };
  json cfg = collect(app, {"help", "config"});
  cfg[sub.get_name()] = collect(sub, {"help"});
  return cfg;
}

class Emitter {
 public:
  Emitter(const Global& g, std::string command, json config, std::string extra_input = {})
      : g_(g), command_(std::move(command)), config_(std::move(config)) {
    // Output location and worker count do not change results, so they stay out of the hash.
    json inputs = config_;
    for (const char* k : {"out", "threads", "format"}) inputs.erase(k);
    hash_ = git_blob_sha1(inputs.dump() + extra_input);
  }

  void table(const std::string& stem, const CsvTable& t) {
    if (g_.format == "csv") {
      const fs::path p = fs::path(g_.out) / (stem + ".csv");
      t.write(p.string());
      files_.push_back(p.filename().string());
    } else {
      json rows = json::array();
      std::istringstream in(t.str());
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        json row;
        std::istringstream cells(line);
        std::string cell;
        size_t i = 0;
        while (std::getline(cells, cell, ',')) row[t.header()[i++]] = cell;
        rows.push_back(row);
      }
      tables_[stem] = rows;
    }
  }

  void finish(const json& metrics) const {
    json doc;
    doc["command"] = command_;
    doc["config"] = config_;
    doc["input_hash"] = hash_;
    doc["metrics"] = metrics;
    if (g_.format == "csv") doc["files"] = files_;
    else doc["tables"] = tables_;
    const fs::path p = fs::path(g_.out) / (command_ + ".json");
    write_file(p.string(), doc.dump(2) + "\n");
  }

 private:
  const Global& g_;
  std::string command_;
  json config_;
  std::string hash_;
  std::vector<std::string> files_;
  json tables_ = json::object();
};

// gauge:T' | random:SEED | zero | file:PATH (columns rho,phi1,phi2 on the grid nodes)
State initial_state(const std::string& spec, GridPtr g, double frame_T, double amplitude, std::string& file_content) {
  const size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "zero") return State::zero(g);
  if (kind == "gauge") {
    if (arg.empty()) throw Error(ErrorKind::invalid_argument, "gauge data needs gauge:T'");
    return gauge_solution(std::stod(arg), CoordinateFrame{frame_T}, 0.0, g);
  }
  if (kind == "random") {
    RandomDataSpec spec_r;
    spec_r.seed = arg.empty() ? 1 : std::stoull(arg);
    spec_r.target = amplitude;
    return random_state(spec_r, g);
  }
  if (kind == "file") {
    file_content = read_file(arg);
    validate_csv("state", file_content);
    std::istringstream in(file_content);
    std::string line;
    auto next = [&](std::string& l) {
      if (!std::getline(in, l)) return false;
      if (!l.empty() && l.back() == '\r') l.pop_back();
      return true;
    };
    next(line);
    std::vector<std::string> head;
    {
      std::istringstream h(line);
      std::string c;
      while (std::getline(h, c, ',')) head.push_back(c);
    }
    auto col = [&](const std::string& name) {
      return static_cast<size_t>(std::find(head.begin(), head.end(), name) - head.begin());
    };
    const size_t ir = col("rho"), i1 = col("phi1"), i2 = col("phi2");
    State s = State::zero(g);
    int j = 0;
    while (next(line)) {
      if (line.empty()) continue;
      std::vector<double> cells;
      std::istringstream c(line);
      std::string cell;
      while (std::getline(c, cell, ',')) cells.push_back(std::stod(cell));
      if (j >= g->size() || cells.size() < head.size())
        throw Error(ErrorKind::invalid_argument, "state file does not match the grid");
      if (std::abs(cells[ir] - g->rho(j)) > 1e-12)
        throw Error(ErrorKind::invalid_argument, "state file row " + std::to_string(j) + " is not at grid node rho_j");
      s.phi1(j) = cells[i1];
      s.phi2(j) = cells[i2];
      ++j;
    }
    if (j != g->size()) throw Error(ErrorKind::invalid_argument, "state file has the wrong number of rows");
    return s;
  }
  throw Error(ErrorKind::invalid_argument, "unknown initial data '" + spec + "'");
}

StrichartzExponents exponents(double p, double q) {
  const StrichartzExponents e = StrichartzExponents::make(p, q);
  if (!e.admissible()) throw Error(ErrorKind::invalid_argument, "exponents violate 1/p + 3/q = 1/2");
  return e;
}

void check_positive(int v, const char* name) {
  if (v < 1) throw Error(ErrorKind::invalid_argument, std::string(name) + " must be positive");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar blowup stability toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "configuration file (TOML); every option is also a flag");
  app.option_defaults()->always_capture_default();
  Global g;
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "base seed for random data");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "csv writes tables plus a JSON summary; json embeds tables")
      ->check(CLI::IsMember({"csv", "json"}));

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the discrete generator");
  int sp_N = 32;
  std::string sp_mode = "full";
  spectrum->add_option("--N", sp_N, "polynomial degree");
  spectrum->add_option("--mode", sp_mode, "full or free")->check(CLI::IsMember({"full", "free"}));

  // evolve
  auto* evolve = app.add_subcommand("evolve", "time evolution in similarity variables");
  std::string ev_mode = "nonlinear", ev_init = "gauge:1.02";
  int ev_N = 24;
  double ev_dtau = 0.0, ev_tau_max = 10.0, ev_T = 1.0, ev_amp = 1e-3;
  bool ev_states = false, ev_deflate = false;
  evolve->add_option("--mode", ev_mode, "free, linearized or nonlinear")
      ->check(CLI::IsMember({"free", "linearized", "nonlinear"}));
  evolve->add_option("--N", ev_N, "polynomial degree");
  evolve->add_option("--dtau", ev_dtau, "RK4 step (0 selects 0.25/N^2)");
  evolve->add_option("--tau-max", ev_tau_max, "final similarity time");
  evolve->add_option("--init", ev_init, "gauge:T' | random:SEED | zero | file:PATH");
  evolve->add_option("--frame-T", ev_T, "frame time T for gauge data");
  evolve->add_option("--amplitude", ev_amp, "h_norm of random data");
  evolve->add_flag("--states", ev_states, "also write every recorded state");
  evolve->add_flag("--deflate", ev_deflate, "apply I - P after every step");

  // resolvent
  auto* resolvent = app.add_subcommand("resolvent", "fundamental pair, Wronskian and Green's function");
  double rs_re = 0.1, rs_im = 5.0, rs_s = 0.5;
  int rs_N = 24;
  std::string rs_pot = "linearized", rs_rhs = "none";
  bool rs_strict = false;
  resolvent->add_option("--lambda-re", rs_re, "Re lambda");
  resolvent->add_option("--lambda-im", rs_im, "Im lambda");
  resolvent->add_option("--potential", rs_pot, "zero or linearized")->check(CLI::IsMember({"zero", "linearized"}));
  resolvent->add_option("--N", rs_N, "polynomial degree");
  resolvent->add_option("--s", rs_s, "source point of the Green's function column (snapped to a node)");
  resolvent->add_option("--rhs", rs_rhs, "none | random:SEED (projected random data)");
  resolvent->add_flag("--strict-strip", rs_strict, "require 0 <= Re lambda <= 1/3");

  // dalembert
  auto* dalembert = app.add_subcommand("dalembert", "free Strichartz constants from the closed form");
  int da_N = 32, da_members = 5;
  double da_p = 2.0, da_q = inf, da_tau = 20.0, da_dtau = 0.01;
  dalembert->add_option("--N", da_N, "polynomial degree of the data");
  dalembert->add_option("--members", da_members, "ensemble size");
  dalembert->add_option("--p", da_p, "time exponent");
  dalembert->add_option("--q", da_q, "space exponent");
  dalembert->add_option("--tau-max", da_tau, "window length");
  dalembert->add_option("--dtau", da_dtau, "sampling step");

  // strichartz
  auto* strichartz = app.add_subcommand("strichartz", "linear Strichartz or energy bounds over an ensemble");
  int st_N = 32, st_members = 100;
  double st_p = 2.0, st_q = inf, st_tau = 20.0;
  std::string st_kind = "strichartz", st_flow = "linearized";
  strichartz->add_option("--kind", st_kind, "strichartz or energy")->check(CLI::IsMember({"strichartz", "energy"}));
  strichartz->add_option("--flow", st_flow, "free or linearized")->check(CLI::IsMember({"free", "linearized"}));
  strichartz->add_option("--N", st_N, "polynomial degree");
  strichartz->add_option("--members", st_members, "ensemble size");
  strichartz->add_option("--p", st_p, "time exponent");
  strichartz->add_option("--q", st_q, "space exponent");
  strichartz->add_option("--tau-max", st_tau, "window length");

  // kernel
  auto* kernel = app.add_subcommand("kernel", "perturbation kernel against its envelope");
  std::vector<double> ke_rho{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, ke_s = ke_rho, ke_tau{0, 1, 2, 4, 8};
  double ke_omega = 200.0;
  std::string ke_pot = "linearized";
  kernel->add_option("--rho", ke_rho, "rho samples")->delimiter(',');
  kernel->add_option("--s", ke_s, "s samples")->delimiter(',');
  kernel->add_option("--tau", ke_tau, "tau samples")->delimiter(',');
  kernel->add_option("--omega-max", ke_omega, "frequency cutoff");
  kernel->add_option("--potential", ke_pot, "zero or linearized")->check(CLI::IsMember({"zero", "linearized"}));

  // stability
  auto* stability = app.add_subcommand("stability", "shooting and the quadratic stability bound");
  StabilityConfig sc;
  stability->add_option("--deltas", sc.deltas, "perturbation sizes")->delimiter(',');
  stability->add_option("--members", sc.members, "members per delta");
  stability->add_option("--M", sc.M, "safety factor");
  stability->add_option("--delta-T", sc.delta_T, "half-width of the shooting interval");
  stability->add_option("--N", sc.N, "polynomial degree");
  stability->add_option("--dtau", sc.dtau, "RK4 step");
  stability->add_option("--tau-max", sc.tau_max, "final similarity time");
  stability->add_option("--physical-checks", sc.physical_checks, "members with the physical-side integral");

  // scan-w0
  auto* scan = app.add_subcommand("scan-w0", "grid scan of |w0| over the strip");
  ScanOptions so;
  scan->add_option("--eps-lo", so.eps_lo, "lower Re lambda");
  scan->add_option("--eps-hi", so.eps_hi, "upper Re lambda");
  scan->add_option("--omega-max", so.omega_max, "|Im lambda| bound");
  scan->add_option("--d-eps", so.d_eps, "Re step");
  scan->add_option("--d-omega", so.d_omega, "Im step");
  scan->add_option("--refine", so.refine_count, "local minima to refine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fs::create_directories(g.out);
    if (*spectrum) {
      check_positive(sp_N, "N");
      GridPtr grid = make_grid(sp_N);
      const OperatorMatrix op = assemble(grid, sp_mode == "full" ? OpMode::full : OpMode::free);
      const std::vector<EigenPair> pairs = eigenpairs(op);
      const SpuriousFilter filter(op);
      Emitter em(g, "spectrum", config_echo(app, *spectrum));
      CsvTable t(csv_schema("spectrum").columns);
      int accepted = 0;
      double nearest = inf;
      for (size_t i = 0; i < pairs.size(); ++i) {
        const FilterVerdict v = filter.check(pairs[i]);
        accepted += v.accepted;
        nearest = std::min(nearest, std::abs(pairs[i].value - 1.0));
        t.add({std::to_string(i), num(pairs[i].value.real()), num(pairs[i].value.imag()), v.accepted ? "1" : "0",
               num(v.drift), num(v.tail)});
      }
      em.table("spectrum", t);
      json m{{"eigenvalues", pairs.size()}, {"accepted", accepted}, {"distance_to_one", jnum(nearest)}};
      if (sp_mode == "full") {
        const Projection P = projection(op);
        m["projection"] = {{"eigen_residual", jnum(P.eigen_residual)},
                           {"left_dot_g", jnum(P.left.dot(P.g))},
                           {"g_star_norm", jnum(P.g_star.norm())}};
      }
      em.finish(m);
    } else if (*evolve) {
      check_positive(ev_N, "N");
      GridPtr grid = make_grid(ev_N);
      std::string file;
      const State init = initial_state(ev_init, grid, ev_T, ev_amp, file);
      Emitter em(g, "evolve", config_echo(app, *evolve), file);
      EvolveConfig ec;
      ec.mode = flow_from_string(ev_mode);
      ec.dtau = ev_dtau;
      ec.tau_max = ev_tau_max;
      ec.deflate = ev_deflate;
      const Trajectory tr = integrate(init, ec);
      CsvTable t(csv_schema("evolve").columns);
      for (size_t k = 0; k < tr.size(); ++k)
        t.add({num(tr.tau[k]), num(tr.h_norm[k]), num(tr.sup_phi1[k]), num(tr.amplitude[k])});
      em.table("evolve", t);
      if (ev_states) {
        CsvTable s(csv_schema("evolve-states").columns);
        for (size_t k = 0; k < tr.size(); ++k)
          for (int j = 0; j < grid->size(); ++j)
            s.add({num(tr.tau[k]), num(grid->rho(j)), num(tr.states[k].phi1(j)), num(tr.states[k].phi2(j))});
        em.table("evolve_states", s);
      }
      em.finish({{"records", tr.size()},
                 {"tau_end", jnum(tr.tau.back())},
                 {"escaped", tr.escaped},
                 {"final_h_norm", jnum(tr.h_norm.back())},
                 {"final_amplitude", jnum(tr.amplitude.back())}});
    } else if (*resolvent) {
      check_positive(rs_N, "N");
      GridPtr grid = make_grid(rs_N);
      const cplx lambda(rs_re, rs_im);
      const Potential V = Potential::from_name(rs_pot);
      ResolventOptions ro;
      ro.strict_strip = rs_strict;
      const FundamentalPair pair = fundamental_pair(lambda, V, *grid, ro);
      int js = 0;
      for (int j = 0; j < grid->size(); ++j)
        if (std::abs(grid->rho(j) - rs_s) < std::abs(grid->rho(js) - rs_s)) js = j;
      if (js == 0 || js == grid->N) throw Error(ErrorKind::invalid_argument, "--s must lie strictly inside (0,1)");
      const double s_node = grid->rho(js);
      Emitter em(g, "resolvent", config_echo(app, *resolvent));
      CsvTable t(csv_schema("resolvent").columns);
      for (int j = 0; j < grid->size(); ++j) {
        const double r = grid->rho(j);
        const cplx G = (j == 0 || j == grid->N) ? cplx(NAN, NAN) : green(r, s_node, pair);
        t.add({num(r), num(pair.u0(j).real()), num(pair.u0(j).imag()), num(pair.u1(j).real()), num(pair.u1(j).imag()),
               num(G.real()), num(G.imag())});
      }
      em.table("resolvent", t);
      json m{{"lambda", jcplx(lambda)}, {"s_node", s_node}, {"w0", jcplx(pair.w0)}, {"spread", jnum(pair.spread)},
             {"in_strip", pair.in_strip}};
      if (rs_pot == "linearized") m["w0_closed"] = jcplx(w0_closed(lambda));
      if (rs_rhs != "none") {
        std::string unused;
        const Projection P = projection(assemble(grid, OpMode::full));
        const State f = P.complement(initial_state(rs_rhs, grid, 1.0, 1.0, unused));
        const ComplexState u = apply_resolvent(lambda, ResolventRHS::from_state(f), V, ro);
        const ComplexState back = apply_shifted_operator(lambda, u, rs_pot == "zero");
        State re = State::zero(grid), im = State::zero(grid);
        re.phi1 = back.phi1.real() - f.phi1;
        re.phi2 = back.phi2.real() - f.phi2;
        im.phi1 = back.phi1.imag();
        im.phi2 = back.phi2.imag();
        m["identity_residual"] = jnum(std::hypot(h_norm(re), h_norm(im)) / h_norm(f));
      }
      em.finish(m);
    } else if (*dalembert) {
      check_positive(da_N, "N");
      check_positive(da_members, "members");
      const StrichartzExponents e = exponents(da_p, da_q);
      GridPtr grid = make_grid(da_N);
      RandomDataSpec rd;
      rd.seed = g.seed;
      const std::vector<State> ens = random_ensemble(rd, static_cast<size_t>(da_members), grid);
      const FreeStrichartzResult r = free_strichartz_constant(ens, e, da_tau, da_dtau, g.threads);
      Emitter em(g, "dalembert", config_echo(app, *dalembert));
      CsvTable t(csv_schema("dalembert").columns);
      for (size_t m = 0; m < r.lq.size(); ++m)
        for (size_t k = 0; k < r.tau.size(); ++k) t.add({std::to_string(m), num(r.tau[k]), num(r.lq[m][k])});
      em.table("dalembert", t);
      json ratios = json::array();
      for (double x : r.ratios) ratios.push_back(jnum(x));
      em.finish({{"constant", jnum(r.constant)}, {"ratios", ratios}});
    } else if (*strichartz) {
      check_positive(st_N, "N");
      check_positive(st_members, "members");
      LinearBoundConfig lc;
      lc.kind = st_kind == "energy" ? BoundKind::energy : BoundKind::strichartz;
      if (lc.kind == BoundKind::strichartz) lc.exps = exponents(st_p, st_q);
      lc.flow = flow_from_string(st_flow);
      lc.tau_max = st_tau;
      lc.threads = g.threads;
      GridPtr grid = make_grid(st_N);
      RandomDataSpec rd;
      rd.seed = g.seed;
      const LinearBoundReport r = linear_bound_experiment(lc, random_ensemble(rd, static_cast<size_t>(st_members), grid));
      Emitter em(g, "strichartz", config_echo(app, *strichartz));
      CsvTable t(csv_schema("strichartz").columns);
      for (const LinearMember& m : r.members)
        t.add({std::to_string(m.index), m.skipped ? "1" : "0", num(m.norm0), num(m.value), num(m.tail), num(m.ratio),
               num(m.slope)});
      em.table("strichartz", t);
      em.finish({{"max_ratio", jnum(r.max_ratio)}, {"max_slope", jnum(r.max_slope)}, {"skipped", r.skipped}});
    } else if (*kernel) {
      KernelOptions ko;
      ko.omega_max = ke_omega;
      ko.potential = Potential::from_name(ke_pot);
      ko.threads = g.threads;
      const std::vector<KernelSample> ks = perturbation_kernel(ke_rho, ke_s, ke_tau, ko);
      Emitter em(g, "kernel", config_echo(app, *kernel));
      CsvTable t(csv_schema("kernel").columns);
      double max_ratio = 0.0, max_abs = 0.0, max_err = 0.0;
      for (const KernelSample& k : ks) {
        t.add({num(k.rho), num(k.s), num(k.tau), num(k.K.real()), num(k.K.imag()), num(k.envelope), num(k.ratio),
               num(k.error_bar)});
        max_ratio = std::max(max_ratio, k.ratio);
        max_abs = std::max(max_abs, std::abs(k.K));
        max_err = std::max(max_err, k.error_bar);
      }
      em.table("kernel", t);
      em.finish({{"max_ratio", jnum(max_ratio)}, {"max_abs_K", jnum(max_abs)}, {"max_error_bar", jnum(max_err)}});
    } else if (*stability) {
      sc.seed = g.seed;
      sc.threads = g.threads;
      const StabilityReport r = stability_experiment(sc);
      Emitter em(g, "stability", config_echo(app, *stability));
      CsvTable t(csv_schema("stability").columns);
      for (const StabilityMember& m : r.members)
        t.add({num(m.delta), std::to_string(m.member), num(m.T_star), num(m.S), num(m.S_tail), num(m.physical),
               std::to_string(m.trials), m.monotone ? "1" : "0"});
      em.table("stability", t);
      json per = json::array();
      for (size_t i = 0; i < r.deltas.size(); ++i)
        per.push_back({{"delta", r.deltas[i]}, {"max_S", jnum(r.max_S[i])}, {"max_dev", jnum(r.max_dev[i])}});
      em.finish({{"slope", jnum(r.slope)},
                 {"C", jnum(r.C)},
                 {"max_S_over_delta2", jnum(r.max_S_over_delta2)},
                 {"per_delta", per}});
    } else if (*scan) {
      so.keep_grid = true;
      const ScanResult r = zero_scan(so);
      Emitter em(g, "scan-w0", config_echo(app, *scan));
      CsvTable t(csv_schema("scan-w0").columns);
      for (size_t i = 0; i < r.eps.size(); ++i)
        for (size_t k = 0; k < r.omega.size(); ++k)
          t.add({num(r.eps[i]), num(r.omega[k]), num(r.abs_w0[i * r.omega.size() + k])});
      em.table("scan_w0", t);
      json refined = json::array();
      for (const ScanMinimum& m : r.refined) refined.push_back({{"lambda", jcplx(m.lambda)}, {"abs_w0", jnum(m.value)}});
      em.finish({{"minimum", {{"lambda", jcplx(r.minimum.lambda)}, {"abs_w0", jnum(r.minimum.value)}}},
                 {"refined", refined}});
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? 2 : 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid number: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

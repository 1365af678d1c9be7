// wkstab: command-line front end. Reads JSON specs (files, inline JSON or
// preset names), writes one JSON report per run.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure (including a
// failed `verify` check).

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "verify.hpp"
#include "wkstab/fibration.hpp"
#include "wkstab/invariants.hpp"
#include "wkstab/io.hpp"
#include "wkstab/solvers.hpp"
#include "wkstab/toricmetrics.hpp"

namespace {

using namespace wkstab;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

/// A file path, inline JSON, or a bare word (taken as a JSON string).
json load(const std::string& arg, const std::string& flag) {
  std::string text = arg;
  const bool looks_inline = !arg.empty() && (arg[0] == '{' || arg[0] == '[' || arg[0] == '"');
  if (!looks_inline && std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (!looks_inline) {
    json parsed = json::parse(arg, nullptr, false);
    return parsed.is_discarded() ? json(arg) : parsed;
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, flag + ": " + e.what());
  }
}

/// "n=1,k=2" with optional p=1:0 (colon-separated), c=..., s=...
FibrationFactor parse_factor(const std::string& text, int dim, bool need_p) {
  json j = json::object();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "--factor '" + text + "': expected key=value pairs");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "n" || key == "k") {
      j[key] = json::parse(val, nullptr, false);
      if (!j[key].is_number_integer()) throw Error(ErrorKind::Parse, "--factor '" + text + "': " + key + " must be an integer");
    } else if (key == "s") {
      j[key] = json::parse(val, nullptr, false);
      if (!j[key].is_number()) throw Error(ErrorKind::Parse, "--factor '" + text + "': s must be a number");
    } else if (key == "c") {
      j[key] = val;
    } else if (key == "p") {
      json p = json::array();
      std::stringstream ps(val);
      std::string c;
      while (std::getline(ps, c, ':')) p.push_back(json::parse(c, nullptr, false));
      j[key] = p;
    } else {
      throw Error(ErrorKind::Parse, "--factor '" + text + "': unknown key '" + key + "'");
    }
  }
  if (!need_p && !j.contains("k")) throw Error(ErrorKind::InvalidInput, "--factor '" + text + "': enumeration needs a Fano constant k");
  if (!need_p && !j.contains("p")) j["p"] = json(IntVec(static_cast<std::size_t>(dim), 0));
  FibrationFactor f;
  f.base = io::base_factor_from_json(j, "--factor");
  f.p = io::intvec_from_json(io::field(j, "p", "--factor"), "--factor/p", dim);
  if (j.contains("c"))
    f.c = io::rational_from_json(j["c"], "--factor/c");
  else if (f.base.k)
    f.c = *f.base.k;
  else
    throw Error(ErrorKind::Parse, "--factor '" + text + "': needs c unless k is given");
  return f;
}

struct Common {
  std::string out;
  bool timings = false;
};

struct SolverFlags {
  double tol = 1e-10;
  int max_iter = 100;
  std::string csv;
  SolverOptions options() const {
    SolverOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return o;
  }
};

struct GridFlags {
  int grid = 400;
  double margin = 0.0;
  double h = 1e-4;
  GridSpec spec() const {
    GridSpec g;
    g.points_per_axis = grid;
    g.margin = margin;
    g.h = h;
    return g;
  }
};

/// Fibration input: --spec, or --fiber with repeated --factor.
struct FibrationFlags {
  std::string spec, fiber;
  std::vector<std::string> factors;

  FibrationSpec load_spec(bool need_p = true) const {
    if (!spec.empty()) {
      if (!fiber.empty() || !factors.empty()) throw Error(ErrorKind::InvalidInput, "give either --spec or --fiber/--factor, not both");
      return io::fibration_from_json(load(spec, "--spec"), "--spec");
    }
    if (fiber.empty()) throw Error(ErrorKind::InvalidInput, "a fibration needs --spec or --fiber");
    FibrationSpec s{io::polytope_from_json(load(fiber, "--fiber"), "--fiber"), {}};
    for (const auto& f : factors) s.factors.push_back(parse_factor(f, s.fiber.dim(), need_p));
    return s;
  }
};

void emit(const Common& c, const json& report, double seconds) {
  json r = report;
  if (c.timings) r["timings"] = {{"wall_seconds", seconds}};
  const std::string text = r.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write --out file '" + c.out + "'");
  f << text;
}

void write_csv(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write --csv file '" + path + "'");
  f << text;
}

json reports_json(const std::vector<FutakiReport>& rs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(io::to_json(r));
  return a;
}

double max_abs(const std::vector<FutakiReport>& rs) {
  double m = 0;
  for (const auto& r : rs) m = std::max(m, std::abs(r.value));
  return m;
}

bool same_weight(const DelzantPolytope& p, const WeightFn& a, const WeightFn& b) {
  for (const auto& x : wkstab::detail::sample_points(p, 64, 5)) {
    const double u = a.eval(x), v = b.eval(x);
    if (std::abs(u - v) > 1e-12 * (1 + std::abs(v))) return false;
  }
  return true;
}

bool is_constant_one(const WeightFn& w) {
  return w.is_polynomial() && w.as_polynomial() == Polynomial::constant(w.dim(), 1);
}

json solver_json(const SolverResult& s) { return io::to_json(s); }

json fano_certificate(const DelzantPolytope& P, const WeightFn& v, const Vec& xi0) {
  const WeightFn vsol = WeightFn::exp_affine(AffineFunction(exact_rational(xi0), 0)) * v;
  std::vector<FutakiReport> reps;
  for (int i = 0; i < P.dim(); ++i) {
    RatVec e(static_cast<std::size_t>(P.dim()), Rational(0));
    e[static_cast<std::size_t>(i)] = 1;
    reps.push_back(futaki_fano(P, vsol, e));
  }
  return {{"futaki_fano", reports_json(reps)}, {"max_abs", max_abs(reps)}};
}

const char* kEquivalenceNote =
    "xi0 minimizes the weighted exponential volume for any admissible weight; its identification with vanishing of the "
    "closed-form Futaki invariant is asserted only on canonical Fano polytopes";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted K-stability obstructions on toric data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "write the report here instead of stdout");
    sub->add_flag("--timings", common.timings, "append wall-clock timings to the report");
  };
  SolverFlags solver;
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--tol", solver.tol, "stop when |grad| <= tol * objective")->capture_default_str();
    sub->add_option("--max-iter", solver.max_iter, "Newton iteration cap")->capture_default_str();
    sub->add_option("--csv", solver.csv, "write the iteration trace as CSV");
  };
  GridFlags grid;
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", grid.grid, "points per axis for the metric-side integral")->capture_default_str();
    sub->add_option("--margin", grid.margin, "interior margin eps (0: 1e-3 * inradius)")->capture_default_str();
    sub->add_option("--fd-step", grid.h, "finite-difference step h")->capture_default_str();
  };
  std::string norm_name = "polytope";
  std::string polytope_arg, weight_arg = "1", v_arg, w_arg, w0_arg, extra_arg, direction_arg;
  FibrationFlags fib;
  std::optional<double> s_exp;
  bool all_affine = false, soliton_pair = false, numeric = false;
  std::string suite;

  auto* info = app.add_subcommand("polytope-info", "vertices, volume, facet measures, canonical-Fano flag");
  info->add_option("--polytope", polytope_arg, "polytope (file, JSON or preset)")->required();
  add_common(info);

  auto* fut = app.add_subcommand("futaki", "weighted Futaki invariant, boundary formula and closed form");
  fut->add_option("--polytope", polytope_arg)->required();
  fut->add_option("--v", v_arg, "weight v")->required();
  auto* w_opt = fut->add_option("--w", w_arg, "weight w");
  auto* sp_opt = fut->add_flag("--soliton", soliton_pair, "use w = 2(m v + <x, grad v>) with m = dim");
  w_opt->excludes(sp_opt);
  auto* dir_opt = fut->add_option("--direction", direction_arg, "affine direction {\"zeta\": [...], \"a\": ...}");
  auto* all_opt = fut->add_flag("--all-affine", all_affine, "every element of the affine basis (default)");
  dir_opt->excludes(all_opt);
  fut->add_flag("--numeric", numeric, "also evaluate the metric-side integral with the Guillemin potential");
  fut->add_option("--normalization", norm_name)->check(CLI::IsMember({"polytope", "symplectic"}))->capture_default_str();
  add_grid(fut);
  add_common(fut);

  auto* ext = app.add_subcommand("extremal", "extremal affine function");
  ext->add_option("--polytope", polytope_arg)->required();
  ext->add_option("--v", v_arg)->required();
  ext->add_option("--w0", w0_arg)->required();
  ext->add_option("--extra", extra_arg, "extra source term");
  add_common(ext);

  auto add_target = [&](CLI::App* sub) {
    sub->add_option("--polytope", polytope_arg);
    sub->add_option("--spec", fib.spec, "fibration spec");
    sub->add_option("--weight", weight_arg, "weight p (default 1)");
  };
  auto* sol = app.add_subcommand("soliton", "soliton vector field by Newton's method");
  add_target(sol);
  add_solver(sol);
  add_common(sol);

  auto* reeb = app.add_subcommand("reeb", "Reeb field minimizing the weighted volume");
  add_target(reeb);
  reeb->add_option("--s", s_exp, "exponent (default dim + 1; m + n + 1 for fibrations)");
  add_solver(reeb);
  add_common(reeb);

  auto* fibcmd = app.add_subcommand("fibration", "semi-simple principal fibrations");
  fibcmd->require_subcommand(1);
  auto add_fib = [&](CLI::App* sub) {
    sub->add_option("--spec", fib.spec, "fibration spec (file or JSON)");
    sub->add_option("--fiber", fib.fiber, "fiber polytope (file, JSON or preset)");
    sub->add_option("--factor", fib.factors, "base factor, e.g. n=1,k=2,p=1:0");
    add_common(sub);
  };
  auto* f_validate = fibcmd->add_subcommand("validate", "admissibility and the Fano condition");
  add_fib(f_validate);
  auto* f_weights = fibcmd->add_subcommand("weights", "p, q, extremal l and w~ on the fiber");
  add_fib(f_weights);
  auto* f_enum = fibcmd->add_subcommand("enumerate", "all Fano choices of p over a fixed fiber");
  add_fib(f_enum);
  auto* f_sol = fibcmd->add_subcommand("soliton", "pv-soliton of the fiber");
  add_fib(f_sol);
  f_sol->add_option("--weight", weight_arg, "extra weight v (default 1)");
  add_solver(f_sol);
  auto* f_reeb = fibcmd->add_subcommand("reeb", "pv-soliton plus the Reeb optimum with s = m + n + 1");
  add_fib(f_reeb);
  f_reeb->add_option("--weight", weight_arg, "extra weight v (default 1)");
  add_solver(f_reeb);

  auto* ver = app.add_subcommand("verify", "oracle cross-check suites");
  ver->add_option("suite", suite, "quadrature | futaki | identity | all")->required()->check(CLI::IsMember(verify::suite_names()));
  ver->add_option("--normalization", norm_name)->check(CLI::IsMember({"polytope", "symplectic"}))->capture_default_str();
  add_grid(ver);
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  int status = kExitOk;
  try {
    const Normalization norm = parse_normalization(norm_name);
    if (info->parsed()) {
      const DelzantPolytope P = io::polytope_from_json(load(polytope_arg, "--polytope"), "--polytope");
      emit(common, io::report("polytope-info", {{"polytope", io::to_json(P)}}, io::polytope_info(P), Normalization::Polytope), elapsed());
    } else if (fut->parsed()) {
      const DelzantPolytope P = io::polytope_from_json(load(polytope_arg, "--polytope"), "--polytope");
      const int r = P.dim();
      const WeightFn v = io::weight_from_json(load(v_arg, "--v"), r, "--v");
      WeightFn w(r);
      if (soliton_pair)
        w = soliton_weight_pair(P, v, r).w;
      else if (!w_arg.empty())
        w = io::weight_from_json(load(w_arg, "--w"), r, "--w");
      else
        throw Error(ErrorKind::InvalidInput, "futaki needs --w or --soliton");
      const std::vector<AffineFunction> dirs =
          direction_arg.empty() ? affine_basis(r) : std::vector<AffineFunction>{io::affine_from_json(load(direction_arg, "--direction"), r, "--direction")};

      std::vector<FutakiReport> boundary;
      for (const auto& l : dirs) boundary.push_back(futaki_boundary(P, v, w, l, norm));
      json results{{"boundary", reports_json(boundary)}};

      std::string why;
      if (!P.is_canonical_fano())
        why = "polytope is not canonical Fano";
      else if (!soliton_pair && !same_weight(P, w, soliton_weight_pair(P, v, r).w))
        why = "w is not the soliton weight 2(m v + <x, grad v>)";
      if (why.empty()) {
        std::vector<FutakiReport> fano;
        double diff = 0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
          fano.push_back(futaki_fano(P, v, dirs[k].zeta(), norm));
          diff = std::max(diff, std::abs(fano.back().value - boundary[k].value));
        }
        results["fano"] = {{"applicable", true}, {"reports", reports_json(fano)}, {"max_abs_difference", diff}};
      } else {
        results["fano"] = {{"applicable", false}, {"reason", why}};
      }
      if (numeric) {
        const GridSpec g = grid.spec();
        const auto u = SymplecticPotential::guillemin(P);
        const auto num = futaki_numeric_all(P, u, v, w, dirs, g);
        const double kappa = normalization_factor(norm, r);
        json a = json::array();
        double diff = 0;
        for (std::size_t k = 0; k < num.size(); ++k) {
          a.push_back({{"direction", io::to_json(num[k].direction)},
                       {"value", kappa * num[k].value},
                       {"truncation_estimate", kappa * num[k].truncation_estimate},
                       {"grid_estimate", kappa * num[k].grid_estimate},
                       {"method", to_string(FutakiMethod::MetricNumeric)},
                       {"normalization", to_string(norm)}});
          diff = std::max(diff, std::abs(kappa * num[k].value - boundary[k].value));
        }
        results["metric_numeric"] = {{"potential", "guillemin"},
                                     {"grid", {{"points_per_axis", g.points_per_axis}, {"margin", resolved_margin(P, g)}, {"h", g.h}}},
                                     {"reports", a},
                                     {"max_abs_difference", diff}};
      }
      json inputs{{"polytope", io::to_json(P)}, {"v", io::to_json(v)}, {"w", io::to_json(w)}};
      emit(common, io::report("futaki", inputs, results, norm), elapsed());
    } else if (ext->parsed()) {
      const DelzantPolytope P = io::polytope_from_json(load(polytope_arg, "--polytope"), "--polytope");
      const int r = P.dim();
      const WeightFn v = io::weight_from_json(load(v_arg, "--v"), r, "--v");
      const WeightFn w0 = io::weight_from_json(load(w0_arg, "--w0"), r, "--w0");
      std::optional<WeightFn> extra;
      if (!extra_arg.empty()) extra = io::weight_from_json(load(extra_arg, "--extra"), r, "--extra");
      const ExtremalFunction e = extremal_affine(P, v, w0, extra);
      json inputs{{"polytope", io::to_json(P)}, {"v", io::to_json(v)}, {"w0", io::to_json(w0)}};
      if (extra) inputs["extra"] = io::to_json(*extra);
      emit(common, io::report("extremal", inputs, io::to_json(e), Normalization::Polytope), elapsed());
    } else if (sol->parsed() || reeb->parsed()) {
      const bool is_reeb = reeb->parsed();
      const std::string name = is_reeb ? "reeb" : "soliton";
      if (polytope_arg.empty() == fib.spec.empty()) throw Error(ErrorKind::InvalidInput, name + " needs exactly one of --polytope or --spec");
      json results, inputs;
      if (!polytope_arg.empty()) {
        const DelzantPolytope P = io::polytope_from_json(load(polytope_arg, "--polytope"), "--polytope");
        const WeightFn p = io::weight_from_json(load(weight_arg, "--weight"), P.dim(), "--weight");
        inputs = {{"polytope", io::to_json(P)}, {"weight", io::to_json(p)}};
        if (!is_reeb) {
          const SolverResult res = tian_zhu_soliton(P, p, solver.options());
          write_csv(solver.csv, io::trace_csv(res));
          results = {{"solver", solver_json(res)},
                     {"equivalence", {{"canonical_fano", P.is_canonical_fano()}, {"claimed", P.is_canonical_fano()}, {"note", kEquivalenceNote}}}};
          if (P.is_canonical_fano()) results["certificate"] = fano_certificate(P, p, res.xi0);
        } else {
          const double s = s_exp ? *s_exp : P.dim() + 1.0;
          inputs["s"] = s;
          const SolverResult res = msy_reeb(P, p, s, solver.options());
          write_csv(solver.csv, io::trace_csv(res));
          results = {{"solver", solver_json(res)}};
          // the Sasaki pair certificate needs p = 1, s = m + 1 on a canonical Fano polytope
          if (P.is_canonical_fano() && is_constant_one(p) && s == P.dim() + 1.0) {
            const auto pair = sasaki_weight_pair(P, exact_rational(res.xi0), Rational(1), P.dim());
            const auto reps = futaki_all_affine(P, pair.v, pair.w);
            results["certificate"] = {{"sasaki_futaki", reports_json(reps)}, {"max_abs", max_abs(reps)}};
          }
        }
      } else {
        const FibrationSpec spec = fib.load_spec();
        const WeightFn v = io::weight_from_json(load(weight_arg, "--weight"), spec.fiber_dim(), "--weight");
        if (is_reeb && s_exp && *s_exp != spec.fiber_dim() + spec.base_dim() + 1.0)
          throw Error(ErrorKind::InvalidInput, "for fibrations s is fixed to m + n + 1 = " + std::to_string(spec.fiber_dim() + spec.base_dim() + 1));
        inputs = {{"spec", io::to_json(spec)}, {"weight", io::to_json(v)}};
        const PipelineResult pr = pv_soliton_pipeline(spec, v, solver.options(), is_reeb);
        const SolverResult& main = is_reeb ? *pr.reeb : pr.soliton;
        write_csv(solver.csv, io::trace_csv(main));
        results = {{"solver", solver_json(main)}};
        if (is_reeb) {
          results["soliton"] = solver_json(pr.soliton);
          results["certificate"] = {{"sasaki_futaki", reports_json(pr.reeb_certificate)}, {"max_abs", max_abs(pr.reeb_certificate)}};
        } else {
          results["certificate"] = {{"futaki_fano", reports_json(pr.soliton_certificate)}, {"max_abs", max_abs(pr.soliton_certificate)}};
          results["equivalence"] = {{"canonical_fano", true}, {"claimed", true}, {"note", kEquivalenceNote}};
        }
      }
      emit(common, io::report(name, inputs, results, Normalization::Polytope), elapsed());
    } else if (fibcmd->parsed()) {
      if (f_enum->parsed()) {
        if (!fib.spec.empty()) throw Error(ErrorKind::InvalidInput, "enumerate takes --fiber and --factor");
        const FibrationSpec spec = fib.load_spec(false);
        std::vector<BaseFactor> bases;
        json fin = json::array();
        for (const auto& f : spec.factors) {
          bases.push_back(f.base);
          fin.push_back(io::to_json(f.base));
        }
        const auto tuples = enumerate_fano(spec.fiber, bases);
        json t = json::array();
        for (const auto& tuple : tuples) t.push_back(tuple);
        emit(common, io::report("fibration enumerate", {{"fiber", io::to_json(spec.fiber)}, {"factors", fin}}, {{"count", tuples.size()}, {"tuples", t}},
                                Normalization::Polytope),
             elapsed());
      } else {
        const FibrationSpec spec = fib.load_spec();
        json inputs{{"spec", io::to_json(spec)}};
        if (f_validate->parsed()) {
          validate(spec);
          json res{{"admissible", true}};
          const bool all_fano = std::all_of(spec.factors.begin(), spec.factors.end(), [](const FibrationFactor& f) { return f.base.is_fano(); });
          if (spec.fiber.is_canonical_fano() && all_fano)
            res["fano"] = fano_check(spec);
          else
            res["fano"] = nullptr;
          emit(common, io::report("fibration validate", inputs, res, Normalization::Polytope), elapsed());
        } else if (f_weights->parsed()) {
          const FibrationWeights fw = extremal_fibration_weights(spec);
          json res{{"p", io::to_json(fw.p)}, {"q", io::to_json(fw.q)}, {"ell_ext", io::to_json(fw.extremal)["ell"]}, {"w_tilde", io::to_json(fw.w_tilde)},
                   {"extremal", io::to_json(fw.extremal)}};
          emit(common, io::report("fibration weights", inputs, res, Normalization::Polytope), elapsed());
        } else {
          const bool with_reeb = f_reeb->parsed();
          const WeightFn v = io::weight_from_json(load(weight_arg, "--weight"), spec.fiber_dim(), "--weight");
          inputs["weight"] = io::to_json(v);
          const PipelineResult pr = pv_soliton_pipeline(spec, v, solver.options(), with_reeb);
          write_csv(solver.csv, io::trace_csv(with_reeb ? *pr.reeb : pr.soliton));
          json res{{"soliton", solver_json(pr.soliton)},
                   {"soliton_certificate", {{"futaki_fano", reports_json(pr.soliton_certificate)}, {"max_abs", max_abs(pr.soliton_certificate)}}},
                   {"equivalence", {{"canonical_fano", true}, {"claimed", true}, {"note", kEquivalenceNote}}}};
          if (with_reeb) {
            res["reeb"] = solver_json(*pr.reeb);
            res["reeb_certificate"] = {{"sasaki_futaki", reports_json(pr.reeb_certificate)}, {"max_abs", max_abs(pr.reeb_certificate)}};
          }
          emit(common, io::report(with_reeb ? "fibration reeb" : "fibration soliton", inputs, res, Normalization::Polytope), elapsed());
        }
      }
    } else if (ver->parsed()) {
      const GridSpec g = grid.spec();
      const auto checks = verify::run(suite, g, norm);
      json rows = json::array();
      bool all = true;
      for (const auto& c : checks) {
        rows.push_back(verify::to_json(c));
        all = all && c.pass;
      }
      emit(common,
           io::report("verify", {{"suite", suite}, {"grid", {{"points_per_axis", g.points_per_axis}, {"margin", g.margin}, {"h", g.h}}}},
                      {{"all_pass", all}, {"checks", rows}}, norm),
           elapsed());
      if (!all) status = kExitSolver;
    }
  } catch (const Error& e) {
    json err{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return is_solver_failure(e.kind()) ? kExitSolver : kExitInput;
  } catch (const json::exception& e) {
    json err{{"error", {{"kind", "Parse"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return kExitInput;
  }
  return status;
}

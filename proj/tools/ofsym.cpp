#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "ofsym/config.hpp"
#include "ofsym/report.hpp"
#include "ofsym/solutions.hpp"
#include "ofsym/timedep.hpp"

namespace fs = std::filesystem;
using namespace ofsym;

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  double tol_override = -1.0;
};

RunConfig load_config(const CliArgs& args) {
  RunConfig cfg = RunConfig::load(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.tol_override > 0) cfg.residual_tol = args.tol_override;
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::string format_compact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int cmd_classify(const CliArgs& args) {
  RunConfig cfg = load_config(args);
  const ModelSpec model = cfg.model();
  ClassifyOptions opt;
  opt.cond_tol = cfg.cond_tol;
  opt.residual_tol = cfg.residual_tol;
  opt.quad_tol = cfg.quad_tol;
  opt.x_ref = cfg.x_ref;
  opt.verify_grid.t_max = cfg.grid.t_max;

  const ClassificationReport rep = classify(model, cfg.grid.x_points(), opt);
  const std::string path = cfg.out_dir + "/classification.json";
  write_text_file(path, to_json(rep).dump(2));
  std::cout << "case: " << rep.case_label << "\n"
            << "counts: " << rep.total << "\n";
  if (rep.m) std::cout << "m: " << format_double(*rep.m) << "\n";
  if (rep.c) std::cout << "c: " << format_double(*rep.c) << "\n";
  std::cout << "report: " << path << "\n";
  return 0;
}

ResidualReport verify_solution(const ModelSpec& model, const Expr& lnF,
                               const GridSpec& grid) {
  return residual(model, [lnF](double t, double x) { return lnF.eval_tx(t, x); }, grid);
}

int cmd_verify(const CliArgs& args) {
  RunConfig cfg = load_config(args);
  const std::string selector = cfg.get("verify", "selector");
  if (selector.empty()) throw ConfigError("missing [verify] selector");

  auto constant = [&cfg](const std::string& name, double fallback) {
    auto it = cfg.constants.find(name);
    return it == cfg.constants.end() ? fallback : it->second;
  };
  FamilyParams fp;
  fp.m = constant("m", 1.0);
  fp.c = constant("c", 0.0);
  fp.eps = constant("eps", 0.1);
  fp.x0 = constant("x0", 0.0);
  fp.omega = constant("omega", 1.0);

  ResidualReport rep;
  bool documented = false;
  std::string note;
  if (selector == "schwartz") {
    const double kappa = constant("kappa", 2.0), sigma0 = constant("sigma0", 0.2);
    const double mu = constant("mu", 0.3), lambda = constant("lambda", 0.1);
    const ClosedFormSolution sol = schwartz_solution(kappa, lambda, mu, sigma0);
    const ModelSpec model = ModelSpec::constant_coefficients(kappa, mu, lambda, sigma0);
    rep = verify_solution(model, sol.lnF, cfg.grid);
  } else if (selector == "con02" || selector == "con03") {
    if (selector == "con03") fp.eps = 0.0;
    const ExampleFamily fam = example_family(FamilyKind::ExpPerturbation, fp);
    rep = verify_solution(fam.model, fam.solution.lnF, cfg.grid);
  } else if (selector == "con04" || selector == "sine") {
    const ExampleFamily fam = example_family(FamilyKind::SinePerturbation, fp);
    rep = verify_solution(fam.model, fam.solution.lnF, cfg.grid);
    note = fam.note;
  } else if (selector == "power-sigma") {
    const ExampleFamily fam = example_family(FamilyKind::PowerSigma, fp);
    rep = verify_solution(fam.model, fam.solution.lnF, cfg.grid);
  } else if (selector == "exp-sigma") {
    const ExampleFamily fam = example_family(FamilyKind::ExpSigma, fp);
    rep = verify_solution(fam.model, fam.solution.lnF, cfg.grid);
  } else if (selector == "expr") {
    const Expr lnF = cfg.expr("verify", "lnF");
    rep = verify_solution(cfg.model(), lnF, cfg.grid);
  } else if (selector.rfind("paper-", 0) == 0) {
    const std::string id = selector.substr(6);
    bool found = false;
    for (const auto& status : paper_form_statuses(cfg.residual_tol)) {
      if (status.id == id) {
        found = true;
        rep.max_abs = status.residual;
        documented = status.documented;
        note = status.note;
        if (!status.verified && !status.documented)
          throw Error("paper form neither verified nor documented: " + id);
      }
    }
    if (!found) throw ConfigError("unknown paper form selector: " + selector);
  } else {
    throw ConfigError("unknown selector: " + selector);
  }

  Json j = to_json(rep);
  j.set("selector", Json::str(selector));
  j.set("tolerance", Json::num(cfg.residual_tol));
  const bool pass = documented || rep.max_abs <= cfg.residual_tol;
  j.set("pass", Json::boolean(pass));
  if (documented) j.set("documented_discrepancy", Json::boolean(true));
  if (!note.empty()) j.set("note", Json::str(note));
  const std::string path = cfg.out_dir + "/residual_report.json";
  write_text_file(path, j.dump(2));
  std::cout << "selector: " << selector << "\n"
            << "max residual: " << format_double(rep.max_abs) << "\n"
            << (pass ? "pass" : "fail") << "\n";
  return pass ? 0 : 1;
}

int cmd_figure3(const CliArgs& args) {
  RunConfig cfg = load_config(args);
  std::vector<std::string> families;
  {
    std::string list = cfg.get("figure3", "families",
                               "exp_perturbation,sine_perturbation");
    std::size_t pos = 0;
    while (pos != std::string::npos) {
      const auto comma = list.find(',', pos);
      families.push_back(list.substr(pos, comma - pos));
      pos = comma == std::string::npos ? comma : comma + 1;
    }
  }
  std::vector<double> eps_values;
  {
    std::string list = cfg.get("figure3", "eps", "0.1,0.01");
    std::size_t pos = 0;
    while (pos != std::string::npos) {
      const auto comma = list.find(',', pos);
      eps_values.push_back(std::strtod(list.substr(pos, comma - pos).c_str(), nullptr));
      pos = comma == std::string::npos ? comma : comma + 1;
    }
  }
  const double t0 = cfg.get_num("figure3", "t0", 1.0);
  FamilyParams fp;
  fp.m = cfg.get_num("figure3", "m", 1.0);
  fp.c = cfg.get_num("figure3", "c", 0.0);
  fp.x0 = cfg.get_num("figure3", "x0", 0.0);
  fp.omega = cfg.get_num("figure3", "omega", 1.0);

  const Eigen::ArrayXd xs = cfg.grid.x_points();
  for (const std::string& family : families) {
    FamilyKind kind;
    if (family == "exp_perturbation")
      kind = FamilyKind::ExpPerturbation;
    else if (family == "sine_perturbation")
      kind = FamilyKind::SinePerturbation;
    else
      throw ConfigError("unknown figure3 family: " + family);
    for (double eps : eps_values) {
      FamilyParams p = fp;
      p.eps = eps;
      const ExampleFamily fam = example_family(kind, p);
      const ResidualReport rep = verify_solution(fam.model, fam.solution.lnF, cfg.grid);
      if (rep.max_abs > cfg.residual_tol)
        throw SolveError("family " + family + " eps=" + format_compact(eps) +
                         " fails residual verification: " +
                         format_double(rep.max_abs));
      std::vector<std::vector<double>> rows;
      for (const auto& [x, lnF] : static_profile(fam.solution, t0, xs))
        rows.push_back({x, lnF});
      const std::string name = family + "_eps" + format_compact(eps) + "_t" +
                               format_compact(t0) + ".csv";
      const std::string comment = "family=" + family + " eps=" + format_compact(eps) +
                                  " m=" + format_compact(p.m) + " c=" +
                                  format_compact(p.c) + " t0=" + format_compact(t0);
      write_csv(cfg.out_dir + "/" + name, comment, {"x", "lnF"}, rows);
      std::cout << "wrote " << cfg.out_dir << "/" << name << "\n";
    }
  }
  return 0;
}

int cmd_timedep(const CliArgs& args) {
  RunConfig cfg = load_config(args);
  TimeDepModel model;
  model.p = cfg.expr("timedep", "p");
  model.q = cfg.expr("timedep", "q");
  const double t1 = cfg.grid.t_max;
  const std::vector<TimeDepSymmetry> basis = symmetry_basis(model, 0.0, t1);

  Json j = Json::object();
  j.set("dimension", Json::integer(static_cast<long long>(basis.size())));
  j.set("p", Json::str(model.p.str()));
  j.set("q", Json::str(model.q.str()));
  Json elements = Json::array();
  double worst = 0.0;
  const int samples = std::min(cfg.grid.n_t, 201);
  for (const auto& sym : basis) {
    Json e = Json::object();
    Json init = Json::array();
    for (int k = 0; k < 6; ++k) init.push(Json::num(sym.init[k]));
    e.set("init", std::move(init));
    Json ts = Json::array(), as = Json::array(), bs = Json::array(), fs = Json::array();
    for (int i = 0; i < samples; ++i) {
      const double t = t1 * i / (samples - 1);
      const State6 y = sym.state(t);
      ts.push(Json::num(t));
      as.push(Json::num(y[0]));
      bs.push(Json::num(y[3]));
      fs.push(Json::num(y[5]));
    }
    e.set("t", std::move(ts));
    e.set("a", std::move(as));
    e.set("b", std::move(bs));
    e.set("f", std::move(fs));
    Json res = Json::object();
    res.set("r1", Json::num(sym.max_r1));
    res.set("r2", Json::num(sym.max_r2));
    res.set("r3", Json::num(sym.max_r3));
    e.set("max_residuals", std::move(res));
    worst = std::max({worst, sym.max_r1, sym.max_r2, sym.max_r3});
    elements.push(std::move(e));
  }
  j.set("elements", std::move(elements));
  j.set("max_residual", Json::num(worst));
  j.set("algebra_note",
        Json::str("maximal for all smooth p, q: a special-linear pair acting on "
                  "translations and the scaling center, plus the linear symmetry "
                  "and the infinite solution family"));
  const std::string path = cfg.out_dir + "/timedep_basis.json";
  write_text_file(path, j.dump(2));
  std::cout << "dimension: " << basis.size() << "\n"
            << "max residual: " << format_double(worst) << "\n"
            << "report: " << path << "\n";
  return worst <= cfg.residual_tol ? 0 : 1;
}

int cmd_solve(const CliArgs& args) {
  RunConfig cfg = load_config(args);
  const ModelSpec model = cfg.model();
  const Expr g = cfg.expr("solve", "g");
  const double theta = cfg.get_num("solve", "theta", 0.5);
  const GridSolution sol = solve_fd(model, g, cfg.grid, theta);
  std::vector<std::vector<double>> rows;
  const Eigen::ArrayXd ts = cfg.grid.t_points();
  const Eigen::ArrayXd xs = cfg.grid.x_points();
  rows.reserve(static_cast<std::size_t>(ts.size() * xs.size()));
  for (Eigen::Index j = 0; j < ts.size(); ++j)
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      rows.push_back({ts[j], xs[i], sol.lnF(j, i)});
  const std::string path = cfg.out_dir + "/solution.csv";
  write_csv(path, "theta=" + format_compact(theta), {"t", "x", "lnF"}, rows);
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry classification and invariant solutions of the one-factor "
               "commodity-pricing equation"};
  app.require_subcommand(1);

  CliArgs args;
  app.add_option("--config", args.config_path, "config file path")->required();
  app.add_option("--out", args.out_dir, "output directory (overrides [output] dir)");
  app.add_option("--tol", args.tol_override, "override residual tolerance");

  auto* classify_cmd = app.add_subcommand("classify", "classify the model's symmetries");
  auto* verify_cmd = app.add_subcommand("verify", "residual-check a solution");
  auto* figure3_cmd = app.add_subcommand("figure3", "tabulate the perturbation-family curves");
  auto* timedep_cmd = app.add_subcommand("timedep", "time-dependent symmetry basis");
  auto* solve_cmd = app.add_subcommand("solve", "finite-difference forward solve");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return cmd_classify(args);
    if (verify_cmd->parsed()) return cmd_verify(args);
    if (figure3_cmd->parsed()) return cmd_figure3(args);
    if (timedep_cmd->parsed()) return cmd_timedep(args);
    if (solve_cmd->parsed()) return cmd_solve(args);
  } catch (const OdeError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const SolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

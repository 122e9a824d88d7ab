#include "nme/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <map>

#include "nme/experiment.hpp"
#include "nme/io.hpp"

namespace nme {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

std::vector<NormKind> parse_norms(const std::string& s) {
  std::vector<NormKind> norms;
  for (const auto& item : split_list(s)) {
    NormKind k;
    if (item == "spec" || item == "spectral" || item == "2") {
      k = NormKind::spectral;
    } else if (item == "frob" || item == "frobenius" || item == "F") {
      k = NormKind::frobenius;
    } else {
      throw InputError("--norms: unknown norm '" + item + "'");
    }
    if (std::find(norms.begin(), norms.end(), k) == norms.end()) norms.push_back(k);
  }
  if (norms.empty()) throw InputError("--norms: empty list");
  return norms;
}

std::vector<std::string> parse_scalings(const std::string& s) {
  std::vector<std::string> out;
  for (auto item : split_list(s)) {
    if (item == "identity" || item == "I") item = "id";
    if (item == "P1") item = "p1";
    if (item != "id" && item != "sqrtQ" && item != "p1")
      throw InputError("--P: unknown scaling '" + item + "'");
    out.push_back(item);
  }
  if (out.empty()) throw InputError("--P: empty list");
  return out;
}

std::vector<int> parse_js(const std::string& s) {
  std::vector<int> js;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      js.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--j: not an integer: '" + item + "'");
    }
  }
  if (js.empty()) throw InputError("--j: empty list");
  return js;
}

void parse_bound_selection(const std::string& s, ExperimentConfig& cfg) {
  cfg.konppa11 = cfg.yinwf14 = cfg.hasb17 = cfg.serr = false;
  for (const auto& item : split_list(s)) {
    if (item == "konppa11") {
      cfg.konppa11 = true;
    } else if (item == "yinwf14") {
      cfg.yinwf14 = true;
    } else if (item == "hasb17") {
      cfg.hasb17 = true;
    } else if (item == "has" || item == "serr") {
      cfg.serr = true;
    } else {
      throw InputError("--bounds: unknown bound '" + item + "'");
    }
  }
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "text") return OutputFormat::text;
  throw InputError("--format: expected csv, json or text");
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json bound_to_json(const BoundComparison& b) {
  json j;
  j["column"] = b.column;
  j["applicable"] = b.bound.applicable;
  j["value"] = optional_json(b.bound.value);
  j["ratio"] = optional_json(b.ratio);
  if (!b.bound.note.empty()) j["note"] = b.bound.note;
  json diag = json::object();
  for (const auto& [k, v] : b.bound.diagnostics) diag[k] = v;
  j["diagnostics"] = std::move(diag);
  return j;
}

struct CommonOptions {
  double tol = 1e-14;
  std::size_t max_iter = 1'000'000;
  std::string format = "text";
};

void add_solver_options(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--tol", opts.tol, "Relative residual tolerance")->envname("NME_TOL");
  sub->add_option("--max-iter", opts.max_iter, "Iteration cap");
  sub->add_option("--format", opts.format, "Output format: csv, json or text");
}

SolveOptions solve_options(const CommonOptions& opts) {
  if (!(opts.tol > 0.0)) throw InputError("--tol must be positive");
  SolveOptions s;
  s.tol = opts.tol;
  s.max_iter = opts.max_iter;
  return s;
}

int cmd_solve(const std::string& path, const CommonOptions& opts, std::ostream& out) {
  const OutputFormat format = parse_format(opts.format);
  const EquationInstance inst = instance_from_json(read_json_file(path));
  const SolveReport r = solve_maximal(inst, solve_options(opts));
  if (format == OutputFormat::json) {
    json j;
    j["X"] = matrix_to_json(r.x.matrix());
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["existence_margin"] = r.existence_margin;
    j["gamma"] = r.gamma;
    j["rho"] = r.rho;
    out << j.dump(2) << '\n';
  } else if (format == OutputFormat::csv) {
    out << "iterations,residual,existence_margin,gamma,rho\n";
    out << fmt::format("{},{:.6e},{:.10g},{:.10g},{:.10g}\n", r.iterations, r.residual,
                       r.existence_margin, r.gamma, r.rho);
  } else {
    out << fmt::format("iterations        {}\n", r.iterations);
    out << fmt::format("residual          {:.6e}\n", r.residual);
    out << fmt::format("existence margin  {:.10g}\n", r.existence_margin);
    out << fmt::format("||X^-1 A||        {:.10g}\n", r.gamma);
    out << fmt::format("rho               {:.10g}\n", r.rho);
    out << "X =\n";
    const CMatrix& x = r.x.matrix();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t k = 0; k < x.cols(); ++k) {
        const Complex z = x(i, k);
        out << fmt::format("  {:>14.8g}{:+.3g}i", z.real(), z.imag());
      }
      out << '\n';
    }
  }
  return kExitOk;
}

int cmd_bounds(const std::string& inst_path, const std::string& pert_path,
               const CommonOptions& opts, const std::string& norms, const std::string& ps,
               std::ostream& out) {
  const OutputFormat format = parse_format(opts.format);
  const EquationInstance inst = instance_from_json(read_json_file(inst_path));
  const Perturbation pert = perturbation_from_json(read_json_file(pert_path), inst);
  CompareRequest req;
  req.norms = parse_norms(norms);
  req.scalings = parse_scalings(ps);
  const ComparisonRecord rec = [&] {
    try {
      return solve_perturbed_and_compare(inst, pert, req, solve_options(opts));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }();
  if (format == OutputFormat::json) {
    json j;
    j["actual_spec"] = rec.actual_spec;
    j["actual_frob"] = rec.actual_frob;
    j["iterations"] = rec.unperturbed.iterations;
    j["perturbed_iterations"] = rec.perturbed.iterations;
    j["bounds"] = json::array();
    for (const auto& b : rec.bounds) j["bounds"].push_back(bound_to_json(b));
    out << j.dump(2) << '\n';
  } else {
    const bool csv = format == OutputFormat::csv;
    if (csv) {
      out << "column,bound,ratio\n";
    } else {
      out << fmt::format("||dX_L||    {:.6e}\n||dX_L||_F  {:.6e}\n", rec.actual_spec,
                         rec.actual_frob);
    }
    for (const auto& b : rec.bounds) {
      const std::string value = b.bound.value ? fmt::format("{:.6e}", *b.bound.value) : "*";
      const std::string ratio = b.ratio ? fmt::format("{:.7g}", *b.ratio) : "*";
      if (csv) {
        out << b.column << ',' << value << ',' << ratio << '\n';
      } else {
        out << fmt::format("{:<12}{:>14}  ratio {:>12}", b.column, value, ratio);
        if (!b.bound.applicable && !b.bound.note.empty()) out << "  (" << b.bound.note << ')';
        out << '\n';
      }
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximal solution and perturbation bounds for X + sum A_i^* X^-1 A_i = Q", "nme"};
  app.require_subcommand(1);

  CommonOptions solve_opts;
  std::string solve_path;
  auto* solve = app.add_subcommand("solve", "Compute the maximal solution of an instance");
  solve->add_option("instance", solve_path, "Instance JSON file")->required();
  add_solver_options(solve, solve_opts);

  CommonOptions bounds_opts;
  std::string bounds_inst, bounds_pert, bounds_norms = "spec,frob", bounds_ps = "id,sqrtQ,p1";
  auto* bounds = app.add_subcommand("bounds", "Evaluate every perturbation bound");
  bounds->add_option("instance", bounds_inst, "Instance JSON file")->required();
  bounds->add_option("perturbation", bounds_pert, "Perturbation JSON file")->required();
  bounds->add_option("--norms", bounds_norms, "Comma list of spec, frob");
  bounds->add_option("--P", bounds_ps, "Comma list of id, sqrtQ, p1");
  add_solver_options(bounds, bounds_opts);

  CommonOptions table_opts;
  int example = 1;
  std::string js, table_norms = "spec,frob", table_ps = "id,sqrtQ,p1", table_bounds;
  std::uint64_t seed = kDefaultSeed;
  auto* table = app.add_subcommand("table", "Reproduce a worked example across j");
  table->add_option("--example", example, "Example number")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  table->add_option("--j", js, "Comma list of j values");
  table->add_option("--seed", seed, "PRNG seed")->envname("NME_SEED");
  table->add_option("--norms", table_norms, "Comma list of spec, frob");
  table->add_option("--P", table_ps, "Comma list of id, sqrtQ, p1");
  table->add_option("--bounds", table_bounds,
                    "Comma list of konppa11, yinwf14, hasb17, has (default all)");
  add_solver_options(table, table_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nme: " << e.what() << '\n';
    return kExitBadInput;
  }

  try {
    if (*solve) return cmd_solve(solve_path, solve_opts, out);
    if (*bounds) return cmd_bounds(bounds_inst, bounds_pert, bounds_opts, bounds_norms, bounds_ps, out);

    ExperimentConfig cfg;
    cfg.example = static_cast<ExampleId>(example - 1);
    if (!js.empty()) cfg.j_values = parse_js(js);
    cfg.seed = seed;
    cfg.norms = parse_norms(table_norms);
    cfg.p_choices = parse_scalings(table_ps);
    if (!table_bounds.empty()) parse_bound_selection(table_bounds, cfg);
    const SolveOptions s = solve_options(table_opts);
    cfg.tol = s.tol;
    cfg.max_iter = s.max_iter;
    cfg.format = parse_format(table_opts.format);
    const TableResult result = run_table(cfg);
    out << emit(result, cfg.format);
    const bool failed = std::any_of(result.rows.begin(), result.rows.end(),
                                    [](const TableRow& r) { return r.error.has_value(); });
    return failed ? kExitSolverFailure : kExitOk;
  } catch (const InputError& e) {
    err << "nme: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SolverError& e) {
    err << "nme: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const LinalgError& e) {
    err << "nme: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

}  // namespace nme

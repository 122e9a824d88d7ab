#include "nme/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

namespace nme {

namespace {

using json = nlohmann::json;

CMatrix lower_pattern_a0() {
  return CMatrix{{1, 0, 0, 0, 1},
                 {-1, 1, 0, 0, 1},
                 {-1, -1, 1, 0, 1},
                 {-1, -1, -1, 1, 1},
                 {-1, -1, -1, -1, 1}};
}

CMatrix banded_pattern() {
  return CMatrix{{2, 0, 0, 0, 0},
                 {1, 2, 0, 0, 0},
                 {1, 1, 2, 0, 0},
                 {0, 1, 1, 2, 0},
                 {0, 0, 1, 1, 2}};
}

// C / ‖C‖ for a fresh standard-normal 5×5 C.
CMatrix normalized_gaussian(std::uint64_t seed, ExampleId id, int j) {
  GaussianStream rng(derive_seed(seed, id, j));
  const CMatrix c = gaussian_matrix(rng, 5, 5);
  return c * Complex(1.0 / spectral_norm(c));
}

// ΔQ = X̃ + Ã*X̃̂⁻¹Ã − Q with Q = X + A*X̂⁻¹A, evaluated as a difference.
HermitianView consistent_dq(const EquationInstance& inst, const HermitianView& x_l,
                            const std::vector<CMatrix>& d_blocks, const CMatrix& d_x) {
  const Perturbation blocks_only{d_blocks, HermitianView(CMatrix(inst.n(), inst.n()))};
  const HermitianView dx = HermitianView::hermitian_part(d_x);
  return HermitianView::hermitian_part(
      d_x + coupling_difference(inst, x_l, blocks_only, dx).matrix());
}

EquationInstance with_solution(std::vector<CMatrix> blocks, const HermitianView& x_l) {
  const HermitianView coupling = coupling_term(blocks, x_l);
  return EquationInstance(std::move(blocks),
                          HermitianView::hermitian_part(x_l.matrix() + coupling.matrix()));
}

ExampleCase table1(int j, std::uint64_t seed) {
  const double scale = std::pow(10.0, -2 * j);
  const std::vector<double> diag{0.725, 2, 3, 2, 1};
  const HermitianView x_l(CMatrix::diagonal(diag));
  std::vector<CMatrix> blocks{(2.0 * std::numbers::sqrt3 / 45.0) * lower_pattern_a0(),
                              (1.0 / 15.0) * banded_pattern()};
  EquationInstance inst = with_solution(std::move(blocks), x_l);

  const CMatrix eye = CMatrix::identity(5);
  const CMatrix e = CMatrix::ones(5, 5);
  std::vector<CMatrix> d_blocks{scale * (2.0 * eye - 0.5 * e),
                                scale * normalized_gaussian(seed, ExampleId::table1, j)};
  const CMatrix d_x = (0.5 * scale) * (eye - e);
  HermitianView d_q = consistent_dq(inst, x_l, d_blocks, d_x);
  HermitianView x_tilde = HermitianView::hermitian_part(x_l.matrix() + d_x);
  return ExampleCase{std::move(inst), Perturbation{std::move(d_blocks), std::move(d_q)}, x_l,
                     std::move(x_tilde)};
}

ExampleCase table2(int j, std::uint64_t seed) {
  const double scale = std::pow(10.0, -2 * j);
  const Complex i1(0.0, 1.0);
  const CMatrix eye = CMatrix::identity(5);
  const CMatrix e = CMatrix::ones(5, 5);
  const CMatrix a0 = lower_pattern_a0();
  const HermitianView x_l(e + 1.5 * eye);
  std::vector<CMatrix> blocks{((1.0 + i1) / 25.0) * a0, ((1.0 + i1) / 25.0) * a0.transpose(),
                              (1.0 / 70.0) * (a0.transpose() * a0)};
  EquationInstance inst = with_solution(std::move(blocks), x_l);

  const CMatrix c0 = normalized_gaussian(seed, ExampleId::table2, j);
  std::vector<CMatrix> d_blocks{scale * (15.0 * i1 * c0), scale * (25.0 * i1 * c0.transpose()),
                                scale * (c0.transpose() + c0)};
  const CMatrix d_x = -scale * (eye + 0.25 * e);
  HermitianView d_q = consistent_dq(inst, x_l, d_blocks, d_x);
  HermitianView x_tilde = HermitianView::hermitian_part(x_l.matrix() + d_x);
  return ExampleCase{std::move(inst), Perturbation{std::move(d_blocks), std::move(d_q)}, x_l,
                     std::move(x_tilde)};
}

ExampleCase table3(int j) {
  const double scale = std::pow(10.0, -j);
  const HermitianView x_l(CMatrix{{0.5, -1}, {-1, 50}});
  std::vector<CMatrix> blocks{CMatrix{{0.1, 1}, {1.5, 10}}, CMatrix{{0.25, 0.1}, {0.1, 1}}};
  EquationInstance inst = with_solution(std::move(blocks), x_l);
  // The 2×2 perturbation is applied to every block.
  const CMatrix d_a = scale * CMatrix{{1, 2}, {3, 4}};
  HermitianView d_q((scale * scale) * CMatrix{{1, 5}, {5, 4}});
  return ExampleCase{std::move(inst), Perturbation{{d_a, d_a}, std::move(d_q)}, x_l,
                     std::nullopt};
}

std::string format_actual(const std::optional<double>& v) {
  return v ? fmt::format("{:.6e}", *v) : std::string("*");
}

std::string format_ratio(const std::optional<double>& v) {
  return v ? fmt::format("{:.7g}", *v) : std::string("*");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

const char* to_string(ExampleId id) {
  switch (id) {
    case ExampleId::table1:
      return "table1";
    case ExampleId::table2:
      return "table2";
    case ExampleId::table3:
      return "table3";
  }
  return "unknown";
}

double GaussianStream::uniform_open() {
  // 53 random bits mapped to (0, 1].
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform_open();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, ExampleId id, int j) {
  const auto tag = (static_cast<std::uint64_t>(id) << 32) ^ static_cast<std::uint32_t>(j);
  return mix64(seed ^ mix64(tag));
}

CMatrix gaussian_matrix(GaussianStream& rng, std::size_t rows, std::size_t cols) {
  CMatrix c(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) c(i, k) = rng.next();
  return c;
}

ExampleCase gen_example(ExampleId id, int j, std::uint64_t seed) {
  switch (id) {
    case ExampleId::table1:
      return table1(j, seed);
    case ExampleId::table2:
      return table2(j, seed);
    case ExampleId::table3:
      return table3(j);
  }
  throw std::invalid_argument("gen_example: unknown example");
}

std::vector<int> default_j_values(ExampleId id) {
  if (id == ExampleId::table3) return {5, 6, 7, 8};
  return {2, 3, 4, 5};
}

std::vector<std::string> table_columns(const ExperimentConfig& config) {
  std::vector<std::string> cols;
  if (config.konppa11) cols.emplace_back("konppa11");
  if (config.yinwf14) cols.emplace_back("yinwf14");
  if (config.hasb17) cols.emplace_back("hasb17");
  if (config.serr) {
    for (const NormKind norm : {NormKind::spectral, NormKind::frobenius}) {
      if (std::find(config.norms.begin(), config.norms.end(), norm) == config.norms.end())
        continue;
      for (const std::string label : {"id", "sqrtQ", "p1"}) {
        if (std::find(config.p_choices.begin(), config.p_choices.end(), label) !=
            config.p_choices.end())
          cols.push_back(serr_column(norm, label));
      }
    }
  }
  return cols;
}

std::optional<double> TableRow::ratio(const std::string& column) const {
  for (const auto& [name, v] : ratios) {
    if (name == column) return v;
  }
  return std::nullopt;
}

TableResult run_table(const ExperimentConfig& config) {
  TableResult result;
  result.example = to_string(config.example);
  result.seed = config.seed;
  result.columns = table_columns(config);

  std::vector<int> js = config.j_values.empty() ? default_j_values(config.example)
                                                : config.j_values;
  std::sort(js.begin(), js.end());

  CompareRequest request;
  request.konppa11 = config.konppa11;
  request.yinwf14 = config.yinwf14;
  request.hasb17 = config.hasb17;
  request.serr = config.serr;
  request.norms = config.norms;
  request.scalings = config.p_choices;
  SolveOptions options;
  options.tol = config.tol;
  options.max_iter = config.max_iter;

  for (const int j : js) {
    TableRow row;
    row.j = j;
    try {
      const ExampleCase ex = gen_example(config.example, j, config.seed);
      const ComparisonRecord rec =
          solve_perturbed_and_compare(ex.instance, ex.perturbation, request, options);
      row.actual_spec = rec.actual_spec;
      row.actual_frob = rec.actual_frob;
      for (const auto& col : result.columns) {
        std::optional<double> ratio;
        for (const auto& b : rec.bounds) {
          if (b.column == col) ratio = b.ratio;
        }
        row.ratios.emplace_back(col, ratio);
      }
    } catch (const SolverError& e) {
      row.error = e.what();
      for (const auto& col : result.columns) row.ratios.emplace_back(col, std::nullopt);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string emit(const TableResult& table, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::csv: {
      out << "j,actual_spec,actual_frob";
      for (const auto& c : table.columns) out << ',' << c;
      out << ",note\n";
      for (const auto& row : table.rows) {
        out << row.j << ',' << format_actual(row.actual_spec) << ','
            << format_actual(row.actual_frob);
        for (const auto& [col, v] : row.ratios) out << ',' << format_ratio(v);
        out << ',' << csv_field(row.error.value_or("")) << '\n';
      }
      break;
    }
    case OutputFormat::json: {
      json doc;
      doc["example"] = table.example;
      doc["seed"] = table.seed;
      doc["columns"] = table.columns;
      doc["rows"] = json::array();
      for (const auto& row : table.rows) {
        json r;
        r["j"] = row.j;
        r["actual_spec"] = optional_number(row.actual_spec);
        r["actual_frob"] = optional_number(row.actual_frob);
        json ratios = json::object();
        for (const auto& [col, v] : row.ratios) ratios[col] = optional_number(v);
        r["ratios"] = std::move(ratios);
        r["note"] = row.error ? json(*row.error) : json(nullptr);
        doc["rows"].push_back(std::move(r));
      }
      out << doc.dump(2) << '\n';
      break;
    }
    case OutputFormat::text: {
      // Quantities down the side, one column per j.
      std::vector<std::pair<std::string, std::vector<std::string>>> lines;
      std::vector<std::string> header;
      for (const auto& row : table.rows) header.push_back(fmt::format("j={}", row.j));
      auto line = [&](std::string label, auto&& cell) {
        std::vector<std::string> cells;
        for (const auto& row : table.rows) cells.push_back(cell(row));
        lines.emplace_back(std::move(label), std::move(cells));
      };
      line("||dX_L||", [](const TableRow& r) { return format_actual(r.actual_spec); });
      line("||dX_L||_F", [](const TableRow& r) { return format_actual(r.actual_frob); });
      for (const auto& col : table.columns) {
        line(col, [&](const TableRow& r) { return format_ratio(r.ratio(col)); });
      }
      std::size_t label_width = 12;
      for (const auto& [label, cells] : lines) label_width = std::max(label_width, label.size());
      out << table.example << " (seed " << table.seed << ")\n";
      out << fmt::format("{:<{}}", "", label_width);
      for (const auto& h : header) out << fmt::format("  {:>14}", h);
      out << '\n';
      for (const auto& [label, cells] : lines) {
        out << fmt::format("{:<{}}", label, label_width);
        for (const auto& c : cells) out << fmt::format("  {:>14}", c);
        out << '\n';
      }
      for (const auto& row : table.rows) {
        if (row.error) out << "j=" << row.j << ": " << *row.error << '\n';
      }
      break;
    }
  }
  return out.str();
}

TableResult parse_table_json(const std::string& text) {
  const json doc = json::parse(text);
  TableResult t;
  t.example = doc.at("example").get<std::string>();
  t.seed = doc.at("seed").get<std::uint64_t>();
  t.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& r : doc.at("rows")) {
    TableRow row;
    row.j = r.at("j").get<int>();
    row.actual_spec = number_or_null(r.at("actual_spec"));
    row.actual_frob = number_or_null(r.at("actual_frob"));
    for (const auto& col : t.columns) row.ratios.emplace_back(col, number_or_null(r.at("ratios").at(col)));
    if (!r.at("note").is_null()) row.error = r.at("note").get<std::string>();
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace nme

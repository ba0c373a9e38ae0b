// Command-line front end: bounds, areas, profile optimization, the named
// verification suite, and sweep tables. All angle I/O is in radians; the
// --degrees flag converts inputs only.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grid_io.hpp"
#include "report.hpp"
#include "sasaki/closed_forms.hpp"
#include "sasaki/errors.hpp"
#include "sasaki/fields.hpp"
#include "sasaki/functional.hpp"
#include "sasaki/optimizer.hpp"
#include "sasaki/quadrature.hpp"
#include "sasaki/sphere_domain.hpp"
#include "verify.hpp"

namespace {

using sasaki::io::format_sig;
using sasaki::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitBoundViolation = 3;
constexpr int kExitGridParse = 4;

/// Quadrature flags shared by the numeric subcommands.
struct QuadFlags {
  std::string scheme = "gauss-legendre";
  int order = 16;
  int panels = 64;
  double simpson_tol = 1e-10;
  bool no_substitution = false;
};

void add_quad_flags(CLI::App* cmd, QuadFlags& q) {
  cmd->add_option("--scheme", q.scheme, "Quadrature rule: gauss-legendre or simpson")
      ->check(CLI::IsMember({"gauss-legendre", "simpson"}))
      ->capture_default_str();
  cmd->add_option("--order", q.order, "Gauss-Legendre order per panel")->capture_default_str();
  cmd->add_option("--panels", q.panels, "Gauss-Legendre panel count")->capture_default_str();
  cmd->add_option("--simpson-tol", q.simpson_tol, "Adaptive Simpson absolute tolerance")
      ->capture_default_str();
  cmd->add_flag("--no-substitution", q.no_substitution,
                "Disable the endpoint-regularizing latitude substitution");
}

sasaki::QuadratureScheme build_scheme(const QuadFlags& f) {
  sasaki::QuadratureScheme q;
  if (f.scheme == "simpson")
    q.rule = sasaki::AdaptiveSimpsonRule{f.simpson_tol, 2'000'000};
  else
    q.rule = sasaki::GaussLegendreRule{f.order, f.panels};
  q.endpoint_substitution = !f.no_substitution;
  sasaki::validate(q);
  return q;
}

void emit(const Json& report, const std::string& output) {
  const std::string text =
      output == "csv" ? sasaki::io::json_to_csv(report) : report.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
}

double to_radians(double v, bool degrees) { return degrees ? v * sasaki::kPi / 180.0 : v; }

/// Parses a comma-separated list of numbers; throws InvalidArgument on
/// malformed or empty input.
std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v))
      throw sasaki::InvalidArgument("malformed list entry '" + item + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.empty()) throw sasaki::InvalidArgument("list must be non-empty");
  return out;
}

Json boundary_json(const sasaki::BoundaryReport& br) {
  Json j;
  j["tangent"] = br.tangent;
  j["antipodal"] = br.antipodal;
  j["perpendicular"] = br.perpendicular;
  j["max_violation"] = br.max_violation;
  return j;
}

int run_bound(double alpha0, const QuadFlags& qf, const std::string& output) {
  const sasaki::AnnulusSpec a = sasaki::make_annulus(alpha0);
  const sasaki::QuadratureScheme q = build_scheme(qf);
  const sasaki::BoundResult b = sasaki::lower_bound(a, q);
  // Independent cross-check for the reported quadrature error.
  const sasaki::QuadratureScheme other =
      std::holds_alternative<sasaki::GaussLegendreRule>(q.rule)
          ? sasaki::simpson_oracle_scheme()
          : sasaki::default_scheme();
  const sasaki::BoundResult b2 = sasaki::lower_bound(a, other);
  Json j;
  j["command"] = "bound";
  j["alpha0"] = alpha0;
  j["K"] = b.K;
  j["bound"] = b.bound;
  j["quad_error"] = std::abs(b.K - b2.K);
  j["closed_form_conjecture_gap"] = b.K - sasaki::conjectured_k_closed_form(alpha0);
  j["quadrature"] = sasaki::describe(q);
  j["notes"] = sasaki::io::kBoundNote;
  emit(j, output);
  return kExitOk;
}

int run_area(CLI::App* cmd, double alpha0, const std::string& field, int k,
             const std::string& grid_path, double theta0, bool require_bc, const QuadFlags& qf,
             const std::string& output) {
  const sasaki::QuadratureScheme q = build_scheme(qf);
  const bool has_alpha0 = cmd->count("--alpha0") > 0;
  Json j;
  j["command"] = "area";
  j["field"] = field;

  if (field == "vk" && !has_alpha0) {
    // Punctured-sphere mode: compare against both reference bounds.
    const sasaki::AngleField f = sasaki::vk_field(k);
    const sasaki::AreaReport r = sasaki::area(f, q);
    const sasaki::ReferenceBounds rb = sasaki::reference_bounds(k);
    const sasaki::EllipseBound eb = sasaki::ellipse_bound(k);
    j["k"] = k;
    j["domain"] = "punctured-sphere";
    j["area"] = r.area;
    j["estimated_quadrature_error"] = r.estimated_quadrature_error;
    j["bcj"] = rb.bcj;
    j["bcgn"] = rb.bcgn;
    j["gap"] = r.area - rb.bcgn;
    j["ellipse_semi_axes"] = {eb.semi_axes.first, eb.semi_axes.second};
    j["ellipse_perimeter"] = eb.perimeter;
    j["notes"] = sasaki::io::kBoundNote;
    emit(j, output);
    if (r.area < rb.bcgn - (r.estimated_quadrature_error + 1e-9)) {
      std::fprintf(stderr, "area: bound violated beyond quadrature error\n");
      return kExitBoundViolation;
    }
    return kExitOk;
  }

  sasaki::AnnulusSpec a{0.0};
  sasaki::AngleField f = sasaki::constant_field(sasaki::make_annulus(0.5));
  if (field == "grid") {
    const sasaki::io::GridSamples g = sasaki::io::load_grid_csv(grid_path);
    a = has_alpha0 ? sasaki::make_annulus(alpha0) : sasaki::io::infer_annulus(g);
    f = sasaki::AngleField::grid(a, g.latitudes, g.thetas);
  } else if (field == "minimizer") {
    if (!has_alpha0) throw sasaki::InvalidArgument("--alpha0 is required for --field minimizer");
    a = sasaki::make_annulus(alpha0);
    f = sasaki::minimizer_field(a);
  } else if (field == "constant") {
    if (!has_alpha0) throw sasaki::InvalidArgument("--alpha0 is required for --field constant");
    a = sasaki::make_annulus(alpha0);
    f = sasaki::constant_field(a, theta0);
  } else {  // vk with --alpha0: the field restricted to the band
    a = sasaki::make_annulus(alpha0);
    f = sasaki::vk_field(k);
    j["k"] = k;
  }

  const sasaki::BoundaryReport br = sasaki::check_boundary_conditions(f, a, 1e-8);
  // The lower bound's hypotheses are tangency with the fixed boundary values;
  // equator perpendicularity is reported (and demanded by --require-bc) but
  // not needed for the bound itself.
  const bool bc_ok = br.tangent && br.antipodal;
  if (require_bc && !(bc_ok && br.perpendicular)) {
    std::fprintf(stderr, "area: boundary conditions not satisfied (max violation %.3g)\n",
                 br.max_violation);
    return kExitBadInput;
  }
  const sasaki::AreaReport r = sasaki::area(f, a, q);
  j["alpha0"] = a.alpha0;
  j["area"] = r.area;
  j["estimated_quadrature_error"] = r.estimated_quadrature_error;
  j["K"] = r.k_constant;
  j["lower_bound"] = r.lower_bound;
  j["gap"] = r.gap;
  j["bound_applies"] = bc_ok;
  j["boundary"] = boundary_json(br);
  j["quadrature"] = sasaki::describe(q);
  j["notes"] = sasaki::io::kBoundNote;
  emit(j, output);
  if (bc_ok && sasaki::bound_violated(r)) {
    std::fprintf(stderr, "area: bound violated beyond quadrature error\n");
    return kExitBoundViolation;
  }
  return kExitOk;
}

int run_optimize(double alpha0, int nodes, long max_iters, double grad_tol,
                 const std::string& out_path, const std::string& output) {
  const sasaki::AnnulusSpec a = sasaki::make_annulus(alpha0);
  sasaki::OptimizeOptions opts;
  opts.max_iters = max_iters;
  opts.grad_tol = grad_tol;
  const sasaki::OptimizerResult res = sasaki::minimize_profile(a, nodes, opts);
  const sasaki::BoundResult b = sasaki::lower_bound(a, sasaki::default_scheme());
  Json j;
  j["command"] = "optimize";
  j["alpha0"] = alpha0;
  j["nodes"] = nodes;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["gradient_norm"] = res.gradient_norm;
  j["final_area"] = res.final_area;
  j["profile_area"] = res.profile_area;
  j["lower_bound"] = b.bound;
  j["gap"] = res.profile_area - b.bound;
  j["max_deviation_from_closed_form"] = res.max_deviation_from_closed_form;
  j["first_integral_residual"] = sasaki::first_integral_residual(res.profile);
  j["notes"] = sasaki::io::kBoundNote;
  if (!out_path.empty())
    sasaki::io::save_grid_csv(out_path, res.profile.nodes, res.profile.thetas);
  emit(j, output);
  return kExitOk;
}

int run_verify(std::uint64_t seed, bool corrupt_k, const std::string& output) {
  sasaki::verify::Options opts;
  opts.seed = seed;
  opts.corrupt_k = corrupt_k;
  const std::vector<sasaki::verify::CheckResult> results = sasaki::verify::run_all(opts);
  int failed = 0;
  if (output == "json") {
    Json j;
    j["command"] = "verify";
    j["seed"] = seed;
    Json checks = Json::array();
    for (const auto& r : results) {
      checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      failed += r.pass ? 0 : 1;
    }
    j["checks"] = checks;
    j["all_pass"] = failed == 0;
    emit(j, output);
  } else {
    for (const auto& r : results) {
      std::printf("%s  %-26s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
      failed += r.pass ? 0 : 1;
    }
    std::printf("verify: %zu/%zu checks passed\n", results.size() - failed, results.size());
    if (failed > 0) {
      for (const auto& r : results)
        if (!r.pass) std::fprintf(stderr, "verify: invariant '%s' violated\n", r.name.c_str());
    }
  }
  return failed == 0 ? kExitOk : kExitVerifyFail;
}

int run_sweep(const std::string& alpha0_list, const std::string& k_list, bool degrees,
              const QuadFlags& qf, const std::string& output) {
  const sasaki::QuadratureScheme q = build_scheme(qf);
  if (alpha0_list.empty() == k_list.empty())
    throw sasaki::InvalidArgument("sweep needs exactly one of --alpha0 or --k");
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  Json jrows = Json::array();
  if (!alpha0_list.empty()) {
    header = {"alpha0", "K", "bound", "minimizer_area", "gap"};
    for (double raw : parse_list(alpha0_list)) {
      const double a0 = to_radians(raw, degrees);
      const sasaki::AnnulusSpec a = sasaki::make_annulus(a0);
      const sasaki::BoundResult b = sasaki::lower_bound(a, q);
      const double ar = sasaki::axisymmetric_area(sasaki::minimizer_field(a), a, q);
      rows.push_back({format_sig(a0), format_sig(b.K), format_sig(b.bound), format_sig(ar),
                      format_sig(ar - b.bound)});
      jrows.push_back({{"alpha0", a0},
                       {"K", b.K},
                       {"bound", b.bound},
                       {"minimizer_area", ar},
                       {"gap", ar - b.bound}});
    }
  } else {
    header = {"k", "bcj", "bcgn", "vk_area"};
    for (double raw : parse_list(k_list)) {
      const int k = static_cast<int>(std::lround(raw));
      if (raw != static_cast<double>(k))
        throw sasaki::InvalidArgument("--k entries must be integers");
      const sasaki::ReferenceBounds rb = sasaki::reference_bounds(k);
      const double ar = sasaki::area(sasaki::vk_field(k), q).area;
      rows.push_back(
          {std::to_string(k), format_sig(rb.bcj), format_sig(rb.bcgn), format_sig(ar)});
      jrows.push_back({{"k", k}, {"bcj", rb.bcj}, {"bcgn", rb.bcgn}, {"vk_area", ar}});
    }
  }
  if (output == "json")
    std::fputs((jrows.dump(2) + "\n").c_str(), stdout);
  else
    std::fputs(sasaki::io::csv_table(header, rows).c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sasaki-metric areas of unit vector fields on spherical annuli"};
  app.require_subcommand(1);

  double alpha0 = 0.0;
  bool degrees = false;
  QuadFlags qf;

  // bound
  auto* cmd_bound = app.add_subcommand("bound", "Sharp lower area bound for a band");
  std::string bound_output = "json";
  cmd_bound->add_option("--alpha0", alpha0, "Band half-width (radians)")->required();
  cmd_bound->add_flag("--degrees", degrees, "Interpret angle inputs as degrees");
  cmd_bound->add_option("--output", bound_output, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_quad_flags(cmd_bound, qf);

  // area
  auto* cmd_area = app.add_subcommand("area", "Sasaki-metric area of a unit field");
  std::string area_output = "json", area_field = "minimizer", grid_path;
  int vk_k = 1;
  double theta0 = sasaki::kPi / 2.0;
  bool require_bc = false;
  cmd_area->add_option("--alpha0", alpha0, "Band half-width (radians)");
  cmd_area->add_option("--field", area_field, "minimizer, constant, vk, or grid")
      ->check(CLI::IsMember({"minimizer", "constant", "vk", "grid"}))
      ->capture_default_str();
  cmd_area->add_option("--k", vk_k, "Index parameter for the vk family")->capture_default_str();
  cmd_area->add_option("--grid", grid_path, "Grid-field CSV path (alpha,theta)");
  cmd_area->add_option("--theta0", theta0, "Angle of the constant field (radians)");
  cmd_area->add_flag("--require-bc", require_bc, "Fail unless boundary conditions hold");
  cmd_area->add_flag("--degrees", degrees, "Interpret angle inputs as degrees");
  cmd_area->add_option("--output", area_output, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_quad_flags(cmd_area, qf);

  // optimize
  auto* cmd_opt = app.add_subcommand("optimize", "Gradient-descent profile optimization");
  std::string opt_output = "json", opt_out_path;
  int opt_nodes = 200;
  long opt_max_iters = 0;
  double opt_grad_tol = 1e-8;
  cmd_opt->add_option("--alpha0", alpha0, "Band half-width (radians)")->required();
  cmd_opt->add_option("--nodes", opt_nodes, "Profile node count")->capture_default_str();
  cmd_opt->add_option("--max-iters", opt_max_iters, "Iteration cap (0: automatic)")
      ->capture_default_str();
  cmd_opt->add_option("--grad-tol", opt_grad_tol, "Gradient-norm stopping tolerance")
      ->capture_default_str();
  cmd_opt->add_option("--out", opt_out_path, "Write the optimized profile as grid CSV");
  cmd_opt->add_flag("--degrees", degrees, "Interpret angle inputs as degrees");
  cmd_opt->add_option("--output", opt_output, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  // verify
  auto* cmd_verify = app.add_subcommand("verify", "Run the named invariant suite");
  std::string verify_output = "table";
  std::uint64_t seed = 42;
  bool corrupt_k = false;
  cmd_verify->add_option("--seed", seed, "Seed for randomized sample points")
      ->capture_default_str();
  cmd_verify->add_option("--output", verify_output, "Report format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  cmd_verify->add_flag("--corrupt-k", corrupt_k)->group("");  // negative-control fixture

  // sweep
  auto* cmd_sweep = app.add_subcommand("sweep", "Tabulate bounds and areas over a list");
  std::string sweep_output = "csv", sweep_alpha0, sweep_k;
  cmd_sweep->add_option("--alpha0", sweep_alpha0, "Comma-separated alpha0 list (radians)");
  cmd_sweep->add_option("--k", sweep_k, "Comma-separated integer index list");
  cmd_sweep->add_flag("--degrees", degrees, "Interpret angle inputs as degrees");
  cmd_sweep->add_option("--output", sweep_output, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_quad_flags(cmd_sweep, qf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (app.got_subcommand(cmd_bound))
      return run_bound(to_radians(alpha0, degrees), qf, bound_output);
    if (app.got_subcommand(cmd_area)) {
      // The theta0 default is already in radians; convert only user input.
      const double theta0_rad =
          cmd_area->count("--theta0") > 0 ? to_radians(theta0, degrees) : theta0;
      return run_area(cmd_area, to_radians(alpha0, degrees), area_field, vk_k, grid_path,
                      theta0_rad, require_bc, qf, area_output);
    }
    if (app.got_subcommand(cmd_opt))
      return run_optimize(to_radians(alpha0, degrees), opt_nodes, opt_max_iters, opt_grad_tol,
                          opt_out_path, opt_output);
    if (app.got_subcommand(cmd_verify)) return run_verify(seed, corrupt_k, verify_output);
    if (app.got_subcommand(cmd_sweep))
      return run_sweep(sweep_alpha0, sweep_k, degrees, qf, sweep_output);
  } catch (const sasaki::GridParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitGridParse;
  } catch (const sasaki::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  }
  return kExitOk;
}

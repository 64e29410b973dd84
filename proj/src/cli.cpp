#include "pslra/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "pslra/apps.hpp"
#include "pslra/baselines.hpp"
#include "pslra/diagnostics.hpp"
#include "pslra/io.hpp"

namespace pslra::cli {

namespace {

using io::Json;

struct Options {
  std::string structure;
  std::string params;
  std::string weights;
  std::string mask;
  std::string polys;
  std::string out;
  std::string variant = "stacked";
  std::string weighting = "frobenius";
  Index rank = 0;
  PenaltyConfig config;
  bool diagnostics = false;
  std::uint64_t seed = 0;
  int repeat = 0;
  std::uint64_t seed_base = 0;
  Index degree = 1;
  Index order = 4;
  Index window = 5;
  double noise = 0.2;
  Index missing_stride = 0;
  int max_iter = 1000;
};

void add_penalty_flags(CLI::App* cmd, Options& o)
{
  cmd->add_option("--lambda-init", o.config.lambda_init, "Initial penalty weight")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-max", o.config.lambda_max, "Stop once lambda exceeds this")->check(CLI::PositiveNumber);
  cmd->add_option("--growth-modest", o.config.growth_modest, "Lambda growth after an expensive inner solve");
  cmd->add_option("--growth-ambitious", o.config.growth_ambitious, "Lambda growth after a cheap inner solve");
  cmd->add_option("--eps-structure", o.config.eps_structure, "Relative structure deviation counted as converged")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-inner", o.config.max_inner_sweeps, "Sweep cap per inner solve")->check(CLI::PositiveNumber);
}

void add_out_flag(CLI::App* cmd, Options& o)
{
  cmd->add_option("--out", o.out, "Report path (JSON); stdout when absent");
}

Json trace_json(const std::vector<LambdaStep>& trace)
{
  Json out = Json::array();
  for (const auto& s : trace) out.push_back({{"lambda", s.lambda}, {"sweeps", s.sweeps}, {"objective", s.objective}});
  return out;
}

Json solve_json(const SolveReport& r, Index rank)
{
  return {{"p_hat", io::to_json(r.p_hat)},
          {"weighted_error", r.weighted_error},
          {"structure_deviation", r.structure_deviation},
          {"converged", r.converged},
          {"rank", rank},
          {"total_sweeps", r.total_sweeps},
          {"final_lambda", r.final_lambda},
          {"lambda_trace", trace_json(r.lambda_trace)},
          {"nu_estimate", io::to_json(r.multiplier_estimate)},
          {"rank_deficient_P", r.rank_deficient_P},
          {"rank_deficient_L", r.rank_deficient_L}};
}

Json diagnostics_json(const StructureSpec& spec, const Factors& f, double lambda)
{
  const auto d = diagnostics::diagnose(spec, f, lambda);
  Json out = {{"c_norm", d.c.norm()},
              {"c_tilde_norm", d.c_tilde.norm()},
              {"rank_P", d.rank_P},
              {"rank_L", d.rank_L},
              {"regularity",
               {{"constraints", d.regularity.constraints},
                {"degrees_of_freedom", d.regularity.degrees},
                {"necessary_condition", d.regularity.necessary_condition},
                {"multiplier_dimension", d.regularity.multiplier_dimension}}},
              {"stationarity",
               {{"classification", diagnostics::to_string(d.stationarity.classification)},
                {"c_norm", d.stationarity.c_norm},
                {"gradient_norm", d.stationarity.gradient_norm}}}};
  out["jacobian_rank"] = d.jacobian_rank ? Json(*d.jacobian_rank) : Json(nullptr);
  out["jacobian_tilde_rank"] = d.jacobian_tilde_rank ? Json(*d.jacobian_tilde_rank) : Json(nullptr);
  if (d.regularity.constant_rank_regime) out["regularity"]["constant_rank_regime"] = *d.regularity.constant_rank_regime;
  return out;
}

void emit(const Json& report, const Options& o, std::ostream& out)
{
  const std::string text = io::canonical_dump(report) + "\n";
  if (o.out.empty())
    out << text;
  else
    io::write_text(o.out, text);
}

/// "<dir>/<stem>.<suffix>" next to the report, or nothing without --out.
std::optional<std::filesystem::path> sibling(const Options& o, const std::string& suffix)
{
  if (o.out.empty()) return std::nullopt;
  const std::filesystem::path p(o.out);
  return p.parent_path() / (p.stem().string() + "." + suffix);
}

/// Parameters with '?' marks merged with an optional --missing-mask.
io::MaybeVector load_data(const Options& o)
{
  io::MaybeVector data = io::read_params(o.params);
  if (!o.mask.empty()) {
    const auto mask = io::read_mask(o.mask);
    if (mask.size() != data.missing.size())
      throw FormatError("missing-mask: has " + std::to_string(mask.size()) + " entries, params has " +
                        std::to_string(data.missing.size()));
    for (std::size_t i = 0; i < mask.size(); ++i) data.missing[i] = data.missing[i] || mask[i];
  }
  return data;
}

bool any_of(const std::vector<bool>& v) { return std::find(v.begin(), v.end(), true) != v.end(); }

int finish(bool converged) { return converged ? kSuccess : kNotConverged; }

int cmd_solve(const Options& o, std::ostream& out)
{
  const StructureSpec spec = io::read_structure(o.structure);
  io::MaybeVector data = load_data(o);
  if (data.values.size() != spec.num_params())
    throw FormatError("params: has " + std::to_string(data.values.size()) + " values, structure has " +
                      std::to_string(spec.num_params()) + " parameters");
  WeightSpec weights = o.weights.empty() ? WeightSpec::identity(spec.num_params())
                                         : io::read_weights(o.weights, spec.num_params());
  Vector p = data.values;
  if (any_of(data.missing)) {
    weights = weights.with_missing(data.missing);
    p = apps::neighbour_fill(data.values, data.missing);
  }

  const auto [factors, report] = solve(spec, weights, p, o.rank, o.config);
  Json doc = solve_json(report, o.rank);
  doc["command"] = "solve";
  if (o.diagnostics) doc["diagnostics"] = diagnostics_json(spec, factors, report.final_lambda);
  emit(doc, o, out);
  return finish(report.converged);
}

int cmd_complete(const Options& o, std::ostream& out)
{
  const StructureSpec spec = io::read_structure(o.structure);
  std::optional<Vector> initial;
  if (!o.params.empty()) {
    io::MaybeVector data = io::read_params(o.params);
    if (data.values.size() != spec.num_params())
      throw FormatError("params: has " + std::to_string(data.values.size()) + " values, structure has " +
                        std::to_string(spec.num_params()) + " free parameters");
    for (Index i = 0; i < data.values.size(); ++i)
      if (data.missing[static_cast<std::size_t>(i)]) data.values(i) = 0.0;
    initial = data.values;
  }
  const auto [factors, report] = completion_solve(spec, o.rank, o.config, initial);
  Json doc = solve_json(report, o.rank);
  doc["command"] = "complete";
  if (o.diagnostics) doc["diagnostics"] = diagnostics_json(spec, factors, report.final_lambda);
  emit(doc, o, out);
  return finish(report.converged);
}

int cmd_cadzow(const Options& o, std::ostream& out)
{
  const StructureSpec spec = io::read_structure(o.structure);
  const io::MaybeVector data = load_data(o);
  if (any_of(data.missing)) throw FormatError("params: cadzow does not accept missing values");
  if (data.values.size() != spec.num_params())
    throw FormatError("params: has " + std::to_string(data.values.size()) + " values, structure has " +
                      std::to_string(spec.num_params()) + " parameters");
  const auto r = baselines::cadzow(spec, data.values, o.rank, o.max_iter);
  const Json doc = {{"command", "cadzow"},
                    {"p_hat", io::to_json(r.p_hat)},
                    {"frobenius_error", r.frobenius_error},
                    {"achieved_rank", r.achieved_rank},
                    {"rank", o.rank},
                    {"iterations", r.iterations},
                    {"converged", r.converged}};
  emit(doc, o, out);
  return finish(r.converged);
}

int cmd_kung(const Options& o, std::ostream& out)
{
  const io::MaybeVector data = load_data(o);
  if (any_of(data.missing)) throw FormatError("params: kung does not accept missing samples");
  const auto k = baselines::kung(data.values, o.order, o.window);
  const Json doc = {{"command", "kung"},
                    {"theta", io::to_json(k.theta)},
                    {"y_hat", io::to_json(k.y_hat)},
                    {"error", (data.values - k.y_hat).squaredNorm()},
                    {"order", o.order},
                    {"window", o.window}};
  emit(doc, o, out);
  if (const auto path = sibling(o, "trajectory.csv"))
    io::write_text(*path, io::trajectory_csv({"y", "y_hat"}, {data.values, k.y_hat}));
  return kSuccess;
}

apps::WeightMode weight_mode(const Options& o)
{
  return o.weighting == "l2" ? apps::WeightMode::l2 : apps::WeightMode::frobenius;
}

struct SysidRun {
  std::uint64_t seed = 0;
  apps::Identification id;
  double error_y0 = 0.0;
  double frobenius_error_y0 = 0.0;
  double fill_error_y0 = 0.0;
};

SysidRun run_simulated(const Options& o, std::uint64_t seed)
{
  const std::optional<Index> stride = o.missing_stride > 0 ? std::optional<Index>(o.missing_stride) : std::nullopt;
  const auto ex = apps::simulate_sysid(seed, o.noise, stride);
  SysidRun run;
  run.seed = seed;
  run.id = apps::identify(ex.y, ex.missing, o.order, o.window, weight_mode(o), o.config);
  run.error_y0 = (ex.y0 - run.id.y_hat).squaredNorm();
  const StructureSpec H = hankel(o.window, ex.T);
  run.frobenius_error_y0 = (H.evaluate(ex.y0) - H.evaluate(run.id.y_hat)).squaredNorm();
  run.fill_error_y0 = (ex.y0 - run.id.y_fill).squaredNorm();
  return run;
}

double median(std::vector<double> v)
{
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Json identification_json(const apps::Identification& id)
{
  Json doc = solve_json(id.report, id.theta.size() - 1);
  doc["theta"] = io::to_json(id.theta);
  doc["y_hat"] = io::to_json(id.y_hat);
  doc["certificate"] = id.certificate;
  return doc;
}

int cmd_sysid_repeat(const Options& o, std::ostream& out)
{
  std::vector<SysidRun> runs(static_cast<std::size_t>(o.repeat));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        runs[i] = run_simulated(o, o.seed_base + i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t count = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, runs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  Json items = Json::array();
  std::vector<double> err, frob, fill, weighted;
  int converged = 0;
  for (const auto& r : runs) {
    items.push_back({{"seed", r.seed},
                     {"converged", r.id.report.converged},
                     {"structure_deviation", r.id.report.structure_deviation},
                     {"weighted_error", r.id.report.weighted_error},
                     {"error_y0", r.error_y0},
                     {"frobenius_error_y0", r.frobenius_error_y0},
                     {"fill_error_y0", r.fill_error_y0},
                     {"total_sweeps", r.id.report.total_sweeps}});
    err.push_back(r.error_y0);
    frob.push_back(r.frobenius_error_y0);
    fill.push_back(r.fill_error_y0);
    weighted.push_back(r.id.report.weighted_error);
    converged += r.id.report.converged ? 1 : 0;
  }
  const Json doc = {{"command", "sysid"},
                    {"repeat", o.repeat},
                    {"seed_base", o.seed_base},
                    {"converged_count", converged},
                    {"median_error_y0", median(err)},
                    {"median_frobenius_error_y0", median(frob)},
                    {"median_fill_error_y0", median(fill)},
                    {"median_weighted_error", median(weighted)},
                    {"runs", std::move(items)}};
  emit(doc, o, out);
  return finish(converged == o.repeat);
}

int cmd_sysid(const Options& o, std::ostream& out)
{
  if (o.repeat > 0) {
    if (!o.params.empty()) throw FormatError("repeat: --repeat runs simulated data and cannot be combined with --params");
    return cmd_sysid_repeat(o, out);
  }

  Json doc;
  std::vector<std::string> names;
  std::vector<Vector> columns;
  bool converged = false;
  Vector y_hat;
  Factors factors;
  double final_lambda = 0.0;
  if (!o.params.empty()) {
    const io::MaybeVector data = load_data(o);
    const auto id = apps::identify(data.values, data.missing, o.order, o.window, weight_mode(o), o.config);
    doc = identification_json(id);
    names = {"y", "y_hat"};
    columns = {data.values, id.y_hat};
    converged = id.report.converged;
    y_hat = id.y_hat;
    factors = id.factors;
    final_lambda = id.report.final_lambda;
  } else {
    const SysidRun run = run_simulated(o, o.seed);
    doc = identification_json(run.id);
    doc["seed"] = o.seed;
    doc["error_y0"] = run.error_y0;
    doc["frobenius_error_y0"] = run.frobenius_error_y0;
    doc["fill_error_y0"] = run.fill_error_y0;
    const std::optional<Index> stride = o.missing_stride > 0 ? std::optional<Index>(o.missing_stride) : std::nullopt;
    const auto ex = apps::simulate_sysid(o.seed, o.noise, stride);
    Vector observed = ex.y;
    for (Index t = 0; t < ex.T; ++t)
      if (ex.missing[static_cast<std::size_t>(t)]) observed(t) = std::numeric_limits<double>::quiet_NaN();
    names = {"y", "y0", "y_hat"};
    columns = {observed, ex.y0, run.id.y_hat};
    converged = run.id.report.converged;
    y_hat = run.id.y_hat;
    factors = run.id.factors;
    final_lambda = run.id.report.final_lambda;
  }
  if (o.diagnostics) doc["diagnostics"] = diagnostics_json(hankel(o.window, y_hat.size()), factors, final_lambda);
  doc["command"] = "sysid";
  doc["order"] = o.order;
  doc["window"] = o.window;
  emit(doc, o, out);
  if (const auto path = sibling(o, "trajectory.csv")) io::write_text(*path, io::trajectory_csv(names, columns));
  return finish(converged);
}

int cmd_gcd(const Options& o, std::ostream& out)
{
  apps::PolySet set{io::read_polys(o.polys), o.degree};
  const auto variant = o.variant == "extended" ? SylvesterVariant::extended : SylvesterVariant::stacked;
  const auto g = apps::gcd_approximate(set, variant, o.config);

  Json roots = Json::array();
  for (const auto& z : g.common_roots) roots.push_back({z.real(), z.imag()});
  Json polys = Json::array();
  for (const auto& a : g.polys_hat) polys.push_back(io::to_json(a));
  Json doc = solve_json(g.report, g.rank);
  doc["command"] = "gcd";
  doc["variant"] = o.variant;
  doc["degree"] = o.degree;
  doc["error"] = g.error;
  doc["polys_hat"] = std::move(polys);
  doc["factored"] = g.factored;
  doc["common_roots"] = std::move(roots);
  doc["divisor_found"] = g.divisor_found;
  doc["common_root"] = g.common_roots.empty() ? Json(nullptr) : Json(g.common_roots.front().real());
  if (o.diagnostics) {
    const std::vector<Index> degrees(set.polys.size(), set.polys.front().size() - 1);
    doc["diagnostics"] = diagnostics_json(generalized_sylvester(degrees, variant), g.factors, g.report.final_lambda);
  }
  emit(doc, o, out);
  if (const auto path = sibling(o, "polys.csv")) {
    std::string text;
    char buf[40];
    for (const auto& a : g.polys_hat) {
      for (Index k = 0; k < a.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.17g", k == 0 ? "" : ",", a(k));
        text += buf;
      }
      text += "\n";
    }
    io::write_text(*path, text);
  }
  return finish(g.report.converged);
}

int cmd_validate(const Options& o, std::ostream& out)
{
  const StructureLayout layout = io::read_structure_layout(o.structure);
  const auto violations = validate(layout);
  const Json doc = {{"command", "validate-structure"}, {"valid", violations.empty()}, {"violations", violations}};
  emit(doc, o, out);
  return violations.empty() ? kSuccess : kInputError;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Penalized structured low-rank approximation", "pslra"};
  app.require_subcommand(1);
  Options o;

  auto* solve_cmd = app.add_subcommand("solve", "Weighted structured low-rank approximation");
  solve_cmd->add_option("--structure", o.structure, "Structure JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--params", o.params, "Parameter CSV ('?' marks missing)")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--weights", o.weights, "Diagonal or dense weight CSV")->check(CLI::ExistingFile);
  solve_cmd->add_option("--missing-mask", o.mask, "0/1 CSV, 1 = missing")->check(CLI::ExistingFile);
  solve_cmd->add_option("--rank", o.rank, "Target rank")->required()->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--diagnostics", o.diagnostics, "Append constraint diagnostics");
  add_penalty_flags(solve_cmd, o);
  add_out_flag(solve_cmd, o);

  auto* complete_cmd = app.add_subcommand("complete", "Structured completion with fixed known entries");
  complete_cmd->add_option("--structure", o.structure, "Structure JSON")->required()->check(CLI::ExistingFile);
  complete_cmd->add_option("--params", o.params, "Initial values of the free parameters")->check(CLI::ExistingFile);
  complete_cmd->add_option("--rank", o.rank, "Target rank")->required()->check(CLI::PositiveNumber);
  complete_cmd->add_flag("--diagnostics", o.diagnostics, "Append constraint diagnostics");
  add_penalty_flags(complete_cmd, o);
  add_out_flag(complete_cmd, o);

  auto* cadzow_cmd = app.add_subcommand("cadzow", "Cadzow alternating projections");
  cadzow_cmd->add_option("--structure", o.structure, "Structure JSON")->required()->check(CLI::ExistingFile);
  cadzow_cmd->add_option("--params", o.params, "Parameter CSV")->required()->check(CLI::ExistingFile);
  cadzow_cmd->add_option("--rank", o.rank, "Target rank")->required()->check(CLI::PositiveNumber);
  cadzow_cmd->add_option("--max-iter", o.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  add_out_flag(cadzow_cmd, o);

  auto* kung_cmd = app.add_subcommand("kung", "Kung's realization from a scalar trajectory");
  kung_cmd->add_option("--params", o.params, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  kung_cmd->add_option("--order", o.order, "System order")->check(CLI::PositiveNumber);
  kung_cmd->add_option("--window", o.window, "Hankel rows")->check(CLI::PositiveNumber);
  add_out_flag(kung_cmd, o);

  auto* sysid_cmd = app.add_subcommand("sysid", "Autonomous system identification");
  sysid_cmd->add_option("--params", o.params, "Trajectory CSV ('?' marks missing); simulated when absent")
      ->check(CLI::ExistingFile);
  sysid_cmd->add_option("--missing-mask", o.mask, "0/1 CSV, 1 = missing")->check(CLI::ExistingFile);
  sysid_cmd->add_option("--order", o.order, "System order")->check(CLI::PositiveNumber);
  sysid_cmd->add_option("--window", o.window, "Hankel rows")->check(CLI::PositiveNumber);
  sysid_cmd->add_option("--weighting", o.weighting, "l2 or frobenius")->check(CLI::IsMember({"l2", "frobenius"}));
  sysid_cmd->add_option("--seed", o.seed, "Noise seed for simulated data");
  sysid_cmd->add_option("--noise", o.noise, "Relative noise level")->check(CLI::NonNegativeNumber);
  sysid_cmd->add_option("--missing-stride", o.missing_stride, "Remove every k-th simulated sample")
      ->check(CLI::Range(Index{2}, Index{1} << 40));
  sysid_cmd->add_option("--repeat", o.repeat, "Seeded repetitions, aggregated by medians")->check(CLI::PositiveNumber);
  sysid_cmd->add_option("--seed-base", o.seed_base, "First seed of the repetitions");
  sysid_cmd->add_flag("--diagnostics", o.diagnostics, "Append constraint diagnostics (single runs)");
  add_penalty_flags(sysid_cmd, o);
  add_out_flag(sysid_cmd, o);

  auto* gcd_cmd = app.add_subcommand("gcd", "Approximate common divisor");
  gcd_cmd->add_option("--polys", o.polys, "Polynomial CSV, ascending coefficients per line")
      ->required()
      ->check(CLI::ExistingFile);
  gcd_cmd->add_option("--degree", o.degree, "Divisor degree")->check(CLI::PositiveNumber);
  gcd_cmd->add_option("--variant", o.variant, "stacked or extended")->check(CLI::IsMember({"stacked", "extended"}));
  gcd_cmd->add_flag("--diagnostics", o.diagnostics, "Append constraint diagnostics");
  add_penalty_flags(gcd_cmd, o);
  add_out_flag(gcd_cmd, o);

  auto* validate_cmd = app.add_subcommand("validate-structure", "Check a structure document");
  validate_cmd->add_option("--structure", o.structure, "Structure JSON")->required()->check(CLI::ExistingFile);
  add_out_flag(validate_cmd, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*solve_cmd) return cmd_solve(o, out);
    if (*complete_cmd) return cmd_complete(o, out);
    if (*cadzow_cmd) return cmd_cadzow(o, out);
    if (*kung_cmd) return cmd_kung(o, out);
    if (*sysid_cmd) return cmd_sysid(o, out);
    if (*gcd_cmd) return cmd_gcd(o, out);
    if (*validate_cmd) return cmd_validate(o, out);
  } catch (const StructureError& e) {
    err << "error: invalid structure\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

int run(int argc, char** argv)
{
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

} // namespace pslra::cli

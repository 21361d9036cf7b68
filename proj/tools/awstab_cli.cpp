// awstab: experiment runner for operator-stability and ergodic-average
// numerics. One JSON config per run; CSV series plus a JSON summary on
// stdout; deterministic given --seed.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "awstab/diskflow.hpp"
#include "awstab/ergodic.hpp"
#include "awstab/operators.hpp"
#include "awstab/orbitlab.hpp"
#include "awstab/polyseq.hpp"
#include "awstab/rng.hpp"
#include "awstab/selftest.hpp"
#include "awstab/serialize.hpp"
#include "awstab/splitting.hpp"

namespace fs = std::filesystem;
using namespace awstab;
using json = nlohmann::json;
using operators::HVec;
using operators::Operator;

namespace {

struct RunContext {
  json config;
  fs::path out_dir;
  std::uint64_t seed = 1;
  bool quiet = false;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path.string());
  out << text;
}

constexpr int kSchemaVersion = 1;

void emit(const RunContext& ctx, const json& summary) {
  if (!ctx.quiet) std::cout << summary.dump(2) << "\n";
}

json run_split(const RunContext& ctx) {
  Operator op = serialize::operator_from_json(ctx.config.at("operator"));
  const std::string mode = ctx.config.value("mode", std::string("three_way"));
  double tol = ctx.config.value("tol", 1e-8);
  auto horizon = ctx.config.value("evidence_horizon", (std::int64_t)2000);

  json summary;
  if (!op.dim()) {
    if (mode != "three_way")
      throw ValidationError("countable-dimensional operators only support mode=three_way");
    summary = serialize::descriptive_split_to_json(splitting::three_way_structured(op));
  } else {
    CMat t = operators::to_dense(op);
    splitting::SplitResult res;
    if (mode == "foguel") res = splitting::foguel_split(t, tol);
    else if (mode == "jdlg") res = splitting::jdlg_split(t, tol, horizon, ctx.seed);
    else if (mode == "three_way") res = splitting::three_way_split(t, tol);
    else throw ValidationError("mode must be foguel, jdlg or three_way");
    summary = serialize::split_to_json(res);
  }
  summary["mode"] = mode;
  summary["schema_version"] = kSchemaVersion;
  write_text(ctx.out_dir / "split.json", summary.dump(2) + "\n");
  return summary;
}

json run_orbit(const RunContext& ctx) {
  Operator op = serialize::operator_from_json(ctx.config.at("operator"));
  HVec h = serialize::hvec_from_json(ctx.config.at("h"));
  std::vector<HVec> functionals;
  for (const auto& g : ctx.config.at("functionals"))
    functionals.push_back(serialize::hvec_from_json(g));
  auto poly = serialize::poly_from_json(ctx.config.at("poly"));
  auto horizon = ctx.config.at("horizon").get<std::int64_t>();
  double tau = ctx.config.value("tau", -1.0);

  auto rep = orbitlab::aws_verdict(op, h, functionals, poly, horizon, tau);
  for (size_t i = 0; i < rep.per_functional.size(); ++i) {
    std::ostringstream os;
    serialize::write_series_csv(os, rep.per_functional[i].y, rep.per_functional[i].cesaro_means,
                                rep.per_functional[i].selection);
    write_text(ctx.out_dir / ("orbit_f" + std::to_string(i) + ".csv"), os.str());
  }
  json summary = serialize::aws_report_to_json(rep);
  summary["schema_version"] = kSchemaVersion;
  write_text(ctx.out_dir / "orbit.json", summary.dump(2) + "\n");
  return summary;
}

json run_vdc(const RunContext& ctx) {
  Operator op = serialize::operator_from_json(ctx.config.at("operator"));
  HVec h = serialize::hvec_from_json(ctx.config.at("h"));
  polyseq::IntPoly poly{0, 1};
  if (ctx.config.contains("poly")) poly = serialize::poly_from_json(ctx.config.at("poly"));
  auto horizon = ctx.config.at("horizon").get<std::int64_t>();
  int lag_max = ctx.config.value("lag_max", 50);

  auto st = orbitlab::vdc_stats(orbitlab::polynomial_orbit(op, h, poly), horizon, lag_max);

  std::ostringstream os;
  serialize::write_vdc_csv(os, st);
  write_text(ctx.out_dir / "vdc.csv", os.str());
  json summary = serialize::vdc_to_json(st);
  summary["schema_version"] = kSchemaVersion;
  write_text(ctx.out_dir / "vdc.json", summary.dump(2) + "\n");
  return summary;
}

std::vector<double> series_from_config(const json& desc, std::uint64_t seed) {
  const std::string kind = desc.at("kind").get<std::string>();
  if (kind == "explicit") return desc.at("values").get<std::vector<double>>();
  if (kind == "squares_indicator") {
    auto n = desc.at("n").get<std::int64_t>();
    if (n < 1) throw ValidationError("series length must be positive");
    std::vector<double> y((size_t)n, 0.0);
    for (std::int64_t k = 1; k * k <= n; ++k) y[(size_t)(k * k - 1)] = 1.0;
    return y;
  }
  if (kind == "uniform") {
    auto n = desc.at("n").get<std::int64_t>();
    if (n < 1) throw ValidationError("series length must be positive");
    double scale = desc.value("scale", 1.0);
    Rng rng(seed);
    std::vector<double> y((size_t)n);
    for (auto& v : y) v = scale * rng.uniform();
    return y;
  }
  throw ValidationError("series kind must be explicit, squares_indicator or uniform");
}

json run_kvn(const RunContext& ctx) {
  auto y = series_from_config(ctx.config.at("series"), ctx.seed);
  auto sel = orbitlab::kvn_extract(y);
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, v);
  double bound = ctx.config.value("bound", std::max(peak, 1.0));
  auto conv = orbitlab::kvn_converse_check(y, sel, bound);

  std::ostringstream os;
  serialize::write_series_csv(os, y, orbitlab::cesaro(y), sel);
  write_text(ctx.out_dir / "kvn.csv", os.str());

  json summary{{"schema_version", kSchemaVersion},
               {"selection", serialize::selection_to_json(sel)},
               {"converse", json{{"cesaro_at_horizon", conv.cesaro_at_horizon},
                                 {"upper_bound", conv.upper_bound},
                                 {"bound", bound}}}};
  write_text(ctx.out_dir / "kvn.json", summary.dump(2) + "\n");
  return summary;
}

diskflow::FlowPoint start_from_config(const json& j) {
  const std::string type = j.value("type", std::string("curve"));
  double s = j.value("s", 0.0);
  if (type == "fixed") return diskflow::FixedPoint{};
  if (type == "circle") return diskflow::CirclePoint{s};
  if (type == "curve") return diskflow::CurvePoint{s};
  throw ValidationError("start type must be fixed, circle or curve");
}

json run_flow(const RunContext& ctx) {
  const std::string mode = ctx.config.value("mode", std::string("counterexample"));
  const std::string obs_name = ctx.config.value("observable", std::string("f1"));
  const diskflow::Observable* obs = diskflow::find_observable(obs_name);
  if (!obs) throw ValidationError("observable must be f1 or f2");
  auto n_max = ctx.config.at("n_max").get<std::int64_t>();

  if (mode == "counterexample") {
    auto rows = diskflow::counterexample_series(*obs, n_max);
    std::ostringstream os;
    serialize::write_counterexample_csv(os, rows);
    write_text(ctx.out_dir / "flow_counterexample.csv", os.str());
    json summary{{"schema_version", kSchemaVersion},
                 {"mode", mode},
                 {"n_max", n_max},
                 {"final_deviation", rows.back().deviation},
                 {"final_f_value", rows.back().f_value},
                 {"rows", rows.size()}};
    write_text(ctx.out_dir / "flow.json", summary.dump(2) + "\n");
    return summary;
  }
  if (mode == "aws") {
    auto start = start_from_config(ctx.config.value("start", json{{"type", "curve"}, {"s", 0.0}}));
    auto series = diskflow::aws_series(*obs, start, n_max);
    std::ostringstream os;
    serialize::write_series_csv(os, series.y, series.cesaro, series.selection);
    write_text(ctx.out_dir / "flow_aws.csv", os.str());
    json summary{{"schema_version", kSchemaVersion},
                 {"mode", mode},
                 {"n_max", n_max},
                 {"cesaro_at_horizon", series.cesaro.back()},
                 {"selection", serialize::selection_to_json(series.selection)}};
    write_text(ctx.out_dir / "flow.json", summary.dump(2) + "\n");
    return summary;
  }
  throw ValidationError("flow mode must be counterexample or aws");
}

json run_ergodic(const RunContext& ctx) {
  auto sys = serialize::system_from_json(ctx.config.at("system"));
  std::vector<CMat> as;
  for (const auto& a : ctx.config.at("operands")) as.push_back(serialize::matrix_from_json(a));
  auto rq = serialize::request_from_json(ctx.config.at("request"));
  auto budget = ctx.config.value("budget", ergodic::kDefaultComputeBudget);
  const std::string mode = ctx.config.value("mode", std::string("average"));

  json summary{{"schema_version", kSchemaVersion}, {"mode", mode}};
  if (mode == "equivalence") {
    auto horizon = ctx.config.at("horizon").get<std::int64_t>();
    summary["equivalence"] =
        serialize::equivalence_to_json(ergodic::equivalence_check(sys, as, rq, horizon, budget));
  } else if (mode == "oracle") {
    if (!sys.exact_diagonal())
      throw ValidationError("oracle mode needs a diagonal root-of-unity system");
    summary["oracle"] = serialize::matrix_to_json(ergodic::weyl_oracle(sys.angles(), as, rq));
  } else if (mode == "average") {
    auto grid = ctx.config.at("grid").get<std::vector<std::int64_t>>();
    auto series = ergodic::average_series(sys, as, rq, grid, budget);
    json values = json::array();
    for (const auto& v : series.values) values.push_back(serialize::matrix_to_json(v));
    summary["grid"] = series.grid;
    summary["values"] = values;
    summary["phi_deltas"] = series.phi_deltas;
    summary["norm_deltas"] = series.norm_deltas;
    if (sys.exact_diagonal() && rq.r <= 2) {
      CMat oracle = ergodic::weyl_oracle(sys.angles(), as, rq);
      summary["oracle"] = serialize::matrix_to_json(oracle);
      json errs = json::array();
      for (const auto& v : series.values) errs.push_back(numkit::op_norm(v - oracle, 1e-9));
      summary["oracle_errors"] = errs;
    }
    if (ctx.config.contains("a0")) {
      CMat a0 = serialize::matrix_from_json(ctx.config.at("a0"));
      json pair = json::array();
      for (cd v : ergodic::gns_weak_series(sys, a0, series))
        pair.push_back(serialize::complex_to_json(v));
      summary["gns_pairing"] = pair;
    }
  } else {
    throw ValidationError("ergodic mode must be average, equivalence or oracle");
  }
  write_text(ctx.out_dir / "ergodic.json", summary.dump(2) + "\n");
  return summary;
}

json run_selftest(const RunContext& ctx) {
  auto results = selftest::run_all();
  json criteria = json::array();
  for (const auto& r : results) {
    if (!ctx.quiet) std::cout << selftest::format_line(r) << "\n";
    criteria.push_back(json{{"id", r.id},
                            {"name", r.name},
                            {"pass", r.pass},
                            {"detail", r.detail},
                            {"seconds", r.seconds}});
  }
  json summary{{"schema_version", kSchemaVersion},
               {"criteria", criteria},
               {"all_passed", selftest::all_passed(results)}};
  write_text(ctx.out_dir / "selftest.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"awstab: desk-scale operator stability and ergodic average experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--out", out_dir, "output directory for CSV/JSON artifacts");
  app.add_option("--seed", seed, "RNG seed for anything randomized");
  app.add_flag("--quiet", quiet, "suppress the stdout summary");

  auto* sub_split = app.add_subcommand("split", "foguel / jdlg / three-way splitting");
  auto* sub_orbit = app.add_subcommand("orbit", "almost-weak-stability verdict for an orbit");
  auto* sub_vdc = app.add_subcommand("vdc", "van der Corput correlation statistics");
  auto* sub_kvn = app.add_subcommand("kvn", "Koopman-von Neumann extraction");
  auto* sub_flow = app.add_subcommand("flow", "disk-flow counterexample and aws series");
  auto* sub_ergodic = app.add_subcommand("ergodic", "polynomial multiple/entangled averages");
  auto* sub_selftest = app.add_subcommand("selftest", "run the full acceptance suite");

  CLI11_PARSE(app, argc, argv);

  RunContext ctx;
  ctx.seed = seed;
  ctx.quiet = quiet;
  ctx.out_dir = out_dir;

  try {
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory: " + ctx.out_dir.string());

    json summary;
    if (sub_selftest->parsed()) {
      summary = run_selftest(ctx);
      if (!ctx.quiet) std::cout << summary.dump(2) << "\n";
      return summary["all_passed"].get<bool>() ? 0 : 2;
    }
    if (config_path.empty()) throw ValidationError("--config is required for this subcommand");
    ctx.config = load_config(config_path);

    if (sub_split->parsed()) summary = run_split(ctx);
    else if (sub_orbit->parsed()) summary = run_orbit(ctx);
    else if (sub_vdc->parsed()) summary = run_vdc(ctx);
    else if (sub_kvn->parsed()) summary = run_kvn(ctx);
    else if (sub_flow->parsed()) summary = run_flow(ctx);
    else if (sub_ergodic->parsed()) summary = run_ergodic(ctx);
    emit(ctx, summary);
    return 0;
  } catch (const ValidationError& e) {
    std::cout << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cout << json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cout << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 2;
  }
}

// Command-line front end: build horseshoe artifacts, verify Markovian
// intersections, and run separated/spanning, mdim, Katok and variational-gap
// experiments. Reports are CSV and JSON; runs are reproducible from the
// config plus seed.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdimlab/complexity.hpp"
#include "mdimlab/horseshoe.hpp"
#include "mdimlab/horseshoe_io.hpp"
#include "mdimlab/katok.hpp"
#include "mdimlab/markov_check.hpp"
#include "mdimlab/report_io.hpp"
#include "mdimlab/systems.hpp"

namespace {

using namespace mdimlab;

constexpr int kExitInvalidParams = 2;
constexpr int kExitVerifyFailed = 3;
constexpr int kExitScheduleError = 4;

std::vector<int> parse_int_range(const std::string& text) {
  try {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      const int v = std::stoi(text);
      if (v < 1) throw ScheduleError("range values must be positive");
      return {v};
    }
    const int a = std::stoi(text.substr(0, colon));
    const int b = std::stoi(text.substr(colon + 1));
    if (a < 1 || b < a)
      throw ScheduleError("bad range '" + text + "' (want a:b with 1 <= a <= b)");
    std::vector<int> out;
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  } catch (const ScheduleError&) {
    throw;
  } catch (const std::exception&) {
    throw ScheduleError("cannot parse range '" + text + "'");
  }
}

// Accepts "0.015625", "2^-6" and "1/64".
double parse_eps(const std::string& text) {
  const auto caret = text.find('^');
  if (caret != std::string::npos) {
    const double base = std::stod(text.substr(0, caret));
    const double exp = std::stod(text.substr(caret + 1));
    return std::pow(base, exp);
  }
  return to_double(parse_rational(text));
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_eps(item));
  }
  if (out.empty()) throw ScheduleError("empty list '" + text + "'");
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SystemFlags {
  std::string kind = "identity";
  int dim = 2;
  std::string angles = "0.3183098861837907";  // rotation
  // horseshoe family
  int n = 2;
  std::string delta = "1/4";
  int k = 1;
  int p = 0;  // 0: plain pseudo-horseshoe; >= 1: chained
  std::string chart_bound = "3/2";
  std::string hs_file;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--system", kind,
                    "system kind: identity|rotation|doubling|cat|horseshoe|chained")
        ->capture_default_str();
    cmd->add_option("--dim", dim, "ambient dimension (identity)")->capture_default_str();
    cmd->add_option("--alpha", angles, "rotation angles, comma separated");
    cmd->add_option("--n", n, "horseshoe dimension")->capture_default_str();
    cmd->add_option("--delta", delta, "horseshoe ball radius (rational or decimal)")
        ->capture_default_str();
    cmd->add_option("--k", k, "horseshoe separation index")->capture_default_str();
    cmd->add_option("--p", p, "chain period (chained horseshoe)")->capture_default_str();
    cmd->add_option("--C", chart_bound, "chart bi-Lipschitz bound")->capture_default_str();
    cmd->add_option("--hs-file", hs_file, "load a built horseshoe file instead of rebuilding");
  }

  HorseshoeParams params() const {
    HorseshoeParams hp;
    hp.n = n;
    hp.k = k;
    hp.delta = parse_rational(delta);
    return hp;
  }

  System make(std::uint64_t seed) const {
    if (kind == "identity") return make_identity_cube(dim);
    if (kind == "rotation") {
      std::vector<double> a = parse_double_list(angles);
      return make_rotation(std::move(a));
    }
    if (kind == "doubling") return make_doubling();
    if (kind == "cat") return make_cat_map();
    if (kind == "horseshoe") {
      if (!hs_file.empty()) {
        const Json j = Json::parse(read_file(hs_file));
        return make_horseshoe_system(
            std::make_shared<PseudoHorseshoe>(horseshoe_from_json(j)));
      }
      return make_horseshoe_system(std::make_shared<PseudoHorseshoe>(
          build_pseudo_horseshoe(params())));
    }
    if (kind == "chained") {
      if (!hs_file.empty()) {
        const Json j = Json::parse(read_file(hs_file));
        return make_chained_system(std::make_shared<ChainedHorseshoe>(chained_from_json(j)));
      }
      const int period = p > 0 ? p : 1;
      return make_chained_system(std::make_shared<ChainedHorseshoe>(
          build_chained(params(), period, parse_rational(chart_bound), seed)));
    }
    throw InvalidParams("unknown system kind '" + kind + "'");
  }
};

struct CloudFlags {
  std::string kind = "lattice";
  long res = 64;
  std::size_t count = 10000;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--cloud", kind, "cloud kind: lattice|uniform")->capture_default_str();
    cmd->add_option("--res", res, "lattice resolution per axis")->capture_default_str();
    cmd->add_option("--count", count, "uniform sample count")->capture_default_str();
  }

  CloudSpec spec(std::uint64_t seed) const {
    CloudSpec s;
    s.kind = (kind == "uniform") ? CloudSpec::Kind::uniform : CloudSpec::Kind::lattice;
    s.resolution = res;
    s.count = count;
    s.seed = seed;
    return s;
  }
};

int cmd_build(const SystemFlags& sf, std::uint64_t seed, const std::string& out_path) {
  const HorseshoeParams hp = sf.params();
  Json j;
  if (sf.p >= 1) {
    const ChainedHorseshoe ch = build_chained(hp, sf.p, parse_rational(sf.chart_bound), seed);
    j = horseshoe_to_json(ch);
    std::cout << "chained horseshoe: p=" << ch.p << " N_k=" << ch.stages[0].count()
              << " eps_k=" << rational_to_string(hp.eps())
              << " pieces=" << ch.p * ch.stages[0].pieces.size() << "\n";
  } else {
    const PseudoHorseshoe h = build_pseudo_horseshoe(hp);
    j = horseshoe_to_json(h);
    std::cout << "pseudo-horseshoe: N_k=" << h.count()
              << " eps_k=" << rational_to_string(hp.eps()) << " pieces=" << h.pieces.size()
              << "\n";
  }
  if (!out_path.empty()) {
    write_file(out_path, horseshoe_dump(j));
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int verify_one_stage(const PseudoHorseshoe& h, int grid_res, bool robustness, Json& report,
                     bool& all_passed) {
  const long N = h.count();
  auto pieces = Json::array();
  for (long i = 0; i < N; ++i) {
    for (long j = 0; j < N; ++j) {
      const AffinePieceData data = piece_data(h, i, j);
      const MarkovVerdict exact = verify_markovian_exact(data);
      Json pj;
      pj["source"] = i;
      pj["target"] = j;
      pj["exact"] = to_json(exact);
      if (grid_res >= 2) {
        const MarkovPiece& piece = h.piece(i, j);
        std::vector<double> scale(h.params.n), offset(h.params.n);
        for (int a = 0; a < h.params.n; ++a) {
          scale[a] = to_double(piece.scale[a]);
          offset[a] = to_double(piece.offset[a]);
        }
        const EvalMap phi = [&scale, &offset](const Point& x) -> std::optional<Point> {
          Point y(x.size());
          for (std::size_t a = 0; a < x.size(); ++a) y[a] = scale[a] * x[a] + offset[a];
          return y;
        };
        const MarkovVerdict sampled =
            verify_markovian(phi, to_double_box(h.grid.rects[i]), to_double_box(h.grid.rects[j]),
                             to_double_box(piece.slab), grid_res);
        pj["sampled"] = to_json(sampled);
        if (!sampled.passed) all_passed = false;
      }
      if (robustness && exact.passed)
        pj["robustness_radius"] = robustness_radius_exact(data, to_double(h.params.delta));
      if (!exact.passed) all_passed = false;
      pieces.push_back(pj);
    }
  }
  report["pieces"] = pieces;
  return 0;
}

int cmd_verify(const std::string& in_path, int grid_res, bool robustness,
               const std::string& report_path) {
  const Json j = Json::parse(read_file(in_path));
  Json report;
  report["schema"] = 1;
  report["kind"] = "markov_verification";
  bool all_passed = true;
  if (json_is_chained(j)) {
    const ChainedHorseshoe ch = chained_from_json(j);
    auto stages = Json::array();
    for (int s = 0; s < ch.p; ++s) {
      Json stage;
      stage["stage"] = s;
      verify_one_stage(ch.stages[s], grid_res, robustness, stage, all_passed);
      stages.push_back(stage);
    }
    report["stages"] = stages;
  } else {
    const PseudoHorseshoe h = horseshoe_from_json(j);
    report["canonical"] = h.canonical;
    verify_one_stage(h, grid_res, robustness, report, all_passed);
  }
  report["all_passed"] = all_passed;
  if (!report_path.empty()) write_file(report_path, report.dump(1) + "\n");
  std::cout << (all_passed ? "verification passed" : "verification FAILED") << "\n";
  return all_passed ? 0 : kExitVerifyFailed;
}

int cmd_sep(const SystemFlags& sf, const CloudFlags& cf, const std::string& eps_text,
            const std::string& m_text, const std::string& mode_text, std::uint64_t seed,
            unsigned threads, const std::string& csv_path, const std::string& json_path) {
  const double eps = parse_eps(eps_text);
  const std::vector<int> ms = parse_int_range(m_text);
  if (ms.size() < 3) throw ScheduleError("sep: need at least 3 horizon values");
  const CountMode mode = (mode_text == "symbolic") ? CountMode::symbolic : CountMode::greedy;
  const System sys = sf.make(seed);

  ComplexityReport report;
  std::vector<double> logs;
  if (mode == CountMode::symbolic) {
    for (int m : ms) {
      CountRow row;
      row.m = m;
      row.eps = eps;
      row.s_lower = symbolic_separated_count(sys, m, eps);
      row.mode = mode;
      logs.push_back(log_bigint(row.s_lower));
      report.rows.push_back(std::move(row));
    }
  } else {
    const SampleCloud cloud = build_cloud(sys, cf.spec(seed), ms.back(), threads);
    for (int m : ms) {
      CountRow row;
      row.m = m;
      row.eps = eps;
      row.s_lower = BigInt(static_cast<long long>(max_separated(cloud, m, eps).size()));
      row.n_upper = min_spanning(cloud, m, eps);
      row.mode = mode;
      logs.push_back(log_bigint(row.s_lower == 0 ? BigInt(1) : row.s_lower));
      report.rows.push_back(std::move(row));
    }
  }
  report.sep_estimates.emplace_back(eps, sep_rate(ms, logs));
  std::cout << "sep slope at eps=" << eps << ": " << report.sep_estimates.back().second.slope
            << "\n";
  if (!csv_path.empty()) write_file(csv_path, to_csv(report));
  if (!json_path.empty()) write_file(json_path, to_json(report).dump(1) + "\n");
  return 0;
}

int cmd_mdim(const SystemFlags& sf, const CloudFlags& cf, const std::string& eps_text,
             const std::string& k_text, const std::string& m_text, const std::string& mode_text,
             std::uint64_t seed, unsigned threads, const std::string& csv_path,
             const std::string& json_path) {
  MdimReport report;
  if (!k_text.empty()) {
    if (sf.kind != "horseshoe" && sf.kind != "chained")
      throw InvalidParams("--k-schedule applies to the horseshoe family");
    if (mode_text != "symbolic")
      throw InvalidParams("--k-schedule currently runs in symbolic mode");
    report = horseshoe_family_mdim_table(sf.n, parse_rational(sf.delta), parse_int_range(k_text));
  } else {
    const std::vector<double> eps_schedule = parse_double_list(eps_text);
    const std::vector<int> ms = parse_int_range(m_text);
    const CountMode mode = (mode_text == "symbolic") ? CountMode::symbolic : CountMode::greedy;
    const System sys = sf.make(seed);
    report = mdim_estimate(sys, eps_schedule, ms, cf.spec(seed), mode, threads);
  }
  std::cout << "mdim finite-scale estimate: lower=" << report.lower << " upper=" << report.upper
            << "\n";
  if (!csv_path.empty()) write_file(csv_path, to_csv(report));
  if (!json_path.empty()) write_file(json_path, to_json(report).dump(1) + "\n");
  return 0;
}

MeasureSpec make_measure(const std::string& measure, const System& sys, std::uint64_t seed,
                         int depth) {
  MeasureSpec spec;
  spec.seed = seed;
  spec.depth = depth;
  if (measure == "lebesgue") {
    spec.kind = MeasureSpec::Kind::lebesgue_cube;
  } else if (measure == "bernoulli") {
    spec.kind = MeasureSpec::Kind::bernoulli_itineraries;
    if (const auto* h = std::get_if<HorseshoeMap>(&sys.kind)) {
      spec.horseshoe = h->h;
    } else {
      throw InvalidParams("bernoulli measure requires --system horseshoe");
    }
  } else {
    throw InvalidParams("unknown measure '" + measure + "'");
  }
  return spec;
}

// The Bernoulli itinerary measure lives in chart coordinates. For chained
// systems, measure experiments run on the stage-0 horseshoe (the chart-side
// reduction); separation and covering certificates in chart coordinates are
// the exact ones, the ambient ones degrade by at most the chart bound.
System measure_system(const SystemFlags& sf, std::uint64_t seed) {
  if (sf.kind != "chained") return sf.make(seed);
  const System chained = sf.make(seed);
  const auto& cm = std::get<ChainedMap>(chained.kind);
  std::cout << "chained system: running the chart-side (stage-0) reduction\n";
  return make_horseshoe_system(std::make_shared<PseudoHorseshoe>(cm.c->stages[0]));
}

int cmd_katok(const SystemFlags& sf, const std::string& measure, const std::string& eps_text,
              double mass_delta, const std::string& m_text, std::size_t count,
              std::uint64_t seed, unsigned threads, const std::string& csv_path,
              const std::string& json_path) {
  const System sys = measure_system(sf, seed);
  const std::vector<int> ms = parse_int_range(m_text);
  const MeasureSpec spec = make_measure(measure, sys, seed, ms.back());
  const double eps = parse_eps(eps_text);
  const KatokReport report = katok_entropy(sys, spec, eps, mass_delta, ms, count, threads);
  std::cout << "katok entropy slope at eps=" << eps << " delta=" << mass_delta << ": "
            << report.slope << "\n";
  if (!csv_path.empty()) write_file(csv_path, to_csv(report));
  if (!json_path.empty()) write_file(json_path, to_json(report).dump(1) + "\n");
  return 0;
}

int cmd_gap(const SystemFlags& sf, const CloudFlags& cf, const std::string& measure,
            const std::string& k_text, const std::string& eps_text,
            const std::string& delta_grid_text, const std::string& m_text, std::size_t count,
            const std::string& mode_text, std::uint64_t seed, unsigned threads,
            const std::string& csv_path, const std::string& json_path) {
  const std::vector<int> ms = parse_int_range(m_text);
  const std::vector<double> delta_grid = parse_double_list(delta_grid_text);
  const CountMode mode = (mode_text == "symbolic") ? CountMode::symbolic : CountMode::greedy;

  GapReport report;
  if (!k_text.empty()) {
    // Horseshoe family: one row per k at scale eps_k = delta / k.
    if (sf.kind != "horseshoe" && sf.kind != "chained")
      throw InvalidParams("--k-schedule needs --system horseshoe or chained");
    for (int k : parse_int_range(k_text)) {
      SystemFlags stage = sf;
      stage.k = k;
      const System sys = measure_system(stage, seed);
      const MeasureSpec spec = make_measure(measure, sys, seed, ms.back());
      const double eps = to_double(stage.params().eps());
      const GapReport one =
          variational_gap(sys, spec, {eps}, delta_grid, ms, count, mode, cf.spec(seed), threads);
      report.rows.push_back(one.rows.front());
    }
  } else {
    const System sys = measure_system(sf, seed);
    const MeasureSpec spec = make_measure(measure, sys, seed, ms.back());
    const std::vector<double> eps_schedule = parse_double_list(eps_text);
    report = variational_gap(sys, spec, eps_schedule, delta_grid, ms, count, mode,
                             cf.spec(seed), threads);
  }
  for (const auto& row : report.rows)
    std::cout << "eps=" << row.eps << " sep=" << row.sep_col << " h=" << row.h_col
              << " gap=" << row.gap << "\n";
  if (!csv_path.empty()) write_file(csv_path, to_csv(report));
  if (!json_path.empty()) write_file(json_path, to_json(report).dump(1) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric mean dimension measurement toolkit"};
  app.set_config("--config", "", "flat key=value config file with [subcommand] sections");
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  unsigned threads = 1;
  app.add_option("--seed", seed, "random seed")->envname("MDIMLAB_SEED")->capture_default_str();
  app.add_option("--threads", threads, "worker thread cap")->capture_default_str();

  // build
  auto* build = app.add_subcommand("build", "construct a horseshoe and write it to JSON");
  SystemFlags build_sf;
  build->add_option("--n", build_sf.n, "dimension")->capture_default_str();
  build->add_option("--delta", build_sf.delta, "ball radius")->capture_default_str();
  build->add_option("--k", build_sf.k, "separation index")->capture_default_str();
  build->add_option("--p", build_sf.p, "chain period (0 = plain)")->capture_default_str();
  build->add_option("--C", build_sf.chart_bound, "chart bound")->capture_default_str();
  std::string build_out;
  build->add_option("--out", build_out, "output JSON path");

  // verify
  auto* verify = app.add_subcommand("verify", "verify Markovian intersections of a built file");
  std::string verify_in, verify_report;
  int verify_res = 16;
  bool verify_rob = false;
  verify->add_option("--in", verify_in, "horseshoe JSON file")->required();
  verify->add_option("--grid-res", verify_res, "sampling resolution (0 = exact only)")
      ->capture_default_str();
  verify->add_flag("--robustness", verify_rob, "report robustness radii per piece");
  verify->add_option("--report", verify_report, "verdict report JSON path");

  // sep
  auto* sep = app.add_subcommand("sep", "separated/spanning counts and Sep rate at one scale");
  SystemFlags sep_sf;
  CloudFlags sep_cf;
  sep_sf.add_flags(sep);
  sep_cf.add_flags(sep);
  std::string sep_eps = "2^-6", sep_m = "4:10", sep_mode = "greedy", sep_csv, sep_json;
  sep->add_option("--eps", sep_eps, "scale (decimal, rational or 2^-q)")->capture_default_str();
  sep->add_option("--m", sep_m, "horizon range a:b")->capture_default_str();
  sep->add_option("--mode", sep_mode, "greedy|symbolic")->capture_default_str();
  sep->add_option("--out-csv", sep_csv, "CSV output path");
  sep->add_option("--out-json", sep_json, "JSON output path");

  // mdim
  auto* mdim = app.add_subcommand("mdim", "finite-scale metric mean dimension table");
  SystemFlags mdim_sf;
  CloudFlags mdim_cf;
  mdim_sf.add_flags(mdim);
  mdim_cf.add_flags(mdim);
  std::string mdim_eps = "2^-4,2^-5,2^-6", mdim_k, mdim_m = "2:6", mdim_mode = "greedy";
  std::string mdim_csv, mdim_json;
  mdim->add_option("--eps-schedule", mdim_eps, "decreasing eps list")->capture_default_str();
  mdim->add_option("--k-schedule", mdim_k, "horseshoe family range a:b (symbolic)");
  mdim->add_option("--m", mdim_m, "horizon range a:b")->capture_default_str();
  mdim->add_option("--mode", mdim_mode, "greedy|symbolic")->capture_default_str();
  mdim->add_option("--out-csv", mdim_csv, "CSV output path");
  mdim->add_option("--out-json", mdim_json, "JSON output path");

  // katok
  auto* katok = app.add_subcommand("katok", "Katok eps-entropy estimate for a measure");
  SystemFlags katok_sf;
  katok_sf.add_flags(katok);
  std::string katok_measure = "lebesgue", katok_eps = "2^-6", katok_m = "1:5";
  double katok_delta = 0.1;
  std::size_t katok_count = 20000;
  std::string katok_csv, katok_json;
  katok->add_option("--measure", katok_measure, "lebesgue|bernoulli")->capture_default_str();
  katok->add_option("--eps", katok_eps, "scale")->capture_default_str();
  katok->add_option("--mass-delta", katok_delta, "mass deficit in (0,1)")->capture_default_str();
  katok->add_option("--m", katok_m, "horizon range a:b")->capture_default_str();
  katok->add_option("--samples", katok_count, "measure sample count")->capture_default_str();
  katok->add_option("--out-csv", katok_csv, "CSV output path");
  katok->add_option("--out-json", katok_json, "JSON output path");

  // gap
  auto* gap = app.add_subcommand("gap", "variational comparison: Katok column vs Sep column");
  SystemFlags gap_sf;
  CloudFlags gap_cf;
  gap_sf.add_flags(gap);
  gap_cf.add_flags(gap);
  std::string gap_measure = "bernoulli", gap_k, gap_eps = "2^-4,2^-5,2^-6";
  std::string gap_grid = "0.5,0.2,0.1,0.05", gap_m = "1:3", gap_mode = "symbolic";
  std::size_t gap_count = 100000;
  std::string gap_csv, gap_json;
  gap->add_option("--measure", gap_measure, "lebesgue|bernoulli")->capture_default_str();
  gap->add_option("--k-schedule", gap_k, "horseshoe family range a:b");
  gap->add_option("--eps-schedule", gap_eps, "eps list (non-family mode)")->capture_default_str();
  gap->add_option("--delta-grid", gap_grid, "mass-delta grid")->capture_default_str();
  gap->add_option("--m", gap_m, "horizon range a:b")->capture_default_str();
  gap->add_option("--samples", gap_count, "measure sample count")->capture_default_str();
  gap->add_option("--mode", gap_mode, "greedy|symbolic Sep column")->capture_default_str();
  gap->add_option("--out-csv", gap_csv, "CSV output path");
  gap->add_option("--out-json", gap_json, "JSON output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(build_sf, seed, build_out);
    if (verify->parsed()) return cmd_verify(verify_in, verify_res, verify_rob, verify_report);
    if (sep->parsed())
      return cmd_sep(sep_sf, sep_cf, sep_eps, sep_m, sep_mode, seed, threads, sep_csv, sep_json);
    if (mdim->parsed())
      return cmd_mdim(mdim_sf, mdim_cf, mdim_eps, mdim_k, mdim_m, mdim_mode, seed, threads,
                      mdim_csv, mdim_json);
    if (katok->parsed())
      return cmd_katok(katok_sf, katok_measure, katok_eps, katok_delta, katok_m, katok_count,
                       seed, threads, katok_csv, katok_json);
    if (gap->parsed())
      return cmd_gap(gap_sf, gap_cf, gap_measure, gap_k, gap_eps, gap_grid, gap_m, gap_count,
                     gap_mode, seed, threads, gap_csv, gap_json);
  } catch (const ScheduleError& e) {
    std::cerr << "schedule error: " << e.what() << "\n";
    return kExitScheduleError;
  } catch (const InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const InfeasiblePacking& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const DimensionError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitInvalidParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

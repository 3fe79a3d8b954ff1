#include "lucon/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lucon/abstain.hpp"
#include "lucon/dataset.hpp"
#include "lucon/error.hpp"
#include "lucon/gaussmix.hpp"
#include "lucon/parallel.hpp"
#include "lucon/pipeline.hpp"
#include "lucon/uncertainty.hpp"
#include "text_io.hpp"

namespace lucon::cli {

namespace {

double parse_number(std::string_view text, const std::string& what) {
  try {
    const double v = detail::parse_double(text, what);
    if (!std::isfinite(v)) throw FormatError("");
    return v;
  } catch (const FormatError&) {
    throw ConfigError(what + ": not a finite number: '" + std::string(text) + "'");
  }
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    out.flush();
  } else {
    detail::write_file(path, content);
  }
}

SearchParams resolve_params(const RunConfig& c) {
  SearchParams p = c.params;
  p.metric = parse_metric(c.metric);
  p.epsilon = parse_epsilon(c.epsilon_text);
  return p;
}

Dataset load_inputs(const RunConfig& c, const SearchParams& p) {
  if (c.points.empty() || c.labels.empty()) throw ConfigError("--points and --labels are required");
  if (p.gamma > 0.0 && c.softlabels.empty())
    throw ConfigError("--gamma > 0 requires --softlabels");
  std::optional<std::filesystem::path> soft;
  if (!c.softlabels.empty()) soft = c.softlabels;
  return load_dataset(c.points, c.labels, soft);
}

RunOptions run_options(const RunConfig& c, std::ostream& err) {
  RunOptions o;
  o.threads = c.threads;
  o.mem_cap_bytes = c.mem_cap_mb << 20;
  o.split_fraction = c.split;
  if (!c.quiet)
    o.on_step = [&err](std::uint64_t seed, int t, const KBounds& kb, const Placement& p) {
      err << "lucon: seed " << seed << " step " << t << " k=[" << kb.lower << "," << kb.upper
          << "] center=" << p.center_index << " k=" << p.k << " radius=" << p.radius
          << " objective=" << p.objective << " captured=" << p.init_count << " lu=" << p.lu()
          << '\n';
    };
  return o;
}

std::vector<double> default_alphas() {
  std::vector<double> a;
  for (int i = 1; i <= 15; ++i) a.push_back(i / 100.0);
  return a;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

struct ScoreTable {
  std::vector<std::string> ids;
  std::vector<double> scores;
};

ScoreTable load_scores(const RunConfig& c) {
  if (!c.lu.empty()) {
    auto t = load_lu_csv(c.lu);
    return {std::move(t.ids), std::move(t.scores)};
  }
  if (c.labels.empty() || c.softlabels.empty())
    throw ConfigError("need --lu, or both --labels and --softlabels");
  auto labels = load_labels(c.labels);
  const auto soft = load_soft_labels(c.softlabels);
  const auto aligned = align_soft_labels(labels, soft);
  labels.labels.num_classes = static_cast<std::uint32_t>(aligned.num_classes());
  return {std::move(labels.ids), example_scores(labels.labels, aligned)};
}

}  // namespace

double parse_epsilon(std::string_view text) {
  text = detail::trim(text);
  const auto slash = text.find('/');
  double value;
  if (slash == std::string_view::npos) {
    value = parse_number(text, "epsilon");
  } else {
    const double num = parse_number(text.substr(0, slash), "epsilon numerator");
    const double den = parse_number(text.substr(slash + 1), "epsilon denominator");
    if (den == 0.0) throw ConfigError("epsilon denominator is zero");
    value = num / den;
  }
  if (!(value >= 0.0)) throw ConfigError("epsilon must be non-negative");
  return value;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (auto f : detail::split_fields(text)) {
    if (detail::trim(f).empty()) continue;
    out.push_back(parse_number(f, "list value"));
  }
  return out;
}

Json config_to_json(const RunConfig& c) {
  Json j = {{"subcommand", c.subcommand}};
  const auto& s = c.subcommand;
  if (s == "estimate" || s == "sweep") {
    j["points"] = c.points;
    j["labels"] = c.labels;
    j["softlabels"] = c.softlabels.empty() ? Json(nullptr) : Json(c.softlabels);
    j["metric"] = c.metric;
    j["epsilon"] = c.epsilon_text;
    if (s == "estimate")
      j["alpha"] = c.params.alpha;
    else
      j["alphas"] = c.alphas.empty() ? default_alphas() : c.alphas;
    j["gamma"] = c.params.gamma;
    j["T"] = c.params.balls;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["split"] = c.split;
  } else if (s == "lu-stats") {
    j["labels"] = c.labels;
    j["softlabels"] = c.softlabels;
    j["bins"] = c.bin_edges.empty() ? default_bin_edges() : c.bin_edges;
  } else if (s == "abstain") {
    if (!c.lu.empty()) {
      j["lu"] = c.lu;
    } else {
      j["labels"] = c.labels;
      j["softlabels"] = c.softlabels;
    }
    j["predictions"] = c.predictions;
    j["tau"] = c.tau;
    j["order"] = c.order;
    j["grid"] = c.grid.empty() ? default_grid() : c.grid;
  } else if (s == "gauss-validate") {
    j["theta"] = c.theta;
    j["sigma"] = c.sigma;
    j["alpha"] = c.params.alpha;
    j["epsilon"] = c.epsilon_text;
    j["T"] = c.params.balls;
    j["mc_samples"] = c.mc_samples;
    j["search_samples"] = c.search_samples;
    j["seed"] = c.seed;
  }
  return j;
}

int cmd_estimate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SearchParams p = resolve_params(c);
  if (c.trials < 1) throw ConfigError("--trials must be at least 1");
  const Dataset d = load_inputs(c, p);
  const auto report = repeated_trials(d, p, c.trials, c.seed, run_options(c, err));
  emit(c.out, dump(summary_to_json(report, config_to_json(c))), out);
  return kOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const SearchParams p = resolve_params(c);
  if (c.trials < 1) throw ConfigError("--trials must be at least 1");
  const auto alphas = c.alphas.empty() ? default_alphas() : c.alphas;
  const Dataset d = load_inputs(c, p);
  const auto sweep = alpha_sweep(d, p, alphas, c.trials, c.seed, run_options(c, err));
  for (const auto& e : sweep)
    if (!e.report) err << "lucon: alpha " << e.alpha << " skipped: " << e.error << '\n';
  emit(c.out, format_sweep_csv(sweep, p.gamma), out);
  return kOk;
}

int cmd_lu_stats(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.labels.empty() || c.softlabels.empty())
    throw ConfigError("--labels and --softlabels are required");
  auto labels = load_labels(c.labels);
  const auto soft = align_soft_labels(labels, load_soft_labels(c.softlabels));
  const auto edges = c.bin_edges.empty() ? default_bin_edges() : c.bin_edges;
  const auto stats = lu_stats(example_scores(labels.labels, soft), edges);

  const auto m = static_cast<double>(stats.scores.size());
  Json thresholds = Json::array();
  for (double t : {0.1, 0.7, 1.2}) {
    const auto below = count_below(stats.scores, t);
    const auto above = count_above(stats.scores, t);
    thresholds.push_back({{"threshold", t},
                          {"count_below", below},
                          {"fraction_below", static_cast<double>(below) / m},
                          {"count_above", above},
                          {"fraction_above", static_cast<double>(above) / m}});
  }
  const Json j = {{"format_version", kReportFormat},
                  {"config", config_to_json(c)},
                  {"count", stats.scores.size()},
                  {"mean", stats.mean},
                  {"histogram", histogram_to_json(stats.histogram)},
                  {"thresholds", std::move(thresholds)}};
  if (!c.per_example.empty()) write_lu_csv(c.per_example, labels.ids, stats.scores);
  emit(c.out, dump(j), out);
  return kOk;
}

int cmd_abstain(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.predictions.empty()) throw ConfigError("--predictions is required");
  CoverageOrder order;
  if (c.order == "lowest")
    order = CoverageOrder::LowestFirst;
  else if (c.order == "highest")
    order = CoverageOrder::HighestFirst;
  else
    throw ConfigError("--order must be 'lowest' or 'highest'");
  const auto table = load_scores(c);
  const auto records = load_predictions(c.predictions, table.ids);
  const auto scored = join_scores(records, table.ids, table.scores);
  const auto report = abstain_at_threshold(scored, c.tau);
  const auto grid = c.grid.empty() ? default_grid() : c.grid;
  const auto curve = coverage_curve(scored, order, grid);

  Json points = Json::array();
  for (const auto& p : curve)
    points.push_back({{"fraction", p.fraction},
                      {"included", p.included},
                      {"lu_cut", std::isfinite(p.lu_cut) ? Json(p.lu_cut) : Json(nullptr)},
                      {"clean_accuracy", p.clean_accuracy},
                      {"robust_accuracy", p.robust_accuracy}});
  const Json j = {{"format_version", kReportFormat},
                  {"config", config_to_json(c)},
                  {"abstain", abstain_to_json(report)},
                  {"curve", std::move(points)}};
  if (!c.curve.empty()) detail::write_file(c.curve, format_curve_csv(curve));
  emit(c.out, dump(j), out);
  return kOk;
}

int cmd_gauss_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const GaussMixModel model{c.theta, c.sigma};
  model.validate();
  SearchParams p = c.params;
  p.metric = Metric::L2;
  p.gamma = 0.0;
  p.epsilon = parse_epsilon(c.epsilon_text);

  constexpr double kMonteCarloTolerance = 0.01;
  const double h = analytic_concentration(model, p.alpha, p.epsilon);
  const double b = offset_for_alpha(model, p.alpha, HalfspaceSide::Minus);
  const HalfspaceSpec half{HalfspaceSide::Minus, b};

  const Dataset mc = sample(model, c.mc_samples, c.seed);
  const double mc_value = empirical_halfspace_expansion(model, half, mc.points, p.epsilon);
  const bool mc_pass = std::abs(mc_value - h) <= kMonteCarloTolerance;

  const Dataset search_set = sample(model, c.search_samples, c.seed + 1);
  RunOptions opts = run_options(c, err);
  const TrialReport trial = run_trial(search_set, p, c.seed, opts);
  const std::size_t m_test = c.search_samples - static_cast<std::size_t>(std::floor(
                                                    0.5 * static_cast<double>(c.search_samples)));
  const double lower = h - 3.0 * std::sqrt(h * (1.0 - h) / static_cast<double>(m_test));
  const bool greedy_pass = trial.test_adv_risk >= lower;

  const Json j = {
      {"format_version", kReportFormat},
      {"config", config_to_json(c)},
      {"analytic", {{"concentration", h}, {"offset", b}, {"side", "minus"}}},
      {"monte_carlo",
       {{"samples", c.mc_samples},
        {"expansion", mc_value},
        {"abs_diff", std::abs(mc_value - h)},
        {"tolerance", kMonteCarloTolerance},
        {"pass", mc_pass}}},
      {"greedy",
       {{"samples", c.search_samples},
        {"test_samples", m_test},
        {"T", p.balls},
        {"train_risk", trial.train_risk},
        {"test_risk", trial.test_risk},
        {"train_adv_risk", trial.train_adv_risk},
        {"test_adv_risk", trial.test_adv_risk},
        {"lower_bound", lower},
        {"pass", greedy_pass}}},
      {"pass", mc_pass && greedy_pass}};
  emit(c.out, dump(j), out);
  return mc_pass && greedy_pass ? kOk : kValidationFailed;
}

int cmd_synth(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.out_prefix.empty()) throw ConfigError("--out-prefix is required");
  SoftLabelMode mode;
  if (c.soft_mode == "onehot")
    mode = SoftLabelMode::OneHot;
  else if (c.soft_mode == "posterior")
    mode = SoftLabelMode::Posterior;
  else
    throw ConfigError("--soft must be 'onehot' or 'posterior'");
  const Dataset d = sample(GaussMixModel{c.theta, c.sigma}, c.count, c.seed, mode);
  write_points(c.out_prefix + ".cpts", d.points, PointFormat::Binary);
  write_labels(c.out_prefix + ".labels.csv", d.ids, d.labels);
  write_soft_labels(c.out_prefix + ".soft.csv", d.ids, *d.soft);
  out << c.out_prefix << ".cpts\n" << c.out_prefix << ".labels.csv\n" << c.out_prefix << ".soft.csv\n";
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string alphas, bins, grid, theta;

  CLI::App app{"Label-uncertainty constrained concentration of measure estimator", "lucon"};
  app.require_subcommand(1);

  auto add_search = [&](CLI::App* sub, bool single_alpha) {
    sub->add_option("--points", c.points, "Point file (.cpts binary or .csv)")->required();
    sub->add_option("--labels", c.labels, "Labels CSV (id,label)")->required();
    sub->add_option("--softlabels", c.softlabels, "Soft-labels CSV (id,p0,...)");
    sub->add_option("--metric", c.metric, "l2 or linf")->check(CLI::IsMember({"l2", "linf"}));
    sub->add_option("--epsilon", c.epsilon_text, "Perturbation budget, decimal or p/q");
    if (single_alpha) sub->add_option("--alpha", c.params.alpha, "Target empirical risk");
    sub->add_option("--gamma", c.params.gamma, "Label-uncertainty threshold");
    sub->add_option("--T", c.params.balls, "Number of balls");
    sub->add_option("--trials", c.trials, "Repeated trials");
    sub->add_option("--seed", c.seed, "Base seed; trial i uses seed + i");
    sub->add_option("--split", c.split, "Training fraction of the split");
    sub->add_option("--out", c.out, "Output path ('-' for stdout)");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    sub->add_option("--mem-cap-mb", c.mem_cap_mb, "Distance cache budget in MiB");
    sub->add_flag("--quiet", c.quiet, "No progress output");
  };

  auto* estimate = app.add_subcommand("estimate", "Estimate intrinsic robustness over repeated trials");
  add_search(estimate, true);
  auto* sweep = app.add_subcommand("sweep", "Run estimate over a list of alphas, emit CSV");
  add_search(sweep, false);
  sweep->add_option("--alphas", alphas, "Comma-separated alphas (default 0.01..0.15)");

  auto* stats = app.add_subcommand("lu-stats", "Label-uncertainty histogram and summary");
  stats->add_option("--labels", c.labels)->required();
  stats->add_option("--softlabels", c.softlabels)->required();
  stats->add_option("--bins", bins, "Comma-separated bin edges covering [0,2]");
  stats->add_option("--out", c.out, "JSON output path ('-' for stdout)");
  stats->add_option("--per-example", c.per_example, "Write id,lu CSV here");

  auto* abstain = app.add_subcommand("abstain", "Abstention report and coverage curve");
  abstain->add_option("--predictions", c.predictions, "CSV id,clean_correct,robust_correct")
      ->required();
  abstain->add_option("--lu", c.lu, "Per-example LU CSV (id,lu)");
  abstain->add_option("--labels", c.labels);
  abstain->add_option("--softlabels", c.softlabels);
  abstain->add_option("--tau", c.tau, "Abstain when lu > tau");
  abstain->add_option("--order", c.order, "lowest or highest")
      ->check(CLI::IsMember({"lowest", "highest"}));
  abstain->add_option("--grid", grid, "Comma-separated coverage fractions");
  abstain->add_option("--curve", c.curve, "Write the coverage curve CSV here");
  abstain->add_option("--out", c.out, "JSON output path ('-' for stdout)");

  auto* gauss = app.add_subcommand("gauss-validate", "Check the estimator on a Gaussian mixture");
  std::string gauss_epsilon = "0.5";
  gauss->add_option("--theta", theta, "Comma-separated mean vector (default 1,0)");
  gauss->add_option("--sigma", c.sigma);
  gauss->add_option("--alpha", c.params.alpha);
  gauss->add_option("--epsilon", gauss_epsilon);
  gauss->add_option("--T", c.params.balls);
  gauss->add_option("--mc-samples", c.mc_samples);
  gauss->add_option("--search-samples", c.search_samples);
  gauss->add_option("--seed", c.seed);
  gauss->add_option("--threads", c.threads);
  gauss->add_option("--mem-cap-mb", c.mem_cap_mb);
  gauss->add_option("--out", c.out);
  gauss->add_flag("--quiet", c.quiet);

  auto* synth = app.add_subcommand("synth", "Write a Gaussian-mixture sample in the input formats");
  synth->add_option("--theta", theta);
  synth->add_option("--sigma", c.sigma);
  synth->add_option("--count", c.count)->required();
  synth->add_option("--seed", c.seed);
  synth->add_option("--soft", c.soft_mode, "onehot or posterior");
  synth->add_option("--out-prefix", c.out_prefix)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : exit_code(ErrorKind::Config);
  }

  try {
    if (!alphas.empty()) c.alphas = parse_list(alphas);
    if (!bins.empty()) c.bin_edges = parse_list(bins);
    if (!grid.empty()) c.grid = parse_list(grid);
    if (!theta.empty()) c.theta = parse_list(theta);
    c.threads = resolve_threads(c.threads);

    if (estimate->parsed()) return c.subcommand = "estimate", cmd_estimate(c, out, err);
    if (sweep->parsed()) return c.subcommand = "sweep", cmd_sweep(c, out, err);
    if (stats->parsed()) return c.subcommand = "lu-stats", cmd_lu_stats(c, out, err);
    if (abstain->parsed()) return c.subcommand = "abstain", cmd_abstain(c, out, err);
    if (gauss->parsed()) c.epsilon_text = gauss_epsilon;
    if (gauss->parsed()) return c.subcommand = "gauss-validate", cmd_gauss_validate(c, out, err);
    if (synth->parsed()) return c.subcommand = "synth", cmd_synth(c, out, err);
    return kInternal;
  } catch (const Error& e) {
    Json j = {{"error", to_string(e.kind())},
              {"message", e.what()},
              {"exit_code", exit_code(e.kind())}};
    if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e)) {
      j["iteration"] = inf->iteration();
      j["balls_placed"] = inf->balls_placed();
      j["max_lu"] = inf->max_lu();
    }
    err << j.dump() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << Json{{"error", "internal"}, {"message", e.what()}, {"exit_code", int{kInternal}}}.dump()
        << '\n';
    return kInternal;
  }
}

}  // namespace lucon::cli

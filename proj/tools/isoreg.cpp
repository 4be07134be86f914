// isoreg: fit isotonic M-estimators and run the accompanying diagnostics.
//
// Exit codes: 0 ok, 1 other failure, 2 unreadable input data, 3 degenerate
// scale, 4 bad flags.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isoreg/asymptotics.hpp"
#include "isoreg/error.hpp"
#include "isoreg/io.hpp"
#include "isoreg/montecarlo.hpp"
#include "isoreg/robustness.hpp"
#include "isoreg/solver.hpp"

namespace {

using nlohmann::json;
using namespace isoreg;

constexpr int kExitParse = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitFlags = 4;

class FlagError : public std::runtime_error {
 public:
  FlagError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

// Runs a flag-value parser, reporting failures against the flag.
template <class Fn>
auto from_flag(const std::string& flag, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw FlagError(flag, e.what());
  }
}

std::uint64_t default_seed() {
  const char* env = std::getenv("ISOREG_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw FlagError("ISOREG_SEED", std::string("not an unsigned integer: '") + env + "'");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void emit(const json& doc, const std::string& path) {
  const auto text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    open_output(path) << text;
  }
}

json summary_json(const ChernoffSummary& s) {
  return {{"mean", s.mean}, {"var", s.variance}, {"stderr_mean", s.stderr_mean}, {"stderr_var", s.stderr_variance}};
}

json avar_json(const AvarReport& r) {
  return {{"ratio", r.ratio}, {"kappa", r.kappa}, {"avar", r.avar}, {"var_chernoff", r.var_chernoff}};
}

struct FitArgs {
  std::string input;
  std::string family = "huber:k=0.98";
  std::string scale = "diffm";
  std::optional<double> scale_c;
  std::optional<double> scale_b;
  std::string direction = "increasing";
  std::string out_json;
  std::string out_csv;
  std::string plot;
};

int run_fit(const FitArgs& a) {
  const auto family = from_flag("--family", [&] { return ScoreFamily::parse(a.family); });
  const auto method = from_flag("--scale", [&] { return ScaleMethod::parse(a.scale, a.scale_c, a.scale_b); });
  const auto sample = read_series_file(a.input);
  const bool decreasing = a.direction == "decreasing";

  IsotonicFit result = [&] {
    if (!decreasing) return fit(sample, family, method);
    std::vector<double> negated(sample.x().begin(), sample.x().end());
    for (auto& v : negated) v = -v;
    const auto mirrored = sample.with_responses(std::move(negated));
    auto r = fit(mirrored, family, method);
    std::vector<Block> blocks = r.blocks;
    for (auto& b : blocks) b.level = -b.level;
    return assemble_fit(sample, std::move(blocks), family, r.scale);
  }();

  if (a.out_json.empty()) {
    std::cout << fit_to_json_string(result);
  } else {
    open_output(a.out_json) << fit_to_json_string(result);
  }
  if (!a.out_csv.empty()) {
    auto out = open_output(a.out_csv);
    write_fit_csv(out, result, sample);
  }
  if (!a.plot.empty()) {
    auto out = open_output(a.plot);
    write_plot_data(out, result, sample);
  }
  return 0;
}

struct Table1Args {
  std::uint64_t seed = 0;
  std::size_t reps = 500;
  unsigned threads = 0;
  std::string out;
  std::string estimates;
};

int run_table1(const Table1Args& a) {
  if (a.reps < 1) throw FlagError("--reps", "must be at least 1");
  const auto t = table1(a.seed, a.reps, a.threads, !a.estimates.empty());
  const bool csv = a.out.size() > 4 && a.out.substr(a.out.size() - 4) == ".csv";
  if (csv) {
    auto out = open_output(a.out);
    out << "estimator,error,n,replications,scaled_mse,mc_stderr\n";
    for (const auto& r : t.mc.rows) {
      out << r.estimator << ',' << r.error << ',' << r.n << ',' << r.replications << ','
          << format_number(r.scaled_mse) << ',' << format_number(r.mc_stderr) << '\n';
    }
    out << "\nestimator,error,avar\n";
    for (const auto& e : t.avar) out << e.estimator << ',' << e.error << ',' << format_number(e.report.avar) << '\n';
  } else {
    json rows = json::array();
    for (const auto& r : t.mc.rows) {
      rows.push_back({{"estimator", r.estimator},
                      {"error", r.error},
                      {"n", r.n},
                      {"replications", r.replications},
                      {"scaled_mse", r.scaled_mse},
                      {"mc_stderr", r.mc_stderr}});
    }
    json avars = json::array();
    for (const auto& e : t.avar) {
      avars.push_back({{"estimator", e.estimator}, {"error", e.error}, {"avar", e.report.avar}});
    }
    emit({{"seed", a.seed}, {"mc", rows}, {"avar", avars}}, a.out);
  }
  if (!a.estimates.empty()) {
    auto out = open_output(a.estimates);
    out << "estimator,error,n,replicate,estimate\n";
    for (const auto& r : t.mc.rows) {
      for (std::size_t i = 0; i < r.estimates.size(); ++i) {
        out << r.estimator << ',' << r.error << ',' << r.n << ',' << i << ',' << format_number(r.estimates[i])
            << '\n';
      }
    }
  }
  return 0;
}

struct ChernoffArgs {
  ChernoffConfig config;
  std::string samples;
  std::string out;
};

int run_chernoff(ChernoffArgs a) {
  const auto sample = from_flag("--half-width/--step/--reps", [&] { return simulate_chernoff(a.config); });
  json doc{{"half_width", a.config.half_width},
           {"step", a.config.step},
           {"reps", a.config.replications},
           {"seed", a.config.seed},
           {"summary", summary_json(sample.summary())}};
  emit(doc, a.out);
  if (!a.samples.empty()) {
    auto out = open_output(a.samples);
    out << "replicate,slope\n";
    for (std::size_t r = 0; r < sample.slopes.size(); ++r) out << r << ',' << format_number(sample.slopes[r]) << '\n';
  }
  return 0;
}

struct AvarArgs {
  std::string family = "huber:k=0.98";
  std::string error = "normal";
  double mu_prime = 5.0;
  double h = 1.0;
  double sigma0 = 1.0;
  double var_chernoff = kChernoffVariance;
};

int run_avar(const AvarArgs& a) {
  const auto family = from_flag("--family", [&] { return ScoreFamily::parse(a.family); });
  const auto model = from_flag("--error", [&] { return ErrorModel::parse(a.error); });
  const auto r = from_flag("--mu-prime/--h/--sigma0",
                           [&] { return avar(family, model, a.mu_prime, a.h, a.sigma0, a.var_chernoff); });
  auto doc = avar_json(r);
  doc["family"] = family.name();
  doc["error"] = model.name();
  emit(doc, "");
  return 0;
}

struct InfluenceArgs {
  std::string family = "huber:k=0.98";
  std::string error = "normal";
  InfluenceInputs in{0.5, 20.0, 0.5, 11.25, 5.0, 1.0, 1.0};
};

int run_influence(const InfluenceArgs& a) {
  const auto family = from_flag("--family", [&] { return ScoreFamily::parse(a.family); });
  const auto model = from_flag("--error", [&] { return ErrorModel::parse(a.error); });
  const double value = from_flag("--mu-prime/--h/--sigma0", [&] { return influence(family, a.in, model); });
  emit({{"family", family.name()},
        {"error", model.name()},
        {"t_star", a.in.t_star},
        {"x_star", a.in.x_star},
        {"t0", a.in.t0},
        {"influence", value}},
       "");
  return 0;
}

struct BreakdownArgs {
  double h = 0.5;
  std::optional<double> scale_breakdown;
};

int run_breakdown(const BreakdownArgs& a) {
  const double bound = from_flag("--H", [&] { return breakdown_lower_bound(a.h, a.scale_breakdown); });
  json doc{{"H", a.h}, {"bound", bound}};
  if (a.scale_breakdown) doc["scale_breakdown"] = *a.scale_breakdown;
  emit(doc, "");
  return 0;
}

struct ProbeArgs {
  std::string input;
  std::string family = "huber:k=0.98";
  std::string scale = "diffm";
  std::optional<std::size_t> outliers;
  std::optional<double> fraction;
  double at = 0.5;
  std::optional<double> t_star;
  double value = 1e6;
};

int run_probe(const ProbeArgs& a) {
  const auto family = from_flag("--family", [&] { return ScoreFamily::parse(a.family); });
  const auto method = from_flag("--scale", [&] { return ScaleMethod::parse(a.scale); });
  const auto sample = read_series_file(a.input);
  const std::size_t count =
      a.outliers ? *a.outliers
                 : from_flag("--fraction", [&] { return outliers_for_fraction(a.fraction.value_or(0.0), sample.size()); });
  const ContaminationSpec spec{a.t_star.value_or(a.at), a.value, count};
  if (count >= sample.size()) throw FlagError("--outliers", "must be below the sample size");
  const auto r = contamination_probe(sample, family, method, spec, a.at);
  emit({{"family", family.name()},
        {"scale", method.name()},
        {"n", sample.size()},
        {"outliers", count},
        {"t_star", spec.t_star},
        {"x_star", spec.x_star},
        {"t0", a.at},
        {"clean", r.clean},
        {"contaminated", r.contaminated},
        {"deviation", r.deviation}},
       "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust isotonic regression by M-estimation"};
  app.require_subcommand(1);
  // --h names the design density, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const FlagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlags;
  }

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an isotonic M-estimator to a t,x series");
  fit_cmd->add_option("input,--input", fit_args.input, "CSV file with columns t,x")->required();
  fit_cmd->add_option("--family", fit_args.family, "l2 | l1 | huber:k=K | sl1:m=M | shuber:k=K,m=M")
      ->capture_default_str();
  fit_cmd->add_option("--scale", fit_args.scale, "fixed:S | diffm | madl1")->capture_default_str();
  fit_cmd->add_option("--scale-c", fit_args.scale_c, "bisquare constant c for diffm");
  fit_cmd->add_option("--scale-b", fit_args.scale_b, "breakdown constant b for diffm");
  fit_cmd->add_option("--direction", fit_args.direction)
      ->check(CLI::IsMember({"increasing", "decreasing"}))
      ->capture_default_str();
  fit_cmd->add_option("--out-json", fit_args.out_json, "fit JSON path (default stdout)");
  fit_cmd->add_option("--out-csv", fit_args.out_csv, "t,x,fitted,residual table");
  fit_cmd->add_option("--plot", fit_args.plot, "plot data: raw points and step vertices");

  Table1Args t1;
  auto* t1_cmd = app.add_subcommand("table1", "Monte Carlo MSE study with the asymptotic variance column");
  t1_cmd->add_option("--seed", t1.seed, "defaults to $ISOREG_SEED or 0");
  t1_cmd->add_option("--reps", t1.reps)->capture_default_str();
  t1_cmd->add_option("--threads", t1.threads, "0 uses every hardware thread");
  t1_cmd->add_option("--out", t1.out, "table.json or table.csv (default JSON on stdout)");
  t1_cmd->add_option("--estimates", t1.estimates, "CSV of raw per-replicate estimates");

  ChernoffArgs ch;
  auto* ch_cmd = app.add_subcommand("chernoff", "Simulate the slope at zero of the convex minorant");
  ch_cmd->add_option("--half-width", ch.config.half_width)->capture_default_str();
  ch_cmd->add_option("--step", ch.config.step)->capture_default_str();
  ch_cmd->add_option("--reps", ch.config.replications)->capture_default_str();
  ch_cmd->add_option("--seed", ch.config.seed, "defaults to $ISOREG_SEED or 0");
  ch_cmd->add_option("--threads", ch.config.threads, "0 uses every hardware thread");
  ch_cmd->add_option("--samples", ch.samples, "CSV of per-replicate slopes");
  ch_cmd->add_option("--out", ch.out, "summary JSON path (default stdout)");

  AvarArgs av;
  auto* av_cmd = app.add_subcommand("avar", "Asymptotic variance of n^{1/3}(mu_hat(t0) - mu(t0))");
  av_cmd->add_option("--family", av.family)->capture_default_str();
  av_cmd->add_option("--error", av.error, "normal | normal:sigma=S | t3 | student:df=D")->capture_default_str();
  av_cmd->add_option("--mu-prime", av.mu_prime)->capture_default_str();
  av_cmd->add_option("--h", av.h, "design density at t0")->capture_default_str();
  av_cmd->add_option("--sigma0", av.sigma0)->capture_default_str();
  av_cmd->add_option("--var-chernoff", av.var_chernoff)->capture_default_str();

  InfluenceArgs inf;
  auto* inf_cmd = app.add_subcommand("influence", "Squared-bias influence of a point mass at (t*, x*)");
  inf_cmd->add_option("--family", inf.family)->capture_default_str();
  inf_cmd->add_option("--error", inf.error)->capture_default_str();
  inf_cmd->add_option("--t-star", inf.in.t_star)->capture_default_str();
  inf_cmd->add_option("--x-star", inf.in.x_star)->capture_default_str();
  inf_cmd->add_option("--t0", inf.in.t0)->capture_default_str();
  inf_cmd->add_option("--mu", inf.in.mu_t0, "mu(t0)")->capture_default_str();
  inf_cmd->add_option("--mu-prime", inf.in.mu_prime_t0)->capture_default_str();
  inf_cmd->add_option("--h", inf.in.h_t0)->capture_default_str();
  inf_cmd->add_option("--sigma0", inf.in.sigma0)->capture_default_str();

  BreakdownArgs bd;
  auto* bd_cmd = app.add_subcommand("breakdown", "Lower bound on the breakdown point at t0");
  bd_cmd->add_option("--H", bd.h, "design distribution function at t0")->capture_default_str();
  bd_cmd->add_option("--scale-breakdown", bd.scale_breakdown, "cap from a plug-in scale (0.5 for diffm)");

  ProbeArgs pr;
  auto* pr_cmd = app.add_subcommand("probe", "Refit after replacing responses near t* by an outlier value");
  pr_cmd->add_option("--csv,--input", pr.input, "CSV file with columns t,x")->required();
  pr_cmd->add_option("--family", pr.family)->capture_default_str();
  pr_cmd->add_option("--scale", pr.scale)->capture_default_str();
  auto* count_opt = pr_cmd->add_option("--outliers", pr.outliers, "number of responses to replace");
  pr_cmd->add_option("--fraction", pr.fraction, "contamination fraction, rounded to a count")->excludes(count_opt);
  pr_cmd->add_option("--at", pr.at, "t0 where the fit is compared")->capture_default_str();
  pr_cmd->add_option("--t-star", pr.t_star, "contamination location (default --at)");
  pr_cmd->add_option("--value", pr.value, "outlier response")->capture_default_str();

  t1.seed = seed;
  ch.config.seed = seed;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFlags;
  }

  try {
    if (*fit_cmd) return run_fit(fit_args);
    if (*t1_cmd) return run_table1(t1);
    if (*ch_cmd) return run_chernoff(ch);
    if (*av_cmd) return run_avar(av);
    if (*inf_cmd) return run_influence(inf);
    if (*bd_cmd) return run_breakdown(bd);
    if (*pr_cmd) return run_probe(pr);
  } catch (const FlagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlags;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DegenerateSample& e) {
    std::cerr << "error: degenerate scale: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const InsufficientData& e) {
    std::cerr << "error: degenerate scale: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

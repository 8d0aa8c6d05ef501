#include "noiselab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "noiselab/entropy.hpp"
#include "noiselab/error.hpp"
#include "noiselab/io.hpp"
#include "noiselab/linalg.hpp"
#include "noiselab/net.hpp"
#include "noiselab/oracle.hpp"
#include "noiselab/quality.hpp"
#include "noiselab/rng.hpp"

namespace noiselab::cli {

namespace {

using io::csv_double;
using io::ordered_json;

struct SweepRange {
  double start = 0.0;
  double end = 0.0;
  int steps = 1;

  double at(int i) const {
    if (steps <= 1) return start;
    return start + (end - start) * i / (steps - 1);
  }
};

SweepRange parse_sweep(const std::string& text) {
  SweepRange range;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  require(first != std::string::npos && second != std::string::npos,
          ErrorCode::InvalidArgument,
          "--sweep expects start:end:steps, got '" + text + "'");
  try {
    range.start = std::stod(text.substr(0, first));
    range.end = std::stod(text.substr(first + 1, second - first - 1));
    range.steps = std::stoi(text.substr(second + 1));
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "malformed --sweep '" + text + "'");
  }
  require(range.steps >= 1, ErrorCode::InvalidArgument,
          "--sweep needs at least one step");
  return range;
}

/// Output sink: stdout by default, a file when --out was given.
class Sink {
 public:
  Sink(std::ostream& fallback, const std::string& path) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      require(file_.good(), ErrorCode::InvalidArgument,
              "cannot open output file " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

ordered_json entropy_change_json(const EntropyChange& change) {
  return ordered_json{{"delta_s", change.delta_s},
                      {"classification",
                       std::string(to_string(change.classification))}};
}

// ---------------------------------------------------------------------------
// entropy subcommand

struct EntropyOptions {
  std::string ensemble_path;
  std::string noise = "gaussian";
  std::string level = "latent";
  std::string qkind = "circular";
  double sigma2 = 1.0;
  double alpha = 0.3;
  int k = 0;
  std::string sweep;
  std::string format = "json";
};

EntropyChange evaluate_entropy(const EntropyOptions& opt, double param,
                               const std::optional<LabeledGaussianEnsemble>&
                                   ensemble) {
  const bool image = opt.level == "image";
  if (opt.noise == "gaussian") {
    require(ensemble.has_value(), ErrorCode::InvalidArgument,
            "gaussian entropy change needs --ensemble");
    return image ? delta_s_gaussian_image(*ensemble, param)
                 : delta_s_gaussian_latent(*ensemble, param);
  }
  if (opt.noise == "linear") {
    if (image) return delta_s_linear_image();
    int k = opt.k;
    if (k == 0 && ensemble) k = ensemble->size();
    require(k >= 1, ErrorCode::InvalidArgument,
            "linear entropy change needs --k (or an ensemble)");
    if (opt.qkind == "circular") {
      return delta_s_linear_latent(QualityMatrix::circular_shift(k, param));
    }
    if (opt.qkind == "optimal") {
      return delta_s_linear_latent(QualityMatrix::optimal(k));
    }
    if (opt.qkind == "backward") {
      return delta_s_linear_latent(QualityMatrix::backward_identity(k));
    }
    fail(ErrorCode::InvalidArgument, "unknown --qkind '" + opt.qkind + "'");
  }
  if (opt.noise == "salt_pepper") {
    return image ? delta_s_salt_pepper_image()
                 : delta_s_salt_pepper_latent(param);
  }
  fail(ErrorCode::InvalidArgument, "unknown --noise '" + opt.noise + "'");
}

int run_entropy(const EntropyOptions& opt, std::ostream& out) {
  std::optional<LabeledGaussianEnsemble> ensemble;
  if (!opt.ensemble_path.empty()) {
    ensemble = io::load_ensemble(opt.ensemble_path);
  }

  if (!opt.sweep.empty()) {
    const SweepRange range = parse_sweep(opt.sweep);
    out << "noise_param,delta_s\n";
    for (int i = 0; i < range.steps; ++i) {
      const double param = range.at(i);
      out << csv_double(param) << ",";
      try {
        out << csv_double(evaluate_entropy(opt, param, ensemble).delta_s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix &&
            e.code() != ErrorCode::NegativeDeterminant) {
          throw;
        }
        // leave the cell empty where the change is undefined
      }
      out << "\n";
    }
    return 0;
  }

  const double param = opt.noise == "gaussian" ? opt.sigma2 : opt.alpha;
  const EntropyChange change = evaluate_entropy(opt, param, ensemble);
  if (opt.format == "csv") {
    out << "delta_s,classification\n"
        << csv_double(change.delta_s) << ","
        << to_string(change.classification) << "\n";
  } else {
    out << entropy_change_json(change).dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// qmatrix subcommand

struct QmatrixOptions {
  std::string kind = "circular";
  int k = 4;
  double alpha = 0.3;
  double tol = 1e-9;
  std::string sweep;
};

QualityMatrix build_quality(const std::string& kind, int k, double alpha) {
  if (kind == "circular") return QualityMatrix::circular_shift(k, alpha);
  if (kind == "optimal") return QualityMatrix::optimal(k);
  if (kind == "backward") return QualityMatrix::backward_identity(k);
  fail(ErrorCode::InvalidArgument, "unknown --kind '" + kind + "'");
}

/// Determinant of I+Q: analytic closed form for the two constructions that
/// have one, LU pivot product otherwise (the report's log_det always comes
/// from the LU route, so both paths stay visible side by side).
double quality_det(const QualityMatrix& q) {
  switch (q.kind()) {
    case QualityKind::CircularShift:
      return circulant_det_closed_form(q.size(), *q.alpha());
    case QualityKind::Optimal:
      return 1.0 / std::pow(static_cast<double>(q.size() + 1), q.size() - 1);
    default:
      return det_lu(q.i_plus_q());
  }
}

int run_qmatrix(const QmatrixOptions& opt, std::ostream& out) {
  if (!opt.sweep.empty()) {
    require(opt.kind == "circular", ErrorCode::InvalidArgument,
            "--sweep sweeps the circular-shift strength; use --kind circular");
    const SweepRange range = parse_sweep(opt.sweep);
    out << "alpha,det,delta_s,valid\n";
    for (int i = 0; i < range.steps; ++i) {
      const double alpha = range.at(i);
      const QualityMatrix q = QualityMatrix::circular_shift(opt.k, alpha);
      out << csv_double(alpha) << "," << csv_double(quality_det(q)) << ",";
      try {
        out << csv_double(delta_s_linear_latent(q).delta_s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix &&
            e.code() != ErrorCode::NegativeDeterminant) {
          throw;
        }
      }
      out << "," << (validate(q, opt.tol).overall ? 1 : 0) << "\n";
    }
    return 0;
  }

  const QualityMatrix q = build_quality(opt.kind, opt.k, opt.alpha);
  const ConstraintReport report = validate(q, opt.tol);

  ordered_json j{{"k", q.size()},
                 {"kind", std::string(to_string(q.kind()))}};
  if (q.alpha()) j["alpha"] = *q.alpha();
  j["matrix"] = io::to_json(q.entries());
  j["report"] = io::to_json(report);
  j["det"] = quality_det(q);
  j["delta_s"] = nullptr;
  j["classification"] = nullptr;
  try {
    const EntropyChange change = delta_s_linear_latent(q);
    j["delta_s"] = change.delta_s;
    j["classification"] = std::string(to_string(change.classification));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix &&
        e.code() != ErrorCode::NegativeDeterminant) {
      throw;
    }
    j["error"] = std::string(to_string(e.code()));
  }
  out << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// oracle subcommand

struct OracleCheck {
  std::string name;
  int cases = 0;
  double max_error = 0.0;
  double threshold = 0.0;

  bool pass() const { return max_error <= threshold; }
};

std::vector<OracleCheck> run_oracle_suite(const std::string& suite,
                                          std::uint64_t seed) {
  std::vector<OracleCheck> checks;
  const auto want = [&](const char* name) {
    return suite == "all" || suite == name;
  };

  if (want("dense")) {
    OracleCheck agreement{"gaussian_dense_agreement", 0, 0.0, 1e-9};
    OracleCheck sign{"gaussian_sign_and_harmfulness", 0, 0.0, 0.0};
    Rng rng(stream_seed(seed, 1));
    for (int c = 0; c < 200; ++c) {
      const int k = 1 + static_cast<int>(rng.below(8));
      const auto ensemble =
          LabeledGaussianEnsemble::random(k, rng.next_u64());
      const double sigma2 = rng.uniform(0.0, 2.0);
      const double closed =
          delta_s_gaussian_latent(ensemble, sigma2).delta_s;
      const double dense = oracle::delta_s_gaussian_dense(ensemble, sigma2);
      agreement.cases++;
      agreement.max_error =
          std::max(agreement.max_error, std::abs(closed - dense));
      if (sigma2 > 0.0) {
        sign.cases++;
        const double m = m_indicator(ensemble, sigma2);
        if (!(closed < 0.0) || !(m < 0.0)) sign.max_error = 1.0;
      }
    }
    checks.push_back(agreement);
    checks.push_back(sign);
  }

  if (want("sherman")) {
    OracleCheck check{"sherman_morrison_inverse", 0, 0.0, 1e-8};
    Rng rng(stream_seed(seed, 2));
    for (int k = 1; k <= 32; ++k) {
      const auto ensemble =
          LabeledGaussianEnsemble::random(k, rng.next_u64());
      for (double sigma2 : {0.0, 0.5, 1.0, 2.0}) {
        check.cases++;
        check.max_error =
            std::max(check.max_error,
                     oracle::sherman_morrison_check(ensemble, sigma2));
      }
    }
    checks.push_back(check);
  }

  if (want("circulant")) {
    OracleCheck lu{"circulant_logdet_vs_closed_form", 0, 0.0, 1e-9};
    for (int k = 1; k <= 64; ++k) {
      for (double alpha : {0.0, 0.1, 0.2, 0.3, 0.4, 0.49}) {
        lu.cases++;
        const double closed =
            std::log(circulant_det_closed_form(k, alpha));
        const double by_lu =
            -delta_s_linear_latent(QualityMatrix::circular_shift(k, alpha))
                 .delta_s;
        lu.max_error = std::max(lu.max_error, std::abs(by_lu - closed));
      }
    }
    checks.push_back(lu);

    OracleCheck boundary{"optimal_q_boundary", 0, 0.0, 1e-8};
    for (int k = 1; k <= 64; ++k) {
      boundary.cases++;
      const double ds =
          delta_s_linear_latent(QualityMatrix::optimal(k)).delta_s;
      boundary.max_error =
          std::max(boundary.max_error, std::abs(ds - upper_bound(k)));
    }
    checks.push_back(boundary);
  }

  if (want("saltpepper")) {
    OracleCheck check{"salt_pepper_direct_sum", 0, 0.0, 1e-12};
    for (int i = 0; i <= 9; ++i) {
      const double alpha = i / 10.0;
      check.cases++;
      // independent route: literal -sum p ln p over the three outcomes
      double entropy = 0.0;
      for (double p : {alpha / 2.0, alpha / 2.0, 1.0 - alpha}) {
        if (p > 0.0) entropy -= p * std::log(p);
      }
      const double direct = -entropy;
      check.max_error =
          std::max(check.max_error,
                   std::abs(delta_s_salt_pepper_latent(alpha).delta_s -
                            direct));
    }
    checks.push_back(check);
  }

  if (want("mc")) {
    OracleCheck gauss{"mc_gaussian_vs_dense", 0, 0.0, 0.02};
    Rng rng(stream_seed(seed, 3));
    for (int trial = 0; trial < 10; ++trial) {
      const auto ensemble =
          LabeledGaussianEnsemble::random(2, rng.next_u64());
      const double sigma2 = rng.uniform(0.1, 2.0);
      const double dense = oracle::delta_s_gaussian_dense(ensemble, sigma2);
      const double mc = oracle::mc_delta_s_gaussian(ensemble, sigma2, 200000,
                                                    rng.next_u64());
      gauss.cases++;
      gauss.max_error = std::max(gauss.max_error, std::abs(mc - dense));
    }
    checks.push_back(gauss);

    OracleCheck linear{"mc_linear_transform", 0, 0.0, 0.05};
    Rng lin_rng(stream_seed(seed, 4));
    for (int k : {2, 3, 4, 5}) {
      for (double alpha : {0.0, 0.3}) {
        linear.cases++;
        const double observed = oracle::mc_linear_transform_check(
            k, alpha, 200000, lin_rng.next_u64());
        const double expected =
            2.0 * std::log(circulant_det_closed_form(k, alpha));
        linear.max_error =
            std::max(linear.max_error, std::abs(observed - expected));
      }
    }
    checks.push_back(linear);
  }

  require(!checks.empty(), ErrorCode::InvalidArgument,
          "unknown --suite '" + suite + "'");
  return checks;
}

int run_oracle(const std::string& suite, std::uint64_t seed,
               const std::string& format, std::ostream& out) {
  const auto checks = run_oracle_suite(suite, seed);
  if (format == "json") {
    ordered_json rows = ordered_json::array();
    for (const auto& c : checks) {
      rows.push_back(ordered_json{{"check", c.name},
                                  {"cases", c.cases},
                                  {"max_error", c.max_error},
                                  {"threshold", c.threshold},
                                  {"pass", c.pass()}});
    }
    out << rows.dump(2) << "\n";
  } else {
    out << "check,cases,max_error,threshold,pass\n";
    for (const auto& c : checks) {
      out << c.name << "," << c.cases << "," << csv_double(c.max_error)
          << "," << csv_double(c.threshold) << "," << (c.pass() ? 1 : 0)
          << "\n";
    }
  }
  const bool all_pass = std::all_of(checks.begin(), checks.end(),
                                    [](const auto& c) { return c.pass(); });
  return all_pass ? 0 : 2;
}

// ---------------------------------------------------------------------------
// train / sweep subcommands

std::string noise_kind_label(const std::optional<net::NoiseSpec>& noise) {
  if (!noise) return "none";
  std::string kind(net::to_string(noise->kind));
  if (noise->kind == net::NoiseKind::LinearTransform) {
    kind += "_";
    kind += net::to_string(noise->q_kind);
  }
  return kind;
}

void append_csv_row(const std::string& path, const net::RunRecord& record) {
  const bool fresh = !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  std::ofstream csv(path, std::ios::app);
  require(csv.good(), ErrorCode::InvalidArgument,
          "cannot open csv file " + path);
  if (fresh) csv << "seed,noise_kind,param,layer,final_test_accuracy\n";
  const std::string kind = noise_kind_label(record.config.noise);
  const double param =
      record.config.noise ? record.config.noise->param() : 0.0;
  const int layer =
      record.config.noise ? record.config.noise->injection_layer : -1;
  csv << record.seed << "," << kind << "," << csv_double(param) << ","
      << layer << "," << csv_double(record.final_test_accuracy) << "\n";
}

struct TrainOptions {
  std::string config_path;
  std::string csv_path;
  bool timings = false;
};

int run_train(const TrainOptions& opt, std::optional<std::uint64_t> seed,
              std::ostream& out) {
  net::TrainConfig config = io::load_train_config(opt.config_path);
  if (seed) config.seed = *seed;
  const net::RunRecord record = net::train(config);
  out << io::to_json(record, opt.timings).dump(2) << "\n";
  if (!opt.csv_path.empty()) append_csv_row(opt.csv_path, record);
  return 0;
}

struct SweepOptions {
  int seeds = 10;
  net::TrainConfig base;
};

int run_sweep(const SweepOptions& opt, std::uint64_t seed, std::ostream& out,
              std::ostream& err) {
  require(opt.seeds >= 1, ErrorCode::InvalidArgument, "--seeds must be >= 1");

  std::vector<std::optional<net::NoiseSpec>> grid;
  grid.push_back(std::nullopt);
  grid.push_back(net::NoiseSpec{net::NoiseKind::GaussianAdditive, 1.0,
                                net::QKind::CircularShift, 0.3, -1});
  grid.push_back(net::NoiseSpec{net::NoiseKind::LinearTransform, 1.0,
                                net::QKind::CircularShift, 0.3, -1});
  grid.push_back(net::NoiseSpec{net::NoiseKind::SaltPepper, 1.0,
                                net::QKind::CircularShift, 0.3, -1});

  out << "noise_kind,param,layer,seed,final_test_accuracy\n";
  std::vector<std::pair<std::string, double>> means;
  for (const auto& noise : grid) {
    const std::string kind = noise_kind_label(noise);
    const double param = noise ? noise->param() : 0.0;
    double sum = 0.0;
    for (int i = 0; i < opt.seeds; ++i) {
      net::TrainConfig config = opt.base;
      config.seed = stream_seed(seed, static_cast<std::uint64_t>(i));
      config.noise = noise;
      const net::RunRecord record = net::train(config);
      const int layer = record.config.noise
                            ? record.config.noise->injection_layer
                            : -1;
      out << kind << "," << csv_double(param) << "," << layer << ","
          << record.seed << "," << csv_double(record.final_test_accuracy)
          << "\n";
      sum += record.final_test_accuracy;
    }
    means.emplace_back(kind, sum / opt.seeds);
  }

  err << "mean final test accuracy over " << opt.seeds << " seeds:\n";
  for (const auto& [kind, mean] : means) {
    err << "  " << kind << ": " << csv_double(mean) << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"information-theoretic noise analysis and a desk-scale "
               "noise-injection trainer"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
  app.add_option("--seed", seed, "seed governing all randomness");
  app.add_option("--out", out_path, "write output to this file");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  // let the global flags appear after the subcommand name as well
  // (inherited by the subcommands created below)
  app.fallthrough(true);

  EntropyOptions entropy_opt;
  auto* entropy_cmd = app.add_subcommand(
      "entropy", "entropy change for a configured noise");
  entropy_cmd->add_option("--ensemble", entropy_opt.ensemble_path,
                          "ensemble JSON file");
  entropy_cmd->add_option("--noise", entropy_opt.noise, "noise kind")
      ->check(CLI::IsMember({"gaussian", "linear", "salt_pepper"}));
  entropy_cmd->add_option("--level", entropy_opt.level, "injection level")
      ->check(CLI::IsMember({"latent", "image"}));
  entropy_cmd->add_option("--sigma2", entropy_opt.sigma2,
                          "gaussian noise variance");
  entropy_cmd->add_option("--alpha", entropy_opt.alpha,
                          "strength for linear/salt-and-pepper noise");
  entropy_cmd->add_option("--k", entropy_opt.k,
                          "matrix size for linear noise");
  entropy_cmd->add_option("--qkind", entropy_opt.qkind,
                          "quality-matrix construction")
      ->check(CLI::IsMember({"circular", "optimal", "backward"}));
  entropy_cmd->add_option("--sweep", entropy_opt.sweep,
                          "start:end:steps sweep of the noise parameter");

  QmatrixOptions qmatrix_opt;
  auto* qmatrix_cmd = app.add_subcommand(
      "qmatrix", "construct and analyze a quality matrix");
  qmatrix_cmd->add_option("--kind", qmatrix_opt.kind, "construction")
      ->check(CLI::IsMember({"circular", "optimal", "backward"}));
  qmatrix_cmd->add_option("--k", qmatrix_opt.k, "matrix size");
  qmatrix_cmd->add_option("--alpha", qmatrix_opt.alpha,
                          "circular-shift strength, [0, 0.5] recommended")
      ->check(CLI::Range(0.0, 1.0));
  qmatrix_cmd->add_option("--tol", qmatrix_opt.tol, "validation tolerance");
  qmatrix_cmd->add_option("--sweep", qmatrix_opt.sweep,
                          "start:end:steps sweep of alpha");

  std::string oracle_suite = "all";
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "run the closed-form arbitration suite");
  oracle_cmd->add_option("--suite", oracle_suite, "which checks to run")
      ->check(CLI::IsMember(
          {"all", "dense", "sherman", "circulant", "saltpepper", "mc"}));

  TrainOptions train_opt;
  auto* train_cmd =
      app.add_subcommand("train", "run one noise-injection training trial");
  train_cmd->add_option("--config", train_opt.config_path,
                        "TrainConfig JSON file")
      ->required();
  train_cmd->add_option("--csv", train_opt.csv_path,
                        "append a summary row to this CSV file");
  train_cmd->add_flag("--timings", train_opt.timings,
                      "include wall-clock time in the output");

  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "seed x noise grid on synthetic blobs");
  sweep_cmd->add_option("--seeds", sweep_opt.seeds, "number of seeds");
  sweep_cmd->add_option("--classes", sweep_opt.base.dataset.classes);
  sweep_cmd->add_option("--dim", sweep_opt.base.dataset.dim);
  sweep_cmd->add_option("--n-per-class", sweep_opt.base.dataset.n_per_class);
  sweep_cmd->add_option("--spread", sweep_opt.base.dataset.spread);
  sweep_cmd->add_option("--epochs", sweep_opt.base.epochs);
  sweep_cmd->add_option("--batch", sweep_opt.base.batch_size);
  sweep_cmd->add_option("--lr", sweep_opt.base.learning_rate);
  sweep_cmd->add_option("--momentum", sweep_opt.base.momentum);
  sweep_cmd->add_option("--hidden", sweep_opt.base.hidden,
                        "hidden layer widths");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Sink sink(out, out_path);
    if (*entropy_cmd) {
      entropy_opt.format = format;
      return run_entropy(entropy_opt, sink.get());
    }
    if (*qmatrix_cmd) return run_qmatrix(qmatrix_opt, sink.get());
    if (*oracle_cmd) {
      // the arbitration table is CSV unless JSON is asked for explicitly
      const std::string oracle_format =
          app.count("--format") > 0 ? format : "csv";
      return run_oracle(oracle_suite, seed, oracle_format, sink.get());
    }
    if (*train_cmd) {
      std::optional<std::uint64_t> seed_override;
      if (app.count("--seed") > 0) seed_override = seed;
      return run_train(train_opt, seed_override, sink.get());
    }
    if (*sweep_cmd) return run_sweep(sweep_opt, seed, sink.get(), err);
  } catch (const Error& e) {
    err << ordered_json{{"error", std::string(to_string(e.code()))},
                        {"message", e.what()}}
               .dump()
        << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << ordered_json{{"error", "unexpected"}, {"message", e.what()}}.dump()
        << "\n";
    return 1;
  }
  return 1;
}

}  // namespace noiselab::cli

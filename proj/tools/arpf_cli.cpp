// arpf: command-line front end for the random periodic feature library.

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arpf/bounds.hpp"
#include "arpf/dataset.hpp"
#include "arpf/experiments.hpp"
#include "arpf/features.hpp"
#include "arpf/netdemo.hpp"
#include "arpf/periodic_map.hpp"
#include "arpf/sampling.hpp"
#include "arpf/svm.hpp"

using namespace arpf;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string config;
};

// Output goes to a file, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// The section of a config file that applies to one subcommand: either
// config[name] or the whole object.
json config_section(const std::string& path, const std::string& name) {
  json j = read_json(path);
  if (!j.is_object()) throw std::runtime_error(path + ": expected a JSON object");
  if (j.contains(name) && j[name].is_object()) return j[name];
  return j;
}

struct DataFlags {
  std::string path;
  int label_column = -1;
  bool no_labels = false;
  bool no_header = false;
  char delimiter = ',';

  void add(CLI::App* app, const std::string& flag, const std::string& what, bool required = true) {
    auto* o = app->add_option(flag, path, what + " (CSV, one row per sample)");
    if (required) o->required();
    app->add_option("--label-column", label_column, "Column holding integer labels; negative counts from the end");
    app->add_flag("--no-labels", no_labels, "The CSV has no label column");
    app->add_flag("--no-header", no_header, "The CSV has no header row");
    app->add_option("--delimiter", delimiter, "Field separator");
  }

  Dataset load(const std::string& p) const {
    CsvOptions o;
    o.delimiter = delimiter;
    o.header = !no_header;
    if (!no_labels) o.label_column = label_column;
    return load_csv(p, o);
  }
  Dataset load() const { return load(path); }
};

std::vector<int> require_labels(const Dataset& d) {
  if (!d.labels) throw std::runtime_error(d.source + ": labels required");
  return *d.labels;
}

// Cos features of every row under the draw described by ref.
std::vector<FeatureVector> embed_rows(const EmbeddingRef& ref, const Dataset& data, const std::string& map) {
  if (data.d() != ref.d)
    throw std::runtime_error("data dimension " + std::to_string(data.d()) + " does not match the embedding (" +
                             std::to_string(ref.d) + ")");
  const auto sampler = FrequencySampler::from_spec(ref.sampler, ref.d);
  FeatureEmbedding emb(sampler.draw(ref.m, ref.seed), PeriodicMap::from_name(map));
  return emb.embed_batch(data.x.data, data.n());
}

// ---- experiments ---------------------------------------------------------

struct ExperimentFlags {
  ExperimentConfig c;
  std::string transitions;

  void add(CLI::App* app, ExperimentKind kind) {
    c = ExperimentConfig::defaults(kind);
    app->add_option("--sampler", c.sampler, "Frequency sampler 'gaussian:<sigma>' or 'cauchy:<tau>'");
    app->add_option("--m", c.m_list, "Feature counts");
    if (kind == ExperimentKind::SvmCurves) {
      app->add_option("--R", c.R_list, "Box constraints of the SVM");
      app->add_option("--trials", c.trials, "Independent draws per setting");
      return;
    }
    app->add_option("--dim", c.d, "Signal dimension d");
    if (kind == ExperimentKind::KernelScatter) {
      app->add_option("--pairs", c.n_pairs, "Number of signal pairs");
      app->add_option("--lambda-max", c.lambda_max, "Largest pair offset lambda (input units)");
      return;
    }
    app->add_option("--n", c.n_list, "Numbers of signals");
    app->add_option("--trials", c.trials, "Independent draws per setting");
    app->add_option("--data-std", c.data_std, "Signals are N(0, std^2 I) (input units)");
    if (kind == ExperimentKind::SuccessGrid) {
      app->add_option("--eps-bar", c.eps_bar, "Success threshold on the worst-case error");
      app->add_option("--transitions", transitions, "Also write the 50%-transition m per n to this CSV path");
    }
  }

  // Defaults < config file < explicit flags.
  ExperimentConfig resolve(ExperimentKind kind, const Globals& g, const CLI::App& root, const CLI::App& sub) const {
    ExperimentConfig r = ExperimentConfig::defaults(kind);
    if (!g.config.empty()) {
      json j = config_section(g.config, experiment_name(kind));
      if (!j.contains("kind")) j["kind"] = experiment_name(kind);
      if (j["kind"] != experiment_name(kind))
        throw std::invalid_argument(g.config + ": config kind " + j["kind"].dump() + " does not match the subcommand");
      r = ExperimentConfig::from_json(j);
    }
    auto given = [&](const char* f) { return sub.get_option_no_throw(f) && sub.count(f) > 0; };
    if (given("--sampler")) r.sampler = c.sampler;
    if (given("--dim")) r.d = c.d;
    if (given("--m")) r.m_list = c.m_list;
    if (given("--n")) r.n_list = c.n_list;
    if (given("--trials")) r.trials = c.trials;
    if (given("--data-std")) r.data_std = c.data_std;
    if (given("--eps-bar")) r.eps_bar = c.eps_bar;
    if (given("--pairs")) r.n_pairs = c.n_pairs;
    if (given("--lambda-max")) r.lambda_max = c.lambda_max;
    if (given("--R")) r.R_list = c.R_list;
    if (root.count("--seed") > 0 || g.config.empty()) r.seed = g.seed;
    r.validate();
    return r;
  }
};

// ---- server lifetime -----------------------------------------------------

volatile std::sig_atomic_t g_stop = 0;
extern "C" void on_signal(int) { g_stop = 1; }

// Turns `--config` entries into command-line flags for options that were not
// given explicitly. Experiment subcommands read their config directly.
std::vector<std::string> with_config_args(std::vector<std::string> args, const CLI::App& app) {
  static const std::set<std::string> experiments = {"kernel-scatter", "error-sweep", "success-grid", "svm-curves"};
  std::string config, sub;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
    else if (sub.empty() && app.get_subcommand_no_throw(args[i])) sub = args[i];
  }
  if (config.empty() || sub.empty() || experiments.count(sub)) return args;
  const json j = config_section(config, sub);
  auto present = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) continue;
    const std::string flag = "--" + key;
    if (present(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& e : value) args.push_back(scalar(e));
    } else {
      args.push_back(flag + "=" + scalar(value));
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random periodic features: kernel approximation with one-bit universal quantization"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed (unsigned 64-bit) for every random draw");
  app.add_option("--out", g.out, "Output path; '-' writes to stdout");
  app.add_option("--config", g.config,
                 "JSON config file; keys are flag names, optionally nested under the subcommand name. "
                 "Experiment subcommands take their experiment config object")
      ->check(CLI::ExistingFile);

  std::function<void()> action;

  // synth
  MixtureSpec mix;
  auto* synth = app.add_subcommand("synth", "Write a labeled Gaussian-mixture dataset as CSV");
  synth->add_option("--classes", mix.classes, "Number of classes")->check(CLI::PositiveNumber);
  synth->add_option("--components", mix.components, "Gaussian components per class")->check(CLI::PositiveNumber);
  synth->add_option("--dim", mix.d, "Dimension d")->check(CLI::PositiveNumber);
  synth->add_option("--n", mix.n, "Number of points")->check(CLI::PositiveNumber);
  synth->add_option("--center-range", mix.center_range, "Centres uniform in [-range, range]^d (input units)");
  synth->add_option("--component-std", mix.component_std, "Standard deviation of each component (input units)");
  synth->add_option("--min-separation", mix.min_separation, "Minimum distance between centres (input units)");
  synth->callback([&] {
    action = [&] {
      mix.seed = g.seed;
      if (g.out == "-") throw CLI::ValidationError("--out", "synth needs a file path");
      save_csv(synth_gaussian_mixture(mix), g.out);
    };
  });

  // features
  DataFlags feat_data;
  std::string feat_sampler = "gaussian:1";
  std::size_t feat_m = 256;
  std::string feat_map = "cos";
  std::string feat_draw_in, feat_draw_out;
  auto* features = app.add_subcommand("features", "Embed the rows of a CSV into a binary feature file");
  feat_data.add(features, "--input", "Signals to embed");
  features->add_option("--sampler", feat_sampler, "Frequency sampler 'gaussian:<sigma>' or 'cauchy:<tau>'");
  features->add_option("--m", feat_m, "Number of features")->check(CLI::PositiveNumber);
  features->add_option("--map", feat_map, "Periodic map: exp, cos, cos<k>, q (one bit) or tri");
  features->add_option("--draw", feat_draw_in, "Reuse a saved draw file instead of sampling (ignores --sampler, --m)")
      ->check(CLI::ExistingFile);
  features->add_option("--save-draw", feat_draw_out, "Also write the draw (Omega, xi) to this path");
  features->callback([&] {
    action = [&] {
      if (g.out == "-") throw CLI::ValidationError("--out", "features needs a file path");
      const Dataset data = feat_data.load();
      RandomDraw draw = feat_draw_in.empty() ? FrequencySampler::from_spec(feat_sampler, data.d()).draw(feat_m, g.seed)
                                             : load_draw(feat_draw_in);
      if (draw.d != data.d()) throw std::runtime_error("draw dimension does not match the data");
      if (!feat_draw_out.empty()) save_draw(draw, feat_draw_out);
      FeatureEmbedding emb(std::move(draw), PeriodicMap::from_name(feat_map));
      save_features(emb.embed_batch(data.x.data, data.n()), g.out);
    };
  });

  // bounds
  std::string b_sampler = "gaussian:1", b_model = "ball", b_f = "q", b_g = "cos";
  std::size_t b_d = 5, b_s = 1;
  double b_S = 1.0, b_radius = 1.0, b_eps = 0.1;
  EntropyConstants b_consts;
  auto* bounds = app.add_subcommand("bounds", "JSON report of Lipschitz constants, entropies and feature counts");
  bounds->add_option("--sampler", b_sampler, "Frequency sampler 'gaussian:<sigma>' (C_Lambda needs a finite mean)");
  bounds->add_option("--set", b_model, "Signal set: ball, sparse or subspaces")
      ->check(CLI::IsMember({"ball", "sparse", "subspaces"}));
  bounds->add_option("--dim", b_d, "Ambient dimension d")->check(CLI::PositiveNumber);
  bounds->add_option("--s", b_s, "Sparsity or subspace dimension")->check(CLI::PositiveNumber);
  bounds->add_option("--S", b_S, "Number of subspaces");
  bounds->add_option("--radius", b_radius, "Radius of the signal set (input units)");
  bounds->add_option("--eps", b_eps, "Target uniform kernel error epsilon")->check(CLI::PositiveNumber);
  bounds->add_option("--f", b_f, "Query-side periodic map");
  bounds->add_option("--g", b_g, "Database-side periodic map");
  bounds->add_option("--C", b_consts.C, "Sparse-ball entropy constant (convention)");
  bounds->add_option("--C-prime", b_consts.C_prime, "Ball and subspace entropy constant (convention)");
  bounds->callback([&] {
    action = [&] {
      SignalModel sm = b_model == "ball"     ? SignalModel::ball(b_d, b_radius)
                       : b_model == "sparse" ? SignalModel::sparse_ball(b_d, b_s, b_radius)
                                             : SignalModel::union_of_subspaces(b_d, b_s, b_S, b_radius);
      sm.validate();
      const auto sampler = FrequencySampler::from_spec(b_sampler, b_d);
      const auto f = PeriodicMap::from_name(b_f), gm = PeriodicMap::from_name(b_g);
      const double c = covering_scale(sampler, f, gm);
      const auto m = required_features_uniform(b_eps, sm, sampler, f, gm, b_consts);
      json r = {
          {"signal_set", sm.describe()},
          {"sampler", sampler.spec()},
          {"epsilon", b_eps},
          {"constants", {{"C", b_consts.C}, {"C_prime", b_consts.C_prime}, {"note", "convention"}}},
          {"c_lambda", *sampler.c_lambda()},
          {"maps", {{"f", f.name()}, {"g", gm.name()}}},
          {"mean_lipschitz", {{"f", mean_lipschitz_bound(f)}, {"g", mean_lipschitz_bound(gm)}}},
          {"covering_scale", c},
          {"entropy", entropy_bound(sm, b_eps / c, b_consts)},
          {"features_uniform", m},
          {"failure_probability_pointwise", hoeffding_failure_prob(m, b_eps)},
          {"features_semi_quantized", required_features_semi_quantized(b_eps, sm, sampler, b_consts)},
          {"features_rff", required_features_rff(b_eps, sm, sampler, b_consts)},
      };
      Output out(g.out);
      out.stream() << r.dump(2) << '\n';
    };
  });

  // experiments
  auto add_experiment = [&](ExperimentKind kind, const std::string& help) {
    auto flags = std::make_shared<ExperimentFlags>();
    auto* sub = app.add_subcommand(experiment_name(kind), help);
    flags->add(sub, kind);
    sub->callback([&, sub, flags, kind] {
      action = [&, sub, flags, kind] {
        const ExperimentConfig cfg = flags->resolve(kind, g, app, *sub);
        Output out(g.out);
        switch (kind) {
          case ExperimentKind::KernelScatter: write_csv(out.stream(), cfg, run_kernel_scatter(cfg)); break;
          case ExperimentKind::ErrorSweep: write_csv(out.stream(), cfg, run_error_sweep(cfg)); break;
          case ExperimentKind::SuccessGrid: {
            const auto grid = run_success_grid(cfg);
            write_csv(out.stream(), cfg, grid.cells);
            if (!flags->transitions.empty()) {
              Output t(flags->transitions);
              write_csv(t.stream(), cfg, grid.transitions);
            }
            break;
          }
          case ExperimentKind::SvmCurves: write_csv(out.stream(), cfg, run_svm_curves(cfg)); break;
        }
      };
    });
    return sub;
  };
  add_experiment(ExperimentKind::KernelScatter, "CSV of estimated vs expected kernel over random pairs");
  add_experiment(ExperimentKind::ErrorSweep, "CSV of worst-case kernel and proximity errors against m");
  add_experiment(ExperimentKind::SuccessGrid, "CSV of success rates over (n, m)");
  add_experiment(ExperimentKind::SvmCurves, "CSV of SVM test accuracy per feature combo against m");

  // svm-train
  DataFlags tr_data;
  double tr_sigma = 2.0;
  SolverOptions tr_opts;
  std::string tr_regime = "exact";
  std::size_t tr_m = 0;
  auto* svm_train = app.add_subcommand("svm-train", "Train one-vs-rest SVMs and write the model as JSON");
  tr_data.add(svm_train, "--train", "Labeled training set");
  svm_train->add_option("--sigma", tr_sigma, "Gaussian kernel bandwidth (input units)")->check(CLI::PositiveNumber);
  svm_train->add_option("--R", tr_opts.R, "Box constraint on the dual variables")->check(CLI::PositiveNumber);
  svm_train->add_option("--gap-tol", tr_opts.gap_tol, "Stop at this relative duality gap");
  svm_train->add_option("--max-epochs", tr_opts.max_epochs, "Epoch cap (one epoch = n SMO steps)");
  svm_train->add_option("--regime", tr_regime, "exact: Gaussian kernel; features: linear on cos features")
      ->check(CLI::IsMember({"exact", "features"}));
  svm_train->add_option("--m", tr_m,
                        "Feature count of the attached embedding (0 = none; required for --regime features, "
                        "feature-combo evaluation and serving)");
  svm_train->callback([&] {
    action = [&] {
      const Dataset data = tr_data.load();
      const auto labels = require_labels(data);
      const auto sampler = FrequencySampler::gaussian(tr_sigma, data.d());
      std::optional<EmbeddingRef> ref;
      if (tr_m > 0) ref = EmbeddingRef{g.seed, tr_m, sampler.spec(), data.d(), "cos"};
      SvmModel model;
      if (tr_regime == "exact") {
        model = train_exact(data, sampler, tr_opts);
      } else {
        if (!ref) throw CLI::ValidationError("--m", "--regime features needs --m > 0");
        model = train_on_features(embed_rows(*ref, data, "cos"), labels, tr_opts);
        model.kernel = sampler.spec();
      }
      model.embedding = ref;
      Output out(g.out);
      out.stream() << model_to_json(model).dump(2) << '\n';
    };
  });

  // svm-cv
  DataFlags cv_data;
  std::vector<double> cv_sigmas = {0.5, 1, 2, 4}, cv_Rs = {0.25, 1, 5};
  int cv_folds = 5;
  auto* svm_cv = app.add_subcommand("svm-cv", "Cross-validate (sigma, R) for the exact-kernel SVM; CSV best first");
  cv_data.add(svm_cv, "--train", "Labeled training set");
  svm_cv->add_option("--sigmas", cv_sigmas, "Kernel bandwidths to try (input units)");
  svm_cv->add_option("--Rs", cv_Rs, "Box constraints to try");
  svm_cv->add_option("--folds", cv_folds, "Number of folds")->check(CLI::Range(2, 1000));
  svm_cv->callback([&] {
    action = [&] {
      const Dataset data = cv_data.load();
      require_labels(data);
      const auto res = cross_validate(data, cv_sigmas, cv_Rs, cv_folds, g.seed);
      Output out(g.out);
      out.stream() << "sigma,R,accuracy\n";
      for (const auto& r : res)
        out.stream() << format_number(r.sigma) << ',' << format_number(r.R) << ',' << format_number(r.accuracy)
                     << '\n';
    };
  });

  // svm-eval
  DataFlags ev_data;
  std::string ev_model, ev_train, ev_combo = "exact";
  auto* svm_eval = app.add_subcommand("svm-eval", "Test accuracy of a model, exactly or with a feature combo; JSON");
  ev_data.add(svm_eval, "--test", "Labeled test set");
  svm_eval->add_option("--model", ev_model, "Model JSON from svm-train")->required()->check(CLI::ExistingFile);
  svm_eval->add_option("--train", ev_train, "Training set the model was fit on (same CSV layout as --test)")
      ->required()
      ->check(CLI::ExistingFile);
  svm_eval->add_option("--combo", ev_combo, "exact, cos_cos, q_cos, cos_q or q_q (query side first)")
      ->check(CLI::IsMember({"exact", "cos_cos", "q_cos", "cos_q", "q_q"}));
  svm_eval->callback([&] {
    action = [&] {
      const SvmModel model = load_model(ev_model);
      const Dataset train = ev_data.load(ev_train);
      const Dataset test = ev_data.load();
      const auto truth = require_labels(test);
      std::vector<int> pred(test.n());
      if (ev_combo == "exact") {
        if (model.training_kind != TrainingKind::ExactKernel)
          throw std::runtime_error("combo 'exact' needs an exact-kernel model");
        const auto sampler = FrequencySampler::from_spec(model.kernel, train.d());
        for (std::size_t i = 0; i < test.n(); ++i)
          pred[i] = argmax_label(model, exact_scores(model, train, sampler, test.x.row(i)));
      } else {
        if (!model.embedding) throw std::runtime_error("model has no embedding; retrain with --m");
        const Table3Combo combo = combo_from_name(ev_combo);
        const Predictor predictor(model, embed_rows(*model.embedding, train, "cos"));
        const bool q_query = combo == Table3Combo::QCos || combo == Table3Combo::QQ;
        const auto queries = embed_rows(*model.embedding, test, q_query ? "q" : "cos");
        for (std::size_t i = 0; i < test.n(); ++i) pred[i] = predictor.predict(queries[i], combo);
      }
      std::size_t hits = 0;
      for (std::size_t i = 0; i < test.n(); ++i) hits += pred[i] == truth[i];
      json r = {{"combo", ev_combo},
                {"n", test.n()},
                {"correct", hits},
                {"accuracy", test.n() ? double(hits) / double(test.n()) : 0.0}};
      if (model.embedding) r["m"] = model.embedding->m;
      Output out(g.out);
      out.stream() << r.dump(2) << '\n';
    };
  });

  // serve
  std::string sv_bind = "127.0.0.1", sv_model, sv_db;
  std::uint16_t sv_port = 7878;
  auto* serve = app.add_subcommand("serve", "Answer one-bit queries against a full-precision feature database");
  serve->add_option("--bind", sv_bind, "IPv4 address to listen on");
  serve->add_option("--port", sv_port, "TCP port (0 picks a free port)");
  serve->add_option("--model", sv_model, "Model JSON with an embedding")->required()->check(CLI::ExistingFile);
  serve->add_option("--database", sv_db, "Cos feature file of the training set (from 'features --map cos')")
      ->required()
      ->check(CLI::ExistingFile);
  serve->callback([&] {
    action = [&] {
      auto state = ServerState::create(load_model(sv_model), load_features(sv_db));
      Server server(state);
      server.start(sv_bind, sv_port);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << sv_bind << ':' << server.port() << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    };
  });

  // query
  std::string q_server = "127.0.0.1:7878", q_features, q_mode = "classify";
  DataFlags q_data;
  std::vector<std::size_t> q_rows;
  std::uint32_t q_top = 10;
  int q_timeout = 5000;
  auto* query = app.add_subcommand("query", "Send one-bit queries to a server; CSV of labels or top-k matches");
  query->add_option("--server", q_server, "Server address host:port");
  q_data.add(query, "--input", "Raw query vectors, embedded locally with the one-bit quantizer", false);
  query->add_option("--features", q_features, "Packed-bit feature file (from 'features --map q') instead of --input")
      ->check(CLI::ExistingFile);
  query->add_option("--rows", q_rows, "Row indices to send (default: all rows)");
  query->add_option("--mode", q_mode, "classify or similarity")->check(CLI::IsMember({"classify", "similarity"}));
  query->add_option("--top-k", q_top, "Matches returned per query in similarity mode");
  query->add_option("--timeout", q_timeout, "Socket timeout (milliseconds)");
  query->callback([&] {
    action = [&] {
      if (q_data.path.empty() == q_features.empty())
        throw CLI::ValidationError("--input/--features", "give exactly one query source");
      const auto colon = q_server.rfind(':');
      if (colon == std::string::npos) throw CLI::ValidationError("--server", "expected host:port");
      const std::string host = q_server.substr(0, colon);
      const auto port = static_cast<std::uint16_t>(std::stoul(q_server.substr(colon + 1)));

      Client client(host, port, q_timeout);
      const auto mode = q_mode == "classify" ? wire::Mode::Classify : wire::Mode::Similarity;
      const auto hello = client.hello(mode, q_top);

      std::vector<FeatureVector> queries;
      if (!q_features.empty()) {
        queries = load_features(q_features);
      } else {
        const Dataset data = q_data.load();
        queries = embed_rows({hello.seed, hello.m, hello.sampler, data.d(), "cos"}, data, "q");
      }
      if (q_rows.empty())
        for (std::size_t i = 0; i < queries.size(); ++i) q_rows.push_back(i);

      Output out(g.out);
      auto& os = out.stream();
      os << (mode == wire::Mode::Classify ? "row,label\n" : "row,rank,index,similarity\n");
      for (auto r : q_rows) {
        if (r >= queries.size()) throw std::runtime_error("row " + std::to_string(r) + " out of range");
        if (queries[r].kind() != PayloadKind::PackedBits) throw std::runtime_error("queries must be one-bit features");
        if (mode == wire::Mode::Classify) {
          os << r << ',' << client.classify(queries[r].bits()).label << '\n';
        } else {
          const auto top = client.similar(queries[r].bits());
          for (std::size_t k = 0; k < top.size(); ++k)
            os << r << ',' << k << ',' << top[k].index << ',' << format_number(top[k].value) << '\n';
        }
      }
      const double per_query = q_rows.empty() ? 0.0 : double(client.last_payload_bytes());
      std::cerr << "queries: " << q_rows.size() << ", payload per query: " << per_query
                << " B (full-precision f64 features: " << 4 + 8 * hello.m << " B), total sent: "
                << client.bytes_sent() << " B\n";
    };
  });

  try {
    auto args = with_config_args({argv + 1, argv + argc}, app);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    action();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}

#include "cli.h"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ultracomb/coders.h"
#include "ultracomb/error.h"
#include "ultracomb/intensity.h"
#include "ultracomb/io.h"
#include "ultracomb/parallel.h"
#include "ultracomb/samplers.h"
#include "ultracomb/spectrum.h"

namespace ultracomb::cli {

namespace {

struct Options {
  std::string model;
  std::string mode = "sample";
  std::string format;
  std::string in;
  std::string out;
  std::string spec;
  std::string lifetime = "immortal";
  std::string q = "1";
  double theta = 1.0;
  double T = 1.0;
  double eps = 0.0;
  double b = 1.0;
  double level = 0.0;
  double min_depth = 0.0;
  std::int64_t reps = 1;
  std::int64_t n = 5;
  std::int64_t n_teeth = 100;
  std::int64_t teeth = 0;
  std::int64_t steps = 10000;
  int p = 2;
  int depth = 1;
  int jobs = 1;
  std::uint64_t seed = 0;
  bool include_origin = false;
  bool atom = false;
};

// Every option of the subcommand with the value it ran with.
auto config_of(const CLI::App& sub) -> Json {
  auto j = Json{{"subcommand", sub.get_name()}};
  for (const auto* opt : sub.get_options()) {
    auto names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    const auto& key = names.front();
    if (opt->get_items_expected_max() == 0) {
      j[key] = opt->count() > 0;
    } else if (!opt->results().empty()) {
      auto joined = std::string{};
      for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
      j[key] = joined;
    } else {
      j[key] = opt->get_default_str();
    }
  }
  return j;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty() || o.out == "-") {
    out << text;
  } else {
    write_text_file(o.out, text);
  }
}

auto csv_header(const Json& config) -> std::string { return "# config: " + config.dump() + "\n"; }

auto require_seed(const CLI::App& sub) {
  if (sub.get_option("--seed")->count() == 0) throw Validation_error{"--seed is required for stochastic subcommands"};
}

auto parse_q_grid(const std::string& text) -> std::vector<double> {
  auto out = std::vector<double>{};
  auto in = std::istringstream{text};
  auto token = std::string{};
  while (std::getline(in, token, ',')) {
    try {
      auto used = std::size_t{0};
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument{token};
    } catch (const std::logic_error&) {
      throw Validation_error{"bad q value '" + token + "'"};
    }
  }
  if (out.empty()) throw Validation_error{"--q needs at least one value"};
  return out;
}

auto population_model(const Options& o) -> Population_model {
  return Population_model::constant(o.b, Lifetime::parse(o.lifetime));
}

auto run_sample(const Options& o, const CLI::App& sub, std::ostream& out) -> int {
  auto config = config_of(sub);
  auto stochastic = o.model != "padic";
  if (stochastic) require_seed(sub);
  if (o.reps < 1) throw Validation_error{"--reps must be at least 1"};
  auto format = o.format.empty() ? std::string{"json"} : o.format;
  if (format != "json" && format != "newick") throw Validation_error{"sample --format must be json or newick"};

  auto draw = std::function<Json(Random_source&)>{};
  auto comb_output = [&](const Comb& c) -> Json {
    return format == "newick" ? Json(comb_to_tree(c).to_newick()) : comb_to_json(c);
  };
  if (o.model == "padic") {
    draw = [&](Random_source&) { return comb_output(padic_comb(o.p, o.depth)); };
  } else if (o.model == "kingman") {
    if (o.n_teeth < 1) throw Validation_error{"--n-teeth must be at least 1"};
    draw = [&](Random_source& rng) {
      return comb_output(sample_kingman_comb(static_cast<std::size_t>(o.n_teeth), rng));
    };
  } else if (o.model == "cpp-brownian" || o.model == "cpp-critical-bd" || o.model == "cpp-from-W") {
    auto nu = std::make_shared<Intensity_model>(
        o.model == "cpp-brownian"      ? brownian_intensity()
        : o.model == "cpp-critical-bd" ? critical_bd_intensity()
                                       : solve_W(population_model(o), o.T, static_cast<std::size_t>(o.steps)).intensity());
    draw = [&, nu](Random_source& rng) {
      auto s = sample_cpp(*nu, o.T, o.eps, rng);
      auto j = comb_output(s.comb);
      if (format == "newick") return j;
      j["width"] = s.width;
      j["killing_height"] = s.killing_height ? Json(*s.killing_height) : Json(nullptr);
      return j;
    };
  } else if (o.model == "splitting") {
    auto lifetime = Lifetime::parse(o.lifetime);
    draw = [&, lifetime](Random_source& rng) {
      auto tree = sample_splitting_tree(o.b, lifetime, o.T, rng);
      return format == "newick" ? Json(tree.to_newick()) : comb_to_json(reduce_population_tree(tree, o.T));
    };
  } else {
    throw Validation_error{"unknown model '" + o.model + "'"};
  }

  auto samples = run_replicates(o.reps, o.seed, o.jobs, [&](std::int64_t, Random_source& rng) { return draw(rng); });
  if (format == "newick") {
    auto text = std::string{"[" + config.dump() + "]\n"};
    for (const auto& s : samples) text += s.get<std::string>() + "\n";
    emit(o, text, out);
    return ok;
  }
  auto doc = Json{{"config", config}};
  if (samples.size() == 1) {
    for (auto& [k, v] : samples.front().items()) doc[k] = v;
  } else {
    doc["samples"] = samples;
  }
  emit(o, doc.dump(2) + "\n", out);
  return ok;
}

auto run_mutate(const Options& o, const CLI::App& sub, std::ostream& out) -> int {
  auto config = config_of(sub);
  require_seed(sub);
  if (o.in.empty()) throw Validation_error{"mutate needs --in comb.json"};
  auto comb = comb_from_json(parse_json(read_text_file(o.in)));
  auto rng = Random_source{o.seed};
  auto ms = scatter_mutations(comb, Mutation_measure::uniform(o.theta), o.include_origin, rng, o.min_depth);
  auto doc = Json{{"config", config}, {"mutations", mutations_to_json(ms)}};
  emit(o, doc.dump(2) + "\n", out);
  return ok;
}

auto run_spectrum(const Options& o, const CLI::App& sub, std::ostream& out) -> int {
  auto config = config_of(sub);
  require_seed(sub);
  auto os = std::ostringstream{};
  os << std::setprecision(17) << csv_header(config);
  if (o.mode == "sample") {
    if (!o.model.empty() && o.model != "kingman") throw Validation_error{"sample mode supports --model kingman"};
    if (o.n < 1) throw Validation_error{"--n must be at least 1"};
    auto run = Sample_spectrum_run{static_cast<std::size_t>(o.n), o.theta, o.reps, o.seed, o.jobs,
                                   static_cast<std::size_t>(std::max<std::int64_t>(o.teeth, 0))};
    auto spectra = simulate_sample_spectra(run);
    auto n = static_cast<std::size_t>(o.n);
    os << "k,count,stderr,exact\n";
    for (auto k = std::size_t{1}; k <= n; ++k) {
      auto sum = 0.0;
      auto sum_sq = 0.0;
      for (const auto& s : spectra) {
        auto x = static_cast<double>(s.at(k));
        sum += x;
        sum_sq += x * x;
      }
      auto m = static_cast<double>(spectra.size());
      auto mean = sum / m;
      auto se = m > 1 ? std::sqrt(std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) / m) : 0.0;
      os << k << ',' << mean << ',' << se << ',';
      if (n <= k_exact_spectrum_limit) os << expected_sample_spectrum(o.theta, n, k);
      os << '\n';
    }
  } else if (o.mode == "population") {
    auto run = Tail_spectrum_run{};
    if (o.model == "critical-bd") {
      run.model = Lambda_model::critical_bd;
    } else if (o.model == "brownian") {
      run.model = Lambda_model::brownian;
    } else {
      throw Validation_error{"population mode supports --model critical-bd or brownian"};
    }
    run.mode = o.atom ? Lambda_mode::atom : Lambda_mode::tail;
    run.theta = o.theta;
    run.T = o.T;
    run.eps = o.eps > 0.0 ? o.eps : 1e-3;
    run.q = parse_q_grid(o.q);
    run.reps = o.reps;
    run.seed = o.seed;
    run.jobs = o.jobs;
    os << "q,estimate,stderr,target\n";
    for (const auto& e : normalized_tail_spectrum(run)) {
      os << e.q << ',' << e.estimate << ',' << e.std_error << ',' << e.target << '\n';
    }
  } else {
    throw Validation_error{"--mode must be sample or population"};
  }
  emit(o, os.str(), out);
  return ok;
}

auto run_solve_w(const Options& o, const CLI::App& sub, std::ostream& out) -> int {
  auto config = config_of(sub);
  auto spec = Model_spec{};
  if (!o.spec.empty()) {
    spec = model_spec_from_json(parse_json(read_text_file(o.spec)));
  } else if (o.model == "yule") {
    spec = Model_spec{Population_model::constant(o.b, Lifetime::immortal()), o.T, static_cast<std::size_t>(o.steps)};
  } else if (o.model == "critical-bd") {
    spec = Model_spec{Population_model::constant(o.b, Lifetime::exponential(o.b)), o.T,
                      static_cast<std::size_t>(o.steps)};
  } else if (o.model == "custom") {
    spec = Model_spec{population_model(o), o.T, static_cast<std::size_t>(o.steps)};
  } else {
    throw Validation_error{"solve-w needs --spec or --model yule|critical-bd|custom"};
  }
  if (o.steps < 1) throw Validation_error{"--steps must be positive"};
  auto w = solve_W(spec.model, spec.T, spec.steps);
  emit(o, csv_header(config) + w_to_csv(w), out);
  return ok;
}

auto run_treecode(const Options& o, const CLI::App& sub, std::ostream& out) -> int {
  auto config = config_of(sub);
  if (o.in.empty()) throw Validation_error{"treecode needs --in contour.json"};
  auto h = contour_from_json(parse_json(read_text_file(o.in)));
  auto format = o.format.empty() ? std::string{"newick"} : o.format;
  if (format == "newick") {
    emit(o, "[" + config.dump() + "]\n" + tree_from_contour(h).to_newick() + "\n", out);
  } else if (format == "comb") {
    if (!(o.level > 0.0)) throw Validation_error{"--format comb needs --level > 0"};
    auto doc = Json{{"config", config}};
    auto comb = comb_to_json(sphere_comb_from_contour(h, o.level));
    for (auto& [k, v] : comb.items()) doc[k] = v;
    emit(o, doc.dump(2) + "\n", out);
  } else {
    throw Validation_error{"treecode --format must be newick or comb"};
  }
  return ok;
}

void report(std::ostream& err, const char* kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
  auto o = Options{};
  auto app = CLI::App{"Random ultrametric trees as combs: sampling, mutations, allele spectra"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto* sample = app.add_subcommand("sample", "Sample combs or trees");
  sample->add_option("--model", o.model, "kingman | cpp-brownian | cpp-critical-bd | cpp-from-W | padic | splitting")
      ->required();
  sample->add_option("--T", o.T, "CPP height / population horizon");
  sample->add_option("--eps", o.eps, "CPP truncation level");
  sample->add_option("--seed", o.seed);
  sample->add_option("--reps", o.reps);
  sample->add_option("--jobs", o.jobs);
  sample->add_option("--n-teeth", o.n_teeth, "Kingman comb teeth");
  sample->add_option("--p", o.p, "p-adic base");
  sample->add_option("--depth", o.depth, "p-adic depth");
  sample->add_option("--b", o.b, "birth rate (splitting, cpp-from-W)");
  sample->add_option("--lifetime", o.lifetime, "immortal | exponential(r) | fixed(l)");
  sample->add_option("--steps", o.steps, "W grid steps (cpp-from-W)");
  sample->add_option("--format", o.format, "json | newick");
  sample->add_option("--out", o.out);

  auto* mutate = app.add_subcommand("mutate", "Scatter Poisson mutations on a comb");
  mutate->add_option("--in", o.in, "comb JSON")->required();
  mutate->add_option("--theta", o.theta);
  mutate->add_flag("--include-origin", o.include_origin);
  mutate->add_option("--min-depth", o.min_depth);
  mutate->add_option("--seed", o.seed);
  mutate->add_option("--out", o.out);

  auto* spectrum = app.add_subcommand("spectrum", "Allele frequency spectra by Monte Carlo");
  spectrum->add_option("--mode", o.mode, "sample | population");
  spectrum->add_option("--model", o.model, "kingman (sample); critical-bd | brownian (population)");
  spectrum->add_option("--theta", o.theta);
  spectrum->add_option("--n", o.n, "sample size");
  spectrum->add_option("--teeth", o.teeth, "Kingman comb teeth (0: automatic)");
  spectrum->add_option("--T", o.T);
  spectrum->add_option("--eps", o.eps, "Brownian truncation (default 1e-3)");
  spectrum->add_option("--q", o.q, "comma-separated thresholds");
  spectrum->add_flag("--atom", o.atom, "count alleles of size exactly q");
  spectrum->add_option("--reps", o.reps);
  spectrum->add_option("--seed", o.seed);
  spectrum->add_option("--jobs", o.jobs);
  spectrum->add_option("--out", o.out);

  auto* solve = app.add_subcommand("solve-w", "Solve for W(t) of a population model");
  solve->add_option("--model", o.model, "yule | critical-bd | custom");
  solve->add_option("--spec", o.spec, "model spec JSON");
  solve->add_option("--b", o.b, "birth rate");
  solve->add_option("--lifetime", o.lifetime, "custom model lifetime");
  solve->add_option("--T", o.T);
  solve->add_option("--steps", o.steps);
  solve->add_option("--out", o.out);

  auto* treecode = app.add_subcommand("treecode", "Tree or sphere comb coded by a contour");
  treecode->add_option("--in", o.in, "contour JSON")->required();
  treecode->add_option("--format", o.format, "newick | comb");
  treecode->add_option("--level", o.level, "sphere level T (comb format)");
  treecode->add_option("--out", o.out);

  auto argv_storage = std::vector<std::string>{"ultracomb"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  auto argv = std::vector<const char*>{};
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    report(err, "validation", e.what());
    return validation;
  }

  try {
    if (*sample) return run_sample(o, *sample, out);
    if (*mutate) return run_mutate(o, *mutate, out);
    if (*spectrum) return run_spectrum(o, *spectrum, out);
    if (*solve) return run_solve_w(o, *solve, out);
    if (*treecode) return run_treecode(o, *treecode, out);
  } catch (const Validation_error& e) {
    report(err, "validation", e.what());
    return validation;
  } catch (const Numeric_error& e) {
    report(err, "numeric", e.what());
    return numeric;
  } catch (const Resource_error& e) {
    report(err, "resource", e.what());
    return numeric;
  } catch (const Io_error& e) {
    report(err, "io", e.what());
    return io;
  } catch (const nlohmann::json::exception& e) {
    report(err, "validation", e.what());
    return validation;
  }
  return validation;
}

}  // namespace ultracomb::cli

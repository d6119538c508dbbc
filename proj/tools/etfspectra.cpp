// etfspectra command line: frames, spectra, manova, functional, moments, coding, harness.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "etfspectra/coding.hpp"
#include "etfspectra/frame_io.hpp"
#include "etfspectra/frames.hpp"
#include "etfspectra/functionals.hpp"
#include "etfspectra/harness.hpp"
#include "etfspectra/manova.hpp"
#include "etfspectra/moments.hpp"
#include "etfspectra/random.hpp"
#include "etfspectra/spectra.hpp"

using namespace etfs;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}

// "start:stop:step", inclusive of stop up to rounding
std::vector<double> parse_range(const std::string& text) {
  auto a = text.find(':');
  auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw std::invalid_argument("range must be start:stop:step");
  double start = std::stod(text.substr(0, a));
  double stop = std::stod(text.substr(a + 1, b - a - 1));
  double step = std::stod(text.substr(b + 1));
  if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad range " + text);
  std::vector<double> out;
  auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(start + step * double(i));
  return out;
}

struct FramesArgs {
  std::string family = "dss";
  std::int64_t n = 0, m = 0, redundancy = 2;
  std::uint64_t seed = 0;
  std::string field = "complex";
  bool normalize = false;
  std::string out;
};

void cmd_frames_construct(const FramesArgs& a) {
  FrameRequest req;
  req.family = parse_family(a.family);
  req.n = a.n;
  req.m = a.m;
  req.redundancy = a.redundancy;
  req.seed = a.seed;
  req.random.field = parse_field(a.field);
  req.random.normalize_columns = a.normalize;
  auto frame = construct_frame(req);
  save_frame(frame, a.out);
  std::cout << to_string(frame.family()) << " m=" << frame.m() << " n=" << frame.n()
            << " tight=" << is_tight(frame) << " equiangular=" << is_equiangular(frame) << " coherence=" << coherence(frame)
            << " welch=" << std::sqrt(welch_max_bound(frame.n(), frame.m())) << "\n";
}

struct SampleArgs {
  std::string frame;
  std::int64_t k = 0;
  double bernoulli = -1.0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  std::string out;
};

SelectionMode mode_of(std::int64_t k, double bernoulli) {
  if (bernoulli >= 0.0) return Bernoulli{bernoulli};
  return UniformK{k};
}

void cmd_spectra_sample(const SampleArgs& a) {
  auto frame = load_frame(a.frame);
  auto out = open_out(a.out);
  out << "trial,index,eigenvalue\n";
  for (std::int64_t t = 0; t < a.trials; ++t) {
    auto sel = select(frame.n(), mode_of(a.k, a.bernoulli), derive_seed(a.seed, static_cast<std::uint64_t>(t)));
    auto spec = subset_gram_spectrum(frame, sel);
    for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) out << t << ',' << i << ',' << num(spec.eigenvalues[i]) << "\n";
  }
}

struct DensityArgs {
  double beta = 0.8, gamma = 0.5;
  int grid = 2048;
  std::string out;
};

void cmd_manova_density(const DensityArgs& a) {
  ManovaParams params{a.beta, a.gamma};
  validate(params);
  auto law = manova_law(params);
  const double lo = law.lower_edge(), hi = law.upper_edge();
  auto out = open_out(a.out);
  out << "x,pdf,cdf\n";
  for (int i = 0; i < a.grid; ++i) {
    double x = lo + (hi - lo) * double(i) / double(a.grid - 1);
    out << num(x) << ',' << num(law.density(x)) << ',' << num(law.cdf(x)) << "\n";
  }
  nlohmann::ordered_json side;
  side["beta"] = a.beta;
  side["gamma"] = a.gamma;
  side["r_minus"] = lo;
  side["r_plus"] = hi;
  side["atoms"] = nlohmann::ordered_json::array();
  for (const auto& atom : law.atoms()) side["atoms"].push_back({{"location", atom.location}, {"mass", atom.mass}});
  auto json_out = open_out(a.out + ".atoms.json");
  json_out << side.dump(2) << "\n";
}

struct FunctionalArgs {
  std::string kind = "ac";
  std::string frame;
  std::int64_t k = 0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  double delta = 0.1, alpha = 1.0;
  std::string out;
};

void cmd_functional_eval(const FunctionalArgs& a) {
  auto frame = load_frame(a.frame);
  FunctionalSpec spec{parse_functional(a.kind), a.delta, a.alpha};
  auto out = open_out(a.out);
  out << "trial,value\n";
  double sum = 0.0;
  for (std::int64_t t = 0; t < a.trials; ++t) {
    auto sel = select(frame.n(), UniformK{a.k}, derive_seed(a.seed, static_cast<std::uint64_t>(t)));
    double v = evaluate(spec, subset_gram_spectrum(frame, sel));
    sum += v;
    out << t << ',' << num(v) << "\n";
  }
  ManovaParams params{double(a.k) / double(frame.m()), frame.gamma(), frame.field()};
  std::cout << a.kind << " mean=" << sum / double(a.trials);
  try {
    std::cout << " manova_limit=" << limiting_value(spec, params);
  } catch (const std::domain_error&) {
  }
  std::cout << "\n";
}

struct MomentsArgs {
  int d = 4;
  std::string format = "latex";
  double gamma = 0.5, p = 0.5;
  std::int64_t n = 7;
  std::string frame;
};

void cmd_moments_asymptotic(const MomentsArgs& a) {
  auto poly = asymptotic_moment(a.d);
  if (a.format == "json")
    std::cout << poly.to_json() << "\n";
  else if (a.format == "latex")
    std::cout << poly.to_latex() << "\n";
  else
    throw std::invalid_argument("format must be latex or json");
}

void cmd_moments_ewb(const MomentsArgs& a) {
  std::cout << "bound=" << num(ewb_bound(a.gamma, a.p, a.d, a.n)) << " correction=" << num(ewb_correction(a.gamma, a.p, a.d, a.n))
            << "\n";
}

void cmd_moments_exact(const MomentsArgs& a) {
  auto frame = load_frame(a.frame);
  auto e = exact_expected_moment(frame, a.d);
  for (int k = 1; k <= a.d; ++k) std::cout << "a_" << a.d << "," << k << "=" << num(e.a[k]) << "\n";
  std::cout << "moment(p=" << a.p << ")=" << num(e.evaluate(a.p)) << " ewb=" << num(ewb_bound(frame.gamma(), a.p, a.d, frame.n()))
            << "\n";
}

struct CurveArgs {
  std::string direction = "sc";
  double p = 0.5;
  std::string model = "manova";
  std::string db = "0:60:2";
  bool optimize = false;
  bool grid_scan = false;
  double beta = 0.0;
  std::string out;
};

void cmd_coding_curve(const CurveArgs& a) {
  const auto dir = parse_direction(a.direction);
  AmplificationModel model{parse_amplification(a.model), nullptr, 0, 0};
  if (!a.optimize && a.beta <= 0.0) throw std::invalid_argument("give --beta or --optimize-beta");
  OptimizeOptions opts;
  opts.refine = !a.grid_scan;
  auto out = open_out(a.out);
  out << "y_db,beta_opt,rate,benchmark_rdf,benchmark_si\n";
  for (double db : parse_range(a.db)) {
    const double y = std::pow(10.0, db / 10.0);
    double beta = a.beta, value;
    if (dir == Direction::SourceCoding) {
      if (y <= 1.0) {
        out << num(db) << ",nan,0,0," << num(si_benchmark(a.p)) << "\n";
        continue;
      }
      if (a.optimize) {
        auto o = optimize_beta(dir, a.p, y, model, opts);
        beta = o.beta;
        value = o.value;
      } else {
        value = rate_sc(beta, a.p, y, model).rate;
      }
      const double rdf = 0.5 * a.p * std::log2(y);
      out << num(db) << ',' << num(beta) << ',' << num(value) << ',' << num(rdf) << ',' << num(rdf + si_benchmark(a.p)) << "\n";
    } else {
      if (a.optimize) {
        auto o = optimize_beta(dir, a.p, y, model, opts);
        beta = o.beta;
        value = o.value;
      } else {
        value = capacity_cc(beta, a.p, y, model).capacity;
      }
      out << num(db) << ',' << num(beta) << ',' << num(value) << ',' << num(0.5 * a.p * std::log2(1.0 + y)) << ",nan\n";
    }
  }
}

struct HarnessArgs {
  HarnessConfig config;
  std::string config_file;
  std::string out;
  std::string fits_out;
  bool with_values = false;
};

std::vector<std::int64_t> ladder_of(const HarnessConfig& c, std::int64_t& trials) {
  auto profile = parse_profile(c.profile);
  trials = c.trials > 0 ? c.trials : profile.trials;
  return c.ladder.empty() ? profile.ladder : c.ladder;
}

void report(const std::vector<std::string>& notices) {
  for (const auto& n : notices) std::cerr << "notice: " << n << "\n";
}

void cmd_harness(const HarnessArgs& a, bool test2) {
  HarnessConfig c = a.config;
  c.test = test2 ? "test2" : "test1";
  std::int64_t trials = 0;
  auto ladder = ladder_of(c, trials);
  auto family = parse_experiment_family(c.family);
  family.field = parse_field(c.field);
  auto baseline = ExperimentFamily::manova_ensemble(family.field);
  std::vector<std::string> notices;
  BatchOptions opts{&notices};

  std::vector<ExperimentRecord> fam_records, base_records;
  std::vector<FitResult> fits;
  if (!test2) {
    fam_records = run_ks_batch(family, ladder, c.beta, c.gamma, trials, c.seed, opts);
    base_records = run_ks_batch(baseline, ladder, c.beta, c.gamma, trials, c.seed, opts);
    fits.push_back(fit_power_law(fam_records, Test1Model{}));
    fits.push_back(fit_power_law(base_records, Test1Model{}));
  } else {
    FunctionalSpec spec{parse_functional(c.functional), c.delta, c.alpha};
    fam_records = run_functional_batch(family, ladder, spec, c.beta, c.gamma, trials, c.seed, opts);
    base_records = run_functional_batch(baseline, ladder, spec, c.beta, c.gamma, trials, c.seed, opts);
    auto base_fit = fit_test2_baseline(base_records);
    base_fit.label = baseline.name() + "_baseline";
    const double ratio = test2_ratio(base_fit);
    fits.push_back(fit_power_law(fam_records, Test2Model{ratio}));
    fits.push_back(fit_power_law(base_records, Test2Model{ratio}));
    fits.push_back(base_fit);
  }
  report(notices);
  fits[0].label = family.name();
  fits[1].label = baseline.name();
  const double pval = t_test_equal_slopes(fits[0], fits[1], fits[0].points, fits[1].points);

  std::vector<ExperimentRecord> all = fam_records;
  all.insert(all.end(), base_records.begin(), base_records.end());
  ExportOptions eo;
  eo.config_hash = config_hash(c);
  eo.include_values = a.with_values;
  if (!a.out.empty()) export_records(a.out, all, eo);
  if (!a.fits_out.empty()) export_fits(a.fits_out, fits, eo);

  for (const auto& f : fits)
    std::cout << f.label << " " << f.model << " slope=" << f.slope << " stderr=" << f.stderr_slope << " r2=" << f.r_squared
              << "\n";
  std::cout << "t-test p=" << pval << "\n";
}

void add_harness_options(CLI::App* sub, HarnessArgs& a) {
  auto& c = a.config;
  sub->add_option("--family", c.family, "frame family or manova_ensemble")->capture_default_str();
  sub->add_option("--field", c.field, "real or complex")->capture_default_str();
  sub->add_option("--beta", c.beta)->capture_default_str();
  sub->add_option("--gamma", c.gamma)->capture_default_str();
  sub->add_option("--profile", c.profile, "desk or full")->capture_default_str();
  sub->add_option("--ladder", c.ladder, "sizes, overrides the profile");
  sub->add_option("--trials", c.trials, "overrides the profile");
  sub->add_option("--seed", c.seed)->capture_default_str();
  sub->add_option("--out", a.out, "records (.csv or .json)");
  sub->add_option("--fits", a.fits_out, "fits (.csv or .json)");
  sub->add_flag("--with-values", a.with_values, "json records carry per-trial values");
  sub->add_option("--config", a.config_file, "key = value file, # comments; command line wins");
}

// CLI11 only reads config files for the top-level app, so subcommand files
// are applied here. Keys are long option names without the dashes.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) throw CLI::ConfigError("sections are not supported: " + item.fullname());
    if (item.name == "config") throw CLI::ConfigError("config files cannot nest");
    auto* opt = sub->get_option_no_throw("--" + item.name);
    if (!opt) throw CLI::ConfigError::Extras(item.name);
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"etfspectra: frames, subset spectra and the MANOVA law"};
  app.require_subcommand(1);

  auto* frames = app.add_subcommand("frames", "frame construction");
  frames->require_subcommand(1);
  FramesArgs fa;
  auto* construct = frames->add_subcommand("construct", "build a frame and save it as JSON");
  construct->add_option("--family", fa.family)->required();
  construct->add_option("--n", fa.n);
  construct->add_option("--m", fa.m);
  construct->add_option("--redundancy", fa.redundancy, "alltop bases")->capture_default_str();
  construct->add_option("--seed", fa.seed);
  construct->add_option("--field", fa.field, "gaussian_iid only")->capture_default_str();
  construct->add_flag("--normalize-columns", fa.normalize);
  construct->add_option("--out", fa.out)->required();
  construct->callback([&] { cmd_frames_construct(fa); });

  auto* spectra = app.add_subcommand("spectra", "subset spectra");
  spectra->require_subcommand(1);
  SampleArgs sa;
  auto* sample = spectra->add_subcommand("sample", "eigenvalues of random subset Grams");
  sample->add_option("--frame", sa.frame)->required();
  sample->add_option("--k", sa.k, "uniform subset size");
  sample->add_option("--bernoulli", sa.bernoulli, "Bernoulli keep probability instead of --k");
  sample->add_option("--trials", sa.trials)->capture_default_str();
  sample->add_option("--seed", sa.seed);
  sample->add_option("--out", sa.out)->required();
  sample->callback([&] { cmd_spectra_sample(sa); });

  auto* manova = app.add_subcommand("manova", "limiting law");
  manova->require_subcommand(1);
  DensityArgs da;
  auto* density = manova->add_subcommand("density", "tabulate the density and CDF");
  density->add_option("--beta", da.beta)->capture_default_str();
  density->add_option("--gamma", da.gamma)->capture_default_str();
  density->add_option("--grid", da.grid)->capture_default_str()->check(CLI::Range(2, 1 << 24));
  density->add_option("--out", da.out)->required();
  density->callback([&] { cmd_manova_density(da); });

  auto* functional = app.add_subcommand("functional", "spectral functionals");
  functional->require_subcommand(1);
  FunctionalArgs fna;
  auto* feval = functional->add_subcommand("eval", "evaluate a functional over random subsets");
  feval->add_option("--kind", fna.kind, "rip strip ac shannon max min cond")->capture_default_str();
  feval->add_option("--frame", fna.frame)->required();
  feval->add_option("--k", fna.k)->required();
  feval->add_option("--trials", fna.trials)->capture_default_str();
  feval->add_option("--seed", fna.seed);
  feval->add_option("--delta", fna.delta)->capture_default_str();
  feval->add_option("--alpha", fna.alpha)->capture_default_str();
  feval->add_option("--out", fna.out)->required();
  feval->callback([&] { cmd_functional_eval(fna); });

  auto* moments = app.add_subcommand("moments", "moment polynomials and bounds");
  moments->require_subcommand(1);
  MomentsArgs ma;
  auto* asym = moments->add_subcommand("asymptotic", "limiting moment polynomial");
  asym->add_option("--d", ma.d)->required();
  asym->add_option("--format", ma.format, "latex or json")->capture_default_str();
  asym->callback([&] { cmd_moments_asymptotic(ma); });
  auto* ewb = moments->add_subcommand("ewb", "erasure Welch bound");
  ewb->add_option("--gamma", ma.gamma)->required();
  ewb->add_option("--p", ma.p)->required();
  ewb->add_option("--d", ma.d)->required();
  ewb->add_option("--n", ma.n)->required();
  ewb->callback([&] { cmd_moments_ewb(ma); });
  auto* exact = moments->add_subcommand("exact", "exact expected moment of a saved frame");
  exact->add_option("--frame", ma.frame)->required();
  exact->add_option("--d", ma.d)->required();
  exact->add_option("--p", ma.p)->capture_default_str();
  exact->callback([&] { cmd_moments_exact(ma); });

  auto* coding = app.add_subcommand("coding", "analog erasure coding");
  coding->require_subcommand(1);
  CurveArgs ca;
  auto* curve = coding->add_subcommand("curve", "rate or capacity against SDR/SNR in dB");
  curve->add_option("--direction", ca.direction, "sc or cc")->capture_default_str();
  curve->add_option("--p", ca.p)->capture_default_str();
  curve->add_option("--model", ca.model, "mp or manova")->capture_default_str();
  curve->add_option("--sdr-db", ca.db, "start:stop:step")->capture_default_str();
  curve->add_flag("--optimize-beta", ca.optimize);
  curve->add_flag("--grid-scan", ca.grid_scan, "skip the Brent refinement");
  curve->add_option("--beta", ca.beta, "fixed beta when not optimizing");
  curve->add_option("--out", ca.out)->required();
  curve->callback([&] { cmd_coding_curve(ca); });

  auto* harness = app.add_subcommand("harness", "Monte Carlo convergence experiments");
  harness->require_subcommand(1);
  HarnessArgs h1, h2;
  auto* test1 = harness->add_subcommand("test1", "KS variance exponent against the ensemble baseline");
  add_harness_options(test1, h1);
  test1->callback([&] {
    apply_config(test1, h1.config_file);
    cmd_harness(h1, false);
  });
  auto* test2 = harness->add_subcommand("test2", "functional convergence exponent");
  add_harness_options(test2, h2);
  test2->add_option("--functional", h2.config.functional)->capture_default_str();
  test2->add_option("--alpha", h2.config.alpha)->capture_default_str();
  test2->add_option("--delta", h2.config.delta)->capture_default_str();
  test2->callback([&] {
    apply_config(test2, h2.config_file);
    cmd_harness(h2, true);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

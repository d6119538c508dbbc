#include "etfspectra/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "etfspectra/manova.hpp"
#include "etfspectra/parallel.hpp"
#include "etfspectra/random.hpp"
#include "etfspectra/spectra.hpp"

namespace etfs {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// CDF of a law tabulated on x = lo + (hi - lo) sin^2(theta), linear in theta.
// Quadrature per eigenvalue is too slow for batches of thousands of spectra.
class TabulatedCdf {
 public:
  TabulatedCdf(const SpectralLaw& law, int points) : lo_(law.lower_edge()), hi_(law.upper_edge()), atoms_(law.atoms()) {
    table_.resize(points + 1);
    for (int i = 0; i <= points; ++i) {
      double theta = 0.5 * std::numbers::pi * double(i) / double(points);
      double s = std::sin(theta);
      double x = lo_ + (hi_ - lo_) * s * s;
      double c = law.cdf(x);
      for (const auto& a : atoms_)
        if (a.counted_in_cdf(x)) c -= a.mass;
      table_[i] = c;
    }
    // enforce monotonicity against quadrature noise
    for (int i = 1; i <= points; ++i) table_[i] = std::max(table_[i], table_[i - 1]);
  }

  double continuous(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return table_.back();
    double theta = std::asin(std::sqrt((x - lo_) / (hi_ - lo_)));
    double pos = theta / (0.5 * std::numbers::pi) * double(table_.size() - 1);
    auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= table_.size()) return table_.back();
    double f = pos - double(i);
    return table_[i] + f * (table_[i + 1] - table_[i]);
  }

  double value(double x) const {
    double c = continuous(x);
    for (const auto& a : atoms_)
      if (a.counted_in_cdf(x)) c += a.mass;
    return c;
  }

  double left_limit(double x) const {
    double c = continuous(x);
    for (const auto& a : atoms_)
      if (a.counted_in_left_limit(x)) c += a.mass;
    return c;
  }

 private:
  double lo_, hi_;
  std::vector<Atom> atoms_;
  std::vector<double> table_;
};

struct Rung {
  RungSize size;
  std::shared_ptr<const FrameMatrix> frame;  // null for the ensemble
};

std::optional<Rung> make_rung(const ExperimentFamily& family, std::int64_t n, double beta, double gamma,
                              std::uint64_t seed, std::vector<std::string>* notices) {
  if (!family.frame) {
    auto m = static_cast<std::int64_t>(std::floor(gamma * double(n) + 1e-9));
    auto k = static_cast<std::int64_t>(std::llround(beta * double(m)));
    if (m < 1 || m >= n || k < 1) {
      if (notices) notices->push_back("manova_ensemble: no valid sizes at n=" + std::to_string(n));
      return std::nullopt;
    }
    return Rung{{n, m, k}, nullptr};
  }
  std::string notice;
  auto frame = ladder_frame(family, n, gamma, seed, &notice);
  if (!frame) {
    if (notices) notices->push_back(notice);
    return std::nullopt;
  }
  auto m = static_cast<std::int64_t>(frame->m());
  auto k = static_cast<std::int64_t>(std::llround(beta * double(m)));
  if (k < 1 || k > frame->n()) {
    if (notices) notices->push_back(family.name() + ": subset size out of range at n=" + std::to_string(n));
    return std::nullopt;
  }
  RungSize size{static_cast<std::int64_t>(frame->n()), m, k};
  return Rung{size, std::make_shared<const FrameMatrix>(std::move(*frame))};
}

void summarize(ExperimentRecord& rec) {
  const double t = double(rec.values.size());
  double sum = 0.0, sq = 0.0;
  for (double v : rec.values) {
    sum += v;
    sq += v * v;
  }
  rec.mean = sum / t;
  rec.mean_square = sq / t;
  double var = 0.0;
  for (double v : rec.values) var += (v - rec.mean) * (v - rec.mean);
  rec.variance = var / (t - 1.0);
}

// Subset spectrum for one trial, from the frame or the ensemble.
SubsetSpectrum trial_spectrum(const ExperimentFamily& family, const Rung& rung, std::uint64_t seed) {
  if (rung.frame) return subset_gram_spectrum(*rung.frame, select(rung.size.n, UniformK{rung.size.k}, seed));
  return sample_manova_ensemble(rung.size.n, rung.size.m, rung.size.k, family.field, seed);
}

ExperimentRecord base_record(const ExperimentFamily& family, const Rung& rung, std::int64_t trials,
                             std::uint64_t seed, std::string statistic) {
  ExperimentRecord rec;
  rec.family = family.name();
  rec.field = std::string(to_string(rung.frame ? rung.frame->field() : family.field));
  rec.statistic = std::move(statistic);
  rec.n = rung.size.n;
  rec.m = rung.size.m;
  rec.k = rung.size.k;
  rec.beta = double(rec.k) / double(rec.m);
  rec.gamma = double(rec.m) / double(rec.n);
  rec.trials = trials;
  rec.seed = seed;
  rec.values.assign(trials, 0.0);
  return rec;
}

FitResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int slope_col) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n < 3) throw std::invalid_argument("a power-law fit needs at least 3 points");
  if (n <= p) throw std::invalid_argument("not enough points for the regressors");
  Eigen::VectorXd coef = x.colPivHouseholderQr().solve(y);
  Eigen::VectorXd resid = y - x * coef;
  const double rss = resid.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  const double sigma2 = rss / double(n - p);
  Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();

  FitResult fit;
  fit.slope = coef(slope_col);
  fit.intercept = coef(0);
  fit.stderr_slope = std::sqrt(std::max(0.0, cov(slope_col, slope_col)));
  fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
  fit.residuals.assign(resid.data(), resid.data() + n);
  fit.points = n;
  return fit;
}

void check_records(const std::vector<ExperimentRecord>& records) {
  if (records.size() < 3) throw std::invalid_argument("a power-law fit needs at least 3 points");
}

void write_header(std::ostream& out, const char* kind, const ExportOptions& options) {
  out << "# etfspectra-" << kind << " version=" << kExportVersion << " config_hash=" << fmt_hash(options.config_hash)
      << "\n";
}

void read_header(std::istream& in, const char* kind, int& version, std::uint64_t& hash) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty export file");
  const std::string prefix = std::string("# etfspectra-") + kind + " version=";
  if (line.rfind(prefix, 0) != 0) throw std::runtime_error("not an etfspectra " + std::string(kind) + " file");
  auto rest = line.substr(prefix.size());
  auto sp = rest.find(" config_hash=");
  if (sp == std::string::npos) throw std::runtime_error("missing config hash");
  version = std::stoi(rest.substr(0, sp));
  hash = std::stoull(rest.substr(sp + 13), nullptr, 16);
  if (version != kExportVersion) throw std::runtime_error("unsupported export version");
}

const char* kRecordColumns[] = {"family", "field", "statistic", "n",           "m",     "k",
                                "beta",   "gamma", "trials",    "seed",        "mean",  "variance",
                                "mean_square", "limit", "raw_mean"};
const char* kFitColumns[] = {"label", "model", "slope", "intercept", "stderr_slope", "r_squared", "points",
                             "loglog_coefficient"};

}  // namespace

std::string ExperimentFamily::name() const {
  return frame ? std::string(to_string(*frame)) : std::string("manova_ensemble");
}

ExperimentFamily parse_experiment_family(std::string_view name) {
  if (name == "manova_ensemble") return ExperimentFamily::manova_ensemble();
  return ExperimentFamily::of(parse_family(name));
}

Profile desk_profile() { return {"desk", {103, 211, 431, 863}, 200}; }
Profile full_profile() { return {"full", {103, 211, 431, 863, 1031, 2003}, 10000}; }

Profile parse_profile(std::string_view name) {
  if (name == "desk") return desk_profile();
  if (name == "full") return full_profile();
  throw std::invalid_argument("unknown profile: " + std::string(name));
}

std::optional<FrameMatrix> ladder_frame(const ExperimentFamily& family, std::int64_t n, double gamma,
                                        std::uint64_t seed, std::string* notice) {
  if (!family.frame) throw std::invalid_argument("the manova ensemble has no frame");
  FrameRequest req;
  req.family = *family.frame;
  req.n = n;
  req.m = static_cast<std::int64_t>(std::floor(gamma * double(n) + 1e-9));
  req.seed = derive_seed(seed, label_hash(family.name()), static_cast<std::uint64_t>(n));
  req.random.field = family.field;
  switch (req.family) {
    case FrameFamily::SpikesSines:
    case FrameFamily::SpikesHadamard: req.m = n / 2; break;
    case FrameFamily::Alltop:
      req.redundancy = req.m > 0 ? std::llround(double(n) / double(req.m)) : 0;
      if (req.m <= 0 || req.redundancy * req.m != n) {
        if (notice) *notice = "alltop: n=" + std::to_string(n) + " is not a multiple of a prime m";
        return std::nullopt;
      }
      break;
    default: break;
  }
  try {
    return construct_frame(req);
  } catch (const std::invalid_argument& e) {
    if (notice) *notice = family.name() + ": skipped n=" + std::to_string(n) + " (" + e.what() + ")";
    return std::nullopt;
  }
}

std::vector<ExperimentRecord> run_ks_batch(const ExperimentFamily& family, const std::vector<std::int64_t>& ladder,
                                           double beta, double gamma, std::int64_t trials, std::uint64_t seed,
                                           const BatchOptions& options) {
  if (trials < 2) throw std::invalid_argument("variance records need at least 2 trials");
  const std::uint64_t stream = label_hash(family.name() + "/ks");
  std::vector<ExperimentRecord> out;
  for (auto n : ladder) {
    auto rung = make_rung(family, n, beta, gamma, seed, options.notices);
    if (!rung) continue;
    const auto start = Clock::now();
    auto rec = base_record(family, *rung, trials, seed, "ks");
    ManovaParams params{rec.beta, rec.gamma, family.field};
    TabulatedCdf table(manova_nonzero_law(params), 4096);
    ReferenceCdf ref{[&table](double x) { return table.value(x); },
                     [&table](double x) { return table.left_limit(x); }};
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      auto spec = trial_spectrum(family, *rung, derive_seed(seed, stream, static_cast<std::uint64_t>(n), t));
      rec.values[t] = ks_distance(spec, ref);
    });
    summarize(rec);
    rec.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ExperimentRecord> run_functional_batch(const ExperimentFamily& family,
                                                   const std::vector<std::int64_t>& ladder,
                                                   const FunctionalSpec& functional, double beta, double gamma,
                                                   std::int64_t trials, std::uint64_t seed,
                                                   const BatchOptions& options) {
  validate(functional);
  if (trials < 2) throw std::invalid_argument("variance records need at least 2 trials");
  const std::string statistic(to_string(functional.kind));
  const std::uint64_t stream = label_hash(family.name() + "/" + statistic);
  std::vector<ExperimentRecord> out;
  for (auto n : ladder) {
    auto rung = make_rung(family, n, beta, gamma, seed, options.notices);
    if (!rung) continue;
    const auto start = Clock::now();
    auto rec = base_record(family, *rung, trials, seed, statistic);
    rec.limit = limiting_value(functional, ManovaParams{rec.beta, rec.gamma, family.field});
    std::vector<double> raw(trials);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      auto spec = trial_spectrum(family, *rung, derive_seed(seed, stream, static_cast<std::uint64_t>(n), t));
      raw[t] = evaluate(functional, spec);
      const double d = raw[t] - rec.limit;
      rec.values[t] = d * d;
    });
    double s = 0.0;
    for (double v : raw) s += v;
    rec.raw_mean = s / double(trials);
    summarize(rec);
    rec.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    out.push_back(std::move(rec));
  }
  return out;
}

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    b(i) = y[i];
  }
  return ols(a, b, 1);
}

FitResult fit_power_law(const std::vector<ExperimentRecord>& records, const Test1Model&) {
  check_records(records);
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.trials < 2 || !(r.variance > 0.0)) throw std::invalid_argument("test 1 needs a positive variance");
    x.push_back(std::log(double(r.n)));
    y.push_back(-0.5 * std::log(r.variance));
  }
  auto fit = fit_line(x, y);
  fit.model = "test1";
  return fit;
}

FitResult fit_power_law(const std::vector<ExperimentRecord>& records, const Test2Model& model) {
  check_records(records);
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (!(r.mean > 0.0)) throw std::invalid_argument("test 2 needs a positive mean");
    const double ln = std::log(double(r.n));
    x.push_back(ln + model.a0_b0_ratio * std::log(ln));
    y.push_back(-std::log(r.mean));
  }
  auto fit = fit_line(x, y);
  fit.model = "test2";
  return fit;
}

FitResult fit_test2_baseline(const std::vector<ExperimentRecord>& records) {
  check_records(records);
  const auto n = static_cast<Eigen::Index>(records.size());
  if (n < 4) throw std::invalid_argument("the test 2 baseline needs at least 4 points");
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[i];
    if (!(r.mean > 0.0)) throw std::invalid_argument("test 2 needs a positive mean");
    const double ln = std::log(double(r.n));
    a(i, 0) = 1.0;
    a(i, 1) = ln;
    a(i, 2) = std::log(ln);
    b(i) = -std::log(r.mean);
  }
  auto fit = ols(a, b, 1);
  Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  fit.loglog_coefficient = coef(2);
  fit.model = "test2_baseline";
  return fit;
}

double test2_ratio(const FitResult& baseline) {
  if (!baseline.loglog_coefficient) throw std::invalid_argument("not a test 2 baseline fit");
  if (baseline.slope == 0.0) throw std::domain_error("baseline slope is zero");
  return *baseline.loglog_coefficient / baseline.slope;
}

double t_test_equal_slopes(const FitResult& a, const FitResult& b, std::int64_t n_a, std::int64_t n_b) {
  const std::int64_t dof = n_a + n_b - 4;
  if (dof <= 0) throw std::invalid_argument("t-test needs N_a + N_b > 4");
  const double se = std::sqrt(a.stderr_slope * a.stderr_slope + b.stderr_slope * b.stderr_slope);
  const double diff = a.slope - b.slope;
  if (diff == 0.0) return 1.0;
  if (se == 0.0) return 0.0;
  const double t = std::abs(diff) / se;
  boost::math::students_t dist(static_cast<double>(dof));
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

std::string canonical_string(const HarnessConfig& c) {
  std::ostringstream s;
  s << "test=" << c.test << "\nfamily=" << c.family << "\nfield=" << c.field << "\nfunctional=" << c.functional
    << "\nalpha=" << fmt_double(c.alpha) << "\ndelta=" << fmt_double(c.delta) << "\nbeta=" << fmt_double(c.beta)
    << "\ngamma=" << fmt_double(c.gamma) << "\nprofile=" << c.profile << "\nladder=";
  for (std::size_t i = 0; i < c.ladder.size(); ++i) s << (i ? "," : "") << c.ladder[i];
  s << "\ntrials=" << c.trials << "\nseed=" << c.seed << "\n";
  return s.str();
}

std::uint64_t config_hash(const HarnessConfig& config) { return label_hash(canonical_string(config)); }

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records,
                       const ExportOptions& options) {
  write_header(out, "records", options);
  bool first = true;
  for (const char* c : kRecordColumns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  if (options.include_wall_time) out << ",wall_time";
  out << "\n";
  for (const auto& r : records) {
    out << r.family << ',' << r.field << ',' << r.statistic << ',' << r.n << ',' << r.m << ',' << r.k << ','
        << fmt_double(r.beta) << ',' << fmt_double(r.gamma) << ',' << r.trials << ',' << r.seed << ','
        << fmt_double(r.mean) << ',' << fmt_double(r.variance) << ',' << fmt_double(r.mean_square) << ','
        << fmt_double(r.limit) << ',' << fmt_double(r.raw_mean);
    if (options.include_wall_time) out << ',' << fmt_double(r.wall_time);
    out << "\n";
  }
}

RecordsFile read_records_csv(std::istream& in) {
  RecordsFile file;
  read_header(in, "records", file.version, file.config_hash);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("missing column header");
  const bool has_wall = split(line, ',').size() == std::size(kRecordColumns) + 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != std::size(kRecordColumns) + (has_wall ? 1 : 0)) throw std::runtime_error("bad record row");
    ExperimentRecord r;
    r.family = f[0];
    r.field = f[1];
    r.statistic = f[2];
    r.n = std::stoll(f[3]);
    r.m = std::stoll(f[4]);
    r.k = std::stoll(f[5]);
    r.beta = std::stod(f[6]);
    r.gamma = std::stod(f[7]);
    r.trials = std::stoll(f[8]);
    r.seed = std::stoull(f[9]);
    r.mean = std::stod(f[10]);
    r.variance = std::stod(f[11]);
    r.mean_square = std::stod(f[12]);
    r.limit = std::stod(f[13]);
    r.raw_mean = std::stod(f[14]);
    if (has_wall) r.wall_time = std::stod(f[15]);
    file.records.push_back(std::move(r));
  }
  return file;
}

void write_records_json(std::ostream& out, const std::vector<ExperimentRecord>& records,
                        const ExportOptions& options) {
  nlohmann::ordered_json doc;
  doc["format"] = "etfspectra-records";
  doc["version"] = kExportVersion;
  doc["config_hash"] = fmt_hash(options.config_hash);
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["family"] = r.family;
    j["field"] = r.field;
    j["statistic"] = r.statistic;
    j["n"] = r.n;
    j["m"] = r.m;
    j["k"] = r.k;
    j["beta"] = r.beta;
    j["gamma"] = r.gamma;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["mean"] = r.mean;
    j["variance"] = r.variance;
    j["mean_square"] = r.mean_square;
    j["limit"] = r.limit;
    j["raw_mean"] = r.raw_mean;
    if (options.include_wall_time) j["wall_time"] = r.wall_time;
    if (options.include_values) j["values"] = r.values;
    doc["records"].push_back(std::move(j));
  }
  out << doc.dump(2) << "\n";
}

RecordsFile read_records_json(std::istream& in) {
  auto doc = nlohmann::json::parse(in);
  if (doc.value("format", "") != "etfspectra-records") throw std::runtime_error("not an etfspectra records file");
  RecordsFile file;
  file.version = doc.at("version").get<int>();
  if (file.version != kExportVersion) throw std::runtime_error("unsupported export version");
  file.config_hash = std::stoull(doc.at("config_hash").get<std::string>(), nullptr, 16);
  for (const auto& j : doc.at("records")) {
    ExperimentRecord r;
    r.family = j.at("family").get<std::string>();
    r.field = j.at("field").get<std::string>();
    r.statistic = j.at("statistic").get<std::string>();
    r.n = j.at("n").get<std::int64_t>();
    r.m = j.at("m").get<std::int64_t>();
    r.k = j.at("k").get<std::int64_t>();
    r.beta = j.at("beta").get<double>();
    r.gamma = j.at("gamma").get<double>();
    r.trials = j.at("trials").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mean = j.at("mean").get<double>();
    r.variance = j.at("variance").get<double>();
    r.mean_square = j.at("mean_square").get<double>();
    r.limit = j.at("limit").get<double>();
    r.raw_mean = j.at("raw_mean").get<double>();
    if (j.contains("wall_time")) r.wall_time = j["wall_time"].get<double>();
    if (j.contains("values")) r.values = j["values"].get<std::vector<double>>();
    file.records.push_back(std::move(r));
  }
  return file;
}

void write_fits_csv(std::ostream& out, const std::vector<FitResult>& fits, const ExportOptions& options) {
  write_header(out, "fits", options);
  bool first = true;
  for (const char* c : kFitColumns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << "\n";
  for (const auto& f : fits) {
    if (f.label.find(',') != std::string::npos) throw std::invalid_argument("fit labels cannot contain commas");
    out << f.label << ',' << f.model << ',' << fmt_double(f.slope) << ',' << fmt_double(f.intercept) << ','
        << fmt_double(f.stderr_slope) << ',' << fmt_double(f.r_squared) << ',' << f.points << ','
        << (f.loglog_coefficient ? fmt_double(*f.loglog_coefficient) : "") << "\n";
  }
}

FitsFile read_fits_csv(std::istream& in) {
  FitsFile file;
  read_header(in, "fits", file.version, file.config_hash);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != std::size(kFitColumns)) throw std::runtime_error("bad fit row");
    FitResult r;
    r.label = f[0];
    r.model = f[1];
    r.slope = std::stod(f[2]);
    r.intercept = std::stod(f[3]);
    r.stderr_slope = std::stod(f[4]);
    r.r_squared = std::stod(f[5]);
    r.points = std::stoll(f[6]);
    if (!f[7].empty()) r.loglog_coefficient = std::stod(f[7]);
    file.fits.push_back(std::move(r));
  }
  return file;
}

void write_fits_json(std::ostream& out, const std::vector<FitResult>& fits, const ExportOptions& options) {
  nlohmann::ordered_json doc;
  doc["format"] = "etfspectra-fits";
  doc["version"] = kExportVersion;
  doc["config_hash"] = fmt_hash(options.config_hash);
  doc["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    nlohmann::ordered_json j;
    j["label"] = f.label;
    j["model"] = f.model;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["stderr_slope"] = f.stderr_slope;
    j["r_squared"] = f.r_squared;
    j["points"] = f.points;
    j["loglog_coefficient"] = f.loglog_coefficient ? nlohmann::ordered_json(*f.loglog_coefficient) : nullptr;
    j["residuals"] = f.residuals;
    doc["fits"].push_back(std::move(j));
  }
  out << doc.dump(2) << "\n";
}

FitsFile read_fits_json(std::istream& in) {
  auto doc = nlohmann::json::parse(in);
  if (doc.value("format", "") != "etfspectra-fits") throw std::runtime_error("not an etfspectra fits file");
  FitsFile file;
  file.version = doc.at("version").get<int>();
  if (file.version != kExportVersion) throw std::runtime_error("unsupported export version");
  file.config_hash = std::stoull(doc.at("config_hash").get<std::string>(), nullptr, 16);
  for (const auto& j : doc.at("fits")) {
    FitResult f;
    f.label = j.at("label").get<std::string>();
    f.model = j.at("model").get<std::string>();
    f.slope = j.at("slope").get<double>();
    f.intercept = j.at("intercept").get<double>();
    f.stderr_slope = j.at("stderr_slope").get<double>();
    f.r_squared = j.at("r_squared").get<double>();
    f.points = j.at("points").get<std::int64_t>();
    if (!j.at("loglog_coefficient").is_null()) f.loglog_coefficient = j["loglog_coefficient"].get<double>();
    f.residuals = j.at("residuals").get<std::vector<double>>();
    file.fits.push_back(std::move(f));
  }
  return file;
}

namespace {
bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}
std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}
}  // namespace

void export_records(const std::string& path, const std::vector<ExperimentRecord>& records,
                    const ExportOptions& options) {
  auto out = open_out(path);
  if (is_json_path(path))
    write_records_json(out, records, options);
  else
    write_records_csv(out, records, options);
}

void export_fits(const std::string& path, const std::vector<FitResult>& fits, const ExportOptions& options) {
  auto out = open_out(path);
  if (is_json_path(path))
    write_fits_json(out, fits, options);
  else
    write_fits_csv(out, fits, options);
}

}  // namespace etfs

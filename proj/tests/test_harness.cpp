#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "etfspectra/harness.hpp"
#include "etfspectra/manova.hpp"
#include "etfspectra/spectra.hpp"
#include "oracles.hpp"

using namespace etfs;

namespace {

ExperimentRecord synthetic(std::int64_t n, double mean, double variance) {
  ExperimentRecord r;
  r.family = "dss";
  r.field = "complex";
  r.statistic = "ks";
  r.n = n;
  r.trials = 10;
  r.mean = mean;
  r.variance = variance;
  return r;
}

FitResult fit_with(double slope, double stderr_slope) {
  FitResult f;
  f.slope = slope;
  f.stderr_slope = stderr_slope;
  return f;
}

std::vector<std::int64_t> desk_ladder() { return desk_profile().ladder; }

}  // namespace

TEST_CASE("test 1 fit recovers a planted exponent") {
  std::vector<ExperimentRecord> recs;
  for (std::int64_t n : {103, 211, 431, 863, 1031}) {
    const double sd = 2.5 * std::pow(double(n), -0.93);
    recs.push_back(synthetic(n, 1.0, sd * sd));
  }
  auto fit = fit_power_law(recs, Test1Model{});
  CHECK(fit.slope == doctest::Approx(0.93).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(-std::log(2.5)).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.points == 5);
  for (double r : fit.residuals) CHECK(std::abs(r) < 1e-10);
  CHECK(fit.model == "test1");
}

TEST_CASE("test 2 fit recovers exponent and log-log ratio") {
  // planted mean c n^-a (log n)^-b
  const double a = 0.7, b = 1.3, c = 0.4;
  std::vector<ExperimentRecord> recs;
  for (std::int64_t n : {103, 211, 431, 863, 2003}) {
    const double ln = std::log(double(n));
    recs.push_back(synthetic(n, c * std::pow(double(n), -a) * std::pow(ln, -b), 1.0));
  }
  auto base = fit_test2_baseline(recs);
  CHECK(base.slope == doctest::Approx(a).epsilon(1e-9));
  REQUIRE(base.loglog_coefficient);
  CHECK(*base.loglog_coefficient == doctest::Approx(b).epsilon(1e-8));
  const double ratio = test2_ratio(base);
  CHECK(ratio == doctest::Approx(b / a).epsilon(1e-8));
  auto fit = fit_power_law(recs, Test2Model{ratio});
  CHECK(fit.slope == doctest::Approx(a).epsilon(1e-8));
  CHECK(fit.r_squared == doctest::Approx(1.0));

  std::vector<ExperimentRecord> three(recs.begin(), recs.begin() + 3);
  CHECK_THROWS_AS(fit_test2_baseline(three), std::invalid_argument);
  CHECK_THROWS_AS(test2_ratio(fit), std::invalid_argument);
}

TEST_CASE("fit validation") {
  std::vector<ExperimentRecord> two{synthetic(103, 1, 1), synthetic(211, 1, 0.5)};
  CHECK_THROWS_AS(fit_power_law(two, Test1Model{}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1, 2, 3}, {1, 2}), std::invalid_argument);
  auto noisy = fit_line({1, 2, 3, 4}, {1, -3, 2, 0.5});
  CHECK(noisy.r_squared >= 0.0);
  CHECK(noisy.r_squared <= 1.0);
  // by hand: x mean 2.5, Sxx = 5, Sxy = 1.75
  CHECK(noisy.slope == doctest::Approx(0.35));
}

TEST_CASE("equal-slope t-test") {
  CHECK(t_test_equal_slopes(fit_with(0.9, 0.1), fit_with(0.9, 0.2), 4, 4) == 1.0);
  CHECK(t_test_equal_slopes(fit_with(0.9, 0.0), fit_with(0.5, 0.0), 4, 4) == 0.0);
  CHECK_THROWS_AS(t_test_equal_slopes(fit_with(1, 1), fit_with(0, 1), 2, 2), std::invalid_argument);

  // dof = 2 has the closed form 1 - t / sqrt(t^2 + 2)
  for (double t : {0.3, 1.0, 2.5, 7.0}) {
    const double p = t_test_equal_slopes(fit_with(t, 1.0), fit_with(0.0, 0.0), 3, 3);
    CHECK(p == doctest::Approx(1 - t / std::sqrt(t * t + 2)).epsilon(1e-10));
  }
  CHECK(t_test_equal_slopes(fit_with(4.303, 1.0), fit_with(0.0, 0.0), 3, 3) == doctest::Approx(0.05).epsilon(1e-3));

  for (int dof : {4, 8, 16})
    for (double t : {0.5, 2.0, 3.5}) {
      const double p = t_test_equal_slopes(fit_with(t * std::sqrt(2.0), 1.0), fit_with(0.0, 1.0), dof / 2 + 2, dof / 2 + 2);
      CHECK(p == doctest::Approx(oracle::t_two_sided(t, dof)).epsilon(1e-7));
    }
}

TEST_CASE("batches need two trials") {
  CHECK_THROWS_AS(run_ks_batch(ExperimentFamily::of(FrameFamily::DSS), {103}, 0.8, 0.5, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_functional_batch(ExperimentFamily::of(FrameFamily::DSS), {103}, {FunctionalKind::AC}, 0.8, 0.5, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("ks means shrink along the desk ladder") {
  for (auto family : {ExperimentFamily::of(FrameFamily::DSS), ExperimentFamily::manova_ensemble()}) {
    auto recs = run_ks_batch(family, desk_ladder(), 0.8, 0.5, 30, 7);
    REQUIRE(recs.size() == 4);
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].mean < recs[i - 1].mean);
    for (const auto& r : recs) {
      CHECK(r.k == std::llround(0.8 * double(r.m)));
      CHECK(r.values.size() == 30);
      CHECK(r.variance > 0.0);
      CHECK(r.mean_square == doctest::Approx(r.variance * 29.0 / 30.0 + r.mean * r.mean));
    }
  }
}

TEST_CASE("undefined sizes are skipped with a notice") {
  std::vector<std::string> notices;
  BatchOptions opts{&notices};
  auto recs = run_ks_batch(ExperimentFamily::of(FrameFamily::SpikesHadamard), {64, 100, 128}, 0.5, 0.5, 3, 1, opts);
  CHECK(recs.size() == 2);
  CHECK(notices.size() == 1);

  notices.clear();
  auto alltop = run_ks_batch(ExperimentFamily::of(FrameFamily::Alltop), {22, 25, 24}, 0.5, 0.5, 3, 1, opts);
  CHECK(alltop.size() == 1);
  CHECK(alltop[0].m == 11);
  CHECK(notices.size() == 2);
}

TEST_CASE("functional batches track the limit") {
  auto recs = run_functional_batch(ExperimentFamily::of(FrameFamily::DSS), {103, 431, 863}, {FunctionalKind::Shannon},
                                   0.8, 0.5, 20, 3);
  REQUIRE(recs.size() == 3);
  for (const auto& r : recs) {
    CHECK(r.statistic == "shannon");
    CHECK(r.limit == doctest::Approx(limiting_value({FunctionalKind::Shannon}, ManovaParams{r.beta, r.gamma})));
    CHECK(std::abs(r.raw_mean - r.limit) < 0.02);
  }
  CHECK(recs[2].mean < recs[0].mean);
}

TEST_CASE("a repeated identity never reaches the law") {
  // [I I] subsets: eigenvalues are 1 or 2 (plus zeros), far from the continuous law
  double worst_small = 0.0, worst_large = 0.0;
  for (std::int64_t m : {50, 400}) {
    Eigen::MatrixXcd e(m, 2 * m);
    e << Eigen::MatrixXcd::Identity(m, m), Eigen::MatrixXcd::Identity(m, m);
    FrameMatrix twice(e, FrameFamily::LowPassDFT, Field::Real);
    auto law = manova_nonzero_law({0.8, 0.5});
    double mean = 0.0;
    for (int t = 0; t < 5; ++t) {
      auto spec = subset_gram_spectrum(twice, select(2 * m, UniformK{std::llround(0.8 * double(m))}, t));
      mean += ks_distance(spec, law.as_reference()) / 5;
    }
    (m == 50 ? worst_small : worst_large) = mean;
  }
  CHECK(worst_small > 0.1);
  CHECK(worst_large > 0.1);
  CHECK(worst_large > 0.8 * worst_small);
}

TEST_CASE("edges of dss subsets approach the support") {
  auto f = construct_dss(499);
  const std::int64_t k = std::llround(0.8 * double(f.m()));
  ManovaParams params{double(k) / double(f.m()), f.gamma()};
  auto edges = manova_edges(params);
  std::vector<double> hi, lo;
  for (int t = 0; t < 200; ++t) {
    auto spec = subset_gram_spectrum(f, select(f.n(), UniformK{k}, 1000 + t));
    hi.push_back(spec.eigenvalues.back());
    lo.push_back(spec.eigenvalues.front());
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  CHECK(std::abs(median(hi) - edges.r_plus) < 0.05);
  CHECK(std::abs(median(lo) - edges.r_minus) < 0.05);
}

TEST_CASE("results do not depend on the worker count") {
  auto run = [] {
    return run_ks_batch(ExperimentFamily::of(FrameFamily::DSS), {103, 211}, 0.8, 0.5, 12, 99);
  };
  setenv("ETFSPECTRA_THREADS", "1", 1);
  auto serial = run();
  setenv("ETFSPECTRA_THREADS", "5", 1);
  auto threaded = run();
  unsetenv("ETFSPECTRA_THREADS");
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].values == threaded[i].values);
}

TEST_CASE("record export round trips") {
  auto recs = run_ks_batch(ExperimentFamily::of(FrameFamily::DSS), {103, 211, 431}, 0.8, 0.5, 4, 5);
  HarnessConfig cfg;
  ExportOptions opts{config_hash(cfg)};

  std::stringstream csv;
  write_records_csv(csv, recs, opts);
  CHECK(csv.str().rfind("# etfspectra-records version=1 config_hash=", 0) == 0);
  CHECK(csv.str().find("wall_time") == std::string::npos);
  auto back = read_records_csv(csv);
  CHECK(back.version == 1);
  CHECK(back.config_hash == opts.config_hash);
  REQUIRE(back.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.records[i].n == recs[i].n);
    CHECK(back.records[i].k == recs[i].k);
    CHECK(back.records[i].mean == recs[i].mean);
    CHECK(back.records[i].variance == recs[i].variance);
    CHECK(back.records[i].seed == recs[i].seed);
  }

  ExportOptions with_values = opts;
  with_values.include_values = true;
  std::stringstream json;
  write_records_json(json, recs, with_values);
  auto jback = read_records_json(json);
  REQUIRE(jback.records.size() == 3);
  CHECK(jback.records[1].values == recs[1].values);
  CHECK(jback.records[2].beta == recs[2].beta);

  // same input, same bytes
  std::stringstream again;
  write_records_csv(again, recs, opts);
  std::stringstream first;
  write_records_csv(first, recs, opts);
  CHECK(again.str() == first.str());

  ExportOptions timed = opts;
  timed.include_wall_time = true;
  std::stringstream t;
  write_records_csv(t, recs, timed);
  CHECK(t.str().find("wall_time") != std::string::npos);

  std::stringstream bad("# etfspectra-records version=9 config_hash=0000000000000000\n");
  CHECK_THROWS(read_records_csv(bad));
}

TEST_CASE("fit export round trips") {
  std::vector<FitResult> fits{fit_line({1, 2, 3, 4}, {1, -3, 2, 0.5})};
  fits[0].label = "dss";
  fits[0].model = "test1";
  FitResult base = fits[0];
  base.loglog_coefficient = 0.25;
  base.model = "test2_baseline";
  fits.push_back(base);
  ExportOptions opts{42};
  for (int json = 0; json < 2; ++json) {
    std::stringstream s;
    json ? write_fits_json(s, fits, opts) : write_fits_csv(s, fits, opts);
    auto back = json ? read_fits_json(s) : read_fits_csv(s);
    CHECK(back.config_hash == 42);
    REQUIRE(back.fits.size() == 2);
    CHECK(back.fits[0].slope == fits[0].slope);
    CHECK(back.fits[0].stderr_slope == fits[0].stderr_slope);
    CHECK(back.fits[0].label == "dss");
    CHECK_FALSE(back.fits[0].loglog_coefficient);
    REQUIRE(back.fits[1].loglog_coefficient);
    CHECK(*back.fits[1].loglog_coefficient == 0.25);
  }
}

TEST_CASE("config hash") {
  HarnessConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.ladder = {103, 211};
  CHECK(config_hash(a) != config_hash(b));
  CHECK(canonical_string(a).find("seed=1") != std::string::npos);
}

TEST_CASE("profiles and family names") {
  CHECK(desk_profile().ladder == std::vector<std::int64_t>{103, 211, 431, 863});
  CHECK(desk_profile().trials == 200);
  CHECK(full_profile().trials == 10000);
  const auto full = full_profile().ladder;
  CHECK(std::count(full.begin(), full.end(), 2003) == 1);
  CHECK(parse_profile("full").name == "full");
  CHECK_THROWS(parse_profile("huge"));
  CHECK(parse_experiment_family("manova_ensemble").name() == "manova_ensemble");
  CHECK(parse_experiment_family("dss").frame == FrameFamily::DSS);
}

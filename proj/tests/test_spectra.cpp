#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "etfspectra/manova.hpp"
#include "etfspectra/random.hpp"
#include "etfspectra/spectra.hpp"
#include "oracles.hpp"

using namespace etfs;

TEST_CASE("uniform and bernoulli selection") {
  auto s = select(50, UniformK{20}, 4);
  CHECK(s.indices.size() == 20);
  CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
  CHECK(std::set<Eigen::Index>(s.indices.begin(), s.indices.end()).size() == 20);
  CHECK(select(50, UniformK{20}, 4).indices == s.indices);
  CHECK(select(50, UniformK{20}, 5).indices != s.indices);
  CHECK(select(50, Bernoulli{0.0}, 1).indices.empty());
  CHECK(select(50, Bernoulli{1.0}, 1).indices.size() == 50);
  CHECK_THROWS_AS(select(5, UniformK{6}, 1), std::invalid_argument);
  CHECK_THROWS_AS(select(5, Bernoulli{1.5}, 1), std::invalid_argument);

  // every element is picked with probability k/n
  std::vector<int> hits(10, 0);
  for (int t = 0; t < 4000; ++t)
    for (auto i : select(10, UniformK{3}, t).indices) ++hits[i];
  for (int h : hits) CHECK(h == doctest::Approx(1200).epsilon(0.08));
}

TEST_CASE("subset spectrum matches the brute-force gram") {
  auto f = construct_dss(31);
  auto sel = select(31, UniformK{9}, 11);
  auto spec = subset_gram_spectrum(f, sel);
  auto oracle_ev = oracle::general_eigenvalues(oracle::brute_gram(f, sel.indices));
  REQUIRE(spec.eigenvalues.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(spec.eigenvalues[i] == doctest::Approx(oracle_ev[i]).epsilon(1e-10));
  CHECK(spec.k == 9);
  CHECK(spec.m == 15);
  CHECK(spec.zero_count == 0);
  CHECK(spec.beta() == doctest::Approx(0.6));
}

TEST_CASE("subset spectrum with k > m keeps the m nonzero eigenvalues") {
  auto f = construct_real_paley(13);  // m = 7, n = 14
  auto sel = select(14, UniformK{10}, 2);
  auto spec = subset_gram_spectrum(f, sel);
  CHECK(spec.eigenvalues.size() == 7);
  CHECK(spec.zero_count == 3);
  auto oracle_ev = oracle::general_eigenvalues(oracle::brute_gram(f, sel.indices));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(oracle_ev[i]) < 1e-10);
  for (int i = 0; i < 7; ++i) CHECK(spec.eigenvalues[i] == doctest::Approx(oracle_ev[i + 3]).epsilon(1e-10));
  CHECK_THROWS_AS(subset_gram_spectrum(f, std::span<const Eigen::Index>{}), std::invalid_argument);
}

TEST_CASE("large subsets agree with the dense oracle") {
  // sizes past the point where optimized BLAS kernels take over
  auto dss = construct_dss(503);
  auto sel = select(503, UniformK{220}, 8);
  auto spec = subset_gram_spectrum(dss, sel);
  auto ev = oracle::general_eigenvalues(oracle::brute_gram(dss, sel.indices));
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) worst = std::max(worst, std::abs(spec.eigenvalues[i] - ev[i]));
  CHECK(worst < 1e-9);

  auto paley = construct_real_paley(401);  // m = 201, n = 402
  auto wide = select(402, UniformK{300}, 2);
  auto rspec = subset_gram_spectrum(paley, wide);
  auto rev = oracle::general_eigenvalues(oracle::brute_gram(paley, wide.indices));
  REQUIRE(rspec.eigenvalues.size() == 201);
  worst = 0.0;
  for (std::size_t i = 0; i < 201; ++i) worst = std::max(worst, std::abs(rspec.eigenvalues[i] - rev[i + 99]));
  CHECK(worst < 1e-9);
}

TEST_CASE("full selection of a tight frame gives n/m") {
  auto f = construct_dss(19);
  auto spec = subset_gram_spectrum(f, select(19, Bernoulli{1.0}, 0));
  for (double v : spec.eigenvalues) CHECK(v == doctest::Approx(19.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("empirical cdf agrees with counting") {
  std::vector<double> sample{0.3, 0.1, 0.7, 0.3, 0.9, 0.5};
  EmpiricalCdf cdf(sample);
  for (double x : {-1.0, 0.1, 0.2, 0.3, 0.31, 0.7, 0.9, 2.0}) {
    CHECK(cdf(x) == doctest::Approx(oracle::counting_cdf(sample, x)));
    CHECK(cdf.left_limit(x) == doctest::Approx(oracle::counting_cdf(sample, std::nextafter(x, -10.0))));
  }
}

TEST_CASE("ks distance against a dense grid") {
  Rng rng(3);
  std::vector<double> sample;
  for (int i = 0; i < 40; ++i) sample.push_back(uniform01(rng) * uniform01(rng));
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  double exact = ks_distance(sample, ReferenceCdf{uniform, {}});
  double grid = oracle::grid_ks(sample, uniform, -0.1, 1.1, 20000);
  CHECK(exact == doctest::Approx(grid).epsilon(1e-9));

  auto law = manova_nonzero_law({0.6, 0.5});
  auto spec = subset_gram_spectrum(construct_dss(43), select(43, UniformK{13}, 5));
  double d1 = ks_distance(spec, law.as_reference());
  double d2 = oracle::grid_ks(spec.eigenvalues, [&](double x) { return law.cdf(x); }, 0.0, 3.0, 3000);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-6));
}

TEST_CASE("ks distance sees both sides of a jump") {
  // reference with a point mass of 1/2 at 1 and uniform mass on (0, 1)
  ReferenceCdf ref{[](double x) { return x < 0 ? 0.0 : x < 1 ? 0.5 * x : 1.0; },
                   [](double x) { return x <= 0 ? 0.0 : x <= 1 ? 0.5 * x : 1.0; }};
  std::vector<double> at_atom{1.0, 1.0};
  CHECK(ks_distance(at_atom, ref) == doctest::Approx(0.5));
  // a few ulps of eigensolver noise around the jump behave like an exact tie
  std::vector<double> noisy_atom{1.0 - 1e-13, 1.0 + 1e-13};
  CHECK(ks_distance(noisy_atom, ref) == doctest::Approx(0.5));
  std::vector<double> matched{0.5, 1.0};
  CHECK(ks_distance(matched, ref) == doctest::Approx(0.25));
}

TEST_CASE("kolmogorov survival against the theta-function form") {
  // P(K <= l) = sqrt(2 pi)/l sum_{j odd} exp(-j^2 pi^2 / (8 l^2))
  auto theta_form = [](double l) {
    double s = 0.0;
    for (int j = 1; j < 200; j += 2) s += std::exp(-double(j) * j * std::numbers::pi * std::numbers::pi / (8 * l * l));
    return 1.0 - std::sqrt(2 * std::numbers::pi) / l * s;
  };
  for (double l : {0.3, 0.5, 0.8, 1.0, 1.36, 2.0}) CHECK(kolmogorov_survival(l) == doctest::Approx(theta_form(l)).epsilon(1e-10));
  CHECK(kolmogorov_survival(0.0) == 1.0);
}

TEST_CASE("two-sample ks") {
  std::vector<double> a{1, 2, 3, 4, 5};
  auto same = two_sample_ks(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  std::vector<double> b{10, 11, 12, 13, 14};
  auto apart = two_sample_ks(a, b);
  CHECK(apart.statistic == 1.0);
  CHECK(apart.p_value < 0.01);
  std::vector<double> c{1.5, 2.5, 3.5, 4.5, 5.5, 6.5};
  CHECK(two_sample_ks(a, c).statistic == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("manova ensemble follows the limiting law") {
  SUBCASE("beta < 1") {
    auto law = manova_nonzero_law({0.8, 0.5});
    double worst = 0.0, mean = 0.0;
    for (int t = 0; t < 5; ++t) {
      auto s = sample_manova_ensemble(400, 200, 160, Field::Complex, 10 + t);
      CHECK(s.eigenvalues.size() == 160);
      worst = std::max(worst, ks_distance(s, law.as_reference()));
      for (double v : s.eigenvalues) mean += v / (160.0 * 5.0);
    }
    CHECK(worst < 0.05);
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("beta > 1 by duality") {
    auto law = manova_nonzero_law({1.5, 0.5});
    auto s = sample_manova_ensemble(400, 200, 300, Field::Complex, 3);
    CHECK(s.eigenvalues.size() == 200);
    CHECK(s.zero_count == 100);
    CHECK(ks_distance(s, law.as_reference()) < 0.05);
  }
  SUBCASE("real field") {
    auto law = manova_nonzero_law({0.6, 0.5, Field::Real});
    auto s = sample_manova_ensemble(400, 200, 120, Field::Real, 3);
    CHECK(ks_distance(s, law.as_reference()) < 0.08);
  }
  CHECK_THROWS_AS(sample_manova_ensemble(10, 11, 3, Field::Complex, 1), std::invalid_argument);
}

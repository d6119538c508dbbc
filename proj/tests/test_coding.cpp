#include <doctest.h>

#include <cmath>
#include <memory>

#include "etfspectra/coding.hpp"
#include "etfspectra/manova.hpp"

using namespace etfs;

TEST_CASE("amplification models") {
  auto mp = AmplificationModel::mp();
  auto manova = AmplificationModel::manova();
  CHECK(amplification(mp, 0.8, 0.4) == doctest::Approx(5.0));
  CHECK(amplification(manova, 0.8, 0.4) == doctest::Approx(3.0));
  CHECK(amplification(mp, 2.0, 0.5) == doctest::Approx(2.0));
  CHECK(amplification(manova, 2.0, 0.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(amplification(mp, 1.0, 0.5), std::domain_error);
  // never below one, manova never above mp
  for (double beta : {0.45, 0.6, 0.9, 1.2, 3.0, 50.0}) {
    CHECK(amplification(manova, beta, 0.4) >= 1.0);
    CHECK(amplification(manova, beta, 0.4) <= amplification(mp, beta, 0.4));
  }
}

TEST_CASE("empirical amplification of dss subsets") {
  auto f = std::make_shared<const FrameMatrix>(construct_dss(499));
  auto est = empirical_amplification(*f, 0.8, 200, 17);
  const double beta = double(est.k) / double(f->m()), p = double(est.k) / double(f->n());
  CHECK(est.mean == doctest::Approx((1 - p) / (1 - beta)).epsilon(0.02));
  auto model = AmplificationModel::empirical(f, 20, 1);
  CHECK(amplification(model, 0.8, 0.0) > 1.0);
}

TEST_CASE("source coding rate") {
  auto manova = AmplificationModel::manova();
  auto mp = AmplificationModel::mp();
  CHECK(rate_sc(0.8, 0.5, 1.0, manova).rate == doctest::Approx(0.0));
  auto r = rate_sc(0.8, 0.5, 1000.0, manova);
  CHECK(r.rdf == doctest::Approx(0.25 * std::log2(1000.0)));
  CHECK(r.excess == doctest::Approx(r.rate - r.rdf));
  CHECK(r.rate < rate_sc(0.8, 0.5, 1000.0, mp).rate);
  CHECK_THROWS_AS(rate_sc(0.4, 0.5, 10.0, manova), std::invalid_argument);
  CHECK_THROWS_AS(rate_sc(0.8, 0.5, 0.5, manova), std::invalid_argument);

  // excess rate is never negative
  for (double p : {0.1, 0.5, 0.9})
    for (double y : {1.5, 10.0, 1e3, 1e8})
      for (double t = 0.01; t < 1.0; t += 0.07) {
        double beta = p + (1 - p) * t;
        if (beta >= 1.0) continue;
        CHECK(rate_sc(beta, p, y, manova).excess >= -1e-12);
        CHECK(rate_sc(beta, p, y, mp).excess >= -1e-12);
      }

  // eta form agrees with the direct one
  const double beta = 0.7, p = 0.3, y = 500.0;
  const double lam = amplification(manova, beta, p);
  CHECK(excess_rate_ie(beta, p, y, beta * lam) == doctest::Approx(rate_sc(beta, p, y, manova).excess));
  // ideal inverse energy leaves only the redundancy term
  CHECK(excess_rate_ie_high_resolution(beta, p, y, 1.0) == doctest::Approx(0.5 * p * (1 / beta - 1) * std::log2(y)));
}

TEST_CASE("channel capacity") {
  auto manova = AmplificationModel::manova();
  CHECK(capacity_cc(2.0, 0.5, 0.0, manova).capacity == 0.0);
  auto c = capacity_cc(2.0, 0.5, 100.0, manova);
  CHECK(c.shannon == doctest::Approx(0.25 * std::log2(101.0)));
  CHECK(c.capacity < c.shannon);
  CHECK(c.ratio == doctest::Approx(c.capacity / c.shannon));
  CHECK_THROWS_AS(capacity_cc(0.9, 0.5, 1.0, manova), std::invalid_argument);
}

TEST_CASE("optimal beta") {
  auto manova = AmplificationModel::manova();
  const double y = 1e10, p = 0.5;
  auto sc = optimize_beta(Direction::SourceCoding, p, y, manova);
  CHECK(sc.beta == doctest::Approx(1 - 1 / std::log(y)).epsilon(0.02));
  auto cc = optimize_beta(Direction::ChannelCoding, p, y, manova);
  CHECK(cc.beta == doctest::Approx(1 + 1 / std::log(y)).epsilon(0.02));

  // optimum is no worse than the bracket ends
  for (double sdr : {10.0, 1e3, 1e6}) {
    auto o = optimize_beta(Direction::SourceCoding, p, sdr, manova);
    CHECK(o.value <= rate_sc(p + 1e-4, p, sdr, manova).rate + 1e-12);
    CHECK(o.value <= rate_sc(1 - 1e-4, p, sdr, manova).rate + 1e-12);
    auto g = optimize_beta(Direction::ChannelCoding, p, sdr, manova);
    CHECK(g.value >= capacity_cc(1 + 1e-4, p, sdr, manova).capacity - 1e-12);
    CHECK(g.value >= capacity_cc(1e4, p, sdr, manova).capacity - 1e-12);
  }

  // grid fallback lands near the refined optimum
  OptimizeOptions grid;
  grid.refine = false;
  grid.scan_points = 2000;
  auto coarse = optimize_beta(Direction::SourceCoding, p, 1e4, manova, grid);
  auto fine = optimize_beta(Direction::SourceCoding, p, 1e4, manova);
  CHECK(coarse.value == doctest::Approx(fine.value).epsilon(1e-4));
  CHECK(fine.value <= coarse.value + 1e-12);

  OptimizeOptions empty;
  empty.source_margin = 0.6;
  CHECK_THROWS_AS(optimize_beta(Direction::SourceCoding, p, 10.0, manova, empty), std::invalid_argument);
}

TEST_CASE("high resolution gaps") {
  auto g = high_resolution_gaps(0.5, 1e10);
  CHECK(g.diff_sc_analytic == doctest::Approx(-0.25));
  CHECK(g.diff_cc_analytic == doctest::Approx(0.25));
  CHECK(std::abs(g.diff_sc - g.diff_sc_analytic) < 0.02);
  CHECK(g.gap_sc_manova < g.gap_sc_mp);
  CHECK(g.gap_cc_manova > g.gap_cc_mp);
  CHECK(g.gap_sc_mp > 0.0);
  CHECK(g.gap_cc_mp < 0.0);
}

TEST_CASE("side information benchmark") {
  CHECK(si_benchmark(0.5) == doctest::Approx(1.0));
  CHECK(si_benchmark(0.0) == 0.0);
  CHECK(si_benchmark(1.0) == 0.0);
  CHECK(si_benchmark(0.2) == doctest::Approx(0.7219).epsilon(1e-4));
}

TEST_CASE("mlie") {
  // n = m: the normalized DFT is unitary
  auto unitary = construct_lowpass_dft(6, 6);
  auto u = mlie(unitary, 6, MlieMode::Exact);
  CHECK(u.patterns == 1);
  CHECK(u.value == doctest::Approx(0.0).epsilon(1e-12));

  auto dss = construct_dss(7);
  auto d = mlie(dss, 2, MlieMode::Exact);
  CHECK(d.patterns == 21);
  CHECK(d.divergent == 0);
  CHECK(d.eta_max - d.eta_min < 1e-12);

  auto lp = construct_lowpass_dft(7, 3);
  CHECK(mlie(dss, 3, MlieMode::Exact).value < mlie(lp, 3, MlieMode::Exact).value);

  auto mc = mlie(dss, 3, MlieMode::MonteCarlo, 2000, 5);
  CHECK(mc.value == doctest::Approx(mlie(dss, 3, MlieMode::Exact).value).epsilon(0.05));

  // [I I]: patterns that repeat a column are singular
  Eigen::MatrixXcd twice(2, 4);
  twice << 1, 0, 1, 0, 0, 1, 0, 1;
  FrameMatrix repeated(twice, FrameFamily::LowPassDFT, Field::Real);
  auto bad = mlie(repeated, 2, MlieMode::Exact);
  CHECK(bad.patterns == 6);
  CHECK(bad.divergent == 2);
  CHECK(bad.value == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(mlie(dss, 4, MlieMode::Exact), std::invalid_argument);
  CHECK_THROWS_AS(mlie(construct_dss(103), 20, MlieMode::Exact), std::invalid_argument);
}

TEST_CASE("square gaussian divergence probe") {
  auto rows = square_gaussian_divergence_probe({4, 8, 16}, 400, 9);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].within_envelope);
  CHECK(rows[0].estimate < rows[1].estimate);
  CHECK(rows[1].estimate < rows[2].estimate);
  for (const auto& r : rows) CHECK(std::isfinite(r.control));
  CHECK(rows[2].control == doctest::Approx(1.0).epsilon(0.25));
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "etfspectra/frame_io.hpp"
#include "etfspectra/frames.hpp"
#include "oracles.hpp"

using namespace etfs;

TEST_CASE("quadratic residues and legendre symbols") {
  CHECK(quadratic_residues(7) == std::vector<std::int64_t>{1, 2, 4});
  CHECK(quadratic_residues(13) == std::vector<std::int64_t>{1, 3, 4, 9, 10, 12});
  CHECK(legendre_symbol(3, 7) == -1);
  CHECK(legendre_symbol(2, 7) == 1);
  CHECK(legendre_symbol(14, 7) == 0);
  CHECK(is_prime(103));
  CHECK_FALSE(is_prime(91));
}

TEST_CASE("dss frames are equiangular tight frames") {
  for (std::int64_t n : {7, 11, 19, 23, 31, 43}) {
    auto f = construct_dss(n);
    CHECK(f.m() == (n - 1) / 2);
    CHECK(is_tight(f));
    CHECK(is_equiangular(f));
    CHECK(column_norm_residual(f) < 1e-12);
    const double welch = double(n - f.m()) / double((n - 1) * f.m());
    CHECK(coherence(f) * coherence(f) == doctest::Approx(welch).epsilon(1e-12));
    CHECK(mean_square_cross_correlation(f) == doctest::Approx(welch_rms_bound(n, f.m())).epsilon(1e-12));
  }
}

TEST_CASE("gram matches an explicit inner-product loop") {
  auto f = construct_dss(11);
  std::vector<Eigen::Index> all(11);
  for (Eigen::Index i = 0; i < 11; ++i) all[i] = i;
  Eigen::MatrixXcd brute = oracle::brute_gram(f, all);
  CHECK((f.gram() - brute).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(f.correlation(2, 5) - brute(2, 5)) < 1e-12);
}

TEST_CASE("paley and grassmannian constructions") {
  for (std::int64_t q : {5, 13, 17}) {
    auto f = construct_real_paley(q);
    CHECK(f.n() == q + 1);
    CHECK(f.m() == (q + 1) / 2);
    CHECK(f.field() == Field::Real);
    CHECK(f.entries().imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(is_tight(f));
    CHECK(is_equiangular(f));
  }
  for (std::int64_t q : {7, 11, 19}) {
    auto f = construct_complex_paley(q);
    CHECK(f.n() == q + 1);
    CHECK(is_tight(f));
    CHECK(is_equiangular(f));
  }
  for (std::int64_t n : {7, 11, 23}) {
    auto f = construct_grassmannian(n);
    CHECK(f.m() == (n + 1) / 2);
    CHECK(is_tight(f));
    CHECK(is_equiangular(f));
    CHECK(coherence(f) * coherence(f) == doctest::Approx(1.0 / double(n + 1)).epsilon(1e-12));
  }
}

TEST_CASE("tight frames that are not equiangular") {
  auto alltop = construct_alltop(7, 3);
  CHECK(alltop.m() == 7);
  CHECK(alltop.n() == 21);
  CHECK(is_tight(alltop));
  CHECK_FALSE(is_equiangular(alltop));
  CHECK(coherence(alltop) == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-12));

  auto ss = construct_spikes_sines(8);
  CHECK(ss.n() == 16);
  CHECK(is_tight(ss));
  CHECK_FALSE(is_equiangular(ss));
  CHECK(coherence(ss) == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));

  auto sh = construct_spikes_hadamard(8);
  CHECK(sh.field() == Field::Real);
  CHECK(is_tight(sh));
  CHECK(coherence(sh) == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-12));

  auto lp = construct_lowpass_dft(8, 4);
  CHECK(is_tight(lp));
  CHECK_FALSE(is_equiangular(lp));

  auto rs = construct_random_spectrum_dft(16, 6, 3);
  CHECK(is_tight(rs));
  CHECK(column_norm_residual(rs) < 1e-12);
}

TEST_CASE("random frames") {
  auto g1 = construct_random(FrameFamily::GaussianIID, 40, 10, 7);
  auto g2 = construct_random(FrameFamily::GaussianIID, 40, 10, 7);
  auto g3 = construct_random(FrameFamily::GaussianIID, 40, 10, 8);
  CHECK(g1.entries() == g2.entries());
  CHECK(g1.entries() != g3.entries());
  CHECK(g1.seed() == std::optional<std::uint64_t>(7));

  // variance 1/m per entry, so squared column norms average to 1
  auto big = construct_random(FrameFamily::GaussianIID, 400, 100, 1);
  CHECK(big.entries().squaredNorm() / 400.0 == doctest::Approx(1.0).epsilon(0.02));

  auto real = construct_random(FrameFamily::GaussianIID, 40, 10, 7, {Field::Real, false});
  CHECK(real.field() == Field::Real);
  CHECK(real.entries().imag().cwiseAbs().maxCoeff() == 0.0);

  for (auto fam : {FrameFamily::HaarReal, FrameFamily::HaarComplex, FrameFamily::RandomFourier,
                   FrameFamily::RandomCosine}) {
    auto f = construct_random(fam, 30, 12, 5);
    CHECK(is_tight(f));
    auto normalized = construct_random(fam, 30, 12, 5, {Field::Complex, true});
    CHECK(column_norm_residual(normalized) < 1e-12);
  }
  CHECK(column_norm_residual(construct_random(FrameFamily::RandomFourier, 30, 12, 5)) < 1e-12);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(construct_dss(8), std::invalid_argument);
  CHECK_THROWS_AS(construct_dss(13), std::invalid_argument);
  CHECK_THROWS_AS(construct_real_paley(7), std::invalid_argument);
  CHECK_THROWS_AS(construct_complex_paley(13), std::invalid_argument);
  CHECK_THROWS_AS(construct_spikes_hadamard(6), std::invalid_argument);
  CHECK_THROWS_AS(construct_alltop(9, 2), std::invalid_argument);
  CHECK_THROWS_AS(construct_random(FrameFamily::GaussianIID, 5, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("nope"), std::invalid_argument);
}

TEST_CASE("family names round trip") {
  std::set<std::string> seen;
  for (int i = 0; i <= static_cast<int>(FrameFamily::RandomCosine); ++i) {
    auto fam = static_cast<FrameFamily>(i);
    auto name = std::string(to_string(fam));
    CHECK(parse_family(name) == fam);
    seen.insert(name);
  }
  CHECK(seen.size() == 14);
  CHECK(parse_field("real") == Field::Real);
}

TEST_CASE("dispatcher") {
  FrameRequest req;
  req.family = FrameFamily::RealPaley;
  req.n = 14;
  auto f = construct_frame(req);
  CHECK(f.n() == 14);
  req.family = FrameFamily::Alltop;
  req.m = 5;
  req.redundancy = 2;
  CHECK(construct_frame(req).n() == 10);
}

TEST_CASE("frame json round trip") {
  auto dir = std::filesystem::temp_directory_path();
  for (const auto& f : {construct_dss(19), construct_real_paley(13),
                        construct_random(FrameFamily::GaussianIID, 12, 5, 99)}) {
    auto path = dir / "etfspectra_frame_roundtrip.json";
    save_frame(f, path);
    auto g = load_frame(path);
    CHECK(g.entries() == f.entries());
    CHECK(g.family() == f.family());
    CHECK(g.field() == f.field());
    CHECK(g.seed() == f.seed());
    std::filesystem::remove(path);
  }
  CHECK_THROWS(frame_from_json(R"({"format":"other","version":1})"));
}

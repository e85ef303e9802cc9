#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kerrsim/coherent_superposition.hpp"
#include "kerrsim/measurement.hpp"
#include "oracles.hpp"

using namespace kerrsim;

namespace {

SingleModeState random_state(std::mt19937_64& rng, std::size_t cutoff) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(cutoff + 1));
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return SingleModeState(v.normalized());
}

}  // namespace

TEST(Setup, DefaultThresholdIsCeilAlphaSquared) {
  EXPECT_EQ(DiscriminationSetup::for_alpha(3.0).threshold, 9u);
  EXPECT_EQ(DiscriminationSetup::for_alpha(2.5).threshold, 7u);
  EXPECT_EQ(DiscriminationSetup::for_alpha(1.1).threshold, 2u);
}

TEST(Setup, ValidateRejectsOutOfRangeThreshold) {
  EXPECT_NO_THROW(DiscriminationSetup::for_alpha(3.0).validate());
  EXPECT_THROW((DiscriminationSetup{3.0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((DiscriminationSetup{3.0, 18}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((DiscriminationSetup{3.0, 17}.validate()));
  EXPECT_THROW(qubit_measure(coherent_fock(1.0, 20), DiscriminationSetup{1.0, 5}), std::invalid_argument);
}

TEST(Classify, ThresholdIsExclusive) {
  EXPECT_EQ(classify(10, 9, 9), Outcome::Plus);
  EXPECT_EQ(classify(9, 10, 9), Outcome::Minus);
  EXPECT_EQ(classify(9, 9, 9), Outcome::Inconclusive);
  EXPECT_EQ(classify(10, 10, 9), Outcome::Inconclusive);
  EXPECT_EQ(classify(0, 0, 1), Outcome::Inconclusive);
}

TEST(QubitMeasure, PlusInputMatchesPoissonTail) {
  const DiscriminationSetup setup = DiscriminationSetup::for_alpha(3.0);
  const auto d = qubit_measure(coherent_fock(3.0), setup);
  const double expected = static_cast<double>(oracle::poisson_upper_tail(18.0L, 9));
  EXPECT_NEAR(d.p_plus, expected, 1e-9);
  EXPECT_NEAR(d.p_plus, 0.98461890, 1e-7);
  EXPECT_LT(d.p_minus, 1e-12);
  EXPECT_NEAR(d.p_inconclusive, static_cast<double>(oracle::poisson_cdf(18.0L, 9)), 1e-9);
}

TEST(QubitMeasure, MinusInputIsMirrorImage) {
  const DiscriminationSetup setup = DiscriminationSetup::for_alpha(3.0);
  const auto plus = qubit_measure(coherent_fock(3.0), setup);
  const auto minus = qubit_measure(coherent_fock(-3.0), setup);
  EXPECT_NEAR(minus.p_minus, plus.p_plus, 1e-12);
  EXPECT_NEAR(minus.p_plus, plus.p_minus, 1e-12);
  EXPECT_NEAR(minus.p_inconclusive, plus.p_inconclusive, 1e-12);
}

TEST(QubitMeasure, CatGivesEqualSigns) {
  const auto cat = to_fock(yurke_stoler_cat(3.0), choose_cutoff(9.0));
  const auto d = qubit_measure(cat, DiscriminationSetup::for_alpha(3.0));
  EXPECT_NEAR(d.p_plus, d.p_minus, 1e-6);
  EXPECT_NEAR(d.p_plus, 0.5 * static_cast<double>(oracle::poisson_upper_tail(18.0L, 9)), 1e-6);
}

TEST(QubitMeasure, WrongSignBoundedByPoissonTail) {
  for (double alpha : {2.0, 2.5, 3.0}) {
    const DiscriminationSetup setup = DiscriminationSetup::for_alpha(alpha);
    const long double bound = oracle::poisson_cdf(2.0L * alpha * alpha, setup.threshold);
    for (double sign : {1.0, -1.0}) {
      const auto d = qubit_measure(coherent_fock(sign * alpha), setup);
      EXPECT_LT(sign > 0 ? d.p_minus : d.p_plus, static_cast<double>(bound));
    }
  }
  const auto d = qubit_measure(coherent_fock(3.0), DiscriminationSetup::for_alpha(3.0));
  EXPECT_LT(d.p_minus, 1e-3);
}

TEST(QubitMeasure, CompletenessForArbitraryStates) {
  std::mt19937_64 rng(19);
  const DiscriminationSetup setup = DiscriminationSetup::for_alpha(2.0);
  for (int k = 0; k < 10; ++k) {
    const auto d = qubit_measure(random_state(rng, 15), setup);
    EXPECT_NEAR(d.total(), 1.0, 1e-10);
    for (double p : d.as_array()) {
      EXPECT_GE(p, -1e-15);
      EXPECT_LE(p, 1.0 + 1e-15);
    }
  }
}

TEST(DetectorPovm, ElementsFormResolutionOfIdentity) {
  const DetectorPovm povm(DiscriminationSetup::for_alpha(2.5), 30);
  const Eigen::MatrixXcd sum = povm.element(Outcome::Plus) + povm.element(Outcome::Minus) + povm.element(Outcome::Inconclusive);
  EXPECT_LT((sum - Eigen::MatrixXcd::Identity(31, 31)).cwiseAbs().maxCoeff(), 1e-10);
  for (Outcome k : {Outcome::Plus, Outcome::Minus, Outcome::Inconclusive}) {
    const Eigen::MatrixXcd& e = povm.element(k);
    EXPECT_LT((e - e.adjoint()).norm(), 1e-13);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(e).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(DetectorPovm, AgreesWithDirectInterference) {
  std::mt19937_64 rng(23);
  const DiscriminationSetup setup = DiscriminationSetup::for_alpha(2.0);
  const DetectorPovm povm(setup, 18);
  for (int k = 0; k < 5; ++k) {
    const auto s = random_state(rng, 18);
    const auto a = povm.measure(s), b = qubit_measure(s, setup);
    EXPECT_NEAR(a.p_plus, b.p_plus, 1e-11);
    EXPECT_NEAR(a.p_minus, b.p_minus, 1e-11);
    EXPECT_NEAR(a.p_inconclusive, b.p_inconclusive, 1e-11);
  }
}

TEST(DetectorPovm, ProductStatesFactorize) {
  const double alpha = 2.0;
  const DetectorPovm povm(DiscriminationSetup::for_alpha(alpha), choose_cutoff(alpha * alpha));
  const auto a = coherent_fock(alpha, povm.input_cutoff());
  std::mt19937_64 rng(29);
  const auto b = random_state(rng, 12);
  const auto joint = povm.measure(tensor(a, b), povm);
  const auto pa = povm.measure(a).as_array(), pb = povm.measure(b).as_array();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(joint.p[i][j], pa[i] * pb[j], 1e-12);
}

TEST(DetectorPovm, EntangledStateCorrelation) {
  const double alpha = 2.5;
  const DetectorPovm povm(DiscriminationSetup::for_alpha(alpha), choose_cutoff(alpha * alpha));
  const std::size_t c = povm.input_cutoff();
  const TwoModeState same(oracle::entangled_matrix(alpha, c));
  const auto joint = povm.measure(same, povm);
  double total = 0.0;
  for (const auto& row : joint.p)
    for (double p : row) total += p;
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_GT(joint.correlation(), 0.999);
  EXPECT_NEAR(joint.p[0][0], joint.p[1][1], 1e-6);
}

TEST(JointDistribution, CorrelationIgnoresInconclusive) {
  JointOutcomeDistribution j;
  j.p[0][0] = 0.3;
  j.p[1][1] = 0.3;
  j.p[0][1] = 0.1;
  j.p[1][0] = 0.1;
  j.p[2][2] = 0.2;
  EXPECT_NEAR(j.conclusive(), 0.8, 1e-15);
  EXPECT_NEAR(j.correlation(), 0.5, 1e-15);
  EXPECT_EQ(j.flattened()[4], 0.3);
  EXPECT_EQ(JointOutcomeDistribution{}.correlation(), 0.0);
}

TEST(CoarseCount, UnitBinsAreIdentity) {
  const auto s = coherent_fock(2.0);
  EXPECT_EQ(coarse_count(s, 1), photon_number_distribution(s));
  EXPECT_THROW(coarse_count(s, 0), std::invalid_argument);
}

TEST(CoarseCount, VacuumInBinZero) {
  for (std::size_t bin : {1u, 3u, 7u, 50u}) {
    const auto bins = coarse_count(SingleModeState::vacuum(20), bin);
    EXPECT_EQ(bins[0], 1.0);
    for (std::size_t k = 1; k < bins.size(); ++k) EXPECT_EQ(bins[k], 0.0);
  }
}

TEST(CoarseCount, BrightStateAwayFromBinZero) {
  const auto bins = coarse_count(coherent_fock(std::sqrt(2.0) * 3.0), 9);
  EXPECT_NEAR(bins[0], static_cast<double>(oracle::poisson_cdf(18.0L, 8)), 1e-12);
  EXPECT_NEAR(bins[0], 7.056e-3, 1e-6);
  EXPECT_NEAR(bins[1] + bins[2], static_cast<double>(oracle::poisson_cdf(18.0L, 26) - oracle::poisson_cdf(18.0L, 8)), 1e-12);
  const auto peak = std::max_element(bins.begin(), bins.end()) - bins.begin();
  EXPECT_EQ(peak, 2);
}

TEST(CoarseCount, RefinementAggregates) {
  std::mt19937_64 rng(31);
  const auto p = photon_number_distribution(random_state(rng, 40));
  for (std::size_t m : {1u, 2u, 3u}) {
    for (std::size_t k : {2u, 5u}) {
      const auto fine = coarse_count(std::span<const double>(p), m);
      const auto coarse = coarse_count(std::span<const double>(p), k * m);
      const auto regrouped = coarse_count(std::span<const double>(fine), k);
      ASSERT_EQ(coarse.size(), regrouped.size());
      for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_NEAR(coarse[i], regrouped[i], 1e-15);
    }
  }
}

TEST(Sampling, CertainOutcome) {
  for (std::uint64_t seed : {0ULL, 1ULL, 123456789ULL}) {
    const auto r = sample(OutcomeDistribution{1.0, 0.0, 0.0}, seed, 1000);
    EXPECT_EQ(r.counts[0], 1000u);
    EXPECT_EQ(r.counts[1] + r.counts[2], 0u);
    EXPECT_EQ(r.seed, seed);
  }
}

TEST(Sampling, DeterministicForSeed) {
  const OutcomeDistribution d{0.4, 0.35, 0.25};
  EXPECT_EQ(sample(d, 42, 100000), sample(d, 42, 100000));
  EXPECT_NE(sample(d, 42, 100000), sample(d, 43, 100000));
  EXPECT_NE(sample(d, 42, 100000, 0), sample(d, 42, 100000, 1));
}

TEST(Sampling, CountsSumToShots) {
  const auto r = sample(OutcomeDistribution{0.2, 0.3, 0.5}, 9, 12345);
  EXPECT_EQ(r.counts[0] + r.counts[1] + r.counts[2], 12345u);
}

TEST(Sampling, FairCoinWithinFiveSigma) {
  const std::size_t shots = 1000000;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto r = sample(OutcomeDistribution{0.5, 0.5, 0.0}, seed, shots);
    EXPECT_LT(std::abs(static_cast<double>(r.counts[0]) / shots - 0.5), 0.0025);
    EXPECT_EQ(r.counts[2], 0u);
  }
}

TEST(Sampling, PrefixConsistency) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const auto full = sample_categorical(std::span<const double>(p), 5, 0, 20000);
  std::vector<std::size_t> manual(4, 0);
  for (std::size_t i = 0; i < 20000; ++i) {
    const double u = CounterRng::uniform(5, 0, i);
    std::size_t k = u < 0.1 ? 0 : u < 0.3 ? 1 : u < 0.6 ? 2 : 3;
    ++manual[k];
  }
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(static_cast<double>(full[k]), static_cast<double>(manual[k]), 2.0);
}

TEST(Sampling, UniformIsInUnitInterval) {
  double mean = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = CounterRng::uniform(77, 3, i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 5 * std::sqrt(1.0 / 12 / 100000));
}

TEST(Sampling, RejectsInvalidDistributions) {
  const std::vector<double> empty, zero{0.0, 0.0}, negative{0.5, -0.1, 0.6};
  EXPECT_THROW(sample_categorical(std::span<const double>(empty), 1, 0, 10), std::invalid_argument);
  EXPECT_THROW(sample_categorical(std::span<const double>(zero), 1, 0, 10), std::invalid_argument);
  EXPECT_THROW(sample_categorical(std::span<const double>(negative), 1, 0, 10), std::invalid_argument);
}

TEST(Json, OutcomeAndShotRecord) {
  const auto j = to_json(OutcomeDistribution{0.25, 0.5, 0.25});
  EXPECT_EQ(j.at("p_minus").get<double>(), 0.5);
  const auto r = to_json(ShotRecord{7, 10, {3, 5, 2}});
  EXPECT_EQ(r.at("seed").get<std::uint64_t>(), 7u);
  EXPECT_EQ(r.at("minus").get<std::size_t>(), 5u);
}

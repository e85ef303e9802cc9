#include "kerrsim/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kerrsim/bosonic_ops.hpp"
#include "kerrsim/parallel.hpp"

namespace kerrsim {

DiscriminationSetup DiscriminationSetup::for_alpha(double alpha) {
  DiscriminationSetup s;
  s.ancilla_alpha = alpha;
  s.threshold = static_cast<std::size_t>(std::ceil(alpha * alpha));
  return s;
}

void DiscriminationSetup::validate() const {
  const double bright = 2.0 * ancilla_alpha * ancilla_alpha;
  if (threshold == 0 || !(static_cast<double>(threshold) < bright)) {
    throw std::invalid_argument("DiscriminationSetup: threshold must lie strictly between 0 and 2 alpha^2");
  }
}

Outcome classify(std::size_t n1, std::size_t n2, std::size_t threshold) {
  const bool bright1 = n1 > threshold, bright2 = n2 > threshold;
  if (bright1 && !bright2) return Outcome::Plus;
  if (!bright1 && bright2) return Outcome::Minus;
  return Outcome::Inconclusive;
}

double JointOutcomeDistribution::conclusive() const { return p[0][0] + p[0][1] + p[1][0] + p[1][1]; }

double JointOutcomeDistribution::correlation() const {
  const double c = conclusive();
  if (c <= 0.0) return 0.0;
  return (p[0][0] + p[1][1] - p[0][1] - p[1][0]) / c;
}

std::array<double, 9> JointOutcomeDistribution::flattened() const {
  std::array<double, 9> out{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out[3 * i + j] = p[i][j];
  return out;
}

namespace {

std::size_t working_cutoff_for(std::size_t input_cutoff, double ancilla_alpha) {
  return choose_cutoff(static_cast<double>(input_cutoff) + ancilla_alpha * ancilla_alpha);
}

}  // namespace

OutcomeDistribution qubit_measure(const SingleModeState& s, const DiscriminationSetup& setup) {
  setup.validate();
  const std::size_t n = working_cutoff_for(s.cutoff(), setup.ancilla_alpha);
  const TwoModeState joint =
      BeamSplitter(n).apply(tensor(s.resized(n), coherent_fock(setup.ancilla_alpha, n)));
  std::array<double, 3> p{};
  const Eigen::MatrixXd weights = joint.amplitudes().cwiseAbs2();
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = 0; j < weights.cols(); ++j)
      p[static_cast<std::size_t>(classify(static_cast<std::size_t>(i), static_cast<std::size_t>(j), setup.threshold))] +=
          weights(i, j);
  const double norm = s.norm_squared();
  return {p[0] / norm, p[1] / norm, p[2] / norm};
}

DetectorPovm::DetectorPovm(const DiscriminationSetup& setup, std::size_t input_cutoff)
    : setup_(setup), input_cutoff_(input_cutoff), working_cutoff_(working_cutoff_for(input_cutoff, setup.ancilla_alpha)) {
  setup_.validate();
  const BeamSplitter splitter(working_cutoff_);
  const Eigen::VectorXcd ancilla = coherent_fock(setup_.ancilla_alpha, working_cutoff_).amplitudes();
  const auto dim = static_cast<Eigen::Index>(input_cutoff_ + 1);
  for (auto& e : elements_) e = Eigen::MatrixXcd::Zero(dim, dim);

  // Row (k, T-k) of U(|m> x |anc>) is B_T(k, m) anc[T-m]; accumulate its outer product into the
  // element selected by the photon counts (k, T-k).
  Eigen::VectorXcd row(dim);
  for (std::size_t total = 0; total <= splitter.max_total(); ++total) {
    const std::size_t lo = splitter.lowest(total), hi = splitter.highest(total);
    const Eigen::MatrixXd& block = splitter.block(total);
    const std::size_t m_hi = std::min(hi, input_cutoff_);
    if (m_hi < lo) continue;
    for (std::size_t k = lo; k <= hi; ++k) {
      row.setZero();
      for (std::size_t m = lo; m <= m_hi; ++m) {
        row[static_cast<Eigen::Index>(m)] =
            block(static_cast<Eigen::Index>(k - lo), static_cast<Eigen::Index>(m - lo)) *
            ancilla[static_cast<Eigen::Index>(total - m)];
      }
      auto& e = elements_[static_cast<std::size_t>(classify(k, total - k, setup_.threshold))];
      e.selfadjointView<Eigen::Lower>().rankUpdate(row.conjugate());
    }
  }
  for (auto& e : elements_) {
    const Eigen::MatrixXcd full = e.selfadjointView<Eigen::Lower>();
    e = full;
  }
}

OutcomeDistribution DetectorPovm::measure(const SingleModeState& s) const {
  const SingleModeState fitted = s.resized(input_cutoff_);
  std::array<double, 3> p{};
  for (std::size_t k = 0; k < 3; ++k)
    p[k] = fitted.amplitudes().dot(elements_[k] * fitted.amplitudes()).real() / s.norm_squared();
  return {p[0], p[1], p[2]};
}

JointOutcomeDistribution DetectorPovm::measure(const TwoModeState& s, const DetectorPovm& other) const {
  const Eigen::MatrixXcd psi = s.resized(input_cutoff_, other.input_cutoff_).amplitudes();
  const double norm = s.norm_squared();
  JointOutcomeDistribution out;
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::MatrixXcd left = psi.adjoint() * elements_[k] * psi;  // acts on mode B indices
    for (std::size_t l = 0; l < 3; ++l) {
      // tr(psi^dag E_k psi E_l^T)
      out.p[k][l] = (left.cwiseProduct(other.elements_[l])).sum().real() / norm;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> coarse_count(std::span<const double> distribution, std::size_t bin_size) {
  if (bin_size == 0) throw std::invalid_argument("coarse_count: bin_size must be >= 1");
  std::vector<double> bins((distribution.size() + bin_size - 1) / bin_size, 0.0);
  for (std::size_t n = 0; n < distribution.size(); ++n) bins[n / bin_size] += distribution[n];
  return bins;
}

std::vector<double> coarse_count(const SingleModeState& s, std::size_t bin_size) {
  const auto p = photon_number_distribution(s);
  return coarse_count(std::span<const double>(p), bin_size);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

double CounterRng::uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> sample_categorical(std::span<const double> probabilities, std::uint64_t seed,
                                            std::uint64_t stream, std::size_t shots) {
  if (probabilities.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] < -1e-12) throw std::invalid_argument("sample_categorical: negative probability");
    acc += std::max(0.0, probabilities[i]);
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("sample_categorical: distribution has no mass");
  for (auto& c : cdf) c /= acc;
  cdf.back() = 1.0;

  const std::size_t categories = cdf.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(worker_count(), shots / 4096 + 1));
  std::vector<std::vector<std::size_t>> partial(chunks, std::vector<std::size_t>(categories, 0));
  const std::size_t per_chunk = (shots + chunks - 1) / chunks;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * per_chunk, end = std::min(shots, begin + per_chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const double u = CounterRng::uniform(seed, stream, i);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      partial[c][std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), categories - 1)] += 1;
    }
  });
  std::vector<std::size_t> counts(categories, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < categories; ++i) counts[i] += p[i];
  return counts;
}

ShotRecord sample(const OutcomeDistribution& d, std::uint64_t seed, std::size_t shots, std::uint64_t stream) {
  const auto p = d.as_array();
  const auto counts = sample_categorical(std::span<const double>(p), seed, stream, shots);
  return {seed, shots, {counts[0], counts[1], counts[2]}};
}

nlohmann::json to_json(const OutcomeDistribution& d) {
  return {{"p_plus", d.p_plus}, {"p_minus", d.p_minus}, {"p_inconclusive", d.p_inconclusive}};
}

nlohmann::json to_json(const ShotRecord& r) {
  return {{"seed", r.seed}, {"shots", r.shots}, {"plus", r.counts[0]}, {"minus", r.counts[1]}, {"inconclusive", r.counts[2]}};
}

}  // namespace kerrsim

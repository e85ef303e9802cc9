#include "kerrsim/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kerrsim/errors.hpp"

namespace kerrsim {

namespace {

double log_poisson_pmf(double mean, std::size_t k) {
  const double kd = static_cast<double>(k);
  return -mean + kd * std::log(mean) - std::lgamma(kd + 1.0);
}

}  // namespace

double poisson_tail_above(double mean, std::size_t n) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson_tail_above: mean must be >= 0");
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (std::size_t k = n + 1;; ++k) {
    const double term = std::exp(log_poisson_pmf(mean, k));
    tail += term;
    if (static_cast<double>(k) > mean && (term <= 1e-30 * tail || term == 0.0)) break;
  }
  return tail;
}

std::size_t choose_cutoff(const CutoffPolicy& policy) {
  if (!(policy.mean_photons >= 0.0)) throw std::invalid_argument("choose_cutoff: mean_photons must be >= 0");
  if (!(policy.tail_bound > 0.0 && policy.tail_bound < 1.0)) {
    throw std::invalid_argument("choose_cutoff: tail_bound must lie in (0, 1)");
  }
  const double floor_value =
      policy.mean_photons + policy.safety_factor * std::sqrt(policy.mean_photons + 1.0);
  auto n = static_cast<std::size_t>(std::ceil(floor_value));
  while (poisson_tail_above(policy.mean_photons, n) >= policy.tail_bound) ++n;
  return n;
}

// ---------------------------------------------------------------------------

SingleModeState::SingleModeState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw std::invalid_argument("SingleModeState: empty amplitude vector");
}

SingleModeState SingleModeState::vacuum(std::size_t cutoff) { return number_state(0, cutoff); }

SingleModeState SingleModeState::number_state(std::size_t n, std::size_t cutoff) {
  if (n > cutoff) throw CutoffError("number_state: n exceeds cutoff");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff + 1));
  v[static_cast<Eigen::Index>(n)] = 1.0;
  return SingleModeState(std::move(v));
}

double SingleModeState::mean_photons() const {
  double mean = 0.0;
  for (Eigen::Index n = 0; n < amplitudes_.size(); ++n) mean += static_cast<double>(n) * std::norm(amplitudes_[n]);
  return mean / norm_squared();
}

SingleModeState SingleModeState::normalized() const {
  const double nrm = norm();
  if (nrm == 0.0) throw std::domain_error("normalized: zero state");
  return SingleModeState(amplitudes_ / nrm);
}

SingleModeState SingleModeState::resized(std::size_t cutoff) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff + 1));
  const Eigen::Index keep = std::min<Eigen::Index>(v.size(), amplitudes_.size());
  v.head(keep) = amplitudes_.head(keep);
  return SingleModeState(std::move(v));
}

TwoModeState::TwoModeState(Eigen::MatrixXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw std::invalid_argument("TwoModeState: empty amplitude matrix");
}

TwoModeState TwoModeState::normalized() const {
  const double nrm = norm();
  if (nrm == 0.0) throw std::domain_error("normalized: zero state");
  return TwoModeState(amplitudes_ / nrm);
}

TwoModeState TwoModeState::resized(std::size_t cutoff_a, std::size_t cutoff_b) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(cutoff_a + 1),
                                              static_cast<Eigen::Index>(cutoff_b + 1));
  const Eigen::Index rows = std::min(m.rows(), amplitudes_.rows());
  const Eigen::Index cols = std::min(m.cols(), amplitudes_.cols());
  m.topLeftCorner(rows, cols) = amplitudes_.topLeftCorner(rows, cols);
  return TwoModeState(std::move(m));
}

// ---------------------------------------------------------------------------

Complex coherent_overlap(Complex beta, Complex gamma) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(gamma) + std::conj(beta) * gamma);
}

SingleModeState coherent_fock(Complex alpha, std::size_t cutoff, double tail_bound) {
  const double mean = std::norm(alpha);
  const double tail = poisson_tail_above(mean, cutoff);
  if (tail >= tail_bound) {
    throw CutoffError("coherent_fock: cutoff " + std::to_string(cutoff) + " leaves tail mass " +
                      std::to_string(tail) + " for |alpha|^2 = " + std::to_string(mean));
  }
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff + 1));
  if (mean == 0.0) {
    c[0] = 1.0;
    return SingleModeState(std::move(c));
  }
  // Magnitudes follow |c_{n+1}| = |c_n| |alpha| / sqrt(n+1), carried in the log domain so that
  // large means do not underflow the leading terms.
  const double log_abs = std::log(std::abs(alpha));
  const double arg = std::arg(alpha);
  double log_mag = -0.5 * mean;
  for (std::size_t n = 0; n <= cutoff; ++n) {
    if (n > 0) log_mag += log_abs - 0.5 * std::log(static_cast<double>(n));
    c[static_cast<Eigen::Index>(n)] = std::polar(std::exp(log_mag), static_cast<double>(n) * arg);
  }
  return SingleModeState(std::move(c));
}

SingleModeState coherent_fock(Complex alpha) {
  return coherent_fock(alpha, choose_cutoff(std::norm(alpha)));
}

Complex inner_product(const SingleModeState& a, const SingleModeState& b) {
  const Eigen::Index common = std::min(a.amplitudes().size(), b.amplitudes().size());
  return a.amplitudes().head(common).dot(b.amplitudes().head(common));
}

Complex inner_product(const TwoModeState& a, const TwoModeState& b) {
  const Eigen::Index rows = std::min(a.amplitudes().rows(), b.amplitudes().rows());
  const Eigen::Index cols = std::min(a.amplitudes().cols(), b.amplitudes().cols());
  return (a.amplitudes().topLeftCorner(rows, cols).conjugate().cwiseProduct(
              b.amplitudes().topLeftCorner(rows, cols)))
      .sum();
}

double fidelity(const SingleModeState& a, const SingleModeState& b) { return std::norm(inner_product(a, b)); }
double fidelity(const TwoModeState& a, const TwoModeState& b) { return std::norm(inner_product(a, b)); }

std::vector<double> photon_number_distribution(const SingleModeState& s) {
  std::vector<double> p(s.dimension());
  for (std::size_t n = 0; n < p.size(); ++n) p[n] = std::norm(s[n]);
  return p;
}

MarginalDistributions photon_number_distribution(const TwoModeState& s) {
  const Eigen::MatrixXd weights = s.amplitudes().cwiseAbs2();
  MarginalDistributions out;
  out.mode_a.resize(static_cast<std::size_t>(weights.rows()));
  out.mode_b.resize(static_cast<std::size_t>(weights.cols()));
  for (Eigen::Index i = 0; i < weights.rows(); ++i) out.mode_a[static_cast<std::size_t>(i)] = weights.row(i).sum();
  for (Eigen::Index j = 0; j < weights.cols(); ++j) out.mode_b[static_cast<std::size_t>(j)] = weights.col(j).sum();
  return out;
}

std::vector<double> total_photon_distribution(const TwoModeState& s) {
  const Eigen::MatrixXd weights = s.amplitudes().cwiseAbs2();
  std::vector<double> p(static_cast<std::size_t>(weights.rows() + weights.cols() - 1), 0.0);
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    for (Eigen::Index j = 0; j < weights.cols(); ++j) p[static_cast<std::size_t>(i + j)] += weights(i, j);
  return p;
}

TwoModeState tensor(const SingleModeState& a, const SingleModeState& b) {
  return TwoModeState(a.amplitudes() * b.amplitudes().transpose());
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const SingleModeState& s) {
  std::vector<double> re(s.dimension()), im(s.dimension());
  for (std::size_t n = 0; n < s.dimension(); ++n) {
    re[n] = s[n].real();
    im[n] = s[n].imag();
  }
  return {{"cutoff", s.cutoff()}, {"re", re}, {"im", im}};
}

SingleModeState single_mode_state_from_json(const nlohmann::json& j) {
  const auto cutoff = j.at("cutoff").get<std::size_t>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != cutoff + 1 || im.size() != cutoff + 1) {
    throw std::invalid_argument("single_mode_state_from_json: amplitude arrays must have cutoff+1 entries");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(cutoff + 1));
  for (std::size_t n = 0; n <= cutoff; ++n) v[static_cast<Eigen::Index>(n)] = Complex(re[n], im[n]);
  return SingleModeState(std::move(v));
}

nlohmann::json to_json(const TwoModeState& s) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.amplitudes().rows(); ++i) {
    std::vector<double> row_re, row_im;
    for (Eigen::Index j = 0; j < s.amplitudes().cols(); ++j) {
      row_re.push_back(s.amplitudes()(i, j).real());
      row_im.push_back(s.amplitudes()(i, j).imag());
    }
    re.push_back(row_re);
    im.push_back(row_im);
  }
  return {{"cutoffs", {s.cutoff_a(), s.cutoff_b()}}, {"re", re}, {"im", im}};
}

TwoModeState two_mode_state_from_json(const nlohmann::json& j) {
  const auto cutoffs = j.at("cutoffs").get<std::vector<std::size_t>>();
  if (cutoffs.size() != 2) throw std::invalid_argument("two_mode_state_from_json: expected two cutoffs");
  const auto re = j.at("re").get<std::vector<std::vector<double>>>();
  const auto im = j.at("im").get<std::vector<std::vector<double>>>();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(cutoffs[0] + 1), static_cast<Eigen::Index>(cutoffs[1] + 1));
  if (re.size() != cutoffs[0] + 1 || im.size() != re.size()) {
    throw std::invalid_argument("two_mode_state_from_json: row count mismatch");
  }
  for (std::size_t i = 0; i < re.size(); ++i) {
    if (re[i].size() != cutoffs[1] + 1 || im[i].size() != re[i].size()) {
      throw std::invalid_argument("two_mode_state_from_json: column count mismatch");
    }
    for (std::size_t k = 0; k < re[i].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = Complex(re[i][k], im[i][k]);
  }
  return TwoModeState(std::move(m));
}

}  // namespace kerrsim

// Acceptance run: one PASS/FAIL line per criterion with its measured values and runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kerrsim/bosonic_ops.hpp"
#include "kerrsim/chsh.hpp"
#include "kerrsim/coherent_qubit.hpp"
#include "kerrsim/fidelity.hpp"
#include "kerrsim/fock.hpp"
#include "kerrsim/measurement.hpp"
#include "oracles.hpp"

using namespace kerrsim;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok) { pass = pass && ok; }
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;
  std::function<void(Verdict&)> body;
};

void criterion_cat(Verdict& o) {
  for (double alpha : {1.0, 2.0, 3.0, 5.0}) {
    const double b = std::numbers::sqrt2 * alpha;
    const std::size_t cutoff = choose_cutoff(b * b);
    const auto out = kerr_evolve(coherent_fock(b, cutoff), kPi / 2);
    const double f = fidelity(out.normalized(), SingleModeState(oracle::cat_vector(b, cutoff)));
    o.check(f >= 1.0 - 1e-10);
    o.detail << "a=" << alpha << ":1-F=" << 1.0 - f << " ";
  }
}

void criterion_entangled(Verdict& o) {
  for (double alpha : {2.0, 3.0}) {
    const double b = std::numbers::sqrt2 * alpha;
    const std::size_t cutoff = choose_cutoff(b * b);
    const auto cat = kerr_evolve(coherent_fock(b, cutoff), kPi / 2);
    const auto out = BeamSplitter(cutoff).apply(tensor(cat, SingleModeState::vacuum(cutoff)));
    const double f = fidelity(out.normalized(), TwoModeState(oracle::entangled_matrix(alpha, cutoff)));
    o.check(f >= 1.0 - 1e-8);
    o.detail << "a=" << alpha << ":1-F=" << 1.0 - f << " ";
  }
}

std::vector<std::vector<double>> sweep_exact, sweep_fock;
const std::vector<double> kSweepN{30.0, 50.0, 100.0};

void criterion_dual_path(Verdict& o) {
  const auto grid = linear_grid(-0.01, 0.01, 201);
  sweep_exact.assign(kSweepN.size(), {});
  sweep_fock.assign(kSweepN.size(), {});
  double worst = 0.0;
  for (std::size_t k = 0; k < kSweepN.size(); ++k) {
    const double alpha = std::sqrt(kSweepN[k] / 2);
    for (double x : grid) {
      const double e = fidelity_exact(kSweepN[k], x), f = fidelity_fock(alpha, kPi / 2 + x);
      sweep_exact[k].push_back(e);
      sweep_fock[k].push_back(f);
      worst = std::max(worst, std::abs(e - f));
    }
  }
  o.check(worst < 1e-8);
  o.detail << "max|fock-exact|=" << worst;
}

void criterion_ordering(Verdict& o) {
  const auto grid = linear_grid(-0.01, 0.01, 201);
  std::size_t checked = 0, violations = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) continue;
    ++checked;
    const bool ordered = sweep_exact[2][i] < sweep_exact[1][i] && sweep_exact[1][i] < sweep_exact[0][i];
    if (!ordered) ++violations;
  }
  o.check(checked == 100 && violations == 0);
  o.detail << "positive points=" << checked << " violations=" << violations;
}

void criterion_scaling(Verdict& o) {
  const std::vector<double> ns{20.0, 30.0, 50.0, 100.0, 200.0};
  const auto fit = fit_scaling(ns);
  o.check(fit.exponent >= -1.55 && fit.exponent <= -1.45 && fit.residual < 0.02);
  o.detail << "exponent=" << fit.exponent << " residual=" << fit.residual;
}

void criterion_gaussian(Verdict& o) {
  for (auto [n, tol] : {std::pair{100.0, 0.05}, std::pair{30.0, 0.10}}) {
    const double g = half_width(fidelity_gaussian, n);
    const double e = oracle::half_width_series(n);
    const double rel = std::abs(g - e) / e;
    o.check(rel <= tol);
    o.detail << "N=" << n << ":rel=" << rel << " ";
  }
}

void criterion_kerr(Verdict& o) {
  for (Complex beta : {Complex(1.0, 0.0), Complex(2.0, 1.0)}) {
    const std::size_t cutoff = choose_cutoff(std::norm(beta));
    const auto s = coherent_fock(beta, cutoff);
    const double f = fidelity(kerr_evolve(s, kPi), SingleModeState(oracle::coherent_vector(-beta, cutoff)));
    const double diff = (kerr_evolve(s, 2 * kPi).amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff();
    o.check(f >= 1.0 - 1e-10 && diff <= 1e-15);
    o.detail << "b=" << beta.real() << "+" << beta.imag() << "i:1-F(pi)=" << 1.0 - f << ",max|K(2pi)-1|=" << diff << " ";
  }
}

void criterion_discrimination(Verdict& o) {
  const DiscriminationSetup setup{3.0, 9};
  const double correct_oracle = static_cast<double>(oracle::poisson_upper_tail(18.0L, 9));
  for (double sign : {1.0, -1.0}) {
    const auto d = qubit_measure(coherent_fock(sign * 3.0), setup);
    const double correct = sign > 0 ? d.p_plus : d.p_minus, wrong = sign > 0 ? d.p_minus : d.p_plus;
    o.check(correct > 0.98 && wrong < 1e-3 && std::abs(correct - correct_oracle) < 1e-9 && std::abs(wrong) < 1e-9);
    o.detail << (sign > 0 ? "+" : "-") << "a:correct=" << correct << ",wrong=" << wrong
             << ",|dev|=" << std::abs(correct - correct_oracle) << " ";
  }
}

void criterion_synthesis(Verdict& o) {
  const Eigen::Matrix2cd h =
      (Eigen::Matrix2cd() << 1.0, 1.0, 1.0, -1.0).finished() * Complex(0.0, -1.0 / std::numbers::sqrt2);
  const std::vector<std::pair<const char*, Eigen::Matrix2cd>> targets{
      {"I", Eigen::Matrix2cd::Identity()}, {"Rx(-pi/2)", oracle::axis_rotation(oracle::pauli_x(), -kPi / 2)}, {"H", h}};
  for (const auto& [name, u] : targets) {
    double previous = 1e300;
    o.detail << name << ":";
    for (double alpha : {2.0, 3.0, 4.0, 6.0}) {
      const QubitEncoding enc(alpha);
      const auto recipe = synthesize_rotation(u, enc);
      const double d = oracle::phase_min_distance(effective_action(recipe.to_circuit(), enc).matrix, u);
      o.check(d <= previous + 1e-12);
      if (alpha == 4.0) o.check(d <= 0.05);
      previous = d;
      o.detail << d << (alpha == 6.0 ? " " : ",");
    }
  }
}

void criterion_bell(Verdict& o) {
  const ChshExperiment exact(2.5, ChshSettings::textbook_optimal());
  const double s = exact.exact_s(0.0);
  ChshOptions opts;
  opts.sampled = SampledMode{42, 1000000};
  const ChshExperiment sampled(2.5, ChshSettings::textbook_optimal(), opts);
  const auto a = sampled.evaluate(0.0), b = sampled.evaluate(0.0);
  const bool identical = a.S == b.S && a.correlations == b.correlations && a.standard_error == b.standard_error;
  const double z = std::abs(a.S - s) / a.standard_error;
  o.check(s >= 2.7 && s <= 2.0 * std::numbers::sqrt2 + 0.01 && z <= 5.0 && identical);
  o.detail << "S_exact=" << s << " S_sampled=" << a.S << " SE=" << a.standard_error << " z=" << z
           << " rerun_identical=" << (identical ? "yes" : "no");
}

void criterion_phase_precision(Verdict& o) {
  const std::vector<double> alphas{1.5, 2.0, 2.5, 3.0};
  const auto sens = phase_sensitivity(alphas);
  o.check(sens.excluded_alphas.empty() && sens.fit.exponent >= -1.65 && sens.fit.exponent <= -1.35);
  o.detail << "slope=" << sens.fit.exponent << " delta*=";
  for (const auto& p : sens.points) o.detail << p.delta_star << (&p == &sens.points.back() ? "" : ",");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "cat state", 1.0, criterion_cat},
      {2, "entangled coherent state", 5.0, criterion_entangled},
      {3, "dual-path fidelity", 10.0, criterion_dual_path},
      {4, "curve ordering", 10.0, criterion_ordering},
      {5, "half-width scaling", 10.0, criterion_scaling},
      {6, "gaussian half-width", 2.0, criterion_gaussian},
      {7, "kerr identities", 1.0, criterion_kerr},
      {8, "discrimination", 2.0, criterion_discrimination},
      {9, "rotation synthesis", 30.0, criterion_synthesis},
      {10, "bell violation", 60.0, criterion_bell},
      {11, "phase precision scaling", 300.0, criterion_phase_precision},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict o;
    o.detail.precision(6);
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %-26s %s  %s  [%.3f s / limit %.0f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.str().c_str(), seconds, c.time_limit, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#include "spinxfer/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinxfer/errors.hpp"

namespace spinxfer {

void ChainConfig::validate() const {
  if (n_sites < 2) {
    throw InputError("chain needs at least 2 sites, got " + std::to_string(n_sites));
  }
  if (!(j_max > 0.0) || !std::isfinite(j_max)) {
    throw InputError("j_max must be positive and finite");
  }
}

SingleExcitationHamiltonian::SingleExcitationHamiltonian(std::vector<double> onsite,
                                                         std::vector<double> couplings)
    : onsite_(std::move(onsite)), couplings_(std::move(couplings)) {
  if (onsite_.size() < 2) {
    throw InputError("Hamiltonian needs at least 2 sites");
  }
  if (couplings_.size() + 1 != onsite_.size()) {
    throw InputError("expected " + std::to_string(onsite_.size() - 1) + " couplings for " +
                     std::to_string(onsite_.size()) + " sites, got " +
                     std::to_string(couplings_.size()));
  }
}

Eigen::MatrixXd SingleExcitationHamiltonian::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = onsite_[j];
  }
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    m(j, j + 1) = couplings_[j];
    m(j + 1, j) = couplings_[j];
  }
  return m;
}

void TridiagonalView::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t n = size();
  if (n == 0) return;
  out[0] = onsite[0] * in[0];
  for (std::size_t j = 0; j + 1 < n; ++j) {
    out[j] += couplings[j] * in[j + 1];
    out[j + 1] = onsite[j + 1] * in[j + 1] + couplings[j] * in[j];
  }
}

double TridiagonalView::norm_bound() const noexcept {
  double bound = 0.0;
  const std::size_t n = size();
  for (std::size_t j = 0; j < n; ++j) {
    double row = std::abs(onsite[j]);
    if (j > 0) row += std::abs(couplings[j - 1]);
    if (j + 1 < n) row += std::abs(couplings[j]);
    bound = std::max(bound, row);
  }
  return bound;
}

SingleExcitationHamiltonian build_hamiltonian(const ChainConfig& config,
                                              std::vector<double> onsite,
                                              std::vector<double> couplings) {
  config.validate();
  if (onsite.size() != config.n_sites) {
    throw InputError("onsite energies: expected " + std::to_string(config.n_sites) +
                     " values, got " + std::to_string(onsite.size()));
  }
  if (couplings.size() != config.n_sites - 1) {
    throw InputError("couplings: expected " + std::to_string(config.n_sites - 1) +
                     " values, got " + std::to_string(couplings.size()));
  }
  return SingleExcitationHamiltonian(std::move(onsite), std::move(couplings));
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(TridiagonalView h, int options) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (Eigen::Index j = 0; j < n; ++j) diag[j] = h.onsite[j];
  for (Eigen::Index j = 0; j + 1 < n; ++j) sub[j] = h.couplings[j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(n);
  solver.computeFromTridiagonal(diag, sub, options);
  return solver;
}

}  // namespace

std::vector<double> spectrum(const SingleExcitationHamiltonian& h) {
  const auto solver = solve(h.view(), Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

Eigensystem eigensystem(TridiagonalView h) {
  const auto solver = solve(h, Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

StateVector::StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) {
    throw InputError("state vector is empty");
  }
  const double n2 = std::accumulate(amplitudes_.begin(), amplitudes_.end(), 0.0,
                                    [](double s, const Complex& a) { return s + std::norm(a); });
  if (!(std::abs(n2 - 1.0) <= kNormTolerance)) {
    throw InputError("state vector is not normalized (norm^2 = " + std::to_string(n2) + ")");
  }
}

StateVector StateVector::basis(std::size_t n_sites, std::size_t site) {
  if (site >= n_sites) {
    throw InputError("basis site " + std::to_string(site) + " outside chain of " +
                     std::to_string(n_sites));
  }
  std::vector<Complex> a(n_sites);
  a[site] = 1.0;
  return StateVector(std::move(a));
}

double StateVector::norm() const noexcept {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

double wrap_phase(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double circular_distance(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

double protocol_phase(std::size_t n_sites) {
  if (n_sites < 2) {
    throw InputError("protocol phase needs at least 2 sites");
  }
  // (N-1) quarter turns clockwise; reduce exactly on the integer count.
  const auto quarters = static_cast<int>((n_sites - 1) % 4);
  switch (quarters) {
    case 0: return 0.0;
    case 1: return -kPi / 2.0;
    case 2: return kPi;
    default: return kPi / 2.0;
  }
}

double state_fidelity(Complex alpha, Complex beta, Complex a_n) {
  const double pa = std::norm(alpha);
  const double pb = std::norm(beta);
  if (!(std::abs(pa + pb - 1.0) <= kNormTolerance)) {
    throw InputError("qubit state is not normalized");
  }
  const double amp = std::abs(a_n);
  const double phi = std::arg(a_n);
  return pa + pb * (1.0 - 2.0 * pa) * amp * amp + 2.0 * pa * pb * amp * std::cos(phi);
}

double mean_fidelity(Complex a_n, double phi0) {
  const double amp = std::min(std::abs(a_n), 1.0);
  const double phi = amp > 0.0 ? std::arg(a_n) : 0.0;
  return 0.5 + amp * amp / 6.0 + amp * std::cos(phi - phi0) / 3.0;
}

TransferResult make_transfer_result(Complex a_n, double phi0) {
  TransferResult r;
  r.a_n = a_n;
  r.probability = std::min(std::norm(a_n), 1.0);
  r.phase = wrap_phase(std::arg(a_n));
  r.fidelity = mean_fidelity(a_n, phi0);
  return r;
}

}  // namespace spinxfer

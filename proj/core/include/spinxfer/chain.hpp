#pragma once

// Single-excitation XX chain: Hamiltonian, spectra, and transfer fidelity.
//
// Units: energies and couplings are expressed in the same unit as
// ChainConfig::j_max, times in its inverse, hbar = 1.
//
// Hopping sign: the matrix element between sites j and j+1 is +J_j. With
// psi(t) = exp(-i H t) psi(0) this is the convention in which a resonant
// pi/2 pulse maps A_j to -i A_{j+1}, so an excitation arriving at site N of
// a perfect chain carries the phase (-i)^(N-1). The opposite sign is the
// same physics under the gauge A_j -> (-1)^j A_j and would turn every odd
// power of -i into +i.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace spinxfer {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerance on the squared norm of a StateVector.
inline constexpr double kNormTolerance = 1e-9;

struct ChainConfig {
  std::size_t n_sites = 25;
  double j_max = 1.0;

  /// Throws InputError unless n_sites >= 2 and j_max > 0.
  void validate() const;

  bool operator==(const ChainConfig&) const = default;
};

/// Non-owning view of a tridiagonal Hamiltonian: diagonal h_j and
/// off-diagonal J_j.
struct TridiagonalView {
  std::span<const double> onsite;
  std::span<const double> couplings;

  std::size_t size() const noexcept { return onsite.size(); }

  /// out = H * in. Both spans must have size() elements and must not alias.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;

  /// Gershgorin bound on the spectral radius.
  double norm_bound() const noexcept;
};

/// Real symmetric tridiagonal matrix with diagonal h_j and off-diagonal J_j.
class SingleExcitationHamiltonian {
 public:
  SingleExcitationHamiltonian(std::vector<double> onsite, std::vector<double> couplings);

  std::size_t size() const noexcept { return onsite_.size(); }
  std::span<const double> onsite() const noexcept { return onsite_; }
  std::span<const double> couplings() const noexcept { return couplings_; }

  TridiagonalView view() const noexcept { return {onsite_, couplings_}; }
  Eigen::MatrixXd dense() const;

  void apply(std::span<const Complex> in, std::span<Complex> out) const { view().apply(in, out); }
  double norm_bound() const noexcept { return view().norm_bound(); }

 private:
  std::vector<double> onsite_;
  std::vector<double> couplings_;
};

SingleExcitationHamiltonian build_hamiltonian(const ChainConfig& config,
                                              std::vector<double> onsite,
                                              std::vector<double> couplings);

/// Eigenpairs of a Hamiltonian; values ascending, vectors column-wise.
struct Eigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

std::vector<double> spectrum(const SingleExcitationHamiltonian& h);
Eigensystem eigensystem(TridiagonalView h);
inline Eigensystem eigensystem(const SingleExcitationHamiltonian& h) { return eigensystem(h.view()); }

/// Amplitudes A_j on the single-excitation basis, unit norm.
class StateVector {
 public:
  /// Throws InputError if the squared norm differs from 1 by more than
  /// kNormTolerance.
  explicit StateVector(std::vector<Complex> amplitudes);

  /// Excitation localized on `site` (zero-based).
  static StateVector basis(std::size_t n_sites, std::size_t site);

  std::size_t size() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  const Complex& last() const { return amplitudes_.back(); }
  double norm() const noexcept;

 private:
  std::vector<Complex> amplitudes_;
};

/// Outcome of one protocol run measured at the last site.
struct TransferResult {
  Complex a_n;
  double probability = 0.0;
  double phase = 0.0;     // arg(a_n) in (-pi, pi]
  double fidelity = 0.0;  // mean fidelity with the protocol phase compensated
};

TransferResult make_transfer_result(Complex a_n, double phi0);

/// Fidelity of one qubit state alpha|0> + beta|1> sent through the chain.
double state_fidelity(Complex alpha, Complex beta, Complex a_n);

/// Qubit fidelity averaged over the Bloch sphere, after removing the known
/// phase phi0 from arg(a_n). |a_n| is clamped to 1.
double mean_fidelity(Complex a_n, double phi0);

/// -(pi/2)(N-1) reduced to (-pi, pi].
double protocol_phase(std::size_t n_sites);

/// Reduces an angle to (-pi, pi].
double wrap_phase(double angle);

/// Shortest distance between two angles on the circle, in [0, pi].
double circular_distance(double a, double b);

}  // namespace spinxfer

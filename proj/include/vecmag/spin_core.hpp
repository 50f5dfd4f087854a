#pragma once

// Collective-spin algebra in the Dicke basis |J, m>, m = J, J-1, ..., -J.
//
// Index 0 of every state vector and operator matrix is m = J; index k holds
// m = J - k. All operators act on the symmetric subspace of N two-level
// particles, so the dimension is N + 1.

#include <array>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "vecmag/errors.hpp"

namespace vecmag {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);
inline int index_of(Axis axis) { return static_cast<int>(axis); }

class EnsembleDims {
 public:
  explicit EnsembleDims(int particles);

  int particles() const noexcept { return particles_; }
  double total_spin() const noexcept { return 0.5 * particles_; }
  int dim() const noexcept { return particles_ + 1; }
  bool integer_spin() const noexcept { return particles_ % 2 == 0; }
  /// Magnetic quantum number stored at basis index `k`.
  double m(int k) const noexcept { return total_spin() - k; }

  friend bool operator==(const EnsembleDims&, const EnsembleDims&) = default;

 private:
  int particles_;
};

/// Pure probe state. Amplitudes are normalized to 1 within 1e-9 on construction.
class DickeState {
 public:
  DickeState(EnsembleDims dims, Vector amplitudes);

  /// Builds a state from an arbitrary nonzero vector, rescaling it to unit norm.
  static DickeState normalized(EnsembleDims dims, Vector amplitudes);

  const EnsembleDims& dims() const noexcept { return dims_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  cplx amplitude(int k) const { return amplitudes_(k); }
  double norm() const { return amplitudes_.norm(); }

 private:
  EnsembleDims dims_;
  Vector amplitudes_;
};

/// Hermitian operator on the Dicke space.
class CollectiveOperator {
 public:
  CollectiveOperator(EnsembleDims dims, Matrix matrix, std::string label);

  const EnsembleDims& dims() const noexcept { return dims_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  const std::string& label() const noexcept { return label_; }

  CollectiveOperator squared() const;
  CollectiveOperator scaled(double factor) const;

  friend CollectiveOperator operator+(const CollectiveOperator& a, const CollectiveOperator& b);

 private:
  EnsembleDims dims_;
  Matrix matrix_;
  std::string label_;
};

/// Uniform field B in angular-frequency units; the physical coupling is gamma * B.
struct FieldVector {
  double bx = 0.0;
  double by = 0.0;
  double bz = 0.0;
  double gamma = 1.0;

  double component(Axis axis) const;
  /// gamma * B_axis, the rate at which phase accumulates along `axis`.
  double coupling(Axis axis) const { return gamma * component(axis); }
  FieldVector with_component(Axis axis, double value) const;
};

struct Unitary {
  EnsembleDims dims;
  Matrix matrix;

  DickeState apply(const DickeState& state) const;
  /// Composition: (a * b) applies b first.
  friend Unitary operator*(const Unitary& a, const Unitary& b);
};

/// Ĵ_axis built from the ladder action J±|J,m> = sqrt(J(J+1) - m(m±1)) |J,m±1>.
CollectiveOperator collective_operator(const EnsembleDims& dims, Axis axis);

/// γ(Bx Ĵx + By Ĵy + Bz Ĵz).
CollectiveOperator field_hamiltonian(const EnsembleDims& dims, const FieldVector& field);

/// Cached eigendecomposition G = V diag(λ) V† for repeated exponentials e^{-iGt}.
class SpectralGenerator {
 public:
  explicit SpectralGenerator(const CollectiveOperator& generator);

  const EnsembleDims& dims() const noexcept { return dims_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

  Unitary unitary(double t) const;
  /// e^{-iGt}|psi> without forming the full matrix.
  Vector apply(double t, const Vector& psi) const;

 private:
  EnsembleDims dims_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
};

/// e^{-iGt} via Hermitian eigendecomposition.
Unitary unitary_from_generator(const CollectiveOperator& generator, double t);

DickeState scs_state(const EnsembleDims& dims);
/// (|J,J> + |J,-J>)/sqrt(2).
DickeState ghz_state(const EnsembleDims& dims);
/// Dicke basis state |J, J - k>.
DickeState basis_state(const EnsembleDims& dims, int k);

double expectation(const DickeState& state, const CollectiveOperator& op);
double variance(const DickeState& state, const CollectiveOperator& op);
double fidelity(const DickeState& a, const DickeState& b);

/// [A, B] = AB - BA.
Matrix commutator(const Matrix& a, const Matrix& b);

}  // namespace vecmag

#include "vecmag/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vecmag {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kNormTol = 1e-9;
constexpr double kImagTol = 1e-10;

void require_same_dims(const EnsembleDims& a, const EnsembleDims& b, const char* where) {
  if (!(a == b)) {
    std::ostringstream os;
    os << where << ": dimension mismatch (N=" << a.particles() << " vs N=" << b.particles() << ")";
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  throw InvalidArgument("unknown axis '" + std::string(text) + "' (expected x, y or z)");
}

EnsembleDims::EnsembleDims(int particles) : particles_(particles) {
  if (particles <= 0) {
    throw InvalidArgument("particle count N must be positive, got " + std::to_string(particles));
  }
}

DickeState::DickeState(EnsembleDims dims, Vector amplitudes)
    : dims_(dims), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != dims_.dim()) {
    throw DimensionMismatch("DickeState: expected " + std::to_string(dims_.dim()) +
                            " amplitudes, got " + std::to_string(amplitudes_.size()));
  }
  const double n2 = amplitudes_.squaredNorm();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "DickeState: amplitudes not normalized (|psi|^2 = " << n2 << ")";
    throw NumericalError(os.str());
  }
}

DickeState DickeState::normalized(EnsembleDims dims, Vector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("DickeState::normalized: zero or non-finite vector");
  }
  return DickeState(dims, amplitudes / n);
}

CollectiveOperator::CollectiveOperator(EnsembleDims dims, Matrix matrix, std::string label)
    : dims_(dims), matrix_(std::move(matrix)), label_(std::move(label)) {
  if (matrix_.rows() != dims_.dim() || matrix_.cols() != dims_.dim()) {
    throw DimensionMismatch("CollectiveOperator '" + label_ + "': matrix is not " +
                            std::to_string(dims_.dim()) + "x" + std::to_string(dims_.dim()));
  }
  const double scale = std::max(1.0, matrix_.norm());
  const double asym = (matrix_ - matrix_.adjoint()).norm();
  if (asym > kHermitianTol * scale) {
    std::ostringstream os;
    os << "CollectiveOperator '" << label_ << "' is not Hermitian (|A - A^dag|_F = " << asym << ")";
    throw InvalidArgument(os.str());
  }
}

CollectiveOperator CollectiveOperator::squared() const {
  Matrix sq = matrix_ * matrix_;
  // Round-off can leave a tiny anti-Hermitian part in the product.
  sq = 0.5 * (sq + sq.adjoint()).eval();
  return CollectiveOperator(dims_, std::move(sq), label_ + "^2");
}

CollectiveOperator CollectiveOperator::scaled(double factor) const {
  std::ostringstream os;
  os << factor << "*" << label_;
  return CollectiveOperator(dims_, matrix_ * factor, os.str());
}

CollectiveOperator operator+(const CollectiveOperator& a, const CollectiveOperator& b) {
  require_same_dims(a.dims(), b.dims(), "operator+");
  return CollectiveOperator(a.dims(), a.matrix() + b.matrix(), a.label() + "+" + b.label());
}

double FieldVector::component(Axis axis) const {
  switch (axis) {
    case Axis::x: return bx;
    case Axis::y: return by;
    case Axis::z: return bz;
  }
  return 0.0;
}

FieldVector FieldVector::with_component(Axis axis, double value) const {
  FieldVector out = *this;
  switch (axis) {
    case Axis::x: out.bx = value; break;
    case Axis::y: out.by = value; break;
    case Axis::z: out.bz = value; break;
  }
  return out;
}

DickeState Unitary::apply(const DickeState& state) const {
  require_same_dims(dims, state.dims(), "Unitary::apply");
  return DickeState(dims, matrix * state.amplitudes());
}

Unitary operator*(const Unitary& a, const Unitary& b) {
  require_same_dims(a.dims, b.dims, "Unitary composition");
  return Unitary{a.dims, a.matrix * b.matrix};
}

CollectiveOperator collective_operator(const EnsembleDims& dims, Axis axis) {
  const int d = dims.dim();
  const double j = dims.total_spin();
  Matrix m = Matrix::Zero(d, d);
  if (axis == Axis::z) {
    for (int k = 0; k < d; ++k) m(k, k) = dims.m(k);
    return CollectiveOperator(dims, std::move(m), "Jz");
  }
  // J+ maps index k (m) to index k-1 (m+1).
  Matrix raise = Matrix::Zero(d, d);
  for (int k = 1; k < d; ++k) {
    const double mk = dims.m(k);
    raise(k - 1, k) = std::sqrt(j * (j + 1.0) - mk * (mk + 1.0));
  }
  const Matrix lower = raise.adjoint();
  if (axis == Axis::x) {
    m = 0.5 * (raise + lower);
    return CollectiveOperator(dims, std::move(m), "Jx");
  }
  m = (raise - lower) / cplx(0.0, 2.0);
  return CollectiveOperator(dims, std::move(m), "Jy");
}

CollectiveOperator field_hamiltonian(const EnsembleDims& dims, const FieldVector& field) {
  Matrix h = Matrix::Zero(dims.dim(), dims.dim());
  for (Axis a : kAxes) {
    const double c = field.coupling(a);
    if (c != 0.0) h += c * collective_operator(dims, a).matrix();
  }
  return CollectiveOperator(dims, std::move(h), "H_B");
}

SpectralGenerator::SpectralGenerator(const CollectiveOperator& generator)
    : dims_(generator.dims()) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(generator.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver failed for '" << generator.label() << "' (N=" << dims_.particles()
       << ", |G|_F=" << generator.matrix().norm() << ", Eigen info=" << static_cast<int>(solver.info())
       << ")";
    throw NumericalError(os.str());
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Unitary SpectralGenerator::unitary(double t) const {
  const Vector phases = (eigenvalues_.cast<cplx>() * cplx(0.0, -t)).array().exp();
  return Unitary{dims_, eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint()};
}

Vector SpectralGenerator::apply(double t, const Vector& psi) const {
  const Vector phases = (eigenvalues_.cast<cplx>() * cplx(0.0, -t)).array().exp();
  Vector coeffs = eigenvectors_.adjoint() * psi;
  coeffs.array() *= phases.array();
  return eigenvectors_ * coeffs;
}

Unitary unitary_from_generator(const CollectiveOperator& generator, double t) {
  if (t == 0.0) {
    return Unitary{generator.dims(), Matrix::Identity(generator.dims().dim(), generator.dims().dim())};
  }
  return SpectralGenerator(generator).unitary(t);
}

DickeState basis_state(const EnsembleDims& dims, int k) {
  if (k < 0 || k >= dims.dim()) throw InvalidArgument("basis index out of range");
  Vector v = Vector::Zero(dims.dim());
  v(k) = 1.0;
  return DickeState(dims, std::move(v));
}

DickeState scs_state(const EnsembleDims& dims) { return basis_state(dims, 0); }

DickeState ghz_state(const EnsembleDims& dims) {
  Vector v = Vector::Zero(dims.dim());
  v(0) = M_SQRT1_2;
  v(dims.dim() - 1) = M_SQRT1_2;
  return DickeState(dims, std::move(v));
}

double expectation(const DickeState& state, const CollectiveOperator& op) {
  require_same_dims(state.dims(), op.dims(), "expectation");
  const cplx value = state.amplitudes().dot(op.matrix() * state.amplitudes());
  const double scale = std::max(1.0, std::abs(value));
  if (std::abs(value.imag()) > kImagTol * scale) {
    std::ostringstream os;
    os << "expectation of '" << op.label() << "' has imaginary part " << value.imag();
    throw NumericalError(os.str());
  }
  return value.real();
}

double variance(const DickeState& state, const CollectiveOperator& op) {
  const double mean = expectation(state, op);
  const double second = expectation(state, op.squared());
  return std::max(0.0, second - mean * mean);
}

double fidelity(const DickeState& a, const DickeState& b) {
  require_same_dims(a.dims(), b.dims(), "fidelity");
  const double f = std::norm(a.amplitudes().dot(b.amplitudes()));
  return std::clamp(f, 0.0, 1.0);
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace vecmag

#include "dtc/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace dtc::krylov {

namespace {

constexpr int kInitialDim = 12;
constexpr int kMaxDim = 96;
constexpr int kMaxHalvings = 10;

double vec_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& a : v) {
    s += std::norm(a);
  }
  return std::sqrt(s);
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += std::conj(a[i]) * b[i];
  }
  return s;
}

// Lanczos basis grown one vector at a time. alpha/beta define the
// tridiagonal projection T; beta[k] couples basis k and k+1.
class LanczosBasis {
 public:
  LanczosBasis(const IsingHamiltonian& h, std::span<const Complex> start, int max_dim, bool full_reorth)
      : h_(h),
        dim_(start.size()),
        max_dim_(std::min<std::size_t>(max_dim, start.size())),
        full_reorth_(full_reorth) {
    start_norm_ = vec_norm(start);
    basis_.emplace_back(start.begin(), start.end());
    for (Complex& a : basis_.back()) {
      a /= start_norm_;
    }
    scratch_.resize(dim_);
  }

  // Extends the basis to `target` vectors (or until breakdown).
  void grow_to(int target) {
    target = std::min<int>(target, static_cast<int>(max_dim_));
    while (!breakdown_ && static_cast<int>(alpha_.size()) < target) {
      const std::size_t j = alpha_.size();
      h_.apply(basis_[j], scratch_);
      const double a = dot(basis_[j], scratch_).real();
      alpha_.push_back(a);
      if (full_reorth_) {
        // Applied twice for stability.
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& v : basis_) {
            orthogonalize(v);
          }
        }
      } else {
        // Three-term recurrence; lost orthogonality only produces ghost Ritz
        // values, which do not spoil exp(-iHt)v.
        orthogonalize(basis_[j]);
        if (j > 0) {
          orthogonalize(basis_[j - 1]);
        }
      }
      const double b = vec_norm(scratch_);
      beta_.push_back(b);
      if (b <= 1e-13 * (std::abs(a) + 1.0) || basis_.size() == dim_) {
        breakdown_ = true;
        break;
      }
      if (static_cast<int>(alpha_.size()) < static_cast<int>(max_dim_)) {
        basis_.emplace_back(scratch_.begin(), scratch_.end());
        for (Complex& x : basis_.back()) {
          x /= b;
        }
      }
    }
  }

  void orthogonalize(const std::vector<Complex>& v) {
    const Complex c = dot(v, scratch_);
    for (std::size_t i = 0; i < dim_; ++i) {
      scratch_[i] -= c * v[i];
    }
  }

  int size() const { return static_cast<int>(alpha_.size()); }
  bool breakdown() const { return breakdown_; }
  bool exhausted() const { return breakdown_ || size() >= static_cast<int>(max_dim_); }
  double start_norm() const { return start_norm_; }
  double trailing_beta() const { return breakdown_ ? 0.0 : beta_.back(); }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> projected() const {
    const int m = size();
    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 0; k < m; ++k) {
      diag[k] = alpha_[k];
    }
    for (int k = 0; k + 1 < m; ++k) {
      sub[k] = beta_[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    return solver;
  }

  // out = start_norm * sum_k coeffs[k] basis[k]
  void combine(const Eigen::VectorXcd& coeffs, std::span<Complex> out, double scale) const {
    std::fill(out.begin(), out.end(), Complex{});
    for (int k = 0; k < coeffs.size(); ++k) {
      const Complex c = scale * coeffs[k];
      const auto& v = basis_[k];
      for (std::size_t i = 0; i < dim_; ++i) {
        out[i] += c * v[i];
      }
    }
  }

 private:
  const IsingHamiltonian& h_;
  std::size_t dim_;
  std::size_t max_dim_;
  double start_norm_ = 0.0;
  bool full_reorth_;
  bool breakdown_ = false;
  std::vector<std::vector<Complex>> basis_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<Complex> scratch_;
};

// Tries one Lanczos step of length t; returns false if the largest subspace
// does not meet the tolerance.
bool try_expm(const IsingHamiltonian& h, double t, std::span<Complex> psi, double tolerance,
              ExpmReport& report) {
  LanczosBasis lanczos(h, psi, kMaxDim, false);
  for (int target = kInitialDim;; target *= 2) {
    lanczos.grow_to(target);
    const auto eig = lanczos.projected();
    const Eigen::MatrixXd& q = eig.eigenvectors();
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(lanczos.size());
    for (int k = 0; k < lanczos.size(); ++k) {
      const Complex phase = std::exp(Complex(0.0, -t * lambda[k]));
      coeffs += (phase * q(0, k)) * q.col(k).cast<Complex>();
    }
    const double error = lanczos.start_norm() * lanczos.trailing_beta() *
                         std::abs(coeffs[lanczos.size() - 1]);
    report.krylov_dim = std::max(report.krylov_dim, lanczos.size());
    report.error_estimate = std::max(report.error_estimate, error);
    if (error < tolerance || lanczos.breakdown()) {
      lanczos.combine(coeffs, psi, lanczos.start_norm());
      return true;
    }
    if (lanczos.exhausted()) {
      return false;
    }
  }
}

}  // namespace

ExpmReport expm_apply(const IsingHamiltonian& h, double t, std::span<Complex> psi, double tolerance) {
  if (psi.size() != h.dim()) {
    throw std::invalid_argument("expm_apply: dimension mismatch");
  }
  ExpmReport report;
  if (t == 0.0 || vec_norm(psi) == 0.0) {
    report.krylov_dim = 0;
    return report;
  }
  std::vector<Complex> backup(psi.begin(), psi.end());
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
    const int slices = 1 << halvings;
    const double dt = t / slices;
    report = ExpmReport{};
    report.substeps = slices;
    bool ok = true;
    for (int s = 0; s < slices && ok; ++s) {
      ok = try_expm(h, dt, psi, tolerance / slices, report);
    }
    if (ok) {
      return report;
    }
    std::copy(backup.begin(), backup.end(), psi.begin());
  }
  throw ConvergenceError("Krylov propagation did not reach tolerance " + std::to_string(tolerance) +
                         " for t = " + std::to_string(t));
}

Eigenpair lowest_eigenpair(const IsingHamiltonian& h, std::span<const Complex> start, double tolerance) {
  if (start.size() != h.dim()) {
    throw std::invalid_argument("lowest_eigenpair: dimension mismatch");
  }
  if (vec_norm(start) == 0.0) {
    throw std::invalid_argument("lowest_eigenpair: zero start vector");
  }
  constexpr int kRestartDim = 60;
  constexpr int kMaxRestarts = 500;

  Eigenpair result;
  result.vector.assign(start.begin(), start.end());
  std::vector<Complex> hx(h.dim());
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    LanczosBasis lanczos(h, result.vector, kRestartDim, true);
    lanczos.grow_to(kRestartDim);
    const auto eig = lanczos.projected();
    result.energy = eig.eigenvalues()[0];
    lanczos.combine(eig.eigenvectors().col(0).cast<Complex>(), result.vector, 1.0);
    const double n = vec_norm(result.vector);
    for (Complex& a : result.vector) {
      a /= n;
    }
    h.apply(result.vector, hx);
    double residual = 0.0;
    for (std::size_t i = 0; i < hx.size(); ++i) {
      residual += std::norm(hx[i] - result.energy * result.vector[i]);
    }
    result.restarts = restart;
    if (std::sqrt(residual) < tolerance * std::max(1.0, std::abs(result.energy)) || lanczos.breakdown()) {
      result.energy = dot(result.vector, hx).real();
      return result;
    }
  }
  throw ConvergenceError("Lanczos ground-state search did not converge");
}

}  // namespace dtc::krylov

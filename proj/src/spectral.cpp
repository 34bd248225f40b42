#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qnet/generator.hpp"

namespace qnet {

namespace {

constexpr std::int64_t kDenseLimit = 3000;

/// S = Pi^{1/2} (-(Q + Q*)/2) Pi^{-1/2}: symmetric PSD, S sqrt(pi) = 0, and
/// the quadratic form matches the Dirichlet form of Q in L2(pi).
Eigen::SparseMatrix<double> symmetrized(const TruncatedGenerator& gen,
                                        const Eigen::VectorXd& pi) {
  const auto& q = gen.matrix();
  const std::int64_t s = gen.size();
  Eigen::VectorXd sqrt_pi = pi.cwiseSqrt();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * q.nonZeros());
  for (int k = 0; k < q.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, k); it; ++it) {
      const auto x = it.row(), y = it.col();
      if (x == y) {
        trip.emplace_back(x, x, -it.value());  // diagonal: exit rate
        continue;
      }
      // -(1/2) q(x,y) sqrt(pi_x/pi_y), plus the mirrored adjoint half
      const double v = -0.5 * it.value() * sqrt_pi(x) / sqrt_pi(y);
      trip.emplace_back(x, y, v);
      trip.emplace_back(y, x, v);
    }
  }
  Eigen::SparseMatrix<double> sym(s, s);
  sym.setFromTriplets(trip.begin(), trip.end());
  sym.makeCompressed();
  return sym;
}

struct LanczosResult {
  double smallest_deflated = 0.0;  // second-smallest eigenvalue of S
  double zero_eigenvalue = 0.0;
  int iterations = 0;
  Eigen::VectorXd vector;
};

/// Extremal eigenvalue by Lanczos with full reorthogonalization on
/// B = sigma I - S - sigma v0 v0^T where v0 = sqrt(pi): the known null vector
/// of S becomes a 0-eigenvector of B and lambda_max(B) = sigma - lambda_2(S).
LanczosResult lanczos_gap(const Eigen::SparseMatrix<double>& sym,
                          const Eigen::VectorXd& sqrt_pi) {
  const std::int64_t n = sym.rows();
  double sigma = 0.0;
  for (int k = 0; k < sym.outerSize(); ++k) {
    double row_abs = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(sym, k); it; ++it) {
      row_abs += std::abs(it.value());
    }
    sigma = std::max(sigma, row_abs);  // Gershgorin: lambda_max(S) <= sigma
  }
  if (sigma == 0.0) sigma = 1.0;

  Eigen::VectorXd v0 = sqrt_pi.normalized();
  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return sigma * x - sym * x - sigma * v0.dot(x) * v0;
  };

  const int max_basis = 260;
  const int max_restarts = 12;
  const double tol = 1e-12 * sigma;

  // deterministic start vector
  Eigen::VectorXd q1(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (std::int64_t i = 0; i < n; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    q1(i) = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
  }

  LanczosResult out;
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  int total_matvecs = 0;
  for (int restart = 0; restart < max_restarts; ++restart) {
    q1 -= v0.dot(q1) * v0;
    q1.normalize();
    basis.assign(1, q1);
    alpha.clear();
    beta.clear();
    bool converged = false;
    bool have_estimate = false;

    for (int j = 0; j < max_basis; ++j) {
      Eigen::VectorXd w = apply(basis.back());
      ++total_matvecs;
      const double a = basis.back().dot(w);
      alpha.push_back(a);
      w -= a * basis.back();
      if (j > 0) w -= beta.back() * basis[basis.size() - 2];
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass) {
        w -= v0.dot(w) * v0;
        for (const auto& b : basis) w -= b.dot(w) * b;
      }
      const double nb = w.norm();

      const int k = static_cast<int>(alpha.size());
      const bool last = (j == max_basis - 1) || nb < 1e-14 * sigma;
      if (k >= 2 && (k % 8 == 0 || last)) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
          t(i, i) = alpha[static_cast<std::size_t>(i)];
          if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const int top = k - 1;
        const double theta = es.eigenvalues()(top);
        const double resid = std::abs(nb * es.eigenvectors()(k - 1, top));
        if (resid < tol || last) {
          out.smallest_deflated = sigma - theta;
          Eigen::VectorXd ritz = Eigen::VectorXd::Zero(n);
          for (int i = 0; i < k; ++i) {
            ritz += es.eigenvectors()(i, top) * basis[static_cast<std::size_t>(i)];
          }
          out.vector = ritz.normalized();
          have_estimate = true;
          converged = resid < tol || nb < 1e-14 * sigma;
          break;
        }
      }
      if (nb < 1e-14 * sigma) break;  // invariant subspace before any estimate
      beta.push_back(nb);
      basis.push_back(w / nb);
    }

    out.iterations = total_matvecs;
    if (converged) return out;
    if (have_estimate) q1 = out.vector;  // thick-restart-lite from the best Ritz vector
  }
  return out;  // best estimate after max_restarts
}

}  // namespace

SpectralResult numeric_gap(const TruncatedGenerator& gen, const Eigen::VectorXd* pi_in) {
  SpectralResult result;
  result.truncation = gen.truncation();
  Eigen::VectorXd pi = pi_in ? *pi_in : stationary_of(gen);
  result.stationary = pi;
  result.detailed_balance_residual = detailed_balance_check(gen, pi);

  const Eigen::SparseMatrix<double> sym = symmetrized(gen, pi);
  const std::int64_t s = gen.size();

  if (s <= kDenseLimit) {
    Eigen::MatrixXd dense(sym);
    dense = 0.5 * (dense + dense.transpose());  // exact symmetry for the solver
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.compute(dense, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("numeric_gap: eigensolve failed to converge");
    }
    const auto& ev = es.eigenvalues();
    result.zero_eigenvalue = ev(0);
    result.gap = ev(1);
    result.method = "symmetric_eigensolve";
    result.gap_vector = es.eigenvectors().col(1);
    const double norm = std::max(std::abs(ev(0)), std::abs(ev(s - 1)));
    if (std::abs(ev(0)) > 1e-9 * std::max(norm, 1.0)) {
      throw std::runtime_error("numeric_gap: smallest eigenvalue is not zero");
    }
  } else {
    Eigen::VectorXd sqrt_pi = pi.cwiseSqrt();
    LanczosResult lz = lanczos_gap(sym, sqrt_pi);
    result.gap = lz.smallest_deflated;
    result.method = "lanczos";
    result.iterations = lz.iterations;
    result.gap_vector = lz.vector;
    // the deflated null vector is exact by construction
    result.zero_eigenvalue = (sym * sqrt_pi).cwiseAbs().maxCoeff();
    if (result.zero_eigenvalue > 1e-9 * std::max(gen.max_exit_rate(), 1.0)) {
      throw std::runtime_error("numeric_gap: stationary vector is not in the null space");
    }
  }
  return result;
}

}  // namespace qnet

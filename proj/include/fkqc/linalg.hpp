#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fkqc {

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NegativeQuadraticForm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Symmetric matrix with cyclic band structure of fixed bandwidth w:
//   diag(t)     contributes to A[t,t]
//   super(k,t)  contributes to A[t,(t+k)%n] and its transpose, 1 <= k <= w.
// Stored values are additive contributions, so wrap-around overlaps at very
// small n (where t+k and t-k can alias the same column) still assemble the
// correct operator.
class CyclicBandedMatrix {
 public:
  CyclicBandedMatrix(std::size_t n, int bandwidth);

  std::size_t dim() const { return n_; }
  int bandwidth() const { return w_; }

  double& diag(std::size_t t) { return diag_[t]; }
  double diag(std::size_t t) const { return diag_[t]; }
  double& super(int k, std::size_t t) { return super_[k - 1][t]; }
  double super(int k, std::size_t t) const { return super_[k - 1][t]; }

  // dense entry A[r][c], accumulated over all stored contributions
  double entry(std::size_t r, std::size_t c) const;

  std::vector<double> apply(const std::vector<double>& x) const;

 private:
  std::size_t n_;
  int w_;
  std::vector<double> diag_;
  std::vector<std::vector<double>> super_;
};

// Cholesky-type factorization. Dimensions >= 64 use a banded factor of the
// leading (n-w) block plus block elimination of the last w indices, which
// absorb the cyclic corner couplings. Smaller systems fall back to a dense
// factor so band/corner aliasing needs no special cases.
class Factorization {
 public:
  std::size_t dim() const { return n_; }

  // throws DimensionMismatch; safe to call concurrently
  std::vector<double> solve(const std::vector<double>& rhs) const;

  friend Factorization factorize(const CyclicBandedMatrix& A);

 private:
  Factorization() = default;

  std::size_t n_ = 0;
  int w_ = 0;
  bool dense_ = false;
  std::vector<double> dense_l_;   // n x n row-major lower factor
  std::vector<double> lband_;     // lband_[k*m+i] = L[i+k][i], banded core
  std::vector<double> z_;         // m x w row-major, Z = L^-1 A_IB
  std::vector<double> ls_;        // w x w row-major lower factor of the Schur block
};

// throws NotPositiveDefinite when a pivot falls below 1e-14 * max|diag|
Factorization factorize(const CyclicBandedMatrix& A);

inline std::vector<double> solve(const Factorization& f, const std::vector<double>& rhs) {
  return f.solve(rhs);
}

double quadratic_form(const std::vector<double>& z, const CyclicBandedMatrix& w);

// sqrt(z^T W z); small negative values from cancellation clamp to 0, values
// below -1e-12*|z|^2 throw NegativeQuadraticForm
double weighted_norm(const std::vector<double>& z, const CyclicBandedMatrix& w);

}  // namespace fkqc

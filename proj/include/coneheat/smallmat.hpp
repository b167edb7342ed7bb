#pragma once

#include <cstddef>
#include <vector>

namespace coneheat {

using Vec = std::vector<double>;

// Euclidean norm scaled by the largest magnitude component, so that points far
// from the origin do not overflow and tiny vectors keep relative accuracy.
double stable_norm(const Vec& x);

double dot(const Vec& a, const Vec& b);

// Dense symmetric matrix, row-major, small n (cone dimensions, n <= 8 in practice).
struct SymMat {
  int n = 0;
  std::vector<double> a;  // n*n entries

  SymMat() = default;
  explicit SymMat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// quadratic form v^T M v
double quad_form(const SymMat& m, const Vec& v);

// Eigenvalues by cyclic Jacobi rotations, ascending order. Converges when the
// off-diagonal Frobenius mass falls below tol * ||M||_F. Intended for small n.
std::vector<double> jacobi_eigenvalues(SymMat m, double tol = 1e-13,
                                       int max_sweeps = 100);

// Thomas algorithm for tridiagonal systems. Diagonals indexed by row; lo[0] and
// up[n-1] are unused. Overwrites rhs with the solution. Requires a diagonally
// dominant (or M-) matrix: no pivoting is performed.
void solve_tridiag(const std::vector<double>& lo, std::vector<double> diag,
                   const std::vector<double>& up, std::vector<double>& rhs);

// LU factorization of a banded matrix with equal lower/upper bandwidth and no
// pivoting (callers guarantee strict diagonal dominance). Row i stores
// band(i, j) for j in [i-bw, i+bw] at offset j-i+bw.
class BandedLU {
 public:
  BandedLU(int n, int bandwidth);

  double& at(int i, int j);
  void factor();
  void solve(std::vector<double>& rhs) const;

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

 private:
  int n_, bw_, stride_;
  std::vector<double> a_;
  bool factored_ = false;
};

}  // namespace coneheat

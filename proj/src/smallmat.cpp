#include "coneheat/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coneheat {

double stable_norm(const Vec& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) {
    double q = v / m;
    s += q * q;
  }
  return m * std::sqrt(s);
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double quad_form(const SymMat& m, const Vec& v) {
  if (static_cast<int>(v.size()) != m.n)
    throw std::invalid_argument("quad_form: size mismatch");
  double s = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) s += m.at(i, j) * v[i] * v[j];
  return s;
}

namespace {

double offdiag_norm(const SymMat& m) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = i + 1; j < m.n; ++j) s += 2.0 * m.at(i, j) * m.at(i, j);
  return std::sqrt(s);
}

double frob_norm(const SymMat& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(SymMat m, double tol, int max_sweeps) {
  if (m.n <= 0) throw std::invalid_argument("jacobi: empty matrix");
  const double scale = frob_norm(m);
  if (scale == 0.0) return std::vector<double>(m.n, 0.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(m) <= tol * scale) break;
    for (int p = 0; p < m.n - 1; ++p) {
      for (int q = p + 1; q < m.n; ++q) {
        double apq = m.at(p, q);
        if (apq == 0.0) continue;
        double app = m.at(p, p), aqq = m.at(q, q);
        double theta = 0.5 * (aqq - app) / apq;
        // stable tangent of the rotation angle
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < m.n; ++k) {
          double akp = m.at(k, p), akq = m.at(k, q);
          m.at(k, p) = c * akp - s * akq;
          m.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m.n; ++k) {
          double apk = m.at(p, k), aqk = m.at(q, k);
          m.at(p, k) = c * apk - s * aqk;
          m.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> ev(m.n);
  for (int i = 0; i < m.n; ++i) ev[i] = m.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

void solve_tridiag(const std::vector<double>& lo, std::vector<double> diag,
                   const std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (lo.size() != n || up.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiag: size mismatch");
  for (std::size_t i = 1; i < n; ++i) {
    double w = lo[i] / diag[i - 1];
    diag[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / diag[i];
}

BandedLU::BandedLU(int n, int bandwidth)
    : n_(n), bw_(bandwidth), stride_(2 * bandwidth + 1),
      a_(static_cast<std::size_t>(n) * (2 * bandwidth + 1), 0.0) {
  if (n <= 0 || bandwidth < 0) throw std::invalid_argument("BandedLU: bad size");
}

double& BandedLU::at(int i, int j) {
  int off = j - i + bw_;
  if (i < 0 || i >= n_ || off < 0 || off >= stride_)
    throw std::out_of_range("BandedLU::at outside band");
  return a_[static_cast<std::size_t>(i) * stride_ + off];
}

void BandedLU::factor() {
  // in-place LU without pivoting; callers guarantee diagonal dominance
  for (int k = 0; k < n_ - 1; ++k) {
    double piv = a_[static_cast<std::size_t>(k) * stride_ + bw_];
    if (piv == 0.0) throw std::runtime_error("BandedLU: zero pivot");
    int iend = std::min(n_ - 1, k + bw_);
    for (int i = k + 1; i <= iend; ++i) {
      double& lik = a_[static_cast<std::size_t>(i) * stride_ + (k - i + bw_)];
      lik /= piv;
      double m = lik;
      int jend = std::min(n_ - 1, k + bw_);
      for (int j = k + 1; j <= jend; ++j) {
        a_[static_cast<std::size_t>(i) * stride_ + (j - i + bw_)] -=
            m * a_[static_cast<std::size_t>(k) * stride_ + (j - k + bw_)];
      }
    }
  }
  factored_ = true;
}

void BandedLU::solve(std::vector<double>& rhs) const {
  if (!factored_) throw std::runtime_error("BandedLU: solve before factor");
  if (static_cast<int>(rhs.size()) != n_)
    throw std::invalid_argument("BandedLU: rhs size");
  for (int i = 1; i < n_; ++i) {
    int jlo = std::max(0, i - bw_);
    double s = rhs[i];
    for (int j = jlo; j < i; ++j)
      s -= a_[static_cast<std::size_t>(i) * stride_ + (j - i + bw_)] * rhs[j];
    rhs[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    int jhi = std::min(n_ - 1, i + bw_);
    double s = rhs[i];
    for (int j = i + 1; j <= jhi; ++j)
      s -= a_[static_cast<std::size_t>(i) * stride_ + (j - i + bw_)] * rhs[j];
    rhs[i] = s / a_[static_cast<std::size_t>(i) * stride_ + bw_];
  }
}

}  // namespace coneheat

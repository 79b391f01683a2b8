#include "floquet_ab/linalg.hpp"

#include "floquet_ab/errors.hpp"
#include "floquet_ab/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace floquet_ab {

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// One unitary rotation G in the (p, q) plane with G^dagger A G zeroing A(p,q).
// G = diag(1, e^{-i alpha}) * [[c, s], [-s, c]] where A(p,q) = |A(p,q)| e^{i alpha}.
void rotate(CMatrix& a, CMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;  // e^{i alpha}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex gqp = -std::conj(phase) * s;  // G(q,p)
  const Complex gqq = std::conj(phase) * c;   // G(q,q)
  const Eigen::Index n = a.rows();

  // A <- A G
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp + gqp * akq;
    a(k, q) = s * akp + gqq * akq;
  }
  // A <- G^dagger A
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk + std::conj(gqp) * aqk;
    a(q, k) = s * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = a(q, p) = 0.0;
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp + gqp * vkq;
    v(k, q) = s * vkp + gqq * vkq;
  }
}

EigenSystem jacobi(CMatrix a, const JacobiOptions& options) {
  const Eigen::Index n = a.rows();
  CMatrix v = CMatrix::Identity(n, n);
  // Work on the exactly Hermitian part.
  a = (0.5 * (a + a.adjoint())).eval();

  const double total = a.norm();
  const double threshold = options.rel_tol * total;
  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off > threshold) {
    if (sweep == options.max_sweeps) {
      std::ostringstream os;
      os << "Jacobi eigensolver did not converge in " << options.max_sweeps
         << " sweeps (off-diagonal norm " << off << ", threshold " << threshold << ")";
      throw ConvergenceError(os.str(), off);
    }
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    off = off_diagonal_norm(a);
    ++sweep;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

  EigenSystem es;
  es.values.resize(n);
  es.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    es.values(k) = a(src, src).real();
    Eigen::VectorXcd col = v.col(src);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > best) {
        best = std::abs(col(i));
        arg = i;
      }
    }
    if (best > 0) col *= std::conj(col(arg)) / best;
    col(arg) = best;
    es.vectors.col(k) = col;
  }
  return es;
}

}  // namespace

double EigenSystem::unitarity_defect() const { return floquet_ab::unitarity_defect(vectors); }

double EigenSystem::reconstruction_defect(const CMatrix& h) const {
  const CMatrix rebuilt = vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
  return (rebuilt - h).cwiseAbs().maxCoeff();
}

EigenSystem eigh(const LabeledHermitian& h, const JacobiOptions& options) {
  h.validate();
  EigenSystem es = jacobi(h.entries, options);
  es.labels = h.labels;
  return es;
}

EigenSystem eigh(const CMatrix& h, const JacobiOptions& options) {
  LabeledHermitian lh;
  lh.entries = h;
  lh.labels.assign(static_cast<std::size_t>(h.rows()), label_g());
  lh.validate();
  return jacobi(h, options);
}

double unitarity_defect(const CMatrix& u) {
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

double wrap_phase(double theta) {
  double w = std::remainder(theta, 2.0 * units::kPi);  // [-pi, pi]
  if (w <= -units::kPi) w += 2.0 * units::kPi;
  return w;
}

double wrap_phase_positive(double theta) {
  double w = std::fmod(theta, 2.0 * units::kPi);
  if (w < 0) w += 2.0 * units::kPi;
  if (w >= 2.0 * units::kPi) w -= 2.0 * units::kPi;
  return w;
}

std::vector<double> unitary_eigenphases(const CMatrix& u) {
  if (u.rows() == 0 || u.rows() != u.cols()) throw ValidationError("unitary must be square");
  const double defect = unitarity_defect(u);
  if (!(defect < 1e-6)) {
    std::ostringstream os;
    os << "matrix is not unitary (defect " << defect << ")";
    throw ValidationError(os.str());
  }
  // U is normal, so its Hermitian and anti-Hermitian parts commute. Diagonalize
  // the cosine part, then split clusters of equal cosine with the sine part.
  const CMatrix cos_part = 0.5 * (u + u.adjoint());
  const CMatrix sin_part = (u - u.adjoint()) / Complex(0.0, 2.0);
  const EigenSystem first = eigh(cos_part);
  CMatrix vectors = first.vectors;

  const Eigen::Index n = u.rows();
  constexpr double kClusterTol = 1e-8;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && first.values(stop) - first.values(stop - 1) < kClusterTol) ++stop;
    if (stop - start > 1) {
      const CMatrix q = vectors.middleCols(start, stop - start);
      const CMatrix restricted = q.adjoint() * sin_part * q;
      const EigenSystem inner = eigh(0.5 * (restricted + restricted.adjoint()).eval());
      vectors.middleCols(start, stop - start) = q * inner.vectors;
    }
    start = stop;
  }

  std::vector<double> phases(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex rayleigh = vectors.col(k).dot(u * vectors.col(k));  // v^dagger U v
    phases[static_cast<std::size_t>(k)] = wrap_phase(std::arg(rayleigh));
  }
  std::sort(phases.begin(), phases.end());
  return phases;
}

CircularMatch match_on_circle(std::span<const double> a, std::span<const double> b, double period) {
  if (a.size() != b.size()) throw ValidationError("cannot match point sets of different size");
  if (!(period > 0)) throw ValidationError("circle period must be positive");
  const std::size_t n = a.size();
  if (n == 0) return {};
  auto wrap = [period](double x) {
    double w = std::fmod(x, period);
    return w < 0 ? w + period : w;
  };
  std::vector<double> sa(n), sb(n);
  std::transform(a.begin(), a.end(), sa.begin(), wrap);
  std::transform(b.begin(), b.end(), sb.begin(), wrap);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  CircularMatch best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t shift = 0; shift < n; ++shift) {
    double max_d = 0.0, sum_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::abs(sa[i] - sb[(i + shift) % n]);
      d = std::min(d, period - d);
      max_d = std::max(max_d, d);
      sum_d += d;
    }
    if (max_d < best.max_distance) best = {max_d, sum_d / static_cast<double>(n)};
  }
  return best;
}

}  // namespace floquet_ab

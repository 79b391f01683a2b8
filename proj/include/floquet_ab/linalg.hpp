#pragma once

#include "floquet_ab/core_model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace floquet_ab {

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns are eigenvectors
  std::vector<BasisLabel> labels;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.size()); }
  double unitarity_defect() const;
  double reconstruction_defect(const CMatrix& h) const;
};

struct JacobiOptions {
  double rel_tol = 1e-12;  // off-diagonal Frobenius norm relative to ||H||_F
  int max_sweeps = 100;
};

// Cyclic complex Jacobi. Eigenvalues ascending; each eigenvector is scaled so
// that its largest-magnitude component (first one on ties) is real positive.
EigenSystem eigh(const LabeledHermitian& h, const JacobiOptions& options = {});
EigenSystem eigh(const CMatrix& h, const JacobiOptions& options = {});

// ||U^dagger U - I||_max
double unitarity_defect(const CMatrix& u);

// Eigenphases of a unitary matrix in (-pi, pi], ascending.
std::vector<double> unitary_eigenphases(const CMatrix& u);

// Wraps to (-pi, pi].
double wrap_phase(double theta);
// Wraps to [0, 2 pi).
double wrap_phase_positive(double theta);

struct CircularMatch {
  double max_distance = 0.0;
  double mean_distance = 0.0;
};

// Matches two equally sized point sets on a circle of circumference `period`
// by sorting and trying every cyclic shift; returns the shift with the
// smallest maximal distance.
CircularMatch match_on_circle(std::span<const double> a, std::span<const double> b, double period);

}  // namespace floquet_ab

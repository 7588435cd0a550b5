#pragma once

// Manufactured-solution checks for the form transport solver: grid
// convergence, closed-form decay, shear straightening, linearity,
// determinism and the empirical stability ratio.

#include <cstdint>
#include <vector>

#include "shockshell/form_transport.hpp"

namespace shockshell {

/// Smooth manufactured data: X0, f, the exact form omega* and
/// theta := L_X omega* + f omega* for X = X0 d/dx0.
struct ManufacturedCase {
  ScalarField X0;
  ScalarField f;
  FormField exact;
  FormField theta;

  TransportProblem problem() const;
};

ManufacturedCase manufactured_case(const ChartGrid& grid, int degree);

/// Max error over the components with a 0 index and over the purely spatial
/// ones.
struct FamilyErrors {
  double time_family = 0;
  double space_family = 0;
};

FamilyErrors family_errors(const FormField& computed, const FormField& exact);

struct ConvergenceLevel {
  int n = 0;  // n_t = n_x
  FamilyErrors errors;
  double residual = 0;
};

struct ConvergenceStudy {
  int degree = 1;
  std::vector<ConvergenceLevel> levels;
  // Observed orders from the two finest levels.
  double order_time_family = 0;
  double order_space_family = 0;
  double order_residual = 0;
};

ConvergenceStudy convergence_study(int degree, const std::vector<int>& levels = {16, 32, 64}, unsigned threads = 1);

/// f = a, theta = 0, X0 = 1: max |omega - exp(-a x0) omega0| and the Lie
/// residual of the computed solution.
struct DecayCheck {
  double solution_error = 0;
  double residual = 0;
};
DecayCheck exponential_decay_check(const ChartGrid& grid, int degree, double a);

/// X = d0 + c d1: max periodic distance between the computed straightening
/// and (t, x - c t), over Phi and its inverse.
double shear_straightening_error(const ChartGrid& grid, double c);

/// Finite-difference check of Phi_* X = (X0 o Phi^{-1}) d0 at interior
/// points for a non-constant transverse field; returns the max deviation.
double pushforward_defect(const ChartGrid& grid);

/// |T(a P1 + b P2) - a T(P1) - b T(P2)| for random data sharing X0, f.
double linearity_defect(const ChartGrid& grid, int degree, std::uint64_t seed);

/// max ||omega|| / (||theta|| + ||omega0||) over random datasets.
double stability_ratio(const ChartGrid& grid, int degree, int datasets, std::uint64_t seed);

struct TransportSuiteReport {
  ConvergenceStudy degree1;
  ConvergenceStudy degree2;
  DecayCheck decay;
  double shear_error = 0;
  double pushforward_defect = 0;
  double linearity_defect = 0;
  bool deterministic = false;
  double stability_ratio = 0;
};

TransportSuiteReport run_transport_suite(std::uint64_t seed = 7, unsigned threads = 1);

}  // namespace shockshell

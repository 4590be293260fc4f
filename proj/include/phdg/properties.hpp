#pragma once

#include <random>
#include <string>
#include <vector>

#include "phdg/discretization.hpp"
#include "phdg/forms.hpp"
#include "phdg/verification.hpp"

namespace phdg {

// Randomized identity checks on discrete fields. Each returns the largest
// relative residual seen over `trials` random inputs.

/// (trD C, grad u) - 1/2 (trD, tr[(grad u) C + C (grad u)^T]) = 0.
double trace_identity_residual(const Discretization& disc, std::mt19937_64& rng, int trials = 50);

/// o_h(w; (v, vhat), (v, vhat)) = 1/2 sum_K int_dK |w.n| |v - vhat|^2 for a
/// random w that is divergence free with continuous normal component and
/// w.n = 0 on the boundary (the curl of a continuous P2 stream function).
/// Requires k = 1.
double upwind_identity_residual(const Discretization& disc, std::mt19937_64& rng, TransportedField field,
                                int trials = 50);

/// Random divergence-free advecting velocity used by the upwind check.
Eigen::VectorXd random_solenoidal_velocity(const Discretization& disc, std::mt19937_64& rng);

struct OracleError {
  double derivatives = 0.0;  // max abs over every derivative entering f, F
  double forcing = 0.0;      // max abs of f, F against the FD reconstruction
};

OracleError forcing_oracle(const MmsCase& mc, std::mt19937_64& rng, int samples = 200, double step = 1e-5);

struct NullSpaceCheck {
  double kernel_residual = 0.0;  // ||A v||_inf without the multiplier row, v = constant pressure
  bool factorization_ok = false;
};

NullSpaceCheck null_space_check(const Discretization& disc, const ModelParams& params, const State& state,
                                const Forcing& forcing);

}  // namespace phdg

namespace phdg {

/// One line of a property suite: measured value against its limit.
struct SuiteCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  std::string detail;
};

/// The randomized identity / oracle / fixed-point / null-space suites.
std::vector<SuiteCheck> run_property_suites(unsigned long long seed);

}  // namespace phdg

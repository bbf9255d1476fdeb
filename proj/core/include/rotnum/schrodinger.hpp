#pragma once

// Discrete Schrodinger operators (H u)(n) = u(n+1) + u(n-1) + v(n) u(n):
// transfer matrices, Sturm eigenvalue counts, and the integrated density of
// states computed spectrally and through the projective cocycle.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rotnum/circle_maps.hpp"
#include "rotnum/drivers.hpp"
#include "rotnum/rotation.hpp"

namespace rotnum {

/// (E - v, -1; 1, 0)
SL2Matrix transfer_matrix(double e, double v) noexcept;

/// Number of eigenvalues strictly below E of the Dirichlet restriction with
/// diagonal v and unit off-diagonal.
std::int64_t sturm_count(std::span<const double> v, double e) noexcept;

/// v(n) = phi(G^n x0) + W_n + offset.
struct PotentialSpec {
  std::optional<RotationBase> background;
  Distribution noise = Distribution::point(0.0);
  double offset = 0.0;

  /// Bound on sup |v|.
  double bound() const noexcept;
  PotentialSpec shifted(double c) const;
  std::string describe() const;
};

/// Sites 0..L-1 of the potential along the path.
std::vector<double> sample_potential(const PotentialSpec& spec, std::int64_t length,
                                     const PathSpec& path);

struct IdsCurve {
  std::vector<double> energies;
  std::vector<double> ids;
  std::vector<double> std_errors;
  std::string method;       // "spectral" or "dynamical"
  std::int64_t size = 0;    // L or n
  std::uint64_t seed = 0;
};

struct SpectralOptions {
  std::int64_t length = 100000;
  int replicas = 16;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Mean of sturm_count / L over replicas; replica r uses its own noise stream
/// and starts the background at G^{rL} x0.
Estimate ids_spectral(const PotentialSpec& spec, double e, const SpectralOptions& opt);
/// Same replicas reused for every energy.
IdsCurve ids_spectral_curve(const PotentialSpec& spec, const std::vector<double>& energies,
                            const SpectralOptions& opt);

struct SchrodingerCocycle {
  PotentialSpec potential;
  CocycleFamily family;
  double e_lo = -3.0;
  double e_hi = 3.0;
  bool anchored = false;
  double e_ref = 0.0;
};

SchrodingerCocycle make_schrodinger_cocycle(const PotentialSpec& spec, double e_lo, double e_hi);

/// Fibers projectivize(transfer_matrix(E, omega)) over an iid base.
CocycleFamily anderson_family(Distribution noise);

struct AnchorOptions {
  BirkhoffOptions birkhoff{100000, 1000, 4, 0, 1};
  int grid_points = 65;
};

/// Fixes the global lift branch so that IDS(E_ref) = 0 and continues it over
/// [E_ref, e_hi]. Throws ParameterError when E_ref is not below the spectrum
/// and CalibrationError when the residual |IDS(E_ref)| exceeds 0.02.
SchrodingerCocycle calibrate_ids_anchor(SchrodingerCocycle cocycle, double e_ref,
                                        const AnchorOptions& opt = {});

/// Rotation number in turns of R^2 (half the projective rotation number), so
/// that IDS = 1 - 2 rho.
Estimate angle_rotation_number(const SchrodingerCocycle& cocycle, double e,
                               const BirkhoffOptions& opt);

/// 1 - 2 rho(E). Throws CalibrationError on an unanchored cocycle.
Estimate ids_dynamical(const SchrodingerCocycle& cocycle, double e, const BirkhoffOptions& opt);
IdsCurve ids_dynamical_curve(const SchrodingerCocycle& cocycle,
                             const std::vector<double>& energies, const BirkhoffOptions& opt);

enum class PhiOrientation { derived, as_printed };

struct BackgroundIncrementOptions {
  std::int64_t n_path = 200;
  std::int64_t n_base = 1024;        // base points along the rotation orbit
  std::int64_t fiber_samples = 64;   // atoms per fiber measure
  int batches = 16;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  PhiOrientation orientation = PhiOrientation::derived;
};

/// Average over base points x and noise of Phi_{nu-_{E2,Gx}}(g~_{E1}(y), g~_{E2}(y))
/// with y ~ nu+_{E1,x}. Fiber measures come from n_path-step orbits along the
/// frozen base path with fresh noise. The as_printed orientation swaps the two
/// arguments.
Estimate increment_ergodic_background(const SchrodingerCocycle& cocycle, double e1, double e2,
                                      const BackgroundIncrementOptions& opt);

}  // namespace rotnum

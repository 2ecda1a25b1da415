#pragma once
// Periodic orbit search (Newton on f^n - id from seed grids), deduplication
// up to cyclic rotation, and linear classification of cycles.

#include <optional>
#include <string>
#include <vector>

#include "qx/henon.hpp"

namespace qx {

enum class OrbitClass { Saddle, Attracting, Repelling, Indifferent };

std::string to_string(OrbitClass c);

struct PeriodicOrbit {
    std::vector<ComplexPoint> points;  // canonical rotation, points[j+1] = f(points[j])
    int period = 0;                    // primitive period
    cplx eig_unstable{0.0};            // eigenvalues of Df^period at points[0]
    cplx eig_stable{0.0};
    OrbitClass classification = OrbitClass::Saddle;
    double residual = 0.0;  // |f^period(points[0]) - points[0]|
};

struct SaddleSearchParams {
    int grid_per_axis = 36;       // real seed grid on [-R, R]^2
    double imag_jitter = 1e-3;    // deterministic complex perturbation of seeds
    int newton_max_iter = 60;
    double newton_tol = 1e-12;    // polish target on |f^n(q) - q|
    double accept_tol = 1e-9;     // residual acceptance for a converged root
    double dedup_tol = 1e-8;      // orbit identity tolerance (sup over cycle)
    double indifferent_band = 1e-8;
    std::uint64_t seed = 0x51ab5eedull;
};

struct SaddleCatalog {
    std::vector<PeriodicOrbit> orbits;  // sorted: period, then canonical point
    std::string status;                 // "ok" or a warning
    int period_max = 0;

    std::vector<const PeriodicOrbit*> saddles() const;
    // Count of points (not orbits) of primitive period exactly n.
    int point_count(int period) const;
};

// All periodic orbits with primitive period <= n_max found from the seed
// family.  Every point of every returned orbit satisfies the residual
// acceptance; orbits are classified and deduplicated up to rotation.
SaddleCatalog find_periodic_orbits(const HenonMap& m, int n_max,
                                   const SaddleSearchParams& sp = {});

// Newton for f^n(q) = q from one seed; nullopt if it fails to converge.
std::optional<ComplexPoint> newton_periodic_point(const HenonMap& m, int n,
                                                  ComplexPoint seed,
                                                  const SaddleSearchParams& sp);

PeriodicOrbit classify_orbit(const HenonMap& m, const ComplexPoint& start,
                             int period, double indifferent_band);

}  // namespace qx

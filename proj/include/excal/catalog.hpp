#pragma once

// Built-in geometries. Each entry is validated on its structural identities at
// 20 seeded points before it is served.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "excal/geometry.hpp"
#include "excal/identity.hpp"

namespace excal {

struct CatalogFamily {
  std::string pattern;  // e.g. "euclidean(n)"
  std::string description;
};

/// The seven entry families, in listing order.
const std::vector<CatalogFamily>& catalog_families();

struct CatalogEntry {
  std::string name;
  Geometry geometry;
  std::vector<Identity> validations;
};

/// The unvalidated geometry for a name such as "flat_kahler(2)". A bare
/// family name uses its default size. Throws UnknownEntry.
Geometry catalog_geometry(const std::string& name);

/// Structural identities implied by the geometry's kind:
///   flat      Christoffel symbols vanish
///   killing   L_xi g = 0
///   kahler    Omega^# = J, d Omega = 0, nabla J = 0, N_J = 0
///   lck       Omega^# = J, d Omega = theta ^ Omega, d theta = 0, eta = i_J theta, N_J = 0
///   sasakian  eta(xi) = 1, phi^2 = -Id + eta (x) xi, g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y),
///             Phi^# = phi, xi^flat = eta, nabla xi = -phi, d Phi = 0, normality
///   cokahler  the contact-metric identities, nabla xi = 0, A = 0, d Phi = 0, d eta = 0
/// Throws ConfigError when the kind needs structures the geometry lacks.
std::vector<Identity> structural_validations(const Geometry& g);

/// Runs the identities at `points` seeded points. Throws ValidationFailed
/// naming the first failing identity.
void validate(const Geometry& g, const std::vector<Identity>& checks, int points = 20,
              std::uint64_t seed = 0, Tolerance tol = {});

/// A validated entry; cached, safe to call concurrently.
std::shared_ptr<const CatalogEntry> builtin(const std::string& name);

}  // namespace excal

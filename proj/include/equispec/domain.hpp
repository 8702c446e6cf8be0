#pragma once

#include <Eigen/Dense>
#include <vector>

#include "equispec/grouprep.hpp"

namespace equispec {

/// One Fourier mode of a radial function: a*cos(k*theta) + b*sin(k*theta).
struct FourierMode {
    int k = 0;
    double a = 0.0;
    double b = 0.0;
};

/// Which modes a group admits: cyclic p needs k = 0 mod p; dihedral p
/// additionally kills the sine part; klein needs k even and no sine part.
bool mode_allowed(const FiniteGroup& group, const FourierMode& m);

/// Star-shaped G-invariant boundary r(theta) = r0 + sum of modes.
struct SymmetricDomain {
    FiniteGroup group;
    double r0 = 1.0;
    std::vector<FourierMode> modes;

    double radius(double theta) const;
    double radius_d1(double theta) const;
    double radius_d2(double theta) const;
    double min_radius(int samples = 4096) const;
    double max_radius(int samples = 4096) const;
};

/// Validates invariance and the star-shape margin min r >= 0.1 r0.
SymmetricDomain make_domain(const FiniteGroup& group, double r0,
                            const std::vector<FourierMode>& modes);

/// G-invariant radial displacement amplitude rho(theta).
struct BoundaryField {
    FiniteGroup group;
    std::vector<FourierMode> modes;

    double rho(double theta) const;
    double rho_d1(double theta) const;
    double sup_norm(int samples = 4096) const;
};

BoundaryField make_field(const FiniteGroup& group, const std::vector<FourierMode>& modes);

/// Point data of the boundary curve at angle theta.
struct BoundaryPoint {
    Eigen::Vector2d point;
    Eigen::Vector2d normal; // outward unit normal
    double curvature = 0.0; // kappa = (r^2 + 2 r'^2 - r r'') / (r^2 + r'^2)^(3/2)
    double arclength_density = 0.0; // ds/dtheta = sqrt(r^2 + r'^2)
};

BoundaryPoint boundary_geometry(const SymmetricDomain& domain, double theta);

/// Normal velocity sigma = V.N of the radial transport generated by rho:
/// sigma(theta) = rho * r / sqrt(r^2 + r'^2).
struct NormalVelocity {
    const SymmetricDomain* domain;
    const BoundaryField* field;

    double value(double theta) const;
    double d_theta(double theta) const;
};

NormalVelocity normal_velocity(const SymmetricDomain& domain, const BoundaryField& field);

/// Equivariant radial transport h(t,x) = x (1 + t rho(theta) chi(|x|/r(theta)) / r(theta)).
/// chi is a quintic smoothstep, zero on [0,c0] and 1 at 1, so the boundary
/// moves radially by exactly t*rho while a core around the centroid is fixed.
class TransportMap {
  public:
    TransportMap(const SymmetricDomain& domain, const BoundaryField& field, double c0 = 0.3);

    Eigen::Vector2d apply(double t, const Eigen::Vector2d& x) const;
    /// Velocity field at t=0: d/dt h(t,x)|_0.
    Eigen::Vector2d velocity(const Eigen::Vector2d& x) const;
    /// Perturbed domain with radius r + t*rho (exact in the mode coefficients).
    SymmetricDomain perturbed_domain(double t) const;

    double t_max() const { return t_max_; }
    double cutoff() const { return c0_; }
    const SymmetricDomain& domain() const { return domain_; }
    const BoundaryField& field() const { return field_; }

    double chi(double s) const;
    double chi_d1(double s) const;

    void require_valid_t(double t) const;

  private:
    SymmetricDomain domain_;
    BoundaryField field_;
    double c0_;
    double t_max_;
};

TransportMap make_transport(const SymmetricDomain& domain, const BoundaryField& field,
                            double c0 = 0.3);

} // namespace equispec

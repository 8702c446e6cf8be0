#include "equispec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace equispec {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

bool mode_allowed(const FiniteGroup& group, const FourierMode& m) {
    if (m.k < 0) return false;
    switch (group.kind) {
        case GroupKind::cyclic:
            return m.k % group.p == 0;
        case GroupKind::dihedral:
            return m.k % group.p == 0 && m.b == 0.0;
        case GroupKind::klein:
            return m.k % 2 == 0 && m.b == 0.0;
    }
    return false;
}

namespace {

void check_modes(const FiniteGroup& group, const std::vector<FourierMode>& modes) {
    std::ostringstream bad;
    bool any = false;
    for (const FourierMode& m : modes) {
        if (!mode_allowed(group, m)) {
            if (any) bad << ", ";
            bad << "k=" << m.k;
            if (m.b != 0.0) bad << " (b!=0)";
            any = true;
        }
    }
    if (any)
        fail(ErrorCategory::symmetry_violation,
             std::string("modes forbidden for ") + group_kind_name(group.kind) + " " +
                 std::to_string(group.p) + ": " + bad.str());
}

double eval_radius(double base, const std::vector<FourierMode>& modes, double theta, int deriv) {
    double v = (deriv == 0) ? base : 0.0;
    for (const FourierMode& m : modes) {
        double kt = m.k * theta;
        double kp = 1.0;
        for (int i = 0; i < deriv; ++i) kp *= m.k;
        switch (deriv % 4) {
            case 0: v += kp * (m.a * std::cos(kt) + m.b * std::sin(kt)); break;
            case 1: v += kp * (-m.a * std::sin(kt) + m.b * std::cos(kt)); break;
            case 2: v += kp * (-m.a * std::cos(kt) - m.b * std::sin(kt)); break;
            case 3: v += kp * (m.a * std::sin(kt) - m.b * std::cos(kt)); break;
        }
    }
    return v;
}

} // namespace

double SymmetricDomain::radius(double theta) const { return eval_radius(r0, modes, theta, 0); }
double SymmetricDomain::radius_d1(double theta) const { return eval_radius(r0, modes, theta, 1); }
double SymmetricDomain::radius_d2(double theta) const { return eval_radius(r0, modes, theta, 2); }

double SymmetricDomain::min_radius(int samples) const {
    double v = radius(0.0);
    for (int i = 1; i < samples; ++i) v = std::min(v, radius(kTwoPi * i / samples));
    return v;
}

double SymmetricDomain::max_radius(int samples) const {
    double v = radius(0.0);
    for (int i = 1; i < samples; ++i) v = std::max(v, radius(kTwoPi * i / samples));
    return v;
}

SymmetricDomain make_domain(const FiniteGroup& group, double r0,
                            const std::vector<FourierMode>& modes) {
    if (r0 <= 0.0) fail(ErrorCategory::geometry, "base radius must be positive");
    check_modes(group, modes);
    SymmetricDomain d;
    d.group = group;
    d.r0 = r0;
    d.modes = modes;
    double rmin = d.min_radius();
    if (rmin < 0.1 * r0)
        fail(ErrorCategory::geometry,
             "star-shape margin violated: min r = " + std::to_string(rmin) + " < 0.1 r0");
    return d;
}

double BoundaryField::rho(double theta) const { return eval_radius(0.0, modes, theta, 0); }
double BoundaryField::rho_d1(double theta) const { return eval_radius(0.0, modes, theta, 1); }

double BoundaryField::sup_norm(int samples) const {
    double v = 0.0;
    for (int i = 0; i < samples; ++i) v = std::max(v, std::abs(rho(kTwoPi * i / samples)));
    return v;
}

BoundaryField make_field(const FiniteGroup& group, const std::vector<FourierMode>& modes) {
    check_modes(group, modes);
    BoundaryField f;
    f.group = group;
    f.modes = modes;
    return f;
}

BoundaryPoint boundary_geometry(const SymmetricDomain& domain, double theta) {
    double r = domain.radius(theta);
    double r1 = domain.radius_d1(theta);
    double r2 = domain.radius_d2(theta);
    double c = std::cos(theta), s = std::sin(theta);
    BoundaryPoint out;
    out.point = Eigen::Vector2d(r * c, r * s);
    double w = std::sqrt(r * r + r1 * r1);
    // Tangent ~ r' e_r + r e_theta; outward normal = (r e_r - r' e_theta)/w.
    Eigen::Vector2d er(c, s), et(-s, c);
    out.normal = (r * er - r1 * et) / w;
    out.curvature = (r * r + 2.0 * r1 * r1 - r * r2) / (w * w * w);
    out.arclength_density = w;
    return out;
}

double NormalVelocity::value(double theta) const {
    double r = domain->radius(theta);
    double r1 = domain->radius_d1(theta);
    return field->rho(theta) * r / std::sqrt(r * r + r1 * r1);
}

double NormalVelocity::d_theta(double theta) const {
    double r = domain->radius(theta);
    double r1 = domain->radius_d1(theta);
    double r2 = domain->radius_d2(theta);
    double rho = field->rho(theta);
    double rho1 = field->rho_d1(theta);
    double w2 = r * r + r1 * r1;
    double w = std::sqrt(w2);
    // d/dtheta [rho r / w].
    return (rho1 * r + rho * r1) / w - rho * r * (r * r1 + r1 * r2) / (w2 * w);
}

NormalVelocity normal_velocity(const SymmetricDomain& domain, const BoundaryField& field) {
    if (!domain.group.same_symmetry(field.group))
        fail(ErrorCategory::symmetry_violation, "field and domain have different groups");
    return NormalVelocity{&domain, &field};
}

TransportMap::TransportMap(const SymmetricDomain& domain, const BoundaryField& field, double c0)
    : domain_(domain), field_(field), c0_(c0) {
    if (!domain.group.same_symmetry(field.group))
        fail(ErrorCategory::symmetry_violation, "field and domain have different groups");
    if (!(c0 > 0.0 && c0 < 1.0))
        fail(ErrorCategory::config_invalid, "cutoff fraction must lie in (0,1)");

    // |dh/dx - I| <= |t| (|psi| + |x||grad psi|); bound the bracket by sampling
    // and require the product below 0.5 for injectivity.
    double bound = 0.0;
    const int nt = 256, ns = 64;
    for (int i = 0; i < nt; ++i) {
        double theta = kTwoPi * i / nt;
        double r = domain_.radius(theta);
        double r1 = domain_.radius_d1(theta);
        double rho = field_.rho(theta);
        double rho1 = field_.rho_d1(theta);
        for (int j = 0; j <= ns; ++j) {
            double s = c0_ + (1.0 - c0_) * j / ns;
            double l = s * r;
            double chi_v = chi(s);
            double chi_s = chi_d1(s);
            double psi = rho * chi_v / r;
            double dpsi_dl = rho * chi_s / (r * r);
            double dpsi_dtheta =
                rho1 * chi_v / r - rho * chi_s * l * r1 / (r * r * r) - rho * chi_v * r1 / (r * r);
            double grad = std::hypot(dpsi_dl, dpsi_dtheta / std::max(l, 1e-12));
            bound = std::max(bound, std::abs(psi) + l * grad);
        }
    }
    t_max_ = bound > 0.0 ? 0.5 / bound : std::numeric_limits<double>::infinity();
}

double TransportMap::chi(double s) const {
    if (s <= c0_) return 0.0;
    double u = (s - c0_) / (1.0 - c0_);
    if (u >= 1.0) u = 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double TransportMap::chi_d1(double s) const {
    if (s <= c0_ || s >= 1.0) return 0.0;
    double u = (s - c0_) / (1.0 - c0_);
    return 30.0 * u * u * (1.0 - u) * (1.0 - u) / (1.0 - c0_);
}

void TransportMap::require_valid_t(double t) const {
    if (std::abs(t) > t_max_)
        fail(ErrorCategory::precondition, "|t| = " + std::to_string(std::abs(t)) +
                                              " exceeds injectivity bound t_max = " +
                                              std::to_string(t_max_));
}

Eigen::Vector2d TransportMap::apply(double t, const Eigen::Vector2d& x) const {
    require_valid_t(t);
    if (t == 0.0) return x;
    double l = x.norm();
    if (l == 0.0) return x;
    double theta = std::atan2(x.y(), x.x());
    double r = domain_.radius(theta);
    double factor = 1.0 + t * field_.rho(theta) * chi(l / r) / r;
    return factor * x;
}

Eigen::Vector2d TransportMap::velocity(const Eigen::Vector2d& x) const {
    double l = x.norm();
    if (l == 0.0) return Eigen::Vector2d::Zero();
    double theta = std::atan2(x.y(), x.x());
    double r = domain_.radius(theta);
    return x * (field_.rho(theta) * chi(l / r) / r);
}

SymmetricDomain TransportMap::perturbed_domain(double t) const {
    require_valid_t(t);
    std::map<int, FourierMode> merged;
    for (const FourierMode& m : domain_.modes) {
        FourierMode& e = merged[m.k];
        e.k = m.k;
        e.a += m.a;
        e.b += m.b;
    }
    double r0 = domain_.r0;
    for (const FourierMode& m : field_.modes) {
        if (m.k == 0) {
            r0 += t * m.a;
            continue;
        }
        FourierMode& e = merged[m.k];
        e.k = m.k;
        e.a += t * m.a;
        e.b += t * m.b;
    }
    std::vector<FourierMode> modes;
    for (auto& [k, m] : merged) modes.push_back(m);
    return make_domain(domain_.group, r0, modes);
}

TransportMap make_transport(const SymmetricDomain& domain, const BoundaryField& field,
                            double c0) {
    return TransportMap(domain, field, c0);
}

} // namespace equispec

#include "equispec/grouprep.hpp"

#include <cmath>

namespace equispec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d m;
    double c = std::cos(angle), s = std::sin(angle);
    m << c, -s, s, c;
    return m;
}

// Reflection through the line at angle `axis` through the origin.
Eigen::Matrix2d reflection(double axis) {
    Eigen::Matrix2d m;
    double c = std::cos(2.0 * axis), s = std::sin(2.0 * axis);
    m << c, s, s, -c;
    return m;
}

int find_element(const FiniteGroup& g, const Eigen::Matrix2d& m) {
    for (int i = 0; i < g.order(); ++i) {
        if ((g.elements[i].matrix - m).cwiseAbs().maxCoeff() < 1e-9) return i;
    }
    fail(ErrorCategory::numerical, "group product left the element set");
}

void build_tables(FiniteGroup& g) {
    int n = g.order();
    g.product_table.assign(n, std::vector<int>(n, -1));
    g.inverse_table.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Eigen::Matrix2d prod = g.elements[i].matrix * g.elements[j].matrix;
            int k = find_element(g, prod);
            g.product_table[i][j] = k;
            if (k == 0) g.inverse_table[i] = j;
        }
    }
}

} // namespace

const char* group_kind_name(GroupKind k) {
    switch (k) {
        case GroupKind::cyclic: return "cyclic";
        case GroupKind::dihedral: return "dihedral";
        case GroupKind::klein: return "klein";
    }
    return "?";
}

GroupKind group_kind_from_string(const std::string& s) {
    if (s == "cyclic") return GroupKind::cyclic;
    if (s == "dihedral") return GroupKind::dihedral;
    if (s == "klein") return GroupKind::klein;
    fail(ErrorCategory::config_invalid, "unknown group kind '" + s + "'");
}

FiniteGroup build_group(GroupKind kind, int p) {
    if (kind != GroupKind::klein && p < 2)
        fail(ErrorCategory::config_invalid, "group parameter p must be >= 2");

    FiniteGroup g;
    g.kind = kind;
    g.p = (kind == GroupKind::klein) ? 2 : p;

    int rotations = g.p;
    for (int k = 0; k < rotations; ++k) {
        GroupElement e;
        e.matrix = rotation(kTwoPi * k / rotations);
        e.reflection = false;
        if (k == 0) e.matrix = Eigen::Matrix2d::Identity();
        g.elements.push_back(e);
    }
    if (kind == GroupKind::dihedral || kind == GroupKind::klein) {
        for (int k = 0; k < rotations; ++k) {
            GroupElement e;
            e.matrix = reflection(M_PI * k / rotations);
            e.reflection = true;
            g.elements.push_back(e);
        }
    }
    build_tables(g);
    return g;
}

namespace {

RealIrrep one_dim(const FiniteGroup& g, const std::string& label,
                  const std::vector<double>& chi) {
    RealIrrep r;
    r.label = label;
    r.dim = 1;
    r.frobenius = FrobeniusType::real_type;
    r.character = chi;
    for (double c : chi) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = c;
        r.matrices.push_back(m);
    }
    (void)g;
    return r;
}

} // namespace

std::vector<RealIrrep> real_irreps(const FiniteGroup& g) {
    std::vector<RealIrrep> out;
    int n = g.order();

    if (g.kind == GroupKind::klein) {
        // Elements ordered id, rot(pi), reflect(x), reflect(y).
        out.push_back(one_dim(g, "triv", {1, 1, 1, 1}));
        out.push_back(one_dim(g, "sgn_xy", {1, 1, -1, -1}));
        out.push_back(one_dim(g, "sgn_x", {1, -1, 1, -1}));
        out.push_back(one_dim(g, "sgn_y", {1, -1, -1, 1}));
        return out;
    }

    int p = g.p;
    if (g.kind == GroupKind::cyclic) {
        std::vector<double> triv(n, 1.0);
        out.push_back(one_dim(g, "triv", triv));
        if (p % 2 == 0) {
            std::vector<double> sgn(n);
            for (int k = 0; k < n; ++k) sgn[k] = (k % 2 == 0) ? 1.0 : -1.0;
            out.push_back(one_dim(g, "sgn", sgn));
        }
        for (int j = 1; 2 * j < p; ++j) {
            RealIrrep r;
            r.label = "rot" + std::to_string(j);
            r.dim = 2;
            r.frobenius = FrobeniusType::complex_pair;
            for (int k = 0; k < n; ++k) {
                Eigen::MatrixXd m(2, 2);
                double a = kTwoPi * j * k / p;
                m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
                if (k == 0) m = Eigen::MatrixXd::Identity(2, 2);
                r.matrices.push_back(m);
                r.character.push_back(m.trace());
            }
            out.push_back(r);
        }
        return out;
    }

    // Dihedral p: elements r_0..r_{p-1}, s_0..s_{p-1}.
    std::vector<double> triv(n, 1.0);
    out.push_back(one_dim(g, "triv", triv));
    std::vector<double> det(n);
    for (int k = 0; k < n; ++k) det[k] = (k < p) ? 1.0 : -1.0;
    out.push_back(one_dim(g, "det", det));
    if (p % 2 == 0) {
        std::vector<double> a(n), b(n);
        for (int k = 0; k < p; ++k) {
            a[k] = (k % 2 == 0) ? 1.0 : -1.0;
            a[p + k] = (k % 2 == 0) ? 1.0 : -1.0;
            b[k] = (k % 2 == 0) ? 1.0 : -1.0;
            b[p + k] = (k % 2 == 0) ? -1.0 : 1.0;
        }
        out.push_back(one_dim(g, "alt_r", a));
        out.push_back(one_dim(g, "alt_s", b));
    }
    for (int j = 1; 2 * j < p; ++j) {
        RealIrrep r;
        r.label = "rot" + std::to_string(j);
        r.dim = 2;
        r.frobenius = FrobeniusType::real_type;
        for (int k = 0; k < n; ++k) {
            Eigen::MatrixXd m(2, 2);
            if (k < p) {
                double a = kTwoPi * j * k / p;
                m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
                if (k == 0) m = Eigen::MatrixXd::Identity(2, 2);
            } else {
                double a = kTwoPi * j * (k - p) / p;
                m << std::cos(a), std::sin(a), std::sin(a), -std::cos(a);
            }
            r.matrices.push_back(m);
            r.character.push_back(m.trace());
        }
        out.push_back(r);
    }
    return out;
}

PermutationAction regular_representation(const FiniteGroup& g) {
    PermutationAction a;
    a.group = &g;
    int n = g.order();
    a.perms.assign(n, std::vector<int>(n));
    for (int e = 0; e < n; ++e)
        for (int i = 0; i < n; ++i) a.perms[e][i] = g.multiply(e, i);
    return a;
}

void validate_action(const PermutationAction& action) {
    const FiniteGroup& g = *action.group;
    int n = g.order();
    int m = action.size();
    if (static_cast<int>(action.perms.size()) != n)
        fail(ErrorCategory::equivariance_violation, "action has wrong number of permutations");
    for (int i = 0; i < m; ++i)
        if (action.perms[0][i] != i)
            fail(ErrorCategory::equivariance_violation, "identity element does not act trivially");
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            int ab = g.multiply(a, b);
            for (int i = 0; i < m; ++i) {
                if (action.perms[a][action.perms[b][i]] != action.perms[ab][i])
                    fail(ErrorCategory::equivariance_violation,
                         "vertex permutations do not compose like the group");
            }
        }
    }
}

Eigen::VectorXd apply_group_element(const PermutationAction& action, int g,
                                    const Eigen::VectorXd& u) {
    const std::vector<int>& perm = action.perms[g];
    Eigen::VectorXd out(u.size());
    for (int i = 0; i < u.size(); ++i) out[perm[i]] = u[i];
    return out;
}

IsotypicProjector::IsotypicProjector(const FiniteGroup& group, const RealIrrep& irrep,
                                     const PermutationAction& action)
    : label_(irrep.label),
      dim_(irrep.dim),
      weight_over_order_(irrep.projector_weight() / group.order()),
      character_(irrep.character),
      action_(&action) {
    if (action.group != &group && !action.group->same_symmetry(group))
        fail(ErrorCategory::equivariance_violation, "action built for a different group");
}

Eigen::VectorXd IsotypicProjector::apply(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
    int n = static_cast<int>(character_.size());
    for (int g = 0; g < n; ++g) {
        double c = character_[g];
        if (c == 0.0) continue;
        const std::vector<int>& perm = action_->perms[g];
        for (int i = 0; i < u.size(); ++i) out[perm[i]] += c * u[i];
    }
    return weight_over_order_ * out;
}

std::vector<IsotypicProjector> isotypic_projectors(const FiniteGroup& group,
                                                   const std::vector<RealIrrep>& irreps,
                                                   const PermutationAction& action) {
    validate_action(action);
    std::vector<IsotypicProjector> out;
    out.reserve(irreps.size());
    for (const RealIrrep& ir : irreps) out.emplace_back(group, ir, action);
    return out;
}

} // namespace equispec

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "equispec/errors.hpp"

namespace equispec {

enum class GroupKind { cyclic, dihedral, klein };

const char* group_kind_name(GroupKind k);
GroupKind group_kind_from_string(const std::string& s);

/// One orthogonal 2x2 transformation of the plane.
struct GroupElement {
    Eigen::Matrix2d matrix;
    bool reflection = false; // determinant -1
};

/// Finite subgroup of O(2) with explicit multiplication tables.
///
/// Element order is fixed by construction: rotations by 2*pi*k/p for
/// k = 0..p-1 first (index 0 is the identity), then, for dihedral and klein
/// groups, reflections through the lines at angles k*pi/p. Klein is the
/// dihedral p=2 element set {id, rot(pi), reflect(x-axis), reflect(y-axis)}
/// but keeps its own irrep labels.
struct FiniteGroup {
    GroupKind kind = GroupKind::cyclic;
    int p = 1;
    std::vector<GroupElement> elements;
    std::vector<std::vector<int>> product_table; // product_table[i][j] = index of g_i * g_j
    std::vector<int> inverse_table;

    int order() const { return static_cast<int>(elements.size()); }
    int multiply(int i, int j) const { return product_table[i][j]; }
    int inverse(int i) const { return inverse_table[i]; }
    /// Number of pure rotations (they occupy indices 0..num_rotations-1).
    int num_rotations() const { return kind == GroupKind::cyclic ? order() : order() / 2; }

    bool same_symmetry(const FiniteGroup& other) const {
        return kind == other.kind && p == other.p;
    }
};

FiniteGroup build_group(GroupKind kind, int p);

enum class FrobeniusType { real_type, complex_pair };

/// Real irreducible representation: orthogonal matrices per element plus the
/// (realified) character. For complex-pair realifications the projector
/// weight is the complex dimension d/2, which is what makes P a projection.
struct RealIrrep {
    std::string label;
    int dim = 1;
    FrobeniusType frobenius = FrobeniusType::real_type;
    std::vector<Eigen::MatrixXd> matrices; // one per group element
    std::vector<double> character;

    double projector_weight() const {
        return frobenius == FrobeniusType::complex_pair ? dim / 2.0 : static_cast<double>(dim);
    }
};

/// Complete list of inequivalent real irreps for the in-scope groups.
std::vector<RealIrrep> real_irreps(const FiniteGroup& group);

/// Vertex-permutation realization of the quasi-regular action on a discrete
/// function space: perm[g][i] is the index of g applied to point i, so that
/// (Gamma_g u)[perm[g][i]] = u[i].
struct PermutationAction {
    const FiniteGroup* group = nullptr;
    std::vector<std::vector<int>> perms;

    int size() const { return perms.empty() ? 0 : static_cast<int>(perms[0].size()); }
};

/// Left-translation action on the group itself (the regular representation).
PermutationAction regular_representation(const FiniteGroup& group);

/// Throws equivariance-violation unless perms compose exactly like the group.
void validate_action(const PermutationAction& action);

/// Gamma_g u = u o g^{-1}.
Eigen::VectorXd apply_group_element(const PermutationAction& action, int g,
                                    const Eigen::VectorXd& u);

/// Character projection P_sigma u = (w_sigma/|G|) sum_g chi_sigma(g) Gamma_g u.
class IsotypicProjector {
  public:
    IsotypicProjector(const FiniteGroup& group, const RealIrrep& irrep,
                      const PermutationAction& action);

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
    const std::string& label() const { return label_; }
    int dim() const { return dim_; }

  private:
    std::string label_;
    int dim_;
    double weight_over_order_;
    std::vector<double> character_;
    const PermutationAction* action_;
};

std::vector<IsotypicProjector> isotypic_projectors(const FiniteGroup& group,
                                                   const std::vector<RealIrrep>& irreps,
                                                   const PermutationAction& action);

} // namespace equispec

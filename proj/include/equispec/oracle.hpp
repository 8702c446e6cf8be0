#pragma once

#include <string>
#include <vector>

#include "equispec/grouprep.hpp"

namespace equispec {

/// Bessel J_m by the ascending power series, evaluated in quad precision so
/// the alternating cancellation keeps ~1e-25 absolute accuracy on [0, 25].
double bessel_j_series(int m, double x);

/// Bessel J_m by Miller's normalized downward recurrence.
double bessel_j_recurrence(int m, double x);

/// Default evaluator (recurrence; cross-checked against the series in tests).
double bessel_j(int m, double x);

/// d/dx J_m(x).
double bessel_j_prime(int m, double x);

/// First `count` positive zeros of J'_m: bracketed on a pi/4 grid, bisected
/// to 1e-12. The spurious stationary point of J_m at x=0 (m != 1) is skipped.
std::vector<double> bessel_jprime_zeros(int m, int count);

struct SpectrumEntry {
    double lambda = 0.0;
    int m = 0;        // angular mode (disk) or first quantum number (rectangle)
    int n_or_k = 0;   // radial zero index (disk) or second quantum number
    int multiplicity = 1;
    std::string sigma_label;
};

struct AnalyticSpectrum {
    std::vector<SpectrumEntry> entries; // ascending lambda
    int total_multiplicity() const;
    /// eigenvalues expanded with multiplicity, ascending
    std::vector<double> expanded() const;
};

/// Neumann spectrum of the Lx x Ly rectangle with klein parity labels.
AnalyticSpectrum rectangle_spectrum(double lx, double ly, int count);

/// Neumann spectrum of the disk of radius R: lambda = (z/R)^2 over zeros of
/// J'_m, multiplicity 2 for m >= 1, plus the zero mode.
AnalyticSpectrum disk_spectrum(double radius, int count);

/// Attach irrep labels of G to disk entries by decomposing the angular span
/// {cos m theta, sin m theta} with character inner products.
void disk_symmetry_labels(AnalyticSpectrum& spectrum, const FiniteGroup& group,
                          const std::vector<RealIrrep>& irreps);

/// CSV: lambda,m,n_or_k,multiplicity,sigma_label.
void write_oracle_csv(const AnalyticSpectrum& s, const std::string& path,
                      const std::string& meta_comment);

} // namespace equispec

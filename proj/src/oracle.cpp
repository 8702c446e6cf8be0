#include "equispec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace equispec {

namespace {
constexpr double kPi = 3.141592653589793238462643;
}

double bessel_j_series(int m, double x) {
    if (m < 0) fail(ErrorCategory::precondition, "bessel order must be >= 0");
    if (x == 0.0) return m == 0 ? 1.0 : 0.0;
    __float128 half = static_cast<__float128>(x) / 2;
    __float128 term = 1;
    for (int i = 1; i <= m; ++i) term *= half / i;
    __float128 sum = term;
    __float128 x2 = half * half;
    for (int s = 1; s < 400; ++s) {
        term *= -x2 / (static_cast<__float128>(s) * (s + m));
        sum += term;
        double mag = static_cast<double>(term < 0 ? -term : term);
        if (mag < 1e-38 && s > x) break;
    }
    return static_cast<double>(sum);
}

double bessel_j_recurrence(int m, double x) {
    if (m < 0) fail(ErrorCategory::precondition, "bessel order must be >= 0");
    if (x == 0.0) return m == 0 ? 1.0 : 0.0;
    if (x < 0.0) fail(ErrorCategory::precondition, "bessel argument must be >= 0");

    int start = std::max(m, static_cast<int>(std::ceil(x))) + 16 +
                static_cast<int>(std::sqrt(40.0 * std::max(m, 1)));
    if (start % 2) ++start;

    double fkp1 = 0.0, fk = 1e-30;
    double target = 0.0, norm = 0.0;
    for (int k = start; k >= 1; --k) {
        double fkm1 = (2.0 * k / x) * fk - fkp1;
        fkp1 = fk;
        fk = fkm1;
        if (k - 1 == m) target = fk;
        if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? fk : 2.0 * fk;
        if (std::abs(fk) > 1e280) {
            fk *= 1e-280;
            fkp1 *= 1e-280;
            target *= 1e-280;
            norm *= 1e-280;
        }
    }
    return target / norm;
}

double bessel_j(int m, double x) { return bessel_j_recurrence(m, x); }

double bessel_j_prime(int m, double x) {
    if (m == 0) return -bessel_j(1, x);
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

std::vector<double> bessel_jprime_zeros(int m, int count) {
    std::vector<double> zeros;
    if (count <= 0) return zeros;
    // J'_m > 0 on (0, j'_{m,1}) for m >= 1; for m = 0 it is negative there.
    double x = std::max(0.25, 0.6 * m);
    double f = bessel_j_prime(m, x);
    const double step = kPi / 4.0;
    int guard = 0;
    while (static_cast<int>(zeros.size()) < count) {
        if (++guard > 100000) fail(ErrorCategory::numerical, "bessel zero scan stalled");
        double x2 = x + step;
        double f2 = bessel_j_prime(m, x2);
        if (f == 0.0) {
            zeros.push_back(x);
            f = f2;
            x = x2;
            continue;
        }
        if (f * f2 < 0.0) {
            double lo = x, hi = x2, flo = f;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = bessel_j_prime(m, mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
                if (hi - lo < 1e-13) break;
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        x = x2;
        f = f2;
    }
    return zeros;
}

int AnalyticSpectrum::total_multiplicity() const {
    int s = 0;
    for (const auto& e : entries) s += e.multiplicity;
    return s;
}

std::vector<double> AnalyticSpectrum::expanded() const {
    std::vector<double> v;
    for (const auto& e : entries)
        for (int i = 0; i < e.multiplicity; ++i) v.push_back(e.lambda);
    return v;
}

namespace {

std::string rectangle_label(int m, int n) {
    bool me = m % 2 == 0, ne = n % 2 == 0;
    if (me && ne) return "triv";
    if (!me && !ne) return "sgn_xy";
    if (!me) return "sgn_x"; // odd in x, even in y
    return "sgn_y";
}

bool label_contains(const std::string& joined, const std::string& lbl) {
    size_t pos = 0;
    while (pos <= joined.size()) {
        size_t end = joined.find(';', pos);
        if (end == std::string::npos) end = joined.size();
        if (joined.substr(pos, end - pos) == lbl) return true;
        pos = end + 1;
    }
    return false;
}

} // namespace

AnalyticSpectrum rectangle_spectrum(double lx, double ly, int count) {
    if (lx <= 0.0 || ly <= 0.0) fail(ErrorCategory::precondition, "side lengths must be positive");
    struct Item {
        double lambda;
        int m, n;
    };
    std::vector<Item> items;
    double cap = 4.0 * kPi * kPi * count / (lx * ly) + 10.0 * (1.0 / (lx * lx) + 1.0 / (ly * ly));
    for (;;) {
        items.clear();
        int mmax = static_cast<int>(std::sqrt(cap) * lx / kPi) + 1;
        int nmax = static_cast<int>(std::sqrt(cap) * ly / kPi) + 1;
        for (int m = 0; m <= mmax; ++m)
            for (int n = 0; n <= nmax; ++n) {
                double l = (m * kPi / lx) * (m * kPi / lx) + (n * kPi / ly) * (n * kPi / ly);
                if (l <= cap) items.push_back({l, m, n});
            }
        if (static_cast<int>(items.size()) >= count) break;
        cap *= 2.0;
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return std::make_pair(a.m, a.n) < std::make_pair(b.m, b.n);
    });

    AnalyticSpectrum spec;
    for (const Item& it : items) {
        if (!spec.entries.empty() &&
            std::abs(spec.entries.back().lambda - it.lambda) <=
                1e-12 * (1.0 + std::abs(it.lambda))) {
            SpectrumEntry& e = spec.entries.back();
            e.multiplicity += 1;
            std::string lbl = rectangle_label(it.m, it.n);
            if (!label_contains(e.sigma_label, lbl)) e.sigma_label += ";" + lbl;
        } else {
            if (spec.total_multiplicity() >= count) break;
            SpectrumEntry e;
            e.lambda = it.lambda;
            e.m = it.m;
            e.n_or_k = it.n;
            e.multiplicity = 1;
            e.sigma_label = rectangle_label(it.m, it.n);
            spec.entries.push_back(e);
        }
    }
    return spec;
}

AnalyticSpectrum disk_spectrum(double radius, int count) {
    if (radius <= 0.0) fail(ErrorCategory::precondition, "radius must be positive");
    struct Item {
        double z;
        int m, k;
    };
    std::vector<Item> items;
    double zcap = std::sqrt(4.0 * count) + 8.0;
    for (;;) {
        items.clear();
        int mmax = static_cast<int>(zcap) + 1;
        for (int m = 0; m <= mmax; ++m) {
            // j'_{m,1} > m, so orders beyond zcap cannot contribute.
            std::vector<double> zs = bessel_jprime_zeros(m, 1);
            int k = 1;
            while (true) {
                if (static_cast<int>(zs.size()) < k) zs = bessel_jprime_zeros(m, k + 2);
                double z = zs[k - 1];
                if (z > zcap) break;
                items.push_back({z, m, k});
                ++k;
            }
        }
        int mult = 1; // the zero mode
        for (const Item& it : items) mult += it.m == 0 ? 1 : 2;
        if (mult >= count) break;
        zcap *= 1.5;
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.z != b.z) return a.z < b.z;
        return std::make_pair(a.m, a.k) < std::make_pair(b.m, b.k);
    });

    AnalyticSpectrum spec;
    SpectrumEntry zero;
    zero.lambda = 0.0;
    zero.m = 0;
    zero.n_or_k = 0;
    zero.multiplicity = 1;
    zero.sigma_label = "m=0";
    spec.entries.push_back(zero);
    for (const Item& it : items) {
        if (spec.total_multiplicity() >= count) break;
        SpectrumEntry e;
        e.lambda = (it.z / radius) * (it.z / radius);
        e.m = it.m;
        e.n_or_k = it.k;
        e.multiplicity = it.m == 0 ? 1 : 2;
        e.sigma_label = "m=" + std::to_string(it.m);
        spec.entries.push_back(e);
    }
    return spec;
}

void disk_symmetry_labels(AnalyticSpectrum& spectrum, const FiniteGroup& group,
                          const std::vector<RealIrrep>& irreps) {
    for (SpectrumEntry& e : spectrum.entries) {
        // Trace of the group action on span{cos m th, sin m th} (m=0: constants).
        std::string label;
        for (const RealIrrep& ir : irreps) {
            double mult = 0.0;
            for (int g = 0; g < group.order(); ++g) {
                double tr;
                if (e.m == 0) {
                    tr = 1.0;
                } else if (group.elements[g].reflection) {
                    tr = 0.0;
                } else {
                    double alpha = std::atan2(group.elements[g].matrix(1, 0),
                                              group.elements[g].matrix(0, 0));
                    tr = 2.0 * std::cos(e.m * alpha);
                }
                mult += ir.character[g] * tr;
            }
            mult *= ir.projector_weight() / group.order();
            long rounded = std::lround(mult);
            if (std::abs(mult - rounded) > 1e-9)
                fail(ErrorCategory::numerical, "non-integer isotypic multiplicity in disk labels");
            for (long c = 0; c < rounded; ++c) {
                if (!label.empty()) label += ";";
                label += ir.label;
            }
        }
        e.sigma_label = label;
    }
}

void write_oracle_csv(const AnalyticSpectrum& s, const std::string& path,
                      const std::string& meta_comment) {
    std::ofstream f(path);
    if (!f) fail(ErrorCategory::io, "cannot open " + path);
    f.precision(17);
    if (!meta_comment.empty()) f << "# " << meta_comment << "\n";
    f << "lambda,m,n_or_k,multiplicity,sigma_label\n";
    for (const auto& e : s.entries)
        f << e.lambda << "," << e.m << "," << e.n_or_k << "," << e.multiplicity << ","
          << e.sigma_label << "\n";
}

} // namespace equispec

#include "qbatt/ergotropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "qbatt/batch.hpp"
#include "qbatt/errors.hpp"

namespace qbatt {

namespace {

constexpr double kCrossCheckTol = 1e-11;
constexpr double kZeroWork = 1e-14;

/// Entropy of the thermal state with the given energy levels, in nats.
double gibbs_entropy(const RealVector& levels, double beta) {
    const double e_min = levels.minCoeff();
    double z = 0.0;
    for (Eigen::Index i = 0; i < levels.size(); ++i) {
        z += std::exp(-beta * (levels(i) - e_min));
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < levels.size(); ++i) {
        const double w = std::exp(-beta * (levels(i) - e_min)) / z;
        if (w > kLogClamp) {
            s -= w * std::log(w);
        }
    }
    return s;
}

double gibbs_energy(const RealVector& levels, double beta) {
    const double e_min = levels.minCoeff();
    double z = 0.0;
    double e = 0.0;
    for (Eigen::Index i = 0; i < levels.size(); ++i) {
        const double w = std::exp(-beta * (levels(i) - e_min));
        z += w;
        e += w * levels(i);
    }
    return e / z;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

ErgotropyReport ergotropy(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.dim() != h.dim()) {
        throw std::invalid_argument("ergotropy: dimension mismatch (" + std::to_string(rho.dim()) +
                                    " vs " + std::to_string(h.dim()) + ")");
    }
    const Eigen::Index d = rho.dim();
    const auto eig_rho = herm_eig(HermitianOperator(rho.matrix()));  // ascending
    const auto eig_h = herm_eig(h);                                  // ascending

    // r_j descending, |E_k> ascending; overlaps O(j,k) = <r_j|E_k>.
    RealVector r(d);
    Matrix vr(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        r(j) = eig_rho.eigenvalues(d - 1 - j);
        vr.col(j) = eig_rho.eigenvectors.col(d - 1 - j);
    }
    const Matrix overlaps = vr.adjoint() * eig_h.eigenvectors;

    double value = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double weight = std::norm(overlaps(j, k)) - (j == k ? 1.0 : 0.0);
            value += r(j) * eig_h.eigenvalues(k) * weight;
        }
    }

    Matrix sigma = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        sigma += r(j) * eig_h.eigenvectors.col(j) * eig_h.eigenvectors.col(j).adjoint();
    }
    const DensityMatrix passive(sigma);
    const Matrix u_opt = eig_h.eigenvectors * vr.adjoint();

    const double value_passive = (h.matrix() * (rho.matrix() - passive.matrix())).trace().real();
    if (std::abs(value - value_passive) > kCrossCheckTol * (1.0 + std::abs(value))) {
        throw numeric_error("ergotropy: overlap-sum and passive-state evaluations disagree (" +
                            std::to_string(value) + " vs " + std::to_string(value_passive) + ")");
    }

    const BoundResult bound = ergotropy_bound(rho, h);
    return ErgotropyReport{value, passive, u_opt, bound.bound, bound.beta_star};
}

BoundResult ergotropy_bound(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.dim() != h.dim()) {
        throw std::invalid_argument("ergotropy_bound: dimension mismatch");
    }
    const Eigen::Index d = rho.dim();
    const double s_target = vn_entropy(rho);
    if (s_target > std::log(static_cast<double>(d)) + 1e-9) {
        throw std::invalid_argument("ergotropy_bound: entropy " + std::to_string(s_target) +
                                    " exceeds ln(dim)");
    }
    const auto eig_h = herm_eig(h);
    const RealVector& levels = eig_h.eigenvalues;
    const double e_rho = (h.matrix() * rho.matrix()).trace().real();
    const double range = levels.maxCoeff() - levels.minCoeff();

    if (s_target <= 1e-12) {
        return BoundResult{e_rho - levels.minCoeff(), std::numeric_limits<double>::infinity()};
    }
    if (std::log(static_cast<double>(d)) - s_target <= 1e-12) {
        return BoundResult{e_rho - levels.mean(), 0.0};
    }

    double lo = 0.0;
    double hi = 1.0;
    while (gibbs_entropy(levels, hi) > s_target) {
        hi *= 2.0;
        if (hi * std::max(range, 1e-300) > 1e6) {
            return BoundResult{e_rho - levels.minCoeff(),
                               std::numeric_limits<double>::infinity()};
        }
    }
    double beta_star = hi;
    for (int it = 0; it < 200; ++it) {
        beta_star = 0.5 * (lo + hi);
        const double s_mid = gibbs_entropy(levels, beta_star);
        if (std::abs(s_mid - s_target) <= 1e-12 || hi - lo <= 1e-15 * (1.0 + hi)) {
            break;
        }
        (s_mid > s_target ? lo : hi) = beta_star;
    }
    return BoundResult{e_rho - gibbs_energy(levels, beta_star), beta_star};
}

ChargingReport charging_report(const HermitianOperator& h_s, const HermitianOperator& h0,
                               double beta) {
    if (h_s.dim() != h0.dim()) {
        throw std::invalid_argument("charging_report: dimension mismatch");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("charging_report: beta must be finite positive");
    }
    const double comm = commutator(h0.matrix(), h_s.matrix()).norm();
    if (comm > 1e-10 * (1.0 + h0.matrix().norm() * h_s.matrix().norm())) {
        throw physics_error("charging_report: [H0, H_S] != 0 (norm " + std::to_string(comm) +
                            ")");
    }
    const Eigen::Index d = h_s.dim();
    auto eig = herm_eig(h_s);

    // Common eigenbasis: rotate inside degenerate battery eigenspaces so h0 is
    // diagonal there too; within a block, order by ascending h0 energy.
    std::vector<double> e(d), e0(d);
    {
        const double tol = 1e-10 * (1.0 + eig.eigenvalues.cwiseAbs().maxCoeff());
        Eigen::Index lo = 0;
        while (lo < d) {
            Eigen::Index hi = lo + 1;
            while (hi < d && eig.eigenvalues(hi) - eig.eigenvalues(hi - 1) <= tol) {
                ++hi;
            }
            const Eigen::Index nb = hi - lo;
            const Matrix block = eig.eigenvectors.middleCols(lo, nb).adjoint() * h0.matrix() *
                                 eig.eigenvectors.middleCols(lo, nb);
            Eigen::SelfAdjointEigenSolver<Matrix> sub(block);
            if (sub.info() != Eigen::Success) {
                throw numeric_error("charging_report: block diagonalization failed");
            }
            eig.eigenvectors.middleCols(lo, nb) =
                eig.eigenvectors.middleCols(lo, nb) * sub.eigenvectors();
            for (Eigen::Index i = 0; i < nb; ++i) {
                e[lo + i] = eig.eigenvalues(lo + i);
                e0[lo + i] = sub.eigenvalues()(i);
            }
            lo = hi;
        }
    }

    // Equilibrium populations from the h0 energies.
    std::vector<double> q(d);
    {
        const double e0_min = *std::min_element(e0.begin(), e0.end());
        double z = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            q[i] = std::exp(-beta * (e0[i] - e0_min));
            z += q[i];
        }
        for (double& w : q) {
            w /= z;
        }
    }

    // Permutation sorting the h0 energies ascending, stable in the battery
    // energy index. Values within the degeneracy tolerance form one cluster
    // and keep ascending-index order, so the reported permutation is
    // canonical even when a solver left rounding noise on degenerate levels.
    std::vector<int> p(d);
    std::iota(p.begin(), p.end(), 0);
    std::stable_sort(p.begin(), p.end(), [&](int i, int j) { return e0[i] < e0[j]; });
    {
        const double max_abs =
            std::max(std::abs(*std::min_element(e0.begin(), e0.end())),
                     std::abs(*std::max_element(e0.begin(), e0.end())));
        const double tie_tol = 1e-10 * (1.0 + max_abs);
        std::size_t lo = 0;
        while (lo < p.size()) {
            std::size_t hi = lo + 1;
            while (hi < p.size() && e0[p[hi]] - e0[p[hi - 1]] <= tie_tol) {
                ++hi;
            }
            std::sort(p.begin() + lo, p.begin() + hi);
            lo = hi;
        }
    }

    double w_erg = 0.0, q_r = 0.0, w_r = 0.0;
    std::vector<double> passive(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        passive[i] = q[p[i]];
        w_erg += (e[p[i]] - e[i]) * q[p[i]];
        q_r += e0[i] * (q[i] - q[p[i]]);
        w_r += (e[i] - e0[i]) * (q[i] - q[p[i]]);
    }

    const double scale = 1.0 + std::abs(w_erg) + std::abs(q_r);
    if (std::abs(w_r - (w_erg - q_r)) > 1e-11 * scale) {
        throw numeric_error("charging_report: W_R != ergotropy - Q_R beyond tolerance");
    }
    if (q_r > 1e-11) {
        throw numeric_error("charging_report: positive recharging heat " + std::to_string(q_r));
    }

    ChargingReport report;
    report.ergotropy = w_erg;
    report.w_r = w_r;
    report.q_r = q_r;
    if (w_r > kZeroWork) {
        report.eta = w_erg / w_r;
        report.eta_defined = true;
    } else if (w_erg <= kZeroWork) {
        report.eta = std::numeric_limits<double>::quiet_NaN();
        report.eta_defined = false;  // passive equilibrium, nothing to charge
    } else {
        throw numeric_error("charging_report: W_R vanishes but the ergotropy does not");
    }
    report.permutation = std::move(p);
    report.battery_energies = std::move(e);
    report.h0_energies = std::move(e0);
    report.populations = std::move(q);
    report.passive_populations = std::move(passive);
    report.basis = eig.eigenvectors;
    return report;
}

NarrowBandScan narrow_band_scan(const HermitianOperator& h_s, double e0_center,
                                const std::vector<double>& offsets,
                                const std::vector<double>& epsilons, double beta) {
    const Eigen::Index d = h_s.dim();
    if (static_cast<Eigen::Index>(offsets.size()) != d) {
        throw std::invalid_argument("narrow_band_scan: need one offset per battery level");
    }
    for (double x : offsets) {
        if (!(x >= -1.0 && x <= 1.0)) {
            throw std::invalid_argument("narrow_band_scan: offsets must lie in [-1, 1]");
        }
    }
    for (double eps : epsilons) {
        if (!(eps > 0.0)) {
            throw std::invalid_argument("narrow_band_scan: epsilon values must be positive");
        }
    }

    const auto eig = herm_eig(h_s);
    NarrowBandScan scan;
    scan.points.resize(epsilons.size());
    batch::run_parallel(static_cast<int>(epsilons.size()), [&](int k) {
        const double eps = epsilons[k];
        Matrix h0 = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            h0 += (e0_center + offsets[i] * eps) * eig.eigenvectors.col(i) *
                  eig.eigenvectors.col(i).adjoint();
        }
        const ChargingReport rep = charging_report(h_s, HermitianOperator(h0), beta);
        scan.points[k] = NarrowBandPoint{eps, rep.ergotropy, rep.w_r, rep.q_r, rep.eta};
    });

    const auto fit_slope = [&](auto value_of) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (const NarrowBandPoint& pt : scan.points) {
            const double y = value_of(pt);
            if (y <= 0.0) {
                continue;
            }
            const double lx = std::log(pt.epsilon);
            const double ly = std::log(y);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++m;
        }
        if (m < 2) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    scan.ergotropy_slope = fit_slope([](const NarrowBandPoint& pt) { return pt.ergotropy; });
    scan.heat_slope = fit_slope([](const NarrowBandPoint& pt) { return std::abs(pt.q_r); });
    return scan;
}

double random_unitary_dominance(const DensityMatrix& rho, const HermitianOperator& h, int trials,
                                std::uint64_t seed) {
    if (rho.dim() != h.dim()) {
        throw std::invalid_argument("random_unitary_dominance: dimension mismatch");
    }
    if (trials < 1) {
        throw std::invalid_argument("random_unitary_dominance: trials must be >= 1");
    }
    const Eigen::Index d = rho.dim();
    std::vector<double> extracted(trials);
    batch::run_parallel(trials, [&](int t) {
        // One generator per trial keeps the result independent of scheduling.
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(t))));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix g(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                g(i, j) = Complex(gauss(rng), gauss(rng));
            }
        }
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix u = qr.householderQ();
        const Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
        for (Eigen::Index i = 0; i < d; ++i) {
            const Complex rii = r(i, i);
            u.col(i) *= std::abs(rii) > 0.0 ? rii / std::abs(rii) : Complex(1.0, 0.0);
        }
        extracted[t] =
            (h.matrix() * (rho.matrix() - u * rho.matrix() * u.adjoint())).trace().real();
    });
    return *std::max_element(extracted.begin(), extracted.end());
}

}  // namespace qbatt

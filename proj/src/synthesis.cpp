#include "ucfas/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ucfas/errors.hpp"

namespace ucfas {

ParametricDesign ParametricDesign::scalar(const Eigen::RowVectorXd& z, const Eigen::VectorXd& poles) {
    ParametricDesign d;
    d.Z = z;
    d.F = poles.asDiagonal();
    d.order = static_cast<int>(poles.size());
    d.channels = 1;
    return d;
}

void ParametricDesign::validate() const {
    if (order < 1 || channels < 1) {
        throw std::invalid_argument("design order and channel count must be at least 1");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(order) * channels;
    if (Z.rows() != channels || Z.cols() != n) {
        std::ostringstream msg;
        msg << "Z must be " << channels << "x" << n << ", got " << Z.rows() << "x" << Z.cols();
        throw std::invalid_argument(msg.str());
    }
    if (F.rows() != n || F.cols() != n) {
        std::ostringstream msg;
        msg << "F must be " << n << "x" << n << ", got " << F.rows() << "x" << F.cols();
        throw std::invalid_argument(msg.str());
    }
    const Eigen::MatrixXd off = F - Eigen::MatrixXd(F.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() != 0.0) {
        throw std::invalid_argument("F must be real diagonal");
    }
    if (!Z.allFinite() || !F.allFinite()) {
        throw std::invalid_argument("Z and F must be finite");
    }
}

Eigen::MatrixXd build_V(const ParametricDesign& design) {
    design.validate();
    const int r = design.channels;
    const Eigen::Index n = static_cast<Eigen::Index>(design.order) * r;
    Eigen::MatrixXd v(n, n);
    Eigen::MatrixXd block = design.Z;
    for (int k = 0; k < design.order; ++k) {
        v.middleRows(static_cast<Eigen::Index>(k) * r, r) = block;
        block = block * design.F;
    }
    return v;
}

namespace {

std::string describe(const ParametricDesign& d) {
    Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", "; ", "", "", "[", "]");
    std::ostringstream msg;
    msg << "Z = " << d.Z.format(fmt) << ", F = diag" << Eigen::RowVectorXd(d.F.diagonal()).format(fmt);
    return msg.str();
}

}  // namespace

GainRow synthesize_gains(const ParametricDesign& design) {
    const Eigen::MatrixXd v = build_V(design);
    const double scale = v.rowwise().norm().prod();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
    const double det = lu.determinant();
    if (!(std::abs(det) >= 1e-12 * scale) || scale == 0.0) {
        throw SingularParameterizationError("singular parameterization, det V = " + std::to_string(det) +
                                            " for " + describe(design));
    }
    Eigen::MatrixXd zfm = design.Z;
    for (int k = 0; k < design.order; ++k) zfm = zfm * design.F;

    // A V = -Z F^m, solved on the transpose, with one refinement step.
    const Eigen::MatrixXd rhs = -zfm.transpose();
    const Eigen::FullPivLU<Eigen::MatrixXd> lut(v.transpose());
    Eigen::MatrixXd at = lut.solve(rhs);
    at += lut.solve(rhs - v.transpose() * at);

    return {at.transpose(), design};
}

Eigen::MatrixXd companion(const Eigen::MatrixXd& gains, int r) {
    if (r < 1 || gains.rows() != r || gains.cols() % r != 0) {
        throw std::invalid_argument("companion: gain row must be r x (m r)");
    }
    const Eigen::Index n = gains.cols();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + r < n; i += r) {
        c.block(i, i + r, r, r).setIdentity();
    }
    c.bottomRows(r) = -gains;
    return c;
}

Eigen::MatrixXd companion(const GainRow& row) { return companion(row.gains, row.channels()); }

Eigen::VectorXd characteristic_polynomial(const Eigen::RowVectorXd& gains) {
    Eigen::VectorXd c(gains.size() + 1);
    c.head(gains.size()) = gains.transpose();
    c(gains.size()) = 1.0;
    return c;
}

std::vector<std::complex<double>> polynomial_roots(const Eigen::VectorXd& ascending) {
    using cd = std::complex<double>;
    const Eigen::Index degree = ascending.size() - 1;
    if (degree < 1 || ascending(degree) == 0.0) {
        throw std::invalid_argument("polynomial_roots: need degree >= 1 with nonzero leading coefficient");
    }
    const Eigen::VectorXd a = ascending / ascending(degree);

    const auto eval = [&](cd z) {
        cd p = 1.0, dp = 0.0;
        for (Eigen::Index k = degree - 1; k >= 0; --k) {
            dp = dp * z + p;
            p = p * z + a(k);
        }
        return std::pair{p, dp};
    };

    // Cauchy bound for the starting circle; the angular offset avoids
    // symmetric starts on real-coefficient polynomials.
    double bound = 0.0;
    for (Eigen::Index k = 0; k < degree; ++k) bound = std::max(bound, std::abs(a(k)));
    const double radius = 1.0 + bound;
    std::vector<cd> z(static_cast<std::size_t>(degree));
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(degree);
        z[k] = std::polar(radius * 0.5, angle + 0.4);
    }

    for (int iter = 0; iter < 1000; ++iter) {
        double largest_step = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const auto [p, dp] = eval(z[i]);
            if (p == 0.0) continue;
            const cd ratio = p / dp;
            cd repulsion = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (j != i) repulsion += 1.0 / (z[i] - z[j]);
            }
            const cd step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            largest_step = std::max(largest_step, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        if (largest_step < 1e-15) break;
    }
    std::sort(z.begin(), z.end(), [](cd l, cd r) { return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag(); });
    return z;
}

namespace {

double best_matching_distance(const std::vector<std::complex<double>>& eig, const Eigen::VectorXd& target) {
    const std::size_t n = eig.size();
    if (n != static_cast<std::size_t>(target.size())) {
        throw std::invalid_argument("verify_spectrum: dimension mismatch");
    }
    const auto cost = [&](const std::vector<std::size_t>& perm) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(eig[i] - target(static_cast<Eigen::Index>(perm[i]))));
        }
        return worst;
    };
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (n <= 8) {
        double best = std::numeric_limits<double>::infinity();
        do {
            best = std::min(best, cost(perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    // Greedy nearest assignment for larger spectra.
    std::vector<bool> used(n, false);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            const double d = std::abs(eig[i] - target(static_cast<Eigen::Index>(j)));
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        used[pick] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double verify_spectrum(const Eigen::MatrixXd& gains, const Eigen::MatrixXd& F, int channels) {
    std::vector<std::complex<double>> eig;
    if (channels == 1) {
        eig = polynomial_roots(characteristic_polynomial(gains.row(0)));
    } else {
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion(gains, channels), false);
        const auto& values = solver.eigenvalues();
        eig.assign(values.data(), values.data() + values.size());
    }
    return best_matching_distance(eig, F.diagonal());
}

double verify_spectrum(const GainRow& row) { return verify_spectrum(row.gains, row.design.F, row.channels()); }

Eigen::MatrixXd block_diagonal(const std::vector<Eigen::MatrixXd>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

}  // namespace ucfas

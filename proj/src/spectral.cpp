#include "spinbus/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace spinbus {

const char* to_string(SpmcVerdict v) {
    switch (v) {
        case SpmcVerdict::holds: return "holds";
        case SpmcVerdict::fails: return "fails";
        case SpmcVerdict::not_applicable: return "not_applicable";
    }
    return "?";
}

EigenSystem dense_spectrum(const HamiltonianMatrix& H, int cap) {
    if (H.dim > cap)
        throw CapacityError("dense_spectrum: dim " + std::to_string(H.dim) +
                            " over cap " + std::to_string(cap));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.to_dense());
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("dense_spectrum: eigensolver failed", 1.0);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// ---------------------------------------------------------------------------
// Lanczos with full reorthogonalization and sequential deflation
// ---------------------------------------------------------------------------

namespace {

struct LanczosResult {
    double value = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;
    bool converged = false;
};

// One deflated extremal eigenpair. `locked` columns are projected out of both
// the start vector and every Krylov vector.
LanczosResult lanczos_lowest(const HamiltonianMatrix& H, const Eigen::MatrixXd& locked,
                             double tol, std::uint64_t seed) {
    const int dim = H.dim;
    const int n_locked = int(locked.cols());
    const int space = dim - n_locked;
    const int max_iter = std::min(space, 250);
    const int max_restart = 60;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    auto project = [&](Eigen::VectorXd& x) {
        if (n_locked) x -= locked * (locked.transpose() * x);
    };

    Eigen::VectorXd start(dim);
    for (int i = 0; i < dim; ++i) start[i] = gauss(rng);
    project(start);
    if (start.norm() < 1e-12) throw ConvergenceError("lanczos: empty deflated space", 1.0);
    start.normalize();

    LanczosResult best;
    best.residual = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < max_restart; ++restart) {
        Eigen::MatrixXd V(dim, max_iter);
        std::vector<double> alpha, beta; // T diagonal / subdiagonal
        V.col(0) = start;
        double norm_est = 1e-300;
        int j = 0;
        bool breakdown = false;
        for (; j < max_iter; ++j) {
            Eigen::VectorXd w = H.apply(V.col(j));
            project(w);
            double a = V.col(j).dot(w);
            alpha.push_back(a);
            norm_est = std::max(norm_est, std::abs(a) + (j ? std::abs(beta[j - 1]) : 0.0));
            w -= a * V.col(j);
            if (j) w -= beta[j - 1] * V.col(j - 1);
            // full reorthogonalization, twice
            for (int pass = 0; pass < 2; ++pass)
                w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
            double b = w.norm();
            if (b < 1e-13 * norm_est || j + 1 == max_iter) {
                if (b < 1e-13 * norm_est) breakdown = true;
                beta.push_back(b);
                ++j;
                break;
            }
            beta.push_back(b);
            V.col(j + 1) = w / b;
        }
        // Ritz extraction from the j x j tridiagonal
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j, j);
        for (int i = 0; i < j; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < j) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(T);
        Eigen::VectorXd s = ts.eigenvectors().col(0);
        double theta = ts.eigenvalues()[0];
        Eigen::VectorXd x = V.leftCols(j) * s;
        project(x);
        x.normalize();
        Eigen::VectorXd r = H.apply(x);
        project(r);
        r -= theta * x;
        double res = r.norm();
        if (res < best.residual) {
            best = {theta, x, res, false};
        }
        if (res < tol * std::max(1.0, norm_est)) {
            best = {theta, x, res, true};
            return best;
        }
        if (breakdown) {
            // invariant subspace exhausted; restart from a fresh direction
            for (int i = 0; i < dim; ++i) start[i] = gauss(rng);
            project(start);
            start -= x * (x.dot(start));
            if (start.norm() < 1e-12) {
                best.converged = best.residual < std::sqrt(tol);
                return best;
            }
            start.normalize();
        } else {
            start = x; // thick-restart lite: continue from the best Ritz vector
        }
    }
    return best;
}

} // namespace

EigenPairs lowest_eigenpairs(const HamiltonianMatrix& H, int count, double tol) {
    if (count < 1 || count > H.dim)
        throw DomainError("lowest_eigenpairs: need 1 <= count <= dim");
    if (count * 4 > H.dim && H.dim > kDenseSolveCap)
        throw DomainError("lowest_eigenpairs: count must be small compared to dim");
    if (H.dim <= 512 || count * 4 > H.dim) {
        // small problems: dense path is both faster and exact
        EigenSystem es = dense_spectrum(H);
        EigenPairs out;
        out.values = es.values.head(count);
        out.vectors = es.vectors.leftCols(count);
        out.residuals.resize(count);
        for (int i = 0; i < count; ++i)
            out.residuals[i] = (H.apply(out.vectors.col(i)) - out.values[i] * out.vectors.col(i)).norm();
        return out;
    }
    Eigen::MatrixXd locked(H.dim, 0);
    Eigen::VectorXd values(count), residuals(count);
    for (int i = 0; i < count; ++i) {
        LanczosResult r = lanczos_lowest(H, locked, tol, 0x5b1f5eedULL + 7919 * i);
        if (!r.converged)
            throw ConvergenceError("lowest_eigenpairs: pair " + std::to_string(i) +
                                       " did not converge",
                                   r.residual);
        locked.conservativeResize(Eigen::NoChange, i + 1);
        locked.col(i) = r.vector;
        values[i] = r.value;
        residuals[i] = r.residual;
    }
    // deflation returns values in ascending order up to tolerance; enforce it
    std::vector<int> order(count);
    for (int i = 0; i < count; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
    EigenPairs out;
    out.values.resize(count);
    out.vectors.resize(H.dim, count);
    out.residuals.resize(count);
    for (int i = 0; i < count; ++i) {
        out.values[i] = values[order[i]];
        out.vectors.col(i) = locked.col(order[i]);
        out.residuals[i] = residuals[order[i]];
    }
    return out;
}

// ---------------------------------------------------------------------------
// SPMC analysis
// ---------------------------------------------------------------------------

double infer_base_quantum(const Eigen::VectorXd& eigenvalues, double tol) {
    std::vector<double> diffs;
    for (int i = 0; i + 1 < eigenvalues.size(); ++i) {
        double d = eigenvalues[i + 1] - eigenvalues[i];
        if (d > tol) diffs.push_back(d);
    }
    if (diffs.empty()) return 0.0;
    auto fgcd = [tol](double a, double b) {
        while (b > tol) {
            double r = std::fmod(a, b);
            r = std::min(r, b - r);
            a = b;
            b = r;
        }
        return a;
    };
    double g = diffs[0];
    for (std::size_t i = 1; i < diffs.size(); ++i) g = fgcd(std::max(g, diffs[i]), std::min(g, diffs[i]));
    // Absolute-tolerance Euclid on incommensurate gaps terminates at O(tol);
    // require a clear margin so such spurious divisors read as "no base".
    if (g <= 4.0 * tol) return 0.0;
    // refine by least squares through the integer multiples
    double num = 0.0, den = 0.0;
    for (double d : diffs) {
        double n = std::round(d / g);
        if (n < 1) return 0.0;
        num += d * n;
        den += n * n;
    }
    return num / den;
}

SpectrumReport analyze_spectrum(const HamiltonianMatrix& H,
                                const std::vector<std::size_t>& mirror) {
    if (int(mirror.size()) != H.dim)
        throw DomainError("analyze_spectrum: mirror size mismatch");
    Eigen::MatrixXd D = H.to_dense();
    SpectrumReport rep;

    // [H, P] check: (HP)(i,j) = D(i, perm(j)), (PH)(i,j) = D(perm^{-1}(i), j)
    std::vector<std::size_t> inv(mirror.size());
    for (std::size_t j = 0; j < mirror.size(); ++j) inv[mirror[j]] = j;
    double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
    double comm = 0.0;
    for (int j = 0; j < H.dim; ++j)
        for (int i = 0; i < H.dim; ++i)
            comm = std::max(comm, std::abs(D(i, int(mirror[j])) - D(int(inv[i]), j)));
    EigenSystem es = dense_spectrum(H);
    rep.eigenvalues = es.values;
    if (comm > 1e-10 * scale) {
        rep.verdict = SpmcVerdict::not_applicable;
        rep.parities.assign(H.dim, 0);
        return rep;
    }

    double span = es.values[H.dim - 1] - es.values[0];
    double cluster_tol = 1e-9 * std::max(span, 1e-300);
    auto apply_p = [&](const Eigen::MatrixXd& block) {
        Eigen::MatrixXd out(block.rows(), block.cols());
        for (int i = 0; i < block.rows(); ++i) out.row(int(mirror[i])) = block.row(i);
        return out;
    };

    rep.parities.assign(H.dim, 0);
    for (int lo = 0; lo < H.dim;) {
        int hi = lo + 1;
        while (hi < H.dim && es.values[hi] - es.values[hi - 1] <= cluster_tol) ++hi;
        int w = hi - lo;
        Eigen::MatrixXd Vc = es.vectors.middleCols(lo, w);
        Eigen::MatrixXd B = Vc.transpose() * apply_p(Vc);
        B = ((B + B.transpose()) / 2).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(B);
        es.vectors.middleCols(lo, w) = Vc * bs.eigenvectors();
        for (int i = 0; i < w; ++i)
            rep.parities[lo + i] = bs.eigenvalues()[i] >= 0 ? 1 : -1;
        lo = hi;
    }
    double parity_res = 0.0;
    for (int i = 0; i < H.dim; ++i) {
        Eigen::VectorXd pv = apply_p(es.vectors.col(i));
        parity_res = std::max(parity_res, (pv - double(rep.parities[i]) * es.vectors.col(i)).norm());
    }
    rep.parity_residual = parity_res;

    double tol_comm = 1e-6 * std::max(span, 1e-300);
    double e0 = infer_base_quantum(es.values, tol_comm);
    if (e0 > 0.0) {
        rep.E0 = e0;
        std::vector<long> labels(H.dim);
        double resid = 0.0;
        for (int i = 0; i < H.dim; ++i) {
            labels[i] = std::lround((es.values[i] - es.values[0]) / e0);
            resid = std::max(resid, std::abs(es.values[i] - es.values[0] - double(labels[i]) * e0));
        }
        rep.labels = labels;
        rep.commensuration_residual = resid;
        bool parity_ok = true;
        int sign = rep.parities[0] * (labels[0] % 2 == 0 ? 1 : -1);
        for (int i = 0; i < H.dim; ++i) {
            int expect = sign * (labels[i] % 2 == 0 ? 1 : -1);
            if (rep.parities[i] != expect) parity_ok = false;
        }
        bool commensurate = resid < tol_comm && parity_res < 1e-8;
        rep.verdict = (parity_ok && commensurate) ? SpmcVerdict::holds : SpmcVerdict::fails;
    } else {
        rep.verdict = SpmcVerdict::fails;
    }
    return rep;
}

double evolution_is_mirror(const HamiltonianMatrix& H, double E0,
                           const std::vector<std::size_t>& mirror) {
    if (E0 <= 0) throw DomainError("evolution_is_mirror: E0 > 0 required");
    if (int(mirror.size()) != H.dim)
        throw DomainError("evolution_is_mirror: mirror size mismatch");
    EigenSystem es = dense_spectrum(H);
    const std::complex<double> I(0, 1);
    double t = std::numbers::pi / E0;
    Eigen::VectorXcd phases(H.dim);
    for (int i = 0; i < H.dim; ++i) phases[i] = std::exp(-I * es.values[i] * t);
    Eigen::MatrixXcd U = es.vectors.cast<std::complex<double>>() * phases.asDiagonal() *
                         es.vectors.transpose().cast<std::complex<double>>();
    U *= std::exp(I * es.values[0] * t); // analytic global phase

    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(H.dim, H.dim);
    for (int j = 0; j < H.dim; ++j) P(int(mirror[j]), j) = 1.0;
    auto opnorm = [](const Eigen::MatrixXcd& M) {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
        return svd.singularValues()[0];
    };
    return std::min(opnorm(U - P), opnorm(U + P));
}

} // namespace spinbus

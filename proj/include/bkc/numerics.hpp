#pragma once

// Dense kernels shared by every other module. Desk scale only (order <= ~64).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bkc/errors.hpp"

namespace bkc {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace num {

template <class Derived>
double inf_norm(const Eigen::MatrixBase<Derived>& A) {
    if (A.size() == 0) return 0.0;
    return A.cwiseAbs().rowwise().sum().maxCoeff();
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& A) {
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (!std::isfinite(std::abs(A(i, j)))) return false;
    return true;
}

// X = A^-1 B with partial pivoting and one step of iterative refinement.
inline CMat solve_linear(const CMat& A, const CMat& B, double max_condition = 1e12) {
    if (A.rows() != A.cols()) throw std::invalid_argument("solve_linear: A must be square");
    if (A.rows() != B.rows()) throw std::invalid_argument("solve_linear: row mismatch");
    if (!all_finite(A) || !all_finite(B)) throw std::invalid_argument("solve_linear: non-finite input");
    Eigen::PartialPivLU<CMat> lu(A);
    const double rc = lu.rcond();
    const double cond = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(cond <= max_condition)) {
        std::ostringstream os;
        os << "solve_linear: matrix singular or ill-conditioned (condition estimate " << cond << ")";
        throw singular_matrix_error(os.str(), cond);
    }
    CMat X = lu.solve(B);
    CMat R = B - A * X;
    X += lu.solve(R);
    return X;
}

inline RMat solve_linear(const RMat& A, const RMat& B, double max_condition = 1e12) {
    if (A.rows() != A.cols()) throw std::invalid_argument("solve_linear: A must be square");
    if (A.rows() != B.rows()) throw std::invalid_argument("solve_linear: row mismatch");
    if (!all_finite(A) || !all_finite(B)) throw std::invalid_argument("solve_linear: non-finite input");
    Eigen::PartialPivLU<RMat> lu(A);
    const double rc = lu.rcond();
    const double cond = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(cond <= max_condition)) {
        std::ostringstream os;
        os << "solve_linear: matrix singular or ill-conditioned (condition estimate " << cond << ")";
        throw singular_matrix_error(os.str(), cond);
    }
    RMat X = lu.solve(B);
    RMat R = B - A * X;
    X += lu.solve(R);
    return X;
}

namespace detail {

// Strongly connected components of the nonzero pattern (Tarjan). A reducible
// matrix is permutation-similar to block triangular form with these blocks on
// the diagonal, so its eigenvalues are the union of the blocks' eigenvalues.
// Same idea as the permutation step of LAPACK's balancing; it keeps
// triangular (exceptional-point) matrices exact.
inline std::vector<std::vector<int>> pattern_components(const CMat& A) {
    const int n = static_cast<int>(A.rows());
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::vector<int>> comps;
    int counter = 0;
    // iterative Tarjan to avoid deep recursion
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<int, int>> work{{root, 0}};
        while (!work.empty()) {
            auto& [v, next] = work.back();
            if (next == 0 && index[v] < 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool pushed = false;
            while (next < n) {
                int w = next++;
                if (w == v || A(v, w) == cd(0.0)) continue;
                if (index[w] < 0) {
                    work.push_back({w, 0});
                    pushed = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (pushed) continue;
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            int finished = v;
            work.pop_back();
            if (!work.empty()) {
                int parent = work.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }
    return comps;
}

inline void sort_spectrum(std::vector<cd>& s) {
    std::sort(s.begin(), s.end(), [](cd a, cd b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

} // namespace detail

// Eigenvalues only, sorted by real part descending.
inline CVec eigenvalues(const CMat& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (!all_finite(A)) throw std::invalid_argument("eigenvalues: non-finite input");
    std::vector<cd> vals;
    vals.reserve(A.rows());
    for (const auto& comp : detail::pattern_components(A)) {
        const int m = static_cast<int>(comp.size());
        if (m == 1) {
            vals.push_back(A(comp[0], comp[0]));
            continue;
        }
        CMat B(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) B(i, j) = A(comp[i], comp[j]);
        Eigen::ComplexEigenSolver<CMat> es(B, false);
        if (es.info() != Eigen::Success) throw convergence_error("eigenvalues: QR iteration did not converge");
        for (int i = 0; i < m; ++i) vals.push_back(es.eigenvalues()(i));
    }
    detail::sort_spectrum(vals);
    CVec out(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
    return out;
}

inline CVec eigenvalues(const RMat& A) { return eigenvalues(CMat(A.cast<cd>())); }

// Largest real part of the spectrum (growth rate of q' = A q).
template <class Derived>
double spectral_abscissa(const Eigen::MatrixBase<Derived>& A) {
    CVec s = eigenvalues(CMat(A.template cast<cd>()));
    return s(0).real();
}

struct EigenResult {
    CVec values;     // sorted by real part descending
    CMat vectors;    // unit-norm columns
    bool defective = false;
    double vector_condition = 1.0;
};

inline EigenResult eigendecompose(const CMat& A, double defect_threshold = 1e8) {
    const Eigen::Index n = A.rows();
    EigenResult r;
    r.values = eigenvalues(A);
    r.vectors.resize(n, n);
    auto comps = detail::pattern_components(A);
    if (comps.size() == 1 && n > 1) {
        Eigen::ComplexEigenSolver<CMat> es(A, true);
        if (es.info() != Eigen::Success) throw convergence_error("eigendecompose: QR iteration did not converge");
        // pair each sorted eigenvalue with the nearest unused solver eigenvalue
        std::vector<char> used(n, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n; ++j) {
                if (used[j]) continue;
                double d = std::abs(es.eigenvalues()(j) - r.values(i));
                if (d < bd) { bd = d; best = j; }
            }
            used[best] = 1;
            r.values(i) = es.eigenvalues()(best);
            r.vectors.col(i) = es.eigenvectors().col(best).normalized();
        }
    } else {
        // reducible: null vector of (A - s I) for each eigenvalue
        for (Eigen::Index i = 0; i < n; ++i) {
            CMat S = A - r.values(i) * CMat::Identity(n, n);
            Eigen::JacobiSVD<CMat> sv(S, Eigen::ComputeFullV);
            r.vectors.col(i) = sv.matrixV().col(n - 1).normalized();
        }
    }
    Eigen::JacobiSVD<CMat> sv(r.vectors);
    const auto& s = sv.singularValues();
    double smin = s(s.size() - 1);
    r.vector_condition = smin > 0 ? s(0) / smin : std::numeric_limits<double>::infinity();
    r.defective = !(r.vector_condition <= defect_threshold);
    return r;
}

inline EigenResult eigendecompose(const RMat& A, double defect_threshold = 1e8) {
    return eigendecompose(CMat(A.cast<cd>()), defect_threshold);
}

struct SvdResult {
    RVec sigma;  // descending
    CMat U, V;   // A = U diag(sigma) V^H
};

inline SvdResult svd(const CMat& A) {
    if (!all_finite(A)) throw std::invalid_argument("svd: non-finite input");
    Eigen::JacobiSVD<CMat> s(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {s.singularValues(), s.matrixU(), s.matrixV()};
}

// Solves M S + S M^T + D = 0 through the Kronecker-vectorised linear system.
inline RMat solve_lyapunov(const RMat& M, const RMat& D) {
    const Eigen::Index n = M.rows();
    if (M.cols() != n || D.rows() != n || D.cols() != n)
        throw std::invalid_argument("solve_lyapunov: dimension mismatch");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("solve_lyapunov: D must be symmetric");
    CVec s = eigenvalues(M);
    if (!(s(0).real() < 0.0)) {
        std::ostringstream os;
        os << "solve_lyapunov: dynamical matrix is not Hurwitz, eigenvalue " << s(0);
        throw not_hurwitz_error(os.str(), s(0));
    }
    const Eigen::Index n2 = n * n;
    RMat K = RMat::Zero(n2, n2);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = i + j * n;
            for (Eigen::Index k = 0; k < n; ++k) {
                K(row, k + j * n) += M(i, k);  // (I kron M)
                K(row, i + k * n) += M(j, k);  // (M kron I)
            }
        }
    }
    RMat rhs = -Eigen::Map<const RVec>(D.data(), n2);
    RMat x = solve_linear(K, rhs, 1e14);
    RMat S = Eigen::Map<const RMat>(x.data(), n, n);
    return 0.5 * (S + S.transpose());
}

enum class IvpStatus { completed, diverged };

template <class Vec>
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> y;
    std::string integrator = "rk4";
    double step = 0.0;
    IvpStatus status = IvpStatus::completed;
    double error_estimate = 0.0;  // filled when step halving is requested
};

struct IvpOptions {
    double blowup_bound = 1e12;
    int record_every = 1;
    bool step_halving = false;
};

namespace detail {

template <class Vec, class F>
Trajectory<Vec> rk4(F& f, const Vec& y0, double t0, double t1, double h, const IvpOptions& opt) {
    if (!(h > 0) || !(t1 > t0)) throw std::invalid_argument("integrate_ivp: need t1 > t0 and step > 0");
    const long long n = std::max<long long>(1, static_cast<long long>(std::ceil((t1 - t0) / h - 1e-9)));
    const double dt = (t1 - t0) / static_cast<double>(n);
    const int every = std::max(1, opt.record_every);
    Trajectory<Vec> tr;
    tr.step = dt;
    tr.t.push_back(t0);
    tr.y.push_back(y0);
    Vec y = y0;
    for (long long i = 0; i < n; ++i) {
        const double t = t0 + dt * static_cast<double>(i);
        Vec k1 = f(t, y);
        Vec k2 = f(t + 0.5 * dt, Vec(y + (0.5 * dt) * k1));
        Vec k3 = f(t + 0.5 * dt, Vec(y + (0.5 * dt) * k2));
        Vec k4 = f(t + dt, Vec(y + dt * k3));
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double nrm = y.norm();
        const bool last = (i + 1 == n);
        if (!std::isfinite(nrm) || nrm > opt.blowup_bound) {
            tr.status = IvpStatus::diverged;
            tr.t.push_back(t + dt);
            tr.y.push_back(y);
            return tr;
        }
        if (last || (i + 1) % every == 0) {
            tr.t.push_back(last ? t1 : t + dt);
            tr.y.push_back(y);
        }
    }
    return tr;
}

} // namespace detail

// Fixed-step classical RK4. f(t, y) -> dy/dt.
template <class Vec, class F>
Trajectory<Vec> integrate_ivp(F&& f, const Vec& y0, double t0, double t1, double h, IvpOptions opt = {}) {
    auto coarse = detail::rk4<Vec>(f, y0, t0, t1, h, opt);
    if (!opt.step_halving || coarse.status == IvpStatus::diverged) return coarse;
    auto fine = detail::rk4<Vec>(f, y0, t0, t1, 0.5 * h, opt);
    if (fine.status == IvpStatus::completed)
        fine.error_estimate = (fine.y.back() - coarse.y.back()).norm() / 15.0;
    return fine;
}

// Winding number of a closed sampled curve about z0 (discrete argument principle).
inline int winding_from_samples(const std::vector<cd>& samples, cd z0, double distance_tol = 1e-9,
                                double snap_tol = 1e-6) {
    const std::size_t n = samples.size();
    if (n < 3) throw std::invalid_argument("winding_from_samples: need at least 3 samples");
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw std::invalid_argument("winding_from_samples: non-finite sample");
        if (std::abs(s - z0) <= distance_tol) throw phase_boundary_error("curve touches reference point");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cd a = samples[i] - z0;
        const cd b = samples[(i + 1) % n] - z0;
        const double d = std::arg(b / a);
        if (std::abs(d) > 0.5 * std::numbers::pi) throw sampling_error("insufficient sampling");
        total += d;
    }
    const double w = total / (2.0 * std::numbers::pi);
    const double r = std::round(w);
    if (std::abs(w - r) > snap_tol) {
        std::ostringstream os;
        os << "winding_from_samples: non-integer winding " << w;
        throw numerical_error(os.str());
    }
    return static_cast<int>(r);
}

} // namespace num
} // namespace bkc

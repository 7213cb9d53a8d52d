#include "segsolve/linear_solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace segsolve {

namespace {

// Interior unknowns indexed p = (j-1)*(nx-2) + (i-1).
class InteriorOperator {
public:
    explicit InteriorOperator(const HelmholtzProblem& p)
        : g_(p.weight.grid()),
          mx_(g_.nx() - 2),
          my_(g_.ny() - 2),
          cx_(1.0 / (g_.hx() * g_.hx())),
          cy_(1.0 / (g_.hy() * g_.hy())),
          diag_(mx_ * my_) {
        if (!(p.trace.grid() == g_)) throw std::invalid_argument("trace grid differs from weight grid");
        if (p.load && !(p.load->grid() == g_)) throw std::invalid_argument("load grid differs");
        if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon))
            throw std::invalid_argument("epsilon must be positive");
        const double inv_eps = 1.0 / p.epsilon;
        for (std::size_t j = 0; j < my_; ++j)
            for (std::size_t i = 0; i < mx_; ++i) {
                const double w = p.weight(i + 1, j + 1);
                if (!(w >= 0.0) || !std::isfinite(w))
                    throw std::invalid_argument("negative or non-finite Helmholtz weight");
                diag_[j * mx_ + i] = 2.0 * cx_ + 2.0 * cy_ + w * inv_eps;
            }
    }

    std::size_t size() const { return diag_.size(); }
    const std::vector<double>& diag() const { return diag_; }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (std::size_t j = 0; j < my_; ++j) {
            for (std::size_t i = 0; i < mx_; ++i) {
                const std::size_t p = j * mx_ + i;
                double v = diag_[p] * x[p];
                if (i > 0) v -= cx_ * x[p - 1];
                if (i + 1 < mx_) v -= cx_ * x[p + 1];
                if (j > 0) v -= cy_ * x[p - mx_];
                if (j + 1 < my_) v -= cy_ * x[p + mx_];
                y[p] = v;
            }
        }
    }

    std::vector<double> rhs(const HelmholtzProblem& p) const {
        std::vector<double> b(size(), 0.0);
        const ScalarField& g = p.trace;
        for (std::size_t j = 0; j < my_; ++j) {
            for (std::size_t i = 0; i < mx_; ++i) {
                const std::size_t gi = i + 1, gj = j + 1;
                double v = p.load ? (*p.load)(gi, gj) : 0.0;
                if (i == 0) v += cx_ * g(0, gj);
                if (i + 1 == mx_) v += cx_ * g(gi + 1, gj);
                if (j == 0) v += cy_ * g(gi, 0);
                if (j + 1 == my_) v += cy_ * g(gi, gj + 1);
                b[j * mx_ + i] = v;
            }
        }
        return b;
    }

    std::vector<double> gather(const ScalarField& f) const {
        std::vector<double> x(size());
        for (std::size_t j = 0; j < my_; ++j)
            for (std::size_t i = 0; i < mx_; ++i) x[j * mx_ + i] = f(i + 1, j + 1);
        return x;
    }

    ScalarField scatter(const std::vector<double>& x, const ScalarField& trace) const {
        ScalarField out(g_);
        for (std::size_t k = 0; k < g_.size(); ++k)
            if (g_.is_boundary(k)) out[k] = trace[k];
        for (std::size_t j = 0; j < my_; ++j)
            for (std::size_t i = 0; i < mx_; ++i) out(i + 1, j + 1) = x[j * mx_ + i];
        return out;
    }

    double cx() const { return cx_; }
    double cy() const { return cy_; }
    std::size_t mx() const { return mx_; }
    std::size_t my() const { return my_; }

private:
    Grid g_;
    std::size_t mx_, my_;
    double cx_, cy_;
    std::vector<double> diag_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double precond_norm(const std::vector<double>& r, const std::vector<double>& diag) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) s += r[k] * r[k] / diag[k];
    return std::sqrt(s);
}

}  // namespace

ScalarField solve_helmholtz(const HelmholtzProblem& p, const SolverControls& ctl,
                            const ScalarField* initial_guess, SolveStats* stats) {
    const InteriorOperator A(p);
    const std::size_t n = A.size();
    const std::vector<double>& d = A.diag();
    const std::vector<double> b = A.rhs(p);
    const double bnorm = precond_norm(b, d);
    if (!(ctl.rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");

    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    st = SolveStats{};

    if (bnorm == 0.0) return A.scatter(std::vector<double>(n, 0.0), p.trace);

    std::vector<double> x = initial_guess ? A.gather(*initial_guess) : std::vector<double>(n, 0.0);
    std::vector<double> r(n), z(n), q(n), s(n);
    A.apply(x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / d[k];
    double rz = dot(r, z);
    double res = std::sqrt(std::max(rz, 0.0)) / bnorm;
    st.initial_residual = res;
    st.final_residual = res;

    const std::size_t max_iters = ctl.max_iters ? ctl.max_iters : 10 * n;
    std::vector<double> dir = z;
    std::size_t it = 0;
    while (res > ctl.rel_tol && it < max_iters) {
        A.apply(dir, s);
        const double alpha = rz / dot(dir, s);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * dir[k];
            r[k] -= alpha * s[k];
            z[k] = r[k] / d[k];
        }
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) dir[k] = z[k] + beta * dir[k];
        res = std::sqrt(std::max(rz, 0.0)) / bnorm;
        ++it;
    }
    st.iterations = it;
    st.final_residual = res;
    if (res > ctl.rel_tol)
        throw ConvergenceError("CG did not reach rel_tol " + format_real(ctl.rel_tol) + " in " +
                                   std::to_string(it) + " iterations (residual " +
                                   format_real(res) + ")",
                               it, res);
    return A.scatter(x, p.trace);
}

ScalarField harmonic_extension(const ScalarField& trace, const SolverControls& ctl,
                               SolveStats* stats) {
    HelmholtzProblem p{ScalarField(trace.grid()), 1.0, trace, std::nullopt};
    return solve_helmholtz(p, ctl, nullptr, stats);
}

ScalarField dense_oracle_solve(const HelmholtzProblem& p) {
    const InteriorOperator A(p);
    const std::size_t n = A.size();
    if (n > kDenseOracleMaxUnknowns)
        throw std::invalid_argument("dense oracle limited to " +
                                    std::to_string(kDenseOracleMaxUnknowns) + " interior nodes");
    const std::size_t mx = A.mx();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t q = 0; q < n; ++q) {
        const auto r = static_cast<Eigen::Index>(q);
        const std::size_t i = q % mx, j = q / mx;
        K(r, r) = A.diag()[q];
        if (i > 0) K(r, r - 1) = -A.cx();
        if (i + 1 < mx) K(r, r + 1) = -A.cx();
        if (j > 0) K(r, r - static_cast<Eigen::Index>(mx)) = -A.cy();
        if (j + 1 < A.my()) K(r, r + static_cast<Eigen::Index>(mx)) = -A.cy();
    }
    const std::vector<double> b = A.rhs(p);
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(n));
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::runtime_error("dense oracle: matrix not SPD");
    const Eigen::VectorXd xv = llt.solve(bv);
    return A.scatter(std::vector<double>(xv.data(), xv.data() + xv.size()), p.trace);
}

double helmholtz_relative_residual(const HelmholtzProblem& p, const ScalarField& u) {
    const InteriorOperator A(p);
    const std::vector<double> b = A.rhs(p);
    const std::vector<double> x = A.gather(u);
    std::vector<double> ax(A.size());
    A.apply(x, ax);
    for (std::size_t k = 0; k < ax.size(); ++k) ax[k] = b[k] - ax[k];
    const double bnorm = precond_norm(b, A.diag());
    const double rnorm = precond_norm(ax, A.diag());
    return bnorm == 0.0 ? rnorm : rnorm / bnorm;
}

}  // namespace segsolve

#include "speclab/quadrature.hpp"

#include "speclab/common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace speclab {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;
constexpr int kGolubWelschMax = 100;

struct Recurrence {
    std::vector<long double> a;  // a_0 .. a_{n-1}
    std::vector<long double> b;  // b_0 (unused) .. b_n
    long double p0 = 0;

    Recurrence(int n, double alpha, double beta) : a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n) + 1) {
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = jacobi_a(j, alpha, beta);
        for (int j = 1; j <= n; ++j) b[static_cast<std::size_t>(j)] = jacobi_b(j, alpha, beta);
        p0 = 1 / std::sqrt(jacobi_mass(alpha, beta));
    }

    // p_n(x), p_n'(x) and sum_{j<n} p_j(x)^2.
    void eval(int n, long double x, long double& p, long double& dp, long double& sum_sq) const {
        long double pm = 0, p_cur = p0, dpm = 0, dp_cur = 0;
        sum_sq = 0;
        for (int j = 0; j < n; ++j) {
            sum_sq += p_cur * p_cur;
            const auto ju = static_cast<std::size_t>(j);
            const long double next = ((x - a[ju]) * p_cur - (j ? b[ju] * pm : 0)) / b[ju + 1];
            const long double dnext = ((x - a[ju]) * dp_cur + p_cur - (j ? b[ju] * dpm : 0)) / b[ju + 1];
            pm = p_cur;
            p_cur = next;
            dpm = dp_cur;
            dp_cur = dnext;
        }
        p = p_cur;
        dp = dp_cur;
    }

    // Newton polish from x; returns the root and its Christoffel weight.
    std::pair<long double, long double> polish(int n, long double x) const {
        long double p, dp, s;
        for (int it = 0; it < 50; ++it) {
            eval(n, x, p, dp, s);
            const long double dx = p / dp;
            x -= dx;
            if (std::fabs(dx) <= 4 * std::numeric_limits<long double>::epsilon() * std::max(1.0L, std::fabs(x))) break;
        }
        eval(n, x, p, dp, s);
        return {x, 1 / s};
    }
};

std::vector<long double> golub_welsch_guess(int n, const Recurrence& r) {
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int j = 0; j < n; ++j) diag[j] = static_cast<double>(r.a[static_cast<std::size_t>(j)]);
    for (int j = 1; j < n; ++j) sub[j - 1] = static_cast<double>(r.b[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: tridiagonal eigensolver failed");
    std::vector<long double> x(static_cast<std::size_t>(n));
    // eigenvalues ascend; nodes are stored descending
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = es.eigenvalues()[n - 1 - i];
    return x;
}

std::vector<long double> asymptotic_guess(int n, double alpha, double beta) {
    std::vector<long double> x(static_cast<std::size_t>(n));
    const long double denom = n + (static_cast<long double>(alpha) + beta + 1) / 2;
    for (int k = 1; k <= n; ++k) {
        const long double theta = (k + static_cast<long double>(alpha) / 2 - 0.25L) * kPi / denom;
        x[static_cast<std::size_t>(k - 1)] = std::cos(theta);
    }
    return x;
}

bool valid(const QuadratureRule& q, long double mass) {
    long double total = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q.weights[i] > 0) || !std::isfinite(q.nodes[i])) return false;
        if (q.nodes[i] <= -1 || q.nodes[i] >= 1) return false;
        if (i && !(q.nodes[i] < q.nodes[i - 1])) return false;
        total += q.weights[i];
    }
    return std::fabs(total - mass) <= 1e-12L * mass;
}

QuadratureRule build(int n, double alpha, double beta, const std::vector<long double>& guess) {
    const Recurrence r(n, alpha, beta);
    QuadratureRule q;
    q.alpha = alpha;
    q.beta = beta;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    const bool symmetric = alpha == beta;
    const int count = symmetric ? (n + 1) / 2 : n;
    parallel_for(static_cast<std::size_t>(count), 64, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t iu = lo; iu < hi; ++iu) {
            long double x = guess[iu];
            if (symmetric && n % 2 == 1 && iu == static_cast<std::size_t>(n / 2)) x = 0;
            const auto [root, w] = r.polish(n, x);
            q.nodes[iu] = static_cast<double>(root);
            q.weights[iu] = static_cast<double>(w);
            if (symmetric) {
                const auto mirror = static_cast<std::size_t>(n) - 1 - iu;
                q.nodes[mirror] = -q.nodes[iu];
                q.weights[mirror] = q.weights[iu];
            }
        }
    });
    if (symmetric && n % 2 == 1) q.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return q;
}

}  // namespace

long double jacobi_mass(double alpha, double beta) {
    const long double a = alpha, b = beta;
    return std::exp((a + b + 1) * std::log(2.0L) + std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 2));
}

long double jacobi_a(int j, double alpha, double beta) {
    const long double a = alpha, b = beta;
    if (j == 0) return (b - a) / (a + b + 2);
    const long double s = 2 * static_cast<long double>(j) + a + b;
    return (b * b - a * a) / (s * (s + 2));
}

long double jacobi_b(int j, double alpha, double beta) {
    if (j < 1) throw std::invalid_argument("jacobi_b: j must be >= 1");
    const long double a = alpha, b = beta;
    if (j == 1) return std::sqrt(4 * (1 + a) * (1 + b) / ((2 + a + b) * (2 + a + b) * (3 + a + b)));
    const long double jj = j;
    const long double s = 2 * jj + a + b;
    return std::sqrt(4 * jj * (jj + a) * (jj + b) * (jj + a + b) / (s * s * (s + 1) * (s - 1)));
}

long double jacobi_orthonormal(int n, double alpha, double beta, long double x, long double* sum_sq) {
    if (n < 0) throw std::invalid_argument("jacobi_orthonormal: n must be >= 0");
    long double pm = 0;
    long double p = 1 / std::sqrt(jacobi_mass(alpha, beta));
    long double s = 0;
    for (int j = 0; j < n; ++j) {
        s += p * p;
        const long double next = ((x - jacobi_a(j, alpha, beta)) * p - (j ? jacobi_b(j, alpha, beta) * pm : 0)) /
                                 jacobi_b(j + 1, alpha, beta);
        pm = p;
        p = next;
    }
    if (sum_sq) *sum_sq = s;
    return p;
}

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
    if (!(alpha > -1) || !(beta > -1)) throw std::invalid_argument("gauss_jacobi: alpha, beta must exceed -1");
    const long double mass = jacobi_mass(alpha, beta);
    const Recurrence r(n, alpha, beta);
    if (n > kGolubWelschMax) {
        QuadratureRule q = build(n, alpha, beta, asymptotic_guess(n, alpha, beta));
        if (valid(q, mass)) return q;
    }
    QuadratureRule q = build(n, alpha, beta, golub_welsch_guess(n, r));
    if (!valid(q, mass))
        throw std::runtime_error("gauss_jacobi: rule with " + std::to_string(n) + " points failed validation");
    return q;
}

std::shared_ptr<const QuadratureRule> cached_gauss_jacobi(int n, double alpha, double beta) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const QuadratureRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{n, alpha, beta}];
    if (!slot) slot = std::make_shared<const QuadratureRule>(gauss_jacobi(n, alpha, beta));
    return slot;
}

int points_for_degree(int degree) {
    if (degree < 0) throw std::invalid_argument("points_for_degree: negative degree");
    return degree / 2 + 1;
}

}  // namespace speclab

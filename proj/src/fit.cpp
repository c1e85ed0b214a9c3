#include "speclab/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace speclab {

namespace {

ExponentFit solve(const Eigen::VectorXd& lx, const Eigen::VectorXd& ly) {
    const Eigen::Index n = lx.size();
    // Centering keeps the normal equations well conditioned.
    const double mx = lx.mean();
    Eigen::MatrixXd a(n, 2);
    a.col(0) = lx.array() - mx;
    a.col(1).setOnes();
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(ly);
    ExponentFit fit;
    fit.slope = coef(0);
    fit.intercept = coef(1) - coef(0) * mx;
    fit.residual = std::sqrt((a * coef - ly).squaredNorm() / static_cast<double>(n));
    return fit;
}

}  // namespace

ExponentFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("loglog_fit: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("loglog_fit: need at least two points");
    Eigen::VectorXd lx(static_cast<Eigen::Index>(x.size())), ly(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog_fit: non-positive value");
        lx(static_cast<Eigen::Index>(i)) = std::log(x[i]);
        ly(static_cast<Eigen::Index>(i)) = std::log(y[i]);
    }
    ExponentFit fit = solve(lx, ly);
    fit.blocks_used = static_cast<int>(x.size());
    fit.method = "loglog-ls";
    return fit;
}

std::vector<std::pair<double, double>> dyadic_envelope(std::span<const SeriesPoint> series) {
    std::map<int, double> block_max;
    for (const auto& p : series) {
        if (!(p.x > 0) || !std::isfinite(p.x)) throw std::invalid_argument("envelope: abscissa must be positive");
        if (!(p.y >= 0) || !std::isfinite(p.y)) throw std::invalid_argument("envelope: values must be finite and >= 0");
        const int j = std::ilogb(p.x);
        auto [it, fresh] = block_max.try_emplace(j, p.y);
        if (!fresh && p.y > it->second) it->second = p.y;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(block_max.size());
    for (const auto& [j, m] : block_max) out.emplace_back(std::ldexp(std::sqrt(2.0), j), m);
    return out;
}

ExponentFit envelope_exponent(std::span<const SeriesPoint> series, int min_blocks) {
    auto env = dyadic_envelope(series);
    int skipped = 0;
    // A last block covering less than half an octave biases the slope; drop it.
    if (env.size() > 1) {
        double x_max = 0;
        for (const auto& p : series) x_max = std::max(x_max, p.x);
        const double block_start = env.back().first / std::sqrt(2.0);
        if (x_max < block_start * std::sqrt(2.0)) {
            env.pop_back();
            ++skipped;
        }
    }
    std::vector<double> lx, ly;
    for (const auto& [c, m] : env) {
        if (m > 0) {
            lx.push_back(std::log(c));
            ly.push_back(std::log(m));
        } else {
            ++skipped;
        }
    }
    if (static_cast<int>(lx.size()) < std::max(min_blocks, 2))
        throw std::invalid_argument("envelope_exponent: only " + std::to_string(lx.size()) +
                                    " usable dyadic blocks, need " + std::to_string(min_blocks));
    ExponentFit fit = solve(Eigen::Map<Eigen::VectorXd>(lx.data(), static_cast<Eigen::Index>(lx.size())),
                            Eigen::Map<Eigen::VectorXd>(ly.data(), static_cast<Eigen::Index>(ly.size())));
    fit.blocks_used = static_cast<int>(lx.size());
    fit.blocks_skipped = skipped;
    fit.method = "dyadic-envelope";
    return fit;
}

}  // namespace speclab

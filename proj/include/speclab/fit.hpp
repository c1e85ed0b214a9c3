// fit.hpp
//
// Log-log exponent fits. Oscillating or intermittently vanishing series are
// fitted through their dyadic-block maxima ("envelopes"); smooth series can
// be fitted directly.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace speclab {

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    // root-mean-square residual of the log-log regression
    double residual = 0.0;
    int blocks_used = 0;
    int blocks_skipped = 0;
    std::string method;
};

struct SeriesPoint {
    double x;
    double y;
};

// Least-squares line through (log x_i, log y_i); all x, y must be positive.
ExponentFit loglog_fit(std::span<const double> x, std::span<const double> y);

// Fit through per-block maxima, blocks [2^j, 2^{j+1}) in x, abscissa the
// geometric block center 2^{j+1/2}. Blocks whose maximum is zero are skipped, as
// is a last block whose samples span less than half an octave.
// Throws std::invalid_argument with fewer than `min_blocks` usable blocks.
ExponentFit envelope_exponent(std::span<const SeriesPoint> series, int min_blocks = 4);

// The (center, max) pairs the envelope fit regresses through.
std::vector<std::pair<double, double>> dyadic_envelope(std::span<const SeriesPoint> series);

}  // namespace speclab

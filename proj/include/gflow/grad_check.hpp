#pragma once

#include <cmath>
#include <functional>

#include "gflow/nn.hpp"

namespace gflow {

// Central finite-difference gradient checker. `loss` must be a pure function
// of the parameter values; it is re-evaluated with each entry perturbed by
// +/- h. Returns the maximum relative error against `analytic`.
//
// Relative error uses max(|fd|, |g|) as the scale and falls back to the
// absolute difference when both are below 1e-8.
inline double finite_difference_max_rel_error(DenseParams& params,
                                              const std::function<double()>& loss,
                                              const DenseGrads& analytic, double h = 1e-5) {
    double worst = 0.0;
    auto probe = [&](double& x, double g) {
        const double saved = x;
        x = saved + h;
        const double fp = loss();
        x = saved - h;
        const double fm = loss();
        x = saved;
        const double fd = (fp - fm) / (2.0 * h);
        const double scale = std::max(std::abs(fd), std::abs(g));
        const double err = scale < 1e-8 ? std::abs(fd - g) : std::abs(fd - g) / scale;
        if (err > worst) worst = err;
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& lay = params.layers[l];
        for (std::size_t i = 0; i < lay.w.size(); ++i) probe(lay.w.data()[i], analytic.dw[l].data()[i]);
        for (std::size_t i = 0; i < lay.b.size(); ++i) probe(lay.b[i], analytic.db[l][i]);
    }
    return worst;
}

// Same check against a free vector of values (e.g. logits).
inline double finite_difference_max_rel_error(double* values, const double* analytic,
                                              std::size_t len,
                                              const std::function<double()>& loss,
                                              double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double saved = values[i];
        values[i] = saved + h;
        const double fp = loss();
        values[i] = saved - h;
        const double fm = loss();
        values[i] = saved;
        const double fd = (fp - fm) / (2.0 * h);
        const double scale = std::max(std::abs(fd), std::abs(analytic[i]));
        const double err = scale < 1e-8 ? std::abs(fd - analytic[i]) : std::abs(fd - analytic[i]) / scale;
        if (err > worst) worst = err;
    }
    return worst;
}

} // namespace gflow

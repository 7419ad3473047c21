// Central finite-difference gradient checker.
//
// Relative error uses the denominator max(|analytic|, |numeric|, floor) with
// floor = 1e-3, so comparisons on near-zero gradients degrade to a sharp
// absolute tolerance instead of amplifying finite-difference roundoff.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "eqlab/nn/params.hpp"
#include "eqlab/tensor.hpp"

namespace eqlab::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t worst_index = 0;
};

// loss_fn() re-evaluates the scalar loss with the current parameter values;
// analytic[p] must hold d(loss)/d(params[p]) at the unperturbed point.
// Parameters are restored exactly after the sweep.
inline GradCheckResult finite_difference_check(const ParamRefs& params,
                                               const std::vector<Tensor>& analytic,
                                               const std::function<double()>& loss_fn,
                                               double step = 1e-5, double denom_floor = 1e-3) {
    GradCheckResult res;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p].tensor;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + step;
            const double up = loss_fn();
            theta[i] = saved - step;
            const double down = loss_fn();
            theta[i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double a = analytic[p][i];
            const double denom = std::max({std::abs(a), std::abs(numeric), denom_floor});
            const double rel = std::abs(a - numeric) / denom;
            if (rel > res.max_rel_error) {
                res.max_rel_error = rel;
                res.worst_tensor = params[p].name;
                res.worst_index = i;
            }
        }
    }
    return res;
}

}  // namespace eqlab::nn

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "normgraph/epi/params.hpp"

namespace normgraph {

// Right-hand side of the model ODE on compartment fractions. Transmission is
// frequency-dependent (rates act on fractions) and recovery uses rate 1/gamma.
inline std::vector<double> ode_rhs(const EpiParams& ep, const std::vector<double>& y) {
    const int n = n_compartments(ep.model);
    if (static_cast<int>(y.size()) != n)
        throw std::invalid_argument("ode_rhs: state dimension does not match model");
    std::vector<double> dy(n, 0.0);

    switch (ep.model) {
        case Model::sir: {
            const double g = 1.0 / ep.sir.gamma;
            const double inf = ep.sir.beta * y[sir_comp::S] * y[sir_comp::I];
            dy[sir_comp::S] = -inf;
            dy[sir_comp::I] = inf - g * y[sir_comp::I];
            dy[sir_comp::R] = g * y[sir_comp::I];
            break;
        }
        case Model::seird2: {
            using namespace s2_comp;
            const auto& p = ep.seird2;
            const double g_c = 1.0 / p.gamma[0], g_a = 1.0 / p.gamma[1];
            // force of infection on each target age group; beta[symptom][target][source]
            auto force = [&](int tgt) {
                return p.beta[0][tgt][0] * y[Is_c] + p.beta[1][tgt][0] * y[Ia_c] +
                       p.beta[0][tgt][1] * y[Is_a] + p.beta[1][tgt][1] * y[Ia_a];
            };
            const double lam_c = force(0), lam_a = force(1);
            const double inf_c = lam_c * y[S_c], inf_a = lam_a * y[S_a];
            dy[S_c] = -inf_c;
            dy[S_a] = -inf_a;
            dy[Is_c] = (1.0 - p.psi[0]) * inf_c - g_c * y[Is_c];
            dy[Ia_c] = p.psi[0] * inf_c - g_c * y[Ia_c];
            dy[Is_a] = (1.0 - p.psi[1]) * inf_a - g_a * y[Is_a];
            dy[Ia_a] = p.psi[1] * inf_a - g_a * y[Ia_a];
            dy[R_c] = g_c * p.rho[0] * (y[Is_c] + y[Ia_c]);
            dy[R_a] = g_a * p.rho[1] * (y[Is_a] + y[Ia_a]);
            dy[D_c] = g_c * (1.0 - p.rho[0]) * (y[Is_c] + y[Ia_c]);
            dy[D_a] = g_a * (1.0 - p.rho[1]) * (y[Is_a] + y[Ia_a]);
            break;
        }
        case Model::two_strain: {
            using namespace ts_comp;
            const auto& p = ep.two_strain;
            const double force1 = y[I_none_1] + y[I_r2_1];
            const double force2 = y[I_none_2] + y[I_r1_2];
            const double b01 = p.beta[0][0], b02 = p.beta[0][1];
            const double b12 = p.beta[1][1], b21 = p.beta[2][0];
            const double g01 = 1.0 / p.gamma[0][0], g02 = 1.0 / p.gamma[0][1];
            const double g12 = 1.0 / p.gamma[1][1], g21 = 1.0 / p.gamma[2][0];
            const double r01 = p.rho[0][0], r02 = p.rho[0][1];
            const double r12 = p.rho[1][1], r21 = p.rho[2][0];

            dy[I_none_1] = b01 * force1 * y[R_none] - g01 * y[I_none_1];
            dy[I_none_2] = b02 * force2 * y[R_none] - g02 * y[I_none_2];
            dy[I_r1_2] = b12 * force2 * y[R_1] - g12 * y[I_r1_2];
            dy[I_r2_1] = b21 * force1 * y[R_2] - g21 * y[I_r2_1];
            dy[R_none] = -y[R_none] * (b01 * force1 + b02 * force2);
            dy[R_1] = g01 * r01 * y[I_none_1] - b12 * force2 * y[R_1];
            dy[R_2] = g02 * r02 * y[I_none_2] - b21 * force1 * y[R_2];
            dy[R_12] = g21 * r21 * y[I_r2_1] + g12 * r12 * y[I_r1_2];
            dy[D] = g01 * (1.0 - r01) * y[I_none_1] + g02 * (1.0 - r02) * y[I_none_2] +
                    g12 * (1.0 - r12) * y[I_r1_2] + g21 * (1.0 - r21) * y[I_r2_1];
            break;
        }
    }
    return dy;
}

// Classical 4th-order Runge-Kutta over an arbitrary right-hand side.
// Returns steps+1 states, the first being y0.
template <class Rhs>
std::vector<std::vector<double>> rk4_integrate(Rhs&& f, std::vector<double> y0, double dt,
                                               int steps) {
    if (dt <= 0.0) throw std::invalid_argument("rk4_integrate: dt must be > 0");
    if (steps < 0) throw std::invalid_argument("rk4_integrate: steps must be >= 0");
    std::vector<std::vector<double>> out;
    out.reserve(steps + 1);
    out.push_back(y0);
    const size_t n = y0.size();
    std::vector<double> tmp(n), y = std::move(y0);
    for (int s = 0; s < steps; ++s) {
        const std::vector<double> k1 = f(y);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
        const std::vector<double> k2 = f(tmp);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
        const std::vector<double> k3 = f(tmp);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
        const std::vector<double> k4 = f(tmp);
        for (size_t i = 0; i < n; ++i)
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        out.push_back(y);
    }
    return out;
}

// Model-aware integration with sanity checks on every output state.
inline std::vector<std::vector<double>> integrate_rk4(const EpiParams& ep,
                                                      const std::vector<double>& y0, double dt,
                                                      int steps) {
    auto states = rk4_integrate([&](const std::vector<double>& y) { return ode_rhs(ep, y); }, y0,
                                dt, steps);
    for (const auto& y : states) {
        double sum = 0.0;
        for (double v : y) {
            if (std::isnan(v) || v < -1e-9)
                throw std::runtime_error("integrate_rk4: integration failure (negative/NaN state)");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::runtime_error("integrate_rk4: state no longer sums to 1");
    }
    return states;
}

}  // namespace normgraph

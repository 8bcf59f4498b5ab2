#pragma once

#include <array>
#include <stdexcept>

#include "normgraph/epi/model.hpp"

namespace normgraph {

struct SirParams {
    double beta = 0.07;  // infection probability per contact pair per step
    int gamma = 180;     // recovery duration in steps
};

struct Seird2Params {
    // beta[source_symptom][target_age][source_age]; symptom 0 = symptomatic, 1 = asymptomatic;
    // age 0 = child, 1 = adult.
    std::array<std::array<std::array<double, 2>, 2>, 2> beta{};
    std::array<int, 2> gamma{180, 180};      // per age group
    std::array<double, 2> rho{0.95, 0.95};   // recovery probability (complement dies)
    std::array<double, 2> psi{0.12, 0.12};   // asymptomatic-branch probability
};

struct TwoStrainParams {
    // Indexed [recovered_mask][strain - 1]; an entry is meaningful only when the
    // mask does not contain the strain. Valid pairs: (0,1), (0,2), (1,2), (2,1).
    std::array<std::array<double, 2>, 4> beta{};
    std::array<std::array<int, 2>, 4> gamma{};
    std::array<std::array<double, 2>, 4> rho{};

    TwoStrainParams() {
        for (auto& row : beta) row = {0.07, 0.07};
        for (auto& row : gamma) row = {180, 180};
        for (auto& row : rho) row = {0.95, 0.95};
    }
};

struct EpiParams {
    Model model = Model::sir;
    SirParams sir;
    Seird2Params seird2;
    TwoStrainParams two_strain;
};

inline void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " not in [0,1]");
}

inline void validate(const EpiParams& ep) {
    switch (ep.model) {
        case Model::sir:
            check_prob(ep.sir.beta, "beta");
            if (ep.sir.gamma < 1) throw std::invalid_argument("gamma must be >= 1");
            break;
        case Model::seird2:
            for (const auto& sym : ep.seird2.beta)
                for (const auto& tgt : sym)
                    for (double b : tgt) check_prob(b, "beta");
            for (int g : ep.seird2.gamma)
                if (g < 1) throw std::invalid_argument("gamma must be >= 1");
            for (double r : ep.seird2.rho) check_prob(r, "rho");
            for (double p : ep.seird2.psi) check_prob(p, "psi");
            break;
        case Model::two_strain:
            for (int mask = 0; mask < 4; ++mask) {
                for (int s = 1; s <= 2; ++s) {
                    if (mask & (1 << (s - 1))) continue;
                    check_prob(ep.two_strain.beta[mask][s - 1], "beta");
                    check_prob(ep.two_strain.rho[mask][s - 1], "rho");
                    if (ep.two_strain.gamma[mask][s - 1] < 1)
                        throw std::invalid_argument("gamma must be >= 1");
                }
            }
            break;
    }
}

// Recovery duration applicable to this agent; for non-infectious agents a model
// reference duration is used (only consumed by the theta/gamma context feature).
inline int recovery_steps(const EpiParams& ep, Model m, uint8_t comp) {
    switch (m) {
        case Model::sir: return ep.sir.gamma;
        case Model::seird2: return ep.seird2.gamma[s2_age(comp)];
        case Model::two_strain: {
            if (ts_infected(comp))
                return ep.two_strain.gamma[ts_recovered_mask(comp)][ts_strain(comp) - 1];
            int g = 1;
            for (int mask = 0; mask < 4; ++mask)
                for (int s = 1; s <= 2; ++s)
                    if (!(mask & (1 << (s - 1)))) g = std::max(g, ep.two_strain.gamma[mask][s - 1]);
            return g;
        }
    }
    return 1;
}

}  // namespace normgraph

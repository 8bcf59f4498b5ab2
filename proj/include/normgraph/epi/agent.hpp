#pragma once

#include <algorithm>

#include "normgraph/core/rng.hpp"
#include "normgraph/epi/params.hpp"

namespace normgraph {

struct AgentEpi {
    uint8_t comp = 0;    // canonical compartment index for the active model
    uint32_t theta = 0;  // steps since the last state change

    bool operator==(const AgentEpi&) const = default;
};

struct SpontaneousResult {
    AgentEpi agent;
    bool transitioned = false;
};

// Time-driven transition: an infectious agent whose inner clock reached its
// recovery duration either recovers or dies. Death is an absorbing compartment;
// the agent record is never removed.
inline SpontaneousResult spontaneous_step(const EpiParams& ep, AgentEpi a, Rng& rng) {
    if (!is_infectious(ep.model, a.comp)) return {a, false};
    const int gamma = recovery_steps(ep, ep.model, a.comp);
    if (a.theta != static_cast<uint32_t>(gamma)) return {a, false};
    switch (ep.model) {
        case Model::sir:
            a.comp = sir_comp::R;
            break;
        case Model::seird2: {
            const int age = s2_age(a.comp);
            if (s2_symptom(a.comp) == 0) {
                a.comp = rng.bernoulli(ep.seird2.rho[age]) ? s2_recovered_comp(age)
                                                           : s2_dead_comp(age);
            } else {
                a.comp = s2_recovered_comp(age);  // asymptomatic always recovers
            }
            break;
        }
        case Model::two_strain: {
            const int mask = ts_recovered_mask(a.comp);
            const int strain = ts_strain(a.comp);
            if (rng.bernoulli(ep.two_strain.rho[mask][strain - 1]))
                a.comp = ts_recovered_comp(mask | (1 << (strain - 1)));
            else
                a.comp = ts_comp::D;
            break;
        }
    }
    a.theta = 0;
    return {a, true};
}

struct ContactResult {
    AgentEpi a;
    AgentEpi b;
    bool a_infected = false;
    bool b_infected = false;
};

// Pairwise contact: when exactly one side is infectious and the other is
// susceptible to that infection, the susceptible transitions with probability
// beta * p_scale. Everything else is the identity.
inline ContactResult contact_infect(const EpiParams& ep, AgentEpi a, AgentEpi b, double p_scale,
                                    Rng& rng) {
    ContactResult out{a, b, false, false};
    const bool a_inf = is_infectious(ep.model, a.comp);
    const bool b_inf = is_infectious(ep.model, b.comp);
    if (a_inf == b_inf) return out;

    const AgentEpi& src = a_inf ? a : b;
    AgentEpi tgt = a_inf ? b : a;
    bool infected = false;

    switch (ep.model) {
        case Model::sir:
            if (tgt.comp == sir_comp::S && rng.bernoulli(ep.sir.beta * p_scale)) {
                tgt.comp = sir_comp::I;
                infected = true;
            }
            break;
        case Model::seird2: {
            if (tgt.comp != s2_comp::S_c && tgt.comp != s2_comp::S_a) break;
            const int t_age = s2_age(tgt.comp);
            const int s_age = s2_age(src.comp);
            const int sym = s2_symptom(src.comp);
            if (rng.bernoulli(ep.seird2.beta[sym][t_age][s_age] * p_scale)) {
                const bool asym = rng.bernoulli(ep.seird2.psi[t_age]);
                tgt.comp = s2_infected_comp(t_age, asym);
                infected = true;
            }
            break;
        }
        case Model::two_strain: {
            if (ts_infected(tgt.comp) || tgt.comp == ts_comp::D) break;
            const int mask = ts_recovered_mask(tgt.comp);
            const int strain = ts_strain(src.comp);
            if (mask & (1 << (strain - 1))) break;  // immune to this strain
            if (rng.bernoulli(ep.two_strain.beta[mask][strain - 1] * p_scale)) {
                tgt.comp = ts_infected_comp(mask, strain);
                infected = true;
            }
            break;
        }
    }
    if (infected) {
        tgt.theta = 0;
        if (a_inf) {
            out.b = tgt;
            out.b_infected = true;
        } else {
            out.a = tgt;
            out.a_infected = true;
        }
    }
    return out;
}

inline AgentEpi tick_clock(AgentEpi a) {
    ++a.theta;
    return a;
}

// theta/gamma ratio used as a walk-context feature, clamped to [0,1].
inline double theta_frac(const EpiParams& ep, const AgentEpi& a) {
    const int g = recovery_steps(ep, ep.model, a.comp);
    return std::min(1.0, static_cast<double>(a.theta) / static_cast<double>(g));
}

}  // namespace normgraph

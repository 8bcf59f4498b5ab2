#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace normgraph {

enum class Model : uint8_t { sir = 0, seird2 = 1, two_strain = 2 };

// Coarse epidemiological grouping shared by all three temporal models,
// used as the walk-context vocabulary.
enum class MacroClass : uint8_t { susceptible = 0, infectious = 1, removed = 2 };

// Canonical compartment orderings; these are the trajectory columns.
//   sir:        S, I, R
//   seird2:     S_c, S_a, Is_c, Ia_c, Is_a, Ia_a, R_c, R_a, D_c, D_a
//   two_strain: R_none, R_1, R_2, R_12, I_none_1, I_none_2, I_r1_2, I_r2_1, D
namespace sir_comp {
inline constexpr uint8_t S = 0, I = 1, R = 2;
}
namespace s2_comp {
inline constexpr uint8_t S_c = 0, S_a = 1, Is_c = 2, Ia_c = 3, Is_a = 4, Ia_a = 5, R_c = 6,
                         R_a = 7, D_c = 8, D_a = 9;
}
namespace ts_comp {
inline constexpr uint8_t R_none = 0, R_1 = 1, R_2 = 2, R_12 = 3, I_none_1 = 4, I_none_2 = 5,
                         I_r1_2 = 6, I_r2_1 = 7, D = 8;
}

inline int n_compartments(Model m) {
    switch (m) {
        case Model::sir: return 3;
        case Model::seird2: return 10;
        case Model::two_strain: return 9;
    }
    throw std::invalid_argument("unknown model");
}

inline const std::vector<std::string>& compartment_names(Model m) {
    static const std::vector<std::string> sir{"S", "I", "R"};
    static const std::vector<std::string> s2{"S_c", "S_a", "Is_c", "Ia_c", "Is_a",
                                             "Ia_a", "R_c", "R_a",  "D_c",  "D_a"};
    static const std::vector<std::string> ts{"R_none", "R_1",      "R_2",    "R_12", "I_none_1",
                                             "I_none_2", "I_r1_2", "I_r2_1", "D"};
    switch (m) {
        case Model::sir: return sir;
        case Model::seird2: return s2;
        case Model::two_strain: return ts;
    }
    throw std::invalid_argument("unknown model");
}

inline std::string model_name(Model m) {
    switch (m) {
        case Model::sir: return "sir";
        case Model::seird2: return "seird2";
        case Model::two_strain: return "two_strain";
    }
    throw std::invalid_argument("unknown model");
}

inline Model parse_model(const std::string& s) {
    if (s == "sir") return Model::sir;
    if (s == "seird2") return Model::seird2;
    if (s == "two_strain") return Model::two_strain;
    throw std::invalid_argument("unknown model id: " + s);
}

// --- seird2 helpers ---------------------------------------------------------

// 0 = child, 1 = adult; the age group is encoded in the compartment index.
inline int s2_age(uint8_t comp) {
    switch (comp) {
        case s2_comp::S_c:
        case s2_comp::Is_c:
        case s2_comp::Ia_c:
        case s2_comp::R_c:
        case s2_comp::D_c: return 0;
        default: return 1;
    }
}

inline bool s2_infectious(uint8_t comp) {
    return comp == s2_comp::Is_c || comp == s2_comp::Ia_c || comp == s2_comp::Is_a ||
           comp == s2_comp::Ia_a;
}

// 0 = symptomatic, 1 = asymptomatic
inline int s2_symptom(uint8_t comp) {
    return (comp == s2_comp::Is_c || comp == s2_comp::Is_a) ? 0 : 1;
}

inline uint8_t s2_susceptible_comp(int age) { return age == 0 ? s2_comp::S_c : s2_comp::S_a; }
inline uint8_t s2_infected_comp(int age, bool asymptomatic) {
    if (age == 0) return asymptomatic ? s2_comp::Ia_c : s2_comp::Is_c;
    return asymptomatic ? s2_comp::Ia_a : s2_comp::Is_a;
}
inline uint8_t s2_recovered_comp(int age) { return age == 0 ? s2_comp::R_c : s2_comp::R_a; }
inline uint8_t s2_dead_comp(int age) { return age == 0 ? s2_comp::D_c : s2_comp::D_a; }

// --- two_strain helpers ------------------------------------------------------

// Recovered-set bitmask: bit 0 = strain 1, bit 1 = strain 2.
inline bool ts_infected(uint8_t comp) { return comp >= ts_comp::I_none_1 && comp <= ts_comp::I_r2_1; }

inline int ts_recovered_mask(uint8_t comp) {
    switch (comp) {
        case ts_comp::R_none: return 0;
        case ts_comp::R_1: return 1;
        case ts_comp::R_2: return 2;
        case ts_comp::R_12: return 3;
        case ts_comp::I_none_1: return 0;
        case ts_comp::I_none_2: return 0;
        case ts_comp::I_r1_2: return 1;
        case ts_comp::I_r2_1: return 2;
    }
    throw std::invalid_argument("two_strain: dead agent has no recovered set");
}

// 1 or 2 for infected compartments
inline int ts_strain(uint8_t comp) {
    switch (comp) {
        case ts_comp::I_none_1: return 1;
        case ts_comp::I_none_2: return 2;
        case ts_comp::I_r1_2: return 2;
        case ts_comp::I_r2_1: return 1;
    }
    throw std::invalid_argument("two_strain: not an infected compartment");
}

inline uint8_t ts_infected_comp(int mask, int strain) {
    if (mask == 0 && strain == 1) return ts_comp::I_none_1;
    if (mask == 0 && strain == 2) return ts_comp::I_none_2;
    if (mask == 1 && strain == 2) return ts_comp::I_r1_2;
    if (mask == 2 && strain == 1) return ts_comp::I_r2_1;
    throw std::invalid_argument("two_strain: illegal (recovered set, strain) pair");
}

inline uint8_t ts_recovered_comp(int mask) {
    switch (mask) {
        case 0: return ts_comp::R_none;
        case 1: return ts_comp::R_1;
        case 2: return ts_comp::R_2;
        case 3: return ts_comp::R_12;
    }
    throw std::invalid_argument("two_strain: bad recovered mask");
}

// --- cross-model predicates --------------------------------------------------

inline bool is_infectious(Model m, uint8_t comp) {
    switch (m) {
        case Model::sir: return comp == sir_comp::I;
        case Model::seird2: return s2_infectious(comp);
        case Model::two_strain: return ts_infected(comp);
    }
    return false;
}

inline bool is_dead(Model m, uint8_t comp) {
    switch (m) {
        case Model::sir: return false;
        case Model::seird2: return comp == s2_comp::D_c || comp == s2_comp::D_a;
        case Model::two_strain: return comp == ts_comp::D;
    }
    return false;
}

inline MacroClass macro_class(Model m, uint8_t comp) {
    if (is_infectious(m, comp)) return MacroClass::infectious;
    switch (m) {
        case Model::sir:
            return comp == sir_comp::S ? MacroClass::susceptible : MacroClass::removed;
        case Model::seird2:
            return (comp == s2_comp::S_c || comp == s2_comp::S_a) ? MacroClass::susceptible
                                                                  : MacroClass::removed;
        case Model::two_strain:
            if (comp == ts_comp::D || comp == ts_comp::R_12) return MacroClass::removed;
            return MacroClass::susceptible;  // some strain can still be caught
    }
    return MacroClass::removed;
}

}  // namespace normgraph

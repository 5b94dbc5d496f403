#ifndef MDFLOW_CONVERGENCE_HPP
#define MDFLOW_CONVERGENCE_HPP

#include <string>
#include <vector>

#include "mdflow/cases.hpp"

namespace mdflow {

struct ConvergenceLevel {
    int n = 0;            // matrix cells per direction
    double h = 0.0;       // matrix cell size
    double err_p = 0.0;   // measure-weighted L2 error of the pressure
    double err_s = 0.0;   // same for the heavy saturation
    double err = 0.0;     // combined sqrt(err_p^2 + err_s^2)
    double order = 0.0;   // observed order vs the previous level (0 for the first)
};

struct ConvergenceStudy {
    std::vector<ConvergenceLevel> levels;
    bool conforming = true;
    std::string scheme;
};

//! Single implicit-Euler step from smooth initial data on a family of nested
//! quad grids with one horizontal fracture, compared against the projection of
//! a fine-grid reference solution. `conforming` switches the fracture/mortar
//! resolutions between matching and deliberately mismatched grids.
ConvergenceStudy convergence_study(Scheme scheme, const std::vector<int>& levels,
                                   int reference_n, bool conforming, double dt = 0.04);

} // namespace mdflow

#endif

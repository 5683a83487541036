#pragma once

namespace sigflow {

struct Tolerances {
    // Relative slack for a boundary point to count as a projection (exact backend).
    double tau_proj = 1e-10;
    // Generators closer than this metric angle (radians) are merged.
    double theta_dedup = 1e-3;
    // x is singular when the selected squared speed is below 1 - eps_sing.
    double eps_sing = 1e-3;
    // Stationarity threshold on the selected squared speed.
    double eps_halt = 1e-6;
    // Eikonal saturation tolerance for generators.
    double tol_eik = 1e-9;
    int max_generators = 16;
    // Lattice steps used to smooth the initial direction of a lattice path.
    int smooth_steps = 8;
};

} // namespace sigflow

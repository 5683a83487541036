#pragma once

#include "sigflow/kernels.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sigflow {

struct VerifyOptions {
    int battery = 50;        // Sigma-invariance seeds
    int bound_seeds = 20;    // singular starts for the speed bound
    int pairs = 2000;        // semiconcavity pairs
    int eikonal_points = 200;
    int samples = 500;       // retraction samples
    double dt = 1e-3;
    // Largest admissible max |H(x, DT) - 1| / grid_h.
    double hjb_constant = 1.0;
    std::uint64_t seed = 1;
};

enum class CheckStatus { pass, fail, skipped };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    nlohmann::ordered_json detail;
};

struct VerifyReport {
    nlohmann::ordered_json scene;
    std::vector<CheckResult> checks;
    bool pass() const;
};

// Index of the first non-singular sample after a singular one, or -1.
int first_sigma_exit(const Trajectory& traj);

// Runs every check that applies to the scene. Output depends only on the field and the
// options, never on timing or thread count.
VerifyReport verify_scene(const DistanceField& field, const VerifyOptions& options = {},
                          Execution exec = Execution::parallel);

nlohmann::ordered_json to_json(const VerifyReport& r);

} // namespace sigflow

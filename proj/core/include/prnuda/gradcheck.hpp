#pragma once

#include <string>
#include <vector>

namespace prnuda {

struct GradCheckEntry {
    std::string loss_name;
    double max_rel_err = 0.0;
    bool pass = false;
};

// Central finite differences (h = 1e-5) against tape gradients for all seven
// loss terms, on <= 8x8 tiny instances, blockwise relative error < 1e-3.
// corrupt injects a deliberate error into the first analytic gradient (test
// fixture for the negative control).
std::vector<GradCheckEntry> run_gradcheck(bool corrupt = false);

}  // namespace prnuda

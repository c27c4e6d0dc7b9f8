#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dcosim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad experiment description (unparseable config, invalid keys, mismatched
// inputs). The CLI maps this to exit code 3.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterates blew up (non-finite entries or runaway norm). Signals mis-tuned
// parameters, not a bug. The CLI maps this to exit code 2.
struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dcosim

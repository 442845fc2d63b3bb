#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace svtail {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Thrown when a sampled matrix is rank-deficient where the construction
// requires full rank (a measure-zero event for the ensembles we ship).
// Trial drivers catch it, discard the trial and count the discard.
class DegenerateSample : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace svtail

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mmlsro {

using Scalar = double;
using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Vector>;
using ConstMatrixRef = Eigen::Ref<const Matrix>;

/// Base class for every recoverable failure of the approximation pipeline.
/// Contract violations (bad shapes, bad arguments) throw std::invalid_argument
/// instead.
class MmlsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No sample carries positive weight around the working origin.
class EmptySupport : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// Weighted covariance has fewer than d significantly nonzero eigenvalues.
class RankDeficient : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// Local frame iteration exhausted its iteration budget or left the ROI ball.
class NoConvergence : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// Fewer supported samples than unknowns, even after support expansion.
class InsufficientSupport : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// Least-squares system unusable even after the ridge fallback.
class IllConditioned : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// A cost-sample fit was requested on a cloud without values.
class MissingValues : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// Backtracking shrank the step below the step tolerance.
class StepTooSmall : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// A supplied search direction is not a descent direction.
class NonDescentDirection : public MmlsError {
public:
    using MmlsError::MmlsError;
};

/// The very first projection of the start point failed.
class InitialProjectionFailure : public MmlsError {
public:
    using MmlsError::MmlsError;
};

}  // namespace mmlsro

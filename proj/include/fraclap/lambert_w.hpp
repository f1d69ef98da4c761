#pragma once

namespace fraclap {

/// Principal branch of the Lambert W function: w e^w = x for x >= -1/e.
/// Halley iteration from a log-based or branch-point initial guess.
/// Throws std::domain_error for x < -1/e.
[[nodiscard]] double lambert_w0(double x);

}  // namespace fraclap

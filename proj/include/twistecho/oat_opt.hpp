#pragma once

#include "twistecho/echo.hpp"

namespace twistecho {

struct AlignmentResult {
  /// Rotation angle about z, in [-pi/2, pi/2).
  double angle = 0.0;
  /// Var(J_x) after the rotation.
  double variance = 0.0;
  /// The x-y variance is isotropic; angle is then 0.
  bool degenerate = false;
};

/// z-rotation of a state that minimizes Var(J_x): 721-point grid over
/// [-pi/2, pi/2) and golden-section refinement to 1e-6.
AlignmentResult optimal_alignment_angle(const DickeState& state);
/// Same for the twisted state exp(-i t_chi H) on the +z coherent state.
AlignmentResult optimal_alignment_angle(const SpinSystem& system, double t_chi, Twisting kind = Twisting::OAT);

enum class ReadoutObjective { Snr, Magnification };

struct OatOptimizationSpec {
  EchoSpec base;
  bool optimize_alignment = false;
  bool optimize_readout = false;
  ReadoutObjective readout_objective = ReadoutObjective::Snr;

  void validate() const;
};

struct ReadoutOptimum {
  /// Rotation angle about z applied right before the pi/2 readout pulse.
  double angle = 0.0;
  double objective = 0.0;
  double snr = 0.0;
  double magnification = 0.0;
};

/// Readout rotation maximizing SNR or magnification of the echoed state for
/// the spec's theta (with the alignment rotation when requested).
/// Throws UndefinedSignalError when the signal vanishes at every angle.
ReadoutOptimum optimal_readout_angle(const OatOptimizationSpec& spec);

/// The base spec with the requested rotations filled in.
EchoSpec resolve(const OatOptimizationSpec& spec);

const char* to_string(ReadoutObjective objective) noexcept;

}  // namespace twistecho

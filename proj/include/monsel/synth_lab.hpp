#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "monsel/dataset_io.hpp"
#include "monsel/oscillators.hpp"

namespace monsel {

/// Half-sine force pulse: peak * sin(pi (t - start) / duration) on
/// [start, start + duration], zero elsewhere.
struct HammerPulse {
  double peak_force = 100.0;  // N
  double duration = 0.002;    // s
  double start_time = 0.01;   // s

  double force_at(double t) const;
};

/// Additive Gaussian sensor noise per channel. With `relative` set, each
/// value is a fraction of the clean channel's RMS; otherwise an absolute RMS.
struct ChannelNoise {
  double acc_mass = 0.01;
  double acc_frame = 0.01;
  double force = 0.01;
  bool relative = true;
};

/// Default prior means as a rig, with b and b_f from the mean damping ratios.
TwoMassParams reference_twin_params();

struct TwinConfig {
  TwoMassParams true_params = reference_twin_params();
  double fs = 1000.0;  // Hz
  std::size_t n_samples = 8192;
  HammerPulse pulse;
  ChannelNoise noise;
  std::uint64_t seed = 1;
};

void validate(const TwinConfig& cfg);

/// Simulates the frame-and-mass rig from rest under the hammer pulse using
/// the exact zero-order-hold discretization of the 4-state model
/// x = (z, w, z', w'). The force is held over each step at its midpoint
/// value; sample i of every channel refers to time i / fs.
Dataset simulate_experiment(const TwinConfig& cfg);

/// Zero-order-hold pair (Ad, Bd) of the continuous system at step h.
struct DiscreteSystem {
  Eigen::Matrix4d Ad;
  Eigen::Vector4d Bd;
  Eigen::Matrix<double, 2, 4> C;  // absolute accelerations of mass and frame
  Eigen::Vector2d D;
};
DiscreteSystem discretize(const TwoMassParams& p, double h);

}  // namespace monsel

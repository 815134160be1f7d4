///////////////////////////////////////////////////////////////////////////////
// kalman.hpp: constant-velocity box filter with a fixed reference area.
//
// State: [cx, cy, w, h, vx, vy, vw, vh, S]. S is the target area measured
// from the first-frame mask; it is never measured again and never moves.
// Measurement: [cx, cy, w, h] of the selected candidate's tight box.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <Eigen/Dense>
#include <array>

#include "sattrack/geometry.hpp"

namespace sattrack {

inline constexpr int kStateDim = 9;
inline constexpr int kMeasDim = 4;
inline constexpr int kAreaIndex = 8;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasVector = Eigen::Matrix<double, kMeasDim, 1>;
using MeasMatrix = Eigen::Matrix<double, kMeasDim, kStateDim>;
using MeasCov = Eigen::Matrix<double, kMeasDim, kMeasDim>;

struct KalmanNoise {
  std::array<double, kStateDim> process{1.0, 1.0, 0.25, 0.25, 0.01, 0.01, 0.0025, 0.0025, 0.0};
  std::array<double, kMeasDim> measurement{1.0, 1.0, 4.0, 4.0};
  std::array<double, kStateDim> initial{10.0, 10.0, 10.0, 10.0, 100.0, 100.0, 25.0, 25.0, 0.0};
};

struct KalmanModel {
  double dt = 1.0;
  StateMatrix F;
  MeasMatrix H;
  StateMatrix Q;
  MeasCov R;
  StateMatrix P0;
  // Lower bound applied to the w and h components after every step.
  double min_size = 0.5;

  // Builds F and H from dt and the diagonal noise shorthand.
  static KalmanModel make(double dt = 1.0, const KalmanNoise& noise = {});

  // Checks the structural invariants: F block form, H selecting the box,
  // symmetric PSD noise, and zero noise on the area component. Throws
  // ConfigError.
  void validate() const;
};

struct FilterState {
  StateVector mean = StateVector::Zero();
  StateMatrix cov = StateMatrix::Zero();
  double s_ref = 0.0;

  BoundingBox box() const { return {mean[0], mean[1], mean[2], mean[3]}; }
};

FilterState init_filter(const BoundingBox& prompt_box, double mask_area, const KalmanModel& model);

struct Prediction {
  FilterState state;
  BoundingBox box;
};

Prediction predict(const FilterState& state, const KalmanModel& model);

// Throws SingularInnovation when H P H^T + R cannot be factorized.
FilterState update(const FilterState& state, const BoundingBox& measurement, const KalmanModel& model);

}  // namespace sattrack

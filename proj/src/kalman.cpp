#include "sattrack/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sattrack/errors.hpp"

namespace sattrack {

namespace {

void clamp_size(StateVector& mean, double min_size) {
  mean[2] = std::max(mean[2], min_size);
  mean[3] = std::max(mean[3], min_size);
}

template <typename M>
bool symmetric_psd(const M& m) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<M> es(m);
  return es.eigenvalues().minCoeff() >= -1e-12;
}

}  // namespace

KalmanModel KalmanModel::make(double dt, const KalmanNoise& noise) {
  KalmanModel m;
  m.dt = dt;
  m.F.setIdentity();
  for (int i = 0; i < 4; ++i) m.F(i, i + 4) = dt;
  m.H.setZero();
  for (int i = 0; i < kMeasDim; ++i) m.H(i, i) = 1.0;
  m.Q.setZero();
  m.P0.setZero();
  m.R.setZero();
  for (int i = 0; i < kStateDim; ++i) {
    m.Q(i, i) = noise.process[static_cast<std::size_t>(i)];
    m.P0(i, i) = noise.initial[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < kMeasDim; ++i) m.R(i, i) = noise.measurement[static_cast<std::size_t>(i)];
  m.validate();
  return m;
}

void KalmanModel::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  StateMatrix expected_f = StateMatrix::Identity();
  for (int i = 0; i < 4; ++i) expected_f(i, i + 4) = dt;
  if (F != expected_f) throw ConfigError("F must couple position/size to velocity by dt only");
  MeasMatrix expected_h = MeasMatrix::Zero();
  for (int i = 0; i < kMeasDim; ++i) expected_h(i, i) = 1.0;
  if (H != expected_h) throw ConfigError("H must select [cx, cy, w, h]");
  if (!symmetric_psd(Q)) throw ConfigError("Q must be symmetric positive-semidefinite");
  if (!symmetric_psd(R)) throw ConfigError("R must be symmetric positive-semidefinite");
  if (!symmetric_psd(P0)) throw ConfigError("initial covariance must be symmetric positive-semidefinite");
  // The reference area is a constant of the model, so it carries no uncertainty.
  if (Q.row(kAreaIndex).cwiseAbs().maxCoeff() != 0.0 || Q.col(kAreaIndex).cwiseAbs().maxCoeff() != 0.0 ||
      P0.row(kAreaIndex).cwiseAbs().maxCoeff() != 0.0 || P0.col(kAreaIndex).cwiseAbs().maxCoeff() != 0.0) {
    throw ConfigError("process and initial covariance must be zero on the area component");
  }
  if (!(min_size > 0.0)) throw ConfigError("min_size must be positive");
}

FilterState init_filter(const BoundingBox& prompt_box, double mask_area, const KalmanModel& model) {
  if (!prompt_box.valid()) throw InvalidPrompt("prompt box must have positive width and height");
  if (!(mask_area > 0.0) || !std::isfinite(mask_area)) {
    throw InvalidPrompt("initial mask area must be positive, got " + std::to_string(mask_area));
  }
  FilterState s;
  s.mean << prompt_box.cx, prompt_box.cy, prompt_box.w, prompt_box.h, 0.0, 0.0, 0.0, 0.0, mask_area;
  s.cov = model.P0;
  s.s_ref = mask_area;
  return s;
}

Prediction predict(const FilterState& state, const KalmanModel& model) {
  Prediction out;
  out.state.s_ref = state.s_ref;
  out.state.mean = model.F * state.mean;
  clamp_size(out.state.mean, model.min_size);
  out.state.cov = model.F * state.cov * model.F.transpose() + model.Q;
  out.box = out.state.box();
  return out;
}

FilterState update(const FilterState& state, const BoundingBox& measurement, const KalmanModel& model) {
  const MeasVector z(measurement.cx, measurement.cy, measurement.w, measurement.h);
  const MeasCov innovation_cov = model.H * state.cov * model.H.transpose() + model.R;

  Eigen::LLT<MeasCov> llt(innovation_cov);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw SingularInnovation("innovation covariance is not positive definite; check R");
  }
  // K = P H^T S^-1 = (S^-1 H P^T)^T with S symmetric.
  const Eigen::Matrix<double, kStateDim, kMeasDim> gain =
      llt.solve(model.H * state.cov.transpose()).transpose();

  FilterState out;
  out.s_ref = state.s_ref;
  out.mean = state.mean + gain * (z - model.H * state.mean);
  clamp_size(out.mean, model.min_size);
  out.cov = (StateMatrix::Identity() - gain * model.H) * state.cov;
  return out;
}

}  // namespace sattrack

// Frame-to-model registration: projective association between the observation
// rasters and a rendered model view, robust semantic weighting, and a
// Gauss-Newton solve over the 6-DoF pose increment.
#pragma once

#include <stdexcept>
#include <vector>

#include "ssom/config.hpp"
#include "ssom/correspondence.hpp"
#include "ssom/frame_maps.hpp"
#include "ssom/projection.hpp"
#include "ssom/surfel_map.hpp"

namespace ssom {

// Association found nothing to work with (empty model, no pixel passed the gates).
struct DegenerateAssociation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The normal equations were singular or ill-conditioned beyond cfg.gn_cond_cap.
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Projects every observation pixel with vertex + normal through T_k into the
// model raster and pairs it with the model pixel it lands on. A pair is kept
// when the model pixel is filled, the point-to-point distance is at most
// cfg.d_assoc and the normal angle at most cfg.alpha_assoc_deg. The residual
// is the point-to-plane distance n_m . (T_k p_obs - v_m).
std::vector<Correspondence> associate(const FrameMaps& obs, const FrameMaps& model, const Pose& t_k,
                                      const RunConfig& cfg);

// Robust weight of one correspondence: Huber factor of the residual, times the
// label-agreement factor (observation confidence on a match, its complement on
// a mismatch; 1 when either side is unlabeled or semantic weighting is off),
// times the stability indicator [surfel_logodds >= cfg.l_stable].
double weight(const Correspondence& c, double surfel_logodds, const RunConfig& cfg);

// Derivative of the point-to-plane residual with respect to a left
// perturbation exp([dt; dw]) of the pose the correspondence was built at:
// [n^T, (p x n)^T] with p the observed point in the model frame.
Vec6 point_to_plane_jacobian(const Correspondence& c);

// One weighted Gauss-Newton step for the point-to-plane cost. Returns the
// 6-vector increment [dt; dw] to be applied as T <- exp_se3(delta) * T.
// Requires >= 6 correspondences with positive weight and a well-conditioned
// system; throws DegenerateAssociation / RankDeficient otherwise.
Vec6 gauss_newton_step(const std::vector<Correspondence>& corrs, const std::vector<double>& weights,
                       const RunConfig& cfg);

struct IcpResult {
  Pose increment;           // pose of the current frame in the model (previous) frame
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  // association or solve failed; increment = initial guess
  double final_cost = 0.0;
  std::vector<int> corr_counts;      // per accepted iteration
  std::vector<double> costs_before;  // per accepted iteration, before the step
  std::vector<double> costs;         // per accepted iteration, after the step
};

// Iterates associate / weight / gauss_newton_step from t_init. The model
// raster is rendered once by the caller. A step that raises the weighted cost
// is halved up to cfg.icp_max_halvings times; if it still raises the cost the
// previous iterate is kept and the solve stops. Convergence is declared when
// the increment norm drops below cfg.icp_conv_eps. `map` (optional) supplies
// per-surfel trust for the weight indicator via the model raster's stability
// channel.
IcpResult icp(const FrameMaps& obs, const FrameMaps& model, const Pose& t_init,
              const RunConfig& cfg);

}  // namespace ssom

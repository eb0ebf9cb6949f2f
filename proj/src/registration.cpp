#include "ssom/registration.hpp"

#include <cmath>

namespace ssom {

std::vector<Correspondence> associate(const FrameMaps& obs, const FrameMaps& model, const Pose& t_k,
                                      const RunConfig& cfg) {
  std::vector<Correspondence> corrs;
  corrs.reserve(obs.valid_normal_count());
  const double alpha_max = deg2rad(cfg.alpha_assoc_deg);
  const Mat3& r = t_k.rotation();
  for (int v = 0; v < obs.height; ++v) {
    for (int u = 0; u < obs.width; ++u) {
      const int io = obs.idx(u, v);
      if (!obs.vertex_valid[io] || !obs.normal_valid[io]) continue;
      const Vec3 p = t_k * obs.vertex[io];
      const PixelCoord px = project_to_pixel(p, cfg);
      if (!px.in_rows) continue;
      const int im = model.idx(px.u, px.v);
      if (!model.vertex_valid[im] || !model.normal_valid[im]) continue;
      if ((p - model.vertex[im]).norm() > cfg.d_assoc) continue;
      const Vec3 n_obs = r * obs.normal[io];
      if (angle_between(n_obs, model.normal[im]) > alpha_max) continue;
      Correspondence c;
      c.u = u;
      c.v = v;
      c.obs_vertex = obs.vertex[io];
      c.obs_normal = obs.normal[io];
      c.obs_in_model = p;
      c.model_vertex = model.vertex[im];
      c.model_normal = model.normal[im];
      c.obs_label = obs.label[io];
      c.obs_prob = obs.label_prob[io];
      c.model_label = model.label[im];
      c.model_prob = model.label_prob[im];
      c.surfel = model.surfel_index[im];
      c.model_logodds = model.stability[im];
      c.residual = model.normal[im].dot(p - model.vertex[im]);
      corrs.push_back(c);
    }
  }
  return corrs;
}

double weight(const Correspondence& c, double surfel_logodds, const RunConfig& cfg) {
  const double ar = std::abs(c.residual);
  const double huber = ar < cfg.huber_delta ? 1.0 : cfg.huber_delta / ar;
  double sem = 1.0;
  if (cfg.semantic_weighting && c.obs_label != 0 && c.model_label != 0)
    sem = c.obs_label == c.model_label ? c.obs_prob : 1.0 - c.obs_prob;
  const double stable = surfel_logodds >= cfg.l_stable ? 1.0 : 0.0;
  return huber * sem * stable;
}

Vec6 point_to_plane_jacobian(const Correspondence& c) {
  // Residual r = n . (T p - v); with a left perturbation exp([dt; dw]) * T the
  // derivative row is [n^T, (p' x n)^T], p' being the point in the model frame.
  Vec6 j;
  j.head<3>() = c.model_normal;
  j.tail<3>() = c.obs_in_model.cross(c.model_normal);
  return j;
}

Vec6 gauss_newton_step(const std::vector<Correspondence>& corrs, const std::vector<double>& weights,
                       const RunConfig& cfg) {
  if (corrs.size() != weights.size())
    throw std::invalid_argument("gauss_newton_step: weight count mismatch");
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  Vec6 g = Vec6::Zero();
  size_t used = 0;
  for (size_t i = 0; i < corrs.size(); ++i) {
    const double w = weights[i];
    if (w <= 0.0) continue;
    ++used;
    const Vec6 j = point_to_plane_jacobian(corrs[i]);
    h.noalias() += w * j * j.transpose();
    g.noalias() += w * j * corrs[i].residual;
  }
  if (used < 6) throw DegenerateAssociation("gauss_newton_step: fewer than 6 weighted correspondences");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(h);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin <= 0.0 || lmax / lmin > cfg.gn_cond_cap)
    throw RankDeficient("gauss_newton_step: normal equations are rank deficient or ill-conditioned");
  return h.ldlt().solve(-g);
}

namespace {

// Weighted point-to-plane cost of the correspondence set re-evaluated at t.
double cost_at(const std::vector<Correspondence>& corrs, const std::vector<double>& weights,
               const Pose& t) {
  double e = 0.0;
  for (size_t i = 0; i < corrs.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    const double r = corrs[i].model_normal.dot(t * corrs[i].obs_vertex - corrs[i].model_vertex);
    e += weights[i] * r * r;
  }
  return e;
}

std::vector<double> compute_weights(const std::vector<Correspondence>& corrs,
                                    const RunConfig& cfg) {
  std::vector<double> w(corrs.size());
  for (size_t i = 0; i < corrs.size(); ++i) w[i] = weight(corrs[i], corrs[i].model_logodds, cfg);
  return w;
}

}  // namespace

IcpResult icp(const FrameMaps& obs, const FrameMaps& model, const Pose& t_init,
              const RunConfig& cfg) {
  IcpResult res;
  res.increment = t_init;
  Pose t = t_init;
  double prev_cost = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.icp_max_iter; ++it) {
    auto corrs = associate(obs, model, t, cfg);
    if (corrs.empty()) {
      res.degenerate = true;
      break;
    }
    auto weights = compute_weights(corrs, cfg);
    Vec6 delta;
    try {
      delta = gauss_newton_step(corrs, weights, cfg);
    } catch (const std::runtime_error&) {
      res.degenerate = true;
      break;
    }
    // Step control: halve the increment while it raises the cost on the
    // current correspondence set.
    const double cost_before = cost_at(corrs, weights, t);
    Pose t_new = exp_se3(delta) * t;
    double cost_after = cost_at(corrs, weights, t_new);
    int halvings = 0;
    while (cost_after > cost_before && halvings < cfg.icp_max_halvings) {
      delta *= 0.5;
      t_new = exp_se3(delta) * t;
      cost_after = cost_at(corrs, weights, t_new);
      ++halvings;
    }
    if (cost_after > cost_before) {
      // No usable step; keep the previous iterate.
      res.converged = true;
      break;
    }
    t = t_new;
    ++res.iterations;
    res.corr_counts.push_back(static_cast<int>(corrs.size()));
    res.costs_before.push_back(cost_before);
    res.costs.push_back(cost_after);
    prev_cost = cost_after;
    if (delta.norm() < cfg.icp_conv_eps) {
      res.converged = true;
      break;
    }
  }
  res.final_cost = std::isfinite(prev_cost) ? prev_cost : 0.0;
  if (!res.degenerate) res.increment = t;
  return res;
}

}  // namespace ssom

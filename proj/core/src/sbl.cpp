#include "krv/sbl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "krv/error.hpp"

namespace krv {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double softplus(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return 0.0;
  return std::log1p(std::exp(x));
}

// log p(t|w) - 0.5 w'Aw with the Bernoulli terms in the cancellation-free
// form t*y - softplus(y).
double penalized_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& w, const Eigen::VectorXd& alphas) {
  double ll = 0.0;
  for (Eigen::Index n = 0; n < y.size(); ++n) ll += t(n) * y(n) - softplus(y(n));
  ll -= 0.5 * (alphas.array() * w.array().square()).sum();
  return ll;
}

struct CholFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter_used = 0.0;
};

CholFactor cholesky_with_jitter(const Eigen::MatrixXd& a, double jitter0) {
  CholFactor f;
  f.llt.compute(a);
  if (f.llt.info() == Eigen::Success) return f;
  for (double j = jitter0; j > 0.0 && j <= 1e-4; j *= 2.0) {
    f.llt.compute(a + j * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    if (f.llt.info() == Eigen::Success) {
      f.jitter_used = j;
      return f;
    }
  }
  throw Error("sbl: covariance factorization failed (not positive definite)");
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

struct GaussPosterior {
  Eigen::VectorXd w_hat;
  Eigen::MatrixXd sigma;
  double jitter_used = 0.0;
};

GaussPosterior gaussian_posterior(const Eigen::MatrixXd& h, const Eigen::VectorXd& t,
                                  const Eigen::VectorXd& alphas, double noise_var,
                                  const SblConfig& cfg) {
  const Eigen::Index m = h.cols();
  Eigen::MatrixXd hess = (h.transpose() * h) / noise_var;
  hess.diagonal() += alphas;
  CholFactor f = cholesky_with_jitter(hess, cfg.jitter);
  GaussPosterior gp;
  gp.jitter_used = f.jitter_used;
  gp.sigma = f.llt.solve(Eigen::MatrixXd::Identity(m, m));
  gp.sigma = 0.5 * (gp.sigma + gp.sigma.transpose()).eval();
  gp.w_hat = gp.sigma * (h.transpose() * t) / noise_var;
  return gp;
}

}  // namespace

PosteriorMode posterior_mode(const Eigen::MatrixXd& h_active, const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& alphas, const SblConfig& cfg,
                             const Eigen::VectorXd* w_start) {
  const Eigen::Index n = h_active.rows();
  const Eigen::Index m = h_active.cols();
  if (targets.size() != n) throw Error("posterior_mode: target length mismatch");
  if (alphas.size() != m) throw Error("posterior_mode: alpha count mismatch");

  Eigen::VectorXd w = (w_start != nullptr) ? *w_start : Eigen::VectorXd::Zero(m);
  if (w.size() != m) throw Error("posterior_mode: warm start length mismatch");

  PosteriorMode pm;
  pm.converged = false;

  Eigen::VectorXd y = h_active * w;
  double f = penalized_loglik(y, targets, w, alphas);
  if (!std::isfinite(f)) throw Error("posterior_mode: non-finite objective");

  for (int iter = 0; iter < cfg.irls_max_iters; ++iter) {
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(y(i));
    Eigen::VectorXd beta = p.array() * (1.0 - p.array());

    Eigen::VectorXd grad = h_active.transpose() * (targets - p) - alphas.cwiseProduct(w);
    Eigen::MatrixXd hb = h_active.array().colwise() * beta.array();
    Eigen::MatrixXd hess = h_active.transpose() * hb;
    hess.diagonal() += alphas;

    CholFactor fac = cholesky_with_jitter(hess, cfg.jitter);
    pm.jitter_used = std::max(pm.jitter_used, fac.jitter_used);
    Eigen::VectorXd step = fac.llt.solve(grad);
    if (!step.allFinite()) throw Error("posterior_mode: non-finite Newton step");

    // Halving line search; the penalized objective is concave, so failure
    // to improve means we are at the numerical optimum.
    double eta = 1.0;
    bool accepted = false;
    Eigen::VectorXd w_new, y_new;
    double f_new = f;
    for (int ls = 0; ls < 30; ++ls) {
      w_new = w + eta * step;
      y_new = h_active * w_new;
      f_new = penalized_loglik(y_new, targets, w_new, alphas);
      if (std::isfinite(f_new) && f_new >= f) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      pm.converged = true;
      break;
    }
    double move = (eta * step.array()).abs().maxCoeff();
    w = w_new;
    y = y_new;
    f = f_new;
    if (move < cfg.irls_tol) {
      pm.converged = true;
      break;
    }
  }

  // Covariance at the final iterate.
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(y(i));
  Eigen::VectorXd beta = p.array() * (1.0 - p.array());
  Eigen::MatrixXd hb = h_active.array().colwise() * beta.array();
  Eigen::MatrixXd hess = h_active.transpose() * hb;
  hess.diagonal() += alphas;
  CholFactor fac = cholesky_with_jitter(hess, cfg.jitter);
  pm.jitter_used = std::max(pm.jitter_used, fac.jitter_used);
  pm.sigma = fac.llt.solve(Eigen::MatrixXd::Identity(m, m));
  pm.sigma = 0.5 * (pm.sigma + pm.sigma.transpose()).eval();
  pm.w_hat = std::move(w);
  return pm;
}

AlphaUpdate update_alpha(double alpha, double w_hat, double sigma_ii, double prune_sentinel) {
  AlphaUpdate u;
  if (w_hat == 0.0) {
    u.value = prune_sentinel;
    return u;
  }
  double gamma = 1.0 - alpha * sigma_ii;
  u.gamma_out_of_range = gamma < -1e-8;
  u.value = gamma / (w_hat * w_hat);
  return u;
}

double delta_alpha(const Eigen::VectorXd& prev, const Eigen::VectorXd& curr,
                   double prune_threshold) {
  if (prev.size() != curr.size()) throw Error("delta_alpha: length mismatch");
  double d = 0.0;
  for (Eigen::Index i = 0; i < prev.size(); ++i) {
    if (prev(i) >= prune_threshold || curr(i) >= prune_threshold) continue;
    d = std::max(d, std::abs(curr(i) - prev(i)));
  }
  return d;
}

std::vector<SblModel> train_path(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                                 Likelihood likelihood, const SblConfig& cfg,
                                 const std::vector<double>& thresholds) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m_total = design.cols();
  if (n < 1 || m_total < 1) throw Error("sbl: empty design matrix");
  if (targets.size() != n) throw Error("sbl: target length mismatch");
  if (!design.allFinite()) throw Error("sbl: non-finite design matrix");
  if (thresholds.empty()) throw Error("sbl: no stopping thresholds given");

  if (likelihood == Likelihood::bernoulli) {
    bool saw0 = false, saw1 = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (targets(i) == 0.0)
        saw0 = true;
      else if (targets(i) == 1.0)
        saw1 = true;
      else
        throw Error("sbl: bernoulli targets must be 0 or 1");
    }
    if (!saw0 || !saw1) throw Error("sbl: all targets belong to one class");
  }

  // Thresholds processed largest-first; each is resolved at the first
  // iteration whose delta falls to it.
  std::vector<std::size_t> order(thresholds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return thresholds[a] > thresholds[b]; });
  const double min_threshold = thresholds[order.back()];

  std::vector<SblModel> out(thresholds.size());
  std::vector<char> done(thresholds.size(), 0);

  // Mutable trajectory state, always aligned with `active`.
  std::vector<int> active(static_cast<std::size_t>(m_total));
  std::iota(active.begin(), active.end(), 0);
  Eigen::VectorXd alphas = Eigen::VectorXd::Constant(m_total, cfg.alpha_init);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m_total);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(m_total, m_total);
  double noise_var = cfg.noise_var_init;
  std::vector<SblHistoryEntry> history;
  bool irls_warning = false;
  bool gamma_warning = false;

  auto snapshot = [&]() {
    SblModel model;
    model.active = active;
    model.weights = w;
    model.alphas = alphas;
    model.covariance = sigma;
    model.likelihood = likelihood;
    model.noise_var = (likelihood == Likelihood::gaussian) ? noise_var : 0.0;
    model.history = history;
    model.irls_warning = irls_warning;
    model.gamma_warning = gamma_warning;
    return model;
  };

  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    const auto m_active = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd h_active = gather_columns(design, active);

    Eigen::VectorXd w_hat;
    Eigen::MatrixXd full_sigma;
    double jitter_used = 0.0;
    if (likelihood == Likelihood::bernoulli) {
      PosteriorMode pm = posterior_mode(h_active, targets, alphas, cfg, &w);
      if (!pm.converged) irls_warning = true;
      w_hat = std::move(pm.w_hat);
      full_sigma = std::move(pm.sigma);
      jitter_used = pm.jitter_used;
    } else {
      GaussPosterior gp = gaussian_posterior(h_active, targets, alphas, noise_var, cfg);
      w_hat = std::move(gp.w_hat);
      full_sigma = std::move(gp.sigma);
      jitter_used = gp.jitter_used;
    }

    Eigen::VectorXd alphas_new(m_active);
    double gamma_min = std::numeric_limits<double>::infinity();
    double gamma_max = -std::numeric_limits<double>::infinity();
    double gamma_sum = 0.0;
    for (Eigen::Index i = 0; i < m_active; ++i) {
      double gamma = 1.0 - alphas(i) * full_sigma(i, i);
      gamma_min = std::min(gamma_min, gamma);
      gamma_max = std::max(gamma_max, gamma);
      gamma_sum += gamma;
      AlphaUpdate u = update_alpha(alphas(i), w_hat(i), full_sigma(i, i), cfg.prune_threshold);
      if (u.gamma_out_of_range) gamma_warning = true;
      // Hyperparameters are precisions; keep them positive under round-off.
      alphas_new(i) = std::max(u.value, 1e-12);
    }

    double delta = delta_alpha(alphas, alphas_new, cfg.prune_threshold);

    if (likelihood == Likelihood::gaussian) {
      double denom = static_cast<double>(n) - gamma_sum;
      if (denom > 1e-10) {
        double rss = (targets - h_active * w_hat).squaredNorm();
        noise_var = std::max(rss / denom, 1e-12);
      }
    }

    // Prune, keeping at least the strongest basis.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m_active; ++i)
      if (alphas_new(i) < cfg.prune_threshold) keep.push_back(i);
    if (keep.empty()) {
      Eigen::Index best = 0;
      alphas_new.minCoeff(&best);
      keep.push_back(best);
    }

    std::vector<int> next_active(keep.size());
    Eigen::VectorXd next_alphas(static_cast<Eigen::Index>(keep.size()));
    Eigen::VectorXd next_w(static_cast<Eigen::Index>(keep.size()));
    Eigen::MatrixXd next_sigma(static_cast<Eigen::Index>(keep.size()),
                               static_cast<Eigen::Index>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
      next_active[a] = active[static_cast<std::size_t>(keep[a])];
      next_alphas(static_cast<Eigen::Index>(a)) = alphas_new(keep[a]);
      next_w(static_cast<Eigen::Index>(a)) = w_hat(keep[a]);
      for (std::size_t b = 0; b < keep.size(); ++b)
        next_sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            full_sigma(keep[a], keep[b]);
    }
    active = std::move(next_active);
    alphas = std::move(next_alphas);
    w = std::move(next_w);
    sigma = std::move(next_sigma);

    SblHistoryEntry entry;
    entry.max_delta_alpha = delta;
    entry.active_count = static_cast<int>(active.size());
    entry.gamma_min = gamma_min;
    entry.gamma_max = gamma_max;
    entry.cholesky_jitter = jitter_used;
    history.push_back(entry);

    for (std::size_t oi : order) {
      if (!done[oi] && delta <= thresholds[oi]) {
        done[oi] = 1;
        out[oi] = snapshot();
      }
    }
    if (delta <= min_threshold) break;
  }

  // Iteration cap reached before the smaller thresholds: they get the final
  // state, exactly as a direct train() call would.
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    if (!done[i]) out[i] = snapshot();
  return out;
}

SblModel train(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
               Likelihood likelihood, const SblConfig& cfg) {
  return train_path(design, targets, likelihood, cfg, {cfg.delta_alpha}).front();
}

SblPrediction predict(const SblModel& model, const Eigen::VectorXd& phi_active) {
  if (phi_active.size() != model.weights.size())
    throw Error("sbl predict: feature count does not match active basis count");
  double raw = model.weights.dot(phi_active);
  SblPrediction p;
  if (model.likelihood == Likelihood::bernoulli) {
    p.score = sigmoid(raw);
  } else {
    p.score = raw;
  }
  p.cls = (p.score >= 0.5) ? 1 : 0;
  return p;
}

std::vector<int> RvmClassifier::retained_columns() const {
  std::set<int> cols;
  for (std::size_t s = 0; s < submodels.size(); ++s) {
    if (!trained[s]) continue;
    for (int c : submodels[s].active)
      if (c != 0) cols.insert(c);
  }
  return {cols.begin(), cols.end()};
}

std::vector<RvmClassifier> train_rvm_path(const Dataset& train, const KernelSpec& kernel,
                                          Likelihood likelihood, const SblConfig& cfg,
                                          const std::vector<double>& thresholds) {
  const int c = train.num_classes();
  DesignMatrix dm = design_matrix(kernel, train.instances, train.instances);

  std::vector<int> counts = train.class_counts();
  int fallback = 0;
  for (int i = 1; i < c; ++i)
    if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(fallback)]) fallback = i;

  std::vector<RvmClassifier> out(thresholds.size());
  const int n_sub = (c == 2) ? 1 : c;
  for (auto& r : out) {
    r.likelihood = likelihood;
    r.kernel = kernel;
    r.anchors = train.instances;
    r.num_classes = c;
    r.fallback_class = fallback;
    r.submodels.resize(static_cast<std::size_t>(n_sub));
    r.trained.assign(static_cast<std::size_t>(n_sub), 0);
  }

  bool any_trained = false;
  for (int s = 0; s < n_sub; ++s) {
    const int positive = (c == 2) ? 1 : s;
    Eigen::VectorXd t(train.size());
    for (Eigen::Index i = 0; i < train.size(); ++i)
      t(i) = (train.labels[static_cast<std::size_t>(i)] == positive) ? 1.0 : 0.0;
    try {
      std::vector<SblModel> models = train_path(dm.values, t, likelihood, cfg, thresholds);
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        out[k].submodels[static_cast<std::size_t>(s)] = std::move(models[k]);
        out[k].trained[static_cast<std::size_t>(s)] = 1;
      }
      any_trained = true;
    } catch (const Error&) {
      // A class absent from this training subset cannot be modeled; the
      // one-vs-rest vote simply skips it.
    }
  }
  if (!any_trained && c > 2) throw Error("rvm: no class could be trained");
  return out;
}

RvmClassifier train_rvm(const Dataset& train, const KernelSpec& kernel, Likelihood likelihood,
                        const SblConfig& cfg) {
  std::vector<RvmClassifier> v = train_rvm_path(train, kernel, likelihood, cfg, {cfg.delta_alpha});
  return std::move(v.front());
}

int rvm_predict(const RvmClassifier& model, const Eigen::VectorXd& row) {
  return rvm_predict_phi(model, expand_row(model.kernel, row, model.anchors));
}

int rvm_predict_phi(const RvmClassifier& model, const Eigen::VectorXd& phi) {
  auto submodel_score = [&](std::size_t s) {
    const SblModel& sub = model.submodels[s];
    Eigen::VectorXd phi_active(static_cast<Eigen::Index>(sub.active.size()));
    for (std::size_t i = 0; i < sub.active.size(); ++i)
      phi_active(static_cast<Eigen::Index>(i)) = phi(sub.active[i]);
    return predict(sub, phi_active).score;
  };

  if (model.num_classes == 2 && model.submodels.size() == 1) {
    if (!model.trained[0]) return model.fallback_class;
    return (submodel_score(0) >= 0.5) ? 1 : 0;
  }

  int best_cls = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int cls = 0; cls < model.num_classes; ++cls) {
    auto s = static_cast<std::size_t>(cls);
    if (!model.trained[s]) continue;
    double score = submodel_score(s);
    if (score > best_score) {
      best_score = score;
      best_cls = cls;
    }
  }
  return (best_cls < 0) ? model.fallback_class : best_cls;
}

}  // namespace krv

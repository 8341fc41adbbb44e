#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "krv/dataset.hpp"
#include "krv/kernels.hpp"

namespace krv {

enum class Likelihood { bernoulli, gaussian };

struct SblConfig {
  double delta_alpha = 0.1;      // stop once max |alpha change| falls to this
  double alpha_init = 1.0;
  double prune_threshold = 1e12; // alpha at or above this removes the basis
  int max_outer_iters = 500;
  double irls_tol = 1e-6;        // max-abs change of the mode
  int irls_max_iters = 25;
  double jitter = 1e-10;         // doubled up to 1e-4 on factorization failure
  double noise_var_init = 0.1;   // gaussian likelihood only
};

struct SblHistoryEntry {
  double max_delta_alpha = 0.0;
  int active_count = 0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double cholesky_jitter = 0.0;  // 0 when the plain factorization succeeded
};

// Trained sparse Bayesian model over the columns of a design matrix.
// `active` indexes surviving columns; weights/alphas/covariance are aligned
// with it.
struct SblModel {
  std::vector<int> active;
  Eigen::VectorXd weights;
  Eigen::VectorXd alphas;
  Eigen::MatrixXd covariance;
  Likelihood likelihood = Likelihood::bernoulli;
  double noise_var = 0.0;  // gaussian only
  std::vector<SblHistoryEntry> history;
  bool irls_warning = false;   // some inner solve hit its iteration cap
  bool gamma_warning = false;  // some gamma fell below -1e-8
};

double sigmoid(double x);

struct PosteriorMode {
  Eigen::VectorXd w_hat;
  Eigen::MatrixXd sigma;
  bool converged = true;
  double jitter_used = 0.0;
};

// Laplace mode of the Bernoulli posterior for fixed hyperparameters, via
// Newton steps with halving line search, plus the covariance
// (H^T B H + A)^-1 evaluated at the mode. `w_start` seeds the iteration.
PosteriorMode posterior_mode(const Eigen::MatrixXd& h_active, const Eigen::VectorXd& targets,
                             const Eigen::VectorXd& alphas, const SblConfig& cfg,
                             const Eigen::VectorXd* w_start = nullptr);

struct AlphaUpdate {
  double value = 0.0;
  bool gamma_out_of_range = false;
};

// MacKay re-estimate (1 - alpha * sigma_ii) / w_hat^2. A zero weight yields
// the prune sentinel; a numerator below -1e-8 raises the diagnostics flag.
AlphaUpdate update_alpha(double alpha, double w_hat, double sigma_ii, double prune_sentinel);

// Max absolute hyperparameter change over bases that stay below the prune
// threshold in both vectors.
double delta_alpha(const Eigen::VectorXd& prev, const Eigen::VectorXd& curr,
                   double prune_threshold);

// Full training loop: posterior update, alpha re-estimation, pruning,
// stopping once the alpha change falls to cfg.delta_alpha. At least one
// basis always survives.
SblModel train(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
               Likelihood likelihood, const SblConfig& cfg);

// Runs one training trajectory and captures the model state at the first
// iteration whose alpha change falls to each requested threshold. The entry
// for thresholds[i] is bit-identical to train() with cfg.delta_alpha =
// thresholds[i]; sweeping stopping thresholds this way costs one run.
std::vector<SblModel> train_path(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets,
                                 Likelihood likelihood, const SblConfig& cfg,
                                 const std::vector<double>& thresholds);

struct SblPrediction {
  double score = 0.0;
  int cls = 0;
};

// phi_active must already be restricted to the model's active columns.
// Bernoulli: score = sigmoid(w.phi), class 1 iff score >= 0.5. Gaussian:
// score = w.phi, class 1 iff score >= 0.5.
SblPrediction predict(const SblModel& model, const Eigen::VectorXd& phi_active);

// Kernel RVM classifier: one sparse Bayesian model per class (one-vs-rest),
// or a single model for binary problems, over a shared design matrix.
struct RvmClassifier {
  Likelihood likelihood = Likelihood::bernoulli;
  KernelSpec kernel;
  Eigen::MatrixXd anchors;
  int num_classes = 0;
  int fallback_class = 0;  // majority train class; used if nothing trained
  std::vector<SblModel> submodels;
  std::vector<char> trained;  // per submodel; degenerate targets leave gaps

  // Non-bias design-matrix columns retained by any submodel.
  std::vector<int> retained_columns() const;
};

RvmClassifier train_rvm(const Dataset& train, const KernelSpec& kernel, Likelihood likelihood,
                        const SblConfig& cfg);

std::vector<RvmClassifier> train_rvm_path(const Dataset& train, const KernelSpec& kernel,
                                          Likelihood likelihood, const SblConfig& cfg,
                                          const std::vector<double>& thresholds);

// Classifies an (unexpanded) instance row; ties pick the lowest class id.
int rvm_predict(const RvmClassifier& model, const Eigen::VectorXd& row);

// Same, for a row already expanded against the model's anchors.
int rvm_predict_phi(const RvmClassifier& model, const Eigen::VectorXd& phi);

}  // namespace krv

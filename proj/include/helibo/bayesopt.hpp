#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "helibo/detector.hpp"
#include "helibo/errors.hpp"

namespace helibo {

enum class KernelFamily { Matern52, SquaredExponential };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel(std::string_view text);

struct KernelConfig {
  KernelFamily family = KernelFamily::Matern52;
  double length_scale = 0.25;
  double signal_var = 0.09;  // sigma_f^2

  bool is_valid() const { return length_scale > 0.0 && signal_var > 0.0; }
  double operator()(const AugParams& a, const AugParams& b) const;
};

struct Observation {
  AugParams x{};
  double y = 0.0;
  int count = 1;  // duplicates are merged by averaging
};

struct GpDataset {
  std::vector<Observation> observations;
  KernelConfig kernel{};
  double noise_var = 0.0225;

  // Appends (x, y); an existing identical x has its y averaged instead.
  void add(const AugParams& x, double y);
  std::size_t size() const { return observations.size(); }
};

struct Posterior {
  double mean = 0.0;
  double sd = 0.0;
};

inline constexpr double kMaxJitter = 1e-8;

// Zero-mean GP regression, factorized once and queried many times.
class GaussianProcess {
 public:
  // Throws SingularKernel when K + noise I is not PD even with kMaxJitter.
  explicit GaussianProcess(const GpDataset& data);

  Posterior predict(const AugParams& x) const;
  double log_marginal_likelihood() const;
  double jitter() const { return jitter_; }

 private:
  GpDataset data_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd y_;
  double jitter_ = 0.0;
};

Posterior gp_posterior(const GpDataset& data, const AugParams& query);

double ucb(const Posterior& post, double kappa);
double ucb(const GaussianProcess& gp, const AugParams& query, double kappa);

// Picks the kernel hyperparameters with the best log marginal likelihood over
// a fixed grid; deterministic.
KernelConfig refit_kernel(const GpDataset& data);

struct BoConfig {
  double kappa = 2.567;
  double epsilon = 0.01;
  int iterations = 30;
  int initial_samples = 5;
  double success_threshold = 0.7;
  bool refit = false;
  int grid = 101;
  KernelConfig kernel{};
  double noise_var = 0.0225;

  bool is_valid() const {
    return kappa >= 0.0 && epsilon >= 0.0 && iterations >= 1 &&
           initial_samples >= 1 && grid >= 2 && noise_var >= 0.0 &&
           kernel.is_valid();
  }
};

struct Proposal {
  AugParams x{};
  double acquisition = 0.0;
  AugParams grid_x{};
  double grid_acquisition = 0.0;
};

// Dense grid search followed by coordinate refinement with step halving.
// Ties keep the lowest S, then the lowest B.
Proposal propose_next(const GaussianProcess& gp, const BoConfig& cfg);

enum class StopReason { Budget, Converged, SuccessThreshold };
std::string_view to_string(StopReason reason);

struct BoStep {
  int iter = 0;  // 0 for the initial random samples
  AugParams x{};
  double y = 0.0;
  std::optional<double> acquisition;
};

struct OptimizationReport {
  std::vector<BoStep> history;
  AugParams best{};
  double best_y = 0.0;
  StopReason stop_reason = StopReason::Budget;
  GpDataset data;
};

// Objective callback: (params, evaluation index) -> success rate in [0, 1].
using Objective = std::function<double(const AugParams&, int)>;

// Raised when the objective throws; carries the history gathered so far.
class EvaluationFailed : public Error {
 public:
  EvaluationFailed(const std::string& what, OptimizationReport partial)
      : Error(what),
        partial_(std::make_shared<OptimizationReport>(std::move(partial))) {}
  const OptimizationReport& partial() const { return *partial_; }

 private:
  std::shared_ptr<OptimizationReport> partial_;
};

OptimizationReport optimize(const Objective& objective, const BoConfig& cfg,
                            std::uint64_t seed);

void write_observations_csv(std::ostream& out, const OptimizationReport& report);
// Posterior mean and sd on a resolution x resolution grid over [0,1]^2.
void write_contour_csv(std::ostream& out, const GpDataset& data, int resolution);

// Reads back observations.csv (S, B, success_rate columns).
GpDataset read_observations_csv(std::istream& in, const KernelConfig& kernel,
                                double noise_var);

}  // namespace helibo

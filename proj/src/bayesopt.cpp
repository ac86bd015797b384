#include "helibo/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace helibo {

std::string_view to_string(KernelFamily family) {
  return family == KernelFamily::Matern52 ? "matern52" : "squared_exponential";
}

KernelFamily parse_kernel(std::string_view text) {
  if (text == "matern52") return KernelFamily::Matern52;
  if (text == "squared_exponential") return KernelFamily::SquaredExponential;
  throw ConfigError(fmt::format(
      "bo.kernel: unknown kernel '{}' (expected matern52 or squared_exponential)",
      text));
}

double KernelConfig::operator()(const AugParams& a, const AugParams& b) const {
  const double ds = a.scale - b.scale;
  const double db = a.brightness - b.brightness;
  const double r2 = (ds * ds + db * db) / (length_scale * length_scale);
  if (family == KernelFamily::SquaredExponential) {
    return signal_var * std::exp(-0.5 * r2);
  }
  const double r = std::sqrt(5.0 * r2);
  return signal_var * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

void GpDataset::add(const AugParams& x, double y) {
  for (Observation& o : observations) {
    if (o.x == x) {
      o.y = (o.y * o.count + y) / (o.count + 1);
      ++o.count;
      return;
    }
  }
  observations.push_back({x, y, 1});
}

GaussianProcess::GaussianProcess(const GpDataset& data) : data_(data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd gram(n, n);
  y_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y_(i) = data.observations[static_cast<std::size_t>(i)].y;
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k = data.kernel(data.observations[static_cast<std::size_t>(i)].x,
                                   data.observations[static_cast<std::size_t>(j)].x);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  gram.diagonal().array() += data.noise_var;
  if (n == 0) return;

  for (double jitter = 0.0;; jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0) {
    if (jitter > kMaxJitter) {
      throw SingularKernel(fmt::format(
          "Gram matrix of {} points is not positive definite", n));
    }
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += jitter;
    chol_.compute(a);
    if (chol_.info() == Eigen::Success) {
      jitter_ = jitter;
      break;
    }
  }
  alpha_ = chol_.solve(y_);
}

Posterior GaussianProcess::predict(const AugParams& x) const {
  const double prior = data_.kernel(x, x);
  const auto n = static_cast<Eigen::Index>(data_.size());
  if (n == 0) return {0.0, std::sqrt(prior)};

  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kstar(i) = data_.kernel(x, data_.observations[static_cast<std::size_t>(i)].x);
  }
  const double mean = kstar.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(kstar);
  const double var = std::max(0.0, prior - v.squaredNorm());
  return {mean, std::sqrt(var)};
}

double GaussianProcess::log_marginal_likelihood() const {
  const auto n = static_cast<double>(data_.size());
  if (data_.size() == 0) return 0.0;
  const double log_det =
      2.0 * chol_.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * y_.dot(alpha_) - 0.5 * log_det -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

Posterior gp_posterior(const GpDataset& data, const AugParams& query) {
  return GaussianProcess(data).predict(query);
}

double ucb(const Posterior& post, double kappa) { return post.mean + kappa * post.sd; }

double ucb(const GaussianProcess& gp, const AugParams& query, double kappa) {
  return ucb(gp.predict(query), kappa);
}

KernelConfig refit_kernel(const GpDataset& data) {
  KernelConfig best = data.kernel;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double ls : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.7, 1.0}) {
    for (double sf : {0.1, 0.2, 0.3, 0.5, 0.7, 1.0}) {
      GpDataset trial = data;
      trial.kernel.length_scale = ls;
      trial.kernel.signal_var = sf * sf;
      try {
        const double ll = GaussianProcess(trial).log_marginal_likelihood();
        if (ll > best_ll) {
          best_ll = ll;
          best = trial.kernel;
        }
      } catch (const SingularKernel&) {
      }
    }
  }
  return best;
}

Proposal propose_next(const GaussianProcess& gp, const BoConfig& cfg) {
  const int g = cfg.grid;
  const double spacing = 1.0 / (g - 1);
  Proposal p;
  p.grid_acquisition = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const AugParams x{i * spacing, j * spacing};
      const double a = ucb(gp, x, cfg.kappa);
      if (a > p.grid_acquisition) {
        p.grid_acquisition = a;
        p.grid_x = x;
      }
    }
  }

  AugParams x = p.grid_x;
  double best = p.grid_acquisition;
  constexpr double kMinStep = 1e-4;
  for (double step = 0.5 * spacing; step >= kMinStep;) {
    bool improved = false;
    for (int axis = 0; axis < 2; ++axis) {
      for (double dir : {-1.0, 1.0}) {
        AugParams c = x;
        double& coord = axis == 0 ? c.scale : c.brightness;
        coord = std::clamp(coord + dir * step, 0.0, 1.0);
        const double a = ucb(gp, c, cfg.kappa);
        if (a > best) {
          best = a;
          x = c;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  p.x = x;
  p.acquisition = best;
  return p;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Budget:
      return "budget";
    case StopReason::Converged:
      return "converged";
    case StopReason::SuccessThreshold:
      return "success_threshold";
  }
  return "unknown";
}

namespace {

void finalize(OptimizationReport& report) {
  report.best_y = -std::numeric_limits<double>::infinity();
  for (const BoStep& s : report.history) {
    if (s.y > report.best_y) {
      report.best_y = s.y;
      report.best = s.x;
    }
  }
}

}  // namespace

OptimizationReport optimize(const Objective& objective, const BoConfig& cfg,
                            std::uint64_t seed) {
  OptimizationReport report;
  report.data.kernel = cfg.kernel;
  report.data.noise_var = cfg.noise_var;

  int eval_index = 0;
  const auto run = [&](const AugParams& x, int iter, std::optional<double> acq) {
    double y = 0.0;
    try {
      y = objective(x, eval_index);
    } catch (const std::exception& e) {
      finalize(report);
      throw EvaluationFailed(
          fmt::format("evaluation {} at ({}, {}) failed: {}", eval_index, x.scale,
                      x.brightness, e.what()),
          report);
    }
    ++eval_index;
    report.data.add(x, y);
    report.history.push_back({iter, x, y, acq});
    return y;
  };

  Rng rng = make_rng(seed, "bo-initial-samples");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < cfg.initial_samples; ++k) {
    const double s = unit(rng);
    const double b = unit(rng);
    run({s, b}, 0, std::nullopt);
  }

  report.stop_reason = StopReason::Budget;
  for (int n = 1; n <= cfg.iterations; ++n) {
    if (cfg.refit) report.data.kernel = refit_kernel(report.data);
    const GaussianProcess gp(report.data);
    const Proposal next = propose_next(gp, cfg);
    // Stopping rule, checked before the proposal is evaluated.
    if (next.acquisition < cfg.epsilon) {
      report.stop_reason = StopReason::Converged;
      break;
    }
    const double y = run(next.x, n, next.acquisition);
    if (y >= cfg.success_threshold) {
      report.stop_reason = StopReason::SuccessThreshold;
      break;
    }
  }
  finalize(report);
  return report;
}

void write_observations_csv(std::ostream& out, const OptimizationReport& report) {
  out << "# helibo observations v1\n";
  out << "iter,S,B,success_rate,acquisition_at_proposal,stop_reason\n";
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    const BoStep& s = report.history[i];
    const std::string acq =
        s.acquisition ? fmt::format("{:.6f}", *s.acquisition) : std::string();
    const std::string_view reason =
        i + 1 == report.history.size() ? to_string(report.stop_reason) : "";
    fmt::print(out, "{},{:.6f},{:.6f},{:.6f},{},{}\n", s.iter, s.x.scale,
               s.x.brightness, s.y, acq, reason);
  }
}

void write_contour_csv(std::ostream& out, const GpDataset& data, int resolution) {
  const GaussianProcess gp(data);
  out << "# helibo contour v1\n";
  out << "S,B,posterior_mean,posterior_std\n";
  const double step = resolution > 1 ? 1.0 / (resolution - 1) : 0.0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const AugParams x{i * step, j * step};
      const Posterior p = gp.predict(x);
      fmt::print(out, "{:.4f},{:.4f},{:.6f},{:.6f}\n", x.scale, x.brightness,
                 p.mean, p.sd);
    }
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

GpDataset read_observations_csv(std::istream& in, const KernelConfig& kernel,
                                double noise_var) {
  GpDataset data;
  data.kernel = kernel;
  data.noise_var = noise_var;
  std::string line;
  int col_s = -1, col_b = -1, col_y = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (col_s < 0) {
      for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        if (cells[i] == "S") col_s = i;
        if (cells[i] == "B") col_b = i;
        if (cells[i] == "success_rate") col_y = i;
      }
      if (col_s < 0 || col_b < 0 || col_y < 0) {
        throw ConfigError("observations: header lacks S, B or success_rate");
      }
      continue;
    }
    const int need = std::max({col_s, col_b, col_y});
    if (static_cast<int>(cells.size()) <= need) {
      throw ConfigError(fmt::format("observations: short row '{}'", line));
    }
    try {
      data.add({std::stod(cells[col_s]), std::stod(cells[col_b])},
               std::stod(cells[col_y]));
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("observations: bad number in '{}'", line));
    }
  }
  return data;
}

}  // namespace helibo

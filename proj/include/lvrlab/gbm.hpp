// Geometric Brownian motion reference price, one step per block.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lvrlab/error.hpp"
#include "lvrlab/random.hpp"

namespace lvrlab {

struct GbmParams {
  double mu_daily = 0.0;
  double sigma_daily = 0.05;
  int blocks_per_day = 100;

  double dt() const noexcept { return 1.0 / static_cast<double>(blocks_per_day); }

  void validate() const {
    if (!(sigma_daily >= 0.0) || !std::isfinite(sigma_daily)) {
      throw config_error("sigma_daily", "must be a non-negative finite number");
    }
    if (!std::isfinite(mu_daily)) {
      throw config_error("mu_daily", "must be finite");
    }
    if (blocks_per_day < 1) {
      throw config_error("blocks_per_day", "must be at least 1");
    }
  }

  friend bool operator==(const GbmParams&, const GbmParams&) = default;
};

// Exact log-normal transition over one block with precomputed coefficients.
class GbmStepper {
public:
  explicit GbmStepper(const GbmParams& params)
      : drift_((params.mu_daily - 0.5 * params.sigma_daily * params.sigma_daily) * params.dt()),
        diffusion_(params.sigma_daily * std::sqrt(params.dt())) {}

  double operator()(double price, double normal_draw) const noexcept {
    return price * std::exp(drift_ + diffusion_ * normal_draw);
  }

private:
  double drift_;
  double diffusion_;
};

inline double gbm_step(double price, const GbmParams& params, double normal_draw) {
  return GbmStepper(params)(price, normal_draw);
}

struct PricePath {
  double initial_price = 1.0;
  std::vector<double> prices;  // price at the end of block 1, 2, ...
};

inline PricePath make_path(const GbmParams& params, int days, double initial_price,
                           std::uint64_t seed, std::uint64_t path_index) {
  params.validate();
  if (days < 1) {
    throw config_error("days", "must be at least 1");
  }
  if (!(initial_price > 0.0) || !std::isfinite(initial_price)) {
    throw config_error("initial_price", "must be positive and finite");
  }
  const GbmStepper step(params);
  auto normals = normal_stream(seed, path_index);
  PricePath path{initial_price, {}};
  const auto n = static_cast<std::size_t>(days) * static_cast<std::size_t>(params.blocks_per_day);
  path.prices.reserve(n);
  double price = initial_price;
  for (std::size_t i = 0; i < n; ++i) {
    price = step(price, normals());
    path.prices.push_back(price);
  }
  return path;
}

}  // namespace lvrlab

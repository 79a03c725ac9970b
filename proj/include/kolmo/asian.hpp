#pragma once

#include <cstdint>

namespace kolmo {

enum class Averaging { geometric, arithmetic };

// Fixed-strike call on the running average of a lognormal stock. The state
// kept by the pricer is the running integral of log S (geometric) or of S
// itself (arithmetic), so the averaging enters only through the payoff and
// the transport speed.
struct AsianModel {
  double spot = 100.0;
  double sigma = 0.2;
  double rate = 0.05;
  double maturity = 1.0;
  double strike = 100.0;
  Averaging averaging = Averaging::geometric;
};

struct AsianGrid {
  int n_price = 257;    // nodes along the diffusion coordinate
  int n_average = 1537;  // nodes along the running-integral coordinate
  double width_sigmas = 6.0;
  double margin = 0.2;  // widens the averaging span on both sides
  double cfl = 0.35;
};

struct AsianPrice {
  double price = 0.0;
  double lo_coord = 0.0;
  double hi_coord = 0.0;
  double lo_avg = 0.0;
  double hi_avg = 0.0;
  int steps = 0;
  double dt = 0.0;
  bool degenerate = false;  // zero volatility priced along the deterministic path
};

// Backward solve of the pricing equation on (diffusion coordinate, running
// integral), marched in time to maturity with limited second order transport
// of the average. Zero volatility collapses to the characteristics formula.
AsianPrice price_asian(const AsianModel& m, const AsianGrid& grid = {});

struct McPrice {
  double price = 0.0;
  double std_error = 0.0;
};

// Exact lognormal stepping with a trapezoidal running average; path p draws
// from stream p of the counter generator, so results are independent of
// evaluation order.
McPrice mc_asian_oracle(const AsianModel& m, long n_paths, int n_steps,
                        std::uint64_t seed);

// Continuous-monitoring closed form for the geometric average call.
double asian_geometric_closed_form(const AsianModel& m);

}  // namespace kolmo

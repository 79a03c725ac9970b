#include <kolmo/asian.hpp>

#include <kolmo/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kolmo {

namespace {

void validate(const AsianModel& m) {
  if (!(m.spot > 0.0)) throw std::invalid_argument("spot must be positive");
  if (!(m.maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
  if (!(m.sigma >= 0.0)) throw std::invalid_argument("volatility must be nonnegative");
  if (!(m.strike >= 0.0)) throw std::invalid_argument("strike must be nonnegative");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Average along the noise-free path S_t = spot * exp(rate * t).
double deterministic_average(const AsianModel& m) {
  const double T = m.maturity;
  if (m.averaging == Averaging::geometric)
    return m.spot * std::exp(0.5 * m.rate * T);
  return m.rate == 0.0 ? m.spot
                       : m.spot * (std::exp(m.rate * T) - 1.0) / (m.rate * T);
}

double payoff_of_integral(const AsianModel& m, double integral) {
  const double avg = m.averaging == Averaging::geometric
                         ? std::exp(integral / m.maturity)
                         : integral / m.maturity;
  return std::max(avg - m.strike, 0.0);
}

// Exact mean of the terminal payoff over one averaging cell. Point sampling
// would tie the price to the subcell position of the payoff kink, which the
// transport never diffuses away; the averaged projection keeps the read
// second order regardless of where the kink falls.
double cell_average_payoff(const AsianModel& m, double center, double h) {
  const double T = m.maturity;
  const double lo = center - 0.5 * h, hi = center + 0.5 * h;
  const bool geometric = m.averaging == Averaging::geometric;
  const double kink =
      geometric ? (m.strike > 0.0 ? T * std::log(m.strike) : lo - 1.0)
                : T * m.strike;
  if (hi <= kink) return 0.0;
  const double x0 = std::max(lo, kink);
  const double mass =
      geometric ? T * (std::exp(hi / T) - std::exp(x0 / T)) - m.strike * (hi - x0)
                : (hi * hi - x0 * x0) / (2.0 * T) - m.strike * (hi - x0);
  return mass / h;
}

// Value pinned to the far field: complete the running integral along the
// deterministic continuation over the remaining horizon and discount.
double far_field(const AsianModel& m, double y, double integral, double remaining) {
  double completed = integral;
  if (m.averaging == Averaging::geometric) {
    completed += y * remaining +
                 0.5 * (m.rate - 0.5 * m.sigma * m.sigma) * remaining * remaining;
  } else {
    completed += m.rate == 0.0
                     ? y * remaining
                     : y * (std::exp(m.rate * remaining) - 1.0) / m.rate;
  }
  return std::exp(-m.rate * remaining) * payoff_of_integral(m, completed);
}

// Branchless slope limiter: agreeing signs keep the smaller magnitude,
// disagreeing signs drop to first order.
template <typename L, typename R>
auto minmod(const L& a, const R& b) {
  return a.min(b).max(0.0) + a.max(b).min(0.0);
}

}  // namespace

AsianPrice price_asian(const AsianModel& m, const AsianGrid& grid) {
  validate(m);
  if (grid.n_price < 5 || grid.n_average < 7)
    throw std::invalid_argument("pricing grid needs at least 5x7 nodes");

  const double T = m.maturity;
  AsianPrice out;

  if (m.sigma == 0.0) {
    out.degenerate = true;
    out.price = std::exp(-m.rate * T) *
                std::max(deterministic_average(m) - m.strike, 0.0);
    return out;
  }

  const bool geometric = m.averaging == Averaging::geometric;
  const double half_width = grid.width_sigmas * m.sigma * std::sqrt(T);
  // Diffusion coordinate: log-price for the geometric contract (constant
  // diffusion), the price itself for the arithmetic one (the squared
  // coefficient moves into the divergence form plus a drift correction).
  const double y0 = geometric ? std::log(m.spot) : m.spot;
  const double y_lo = geometric ? y0 - half_width : m.spot * std::exp(-half_width);
  const double y_hi = geometric ? y0 + half_width : m.spot * std::exp(half_width);

  double a_lo = std::min(0.0, T * y_lo), a_hi = std::max(0.0, T * y_hi);
  const double reach = a_hi - a_lo;
  a_lo -= grid.margin * reach;
  a_hi += grid.margin * reach;

  const int ny = grid.n_price, na = grid.n_average;
  const double hy = (y_hi - y_lo) / (ny - 1), ha = (a_hi - a_lo) / (na - 1);
  Eigen::ArrayXd y(ny), avals(na);
  for (int i = 0; i < ny; ++i) y(i) = y_lo + i * hy;
  for (int j = 0; j < na; ++j) avals(j) = a_lo + j * ha;

  Eigen::ArrayXXd U(ny, na);
  for (int j = 0; j < na; ++j)
    U.col(j).setConstant(cell_average_payoff(m, avals(j), ha));
  if (U.maxCoeff() == 0.0) {
    const double needed =
        geometric ? T * std::log(std::max(2.0 * m.strike, 1.0)) : 2.0 * T * m.strike;
    throw std::invalid_argument(
        "payoff vanishes on the averaging grid; extend its upper bound to at "
        "least " +
        std::to_string(needed));
  }

  const double s2 = m.sigma * m.sigma;
  Eigen::ArrayXd amid(ny - 1), bdrift(ny);
  for (int i = 0; i + 1 < ny; ++i) {
    const double ym = 0.5 * (y(i) + y(i + 1));
    amid(i) = geometric ? 0.5 * s2 : 0.5 * s2 * ym * ym;
  }
  if (geometric)
    bdrift.setConstant(m.rate - 0.5 * s2);
  else
    bdrift = (m.rate - s2) * y;

  // The averaging direction is integrated exactly by per-row shifts, so only
  // diffusion, drift and discounting constrain the explicit stage.
  const double denom = 2.0 * amid.maxCoeff() / (hy * hy) +
                       bdrift.abs().maxCoeff() / hy + std::abs(m.rate);
  const int steps =
      std::max(2, static_cast<int>(std::ceil(T * denom / grid.cfl)));
  const double dt = T / steps;
  out.steps = steps;
  out.dt = dt;
  out.lo_coord = y_lo;
  out.hi_coord = y_hi;
  out.lo_avg = a_lo;
  out.hi_avg = a_hi;

  const Eigen::ArrayXd bmid = bdrift.segment(1, ny - 2);

  Eigen::ArrayXXd gy(ny - 1, na), flux(ny - 1, na);
  Eigen::ArrayXXd rate(ny - 2, na - 2), stage(ny, na);

  const auto fill_rate = [&](const Eigen::ArrayXXd& W) {
    gy = (W.bottomRows(ny - 1) - W.topRows(ny - 1)) / hy;
    flux = gy.colwise() * amid;
    rate = (flux.bottomRows(ny - 2) - flux.topRows(ny - 2)).middleCols(1, na - 2) / hy;
    // Central drift stays stable here because the cell Peclet number is tiny.
    rate += ((W.bottomRows(ny - 2) - W.topRows(ny - 2)) / (2.0 * hy))
                .middleCols(1, na - 2)
                .colwise() *
            bmid;
    rate -= m.rate * W.block(1, 1, ny - 2, na - 2);
  };

  // Advances every row by its own pull distance along the averaging axis.
  // Each row has one constant transport speed, so the shift solves that
  // substep exactly up to interpolation; values pulled from beyond the grid
  // come from the far field completion. Clamping the cubic to its bracketing
  // nodes keeps the payoff foot from ringing.
  Eigen::ArrayXd ext(na + 3), shifted(na), slo(na), shi(na);
  const auto shift_rows = [&](double span, double remaining) {
    for (int i = 0; i < ny; ++i) {
      const double delta = span * y(i) / ha;
      const int whole = static_cast<int>(std::floor(delta));
      const double f = delta - whole;
      const double wm = -f * (f - 1.0) * (f - 2.0) / 6.0;
      const double w0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
      const double w1 = -(f + 1.0) * f * (f - 2.0) / 2.0;
      const double w2 = (f + 1.0) * f * (f - 1.0) / 6.0;

      const int qlo = std::clamp(1 - whole, 0, na + 3);
      const int qhi = std::clamp(na + 1 - whole, 0, na + 3);
      if (qhi > qlo)
        ext.segment(qlo, qhi - qlo) =
            U.row(i).segment(qlo + whole - 1, qhi - qlo).transpose();
      for (int q = 0; q < qlo; ++q)
        ext(q) = far_field(m, y(i), a_lo + (q + whole - 1) * ha, remaining);
      for (int q = qhi; q < na + 3; ++q)
        ext(q) = far_field(m, y(i), a_lo + (q + whole - 1) * ha, remaining);

      shifted = wm * ext.segment(0, na) + w0 * ext.segment(1, na) +
                w1 * ext.segment(2, na) + w2 * ext.segment(3, na);
      slo = ext.segment(1, na).min(ext.segment(2, na));
      shi = ext.segment(1, na).max(ext.segment(2, na));
      U.row(i) = shifted.max(slo).min(shi).transpose();
    }
  };

  const auto set_edges = [&](Eigen::ArrayXXd& W, double remaining) {
    for (int j = 0; j < na; ++j) {
      W(0, j) = far_field(m, y(0), avals(j), remaining);
      W(ny - 1, j) = far_field(m, y(ny - 1), avals(j), remaining);
    }
    for (int i = 1; i + 1 < ny; ++i) {
      W(i, 0) = far_field(m, y(i), avals(0), remaining);
      W(i, na - 1) = far_field(m, y(i), avals(na - 1), remaining);
    }
  };

  // Strang splitting with the half shifts merged across steps, and Heun
  // stages for the explicit part so the time error stays quadratic.
  shift_rows(0.5 * dt, 0.0);
  for (int k = 0; k < steps; ++k) {
    const double remaining = (k + 1) * dt;
    fill_rate(U);
    stage = U;
    stage.block(1, 1, ny - 2, na - 2) += dt * rate;
    set_edges(stage, remaining);
    fill_rate(stage);
    stage.block(1, 1, ny - 2, na - 2) += dt * rate;
    U.block(1, 1, ny - 2, na - 2) =
        0.5 * (U.block(1, 1, ny - 2, na - 2) + stage.block(1, 1, ny - 2, na - 2));
    set_edges(U, remaining);
    shift_rows(k + 1 < steps ? dt : 0.5 * dt, remaining);
  }

  const double py = (y0 - y_lo) / hy, pa = (0.0 - a_lo) / ha;
  const int iy = std::clamp(static_cast<int>(py), 0, ny - 2);
  const int ja = std::clamp(static_cast<int>(pa), 0, na - 2);
  const double fy = py - iy, fa = pa - ja;
  out.price = (1 - fy) * (1 - fa) * U(iy, ja) + fy * (1 - fa) * U(iy + 1, ja) +
              (1 - fy) * fa * U(iy, ja + 1) + fy * fa * U(iy + 1, ja + 1);
  return out;
}

McPrice mc_asian_oracle(const AsianModel& m, long n_paths, int n_steps,
                        std::uint64_t seed) {
  validate(m);
  if (n_paths < 2 || n_steps < 1)
    throw std::invalid_argument("need at least 2 paths and 1 step");

  const bool geometric = m.averaging == Averaging::geometric;
  const double T = m.maturity, dt = T / n_steps;
  const double drift = (m.rate - 0.5 * m.sigma * m.sigma) * dt;
  const double vol = m.sigma * std::sqrt(dt);
  const CounterRng rng(seed);

  double sum = 0.0, sumsq = 0.0;
  for (long p = 0; p < n_paths; ++p) {
    double logs = std::log(m.spot);
    double prev = geometric ? logs : m.spot;
    double run = 0.0;
    for (int k = 0; k < n_steps; ++k) {
      logs += drift + vol * rng.normal(p, k, 0);
      const double cur = geometric ? logs : std::exp(logs);
      run += 0.5 * (prev + cur) * dt;
      prev = cur;
    }
    const double pay = payoff_of_integral(m, run);
    sum += pay;
    sumsq += pay * pay;
  }

  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(sumsq / n - mean * mean, 0.0) * n / (n - 1.0);
  const double disc = std::exp(-m.rate * T);
  return {disc * mean, disc * std::sqrt(var / n)};
}

double asian_geometric_closed_form(const AsianModel& m) {
  validate(m);
  const double T = m.maturity;
  if (m.sigma == 0.0)
    return std::exp(-m.rate * T) *
           std::max(m.spot * std::exp(0.5 * m.rate * T) - m.strike, 0.0);
  // The time average of log S is Gaussian with a third of the terminal
  // variance, so the average itself is lognormal.
  const double mu = std::log(m.spot) + 0.5 * (m.rate - 0.5 * m.sigma * m.sigma) * T;
  const double s = m.sigma * std::sqrt(T / 3.0);
  const double d2 = (mu - std::log(m.strike)) / s;
  const double d1 = d2 + s;
  return std::exp(-m.rate * T) * (std::exp(mu + 0.5 * s * s) * normal_cdf(d1) -
                                  m.strike * normal_cdf(d2));
}

}  // namespace kolmo

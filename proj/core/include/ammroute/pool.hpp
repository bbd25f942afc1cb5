#pragma once

#include <span>
#include <variant>
#include <vector>

namespace ammroute {

// Relative margin kept between an extended-domain argument and the pole at
// -reserve_x(). quote_extended and price reject x < -R * (1 - kPoleMargin).
inline constexpr double kPoleMargin = 1e-12;

// Constant-product pool. Trades token X for token Y:
//   forward(x)  = r_y x / (r_x + x)
//   reverse(y)  = r_x y / (r_y + y)
// and the continuation of forward() below zero has the same closed form.
class V2Pool {
 public:
  V2Pool(double r_x, double r_y);

  double r_x() const noexcept { return r_x_; }
  double r_y() const noexcept { return r_y_; }

  double forward(double x) const;
  double reverse(double y) const;
  double inverse_reverse(double x_out) const;
  double extended(double x) const;
  double price(double x) const;
  double reserve_x() const noexcept { return r_x_; }

  // Pool state after a signed allocation x has been executed against it.
  V2Pool after_trade(double x) const;

 private:
  double r_x_;
  double r_y_;
};

struct LiquiditySegment {
  double sqrt_lo;
  double sqrt_hi;  // may be +inf for the topmost segment
  double liquidity;
};

// Concentrated-liquidity pool over sqrt-price s, with price of X in Y equal
// to s^2. Selling X moves s down; buying X (selling Y) moves s up. A
// background liquidity is present over all of (0, inf), so the effective
// liquidity never vanishes and the trade function is C^1 everywhere.
class PiecewisePool {
 public:
  // One interval of constant effective liquidity (segment + background).
  struct Band {
    double lo;
    double hi;
    double liquidity;
  };

  PiecewisePool(double sqrt_price, double background_liquidity,
                std::vector<LiquiditySegment> segments);

  double sqrt_price() const noexcept { return sqrt_price_; }
  double background_liquidity() const noexcept { return background_; }
  std::span<const LiquiditySegment> segments() const noexcept { return segments_; }

  // Effective liquidity bands covering (0, inf), ascending in sqrt-price.
  std::span<const Band> bands() const noexcept { return bands_; }

  double forward(double x) const;
  double reverse(double y) const;
  double inverse_reverse(double x_out) const;
  double extended(double x) const;
  double price(double x) const;
  double reserve_x() const noexcept { return reserve_x_; }

  // Sqrt-price after a signed allocation x (x in the extended domain).
  double sqrt_price_after(double x) const;

  PiecewisePool after_trade(double x) const;

 private:
  struct Swap {
    double amount;
    double sqrt_after;
  };

  std::size_t band_below(double s) const;
  std::size_t band_above(double s) const;
  Swap sell_x(double x) const;
  Swap sell_y(double y) const;
  Swap buy_x(double x_out) const;

  double sqrt_price_;
  double background_;
  std::vector<LiquiditySegment> segments_;
  std::vector<Band> bands_;
  double reserve_x_;
};

// Two-sided trade function. Immutable; every query is a pure function.
class Pool {
 public:
  using Model = std::variant<V2Pool, PiecewisePool>;

  Pool(V2Pool pool) : model_(std::move(pool)) {}             // NOLINT
  Pool(PiecewisePool pool) : model_(std::move(pool)) {}      // NOLINT

  const Model& model() const noexcept { return model_; }
  bool is_v2() const noexcept { return std::holds_alternative<V2Pool>(model_); }

  Pool after_trade(double x) const;

 private:
  Model model_;
};

// E_{X,Y}(x) for x >= 0.
double quote_forward(const Pool& pool, double x);
// E_{Y,X}(y) for y >= 0.
double quote_reverse(const Pool& pool, double y);
// Y input required to withdraw x_out of X, 0 <= x_out < reserve_x.
double inverse_reverse(const Pool& pool, double x_out);
// Concave continuation: forward for x >= 0, -inverse_reverse(-x) below.
double quote_extended(const Pool& pool, double x);
// Marginal price of Y in X after allocating x, i.e. 1 / E'(x).
double price(const Pool& pool, double x);
double reserve_x(const Pool& pool);

}  // namespace ammroute

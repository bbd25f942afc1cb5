#include "ammroute/pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ammroute/errors.hpp"

namespace ammroute {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DomainError(std::string(what) + " must be finite and >= 0, got " +
                      std::to_string(v));
  }
}

void require_extended(double x, double reserve) {
  if (!std::isfinite(x)) throw DomainError("allocation must be finite");
  if (x < -reserve * (1.0 - kPoleMargin)) {
    throw DomainError("allocation " + std::to_string(x) +
                      " at or below reserve pole -" + std::to_string(reserve));
  }
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw ConfigError(std::string(what) + " must be finite and > 0");
  }
}

}  // namespace

// ---------------------------------------------------------------- V2Pool

V2Pool::V2Pool(double r_x, double r_y) : r_x_(r_x), r_y_(r_y) {
  require_positive(r_x, "r_x");
  require_positive(r_y, "r_y");
}

double V2Pool::forward(double x) const {
  require_nonneg(x, "input x");
  return r_y_ * x / (r_x_ + x);
}

double V2Pool::reverse(double y) const {
  require_nonneg(y, "input y");
  return r_x_ * y / (r_y_ + y);
}

double V2Pool::inverse_reverse(double x_out) const {
  require_nonneg(x_out, "output x");
  if (x_out >= r_x_) throw ReserveError("requested X output exceeds reserve");
  return r_y_ * x_out / (r_x_ - x_out);
}

double V2Pool::extended(double x) const {
  require_extended(x, r_x_);
  if (x >= 0.0) return forward(x);
  return -inverse_reverse(-x);
}

double V2Pool::price(double x) const {
  require_extended(x, r_x_);
  const double rx = r_x_ + x;
  return rx * rx / (r_x_ * r_y_);
}

V2Pool V2Pool::after_trade(double x) const {
  if (!std::isfinite(x) || x <= -r_x_) {
    throw ReserveError("trade exhausts the X reserve");
  }
  const double y_out = x >= 0.0 ? forward(x) : -inverse_reverse(-x);
  const double nx = r_x_ + x;
  const double ny = r_y_ - y_out;
  if (!(nx > 0.0) || !(ny > 0.0)) throw ReserveError("trade exhausts the pool");
  return V2Pool(nx, ny);
}

// --------------------------------------------------------- PiecewisePool

PiecewisePool::PiecewisePool(double sqrt_price, double background_liquidity,
                             std::vector<LiquiditySegment> segments)
    : sqrt_price_(sqrt_price),
      background_(background_liquidity),
      segments_(std::move(segments)) {
  require_positive(sqrt_price, "sqrt_price");
  require_positive(background_liquidity, "background_liquidity");

  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& seg = segments_[i];
    if (!std::isfinite(seg.sqrt_lo) || seg.sqrt_lo < 0.0 || std::isnan(seg.sqrt_hi) ||
        !(seg.sqrt_hi > seg.sqrt_lo)) {
      throw ConfigError("segment " + std::to_string(i) + " has an empty or invalid range");
    }
    if (!std::isfinite(seg.liquidity) || seg.liquidity < 0.0) {
      throw ConfigError("segment " + std::to_string(i) + " has negative liquidity");
    }
    if (i > 0 && segments_[i - 1].sqrt_hi != seg.sqrt_lo) {
      throw ConfigError("segments " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " are not contiguous");
    }
  }

  double cursor = 0.0;
  for (const auto& seg : segments_) {
    if (seg.sqrt_lo > cursor) bands_.push_back({cursor, seg.sqrt_lo, background_});
    bands_.push_back({seg.sqrt_lo, seg.sqrt_hi, seg.liquidity + background_});
    cursor = seg.sqrt_hi;
  }
  if (cursor < kInf) bands_.push_back({cursor, kInf, background_});

  // X released when s runs from the current price to infinity.
  reserve_x_ = 0.0;
  for (std::size_t k = band_above(sqrt_price_); k < bands_.size(); ++k) {
    const double from = std::max(bands_[k].lo, sqrt_price_);
    const double to_inv = std::isinf(bands_[k].hi) ? 0.0 : 1.0 / bands_[k].hi;
    reserve_x_ += bands_[k].liquidity * (1.0 / from - to_inv);
  }
}

// Band used when s moves down from s (lo < s <= hi).
std::size_t PiecewisePool::band_below(double s) const {
  auto it = std::lower_bound(bands_.begin(), bands_.end(), s,
                             [](const Band& b, double v) { return b.hi < v; });
  return static_cast<std::size_t>(it - bands_.begin());
}

// Band used when s moves up from s (lo <= s < hi).
std::size_t PiecewisePool::band_above(double s) const {
  auto it = std::upper_bound(bands_.begin(), bands_.end(), s,
                             [](double v, const Band& b) { return v < b.hi; });
  return static_cast<std::size_t>(it - bands_.begin());
}

// Inside a band the pool behaves like a V2 pool with virtual reserves
// (L / s, L * s); every partial step below uses that form so that small
// amounts do not suffer cancellation.
PiecewisePool::Swap PiecewisePool::sell_x(double x) const {
  double s = sqrt_price_;
  double rem = x;
  double out = 0.0;
  for (std::size_t k = band_below(s);; --k) {
    const auto& band = bands_[k];
    const double liq = band.liquidity;
    const double cap = band.lo > 0.0 ? liq * (1.0 / band.lo - 1.0 / s) : kInf;
    if (rem <= cap || k == 0) {
      const double vx = liq / s;
      const double vy = liq * s;
      out += vy * rem / (vx + rem);
      return {out, liq * s / (liq + rem * s)};
    }
    out += liq * (s - band.lo);
    rem -= cap;
    s = band.lo;
  }
}

PiecewisePool::Swap PiecewisePool::sell_y(double y) const {
  double s = sqrt_price_;
  double rem = y;
  double out = 0.0;
  for (std::size_t k = band_above(s);; ++k) {
    const auto& band = bands_[k];
    const double liq = band.liquidity;
    const double cap = std::isinf(band.hi) ? kInf : liq * (band.hi - s);
    if (rem <= cap) {
      const double vx = liq / s;
      const double vy = liq * s;
      out += vx * rem / (vy + rem);
      return {out, s + rem / liq};
    }
    out += liq * (1.0 / s - 1.0 / band.hi);
    rem -= cap;
    s = band.hi;
  }
}

PiecewisePool::Swap PiecewisePool::buy_x(double x_out) const {
  double s = sqrt_price_;
  double rem = x_out;
  double in = 0.0;
  for (std::size_t k = band_above(s);; ++k) {
    const auto& band = bands_[k];
    const double liq = band.liquidity;
    const double vx = liq / s;
    const double cap = std::isinf(band.hi) ? vx : liq * (1.0 / s - 1.0 / band.hi);
    if (rem < cap) {
      const double vy = liq * s;
      in += vy * rem / (vx - rem);
      return {in, liq * s / (liq - rem * s)};
    }
    if (std::isinf(band.hi)) throw ReserveError("requested X output exceeds reserve");
    in += liq * (band.hi - s);
    rem -= cap;
    s = band.hi;
  }
}

double PiecewisePool::forward(double x) const {
  require_nonneg(x, "input x");
  if (x == 0.0) return 0.0;
  return sell_x(x).amount;
}

double PiecewisePool::reverse(double y) const {
  require_nonneg(y, "input y");
  if (y == 0.0) return 0.0;
  return sell_y(y).amount;
}

double PiecewisePool::inverse_reverse(double x_out) const {
  require_nonneg(x_out, "output x");
  if (x_out >= reserve_x_) throw ReserveError("requested X output exceeds reserve");
  if (x_out == 0.0) return 0.0;
  return buy_x(x_out).amount;
}

double PiecewisePool::extended(double x) const {
  require_extended(x, reserve_x_);
  if (x >= 0.0) return forward(x);
  return -inverse_reverse(-x);
}

double PiecewisePool::sqrt_price_after(double x) const {
  require_extended(x, reserve_x_);
  if (x == 0.0) return sqrt_price_;
  return x > 0.0 ? sell_x(x).sqrt_after : buy_x(-x).sqrt_after;
}

double PiecewisePool::price(double x) const {
  const double s = sqrt_price_after(x);
  return 1.0 / (s * s);
}

PiecewisePool PiecewisePool::after_trade(double x) const {
  if (!std::isfinite(x) || -x >= reserve_x_) {
    throw ReserveError("trade exhausts the X reserve");
  }
  double s = sqrt_price_;
  if (x > 0.0) s = sell_x(x).sqrt_after;
  if (x < 0.0) s = buy_x(-x).sqrt_after;
  if (!(s > 0.0) || !std::isfinite(s)) throw ReserveError("trade exhausts the pool");
  return PiecewisePool(s, background_, segments_);
}

// ------------------------------------------------------------------ Pool

Pool Pool::after_trade(double x) const {
  return std::visit([x](const auto& p) { return Pool(p.after_trade(x)); }, model_);
}

double quote_forward(const Pool& pool, double x) {
  return std::visit([x](const auto& p) { return p.forward(x); }, pool.model());
}

double quote_reverse(const Pool& pool, double y) {
  return std::visit([y](const auto& p) { return p.reverse(y); }, pool.model());
}

double inverse_reverse(const Pool& pool, double x_out) {
  return std::visit([x_out](const auto& p) { return p.inverse_reverse(x_out); }, pool.model());
}

double quote_extended(const Pool& pool, double x) {
  return std::visit([x](const auto& p) { return p.extended(x); }, pool.model());
}

double price(const Pool& pool, double x) {
  return std::visit([x](const auto& p) { return p.price(x); }, pool.model());
}

double reserve_x(const Pool& pool) {
  return std::visit([](const auto& p) { return p.reserve_x(); }, pool.model());
}

}  // namespace ammroute

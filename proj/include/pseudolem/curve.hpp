#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "pseudolem/error.hpp"
#include "pseudolem/polynomial.hpp"

namespace pseudolem {

inline constexpr double kNearHit = 1e-9;

// Ordered sample points of a curve. Closed curves carry an implicit edge from
// the last point back to the first; a duplicated closing point is dropped.
class SampledCurve {
 public:
  SampledCurve() = default;

  SampledCurve(std::vector<Complex> points, bool closed) : points_(std::move(points)), closed_(closed) {
    if (closed_ && points_.size() > 1 && points_.front() == points_.back()) points_.pop_back();
    if (points_.size() < (closed_ ? 3u : 2u)) throw PreconditionError("curve has too few points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const Complex& z = points_[i];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("curve point is not finite");
      if (i + 1 < points_.size() && points_[i + 1] == z) {
        std::ostringstream os;
        os << "consecutive curve points coincide at index " << i;
        throw PreconditionError(os.str());
      }
    }
    if (closed_) {
      double area2 = 0.0;
      for (std::size_t i = 0; i < points_.size(); ++i) {
        const Complex a = points_[i], b = points_[(i + 1) % points_.size()];
        area2 += a.real() * b.imag() - b.real() * a.imag();
      }
      orientation_ = area2 >= 0.0 ? 1 : -1;
    }
  }

  const std::vector<Complex>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool closed() const { return closed_; }
  // Sign of the enclosed signed area (+1 counterclockwise); 0 for open curves.
  int orientation() const { return orientation_; }
  const Complex& operator[](std::size_t i) const { return points_[i]; }

  std::size_t segment_count() const { return closed_ ? points_.size() : points_.size() - 1; }
  Complex segment_end(std::size_t i) const { return points_[(i + 1) % points_.size()]; }

  SampledCurve reversed() const {
    std::vector<Complex> r(points_.rbegin(), points_.rend());
    return SampledCurve(std::move(r), closed_);
  }

  double length() const {
    double L = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i) L += std::abs(segment_end(i) - points_[i]);
    return L;
  }

  double diameter() const {
    double lo_x = points_[0].real(), hi_x = lo_x, lo_y = points_[0].imag(), hi_y = lo_y;
    for (const auto& z : points_) {
      lo_x = std::min(lo_x, z.real());
      hi_x = std::max(hi_x, z.real());
      lo_y = std::min(lo_y, z.imag());
      hi_y = std::max(hi_y, z.imag());
    }
    return std::hypot(hi_x - lo_x, hi_y - lo_y);
  }

  double max_modulus() const {
    double m = 0.0;
    for (const auto& z : points_) m = std::max(m, std::abs(z));
    return m;
  }

 private:
  std::vector<Complex> points_;
  bool closed_ = true;
  int orientation_ = 0;
};

inline SampledCurve circle_curve(Complex center, double radius, std::size_t n = 256, int laps = 1) {
  std::vector<Complex> pts(n);
  for (std::size_t j = 0; j < n; ++j)
    pts[j] = center + std::polar(radius, 2.0 * std::numbers::pi * laps * static_cast<double>(j) / static_cast<double>(n));
  return SampledCurve(std::move(pts), true);
}

inline SampledCurve unit_circle(std::size_t n = 256) { return circle_curve(0.0, 1.0, n); }

// x = a cos t, y = b sin t
inline SampledCurve ellipse_curve(double a, double b, std::size_t n = 256) {
  std::vector<Complex> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    pts[j] = Complex{a * std::cos(t), b * std::sin(t)};
  }
  return SampledCurve(std::move(pts), true);
}

inline double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

struct CurveDistance {
  double distance;
  Complex nearest;
};

inline CurveDistance distance_to_curve(const SampledCurve& c, Complex w) {
  CurveDistance best{std::numeric_limits<double>::infinity(), c[0]};
  for (std::size_t i = 0; i < c.segment_count(); ++i) {
    const double d = point_segment_distance(w, c[i], c.segment_end(i));
    if (d < best.distance) best = {d, c[i]};
  }
  return best;
}

struct WindingResult {
  int value = 0;
  double raw = 0.0;       // total turned angle / 2pi before rounding
  double residual = 0.0;  // |raw - value|
};

// Turned angle of (p_i - w) summed along the closed polygon.
inline WindingResult winding_number_detail(const SampledCurve& c, Complex w) {
  if (!c.closed()) throw PreconditionError("winding number needs a closed curve");
  double total = 0.0;
  double nearest = std::numeric_limits<double>::infinity();
  Complex nearest_pt = c[0];
  for (std::size_t i = 0; i < c.segment_count(); ++i) {
    const Complex a = c[i] - w, b = c.segment_end(i) - w;
    const double d = point_segment_distance(w, c[i], c.segment_end(i));
    if (d < nearest) {
      nearest = d;
      nearest_pt = c[i];
    }
    total += std::atan2(a.real() * b.imag() - a.imag() * b.real(), a.real() * b.real() + a.imag() * b.imag());
  }
  if (nearest <= kNearHit) {
    std::ostringstream os;
    os << "point " << w << " lies within " << kNearHit << " of the curve";
    throw NearHitError(os.str(), nearest, nearest_pt);
  }
  WindingResult r;
  r.raw = total / (2.0 * std::numbers::pi);
  r.value = static_cast<int>(std::lround(r.raw));
  r.residual = std::abs(r.raw - r.value);
  return r;
}

inline int winding_number(const SampledCurve& c, Complex w) { return winding_number_detail(c, w).value; }

namespace detail {

inline double subtended(Complex a, Complex b, Complex w) {
  const Complex u = a - w, v = b - w;
  return std::abs(std::atan2(u.real() * v.imag() - u.imag() * v.real(), u.real() * v.real() + u.imag() * v.imag()));
}

inline void check_poles_off_curve(const RationalMap& f, const SampledCurve& c) {
  for (const auto& pole : f.poles()) {
    const CurveDistance d = distance_to_curve(c, pole.value);
    if (d.distance <= kNearHit) {
      std::ostringstream os;
      os << "pole " << pole.value << " lies on the curve";
      throw NearHitError(os.str(), d.distance, d.nearest);
    }
  }
}

// Appends the image of the open segment (za, zb] with bisection until
// consecutive image points subtend less than max_angle about w.
inline void refine_segment(const RationalMap& f, Complex za, Complex zb, Complex wa, Complex wb, Complex w,
                           double max_angle, int depth, std::vector<Complex>& out) {
  if (depth < 48 && subtended(wa, wb, w) >= max_angle) {
    const Complex zm = 0.5 * (za + zb);
    const Complex wm = f(zm);
    refine_segment(f, za, zm, wa, wm, w, max_angle, depth + 1, out);
    refine_segment(f, zm, zb, wm, wb, w, max_angle, depth + 1, out);
    return;
  }
  out.push_back(wb);
}

}  // namespace detail

// Pointwise image of a closed curve, bisecting (linearly in z) wherever two
// consecutive image points subtend 0.2 rad or more about `focus`.
inline SampledCurve image_curve(const RationalMap& f, const SampledCurve& c, Complex focus = 0.0,
                                double max_angle = 0.2) {
  detail::check_poles_off_curve(f, c);
  std::vector<Complex> img;
  img.reserve(c.size());
  const Complex w0 = f(c[0]);
  img.push_back(w0);
  Complex wprev = w0;
  for (std::size_t i = 0; i < c.segment_count(); ++i) {
    const Complex za = c[i], zb = c.segment_end(i);
    const Complex wb = (i + 1 == c.size()) ? w0 : f(zb);
    if (std::abs(wb - focus) > 0.0 && std::abs(wprev - focus) > 0.0)
      detail::refine_segment(f, za, zb, wprev, wb, focus, max_angle, 0, img);
    else
      img.push_back(wb);
    wprev = wb;
  }
  if (c.closed()) img.pop_back();  // closing point duplicates the first
  // Drop exact repeats (e.g. images of a curve traversed by a non-injective f
  // at a fixed point).
  std::vector<Complex> dedup;
  dedup.reserve(img.size());
  for (const auto& z : img)
    if (dedup.empty() || dedup.back() != z) dedup.push_back(z);
  if (c.closed() && dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return SampledCurve(std::move(dedup), c.closed());
}

// Winding of f(c) about w: zeros minus poles of f - w enclosed by c.
inline WindingResult count_preimages_detail(const RationalMap& f, const SampledCurve& c, Complex w) {
  if (!c.closed()) throw PreconditionError("count_preimages needs a closed curve");
  const SampledCurve img = image_curve(f, c, w);
  return winding_number_detail(img, w);
}

inline int count_preimages(const RationalMap& f, const SampledCurve& c, Complex w) {
  return count_preimages_detail(f, c, w).value;
}

// Pre-evaluated image of a closed curve, for counting preimages of many
// targets against the same curve.
class ImageCounter {
 public:
  ImageCounter(const RationalMap& f, const SampledCurve& c, double max_angle = 0.2)
      : f_(f), curve_(c), max_angle_(max_angle) {
    if (!c.closed()) throw PreconditionError("count_preimages needs a closed curve");
    detail::check_poles_off_curve(f, c);
    image_.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) image_[i] = f(c[i]);
  }

  const std::vector<Complex>& image() const { return image_; }

  WindingResult count(Complex w) const {
    double total = 0.0;
    double nearest = std::numeric_limits<double>::infinity();
    Complex nearest_pt = image_[0];
    std::vector<Complex> scratch;
    const std::size_t n = image_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const Complex wa = image_[i], wb = image_[j];
      const double ang = detail::subtended(wa, wb, w);
      if (ang < max_angle_) {
        const Complex u = wa - w, v = wb - w;
        total += std::atan2(u.real() * v.imag() - u.imag() * v.real(), u.real() * v.real() + u.imag() * v.imag());
        const double d = point_segment_distance(w, wa, wb);
        if (d < nearest) {
          nearest = d;
          nearest_pt = wa;
        }
        continue;
      }
      scratch.clear();
      scratch.push_back(wa);
      detail::refine_segment(f_, curve_[i], curve_.segment_end(i), wa, wb, w, max_angle_, 0, scratch);
      for (std::size_t k = 0; k + 1 < scratch.size(); ++k) {
        const Complex u = scratch[k] - w, v = scratch[k + 1] - w;
        total += std::atan2(u.real() * v.imag() - u.imag() * v.real(), u.real() * v.real() + u.imag() * v.imag());
        const double d = point_segment_distance(w, scratch[k], scratch[k + 1]);
        if (d < nearest) {
          nearest = d;
          nearest_pt = scratch[k];
        }
      }
    }
    if (nearest <= kNearHit) {
      std::ostringstream os;
      os << "image curve passes within " << nearest << " of " << w;
      throw NearHitError(os.str(), nearest, nearest_pt);
    }
    WindingResult r;
    r.raw = total / (2.0 * std::numbers::pi);
    r.value = static_cast<int>(std::lround(r.raw));
    r.residual = std::abs(r.raw - r.value);
    return r;
  }

 private:
  RationalMap f_;
  SampledCurve curve_;
  double max_angle_;
  std::vector<Complex> image_;
};

namespace detail {

inline double orient(Complex a, Complex b, Complex c) {
  const Complex u = b - a, v = c - a;
  return u.real() * v.imag() - u.imag() * v.real();
}

inline bool segments_touch(Complex a, Complex b, Complex c, Complex d, double tol) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  return point_segment_distance(c, a, b) <= tol || point_segment_distance(d, a, b) <= tol ||
         point_segment_distance(a, c, d) <= tol || point_segment_distance(b, c, d) <= tol;
}

}  // namespace detail

// True iff no two non-adjacent segments come within tol of each other.
// Sweep over segments sorted by their left x-extent.
inline bool is_jordan(const SampledCurve& c, double tol = 1e-12) {
  if (!c.closed()) throw PreconditionError("is_jordan needs a closed curve");
  const std::size_t n = c.segment_count();
  struct Seg {
    double lo, hi;
    std::size_t idx;
  };
  std::vector<Seg> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = c[i], b = c.segment_end(i);
    segs[i] = {std::min(a.real(), b.real()) - tol, std::max(a.real(), b.real()) + tol, i};
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& x, const Seg& y) { return x.lo < y.lo; });
  for (std::size_t s = 0; s < n; ++s) {
    const Seg& si = segs[s];
    const Complex a = c[si.idx], b = c.segment_end(si.idx);
    const double ylo = std::min(a.imag(), b.imag()) - tol, yhi = std::max(a.imag(), b.imag()) + tol;
    for (std::size_t t = s + 1; t < n && segs[t].lo <= si.hi; ++t) {
      const std::size_t j = segs[t].idx;
      const std::size_t i = si.idx;
      const std::size_t diff = i > j ? i - j : j - i;
      if (diff <= 1 || diff == n - 1) continue;
      const Complex p = c[j], q = c.segment_end(j);
      if (std::max(p.imag(), q.imag()) < ylo || std::min(p.imag(), q.imag()) > yhi) continue;
      if (detail::segments_touch(a, b, p, q, tol)) return false;
    }
  }
  return true;
}

// Arc-length-uniform resampling of the polygon.
inline SampledCurve resample(const SampledCurve& c, std::size_t count) {
  if (count < 16) throw PreconditionError("resample count must be at least 16");
  const std::size_t nseg = c.segment_count();
  std::vector<double> cum(nseg + 1, 0.0);
  for (std::size_t i = 0; i < nseg; ++i) cum[i + 1] = cum[i] + std::abs(c.segment_end(i) - c[i]);
  const double L = cum.back();
  std::vector<Complex> out(count);
  const double denom = c.closed() ? static_cast<double>(count) : static_cast<double>(count - 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double s = L * static_cast<double>(k) / denom;
    while (seg + 1 < nseg && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out[k] = c[seg] + t * (c.segment_end(seg) - c[seg]);
  }
  return SampledCurve(std::move(out), c.closed());
}

}  // namespace pseudolem

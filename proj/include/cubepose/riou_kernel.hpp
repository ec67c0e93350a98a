#pragma once

#include <algorithm>
#include <cmath>

namespace cubepose::detail {

// Scalar-generic BEV box so the RIoU kernel can run on doubles (loss value)
// and on dual numbers (loss gradient) with identical branching.
template <class T>
struct BevBoxT {
  T l, w, r, cx, cy;
};

// Overlap area of `other`'s conservative AABB with `self`'s own rectangle,
// computed in `self`'s frame.
template <class T>
T overlap_in_frame(const BevBoxT<T>& self, const BevBoxT<T>& other) {
  using std::cos;
  using std::max;
  using std::min;
  using std::sin;

  const T c = cos(other.r - self.r);
  const T s = sin(other.r - self.r);
  const T dx = other.cx - self.cx;
  const T dy = other.cy - self.cy;
  const T cs = cos(self.r);
  const T ss = sin(self.r);
  const T ox = cs * dx + ss * dy;
  const T oy = cs * dy - ss * dx;

  T xlo(0.0), xhi(0.0), ylo(0.0), yhi(0.0);
  bool first = true;
  for (const double fx : {-0.5, 0.5})
    for (const double fy : {-0.5, 0.5}) {
      const T px = ox + c * fx * other.l - s * fy * other.w;
      const T py = oy + s * fx * other.l + c * fy * other.w;
      if (first) {
        xlo = xhi = px;
        ylo = yhi = py;
        first = false;
      } else {
        xlo = min(xlo, px);
        xhi = max(xhi, px);
        ylo = min(ylo, py);
        yhi = max(yhi, py);
      }
    }

  const T ix = max(T(0.0), min(xhi, 0.5 * self.l) - max(xlo, -0.5 * self.l));
  const T iy = max(T(0.0), min(yhi, 0.5 * self.w) - max(ylo, -0.5 * self.w));
  return ix * iy;
}

template <class T>
T riou_kernel(const BevBoxT<T>& g, const BevBoxT<T>& p) {
  using std::abs;
  using std::cos;
  using std::max;
  using std::min;

  const T i1 = overlap_in_frame(g, p);
  const T i2 = overlap_in_frame(p, g);
  const T inter = min(i1, i2) * abs(cos(2.0 * (g.r - p.r)));
  const T uni = max(inter, g.l * g.w + p.l * p.w - inter);
  if (uni <= 0.0) return T(0.0);
  return max(T(0.0), min(T(1.0), inter / uni));
}

}  // namespace cubepose::detail

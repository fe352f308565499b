// hermite.hpp — cubic Hermite interpolation on one interval

#pragma once

namespace nmark {

template <typename T>
struct HermitePoint {
    T value;
    T derivative;
};

/// Cubic through (t0, y0, d0) and (t1, y1, d1), evaluated at t with its derivative.
template <typename T>
HermitePoint<T> hermite(double t0, double t1, const T& y0, const T& y1, const T& d0,
                        const T& d1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const T value = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 +
                    (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
    const T deriv = ((6 * s2 - 6 * s) * y0 + (-6 * s2 + 6 * s) * y1) / h +
                    (3 * s2 - 4 * s + 1) * d0 + (3 * s2 - 2 * s) * d1;
    return {value, deriv};
}

}  // namespace nmark

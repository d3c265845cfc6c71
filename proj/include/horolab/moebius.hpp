#pragma once

// Linear-fractional geometry of the upper half-plane H^2 and its unit
// tangent bundle.
//
// Conventions (pinned by the contraction self-test in the test suite, not
// by fiat):
//   * a_t = diag(e^{t/2}, e^{-t/2}), n_y = [[1,0],[y,1]] (lower, stable),
//     u_x = [[1,x],[0,1]] (upper, unstable).
//   * PSL(2,R) acts on H^2 by z -> (az+b)/(cz+d) and on unit tangents
//     through the derivative.
//   * The reference frame is the downward unit vector at i; frame_of and
//     realize identify unit tangents with group elements through it.
//   * Geodesic flow is the right translation g -> g * a_{-t}.  With these
//     choices a right translation by n_y contracts under forward flow and
//     one by u_x expands, which is the stable/unstable split the rest of
//     the library relies on.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace horolab {

inline constexpr double kPi = 3.14159265358979323846;

enum class Errc {
  near_singular,
  domain_error,
  not_decomposable,
  not_hyperbolic,
  non_positive_degree,
  length_degree_mismatch,
  budget_exceeded,
  budget_blowup,
  budget_mismatch,
  negative_slack,
  dangling_edge,
  degenerate_twist,
  invalid_model,
  not_lipschitz,
  configuration_invalid,
  validation_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::near_singular: return "NearSingular";
    case Errc::domain_error: return "DomainError";
    case Errc::not_decomposable: return "NotDecomposable";
    case Errc::not_hyperbolic: return "NotHyperbolic";
    case Errc::non_positive_degree: return "NonPositiveDegree";
    case Errc::length_degree_mismatch: return "LengthDegreeMismatch";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::budget_blowup: return "BudgetBlowup";
    case Errc::budget_mismatch: return "BudgetMismatch";
    case Errc::negative_slack: return "NegativeSlack";
    case Errc::dangling_edge: return "DanglingEdge";
    case Errc::degenerate_twist: return "DegenerateTwist";
    case Errc::invalid_model: return "InvalidModel";
    case Errc::not_lipschitz: return "NotLipschitz";
    case Errc::configuration_invalid: return "ConfigurationInvalid";
    case Errc::validation_error: return "ValidationError";
  }
  return "UnknownError";
}

inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A real 2x2 unimodular matrix modulo sign, kept in a canonical form:
// det == 1 and the first entry of (a, b, c, d) exceeding 1e-12 in modulus
// is positive.  Equality is plain field comparison of canonical forms.
struct MoebiusElement {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static MoebiusElement normalize(double a, double b, double c, double d) {
    double det = a * d - b * c;
    if (std::abs(det) <= 1e-12)
      throw Error(Errc::near_singular, "normalize: |det| <= 1e-12");
    if (det < 0.0)
      throw Error(Errc::domain_error, "normalize: negative determinant is not in PSL(2,R)");
    double s = 1.0 / std::sqrt(det);
    MoebiusElement m;
    m.a = a * s;
    m.b = b * s;
    m.c = c * s;
    m.d = d * s;
    m.canonicalize_sign();
    return m;
  }

  void canonicalize_sign() {
    const double* e[4] = {&a, &b, &c, &d};
    for (const double* p : e) {
      if (std::abs(*p) > 1e-12) {
        if (*p < 0.0) { a = -a; b = -b; c = -c; d = -d; }
        return;
      }
    }
  }

  // For entries already known to be unimodular (products, inverses of
  // canonical elements): no determinant rescale, which would otherwise
  // amplify cancellation noise when entries are huge.
  static MoebiusElement from_unimodular(double a, double b, double c, double d) {
    MoebiusElement m;
    m.a = a;
    m.b = b;
    m.c = c;
    m.d = d;
    m.canonicalize_sign();
    return m;
  }

  static MoebiusElement identity() { return MoebiusElement{}; }

  // a_t = diag(e^{t/2}, e^{-t/2})
  static MoebiusElement a_flow(double t) {
    return normalize(std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0));
  }
  static MoebiusElement n_lower(double y) { return normalize(1.0, 0.0, y, 1.0); }
  static MoebiusElement u_upper(double x) { return normalize(1.0, x, 0.0, 1.0); }

  // Rotation about i by angle phi, adding phi to tangent directions at i.
  static MoebiusElement rotation_i(double phi) {
    return normalize(std::cos(phi / 2.0), std::sin(phi / 2.0),
                     -std::sin(phi / 2.0), std::cos(phi / 2.0));
  }

  // Affine map i -> z, preserving tangent direction angles.
  static MoebiusElement translation_to(std::complex<double> z) {
    double y = z.imag();
    if (y <= 0.0) throw Error(Errc::domain_error, "translation_to: point not in H^2");
    double sy = std::sqrt(y);
    return normalize(sy, z.real() / sy, 0.0, 1.0 / sy);
  }

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  MoebiusElement operator*(const MoebiusElement& o) const {
    return from_unimodular(a * o.a + b * o.c, a * o.b + b * o.d,
                           c * o.a + d * o.c, c * o.b + d * o.d);
  }

  MoebiusElement inverse() const { return from_unimodular(d, -b, -c, a); }

  bool operator==(const MoebiusElement& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }

  std::complex<double> apply(std::complex<double> z) const {
    return (a * z + b) / (c * z + d);
  }

  // Action on the boundary R u {inf}.
  double apply_boundary(double x) const {
    if (std::isinf(x)) {
      if (std::abs(c) <= 1e-12 * std::max(1.0, std::abs(a))) return kInf;
      return a / c;
    }
    double num = a * x + b;
    double den = c * x + d;
    if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(num))) return kInf;
    return num / den;
  }

  // Derivative argument at z, i.e. the rotation the map applies to tangent
  // vectors at z:  m'(z) = 1/(cz+d)^2.
  double deriv_arg(std::complex<double> z) const {
    return -2.0 * std::arg(c * z + d);
  }

  double frobenius_distance(const MoebiusElement& o) const {
    auto f = [](double x) { return x * x; };
    double dp = f(a - o.a) + f(b - o.b) + f(c - o.c) + f(d - o.d);
    double dm = f(a + o.a) + f(b + o.b) + f(c + o.c) + f(d + o.d);
    return std::sqrt(std::min(dp, dm));
  }
};

struct NAUDecomposition {
  double n_param = 0.0;
  double t = 0.0;
  double u_param = 0.0;
};

// Bruhat NAU factorization m = n_{n} a_t u_{u}; requires the (1,1) entry
// away from zero.  Geodesic configurations in general position never put a
// connector on the degenerate stratum.
inline NAUDecomposition bruhat_nau(const MoebiusElement& m) {
  if (std::abs(m.a) <= 1e-9)
    throw Error(Errc::not_decomposable, "bruhat_nau: |m11| <= 1e-9");
  NAUDecomposition r;
  r.t = 2.0 * std::log(std::abs(m.a));
  r.u_param = m.b / m.a;
  r.n_param = m.c / m.a;
  return r;
}

inline MoebiusElement nau_reconstruct(const NAUDecomposition& x) {
  return MoebiusElement::n_lower(x.n_param) * MoebiusElement::a_flow(x.t) *
         MoebiusElement::u_upper(x.u_param);
}

// log(delta(m)) = 2 log|m11|; the A-coordinate of the Bruhat factorization.
inline double log_delta(const MoebiusElement& m) {
  if (std::abs(m.a) <= 1e-9)
    throw Error(Errc::not_decomposable, "log_delta: |m11| <= 1e-9");
  return 2.0 * std::log(std::abs(m.a));
}

// Oriented geodesic, from the repelling toward the attracting endpoint when
// it comes from a hyperbolic element.  Boundary points live in R u {inf}.
struct GeodesicLine {
  double xi_minus = 0.0;
  double xi_plus = kInf;

  bool operator==(const GeodesicLine& o) const {
    auto same = [](double x, double y) {
      if (std::isinf(x) || std::isinf(y)) return std::isinf(x) && std::isinf(y);
      return x == y;
    };
    return same(xi_minus, o.xi_minus) && same(xi_plus, o.xi_plus);
  }
};

inline bool boundary_close(double x, double y, double tol) {
  if (std::isinf(x) || std::isinf(y)) return std::isinf(x) && std::isinf(y);
  return std::abs(x - y) <= tol;
}

// Axis and translation length of a hyperbolic element, oriented from the
// repelling to the attracting fixed point.
inline std::pair<GeodesicLine, double> axis(const MoebiusElement& m) {
  double tr = std::abs(m.trace());
  if (tr <= 2.0 + 1e-9)
    throw Error(Errc::not_hyperbolic, "axis: |trace| <= 2 + 1e-9");
  double length = 2.0 * std::acosh(tr / 2.0);
  GeodesicLine L;
  if (std::abs(m.c) > 1e-14) {
    double disc = std::sqrt(m.trace() * m.trace() - 4.0);
    double x1 = (m.a - m.d + disc) / (2.0 * m.c);
    double x2 = (m.a - m.d - disc) / (2.0 * m.c);
    // attracting fixed point has |m'(xi)| < 1, i.e. |c xi + d| > 1
    double s1 = std::abs(m.c * x1 + m.d);
    if (s1 > 1.0) { L.xi_plus = x1; L.xi_minus = x2; }
    else { L.xi_plus = x2; L.xi_minus = x1; }
  } else {
    double fin = m.b / (m.d - m.a);
    if (std::abs(m.a) > 1.0) { L.xi_plus = kInf; L.xi_minus = fin; }
    else { L.xi_plus = fin; L.xi_minus = kInf; }
  }
  return {L, length};
}

inline double hyperbolic_distance(std::complex<double> z, std::complex<double> w) {
  if (z.imag() <= 0.0 || w.imag() <= 0.0)
    throw Error(Errc::domain_error, "hyperbolic_distance: point not in H^2");
  double q = std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag()));
  return 2.0 * std::asinh(q);
}

// Unit tangent vector: base point in H^2, direction in (-pi, pi].
struct UnitTangent {
  std::complex<double> base{0.0, 1.0};
  double dir = -kPi / 2.0;
};

inline UnitTangent reference_frame() { return UnitTangent{{0.0, 1.0}, -kPi / 2.0}; }

// Moebius action on unit tangents.
inline UnitTangent act(const MoebiusElement& m, const UnitTangent& v) {
  UnitTangent r;
  r.base = m.apply(v.base);
  r.dir = wrap_angle(v.dir + m.deriv_arg(v.base));
  return r;
}

// Unique group element carrying the reference frame to v.
inline MoebiusElement frame_of(const UnitTangent& v) {
  return MoebiusElement::translation_to(v.base) *
         MoebiusElement::rotation_i(v.dir + kPi / 2.0);
}

inline UnitTangent realize(const MoebiusElement& g) {
  return act(g, reference_frame());
}

// Geodesic flow for time t (arclength), moving the base point along the
// direction of the vector.
inline UnitTangent geodesic_flow(const UnitTangent& v, double t) {
  return realize(frame_of(v) * MoebiusElement::a_flow(-t));
}

namespace detail {

// Azimuths (direction angles) of the geodesic from z1 to z2 at both of its
// endpoints, oriented for travel z1 -> z2.
inline std::pair<double, double> geodesic_azimuths(std::complex<double> z1,
                                                   std::complex<double> z2) {
  double dx = z2.real() - z1.real();
  if (std::abs(dx) < 1e-13 * (1.0 + std::abs(z1) + std::abs(z2))) {
    double up = z2.imag() > z1.imag() ? kPi / 2.0 : -kPi / 2.0;
    return {up, up};
  }
  double xc = (std::norm(z2) - std::norm(z1)) / (2.0 * dx);
  // -i(z - xc) points clockwise along the circle, toward larger Re.
  std::complex<double> t1 = std::complex<double>(0, -1) * (z1 - xc);
  std::complex<double> t2 = std::complex<double>(0, -1) * (z2 - xc);
  if (dx < 0) { t1 = -t1; t2 = -t2; }
  return {std::arg(t1), std::arg(t2)};
}

}  // namespace detail

// Distance on the unit tangent bundle: base distance plus the angular
// defect after parallel transport along the connecting geodesic.
inline double t1_distance(const UnitTangent& v1, const UnitTangent& v2) {
  double base = hyperbolic_distance(v1.base, v2.base);
  double defect;
  if (base < 1e-13) {
    defect = wrap_angle(v2.dir - v1.dir);
  } else {
    auto [az1, az2] = detail::geodesic_azimuths(v1.base, v2.base);
    // transport preserves the angle to the geodesic
    double transported = az2 + wrap_angle(v1.dir - az1);
    defect = wrap_angle(v2.dir - transported);
  }
  return base + std::abs(defect);
}

// Frame whose realized vector sits on L at arclength parameter t, pointing
// toward xi_plus.  Parameter 0 is the apex (for finite endpoints) or the
// height-1 point on a vertical.
inline MoebiusElement line_base_frame(const GeodesicLine& L) {
  if (std::isinf(L.xi_minus) && std::isinf(L.xi_plus))
    throw Error(Errc::domain_error, "line_base_frame: endpoints coincide at inf");
  if (std::isinf(L.xi_minus))
    return MoebiusElement::normalize(1.0, L.xi_plus, 0.0, 1.0);
  if (std::isinf(L.xi_plus))
    return MoebiusElement::normalize(L.xi_minus, -1.0, 1.0, 0.0);
  double d0 = L.xi_minus - L.xi_plus;
  if (d0 == 0.0) throw Error(Errc::domain_error, "line_base_frame: degenerate line");
  if (d0 > 0) return MoebiusElement::normalize(L.xi_minus, L.xi_plus, 1.0, 1.0);
  return MoebiusElement::normalize(L.xi_minus, -L.xi_plus, 1.0, -1.0);
}

inline MoebiusElement line_frame(const GeodesicLine& L, double t) {
  return line_base_frame(L) * MoebiusElement::a_flow(-t);
}

inline std::complex<double> line_point(const GeodesicLine& L, double t) {
  return line_base_frame(L).apply(std::complex<double>(0.0, std::exp(-t)));
}

// Arclength parameter of the point on L nearest to z (ternary search; the
// distance along a geodesic to an outside point is strictly convex).
inline double line_nearest_param(const GeodesicLine& L, std::complex<double> z,
                                 double lo = -60.0, double hi = 60.0) {
  for (int i = 0; i < 200; ++i) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (hyperbolic_distance(line_point(L, m1), z) <
        hyperbolic_distance(line_point(L, m2), z))
      hi = m2;
    else
      lo = m1;
  }
  return 0.5 * (lo + hi);
}

inline double line_distance(const GeodesicLine& L, std::complex<double> z) {
  return hyperbolic_distance(line_point(L, line_nearest_param(L, z)), z);
}

// Oriented geodesic through a unit tangent: forward endpoint first applied
// to 0 because the reference frame points down toward 0.
inline GeodesicLine line_through(const UnitTangent& v) {
  MoebiusElement g = frame_of(v);
  GeodesicLine L;
  L.xi_minus = g.apply_boundary(kInf);
  L.xi_plus = g.apply_boundary(0.0);
  return L;
}

}  // namespace horolab

#include "oracles.hpp"

#include "platewave/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace oracle {
namespace {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                       0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665,
                                         0.5688888888888889, 0.4786286704993665,
                                         0.2369268850561891};

double det6(double omega, double sl, double sr) {
  const double k = std::sqrt(omega);
  const double len = sr - sl;
  // plate basis cos, sin, cosh, sinh of k y, y = x - s_left; jets 0..3
  auto jet = [k](double y) {
    Eigen::Matrix<double, 4, 4> j;  // row: derivative, col: basis
    const double c = std::cos(k * y), s = std::sin(k * y);
    const double ch = std::cosh(k * y), sh = std::sinh(k * y);
    const double k2 = k * k, k3 = k2 * k;
    j << c, s, ch, sh,
        -k * s, k * c, k * sh, k * ch,
        -k2 * c, -k2 * s, k2 * ch, k2 * sh,
        k3 * s, -k3 * c, k3 * sh, k3 * ch;
    return j;
  };
  const auto j0 = jet(0.0);
  const auto j1 = jet(len);
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  // unknowns: plate c0..c3, A (left wave sin(omega x)), B (right wave sin(omega (1 - x)))
  m.block<1, 4>(0, 0) = j0.row(0);
  m(0, 4) = -std::sin(omega * sl);
  m.block<1, 4>(1, 0) = j0.row(1);
  m.block<1, 4>(2, 0) = j0.row(3);
  m(2, 4) = omega * std::cos(omega * sl);
  m.block<1, 4>(3, 0) = j1.row(0);
  m(3, 5) = -std::sin(omega * (1.0 - sr));
  m.block<1, 4>(4, 0) = j1.row(1);
  m.block<1, 4>(5, 0) = j1.row(3);
  m(5, 5) = -omega * std::cos(omega * (1.0 - sr));
  // keep the magnitude moderate for the sign scan
  for (int r = 0; r < 6; ++r) {
    m.row(r) /= m.row(r).cwiseAbs().maxCoeff();
  }
  return m.determinant();
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, int pieces) {
  const double w = (hi - lo) / pieces;
  double sum = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = lo + p * w;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      sum += 0.5 * w * kWeights[q] * f(a + 0.5 * w * (kNodes[q] + 1.0));
    }
  }
  return sum;
}

double hermite_shape(int i, int deriv, double x, double x0, double h) {
  // coefficients of t^0..t^3 for t = (x - x0) / h
  static const double coeffs[4][4] = {
      {1.0, 0.0, -3.0, 2.0}, {0.0, 1.0, -2.0, 1.0}, {0.0, 0.0, 3.0, -2.0}, {0.0, 0.0, -1.0, 1.0}};
  const double t = (x - x0) / h;
  double value = 0.0;
  for (int p = deriv; p < 4; ++p) {
    double falling = 1.0;
    for (int q = 0; q < deriv; ++q) {
      falling *= p - q;
    }
    value += coeffs[i][p] * falling * std::pow(t, p - deriv);
  }
  value /= std::pow(h, deriv);
  // slope functions carry a factor h
  return (i == 1 || i == 3) ? value * h : value;
}

Eigen::Matrix4d bending_by_quadrature(double h) {
  Eigen::Matrix4d k;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      k(i, j) = integrate(
          [&](double x) { return hermite_shape(i, 2, x, 0.0, h) * hermite_shape(j, 2, x, 0.0, h); },
          0.0, h, 4);
    }
  }
  return k;
}

Eigen::Matrix4d mass_by_quadrature(double h) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      m(i, j) = integrate(
          [&](double x) { return hermite_shape(i, 0, x, 0.0, h) * hermite_shape(j, 0, x, 0.0, h); },
          0.0, h, 4);
    }
  }
  return m;
}

std::vector<double> transmission_frequencies(double s_left, double s_right, int count) {
  std::vector<double> roots;
  const double step = 1e-3;
  double lo = step;
  double flo = det6(lo, s_left, s_right);
  while (static_cast<int>(roots.size()) < count && lo < 1e4) {
    const double hi = lo + step;
    const double fhi = det6(hi, s_left, s_right);
    if (flo == 0.0 || (flo < 0.0) != (fhi < 0.0)) {
      double a = lo, b = hi, fa = flo;
      for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = det6(m, s_left, s_right);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    lo = hi;
    flo = fhi;
  }
  return roots;
}

std::vector<Complex> generator_eigenvalues(const platewave::GeneratorPencil& p) {
  const RealMatrix g = p.e.inverse() * p.a;
  Eigen::EigenSolver<RealMatrix> es(g, false);
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

double resolvent_norm_explicit(const platewave::GeneratorPencil& p, double mu) {
  const platewave::Index n = p.n_free();
  const RealMatrix g = p.e.inverse() * p.a;
  const platewave::ComplexMatrix shifted =
      g.cast<Complex>() - Complex(0.0, mu) * platewave::ComplexMatrix::Identity(2 * n, 2 * n);
  const platewave::ComplexMatrix r = shifted.inverse();
  RealMatrix q = RealMatrix::Zero(2 * n, 2 * n);
  q.topLeftCorner(n, n) = p.stiffness;
  q.bottomRightCorner(n, n) = p.mass;
  const RealMatrix l = Eigen::LLT<RealMatrix>(q).matrixL();
  const RealMatrix l_inv = l.inverse();
  const platewave::ComplexMatrix c =
      l.transpose().cast<Complex>() * r * l_inv.transpose().cast<Complex>();
  Eigen::JacobiSVD<platewave::ComplexMatrix> svd(c);
  return svd.singularValues()(0);
}

double field_energy(const platewave::DiscreteSystem& sys, const RealVector& state) {
  const platewave::Index n = sys.n_free();
  const ComplexVector u = state.head(n).cast<Complex>();
  const ComplexVector v = state.tail(n).cast<Complex>();
  double e = 0.0;
  const auto& pn = sys.mesh.plate_nodes;
  for (std::size_t i = 0; i + 1 < pn.size(); ++i) {
    e += integrate(
        [&](double x) {
          const auto ju = platewave::eval_plate(sys, u, x);
          const auto jv = platewave::eval_plate(sys, v, x);
          return std::norm(ju.d2) + std::norm(jv.value);
        },
        pn[i], pn[i + 1], 1);
  }
  for (const auto* nodes : {&sys.mesh.wave_left_nodes, &sys.mesh.wave_right_nodes}) {
    for (std::size_t i = 0; i + 1 < nodes->size(); ++i) {
      e += integrate(
          [&](double x) {
            const auto ju = platewave::eval_wave(sys, u, x);
            const auto jv = platewave::eval_wave(sys, v, x);
            return std::norm(ju.d1) + std::norm(jv.value);
          },
          (*nodes)[i], (*nodes)[i + 1], 1);
    }
  }
  return 0.5 * e;
}

double field_damping_form(const platewave::DiscreteSystem& sys, const RealVector& v) {
  const ComplexVector vc = v.cast<Complex>();
  const auto& pn = sys.mesh.plate_nodes;
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < pn.size(); ++i) {
    d += integrate(
        [&](double x) {
          return platewave::eval_damping(sys.damping, x) *
                 std::norm(platewave::eval_plate(sys, vc, x).d2);
        },
        pn[i], pn[i + 1], 32);
  }
  return d;
}

double bracket_by_differences(const platewave::WeightFunction& phi, double c,
                              const platewave::Point2& x, const platewave::Point2& xi,
                              double step) {
  using platewave::Point2;
  auto sym = [&](const Point2& y, const Point2& eta) {
    const Point2 g = phi.gradient(y);
    Complex p(-c, 0.0);
    for (int j = 0; j < 2; ++j) {
      const Complex s(eta(j), g(j));
      p += s * s;
    }
    return p;
  };
  double total = 0.0;
  for (int j = 0; j < 2; ++j) {
    Point2 dx = Point2::Zero();
    dx(j) = step;
    const Complex px = (sym(x + dx, xi) - sym(x - dx, xi)) / (2.0 * step);
    const Complex pxi = (sym(x, xi + dx) - sym(x, xi - dx)) / (2.0 * step);
    total += pxi.real() * px.imag() - px.real() * pxi.imag();
  }
  return total;
}

double derivative(const std::function<double(double)>& f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace oracle

#pragma once

#include "platewave/geometry.hpp"
#include "platewave/numerics.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <stdexcept>

namespace platewave {

class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(const std::string& what, RealVector null_vector);
  const RealVector& null_vector() const { return null_vector_; }

 private:
  RealVector null_vector_;
};

/// Coefficients of the full (unconstrained) finite element spaces.
/// plate: Hermite cubic, (value, slope) per plate node.
/// wave_left / wave_right: P1 nodal values.
template <class Scalar>
struct FullDofs {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> plate;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> wave_left;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> wave_right;
};

/// Maps free unknowns to full DOFs. Encodes u1 = u2 at the interface (shared
/// value DOF), u1' = 0 at the interface (plate slope fixed) and u2 = 0 on the
/// outer boundary. Free unknowns are ordered left to right along the line.
struct ConstraintMap {
  static constexpr Index kFixed = -1;

  Index n_free = 0;
  std::vector<Index> plate;       // size 2 * (plate nodes)
  std::vector<Index> wave_left;   // size wave_left nodes
  std::vector<Index> wave_right;  // size wave_right nodes

  Index interface_left() const { return wave_left.back(); }
  Index interface_right() const { return wave_right.front(); }

  template <class Scalar>
  FullDofs<Scalar> expand(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& free) const {
    auto gather = [&](const std::vector<Index>& map) {
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(static_cast<Index>(map.size()));
      for (std::size_t i = 0; i < map.size(); ++i) {
        out(static_cast<Index>(i)) = map[i] == kFixed ? Scalar(0) : free(map[i]);
      }
      return out;
    };
    return {gather(plate), gather(wave_left), gather(wave_right)};
  }

  // Selection matrix from free unknowns to concatenated (plate, wave_left,
  // wave_right) full DOFs.
  RealMatrix matrix() const;
};

ConstraintMap make_constraints(const Mesh& mesh);

/// Constrained Galerkin matrices on free DOFs.
///   M: mass (plate L2 plus wave L2)
///   K: stiffness (plate bending int u'' phi'' plus wave int u' phi')
///   D: Kelvin-Voigt damping int a u'' phi'' from plate elements
using SparseMatrix = Eigen::SparseMatrix<double>;

struct DiscreteSystem {
  DomainPartition partition;
  DampingProfile damping;
  Mesh mesh;
  ConstraintMap constraints;
  RealMatrix mass;
  RealMatrix stiffness;
  RealMatrix damping_matrix;
  // Square-root factors K = G_K^T G_K and D = G_D^T G_D. Rows of G_K are
  // element curvatures and slopes, so U^T K U = |G_K U|^2 is evaluated
  // without the cancellation of the assembled quadratic form.
  SparseMatrix stiffness_strain;
  SparseMatrix damping_strain;

  Index n_free() const { return constraints.n_free; }
  Index state_size() const { return 2 * constraints.n_free; }
};

DiscreteSystem assemble(const DomainPartition& part, const DampingProfile& a,
                        const Mesh& mesh);

/// Element matrices, exposed for testing.
Eigen::Matrix4d hermite_bending_matrix(double h);
Eigen::Matrix4d hermite_mass_matrix(double h);
Eigen::Matrix4d hermite_damping_matrix(const DampingProfile& a, double x0, double h);
Eigen::Matrix2d hat_stiffness_matrix(double h);
Eigen::Matrix2d hat_mass_matrix(double h);

/// First-order pencil (E, A) on x = (U, V):
///   E = blockdiag(I, M),  A = [[0, I], [-K, -D]].
/// The generator is E^{-1} A.
struct GeneratorPencil {
  RealMatrix e;
  RealMatrix a;
  RealMatrix mass;
  RealMatrix stiffness;
  RealMatrix damping_matrix;
  SparseMatrix stiffness_strain;
  SparseMatrix damping_strain;
  Eigen::LLT<RealMatrix> mass_factor;

  Index n_free() const { return mass.rows(); }
  Index state_size() const { return 2 * mass.rows(); }
};

GeneratorPencil build_generator(const DiscreteSystem& sys);

/// Energy Gram Q = blockdiag(K, M); ||x||_Q^2 = U^T K U + V^T M V.
BlockGram energy_gram(const GeneratorPencil& pencil);

/// x -> E^{-1} A x, i.e. (V, M^{-1}(-K U - D V)).
RealVector apply_generator(const GeneratorPencil& pencil, const RealVector& x);
ComplexVector apply_generator(const GeneratorPencil& pencil, const ComplexVector& x);

double energy_inner(const GeneratorPencil& pencil, const RealVector& x,
                    const RealVector& y);

/// (sum_{j=0..k} ||A^j x||_Q^2)^{1/2}
double graph_norm(const GeneratorPencil& pencil, const RealVector& x, int k);

// Field evaluation from free coefficients.
struct FieldJet {
  Complex value{0.0, 0.0};
  Complex d1{0.0, 0.0};
  Complex d2{0.0, 0.0};
  Complex d3{0.0, 0.0};
};

FieldJet eval_plate(const DiscreteSystem& sys, const ComplexVector& free_u,
                    double x, bool from_right = true);
FieldJet eval_wave(const DiscreteSystem& sys, const ComplexVector& free_u,
                   double x, bool from_right = true);

/// Load vector b_i = int f phi_i over plate and wave regions using Gauss
/// quadrature on every element (split at damping breakpoints).
ComplexVector load_vector(const DiscreteSystem& sys,
                          const std::function<Complex(double)>& plate_density,
                          const std::function<Complex(double)>& wave_density,
                          int gauss_points = 8);

/// Interface force balance residual u1''' + u2' at both interface points
/// computed from element-end traces of a displacement field.
std::array<Complex, 2> interface_flux_jump(const DiscreteSystem& sys,
                                           const ComplexVector& free_u);

}  // namespace platewave

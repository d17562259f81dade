#pragma once

// Single-atom level schemes and the two-atom composition.
//
// 5-level atom (two-photon excitation through an intermediate |p>):
//   basis {|0>, |g>, |1>, |p>, |r>} = indices 0..4.
//   |0>,|1> qubit states split by omega10; |g> reservoir; |p> intermediate
//   (detuning deltaP, decay gammaP with branching to |0>,|g>,|1>);
//   |r> Rydberg (detuning deltaR, decay gammaR into |p>, pure Rydberg
//   dephasing gammaPh so 1-r coherences relax at gamma1r = gammaR + gammaPh;
//   qubit dephasing gamma01).
//
// 6-level atom (intrinsic Rydberg-structure model, single-photon abstraction):
//   basis {|0>, |g>, |1>, |r2>, |r1>, |r>} = indices 0..5.
//   |r> target Rydberg level; |r1>, |r2> neighbouring Rydberg levels below it
//   by omegaRR1, omegaRR2; all three driven from |1> (and off-resonantly from
//   |0>) with couplings rabi = {Omega, Omega', Omega''}; uniform Rydberg decay
//   gammaR with branching groundBranching to {|0>, |g>, |1>}.
//
// Lindblad structure: every model used here is "damping + feeds":
//   L(rho)_ij = -damp(i,j) rho_ij  +  sum_feeds delta_ij [dst] w rho_srcsrc,
// which the two-atom lift preserves. Both the dense superoperator (for expm)
// and the structured form (for the RK4 integrator) are derived from the same
// objects.

#include <tuple>
#include <vector>

#include "rydsim/types.hpp"

namespace rydsim {

/// Parameters of the 5-level scheme; all angular frequencies/rates in rad/s.
struct AtomScheme5 {
  double omega10 = 0;        ///< qubit splitting (|0> sits at -omega10)
  cplx omegaR{0, 0};         ///< lower-leg Rabi coupling (|0>,|1>) <-> |p>
  cplx omegaB{0, 0};         ///< upper-leg Rabi coupling |p> <-> |r>
  double deltaP = 0;         ///< intermediate-state detuning
  double deltaR = 0;         ///< two-photon (Rydberg) detuning
  double gammaP = 0;         ///< |p> decay rate
  double gammaR = 0;         ///< |r> decay rate (into |p>)
  double gammaPh = 0;        ///< pure |r> dephasing; gamma1r = gammaR + gammaPh
  double gamma01 = 0;        ///< qubit coherence dephasing rate
  /// |p> branching to {|0>, |g>, |1>}; sums to 1.
  std::array<double, 3> branching{0.12, 0.56, 0.32};

  void validate() const;  ///< throws std::invalid_argument on bad parameters
};

/// Parameters of the 6-level scheme; all angular frequencies/rates in rad/s.
struct AtomScheme6 {
  double omega10 = 0;           ///< qubit splitting
  std::array<cplx, 3> rabi{};   ///< couplings to {|r>, |r1>, |r2>}
  double omegaRR1 = 0;          ///< level gap between |r> and |r1|
  double omegaRR2 = 0;          ///< level gap between |r> and |r2|
  double gammaR = 0;            ///< common Rydberg decay rate
  /// Rydberg branching to {|0>, |g>, |1>}; sums to 1.
  std::array<double, 3> groundBranching{1.0 / 8, 3.0 / 4, 1.0 / 8};

  void validate() const;
};

/// Pairwise Rydberg-Rydberg interaction shifts (rad/s).
/// For the 5-level model this is 1x1 (single |rr> shift). For the 6-level
/// model it is 3x3 over the Rydberg sub-basis in *basis order* {r2, r1, r}:
/// shifts(i, j) is the diagonal shift of |ryd_i>_c |ryd_j>_t.
struct BlockadeSpec {
  RMatrix shifts;

  static BlockadeSpec scalar(double b);
  static BlockadeSpec matrix3(const RMatrix& m);
  bool isScalar() const { return shifts.rows() == 1; }
  double rr() const { return shifts(shifts.rows() - 1, shifts.cols() - 1); }
};

/// Structured one-atom generator: H = diag(hdiag) + couplings (+ h.c.),
/// L(rho)_ij = -damp(i,j) rho_ij + feeds.
struct SingleAtomGenerator {
  int n = 0;
  RVector hdiag;
  std::vector<std::tuple<int, int, cplx>> couplings;  ///< H(i,j) = c for i<j
  RMatrix damp;
  std::vector<std::tuple<int, int, double>> feeds;    ///< (dst, src, rate)
};

/// Structured two-atom generator (control (x) target, index = c*n + t).
struct TwoAtomGenerator {
  int n = 0;                 ///< single-atom dimension (5 or 6)
  SingleAtomGenerator ctrl, tgt;
  RMatrix bshift;            ///< n x n pair shift for |i>_c |j>_t (zero off the Rydberg block)

  int dim() const { return n * n; }
  CMatrix hamiltonian() const;       ///< dense N x N, N = n^2
  CMatrix lindblad_superop() const;  ///< dense N^2 x N^2 (column stacking)
  CMatrix liouvillian() const;       ///< G = -i(I kron H - H^T kron I) + L
  /// drho/dt evaluated in matrix form (used by the RK4 integrator);
  /// out must be N x N and is overwritten.
  void apply_rhs(const CMatrix& rho, CMatrix& out, CMatrix& scratch) const;
  /// Largest |H| entry / 2pi and largest damping rate (for step control).
  double max_frequency_hz() const;
};

/// Structured generators for the single-atom schemes.
SingleAtomGenerator structured_h5(const AtomScheme5& s);
SingleAtomGenerator structured_h6(const AtomScheme6& s);

/// Dense single-atom Hamiltonians (5x5 / 6x6) and Lindblad superoperators
/// (25x25 / 36x36, column stacking).
CMatrix build_h5(const AtomScheme5& s);
CMatrix build_l5_superop(const AtomScheme5& s);
CMatrix build_h6(const AtomScheme6& s);
CMatrix build_l6_superop(const AtomScheme6& s);

/// Compose two single-atom generators and a blockade into the two-atom
/// generator. The blockade spec must be 1x1 for n = 5 and 3x3 for n = 6.
TwoAtomGenerator compose_two_atom(const SingleAtomGenerator& c,
                                  const SingleAtomGenerator& t,
                                  const BlockadeSpec& b);

/// Dense composition from dense pieces (reference path used by tests):
/// Hct = hc kron I + I kron ht + diag(b), Lct = lift(lc) + lift(lt).
std::pair<CMatrix, CMatrix> compose_two_atom_dense(const CMatrix& hc,
                                                   const CMatrix& ht,
                                                   const CMatrix& lc,
                                                   const CMatrix& lt,
                                                   const BlockadeSpec& b);

/// Lift an n^2 x n^2 single-atom superoperator to the (n^2)^2-dimensional
/// two-atom space; which = 0 acts on the control factor, 1 on the target.
CMatrix lift_superop(const CMatrix& ls, int n, int which);

/// Full-space indices of the computational states |00>, |01>, |10>, |11>.
std::array<int, 4> computational_indices(int n);

} // namespace rydsim

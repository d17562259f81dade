#pragma once

// Dense linear-algebra kernels shared by the whole library.
//
// Vectorization convention: column stacking, vec(X)(j*n + i) = X(i, j), so
// that vec(A X B) = (B^T kron A) vec(X). All superoperators in the library
// follow this convention.

#include <array>
#include <utility>

#include "rydsim/types.hpp"

namespace rydsim::qmath {

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Matrix exponential by scaling-and-squaring with a degree-13 Pade core.
/// The input is scaled by 2^-s with s chosen so the scaled 1-norm is <= 0.5,
/// then squared s times. Accurate to close to machine precision for the
/// (generator * time) matrices that occur here.
CMatrix expm(const CMatrix& m);

/// Number of expm() evaluations since process start (cache instrumentation).
long expm_call_count();

/// Principal square root of a Hermitian positive-semidefinite matrix via its
/// spectral decomposition. Mildly negative eigenvalues (> -1e-6 relative to
/// the largest magnitude eigenvalue, with an absolute floor) are clamped to
/// zero; anything more negative throws std::domain_error("not PSD").
CMatrix sqrtm_psd(const CMatrix& m);

/// Half the trace norm (sum of singular values) of an arbitrary matrix.
/// Singular values are obtained as the square roots of the clamped
/// eigenvalues of A^dagger A.
double trace_norm_half(const CMatrix& a);

/// Extract the two-qubit computational block of a two-atom density matrix.
/// basisMap lists the full-space indices of |00>, |01>, |10>, |11>.
/// Returns the unnormalized 4x4 block and the trace loss 1 - Tr[rho4].
std::pair<CMatrix, double> project_computational(const CMatrix& rhoFull,
                                                 const std::array<int, 4>& basisMap);

/// True if max_ij |m - m^dagger|_ij <= tol.
bool is_hermitian(const CMatrix& m, double tol = 1e-12);

/// Smallest eigenvalue of (m + m^dagger)/2.
double min_eigenvalue_hermitian(const CMatrix& m);

/// vec index of entry (i, j) of an n x n matrix under column stacking.
inline int vec_index(int i, int j, int n) { return j * n + i; }

} // namespace rydsim::qmath

#pragma once

#include <cstddef>

namespace vecsim::kernels {

// Row-major dense products used by the Q-network. Every routine accumulates
// into C (callers zero or pre-fill it).
//
//   gemm_nn: C[m x n] += A[m x k] * B[k x n]
//   gemm_tn: C[k x n] += A[m x k]^T * B[m x n]
//
// The tiled versions split rows of C across OpenMP threads and keep the
// summation order of each entry fixed, so results do not depend on the
// thread count.
void gemm_nn(const double* a, const double* b, double* c, int m, int k, int n);
void gemm_tn(const double* a, const double* b, double* c, int m, int k, int n);

// Straightforward loops kept as the reference for tests and benchmarks.
void gemm_nn_ref(const double* a, const double* b, double* c, int m, int k, int n);
void gemm_tn_ref(const double* a, const double* b, double* c, int m, int k, int n);

// y[i][j] = bias[j] for every row.
void broadcast_rows(const double* bias, double* y, int m, int n);
void relu_inplace(double* y, std::size_t count);
// dy *= (y > 0), elementwise.
void relu_mask(const double* y, double* dy, std::size_t count);
// col[j] += sum_i a[i][j].
void column_sums(const double* a, double* col, int m, int n);
// out[n x m] = in[m x n]^T.
void transpose(const double* in, double* out, int m, int n);

} // namespace vecsim::kernels

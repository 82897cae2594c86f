#include "vecsim/kernels.hpp"

#include <algorithm>

namespace vecsim::kernels {

namespace {

constexpr int kMr = 4;  // rows of C per register tile
constexpr int kNr = 32; // columns of C per register tile
constexpr long kParallelWork = 1L << 16;

// C[r0..r0+kMr) x [j0..j0+kNr) tile for gemm_nn.
inline void tile_nn(const double* a, const double* b, double* c, int r0, int j0, int k, int n) {
  double acc[kMr][kNr];
  for (int r = 0; r < kMr; ++r) {
#pragma omp simd
    for (int j = 0; j < kNr; ++j) acc[r][j] = c[(std::size_t)(r0 + r) * n + j0 + j];
  }
  const double* a0 = a + (std::size_t)r0 * k;
  for (int p = 0; p < k; ++p) {
    const double* brow = b + (std::size_t)p * n + j0;
    for (int r = 0; r < kMr; ++r) {
      const double av = a0[(std::size_t)r * k + p];
#pragma omp simd
      for (int j = 0; j < kNr; ++j) acc[r][j] += av * brow[j];
    }
  }
  for (int r = 0; r < kMr; ++r) {
#pragma omp simd
    for (int j = 0; j < kNr; ++j) c[(std::size_t)(r0 + r) * n + j0 + j] = acc[r][j];
  }
}

// Generic edge block for gemm_nn: rows [r0, r1), columns [j0, j1).
inline void edge_nn(const double* a, const double* b, double* c, int r0, int r1, int j0, int j1,
                    int k, int n) {
  for (int r = r0; r < r1; ++r) {
    double* crow = c + (std::size_t)r * n;
    for (int p = 0; p < k; ++p) {
      const double av = a[(std::size_t)r * k + p];
      const double* brow = b + (std::size_t)p * n;
      for (int j = j0; j < j1; ++j) crow[j] += av * brow[j];
    }
  }
}

// C[p0..p0+kMr) x [j0..j0+kNr) tile for gemm_tn, summing over the m rows.
inline void tile_tn(const double* a, const double* b, double* c, int p0, int j0, int m, int k,
                    int n) {
  double acc[kMr][kNr];
  for (int r = 0; r < kMr; ++r) {
#pragma omp simd
    for (int j = 0; j < kNr; ++j) acc[r][j] = c[(std::size_t)(p0 + r) * n + j0 + j];
  }
  for (int i = 0; i < m; ++i) {
    const double* arow = a + (std::size_t)i * k + p0;
    const double* brow = b + (std::size_t)i * n + j0;
    for (int r = 0; r < kMr; ++r) {
      const double av = arow[r];
#pragma omp simd
      for (int j = 0; j < kNr; ++j) acc[r][j] += av * brow[j];
    }
  }
  for (int r = 0; r < kMr; ++r) {
#pragma omp simd
    for (int j = 0; j < kNr; ++j) c[(std::size_t)(p0 + r) * n + j0 + j] = acc[r][j];
  }
}

inline void edge_tn(const double* a, const double* b, double* c, int p0, int p1, int j0, int j1,
                    int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    const double* brow = b + (std::size_t)i * n;
    for (int p = p0; p < p1; ++p) {
      const double av = a[(std::size_t)i * k + p];
      double* crow = c + (std::size_t)p * n;
      for (int j = j0; j < j1; ++j) crow[j] += av * brow[j];
    }
  }
}

} // namespace

void gemm_nn(const double* a, const double* b, double* c, int m, int k, int n) {
  const int row_blocks = (m + kMr - 1) / kMr;
  const int full_cols = n - n % kNr;
  const long work = static_cast<long>(m) * k * n;
#pragma omp parallel if (work > kParallelWork)
  {
    // Column panels outermost so each k x kNr panel of B stays cache-resident
    // while a thread sweeps its rows.
    for (int j0 = 0; j0 < full_cols; j0 += kNr) {
#pragma omp for schedule(static) nowait
      for (int rb = 0; rb < row_blocks; ++rb) {
        const int r0 = rb * kMr;
        const int r1 = std::min(m, r0 + kMr);
        if (r1 - r0 == kMr) {
          tile_nn(a, b, c, r0, j0, k, n);
        } else {
          edge_nn(a, b, c, r0, r1, j0, j0 + kNr, k, n);
        }
      }
    }
    if (full_cols < n) {
#pragma omp for schedule(static)
      for (int rb = 0; rb < row_blocks; ++rb) {
        const int r0 = rb * kMr;
        edge_nn(a, b, c, r0, std::min(m, r0 + kMr), full_cols, n, k, n);
      }
    }
  }
}

void gemm_tn(const double* a, const double* b, double* c, int m, int k, int n) {
  const int row_blocks = (k + kMr - 1) / kMr;
  const int full_cols = n - n % kNr;
  const long work = static_cast<long>(m) * k * n;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
  for (int pb = 0; pb < row_blocks; ++pb) {
    const int p0 = pb * kMr;
    const int p1 = std::min(k, p0 + kMr);
    if (p1 - p0 == kMr) {
      for (int j0 = 0; j0 < full_cols; j0 += kNr) tile_tn(a, b, c, p0, j0, m, k, n);
    } else {
      edge_tn(a, b, c, p0, p1, 0, full_cols, m, k, n);
    }
    if (full_cols < n) edge_tn(a, b, c, p0, p1, full_cols, n, m, k, n);
  }
}

void gemm_nn_ref(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      for (int j = 0; j < n; ++j) {
        c[(std::size_t)i * n + j] += a[(std::size_t)i * k + p] * b[(std::size_t)p * n + j];
      }
    }
  }
}

void gemm_tn_ref(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      for (int j = 0; j < n; ++j) {
        c[(std::size_t)p * n + j] += a[(std::size_t)i * k + p] * b[(std::size_t)i * n + j];
      }
    }
  }
}

void broadcast_rows(const double* bias, double* y, int m, int n) {
  for (int i = 0; i < m; ++i) std::copy(bias, bias + n, y + (std::size_t)i * n);
}

void relu_inplace(double* y, std::size_t count) {
#pragma omp simd
  for (std::size_t i = 0; i < count; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
}

void relu_mask(const double* y, double* dy, std::size_t count) {
#pragma omp simd
  for (std::size_t i = 0; i < count; ++i) dy[i] = y[i] > 0.0 ? dy[i] : 0.0;
}

void column_sums(const double* a, double* col, int m, int n) {
  for (int i = 0; i < m; ++i) {
    const double* row = a + (std::size_t)i * n;
#pragma omp simd
    for (int j = 0; j < n; ++j) col[j] += row[j];
  }
}

void transpose(const double* in, double* out, int m, int n) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) out[(std::size_t)j * m + i] = in[(std::size_t)i * n + j];
  }
}

} // namespace vecsim::kernels

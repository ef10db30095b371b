#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "lazysdp/errors.hpp"

namespace lazysdp {

using Vector = std::vector<double>;

// Operation tallies, accumulated per thread. Deterministic for a fixed input
// since every kernel is sequential and deterministic.
struct OpCounters {
    std::uint64_t matmul_flops = 0;   // 2*a*b*c per dense product
    std::uint64_t eig_calls = 0;
    std::uint64_t lu_factorizations = 0;
    std::uint64_t kron_entries = 0;

    OpCounters operator-(const OpCounters& o) const {
        return {matmul_flops - o.matmul_flops, eig_calls - o.eig_calls,
                lu_factorizations - o.lu_factorizations, kron_entries - o.kron_entries};
    }
};

OpCounters& op_counters();
void reset_op_counters();

// Dense real matrix, column-major: entry (i, j) lives at data[j*rows + i].
// Column-major makes vec() a straight copy of the storage.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    static Matrix identity(int n);

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(j) * rows + i]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(j) * rows + i]; }

    bool empty() const { return rows == 0 || cols == 0; }
    bool all_finite() const;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// C-style concatenation of blocks side by side; all blocks share a row count.
Matrix hcat(std::initializer_list<const Matrix*> blocks);

Vector mat_vec(const Matrix& a, const Vector& x);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

// Column stacking: vec(M)[(j-1)*rows + i] = M(i, j) (1-based in the formula).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int rows, int cols);

// Kronecker product, block (i, j) of the result equals A(i,j) * B.
Matrix kron(const Matrix& a, const Matrix& b);

// Dense symmetric matrix. Construction is checked or explicitly symmetrized;
// after that the full n x n storage is kept numerically symmetric.
struct SymMatrix {
    Matrix m;

    int dim() const { return m.rows; }
    double operator()(int i, int j) const { return m(i, j); }

    static SymMatrix identity(int n);
    static SymMatrix zero(int n);
    // Accepts m only if max_ij |M_ij - M_ji| <= tol_scale * max(1, ||M||_F).
    static SymMatrix require(Matrix m, double tol_scale = 1e-12);
    // (M + M^T)/2; used after every update that is symmetric in exact arithmetic.
    static SymMatrix symmetrized(Matrix m);
};

double symmetry_defect(const Matrix& m);

// Eigendecomposition of a symmetric matrix: M = U diag(lambda) U^T.
// Eigenvalues ascending, eigenvectors in the columns of U.
struct SpectralDecomp {
    Matrix U;
    Vector lambda;
};

// Householder tridiagonalization followed by implicit-shift QL.
// Throws EigenFailure if an eigenvalue fails to deflate in 50 sweeps.
SpectralDecomp sym_eig(const SymMatrix& m);

// U diag(f(lambda)) U^T, symmetrized.
template <typename F>
SymMatrix spectral_map(const SpectralDecomp& d, F f) {
    const int n = d.U.rows;
    Matrix scaled(n, n);
    for (int j = 0; j < n; ++j) {
        const double fj = f(d.lambda[j]);
        for (int i = 0; i < n; ++i) scaled(i, j) = d.U(i, j) * fj;
    }
    return SymMatrix::symmetrized(scaled * transpose(d.U));
}

// Principal square root / inverse square root of an SPD matrix.
// Throws NotPositiveDefinite (carrying lambda_min) when lambda_min <= 0.
SymMatrix psd_sqrt(const SymMatrix& m);
SymMatrix psd_inv_sqrt(const SymMatrix& m);

// One eigendecomposition of an SPD matrix, with the roots and inverse all
// derived from it. The solver uses all four every iteration.
struct PdRoots {
    SymMatrix sqrt;
    SymMatrix inv_sqrt;
    SymMatrix inv;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};
PdRoots pd_roots(const SymMatrix& m, const char* where);

// Partially pivoted LU of a square matrix.
struct LuFactor {
    Matrix lu;
    std::vector<int> pivots;
    bool singular = false;

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;
    Matrix inverse() const;
};
LuFactor lu_factor(const Matrix& a);

double norm1(const Matrix& a);

// Inverse via pivoted LU. Reports kappa_1 = ||A||_1 * ||A^-1||_1 through
// cond_out when given; infinite condition estimate means a zero pivot.
Matrix lu_inverse(const Matrix& a, double* cond_out = nullptr);

// (M + U C V)^-1 = Minv - Minv U (C^-1 + V Minv U)^-1 V Minv.
// Throws SingularUpdate when the inner k x k system has kappa_1 > 1e14.
Matrix woodbury_update(const Matrix& minv, const Matrix& u, const Matrix& cmat, const Matrix& v);

// sum_ij (S_inv)_ij A_ij, which equals tr[S^-1 A] for symmetric arguments.
double trace_product(const SymMatrix& s_inv, const SymMatrix& a);

// Schatten 1-norm (sum of |eigenvalues|) of a symmetric matrix.
double schatten1_norm(const SymMatrix& a);
double spectral_norm_sym(const SymMatrix& a);

}  // namespace lazysdp

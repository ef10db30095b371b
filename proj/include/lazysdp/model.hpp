#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lazysdp/linalg.hpp"

namespace lazysdp {

// A dense SDP instance: maximize <C, X> s.t. <A_i, X> = b_i, X PSD.
struct SdpInstance {
    int n = 0;                 // matrix dimension
    int m = 0;                 // constraint count
    SymMatrix C;               // n x n objective
    std::vector<SymMatrix> A;  // m constraint matrices, n x n each
    Vector b;                  // length m
};

// The m x n^2 matrix whose row i is vec(A_i)^T.
struct StackedConstraints {
    Matrix A;  // m x n^2

    int rows() const { return A.rows; }
    int cols() const { return A.cols; }
};

// A primal/dual answer with the residuals the solver recorded for it.
struct Solution {
    SymMatrix X;
    Vector y;
    double objective = 0.0;        // <C, X> for the instance the solution belongs to
    double duality_gap = 0.0;      // b^T y - <C, X> as recorded when the solve stopped
    double primal_residual = 0.0;  // sum_i |<A_i, X> - b_i|
    double psd_violation = 0.0;    // max(0, -lambda_min(X))
};

// SDPA-sparse subset: a single dense PSD block. See README for the grammar.
SdpInstance parse_sdpa(std::istream& in);
SdpInstance parse_sdpa_file(const std::string& path);
std::string emit_sdpa(const SdpInstance& inst);

StackedConstraints stack_constraints(const SdpInstance& inst);

double matrix_inner(const SymMatrix& a, const SymMatrix& b);

// Report-only validation: symmetry defects, stacked-constraint rank
// deficiency, dimension mismatches.
struct ValidationReport {
    bool dimensions_ok = true;
    bool symmetry_ok = true;
    bool full_row_rank = true;
    int rank = 0;
    std::vector<std::string> findings;

    bool clean() const { return dimensions_ok && symmetry_ok && full_row_rank; }
};
ValidationReport validate(const SdpInstance& inst);

}  // namespace lazysdp

#include "lazysdp/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

namespace lazysdp {

namespace {

bool is_comment_or_blank(const std::string& line) {
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '"' || c == '*';
    }
    return true;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

long parse_int(const std::string& tok, int line_no, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (...) {
        throw ParseError(line_no, std::string("expected integer for ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size())
        throw ParseError(line_no, std::string("trailing characters in ") + what + " '" + tok + "'");
    return v;
}

double parse_real(const std::string& tok, int line_no, const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (...) {
        throw ParseError(line_no, std::string("expected number for ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size())
        throw ParseError(line_no, std::string("trailing characters in ") + what + " '" + tok + "'");
    if (!std::isfinite(v)) throw ParseError(line_no, std::string(what) + " is not finite");
    return v;
}

// Reads the next data line (skipping comments/blanks); false at EOF.
bool next_data_line(std::istream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!is_comment_or_blank(line)) return true;
    }
    return false;
}

}  // namespace

SdpInstance parse_sdpa(std::istream& in) {
    std::string line;
    int line_no = 0;

    auto demand_line = [&](const char* what) {
        if (!next_data_line(in, line, line_no))
            throw ParseError(line_no + 1, std::string("unexpected end of input, expected ") + what);
    };

    demand_line("constraint count m");
    auto toks = tokenize(line);
    if (toks.size() != 1) throw ParseError(line_no, "header line must hold a single integer (m)");
    const long m = parse_int(toks[0], line_no, "m");
    if (m < 1) throw ParseError(line_no, "constraint count m must be >= 1");

    demand_line("block count");
    toks = tokenize(line);
    if (toks.size() != 1) throw ParseError(line_no, "header line must hold a single integer (nblocks)");
    const long nblocks = parse_int(toks[0], line_no, "nblocks");
    if (nblocks != 1)
        throw ParseError(line_no, "only single-block instances are supported, got nblocks = " +
                                      std::to_string(nblocks));

    demand_line("block size n");
    toks = tokenize(line);
    if (toks.size() != 1) throw ParseError(line_no, "header line must hold a single integer (n)");
    const long n = parse_int(toks[0], line_no, "n");
    if (n < 1) throw ParseError(line_no, "block size n must be >= 1 (LP diagonal blocks unsupported)");

    demand_line("right-hand side b");
    toks = tokenize(line);
    if (static_cast<long>(toks.size()) != m)
        throw ParseError(line_no, "expected " + std::to_string(m) + " values of b, got " +
                                      std::to_string(toks.size()));
    Vector b(m);
    for (long i = 0; i < m; ++i) b[i] = parse_real(toks[i], line_no, "b entry");

    std::vector<Matrix> mats(m + 1, Matrix(static_cast<int>(n), static_cast<int>(n)));
    std::unordered_set<long long> seen;

    while (next_data_line(in, line, line_no)) {
        toks = tokenize(line);
        if (toks.size() != 5)
            throw ParseError(line_no, "entry line must be 'matno blockno i j value', got " +
                                          std::to_string(toks.size()) + " tokens");
        const long matno = parse_int(toks[0], line_no, "matno");
        const long blockno = parse_int(toks[1], line_no, "blockno");
        const long i = parse_int(toks[2], line_no, "row index");
        const long j = parse_int(toks[3], line_no, "column index");
        const double value = parse_real(toks[4], line_no, "value");

        if (matno < 0 || matno > m)
            throw ParseError(line_no, "matno " + std::to_string(matno) + " out of range [0, " +
                                          std::to_string(m) + "]");
        if (blockno != 1) throw ParseError(line_no, "blockno must be 1 in single-block files");
        if (i < 1 || j < 1 || i > n || j > n)
            throw ParseError(line_no, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                          ") out of range for block size " + std::to_string(n));
        if (i > j)
            throw ParseError(line_no, "entries must be given in the upper triangle (i <= j), got i = " +
                                          std::to_string(i) + " > j = " + std::to_string(j));
        const long long key = (matno * n + (i - 1)) * n + (j - 1);
        if (!seen.insert(key).second)
            throw ParseError(line_no, "duplicate entry for (matno, i, j) = (" + std::to_string(matno) +
                                          ", " + std::to_string(i) + ", " + std::to_string(j) + ")");
        Matrix& target = mats[matno];
        target(static_cast<int>(i) - 1, static_cast<int>(j) - 1) = value;
        target(static_cast<int>(j) - 1, static_cast<int>(i) - 1) = value;
    }

    SdpInstance inst;
    inst.n = static_cast<int>(n);
    inst.m = static_cast<int>(m);
    inst.b = std::move(b);
    inst.C = SymMatrix::require(std::move(mats[0]));
    inst.A.reserve(m);
    for (long k = 1; k <= m; ++k) inst.A.push_back(SymMatrix::require(std::move(mats[k])));
    return inst;
}

SdpInstance parse_sdpa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open file '" + path + "'");
    return parse_sdpa(in);
}

namespace {
void emit_matrix_entries(std::string& out, const SymMatrix& mat, int matno) {
    char buf[64];
    const int n = mat.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = mat(i, j);
            if (v == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%d 1 %d %d %.17g\n", matno, i + 1, j + 1, v);
            out += buf;
        }
}
}  // namespace

std::string emit_sdpa(const SdpInstance& inst) {
    std::string out;
    char buf[64];
    out += std::to_string(inst.m) + "\n1\n" + std::to_string(inst.n) + "\n";
    for (int i = 0; i < inst.m; ++i) {
        std::snprintf(buf, sizeof(buf), i + 1 < inst.m ? "%.17g " : "%.17g\n", inst.b[i]);
        out += buf;
    }
    emit_matrix_entries(out, inst.C, 0);
    for (int k = 0; k < inst.m; ++k) emit_matrix_entries(out, inst.A[k], k + 1);
    return out;
}

StackedConstraints stack_constraints(const SdpInstance& inst) {
    Matrix a(inst.m, inst.n * inst.n);
    for (int i = 0; i < inst.m; ++i) {
        const Vector v = vec(inst.A[i].m);
        for (int j = 0; j < inst.n * inst.n; ++j) a(i, j) = v[j];
    }
    return StackedConstraints{std::move(a)};
}

double matrix_inner(const SymMatrix& a, const SymMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.m.data.size(); ++i) s += a.m.data[i] * b.m.data[i];
    return s;
}

ValidationReport validate(const SdpInstance& inst) {
    ValidationReport rep;

    if (inst.C.dim() != inst.n) {
        rep.dimensions_ok = false;
        rep.findings.push_back("objective matrix dimension does not match n");
    }
    if (static_cast<int>(inst.A.size()) != inst.m || static_cast<int>(inst.b.size()) != inst.m) {
        rep.dimensions_ok = false;
        rep.findings.push_back("constraint list / right-hand side length does not match m");
    }
    for (std::size_t k = 0; k < inst.A.size(); ++k)
        if (inst.A[k].dim() != inst.n) {
            rep.dimensions_ok = false;
            rep.findings.push_back("constraint matrix " + std::to_string(k + 1) +
                                   " dimension does not match n");
        }
    if (!rep.dimensions_ok) return rep;

    auto check_symmetry = [&](const SymMatrix& mat, const std::string& name) {
        const double defect = symmetry_defect(mat.m);
        const double scale = std::max(1.0, frobenius_norm(mat.m));
        if (defect > 1e-9 * scale) {
            rep.symmetry_ok = false;
            rep.findings.push_back(name + " has symmetry defect " + std::to_string(defect));
        }
    };
    check_symmetry(inst.C, "C");
    for (int k = 0; k < inst.m; ++k) check_symmetry(inst.A[k], "A_" + std::to_string(k + 1));

    // Numerical row rank of the stacked constraints by full-pivot elimination.
    Matrix a = stack_constraints(inst).A;
    const double tol = 1e-10 * std::max(1.0, max_abs(a));
    int rank = 0;
    std::vector<bool> used_row(inst.m, false);
    for (int step = 0; step < inst.m; ++step) {
        int pr = -1, pc = -1;
        double best = tol;
        for (int i = 0; i < a.rows; ++i) {
            if (used_row[i]) continue;
            for (int j = 0; j < a.cols; ++j)
                if (std::fabs(a(i, j)) > best) {
                    best = std::fabs(a(i, j));
                    pr = i;
                    pc = j;
                }
        }
        if (pr < 0) break;
        ++rank;
        used_row[pr] = true;
        for (int i = 0; i < a.rows; ++i) {
            if (used_row[i] || a(i, pc) == 0.0) continue;
            const double f = a(i, pc) / a(pr, pc);
            for (int j = 0; j < a.cols; ++j) a(i, j) -= f * a(pr, j);
        }
    }
    rep.rank = rank;
    if (rank < inst.m) {
        rep.full_row_rank = false;
        rep.findings.push_back("stacked constraint matrix is rank deficient: rank " +
                               std::to_string(rank) + " < m = " + std::to_string(inst.m));
    }
    return rep;
}

}  // namespace lazysdp

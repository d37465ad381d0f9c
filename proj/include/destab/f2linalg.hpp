#ifndef DESTAB_F2LINALG_HPP
#define DESTAB_F2LINALG_HPP

#include <string>
#include <utility>
#include <vector>

#include "destab/errors.hpp"
#include "destab/kernels.hpp"

namespace destab::f2 {

/* Dense GF(2) matrix with rows packed into 64-bit words (bit j%64 of word j/64 is
   column j). Vectors are 1-row matrices. Maps use the row convention y = x * A:
   the matrix of a linear map lists the images of the source basis vectors as rows,
   and composition reads left to right, (x*A)*B = x*(A*B). */
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(int rows, int cols);
    static F2Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return wpr_; }

    bool get(int i, int j) const;
    void set(int i, int j, bool v);

    Word* row(int i) { return a_.data() + static_cast<std::size_t>(i) * wpr_; }
    const Word* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * wpr_; }

    void xor_row(int dst, int src);                                   // row[dst] ^= row[src]
    void xor_row_from(int dst, const F2Matrix& other, int src);
    bool row_is_zero(int i) const;
    void swap_rows(int i, int j);

    F2Matrix row_copy(int i) const;                                   // 1 x cols
    void set_row(int i, const F2Matrix& v, int src_row = 0);

    F2Matrix mul(const F2Matrix& rhs) const;                          // (m x n)*(n x p)
    F2Matrix transpose() const;
    F2Matrix vstack(const F2Matrix& below) const;
    F2Matrix hstack(const F2Matrix& right) const;
    F2Matrix select_rows(const std::vector<int>& idx) const;
    F2Matrix cols_range(int begin, int end) const;                    // columns [begin, end)

    bool is_zero() const;
    bool operator==(const F2Matrix& o) const;
    bool operator!=(const F2Matrix& o) const { return !(*this == o); }

    std::string str() const;                                          // '1'/'.' grid, for tests

private:
    int rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<Word> a_;
};

struct Rref {
    F2Matrix m;                 // fully reduced; nonzero rows first
    std::vector<int> pivots;    // pivot column of row r, ascending, size = rank
    int rank = 0;
};
Rref rref(F2Matrix a);

/* A subspace of F2^n held as its canonical reduced-row-echelon basis. */
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(int ambient);                    // zero subspace
    static Subspace from_rows(const F2Matrix& gens);
    static Subspace full(int ambient);

    int ambient() const { return ambient_; }
    int dim() const { return basis_.rows(); }
    const F2Matrix& basis() const { return basis_; }
    const std::vector<int>& pivots() const { return pivots_; }

    F2Matrix reduce(F2Matrix v) const;                 // v mod this (kills pivot bits)
    bool contains(const F2Matrix& v) const;            // v: 1 x ambient
    bool contains_rows(const F2Matrix& vs) const;
    bool contains_space(const Subspace& other) const;
    F2Matrix coords(const F2Matrix& v) const;          // 1 x dim; pre: contains(v)

    Subspace sum(const Subspace& other) const;
    Subspace intersect(const Subspace& other) const;
    bool operator==(const Subspace& o) const;
    bool operator!=(const Subspace& o) const { return !(*this == o); }

private:
    int ambient_ = 0;
    F2Matrix basis_;            // dim x ambient, RREF
    std::vector<int> pivots_;
};

struct KernelImage {
    Subspace kernel;            // {v : v*A = 0} in F2^m
    Subspace image;             // row space of A in F2^n
};
KernelImage kernel_image(const F2Matrix& a);

/* Solve x*A = b for one row b (pivot-canonical solution if several). */
std::pair<bool, F2Matrix> solve(const F2Matrix& a, const F2Matrix& b);

/* {v : v*A in t} */
Subspace preimage(const F2Matrix& a, const Subspace& t);

/* Subquotient Z/B of F2^n with canonical representatives: the RREF of Z reduced
   modulo B. project() sends any v in Z to coordinates in the representative basis. */
class Subquotient {
public:
    Subquotient() = default;
    Subquotient(Subspace z, Subspace b);               // pre: b <= z (checked)

    int ambient() const { return z_.ambient(); }
    int dim() const { return reps_.rows(); }
    const F2Matrix& reps() const { return reps_; }
    const Subspace& z() const { return z_; }
    const Subspace& b() const { return b_; }

    F2Matrix project(const F2Matrix& v) const;         // 1 x dim; pre: v in z
    F2Matrix project_rows(const F2Matrix& vs) const;
    F2Matrix lift(const F2Matrix& coords) const;       // coords * reps

private:
    Subspace z_, b_;
    F2Matrix reps_;
    std::vector<int> rep_pivots_;
};

/* Homology of F2^a --d_in--> F2^n --d_out--> F2^c (row convention).
   Throws CompositeNonzero unless d_in * d_out = 0. */
Subquotient subquotient_homology(const F2Matrix& d_in, const F2Matrix& d_out);

} // namespace destab::f2

#endif

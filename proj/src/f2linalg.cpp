#include "destab/f2linalg.hpp"

#include <algorithm>
#include <cstring>

namespace destab::f2 {

F2Matrix::F2Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), wpr_((cols + 63) / 64),
      a_(static_cast<std::size_t>(rows) * ((cols + 63) / 64), 0) {}

F2Matrix F2Matrix::identity(int n) {
    F2Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

bool F2Matrix::get(int i, int j) const {
    return (row(i)[j >> 6] >> (j & 63)) & 1u;
}

void F2Matrix::set(int i, int j, bool v) {
    Word& w = row(i)[j >> 6];
    Word bit = Word{1} << (j & 63);
    if (v) w |= bit; else w &= ~bit;
}

void F2Matrix::xor_row(int dst, int src) {
    xor_rows(row(dst), row(src), static_cast<std::size_t>(wpr_));
}

void F2Matrix::xor_row_from(int dst, const F2Matrix& other, int src) {
    xor_rows(row(dst), other.row(src), static_cast<std::size_t>(wpr_));
}

bool F2Matrix::row_is_zero(int i) const {
    const Word* r = row(i);
    for (int k = 0; k < wpr_; ++k)
        if (r[k]) return false;
    return true;
}

void F2Matrix::swap_rows(int i, int j) {
    if (i == j) return;
    Word* a = row(i);
    Word* b = row(j);
    for (int k = 0; k < wpr_; ++k) std::swap(a[k], b[k]);
}

F2Matrix F2Matrix::row_copy(int i) const {
    F2Matrix v(1, cols_);
    std::memcpy(v.row(0), row(i), sizeof(Word) * static_cast<std::size_t>(wpr_));
    return v;
}

void F2Matrix::set_row(int i, const F2Matrix& v, int src_row) {
    std::memcpy(row(i), v.row(src_row), sizeof(Word) * static_cast<std::size_t>(wpr_));
}

F2Matrix F2Matrix::mul(const F2Matrix& rhs) const {
    F2Matrix out(rows_, rhs.cols());
    for (int i = 0; i < rows_; ++i) {
        const Word* r = row(i);
        for (int k = 0; k < cols_; ++k)
            if ((r[k >> 6] >> (k & 63)) & 1u) out.xor_row_from(i, rhs, k);
    }
    return out;
}

F2Matrix F2Matrix::transpose() const {
    F2Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (get(i, j)) out.set(j, i, true);
    return out;
}

F2Matrix F2Matrix::vstack(const F2Matrix& below) const {
    F2Matrix out(rows_ + below.rows_, cols_);
    std::memcpy(out.a_.data(), a_.data(), sizeof(Word) * a_.size());
    std::memcpy(out.a_.data() + a_.size(), below.a_.data(), sizeof(Word) * below.a_.size());
    return out;
}

F2Matrix F2Matrix::hstack(const F2Matrix& right) const {
    F2Matrix out(rows_, cols_ + right.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) out.set(i, j, get(i, j));
        for (int j = 0; j < right.cols_; ++j) out.set(i, cols_ + j, right.get(i, j));
    }
    return out;
}

F2Matrix F2Matrix::select_rows(const std::vector<int>& idx) const {
    F2Matrix out(static_cast<int>(idx.size()), cols_);
    for (int i = 0; i < out.rows_; ++i) out.set_row(i, *this, idx[i]);
    return out;
}

F2Matrix F2Matrix::cols_range(int begin, int end) const {
    F2Matrix out(rows_, end - begin);
    for (int i = 0; i < rows_; ++i)
        for (int j = begin; j < end; ++j)
            if (get(i, j)) out.set(i, j - begin, true);
    return out;
}

bool F2Matrix::is_zero() const {
    for (Word w : a_)
        if (w) return false;
    return true;
}

bool F2Matrix::operator==(const F2Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

std::string F2Matrix::str() const {
    std::string s;
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) s += get(i, j) ? '1' : '.';
        s += '\n';
    }
    return s;
}

Rref rref(F2Matrix a) {
    Rref out;
    int r = 0;
    for (int col = 0; col < a.cols() && r < a.rows(); ++col) {
        int piv = -1;
        for (int i = r; i < a.rows(); ++i)
            if (a.get(i, col)) { piv = i; break; }
        if (piv < 0) continue;
        a.swap_rows(r, piv);
        for (int i = 0; i < a.rows(); ++i)
            if (i != r && a.get(i, col)) a.xor_row(i, r);
        out.pivots.push_back(col);
        ++r;
    }
    out.rank = r;
    out.m = std::move(a);
    return out;
}

Subspace::Subspace(int ambient) : ambient_(ambient), basis_(0, ambient) {}

Subspace Subspace::from_rows(const F2Matrix& gens) {
    Rref rr = rref(gens);
    Subspace s;
    s.ambient_ = gens.cols();
    s.pivots_ = rr.pivots;
    F2Matrix b(rr.rank, gens.cols());
    for (int i = 0; i < rr.rank; ++i) b.set_row(i, rr.m, i);
    s.basis_ = std::move(b);
    return s;
}

Subspace Subspace::full(int ambient) {
    return from_rows(F2Matrix::identity(ambient));
}

F2Matrix Subspace::reduce(F2Matrix v) const {
    for (int r = 0; r < dim(); ++r)
        if (v.get(0, pivots_[r])) v.xor_row_from(0, basis_, r);
    return v;
}

bool Subspace::contains(const F2Matrix& v) const {
    return reduce(v).is_zero();
}

bool Subspace::contains_rows(const F2Matrix& vs) const {
    for (int i = 0; i < vs.rows(); ++i)
        if (!contains(vs.row_copy(i))) return false;
    return true;
}

bool Subspace::contains_space(const Subspace& other) const {
    return contains_rows(other.basis());
}

F2Matrix Subspace::coords(const F2Matrix& v) const {
    F2Matrix c(1, dim());
    F2Matrix w = v;
    for (int r = 0; r < dim(); ++r) {
        if (w.get(0, pivots_[r])) {
            c.set(0, r, true);
            w.xor_row_from(0, basis_, r);
        }
    }
    if (!w.is_zero()) throw ValidationError("coords: vector not in subspace");
    return c;
}

Subspace Subspace::sum(const Subspace& other) const {
    return from_rows(basis_.vstack(other.basis_));
}

Subspace Subspace::intersect(const Subspace& other) const {
    /* Zassenhaus: rref of [U|U ; W|0]; rows with zero left half carry the
       intersection in the right half. */
    int n = ambient_;
    F2Matrix top = basis_.hstack(basis_);
    F2Matrix bot = other.basis_.hstack(F2Matrix(other.dim(), n));
    Rref rr = rref(top.vstack(bot));
    std::vector<int> keep;
    for (int i = 0; i < rr.rank; ++i)
        if (rr.pivots[i] >= n) keep.push_back(i);
    F2Matrix rows(static_cast<int>(keep.size()), n);
    for (int i = 0; i < rows.rows(); ++i)
        for (int j = 0; j < n; ++j)
            rows.set(i, j, rr.m.get(keep[i], n + j));
    return from_rows(rows);
}

bool Subspace::operator==(const Subspace& o) const {
    return ambient_ == o.ambient_ && basis_ == o.basis_;
}

KernelImage kernel_image(const F2Matrix& a) {
    /* Eliminate on [A | I], pivoting only in the A part: rows whose A part dies
       carry kernel generators in the I part; the surviving A parts are the image. */
    int m = a.rows(), n = a.cols();
    F2Matrix aug = a.hstack(F2Matrix::identity(m));
    int r = 0;
    for (int col = 0; col < n && r < m; ++col) {
        int piv = -1;
        for (int i = r; i < m; ++i)
            if (aug.get(i, col)) { piv = i; break; }
        if (piv < 0) continue;
        aug.swap_rows(r, piv);
        for (int i = 0; i < m; ++i)
            if (i != r && aug.get(i, col)) aug.xor_row(i, r);
        ++r;
    }
    F2Matrix img(r, n), ker(m - r, m);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < n; ++j) img.set(i, j, aug.get(i, j));
    for (int i = r; i < m; ++i)
        for (int j = 0; j < m; ++j) ker.set(i - r, j, aug.get(i, n + j));
    KernelImage out;
    out.image = Subspace::from_rows(img);
    out.kernel = Subspace::from_rows(ker);
    return out;
}

std::pair<bool, F2Matrix> solve(const F2Matrix& a, const F2Matrix& b) {
    int m = a.rows(), n = a.cols();
    F2Matrix aug = a.hstack(F2Matrix::identity(m));
    Rref rr = rref(aug);
    F2Matrix x(1, m);
    F2Matrix w = b;
    for (int i = 0; i < rr.rank; ++i) {
        int p = rr.pivots[i];
        if (p >= n) break;                       // rows beyond this have zero A part
        if (w.get(0, p)) {
            for (int j = 0; j < n; ++j)
                if (rr.m.get(i, j)) w.set(0, j, !w.get(0, j));
            for (int j = 0; j < m; ++j)
                if (rr.m.get(i, n + j)) x.set(0, j, !x.get(0, j));
        }
    }
    if (!w.is_zero()) return {false, F2Matrix(1, m)};
    return {true, x};
}

Subspace preimage(const F2Matrix& a, const Subspace& t) {
    F2Matrix reduced(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        reduced.set_row(i, t.reduce(a.row_copy(i)));
    return kernel_image(reduced).kernel;
}

Subquotient::Subquotient(Subspace z, Subspace b) : z_(std::move(z)), b_(std::move(b)) {
    if (z_.ambient() != b_.ambient() || !z_.contains_space(b_))
        throw ValidationError("Subquotient: B is not contained in Z");
    F2Matrix red(z_.dim(), z_.ambient());
    for (int i = 0; i < z_.dim(); ++i)
        red.set_row(i, b_.reduce(z_.basis().row_copy(i)));
    Rref rr = rref(std::move(red));
    rep_pivots_ = rr.pivots;
    F2Matrix reps(rr.rank, z_.ambient());
    for (int i = 0; i < rr.rank; ++i) reps.set_row(i, rr.m, i);
    reps_ = std::move(reps);
}

F2Matrix Subquotient::project(const F2Matrix& v) const {
    if (!z_.sum(b_).contains(v)) throw ValidationError("Subquotient::project: vector not in Z");
    F2Matrix w = b_.reduce(v);
    F2Matrix c(1, dim());
    for (int r = 0; r < dim(); ++r) {
        if (w.get(0, rep_pivots_[r])) {
            c.set(0, r, true);
            w.xor_row_from(0, reps_, r);
        }
    }
    if (!w.is_zero()) throw ValidationError("Subquotient::project: reduction failed");
    return c;
}

F2Matrix Subquotient::project_rows(const F2Matrix& vs) const {
    F2Matrix out(vs.rows(), dim());
    for (int i = 0; i < vs.rows(); ++i) out.set_row(i, project(vs.row_copy(i)));
    return out;
}

F2Matrix Subquotient::lift(const F2Matrix& coords) const {
    return coords.mul(reps_);
}

Subquotient subquotient_homology(const F2Matrix& d_in, const F2Matrix& d_out) {
    if (d_in.cols() != d_out.rows())
        throw ValidationError("subquotient_homology: dimension mismatch");
    if (d_in.rows() > 0 && !d_in.mul(d_out).is_zero())
        throw CompositeNonzero("subquotient_homology: d_out after d_in is nonzero");
    Subspace z = kernel_image(d_out).kernel;
    Subspace b = d_in.rows() > 0 ? kernel_image(d_in).image : Subspace(d_in.cols());
    if (!z.contains_space(b))
        throw CompositeNonzero("subquotient_homology: boundaries not contained in cycles");
    return Subquotient(std::move(z), std::move(b));
}

} // namespace destab::f2

#include "destab/hopfss.hpp"

#include <algorithm>
#include <utility>

#include "destab/dlfree.hpp"
#include "destab/errors.hpp"

namespace destab::hss {

namespace {

std::string itos(int v) { return std::to_string(v); }

} // namespace

int BarcodeModule::dim(int k, int d) const {
    if (k < 0 || k >= columns()) return 0;
    auto it = cols[k].find(d);
    return it == cols[k].end() ? 0 : it->second;
}

bool BarcodeModule::q_known(int k, int d) const {
    if (k < 0 || k + 1 >= columns() || k + 1 >= static_cast<int>(cap.size())) return false;
    return d <= cap[k] && 2 * d <= cap[k + 1];
}

f2::F2Matrix BarcodeModule::qmat(int k, int d) const {
    const int r = dim(k, d), c = dim(k + 1, 2 * d);
    if (k >= 0 && k < static_cast<int>(qmaps.size())) {
        auto it = qmaps[k].find(d);
        if (it != qmaps[k].end()) {
            if (it->second.rows() != r || it->second.cols() != c)
                throw ValidationError("barcode q-map shape mismatch at column " + itos(k) +
                                      ", degree " + itos(d));
            return it->second;
        }
    }
    return f2::F2Matrix(r, c);
}

namespace {

// rank of the composite q^j out of (k, d); j = 0 gives the dimension
int chain_rank(const BarcodeModule& b, int k, int d, int j) {
    const int n = b.dim(k, d);
    if (j == 0 || n == 0) return n;
    f2::F2Matrix acc = b.qmat(k, d);
    for (int i = 1; i < j; ++i) acc = acc.mul(b.qmat(k + i, d * (1 << i)));
    return f2::kernel_image(acc).image.dim();
}

// forward steps from (k, d) that stay inside the known data
int known_steps(const BarcodeModule& b, int k, int d) {
    int j = 0;
    while (b.q_known(k + j, d * (1 << j))) ++j;
    return j;
}

} // namespace

std::vector<Bar> barcode_decompose(const BarcodeModule& b) {
    std::vector<Bar> bars;
    for (int k = 0; k < b.columns(); ++k) {
        for (const auto& [d, n] : b.cols[k]) {
            if (n == 0) continue;
            // bars born here are the classes not reached by q from column k-1
            const bool has_prev = k >= 1 && d % 2 == 0 && b.q_known(k - 1, d / 2);
            auto from_prev = [&](int j) {
                return has_prev ? chain_rank(b, k - 1, d / 2, j + 1) : 0;
            };
            const int steps = known_steps(b, k, d);
            for (int j = 0; j < steps; ++j) {
                const int cnt = (chain_rank(b, k, d, j) - chain_rank(b, k, d, j + 1)) -
                                (from_prev(j) - from_prev(j + 1));
                for (int c = 0; c < cnt; ++c) bars.push_back({k, d, j + 1, false});
            }
            const int alive = chain_rank(b, k, d, steps) - from_prev(steps);
            for (int c = 0; c < alive; ++c) bars.push_back({k, d, steps + 1, true});
        }
    }
    std::sort(bars.begin(), bars.end());
    return bars;
}

long long UqSeries::at(int col, int row) const {
    auto it = table.find({col, row});
    return it == table.end() ? 0 : it->second;
}

UqSeries uq_series(const BarcodeModule& b, int max_row) {
    UqSeries s;
    s.max_row = max_row;
    s.table[{0, 0}] = 1;
    for (const Bar& bar : barcode_decompose(b)) {
        const long long w = 1LL << bar.k;
        const long long r = w + bar.d;
        if (r <= 0)
            throw ValidationError("uq_series: bar at column " + itos(bar.k) + ", degree " +
                                  itos(bar.d) + " sits in row " + itos(static_cast<int>(r)));
        std::map<std::pair<int, int>, long long> next;
        for (const auto& [key, val] : s.table) {
            for (long long e = 0;; ++e) {
                if (!bar.open && e >= (1LL << std::min(bar.len, 40))) break;
                const long long row = key.second + r * e;
                if (row > max_row) break;
                next[{key.first - static_cast<int>(w * e), static_cast<int>(row)}] += val;
            }
        }
        s.table = std::move(next);
    }
    return s;
}

BarcodeModule page_homology(const DiffBarcode& p) {
    const BarcodeModule& v = p.v;
    if (!(0 <= p.s && p.s < p.t && p.t < v.columns()))
        throw ValidationError("page homology needs differential columns s < t inside the range");
    auto dmat = [&](int dd) {
        auto it = p.d.find(dd);
        if (it == p.d.end()) return f2::F2Matrix(v.dim(p.s, dd), v.dim(p.t, dd - 1));
        if (it->second.rows() != v.dim(p.s, dd) || it->second.cols() != v.dim(p.t, dd - 1))
            throw ValidationError("page homology: differential shape mismatch in degree " + itos(dd));
        return it->second;
    };
    // q must be monic from column t on, wherever the data reaches
    for (int k = p.t; k + 1 < v.columns(); ++k)
        for (const auto& [d, n] : v.cols[k]) {
            if (n == 0 || !v.q_known(k, d)) continue;
            if (f2::kernel_image(v.qmat(k, d)).kernel.dim() > 0)
                throw DiamondViolation("q is not monic out of column " + itos(k) + ", degree " +
                                       itos(d));
        }
    // the differential kills the image of q
    if (p.s >= 1)
        for (const auto& [d, n] : v.cols[p.s - 1]) {
            if (n == 0 || !v.q_known(p.s - 1, d)) continue;
            if (!v.qmat(p.s - 1, d).mul(dmat(2 * d)).is_zero())
                throw ValidationError("page homology: d.q is nonzero in degree " + itos(2 * d));
        }

    std::vector<std::map<int, f2::Subquotient>> cells(v.columns());
    for (int k = 0; k < v.columns(); ++k) {
        for (const auto& [d, n] : v.cols[k]) {
            if (n == 0) continue;
            f2::Subspace z = f2::Subspace::full(n);
            f2::Subspace bs(n);
            if (k == p.s) z = f2::kernel_image(dmat(d)).kernel;
            if (k >= p.t) {
                // quotient by q^{k-t} im(d) along the dyadic line through (k, d)
                int e = d;
                bool on_line = true;
                for (int i = 0; i < k - p.t; ++i) {
                    if (e % 2 != 0) { on_line = false; break; }
                    e /= 2;
                }
                if (on_line) {
                    f2::F2Matrix acc = f2::kernel_image(dmat(e + 1)).image.basis();
                    for (int i = 0; i < k - p.t; ++i)
                        acc = acc.mul(v.qmat(p.t + i, e * (1 << i)));
                    bs = f2::Subspace::from_rows(acc);
                }
            }
            cells[k].emplace(d, f2::Subquotient(z, bs));
        }
    }

    BarcodeModule out;
    out.cols.assign(v.columns(), {});
    out.qmaps.assign(std::max(0, v.columns() - 1), {});
    out.cap = v.cap;
    for (int k = 0; k < v.columns(); ++k)
        for (const auto& [d, cell] : cells[k])
            if (cell.dim() > 0) out.cols[k][d] = cell.dim();
    for (int k = 0; k + 1 < v.columns(); ++k)
        for (const auto& [d, cell] : cells[k]) {
            if (cell.dim() == 0 || !v.q_known(k, d)) continue;
            auto it = cells[k + 1].find(2 * d);
            if (it == cells[k + 1].end() || it->second.dim() == 0) continue;
            f2::F2Matrix push = cell.reps().mul(v.qmat(k, d));
            if (!it->second.z().contains_rows(push))
                throw ValidationError("homology q-map does not land in the surviving classes at column " +
                                      itos(k + 1) + ", degree " + itos(2 * d));
            if (!it->second.b().contains_rows(cell.b().basis().mul(v.qmat(k, d))))
                throw ValidationError("homology q-map does not preserve the quotients at column " +
                                      itos(k + 1) + ", degree " + itos(2 * d));
            f2::F2Matrix induced = it->second.project_rows(push);
            if (!induced.is_zero()) out.qmaps[k].emplace(d, std::move(induced));
        }
    return out;
}

DiffBarcode SSPage::diff_barcode() const {
    DiffBarcode p;
    p.v = barcode;
    p.s = s;
    p.t = s + 1;
    p.d = diff;
    return p;
}

namespace {

/* Everything the pages share: the L tower over m provides, for each column k,
   the free module R_k(M) (stage k of complexes[k]), its desuspended partner
   R_k(sigma^{-1} M) (stage k of complexes[k+1]) and the degree-preserving
   differential d_k : R_k(sigma^{-1} M) -> R_{k+1}(M) (diffs[k] of
   complexes[k+1]), plus the bottom-operation maps between consecutive
   columns. Column k is complete for internal degrees <= wcol(k). */
struct Ctx {
    amod::FModule m;
    int max_s = 0;
    int max_total = 0;
    int max_col = 0;
    singer::LTower tower;
    std::vector<amod::GradedMap> qamb;   // qamb[k] : R_k(M) -> R_{k+1}(M), keyed by 2d

    const dl::FreeDLModule& rs(int k) const { return tower.complexes[k].stages[k]; }
    const dl::FreeDLModule& rsm1(int k) const { return tower.complexes[k + 1].stages[k]; }
    const amod::GradedMap& damb(int k) const { return tower.complexes[k + 1].diffs[k]; }
    int wcol(int k) const { return max_total - k - 1; }
};

Ctx make_ctx(const amod::FModule& m, int max_s, int max_total, int max_col) {
    if (max_total < 1)
        throw ValidationError("spectral sequence needs a positive total-degree window");
    if (max_col < 0) {
        int k = 0;
        while ((1 << (k + 1)) <= max_total) ++k;
        max_col = std::max(max_s + 1, k);
    }
    if (max_s + 1 > max_col)
        throw ValidationError("spectral sequence needs a column past max_s");
    if (m.max_deg < max_total - 1)
        throw TruncationInsufficient("spectral sequence through total degree " + itos(max_total) +
                                     " needs " + m.name + " stated through degree " +
                                     itos(max_total - 1) + ", have " + itos(m.max_deg));
    Ctx c;
    c.m = m;
    c.max_s = max_s;
    c.max_total = max_total;
    c.max_col = max_col;
    c.tower = singer::build_l_tower(m, max_col, max_total - 1);
    for (int k = 0; k < max_col; ++k) c.qamb.push_back(dl::q0_map(c.rs(k), c.rs(k + 1)));
    return c;
}

/* The degree-lowering section of epsilon: a monomial of R_s(M) maps to the
   monomial of R_s(sigma^{-1} M) with every index raised by one over the
   desuspended generator. Always admissible, and epsilon undoes it. */
f2::F2Matrix section_at(const Ctx& c, int s, int dd) {
    const dl::FreeDLModule& a = c.rs(s);
    const dl::FreeDLModule& b = c.rsm1(s);
    auto it = a.basis.find(dd);
    const int rows = it == a.basis.end() ? 0 : static_cast<int>(it->second.size());
    f2::F2Matrix mat(rows, b.dim(dd - 1));
    for (int r = 0; r < rows; ++r) {
        dl::DLMonomial t = it->second[r];
        t.gen_deg -= 1;
        for (auto& w : t.idx) ++w;
        const int col = b.col(dd - 1, t);
        if (col < 0)
            throw TruncationInsufficient("section target outside the built basis in degree " +
                                         itos(dd));
        mat.set(r, col, true);
    }
    return mat;
}

/* im(q^{k-s} d_{s-1}) inside R_k(M) at degree dd; zero when s = 0 or when dd
   is not on the dyadic line. */
f2::Subspace page_b(const Ctx& c, int s, int k, int dd) {
    const int n = c.rs(k).dim(dd);
    f2::Subspace zero(n);
    if (s == 0) return zero;
    int e = dd;
    for (int i = 0; i < k - s; ++i) {
        if (e % 2 != 0) return zero;
        e /= 2;
    }
    const int ns = c.rs(s).dim(e);
    if (ns == 0) return zero;
    f2::F2Matrix img = amod::map_at(c.damb(s - 1), e, c.rsm1(s - 1).dim(e), ns);
    f2::F2Matrix acc = f2::kernel_image(img).image.basis();
    for (int i = 0; i < k - s; ++i) {
        const int de = e * (1 << i);
        acc = acc.mul(amod::map_at(c.qamb[s + i], 2 * de, c.rs(s + i).dim(de),
                                   c.rs(s + i + 1).dim(2 * de)));
    }
    return f2::Subspace::from_rows(acc);
}

void restrict_module(amod::FModule& mod, int bound) {
    if (mod.max_deg <= bound) return;
    mod.max_deg = bound;
    mod.basis.erase(mod.basis.upper_bound(bound), mod.basis.end());
    for (auto it = mod.act.begin(); it != mod.act.end();)
        it = it->first.second > bound ? mod.act.erase(it) : std::next(it);
}

// ambient composite of the induced differential out of column s at source degree dd
f2::F2Matrix diff_ambient(const Ctx& c, int s, int dd) {
    return section_at(c, s, dd).mul(amod::map_at(c.damb(s), dd - 1, c.rsm1(s).dim(dd - 1),
                                                 c.rs(s + 1).dim(dd - 1)));
}

SSPage make_page(const Ctx& c, int s) {
    SSPage p;
    p.s = s;
    p.max_total = c.max_total;
    for (int k = 0; k <= c.max_col; ++k) {
        PageColumn col;
        col.k = k;
        const int w = c.wcol(k);
        if (k < s) {
            const singer::LResult& l = c.tower.ls[k];
            for (const auto& [d, cell] : l.cells)
                if (d <= w) col.cells.emplace(d, cell);
            col.module = l.module;
            restrict_module(col.module, w);
        } else {
            std::map<int, f2::Subspace> zm, bm;
            for (const auto& [d, mons] : c.rs(k).basis) {
                if (d > w || mons.empty()) continue;
                zm.emplace(d, f2::Subspace::full(static_cast<int>(mons.size())));
                bm.emplace(d, page_b(c, s, k, d));
            }
            amod::FModule amb = c.rs(k).mod;
            restrict_module(amb, w);
            amod::CarvedModule carved = amod::induced_subquotient(
                amb, zm, bm, "page" + itos(1 << s) + "c" + itos(k) + "(" + c.m.name + ")");
            col.cells = std::move(carved.cells);
            col.module = std::move(carved.module);
        }
        p.cols.push_back(std::move(col));
    }

    // induced differential out of column s, in cell coordinates
    if (s + 1 <= c.max_col) {
        for (const auto& [dd, cell] : p.cols[s].cells) {
            if (cell.dim() == 0 || c.rs(s + 1).dim(dd - 1) == 0) continue;
            const f2::F2Matrix compo = diff_ambient(c, s, dd);
            const f2::Subquotient& tgt = p.cols[s + 1].cells.at(dd - 1);
            if (!tgt.b().contains_rows(cell.b().basis().mul(compo)))
                throw ValidationError("page differential is not well defined in degree " +
                                      itos(dd));
            f2::F2Matrix mat = tgt.project_rows(cell.reps().mul(compo));
            if (!mat.is_zero()) p.diff.emplace(dd, std::move(mat));
        }
    }

    // coordinate view of the columns with the induced bottom operations
    p.barcode.cols.assign(c.max_col + 1, {});
    p.barcode.qmaps.assign(c.max_col, {});
    p.barcode.cap.assign(c.max_col + 1, 0);
    for (int k = 0; k <= c.max_col; ++k) {
        p.barcode.cap[k] = c.wcol(k);
        for (const auto& [d, cell] : p.cols[k].cells)
            if (cell.dim() > 0) p.barcode.cols[k][d] = cell.dim();
    }
    for (int k = 0; k < c.max_col; ++k) {
        for (const auto& [d, cell] : p.cols[k].cells) {
            if (cell.dim() == 0 || 2 * d > c.wcol(k + 1)) continue;
            auto it = p.cols[k + 1].cells.find(2 * d);
            if (it == p.cols[k + 1].cells.end() || it->second.dim() == 0) continue;
            const f2::F2Matrix qm = amod::map_at(c.qamb[k], 2 * d, c.rs(k).dim(d),
                                                 c.rs(k + 1).dim(2 * d));
            if (!it->second.z().contains_rows(cell.z().basis().mul(qm)))
                throw ValidationError("bottom operation leaves the page classes at column " +
                                      itos(k + 1) + ", degree " + itos(2 * d));
            if (!it->second.b().contains_rows(cell.b().basis().mul(qm)))
                throw ValidationError("bottom operation breaks the page quotient at column " +
                                      itos(k + 1) + ", degree " + itos(2 * d));
            f2::F2Matrix induced = it->second.project_rows(cell.reps().mul(qm));
            if (!induced.is_zero()) p.barcode.qmaps[k].emplace(d, std::move(induced));
        }
    }

    // the differential must kill the image of the bottom operation
    if (s >= 1 && s < static_cast<int>(p.barcode.qmaps.size()) + 1)
        for (const auto& [d, qm] : p.barcode.qmaps[s - 1]) {
            auto it = p.diff.find(2 * d);
            if (it != p.diff.end() && !qm.mul(it->second).is_zero())
                throw ValidationError("page differential does not kill the bottom operation at degree " +
                                      itos(2 * d));
        }
    return p;
}

/* The homology of page s must reproduce page s+1 on the nose: kernels at
   column s (this is where L_s appears), the old cells below, and quotients by
   the propagated image above. Compared as ambient subspaces, then re-checked
   through the abstract homology formula. */
void check_transition(const Ctx& c, const SSPage& a, const SSPage& b) {
    const int s = a.s;
    for (int k = 0; k <= c.max_col; ++k) {
        for (const auto& [d, bc] : b.cols[k].cells) {
            const f2::Subquotient& ac = a.cols[k].cells.at(d);
            f2::Subspace znew = ac.z();
            f2::Subspace bnew = ac.b();
            if (k == s) {
                if (c.rs(s + 1).dim(d - 1) > 0)
                    znew = f2::preimage(diff_ambient(c, s, d),
                                        a.cols[s + 1].cells.at(d - 1).b());
            } else if (k >= s + 1) {
                int e = d;
                bool on_line = true;
                for (int i = 0; i < k - s - 1; ++i) {
                    if (e % 2 != 0) { on_line = false; break; }
                    e /= 2;
                }
                if (on_line && c.rs(s).dim(e + 1) > 0 && c.rs(s + 1).dim(e) > 0) {
                    f2::F2Matrix acc =
                        f2::kernel_image(diff_ambient(c, s, e + 1)).image.basis();
                    for (int i = 0; i < k - s - 1; ++i) {
                        const int de = e * (1 << i);
                        acc = acc.mul(amod::map_at(c.qamb[s + 1 + i], 2 * de,
                                                   c.rs(s + 1 + i).dim(de),
                                                   c.rs(s + 2 + i).dim(2 * de)));
                    }
                    bnew = bnew.sum(f2::Subspace::from_rows(acc));
                }
            }
            if (znew != bc.z() || bnew != bc.b())
                throw PageMismatch("page " + itos(1 << (s + 1)) + ", column " + itos(k) +
                                   ", degree " + itos(d) +
                                   ": homology of the previous page disagrees");
        }
    }
    // abstract crosscheck of the dimensions
    BarcodeModule h = page_homology(a.diff_barcode());
    for (int k = 0; k <= c.max_col; ++k)
        if (h.cols[k] != b.barcode.cols[k])
            throw PageMismatch("page " + itos(1 << (s + 1)) + ", column " + itos(k) +
                               ": homology formula dimensions disagree");
}

BarcodeModule l_barcode(const Ctx& c) {
    BarcodeModule b;
    b.cols.assign(c.max_col + 1, {});
    b.qmaps.assign(c.max_col, {});
    b.cap.assign(c.max_col + 1, 0);
    for (int k = 0; k <= c.max_col; ++k) {
        b.cap[k] = c.tower.ls[k].max_deg;
        for (const auto& [d, cell] : c.tower.ls[k].cells)
            if (cell.dim() > 0) b.cols[k][d] = cell.dim();
    }
    for (int k = 0; k < c.max_col; ++k)
        for (const auto& [d, n] : b.cols[k]) {
            if (2 * d > b.cap[k + 1]) continue;
            f2::F2Matrix qm = singer::q_on_l(c.tower, d, k, d, f2::F2Matrix::identity(n));
            if (!qm.is_zero()) b.qmaps[k].emplace(d, std::move(qm));
        }
    return b;
}

} // namespace

SSPage build_page(const amod::FModule& m, int s, int max_total, int max_col) {
    Ctx c = make_ctx(m, s, max_total, max_col);
    return make_page(c, s);
}

SSRun run_ss(const amod::FModule& m, int max_s, int max_total, int max_col) {
    Ctx c = make_ctx(m, max_s, max_total, max_col);
    SSRun run;
    run.max_s = max_s;
    run.max_total = max_total;
    run.max_col = c.max_col;
    SSPage cur = make_page(c, 0);
    for (int s = 0; s <= max_s; ++s) {
        SSPage next = make_page(c, s + 1);
        check_transition(c, cur, next);
        run.pages.push_back(std::move(cur));
        cur = std::move(next);
    }
    run.linf = l_barcode(c);
    run.linf_bars = barcode_decompose(run.linf);
    run.einf = uq_series(run.linf, max_total);
    for (int k = 0; k <= c.max_col; ++k)
        for (const auto& [d, n] : run.linf.cols[k]) {
            std::vector<std::string> names;
            for (int j = 0; j < n; ++j) names.push_back(c.tower.ls[k].module.label(d, j));
            run.linf_labels[{k, d}] = std::move(names);
        }
    return run;
}

} // namespace destab::hss

#include "destab/singer.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "destab/errors.hpp"

namespace destab::singer {

namespace {

std::string itos(int v) { return std::to_string(v); }

const f2::Subquotient* cell_at(const DerivedResult& h, int t) {
    auto it = h.cells.find(t);
    return it == h.cells.end() ? nullptr : &it->second;
}

int hdim(const DerivedResult& h, int t) {
    const f2::Subquotient* c = cell_at(h, t);
    return c ? c->dim() : 0;
}

/* Matrix of an ambient degree map on homology coordinates. The containment
   checks double as verification that the map descends at all. */
f2::F2Matrix induced_on_homology(const f2::Subquotient& src, const f2::F2Matrix& amb,
                                 const f2::Subquotient& dst, const std::string& what) {
    if (!dst.z().contains_rows(src.z().basis().mul(amb)))
        throw ValidationError(what + ": cycles do not map to cycles");
    if (!dst.b().contains_rows(src.b().basis().mul(amb)))
        throw ValidationError(what + ": boundaries do not map to boundaries");
    return dst.project_rows(src.reps().mul(amb));
}

} // namespace

int SingerComplex::dim(int s, int t) const {
    if (s < 0 || s >= static_cast<int>(stages.size())) return 0;
    return stages[s].dim(t - 1);
}

SingerComplex build_singer(const amod::FModule& m, int max_stage, int max_total) {
    if (max_total > m.max_deg)
        throw TruncationInsufficient("singer complex over " + m.name + ": total degree " +
                                     itos(max_total) + " exceeds the stated bound " +
                                     itos(m.max_deg));
    SingerComplex c;
    c.m = m;
    c.max_stage = max_stage;
    c.max_total = max_total;
    for (int s = 0; s <= max_stage; ++s)
        c.stages.push_back(dl::build_rs(amod::suspend(m, s - 1), s, max_total - 1));
    for (int s = 0; s < max_stage; ++s)
        c.diffs.push_back(dl::chain_d(c.stages[s], c.stages[s + 1]));
    for (int s = 0; s + 1 < max_stage; ++s) {
        for (const auto& [n, mat] : c.diffs[s].mats) {
            const int nn = n;
            f2::F2Matrix next =
                amod::map_at(c.diffs[s + 1], nn, mat.cols(), c.stages[s + 2].dim(nn));
            if (!mat.mul(next).is_zero())
                throw CompositeNonzero("singer complex over " + m.name +
                                       ": d.d != 0 out of stage " + itos(s) + " in degree " +
                                       itos(nn));
        }
    }
    return c;
}

DerivedResult derived_functor(const SingerComplex& c, int s) {
    if (s < 0 || s >= c.max_stage)
        throw ValidationError("derived functor at stage " + itos(s) +
                              " needs the complex built one stage further");
    std::map<int, f2::Subspace> zmap, bmap;
    for (const auto& [n, mons] : c.stages[s].basis) {
        if (mons.empty()) continue;
        const int nn = n;
        const int a = static_cast<int>(mons.size());
        f2::F2Matrix dout = amod::map_at(c.diffs[s], nn, a, c.stages[s + 1].dim(nn));
        zmap.emplace(nn + 1, f2::kernel_image(dout).kernel);
        if (s > 0) {
            f2::F2Matrix din = amod::map_at(c.diffs[s - 1], nn, c.stages[s - 1].dim(nn), a);
            bmap.emplace(nn + 1, f2::kernel_image(din).image);
        }
    }
    amod::CarvedModule carved =
        amod::induced_subquotient(amod::suspend(c.stages[s].mod, 1), zmap, bmap,
                                  "Oinf" + itos(s) + "(" + c.m.name + ")");
    DerivedResult out;
    out.s = s;
    out.max_total = c.max_total;
    out.module = std::move(carved.module);
    out.cells = std::move(carved.cells);
    if (!amod::is_unstable(out.module))
        throw ValidationError(out.module.name + ": homology failed to be unstable");
    return out;
}

DerivedResult derived_functor(const amod::FModule& m, int s, int max_total) {
    return derived_functor(build_singer(m, s + 1, max_total), s);
}

namespace {

/* Shared by l_functor and build_l_tower: cs sits over suspend(m, 1-s) so its
   stage s is the free module on m itself; cs1 sits over suspend(m, -s) and
   provides both the desuspension route and (one weight up) the ambient for
   the next L. */
LResult compute_l(const amod::FModule& m, const SingerComplex& cs, const SingerComplex& cs1,
                  int s, int max_deg) {
    DerivedResult ha = derived_functor(cs, s);
    DerivedResult hb = derived_functor(cs1, s);
    amod::GradedMap eps = dl::epsilon(cs1.stages[s], cs.stages[s]);
    const std::string lname = "L" + itos(s) + "(" + m.name + ")";

    std::map<int, f2::Subspace> zmap, bmap;
    for (const auto& [n, mons] : cs.stages[s].basis) {
        const int d = n;
        if (d > max_deg || mons.empty()) continue;
        const int na = static_cast<int>(mons.size());
        const f2::Subquotient& cell = ha.cells.at(d + 1);

        // kernel route: classes killed by sq0 on the stage-s homology
        f2::Subspace ka = (d + 1) % 2 == 0
                              ? f2::kernel_image(ha.module.sq((d + 1) / 2, d + 1)).kernel
                              : f2::Subspace::full(cell.dim());
        f2::Subspace za = cell.b().sum(f2::Subspace::from_rows(cell.lift(ka.basis())));

        // desuspension route: image of the stage-s homology one suspension down
        f2::Subspace zb = cell.b();
        if (const f2::Subquotient* src = cell_at(hb, d)) {
            f2::F2Matrix amb = amod::map_at(eps, d - 1, src->ambient(), na);
            f2::F2Matrix zpush = src->z().basis().mul(amb);
            if (!cell.z().contains_rows(zpush))
                throw ValidationError(lname + ": desuspension fails to be a chain map in degree " +
                                      itos(d));
            if (!cell.b().contains_rows(src->b().basis().mul(amb)))
                throw ValidationError(lname + ": desuspension drops boundaries in degree " +
                                      itos(d));
            zb = zb.sum(f2::Subspace::from_rows(zpush));
        }

        if (za != zb)
            throw RouteMismatch(lname + " in degree " + itos(d) + ": sq0-kernel route has dim " +
                                itos(za.dim() - cell.b().dim()) + ", desuspension route has dim " +
                                itos(zb.dim() - cell.b().dim()));
        zmap.emplace(d, std::move(za));
        bmap.emplace(d, cell.b());
    }

    amod::CarvedModule carved = amod::induced_subquotient(cs.stages[s].mod, zmap, bmap, lname);
    LResult out;
    out.s = s;
    out.max_deg = max_deg;
    out.module = std::move(carved.module);
    out.module.max_deg = max_deg;
    out.cells = std::move(carved.cells);
    out.cells.erase(out.cells.upper_bound(max_deg), out.cells.end());
    if (!amod::is_unstable(out.module))
        throw ValidationError(lname + ": result failed to be unstable");
    return out;
}

} // namespace

LResult l_functor(const amod::FModule& m, int s, int max_deg) {
    if (s < 0) throw ValidationError("l_functor: negative weight");
    if (max_deg > m.max_deg - s)
        throw TruncationInsufficient("L" + itos(s) + "(" + m.name + ") through degree " +
                                     itos(max_deg) + " needs the module stated through " +
                                     itos(max_deg + s) + ", have " + itos(m.max_deg));
    SingerComplex cs = build_singer(amod::suspend(m, 1 - s), s + 1, max_deg + 1);
    SingerComplex cs1 = build_singer(amod::suspend(m, -s), s + 1, max_deg);
    return compute_l(m, cs, cs1, s, max_deg);
}

LTower build_l_tower(const amod::FModule& m, int max_s, int max_deg) {
    LTower t;
    t.m = m;
    t.max_s = max_s;
    for (int j = 0; j <= max_s + 1; ++j) {
        const int window = std::min(max_deg, m.max_deg - j);
        t.complexes.push_back(build_singer(amod::suspend(m, 1 - j), j + 1, window + 1));
    }
    for (int j = 0; j <= max_s; ++j) {
        const int window = std::min(max_deg, m.max_deg - j);
        t.ls.push_back(compute_l(m, t.complexes[j], t.complexes[j + 1], j, window));
    }
    return t;
}

f2::F2Matrix q_on_l(const LTower& t, int i, int s, int d, const f2::F2Matrix& coords) {
    if (s < 0 || s + 1 >= static_cast<int>(t.ls.size()))
        throw ValidationError("q_on_l: weight " + itos(s + 1) + " is not in the tower");
    const LResult& lo = t.ls[s];
    const LResult& hi = t.ls[s + 1];
    if (d > lo.max_deg || d + i > hi.max_deg)
        throw TruncationInsufficient("q_on_l: target degree " + itos(d + i) +
                                     " is beyond the computed window " + itos(hi.max_deg));
    if (coords.cols() != lo.dim(d))
        throw ValidationError("q_on_l: expected " + itos(lo.dim(d)) + " coordinates in degree " +
                              itos(d));
    const dl::FreeDLModule& src = t.complexes[s].stages[s];
    const dl::FreeDLModule& dst = t.complexes[s + 1].stages[s + 1];
    f2::F2Matrix out(coords.rows(), hi.dim(d + i));
    if (lo.dim(d) == 0 || dst.dim(d + i) == 0) return out;

    const f2::Subquotient& locell = lo.cells.at(d);
    const f2::Subquotient& hicell = hi.cells.at(d + i);
    const std::vector<dl::DLMonomial>& mons = src.basis.at(d);
    auto push_row = [&](const f2::F2Matrix& v) {
        std::set<dl::DLMonomial> acc;
        for (int c = 0; c < v.cols(); ++c) {
            if (!v.get(0, c)) continue;
            for (const auto& term : dl::apply_q(i, mons[c])) {
                auto [it, inserted] = acc.insert(term);
                if (!inserted) acc.erase(it);
            }
        }
        return dst.row_of(d + i, acc);
    };

    // the answer may not depend on which cycle represents the class
    for (int r = 0; r < locell.b().dim(); ++r)
        if (!hicell.b().contains(push_row(locell.b().basis().row_copy(r))))
            throw NotACycle("q_on_l: image depends on the representative in degree " + itos(d));

    for (int r = 0; r < coords.rows(); ++r) {
        f2::F2Matrix img = push_row(locell.lift(coords.row_copy(r)));
        if (!hicell.z().contains(img))
            throw NotACycle("q_on_l: Q^" + itos(i) + " escapes the computed classes in degree " +
                            itos(d));
        out.set_row(r, hicell.project(img));
    }
    return out;
}

LesReport les_check(const amod::FModule& m, int max_stage, int max_total) {
    SingerComplex cm = build_singer(m, max_stage + 1, max_total);
    SingerComplex cs = build_singer(amod::suspend(m, 1), max_stage + 1, max_total + 1);

    std::vector<DerivedResult> H, G;
    for (int s = 0; s <= max_stage; ++s) {
        H.push_back(derived_functor(cm, s));
        G.push_back(derived_functor(cs, s));
    }
    std::vector<amod::GradedMap> eps, q0;
    for (int s = 0; s <= max_stage; ++s) eps.push_back(dl::epsilon(cm.stages[s], cs.stages[s]));
    for (int s = 0; s + 1 <= max_stage; ++s)
        q0.push_back(dl::q0_map(cs.stages[s], cm.stages[s + 1]));

    auto ematrix = [&](int s, int u) {
        const f2::Subquotient* src = cell_at(H[s], u - 1);
        const f2::Subquotient* dst = cell_at(G[s], u);
        if (!src) return f2::F2Matrix(0, dst ? dst->dim() : 0);
        if (!dst) return f2::F2Matrix(src->dim(), 0);
        f2::F2Matrix amb =
            amod::map_at(eps[s], u - 2, cm.stages[s].dim(u - 2), cs.stages[s].dim(u - 1));
        return induced_on_homology(*src, amb, *dst,
                                   "les desuspension, stage " + itos(s) + ", degree " + itos(u));
    };
    auto smatrix = [&](int s, int u) {
        if (u % 2 != 0) return f2::F2Matrix(G[s].module.dim(u), 0);
        return G[s].module.sq(u / 2, u);
    };
    auto qmatrix = [&](int s, int u) {
        const int cols = hdim(H[s + 1], u - 1);
        if (u % 2 != 0) return f2::F2Matrix(0, cols);
        const f2::Subquotient* src = cell_at(G[s], u / 2);
        const f2::Subquotient* dst = cell_at(H[s + 1], u - 1);
        if (!src) return f2::F2Matrix(0, cols);
        if (!dst) return f2::F2Matrix(src->dim(), 0);
        f2::F2Matrix amb = amod::map_at(q0[s], u - 2, cs.stages[s].dim(u / 2 - 1),
                                        cm.stages[s + 1].dim(u - 2));
        return induced_on_homology(*src, amb, *dst,
                                   "les bottom operation, stage " + itos(s) + ", degree " +
                                       itos(u));
    };

    std::set<int> degrees;
    for (int s = 0; s <= max_stage; ++s) {
        for (const auto& [t, cell] : H[s].cells)
            if (t + 1 <= max_total) degrees.insert(t + 1);
        for (const auto& [t, cell] : G[s].cells) {
            if (t <= max_total) degrees.insert(t);
            if (2 * t <= max_total) degrees.insert(2 * t);
        }
    }

    LesReport rep;
    for (int u : degrees) {
        std::vector<std::string> names;
        std::vector<int> dims;
        std::vector<f2::F2Matrix> outs;
        for (int s = 0; s <= max_stage; ++s) {
            names.push_back("Sigma Oinf" + itos(s) + "(" + m.name + ")");
            dims.push_back(hdim(H[s], u - 1));
            outs.push_back(ematrix(s, u));
            if (s == max_stage) break;
            names.push_back("Oinf" + itos(s) + "(Sigma " + m.name + ")");
            dims.push_back(hdim(G[s], u));
            outs.push_back(smatrix(s, u));
            names.push_back("Phi Oinf" + itos(s) + "(Sigma " + m.name + ")");
            dims.push_back(u % 2 == 0 ? hdim(G[s], u / 2) : 0);
            outs.push_back(qmatrix(s, u));
        }
        for (std::size_t j = 0; j < dims.size(); ++j) {
            f2::Subspace incoming =
                j == 0 ? f2::Subspace(dims[0]) : f2::kernel_image(outs[j - 1]).image;
            f2::Subspace kernel = f2::kernel_image(outs[j]).kernel;
            if (incoming != kernel) {
                rep.ok = false;
                rep.detail = "degree " + itos(u) + ", at " + names[j] + ": image has dim " +
                             itos(incoming.dim()) + ", kernel has dim " + itos(kernel.dim());
                return rep;
            }
        }
    }
    return rep;
}

} // namespace destab::singer

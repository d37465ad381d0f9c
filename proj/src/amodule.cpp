#include "destab/amodule.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "destab/errors.hpp"
#include "destab/steenrod.hpp"

namespace destab::amod {

int FModule::dim(int d) const {
    auto it = basis.find(d);
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
}

int FModule::min_deg() const {
    for (const auto& [d, labels] : basis)
        if (!labels.empty()) return d;
    return 0;
}

int FModule::total_dim() const {
    int n = 0;
    for (const auto& [d, labels] : basis) n += static_cast<int>(labels.size());
    return n;
}

const std::string& FModule::label(int d, int i) const {
    return basis.at(d).at(static_cast<size_t>(i));
}

f2::F2Matrix FModule::sq(int i, int d) const {
    if (i == 0) return f2::F2Matrix::identity(dim(d));   // Sq^0 = 1
    auto it = act.find({i, d});
    if (it != act.end()) return it->second;
    return f2::F2Matrix(dim(d), dim(d - i));
}

void FModule::set_sq(int i, int d, f2::F2Matrix mat) {
    if (mat.is_zero()) { act.erase({i, d}); return; }
    act[{i, d}] = std::move(mat);
}

f2::F2Matrix FModule::apply(int i, int d, const f2::F2Matrix& v) const {
    return v.mul(sq(i, d));
}

namespace {

// x * (Sq^{w0} Sq^{w1} ...) evaluated left to right from degree d.
f2::F2Matrix word_matrix(const FModule& m, const steenrod::SqWord& w, int d) {
    f2::F2Matrix out = f2::F2Matrix::identity(m.dim(d));
    int cur = d;
    for (int i : w) {
        out = out.mul(m.sq(i, cur));
        cur -= i;
    }
    return out;
}

} // namespace

void validate(const FModule& m) {
    for (const auto& [d, labels] : m.basis) {
        if (!labels.empty() && d > m.max_deg)
            throw ValidationError(m.name + ": basis in degree " + std::to_string(d) +
                                  " above max_deg " + std::to_string(m.max_deg));
        for (const auto& s : labels)
            if (s.empty()) throw ValidationError(m.name + ": empty basis label");
    }
    for (const auto& [key, mat] : m.act) {
        auto [i, d] = key;
        if (i <= 0)
            throw ValidationError(m.name + ": action key sq" + std::to_string(i));
        if (d > m.max_deg)
            throw ValidationError(m.name + ": action above max_deg");
        if (mat.rows() != m.dim(d) || mat.cols() != m.dim(d - i))
            throw ValidationError(m.name + ": sq" + std::to_string(i) + " on degree " +
                                  std::to_string(d) + " has shape " +
                                  std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()));
    }

    // Adem relations: x Sq^a Sq^b = x (sum of admissibles) whenever a < 2b and
    // the composite stays inside the stated window.
    const int lo = m.min_deg();
    for (const auto& [d, labels] : m.basis) {
        if (labels.empty()) continue;
        const int span = d - lo;
        for (int b = 1; b <= span; ++b) {
            for (int a = 1; a < 2 * b && a + b <= span; ++a) {
                f2::F2Matrix lhs = word_matrix(m, {a, b}, d);
                f2::F2Matrix rhs(m.dim(d), m.dim(d - a - b));
                for (const auto& w : steenrod::adem_normalize_sq({a, b}).terms) {
                    f2::F2Matrix t = word_matrix(m, w, d);
                    for (int r = 0; r < t.rows(); ++r) rhs.xor_row_from(r, t, r);
                }
                if (!(lhs == rhs))
                    throw ValidationError(m.name + ": Adem relation Sq" + std::to_string(a) +
                                          " Sq" + std::to_string(b) + " fails on degree " +
                                          std::to_string(d));
            }
        }
    }
}

f2::F2Matrix map_at(const GradedMap& g, int d, int rows, int cols) {
    auto it = g.mats.find(d);
    if (it == g.mats.end()) return f2::F2Matrix(rows, cols);
    if (it->second.rows() != rows || it->second.cols() != cols)
        throw ValidationError("map_at: shape " + std::to_string(it->second.rows()) + "x" +
                              std::to_string(it->second.cols()) + " where " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " expected");
    return it->second;
}

bool modules_equal(const FModule& a, const FModule& b) {
    if (a.max_deg != b.max_deg) return false;
    std::map<int, int> dims;
    for (const auto& [d, l] : a.basis) dims[d] += static_cast<int>(l.size());
    for (const auto& [d, l] : b.basis) dims[d] -= static_cast<int>(l.size());
    for (const auto& [d, n] : dims)
        if (n != 0) return false;
    std::set<std::pair<int, int>> keys;
    for (const auto& [k, mat] : a.act) keys.insert(k);
    for (const auto& [k, mat] : b.act) keys.insert(k);
    for (const auto& [i, d] : keys)
        if (!(a.sq(i, d) == b.sq(i, d))) return false;
    return true;
}

FModule suspend(const FModule& m, int k) {
    FModule out;
    out.name = m.name;
    out.max_deg = m.max_deg + k;
    for (const auto& [d, labels] : m.basis)
        if (!labels.empty()) out.basis[d + k] = labels;
    for (const auto& [key, mat] : m.act) out.act[{key.first, key.second + k}] = mat;
    return out;
}

FModule phi(const FModule& m) {
    FModule out;
    out.name = m.name;
    out.max_deg = 2 * m.max_deg;
    for (const auto& [d, labels] : m.basis)
        if (!labels.empty()) out.basis[2 * d] = labels;
    for (const auto& [key, mat] : m.act) out.act[{2 * key.first, 2 * key.second}] = mat;
    return out;
}

GradedMap sq0(const FModule& m) {
    GradedMap g;
    g.shift = 0;
    for (const auto& [d, labels] : m.basis) {
        if (labels.empty() || d < 0 || d % 2 != 0) continue;   // zero on odd/negative degrees
        f2::F2Matrix mat = m.sq(d / 2, d);
        if (!mat.is_zero()) g.mats[d] = std::move(mat);
    }
    return g;
}

bool is_unstable(const FModule& m) {
    for (const auto& [d, labels] : m.basis)
        if (!labels.empty() && d < 0) return false;
    for (const auto& [key, mat] : m.act) {
        auto [i, d] = key;
        if (2 * i > d && !mat.is_zero()) return false;
    }
    return true;
}

CarvedModule induced_subquotient(const FModule& m,
                                 const std::map<int, f2::Subspace>& z,
                                 const std::map<int, f2::Subspace>& b,
                                 const std::string& name) {
    CarvedModule out;
    out.module.name = name;
    out.module.max_deg = m.max_deg;

    auto lookup = [&](const std::map<int, f2::Subspace>& sp, int d) {
        auto it = sp.find(d);
        if (it == sp.end()) return f2::Subspace(m.dim(d));
        if (it->second.ambient() != m.dim(d))
            throw ValidationError(name + ": subspace ambient mismatch in degree " +
                                  std::to_string(d));
        return it->second;
    };

    for (const auto& [d, labels] : m.basis) {
        if (labels.empty()) continue;
        out.cells.emplace(d, f2::Subquotient(lookup(z, d), lookup(b, d)));
        const f2::Subquotient& cell = out.cells.at(d);
        if (cell.dim() == 0) continue;
        std::vector<std::string> qlabels;
        for (int r = 0; r < cell.dim(); ++r)
            qlabels.push_back(render_vector(m, d, cell.reps().row_copy(r)));
        out.module.basis[d] = std::move(qlabels);
    }

    for (const auto& [key, mat] : m.act) {
        auto [i, d] = key;
        auto src = out.cells.find(d);
        if (src == out.cells.end() || src->second.dim() == 0) continue;
        const int e = d - i;
        f2::F2Matrix img = src->second.reps().mul(mat);
        auto tgt = out.cells.find(e);
        if (tgt == out.cells.end()) {
            if (!img.is_zero())
                throw ValidationError(name + ": action escapes in degree " + std::to_string(d) +
                                      " under sq" + std::to_string(i));
            continue;
        }
        if (!tgt->second.z().sum(tgt->second.b()).contains_rows(img))
            throw ValidationError(name + ": action not closed in degree " + std::to_string(d) +
                                  " under sq" + std::to_string(i));
        out.module.set_sq(i, d, tgt->second.project_rows(img));
    }
    return out;
}

CarvedModule unstable_part(const FModule& m) {
    std::map<int, f2::Subspace> w;
    for (const auto& [d, labels] : m.basis) {
        if (labels.empty()) continue;
        const int n = static_cast<int>(labels.size());
        if (d < 0) { w.emplace(d, f2::Subspace(n)); continue; }   // Sq^0 = 1 kills these
        f2::Subspace cur = f2::Subspace::full(n);
        for (const auto& [key, mat] : m.act) {
            auto [i, dd] = key;
            if (dd != d || 2 * i <= d) continue;
            cur = cur.intersect(f2::preimage(mat, f2::Subspace(m.dim(d - i))));
        }
        w.emplace(d, cur);
    }

    // shrink to the largest subspace family closed under every operation
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [key, mat] : m.act) {
            auto [i, d] = key;
            auto src = w.find(d);
            auto tgt = w.find(d - i);
            if (src == w.end() || src->second.dim() == 0) continue;
            f2::Subspace target = tgt == w.end() ? f2::Subspace(m.dim(d - i)) : tgt->second;
            f2::Subspace next = src->second.intersect(f2::preimage(mat, target));
            if (next.dim() != src->second.dim()) {
                src->second = next;
                changed = true;
            }
        }
    }
    return induced_subquotient(m, w, {}, m.name);
}

CarvedModule omega(const FModule& m) {
    if (!is_unstable(m)) throw NotUnstable(m.name + ": omega needs an unstable module");
    std::map<int, f2::Subspace> z;
    for (const auto& [d, labels] : m.basis) {
        if (labels.empty()) continue;
        if (d % 2 != 0) {
            z.emplace(d, f2::Subspace::full(static_cast<int>(labels.size())));
        } else {
            z.emplace(d, f2::kernel_image(m.sq(d / 2, d)).kernel);
        }
    }
    CarvedModule out = induced_subquotient(m, z, {}, m.name);
    out.module = suspend(out.module, -1);
    return out;
}

CarvedModule omega1(const FModule& m) {
    if (!is_unstable(m)) throw NotUnstable(m.name + ": omega1 needs an unstable module");
    FModule p = phi(m);
    std::map<int, f2::Subspace> z, b;
    for (const auto& [d, labels] : p.basis) {
        if (labels.empty()) continue;
        z.emplace(d, f2::Subspace::full(static_cast<int>(labels.size())));
        f2::Subspace img = f2::kernel_image(m.sq(d / 2, d)).image;
        if (img.dim() > 0) b.emplace(d, img);
    }
    CarvedModule out = induced_subquotient(p, z, b, m.name);
    out.module = suspend(out.module, -1);
    return out;
}

std::string render_vector(const FModule& m, int d, const f2::F2Matrix& v) {
    std::string s;
    for (int c = 0; c < v.cols(); ++c) {
        if (!v.get(0, c)) continue;
        if (!s.empty()) s += '+';
        s += m.label(d, c);
    }
    return s.empty() ? "0" : s;
}

} // namespace destab::amod

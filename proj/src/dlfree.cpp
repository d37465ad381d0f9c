#include "destab/dlfree.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>

#include "destab/errors.hpp"
#include "destab/steenrod.hpp"
#include "destab/threads.hpp"

namespace destab::dl {

int lower_degree(const LowerWord& w, int g) {
    long long d = g;
    for (std::size_t k = w.size(); k-- > 0;) d = 2 * d + w[k];
    return static_cast<int>(d);
}

bool lower_admissible(const LowerWord& w) {
    if (w.empty()) return true;
    if (w[0] < 0) return false;
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (w[k] > w[k + 1]) return false;
    return true;
}

void WordSum::toggle(const LowerWord& w) {
    auto it = terms.find(w);
    if (it == terms.end()) terms.insert(w);
    else terms.erase(it);
}

namespace {

int ceil_half(int r) { return r >= 0 ? (r + 1) / 2 : r / 2; }

std::map<std::tuple<int, LowerWord, int>, WordSum> g_qmemo;
std::mutex g_qmemo_mu;

} // namespace

WordSum apply_upper(int r, const LowerWord& w, int g) {
    {
        std::lock_guard<std::mutex> lk(g_qmemo_mu);
        auto it = g_qmemo.find({r, w, g});
        if (it != g_qmemo.end()) return it->second;
    }
    WordSum out;
    const int dw = lower_degree(w, g);
    const int l = r - dw;                       // lower index of the new operation
    if (l < 0) {
        // unstable: Q^r y = 0 for r < |y|
    } else if (w.empty() || l <= w[0]) {
        LowerWord v;
        v.reserve(w.size() + 1);
        v.push_back(l);
        v.insert(v.end(), w.begin(), w.end());
        out.terms.insert(std::move(v));
    } else {
        // r > 2*sp with sp the upper index of w's outermost operation:
        // Q^r Q^sp = sum_i binom(i-sp-1, 2i-r) Q^{r+sp-i} Q^i
        LowerWord rest(w.begin() + 1, w.end());
        const int sp = w[0] + lower_degree(rest, g);
        for (int i = ceil_half(r); i <= r - sp - 1; ++i) {
            if (!steenrod::binom2(i - sp - 1, 2 * i - r)) continue;
            WordSum inner = apply_upper(i, rest, g);
            for (const auto& t : inner.terms) {
                WordSum outer = apply_upper(r + sp - i, t, g);
                for (const auto& u : outer.terms) out.toggle(u);
            }
        }
    }
    std::lock_guard<std::mutex> lk(g_qmemo_mu);
    g_qmemo.emplace(std::make_tuple(r, w, g), out);
    return out;
}

WordSum normalize_upper(const std::vector<int>& uppers, int g) {
    WordSum acc;
    acc.terms.insert(LowerWord{});
    for (std::size_t k = uppers.size(); k-- > 0;) {   // innermost first
        WordSum next;
        for (const auto& t : acc.terms)
            for (const auto& u : apply_upper(uppers[k], t, g).terms) next.toggle(u);
        acc = std::move(next);
        if (acc.terms.empty()) break;
    }
    return acc;
}

WordSum normalize_lower(const LowerWord& raw, int g) {
    std::vector<int> uppers(raw.size());
    long long d = g;
    for (std::size_t k = raw.size(); k-- > 0;) {
        uppers[k] = raw[k] + static_cast<int>(d);
        d = 2 * d + raw[k];
    }
    return normalize_upper(uppers, g);
}

int monomial_degree(const DLMonomial& m) { return lower_degree(m.idx, m.gen_deg); }

std::string monomial_label(const DLMonomial& m, const amod::FModule& base) {
    const std::string& gl = base.label(m.gen_deg, m.gen_pos);
    if (m.idx.empty()) return gl;
    std::string s = "Q[";
    for (std::size_t k = 0; k < m.idx.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(m.idx[k]);
    }
    return s + "]" + gl;
}

int FreeDLModule::dim(int d) const {
    auto it = basis.find(d);
    return it == basis.end() ? 0 : static_cast<int>(it->second.size());
}

int FreeDLModule::col(int d, const DLMonomial& m) const {
    auto it = basis.find(d);
    if (it == basis.end()) return -1;
    auto lo = std::lower_bound(it->second.begin(), it->second.end(), m);
    if (lo == it->second.end() || !(*lo == m)) return -1;
    return static_cast<int>(lo - it->second.begin());
}

f2::F2Matrix FreeDLModule::row_of(int d, const std::set<DLMonomial>& terms) const {
    f2::F2Matrix row(1, dim(d));
    for (const auto& t : terms) {
        if (monomial_degree(t) != d)
            throw ValidationError("row_of: monomial of degree " +
                                  std::to_string(monomial_degree(t)) + " in degree " +
                                  std::to_string(d));
        int c = col(d, t);
        if (c < 0) throw TruncationInsufficient("row_of: monomial outside built basis");
        row.set(0, c, true);
    }
    return row;
}

namespace {

void enumerate_words(int s, int g, int max_deg, std::vector<DLMonomial>& out, int gen_pos) {
    LowerWord cur(static_cast<std::size_t>(s));
    const long long base = static_cast<long long>(g) << s;
    // choose w_k from the outside in, nondecreasing, total degree <= max_deg
    auto rec = [&](auto&& self, int k, long long partial) -> void {
        if (k == s) {
            out.push_back({g, gen_pos, cur});
            return;
        }
        const int minv = k == 0 ? 0 : cur[k - 1];
        for (int v = minv;; ++v) {
            const long long weight = static_cast<long long>(v) * ((1LL << s) - (1LL << k));
            if (base + partial + weight > max_deg) break;
            cur[k] = v;
            self(self, k + 1, partial + (static_cast<long long>(v) << k));
        }
    };
    rec(rec, 0, 0);
}

struct NishidaCtx {
    const amod::FModule& base;
    std::mutex mu;
    std::map<std::tuple<int, int, LowerWord, int>, std::set<DLMonomial>> memo;
};

void toggle_mon(std::set<DLMonomial>& s, const DLMonomial& m) {
    auto it = s.find(m);
    if (it == s.end()) s.insert(m);
    else s.erase(it);
}

std::set<DLMonomial> nishida_rec(NishidaCtx& ctx, const DLMonomial& mon, int r) {
    if (r == 0) return {mon};
    if (r < 0) return {};
    const std::tuple<int, int, LowerWord, int> key{mon.gen_deg, mon.gen_pos, mon.idx, r};
    {
        std::lock_guard<std::mutex> lk(ctx.mu);
        auto it = ctx.memo.find(key);
        if (it != ctx.memo.end()) return it->second;
    }
    std::set<DLMonomial> out;
    if (mon.idx.empty()) {
        f2::F2Matrix mat = ctx.base.sq(r, mon.gen_deg);
        for (int c = 0; c < mat.cols(); ++c)
            if (mat.get(mon.gen_pos, c)) out.insert({mon.gen_deg - r, c, {}});
    } else {
        DLMonomial rest{mon.gen_deg, mon.gen_pos, LowerWord(mon.idx.begin() + 1, mon.idx.end())};
        const int j = mon.idx[0] + monomial_degree(rest);
        // (Q^j z) Sq^r = sum_i binom(j-r, r-2i) Q^{j-r+i} (z Sq^i)
        for (int i = 0; 2 * i <= r; ++i) {
            if (!steenrod::binom2(j - r, r - 2 * i)) continue;
            for (const auto& t : nishida_rec(ctx, rest, i)) {
                WordSum ws = apply_upper(j - r + i, t.idx, t.gen_deg);
                for (const auto& w : ws.terms) toggle_mon(out, {t.gen_deg, t.gen_pos, w});
            }
        }
    }
    std::lock_guard<std::mutex> lk(ctx.mu);
    ctx.memo.emplace(key, out);
    return out;
}

} // namespace

std::set<DLMonomial> nishida_sq(const amod::FModule& base, const DLMonomial& mon, int r) {
    NishidaCtx ctx{base, {}, {}};
    return nishida_rec(ctx, mon, r);
}

std::set<DLMonomial> apply_q(int i, const DLMonomial& mon) {
    std::set<DLMonomial> out;
    for (const auto& w : apply_upper(i, mon.idx, mon.gen_deg).terms)
        out.insert({mon.gen_deg, mon.gen_pos, w});
    return out;
}

FreeDLModule build_rs(const amod::FModule& m, int s, int max_degree) {
    if (s < 0) throw ValidationError("build_rs: negative weight");
    if (m.max_deg < (max_degree >> s))
        throw TruncationInsufficient("build_rs: " + m.name + " bounded at " +
                                     std::to_string(m.max_deg) + ", generators up to " +
                                     std::to_string(max_degree >> s) + " required");
    FreeDLModule rm;
    rm.base = m;
    rm.s = s;
    rm.max_deg = max_degree;
    rm.mod.name = "R" + std::to_string(s) + "(" + m.name + ")";
    rm.mod.max_deg = max_degree;

    std::vector<DLMonomial> all;
    for (const auto& [g, labels] : m.basis) {
        if (labels.empty() || (static_cast<long long>(g) << s) > max_degree) continue;
        for (int pos = 0; pos < static_cast<int>(labels.size()); ++pos)
            enumerate_words(s, g, max_degree, all, pos);
    }
    for (auto& mon : all) rm.basis[monomial_degree(mon)].push_back(std::move(mon));
    for (auto& [d, mons] : rm.basis) {
        std::sort(mons.begin(), mons.end());
        std::vector<std::string> labels;
        labels.reserve(mons.size());
        for (const auto& mon : mons) labels.push_back(monomial_label(mon, m));
        rm.mod.basis[d] = std::move(labels);
    }
    if (rm.basis.empty()) return rm;

    const int lowest = rm.basis.begin()->first;
    std::vector<int> degs;
    for (const auto& [d, mons] : rm.basis) degs.push_back(d);
    std::vector<std::vector<std::pair<int, f2::F2Matrix>>> built(degs.size());

    NishidaCtx ctx{m, {}, {}};
    parallel_for(static_cast<int>(degs.size()), [&](int di) {
        const int d = degs[static_cast<std::size_t>(di)];
        const auto& mons = rm.basis.at(d);
        for (int r = 1; d - r >= lowest; ++r) {
            const int e = d - r;
            if (rm.dim(e) == 0) continue;
            f2::F2Matrix mat(static_cast<int>(mons.size()), rm.dim(e));
            bool nonzero = false;
            for (int row = 0; row < static_cast<int>(mons.size()); ++row) {
                for (const auto& t : nishida_rec(ctx, mons[row], r)) {
                    int c = rm.col(e, t);
                    if (c < 0) throw TruncationInsufficient("build_rs: action escapes basis");
                    mat.set(row, c, true);
                    nonzero = true;
                }
            }
            if (nonzero) built[di].emplace_back(r, std::move(mat));
        }
    });
    for (std::size_t di = 0; di < degs.size(); ++di)
        for (auto& [r, mat] : built[di]) rm.mod.act[{r, degs[di]}] = std::move(mat);
    return rm;
}

namespace {

void require_pair(bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("structure map: ") + what);
}

} // namespace

amod::GradedMap epsilon(const FreeDLModule& a, const FreeDLModule& b) {
    require_pair(a.s == b.s && a.s >= 0, "epsilon needs equal weights");
    require_pair(amod::modules_equal(amod::suspend(a.base, 1), b.base),
                 "epsilon needs b over the suspended base");
    amod::GradedMap g;
    g.shift = 1;
    for (const auto& [d, mons] : a.basis) {
        if (mons.empty() || d + 1 > b.max_deg) continue;
        f2::F2Matrix mat(static_cast<int>(mons.size()), b.dim(d + 1));
        bool nonzero = false;
        for (int row = 0; row < static_cast<int>(mons.size()); ++row) {
            const DLMonomial& mon = mons[row];
            if (!mon.idx.empty() && mon.idx[0] == 0) continue;   // dies: Q_{-1} = 0 after the shift
            DLMonomial t{mon.gen_deg + 1, mon.gen_pos, mon.idx};
            for (auto& v : t.idx) --v;
            int c = b.col(d + 1, t);
            if (c < 0) throw TruncationInsufficient("epsilon: target outside built basis");
            mat.set(row, c, true);
            nonzero = true;
        }
        if (nonzero) g.mats[d] = std::move(mat);
    }
    return g;
}

amod::GradedMap q0_map(const FreeDLModule& a, const FreeDLModule& b) {
    require_pair(b.s == a.s + 1, "q0 raises weight by one");
    require_pair(amod::modules_equal(a.base, b.base), "q0 needs matching bases");
    amod::GradedMap g;
    g.shift = 0;
    for (const auto& [d, mons] : a.basis) {
        if (mons.empty() || 2 * d > b.max_deg) continue;
        f2::F2Matrix mat(static_cast<int>(mons.size()), b.dim(2 * d));
        for (int row = 0; row < static_cast<int>(mons.size()); ++row) {
            DLMonomial t = mons[row];
            t.idx.insert(t.idx.begin(), 0);           // bottom operation, always admissible
            int c = b.col(2 * d, t);
            if (c < 0) throw TruncationInsufficient("q0: target outside built basis");
            mat.set(row, c, true);
        }
        g.mats[2 * d] = std::move(mat);               // keyed by Phi-degree
    }
    return g;
}

amod::GradedMap chain_d(const FreeDLModule& a, const FreeDLModule& b) {
    require_pair(b.s == a.s + 1, "chain differential raises weight by one");
    require_pair(amod::modules_equal(amod::suspend(a.base, 1), b.base),
                 "chain differential needs b over the suspended base");
    amod::GradedMap g;
    g.shift = 0;
    const int base_lo = a.base.min_deg();
    for (const auto& [d, mons] : a.basis) {
        if (mons.empty() || d > b.max_deg) continue;
        f2::F2Matrix mat(static_cast<int>(mons.size()), b.dim(d));
        bool nonzero = false;
        for (int row = 0; row < static_cast<int>(mons.size()); ++row) {
            const DLMonomial& mon = mons[row];
            const int gd = mon.gen_deg;
            std::set<DLMonomial> acc;
            // sum over i of the word extended by Q_{2i-gd-2} over sigma(x Sq^i)
            for (int i = 0; gd - i >= base_lo; ++i) {
                const int inner = 2 * i - gd - 2;
                if (inner < 0) continue;
                f2::F2Matrix row_i = a.base.sq(i, gd);
                for (int c = 0; c < row_i.cols(); ++c) {
                    if (!row_i.get(mon.gen_pos, c)) continue;
                    LowerWord word = mon.idx;
                    word.push_back(inner);
                    for (const auto& w : normalize_lower(word, gd - i + 1).terms)
                        toggle_mon(acc, {gd - i + 1, c, w});
                }
            }
            for (const auto& t : acc) {
                int c = b.col(d, t);
                if (c < 0) throw TruncationInsufficient("chain_d: target outside built basis");
                mat.set(row, c, true);
                nonzero = true;
            }
        }
        if (nonzero) g.mats[d] = std::move(mat);
    }
    return g;
}

} // namespace destab::dl

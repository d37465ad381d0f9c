/* Acceptance suite: twelve end-to-end checks, one pass/fail line each, all
   arithmetic exact over F2. Exits 0 only if every criterion holds. */

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "destab/amodule.hpp"
#include "destab/dlfree.hpp"
#include "destab/f2linalg.hpp"
#include "destab/hopfss.hpp"
#include "destab/modlib.hpp"
#include "destab/singer.hpp"
#include "destab/steenrod.hpp"
#include "dl_oracle.hpp"
#include "hopf_oracle.hpp"

using namespace destab;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string loc(const std::string& base, int a, int b) {
    return base + " at (" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

/* The shared fixture pool. Finite modules are lifted to the wanted bound;
   truncations keep their own (the window shrinks with them). */
struct Fixture {
    amod::FModule m;
    int w = 0;
};

std::vector<Fixture> fixtures(int want) {
    std::vector<Fixture> out;
    for (const char* name : {"sphere:0", "sphere:2", "rp:3", "rp:4", "cp2-desusp", "rp4-ext",
                             "dual-steenrod:10"}) {
        amod::FModule m = modlib::builtin(name, want);
        int w = std::min(want, m.max_deg);
        out.push_back({std::move(m), w});
    }
    return out;
}

/* ---- criterion 1: rewriting soundness ----------------------------------- */

/* Order-exploring oracle for the squaring-operation rewriter: at every word,
   branch over each droppable unit and each inadmissible adjacent pair; all
   branches must land on the same normal form. */
using SqMemo = std::map<steenrod::SqWord, std::set<steenrod::SqWord>>;

const std::set<steenrod::SqWord>& sq_explore(const steenrod::SqWord& w, SqMemo& memo, bool& ok) {
    auto hit = memo.find(w);
    if (hit != memo.end()) return hit->second;

    bool first = true;
    std::set<steenrod::SqWord> result;
    auto consider = [&](std::set<steenrod::SqWord> branch) {
        if (first) {
            result = std::move(branch);
            first = false;
        } else if (branch != result) {
            ok = false;
        }
    };
    auto toggle_all = [](std::set<steenrod::SqWord>& acc, const std::set<steenrod::SqWord>& add) {
        for (const auto& t : add) {
            auto it = acc.find(t);
            if (it == acc.end()) acc.insert(t);
            else acc.erase(it);
        }
    };

    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] != 0) continue;
        steenrod::SqWord nw = w;
        nw.erase(nw.begin() + static_cast<long>(k));
        consider(sq_explore(nw, memo, ok));
    }
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        const int a = w[k], b = w[k + 1];
        if (a >= 2 * b || b == 0 || a == 0) continue;
        std::set<steenrod::SqWord> branch;
        for (int j = 0; j <= a / 2; ++j) {
            if (!steenrod::binom2(b - 1 - j, a - 2 * j)) continue;
            steenrod::SqWord nw = w;
            nw[k] = a + b - j;
            nw[k + 1] = j;
            toggle_all(branch, sq_explore(nw, memo, ok));
        }
        consider(std::move(branch));
    }
    if (first) result.insert(w);
    return memo.emplace(w, std::move(result)).first->second;
}

void criterion_rewriting() {
    // squaring operations: words of length <= 3, degree <= 24, exhaustively
    SqMemo memo;
    bool ok = true;
    long checked = 0;
    auto check_sq = [&](const steenrod::SqWord& w) {
        const auto& oracle = sq_explore(w, memo, ok);
        expect(ok, "rewrite branches disagree");
        auto norm = steenrod::adem_normalize_sq(w);
        expect(norm.terms == oracle, "normal form differs from the oracle");
        for (const auto& t : norm.terms) {
            expect(steenrod::sq_admissible(t), "normal form contains an inadmissible word");
            expect(steenrod::adem_normalize_sq(t).terms == std::set<steenrod::SqWord>{t},
                   "normalization is not idempotent");
        }
        ++checked;
    };
    for (int a = 1; a <= 24; ++a) check_sq({a});
    for (int a = 1; a <= 24; ++a)
        for (int b = 1; a + b <= 24; ++b) check_sq({a, b});
    for (int a = 1; a <= 24; ++a)
        for (int b = 1; a + b <= 24; ++b)
            for (int c = 1; a + b + c <= 24; ++c) check_sq({a, b, c});

    // lower-operation calculus over generators of several degrees
    for (int g : {0, 1, 2, 3}) {
        dloracle::Memo dmemo;
        auto check_dl = [&](const dloracle::Upper& w) {
            auto [agree, oracle] = dloracle::normalize_all_orders(w, g, &dmemo);
            expect(agree, "lower-rewrite branches disagree");
            auto norm = dl::normalize_upper(w, g);
            expect(norm.terms == oracle, "lower normal form differs from the oracle");
            for (const auto& t : norm.terms) {
                expect(dl::lower_admissible(t), "inadmissible term in a normal form");
                expect(dl::normalize_lower(t, g).terms == std::set<dl::LowerWord>{t},
                       "lower normalization is not idempotent");
            }
            ++checked;
        };
        for (int r = 0; g + r <= 24; ++r) check_dl({r});
        for (int r = 0; g + r <= 24; ++r)
            for (int s = 0; g + r + s <= 24; ++s) check_dl({r, s});
        for (int r = 0; g + r <= 24; ++r)
            for (int s = 0; g + r + s <= 24; ++s)
                for (int t = 0; g + r + s + t <= 24; ++t) check_dl({r, s, t});
    }
    expect(checked > 10000, "the exhaustive window is implausibly small");

    // the pinned vanishing: Q^3 Q^1 on a class of degree one
    expect(dl::normalize_upper({3, 1}, 1).terms.empty(), "Q^3 Q^1 x != 0 for |x| = 1");
}

/* ---- criterion 2: the dimension identity of the splitting ---------------- */

void criterion_ses_dims() {
    for (const char* name : {"sphere:0", "rp:4", "cp2-desusp", "rp4-ext"}) {
        amod::FModule m = modlib::builtin(name, 24);
        amod::FModule sm = amod::suspend(m, 1);
        std::vector<dl::FreeDLModule> rs, rss;
        for (int s = 0; s <= 4; ++s) rs.push_back(dl::build_rs(m, s, 24));
        for (int s = 0; s <= 4; ++s) rss.push_back(dl::build_rs(sm, s, 25));
        for (int s = 1; s <= 4; ++s)
            for (int n = 0; n <= 24; ++n) {
                const int doubled = n % 2 == 0 ? rs[s - 1].dim(n / 2) : 0;
                const int desusp = rss[s].dim(n + 1);
                expect(rs[s].dim(n) == doubled + desusp,
                       std::string(name) + ": " + loc("splitting fails", s, n));
            }
    }
}

/* ---- criterion 3: the differential squares to zero ----------------------- */

void criterion_d_squared() {
    bool any = false;
    for (const auto& [m, w] : fixtures(20)) {
        auto c = singer::build_singer(m, 5, w);
        for (int s = 0; s + 2 <= 5; ++s)
            for (int t = 0; t <= w; ++t) {
                auto a = amod::map_at(c.diffs[s], t - 1, c.dim(s, t), c.dim(s + 1, t));
                auto b = amod::map_at(c.diffs[s + 1], t - 1, c.dim(s + 1, t), c.dim(s + 2, t));
                if (!a.is_zero()) any = true;
                expect(a.mul(b).is_zero(), m.name + ": " + loc("d.d != 0", s, t));
            }
    }
    expect(any, "every differential was zero; the check is vacuous");
}

/* ---- criterion 4: stage zero equals the unstable part -------------------- */

void criterion_h0() {
    for (const auto& [m, w] : fixtures(20)) {
        auto u = amod::unstable_part(m);
        auto d0 = singer::derived_functor(m, 0, w);
        for (int t = 0; t <= w; ++t) {
            expect(d0.module.dim(t) == u.module.dim(t), m.name + ": stage-zero dim at " +
                                                            std::to_string(t));
            if (d0.module.dim(t) == 0) continue;
            const auto& cd = d0.cells.at(t);
            const auto& cu = u.cells.at(t);
            expect(cd.b().dim() == 0, m.name + ": stage zero has boundaries");
            expect(cd.z() == cu.z(),
                   m.name + ": subspaces differ at degree " + std::to_string(t));
        }
    }
}

/* ---- criterion 5: unstable input collapses ------------------------------- */

void criterion_unstable_collapse() {
    for (const char* name : {"rp:4", "rp4-ext", "sphere:1", "sphere:2"}) {
        amod::FModule wide = modlib::builtin(name, 19);
        amod::FModule m = modlib::builtin(name, 16);
        for (int s = 0; s <= 3; ++s) {
            auto l = singer::l_functor(wide, s, 16);
            auto r = dl::build_rs(m, s, 16);
            for (int d = 0; d <= 16; ++d)
                expect(l.dim(d) == r.dim(d), std::string(name) + ": " + loc("L != R", s, d));
        }
        auto run = hss::run_ss(m, 3, 16);
        for (const auto& p : run.pages)
            expect(p.diff.empty(),
                   std::string(name) + ": page " + std::to_string(1 << p.s) +
                       " has a differential");
        expect(run.einf.table == hss::uq_series(run.pages[0].barcode, 16).table,
               std::string(name) + ": the limit differs from the first page");
    }
}

/* ---- criterion 6: acyclicity of the dual algebra ------------------------- */

void criterion_acyclic() {
    amod::FModule a14 = modlib::builtin("dual-steenrod:14");
    for (int n = 0; n <= 2; ++n) {
        amod::FModule m = amod::suspend(a14, n);
        auto c = singer::build_singer(m, 4, 14 + n);
        if (n == 0)
            expect(singer::derived_functor(c, 0).module.total_dim() == 1,
                   "stage zero of the dual algebra should be one class");
        for (int s = 1; s <= 3; ++s)
            expect(singer::derived_functor(c, s).module.total_dim() == 0,
                   loc("nonzero higher stage", n, s));
    }
}

/* ---- criterion 7: the long exact sequence ------------------------------- */

void criterion_les() {
    const std::pair<const char*, int> cases[] = {
        {"rp:3", 16}, {"cp2-desusp", 16}, {"dual-steenrod:10", 10}};
    for (const auto& [name, w] : cases) {
        auto r = singer::les_check(modlib::builtin(name, w), 3, w);
        expect(r.ok, std::string(name) + ": " + r.detail);
    }
}

/* ---- criterion 8: Eilenberg-MacLane series ------------------------------- */

std::map<std::pair<int, int>, long long> einf_table(const char* name, int max_row) {
    auto run = hss::run_ss(modlib::builtin(name), 3, max_row);
    std::map<std::pair<int, int>, long long> t;
    for (const auto& [key, val] : run.einf.table)
        if (val != 0) t[key] = val;
    return t;
}

void criterion_em_series() {
    auto poly = [](int max_row) { // Z/2[x], |x| = 0: one class at (-e, e)
        std::map<std::pair<int, int>, long long> t;
        for (int e = 0; e <= max_row; ++e) t[{-e, e}] = 1;
        return t;
    };
    expect(einf_table("hz:12", 10) == poly(10), "the integral dual is not a polynomial ring");

    auto expected = poly(10); // Z/2[x] tensor an exterior class at (-1, 2)
    for (int e = 0; e + 2 <= 10; ++e) expected[{-e - 1, e + 2}] += 1;
    expect(einf_table("hz-mod4:12", 10) == expected,
           "the mod-4 dual is not polynomial tensor exterior");

    expect(einf_table("hz-mod4-desusp:12", 8) == poly(8),
           "the desuspended mod-4 dual is not a polynomial ring");
}

/* ---- criterion 9: the desuspended projective plane ----------------------- */

void criterion_cp2_desusp() {
    amod::FModule m = modlib::builtin("cp2-desusp", 12);
    auto run = hss::run_ss(m, 2, 9);

    const auto& p0 = run.pages[0];
    expect(p0.diff.size() == 1 && p0.diff.count(3) == 1, "first page: wrong differential support");
    expect(p0.diff.at(3) == f2::F2Matrix::identity(1), "first page: d(y) != Q[0]x");
    expect(p0.cols[0].module.label(3, 0) == "y", "first page: wrong source label");
    expect(p0.cols[1].module.label(2, 0) == "Q[0]x", "first page: wrong target label");

    const auto& p1 = run.pages[1];
    expect(p1.cols[1].module.dim(6) == 2, "second page: wrong cell over the survivor");
    expect(p1.diff.count(6) == 0, "second page: a differential leaves degree six");

    bool born = false;
    for (const auto& b : run.linf_bars) born |= b.k == 1 && b.d == 6;
    expect(born, "no primitive is born at column one, degree six");

    // the squared generator survives and sits outside the image of the operations
    auto rs1 = dl::build_rs(m, 1, 8);
    int col = rs1.col(6, dl::DLMonomial{3, 0, {0}});
    expect(col >= 0, "Q[0]y is missing from the free module");
    f2::F2Matrix e(1, rs1.dim(6));
    e.set(0, col, true);

    auto tower = singer::build_l_tower(m, 1, 8);
    const auto& cell = tower.ls[1].cells.at(6);
    expect(cell.z().contains(e), "Q[0]y is not a cycle");
    f2::F2Matrix survivor = cell.project(e);
    expect(!survivor.is_zero(), "Q[0]y dies in the limit");

    f2::F2Matrix one(1, 1);
    one.set(0, 0, true);
    f2::F2Matrix image = singer::q_on_l(tower, 5, 0, 1, one); // Q^5 on the degree-one class
    expect(!f2::Subspace::from_rows(image).contains(survivor),
           "the survivor lies in the span of the operations on column zero");
}

/* ---- criterion 10: the truncated-projective chart ------------------------ */

void criterion_rp4_ext_chart() {
    auto run = hss::run_ss(modlib::builtin("rp4-ext", 8), 4, 8);
    const auto& p0 = run.pages[0];
    auto table = hss::uq_series(p0.barcode, 8).table;

    const std::map<int, long long> col1 = {{2, 1}, {3, 2}, {4, 2}, {5, 2}, {6, 1}};
    for (int r = 0; r <= 8; ++r) {
        auto it = table.find({-1, r});
        long long have = it == table.end() ? 0 : it->second;
        auto want = col1.find(r);
        expect(have == (want == col1.end() ? 0 : want->second),
               loc("column -1 differs", -1, r));
    }
    const std::map<int, std::vector<std::string>> labels = {
        {1, {"a1"}}, {2, {"a2", "b1"}}, {3, {"a3", "b2"}}, {4, {"a4", "b3"}}, {5, {"b4"}}};
    for (const auto& [d, want] : labels) {
        expect(p0.cols[0].module.dim(d) == static_cast<int>(want.size()),
               "column zero has the wrong size at degree " + std::to_string(d));
        for (std::size_t i = 0; i < want.size(); ++i)
            expect(p0.cols[0].module.label(d, static_cast<int>(i)) == want[i],
                   "column zero is labeled oddly at degree " + std::to_string(d));
    }
    for (int k = 1; k <= 4; ++k) {
        auto it = table.find({-k, 2 * k});
        expect(it != table.end() && it->second == 1, loc("bottom entry missing", -k, 2 * k));
        for (int r = 0; r < 2 * k; ++r)
            expect(table.count({-k, r}) == 0 || table.at({-k, r}) == 0,
                   loc("entry below the bottom diagonal", -k, r));
    }
}

/* ---- criterion 11: page transitions ------------------------------------- */

void criterion_transitions() {
    for (const auto& [m, w] : fixtures(12)) {
        auto run = hss::run_ss(m, 4, w); // verifies its own page transitions
        for (int s = 0; s <= 3; ++s) {
            const auto& prev = run.pages[s];
            const auto& next = run.pages[s + 1];
            auto hom = hss::page_homology(prev.diff_barcode());
            auto rank_at = [&](int dd) {
                auto it = prev.diff.find(dd);
                return it == prev.diff.end() ? 0 : f2::kernel_image(it->second).image.dim();
            };
            const int capk = std::min(hom.cap[s], next.barcode.cap[s]);
            for (int d = 0; d <= capk; ++d) {
                const int formula = prev.barcode.dim(s, d) - rank_at(d);
                expect(hom.dim(s, d) == formula, m.name + ": " + loc("kernel rank", s, d));
                expect(next.barcode.dim(s, d) == formula,
                       m.name + ": " + loc("kernel column", s, d));
            }
            auto l = singer::l_functor(m, s, std::min(capk, m.max_deg - s));
            for (int d = 0; d <= std::min(capk, m.max_deg - s); ++d)
                expect(next.barcode.dim(s, d) == l.dim(d),
                       m.name + ": " + loc("kernel is not the loop functor", s, d));
            const int capc = std::min(hom.cap[s + 1], next.barcode.cap[s + 1]);
            for (int d = 0; d <= capc; ++d) {
                const int formula = prev.barcode.dim(s + 1, d) - rank_at(d + 1);
                expect(hom.dim(s + 1, d) == formula, m.name + ": " + loc("coker rank", s, d));
                expect(next.barcode.dim(s + 1, d) == formula,
                       m.name + ": " + loc("coker column", s, d));
            }
        }
    }

    // the homology formula against monomial-by-monomial enumeration
    std::mt19937 rng(20260814);
    for (int i = 0; i < 50; ++i) {
        auto p = horacle::random_instance(rng);
        const int cap = horacle::safe_rowcap(p.v, 12);
        expect(horacle::d_squared_zero(p, cap), "a random instance violates d.d = 0");
        auto direct = horacle::homology_dims(p, cap);
        std::map<std::pair<int, int>, long long> formula;
        for (const auto& [key, val] : hss::uq_series(hss::page_homology(p), cap).table)
            if (val != 0) formula[key] = val;
        expect(direct == formula,
               "homology formula differs from enumeration on instance " + std::to_string(i));
    }
}

/* ---- criterion 12: the two loop-functor routes --------------------------- */

void criterion_l_routes() {
    for (const auto& [m, w] : fixtures(12))
        for (int s = 0; s <= 3; ++s)
            singer::l_functor(m, s, m.max_deg - s); // RouteMismatch on disagreement
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"operation rewriting is confluent, idempotent, and kills Q^3 Q^1 on degree one",
         criterion_rewriting},
        {"free-module dimensions split as doubling plus desuspension", criterion_ses_dims},
        {"the chain differential squares to zero", criterion_d_squared},
        {"stage-zero homology is the largest unstable submodule", criterion_h0},
        {"unstable input: homology is free and the spectral sequence collapses",
         criterion_unstable_collapse},
        {"the dual algebra and its suspensions are acyclic at positive stages",
         criterion_acyclic},
        {"the suspension long exact sequence is exact", criterion_les},
        {"Eilenberg-MacLane limits match the stated series", criterion_em_series},
        {"desuspended projective plane: differential, survivor, and primitive",
         criterion_cp2_desusp},
        {"truncated-projective chart pins its first column and bottom diagonal",
         criterion_rp4_ext_chart},
        {"page transitions match the independent routes and the brute-force oracle",
         criterion_transitions},
        {"the two loop-functor routes agree on every fixture", criterion_l_routes},
    };

    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string verdict = "PASS", detail;
        try {
            criteria[i].second();
            ++passed;
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = std::string("  [") + e.what() + "]";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu: %s  %s (%.1fs)%s\n", i + 1, verdict.c_str(),
                    criteria[i].first.c_str(), secs, detail.c_str());
    }
    std::printf("acceptance: %d/12 passed\n", passed);
    return passed == 12 ? 0 : 1;
}

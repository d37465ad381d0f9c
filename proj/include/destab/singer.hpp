#ifndef DESTAB_SINGER_HPP
#define DESTAB_SINGER_HPP

#include <map>
#include <string>
#include <vector>

#include "destab/amodule.hpp"
#include "destab/dlfree.hpp"
#include "destab/f2linalg.hpp"

namespace destab::singer {

/* The chain complex whose stage s is the suspension of the weight-s free
   module over suspend(m, s-1); its homology computes the derived functors of
   destabilization. Total degree t of stage s corresponds to degree t-1 inside
   stages[s]; the differentials preserve t. Every stage is exact for t <=
   max_total (the binding constraint is stage 0 = desuspension of m). */
struct SingerComplex {
    amod::FModule m;
    int max_stage = 0;
    int max_total = 0;
    std::vector<dl::FreeDLModule> stages;     // 0..max_stage
    std::vector<amod::GradedMap> diffs;       // diffs[s]: stage s -> s+1, keyed by t-1

    int dim(int s, int t) const;
};

/* Builds stages 0..max_stage and checks d.d = 0 on every represented degree
   (CompositeNonzero otherwise). Requires max_total <= m.max_deg. */
SingerComplex build_singer(const amod::FModule& m, int max_stage, int max_total);

/* Homology at one stage, materialized as a module (graded by total degree,
   with the Steenrod action induced from the ambient stage — the induction
   doubles as a runtime check that the differential is action-linear).
   cells[t] ties classes to ambient stage-s coordinates at degree t-1. */
struct DerivedResult {
    int s = 0;
    int max_total = 0;
    amod::FModule module;
    std::map<int, f2::Subquotient> cells;

    int dim(int t) const { return module.dim(t); }
};

/* Needs the complex through stage s+1. */
DerivedResult derived_functor(const SingerComplex& c, int s);
DerivedResult derived_functor(const amod::FModule& m, int s, int max_total);

/* The loop-adjusted derived functor, graded so that degree d sits over the
   weight-s free module on m itself: cells[d] is a subquotient of R_s(m)_d
   whose boundaries come from the chain differential. Computed two ways —
   kernel of sq0 on the homology over suspend(m, 1-s), and image of the
   desuspension map from the homology over suspend(m, -s) — and compared
   degree by degree (RouteMismatch on disagreement). */
struct LResult {
    int s = 0;
    int max_deg = 0;
    amod::FModule module;                     // graded by d, unstable
    std::map<int, f2::Subquotient> cells;

    int dim(int d) const { return module.dim(d); }
};

/* L data for every weight 0..max_s over a shared family of complexes, so the
   lower-operation action between consecutive weights can be evaluated.
   ls[s] is exact for degrees <= min(max_deg, m.max_deg - s). */
struct LTower {
    amod::FModule m;
    int max_s = 0;
    std::vector<SingerComplex> complexes;     // [j] over suspend(m, 1-j), j = 0..max_s+1
    std::vector<LResult> ls;                  // 0..max_s
};

LTower build_l_tower(const amod::FModule& m, int max_s, int max_deg);

/* Throws TruncationInsufficient when max_deg > m.max_deg - s. */
LResult l_functor(const amod::FModule& m, int s, int max_deg);

/* Q^i on a class of ls[s] at degree d, given and returned in homology
   coordinates: lift, apply the upper-index operation, check the result is a
   legitimate class and independent of the lift (NotACycle otherwise). */
f2::F2Matrix q_on_l(const LTower& t, int i, int s, int d, const f2::F2Matrix& coords);

/* The four-term-periodic long exact sequence tying the derived functors of m
   and suspend(m, 1) through sq0 and the bottom operation; checks exactness at
   every slot for total degrees <= max_total and stages < max_stage. */
struct LesReport {
    bool ok = true;
    std::string detail;                       // first failure location
};

LesReport les_check(const amod::FModule& m, int max_stage, int max_total);

} // namespace destab::singer

#endif

#ifndef DESTAB_DLFREE_HPP
#define DESTAB_DLFREE_HPP

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "destab/amodule.hpp"
#include "destab/f2linalg.hpp"

namespace destab::dl {

/* Lower-index words: Q_{w0} Q_{w1} ... applied right to left, w0 outermost.
   Over a degree-g generator, Q_i y = Q^{|y|+i} y raises degree to 2|y| + i, so
   deg(Q_w x) = 2^s g + sum w_k 2^k. A word is admissible when
   0 <= w0 <= w1 <= ... <= w_{s-1}; those monomials form the basis. */
using LowerWord = std::vector<int>;

int lower_degree(const LowerWord& w, int g);
bool lower_admissible(const LowerWord& w);

struct WordSum {
    std::set<LowerWord> terms;
    void toggle(const LowerWord& w);
};

/* Q^r (upper index) applied to an admissible word over a degree-g generator,
   rewritten to admissible form: Q^r Q^s = sum binom(i-s-1, 2i-r) Q^{r+s-i} Q^i
   for r > 2s, and Q^r y = 0 when r < |y|. Memoized globally (pure in r, w, g). */
WordSum apply_upper(int r, const LowerWord& w, int g);

/* Normalize a full word of upper indices (outermost first) over a degree-g
   generator. */
WordSum normalize_upper(const std::vector<int>& uppers, int g);

/* Normalize a raw lower-index word (entries may be negative or out of order). */
WordSum normalize_lower(const LowerWord& raw, int g);

struct DLMonomial {
    int gen_deg = 0;
    int gen_pos = 0;                 // column in the base module at gen_deg
    LowerWord idx;
    auto operator<=>(const DLMonomial&) const = default;
};

int monomial_degree(const DLMonomial& m);
std::string monomial_label(const DLMonomial& m, const amod::FModule& base);

/* The weight-s free module: admissible monomials over the base module's basis,
   with the Steenrod action transported through the Nishida relations
   (Q^j z) Sq^r = sum_i binom(j-r, r-2i) Q^{j-r+i} (z Sq^i). `mod` is the plain
   module view (labels + action matrices); `basis` keeps the monomial data the
   structure maps need. Authoritative for degrees <= max_deg. */
struct FreeDLModule {
    amod::FModule base;
    int s = 0;
    int max_deg = 0;
    std::map<int, std::vector<DLMonomial>> basis;    // sorted per degree
    amod::FModule mod;

    int dim(int d) const;
    int col(int d, const DLMonomial& m) const;       // -1 if absent
    f2::F2Matrix row_of(int d, const std::set<DLMonomial>& terms) const;
};

/* Throws TruncationInsufficient when m's bound cannot cover generators of
   monomials of degree <= max_degree. build_rs(m, 0, m.max_deg) is m itself. */
FreeDLModule build_rs(const amod::FModule& m, int s, int max_degree);

/* Sq^r on one monomial, fully normalized (slow path without a shared cache). */
std::set<DLMonomial> nishida_sq(const amod::FModule& base, const DLMonomial& mon, int r);

/* Q^i (upper) on a monomial at weight s, landing in weight s+1. */
std::set<DLMonomial> apply_q(int i, const DLMonomial& mon);

/* Structure maps. Sources/targets are built modules; maps are per-degree
   matrices in their basis orders.

   epsilon: R_s(M) -> R_s(sigma M) desuspended, so mats[d] lands in degree d+1
   of b. Drops monomials with w0 = 0, shifts every index down one, suspends the
   generator; at weight 0 it is the plain suspension of generators. Requires
   b.base = suspend(a.base, 1), b.s = a.s.

   q0_map: Phi(R_{s-1} M) -> R_s(M), keyed by Phi-degree 2d, prepends Q_0.
   Requires b.base = a.base, b.s = a.s + 1.

   chain_d: R_s(N) -> R_{s+1}(sigma N), degree-preserving: on a monomial over
   x of degree g, sum over i >= 0 of the word extended by inner index 2i-g-2
   over the suspended generator sigma(x Sq^i). Requires b.base = suspend(a.base, 1),
   b.s = a.s + 1. */
amod::GradedMap epsilon(const FreeDLModule& a, const FreeDLModule& b);
amod::GradedMap q0_map(const FreeDLModule& a, const FreeDLModule& b);
amod::GradedMap chain_d(const FreeDLModule& a, const FreeDLModule& b);

} // namespace destab::dl

#endif

#ifndef DESTAB_STEENROD_HPP
#define DESTAB_STEENROD_HPP

#include <set>
#include <vector>

namespace destab::steenrod {

/* Binomial coefficient mod 2 via digit comparison in the 2-adic expansion:
   zero for b < 0, else 1 iff every binary digit of b is <= the matching digit
   of a. Negative a carries an infinite tail of 1s (two's complement), so e.g.
   binom2(-1, k) = 1 for all k >= 0. */
int binom2(long long a, long long b);

/* A word Sq^{i_1} Sq^{i_2} ... Sq^{i_k}, entries >= 1, outermost first; the
   empty word is the unit. Admissible means i_j >= 2 i_{j+1}. */
using SqWord = std::vector<int>;

int sq_degree(const SqWord& w);
bool sq_admissible(const SqWord& w);

/* F2 sums of admissible words. */
struct SqSum {
    std::set<SqWord> terms;
    void toggle(const SqWord& w);
    void add(const SqSum& o);
    bool operator==(const SqSum& o) const { return terms == o.terms; }
};

/* Rewrite an arbitrary word (entries >= 0; Sq^0 is dropped as the unit) into its
   admissible normal form: Sq^a Sq^b = sum_j binom2(b-1-j, a-2j) Sq^{a+b-j} Sq^j
   for a < 2b, applied at the rightmost inadmissible pair until none remain.
   Idempotent, and independent of rewrite order (tested exhaustively). */
SqSum adem_normalize_sq(const SqWord& w);

SqSum multiply(const SqSum& x, const SqSum& y);

/* All admissible words of the given degree, sorted lexicographically. */
std::vector<SqWord> admissible_basis(int degree);

} // namespace destab::steenrod

#endif

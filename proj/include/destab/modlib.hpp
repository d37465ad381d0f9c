#ifndef DESTAB_MODLIB_HPP
#define DESTAB_MODLIB_HPP

#include <string>
#include <vector>

#include "destab/amodule.hpp"

namespace destab::modlib {

/* Built-in module catalogue. Names:

     sphere:N            one class in degree N
     rp:N                reduced homology of RP^N  (a_n Sq^i = binom2(n-i, i) a_{n-i})
     rp4-ext             rp:4 plus a suspended copy (classes a1..a4, b1..b4)
     cp2-desusp          x in degree 1, y in degree 3, y Sq^2 = x
     dual-steenrod:D     dual Steenrod algebra through degree D
     hz:D                dual of A/A Sq^1 through degree D
     hz-mod4:D           hz:D plus a suspended copy (degree-0 x and degree-1 y)
     hz-mod4-desusp:D    hz-mod4:D shifted down once (bottom class in degree -1)

   The hz-mod4 pair stands in for every Z/2^r with r >= 2: those homologies all
   split the same way, and the module sees only the splitting.

   Finite catalogue entries are exact in every degree, so their stated bound may
   be raised freely; min_bound does that (ignored by the :D truncations, whose
   bound is part of the data). Throws UnknownName. */
amod::FModule builtin(const std::string& name, int min_bound = -1);

/* One line per catalogue pattern, for help text. */
std::vector<std::string> builtin_help();

/* Dual of the quotient of the Steenrod algebra by the left ideal generated by
   the listed Sq^k, as a right module through degree bound; empty list gives the
   dual of the whole algebra. Bounds above 32 throw TruncationInsufficient. */
amod::FModule dual_quotient(const std::vector<int>& kill, int bound, const std::string& name);

/* Degreewise direct sum; the stated bound is the smaller of the two. Labels
   must stay unique, so relabel first if the summands overlap. */
amod::FModule direct_sum(const amod::FModule& a, const amod::FModule& b, const std::string& name);

amod::FModule prefix_labels(const amod::FModule& m, const std::string& prefix);

/* Module files: UTF-8 JSON with exactly the keys
     name          string
     max_degree    int
     generators    [{id, deg}]          ids globally unique
     actions       [{sq, on, value}]    sq >= 1, value a list of ids in degree
                                        deg(on) - sq; omitted actions are zero
   Unknown keys are rejected. parse/load throw ParseError naming the offending
   spot, then run the full module validation. */
amod::FModule parse_module(const std::string& text, const std::string& origin);
amod::FModule load(const std::string& path);
std::string serialize(const amod::FModule& m);
void save(const amod::FModule& m, const std::string& path);

} // namespace destab::modlib

#endif

#ifndef DESTAB_HOPFSS_HPP
#define DESTAB_HOPFSS_HPP

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "destab/amodule.hpp"
#include "destab/f2linalg.hpp"
#include "destab/singer.hpp"

namespace destab::hss {

/* Primitive data of a primitively generated Hopf algebra: column k holds a
   graded coordinate space of weight 2^k and q doubles the internal degree,
   qmaps[k][d] : cols[k][d] -> cols[k+1][2d]. Data is complete for degrees
   <= cap[k]; within the caps an absent entry is the zero map, above them no
   claim is made. A class of column k and internal degree d sits at chart
   position (-2^k, 2^k + d). */
struct BarcodeModule {
    std::vector<std::map<int, int>> cols;            // nonzero dims per internal degree
    std::vector<std::map<int, f2::F2Matrix>> qmaps;  // size columns() - 1
    std::vector<int> cap;

    int columns() const { return static_cast<int>(cols.size()); }
    int dim(int k, int d) const;
    bool q_known(int k, int d) const;                // both ends inside the caps
    f2::F2Matrix qmat(int k, int d) const;           // materialized with the right shape
};

/* A differential Hopf algebra structure on U_q(V): one nonzero component
   between power-of-two columns s < t, dropping the internal degree by one
   (chart bidegree (2^s - 2^t, 2^t - 2^s - 1)). d[dd] : cols[s][dd] ->
   cols[t][dd-1]. */
struct DiffBarcode {
    BarcodeModule v;
    int s = 0;
    int t = 1;
    std::map<int, f2::F2Matrix> d;
};

struct Bar {
    int k = 0;           // start column
    int d = 0;           // internal degree at the start
    int len = 1;         // columns covered
    bool open = false;   // still alive where the data runs out
    auto operator<=>(const Bar&) const = default;
};

/* Persistence decomposition; the bars reproduce every composite rank
   rank(q^j : V_{2^k} -> V_{2^{k+j}}) inside the caps. */
std::vector<Bar> barcode_decompose(const BarcodeModule& b);

/* Bigraded dimension table of U_q(V) = S(V)/(x^2 - qx): a closed bar of
   length m contributes Z/2[x]/(x^{2^m}), an open bar Z/2[x]. Keyed by chart
   position (-weight, weight + internal degree), rows kept through max_row.
   Every bar must sit in a positive row (ValidationError otherwise). */
struct UqSeries {
    int max_row = 0;
    std::map<std::pair<int, int>, long long> table;

    long long at(int col, int row) const;
};

UqSeries uq_series(const BarcodeModule& b, int max_row);

/* Primitives of the homology Hopf algebra H(U_q(V); d): columns below t keep
   V except for ker(d) at column s, columns k >= t become V/q^{k-t}(im d).
   Needs q monic out of every column >= t where the data reaches
   (DiamondViolation) and d.q = 0 into column s (ValidationError). */
BarcodeModule page_homology(const DiffBarcode& p);

/* One page of the spectral sequence, anchored degreewise in the free modules:
   cells of column k are subquotients of R_k(M)_d. Column k < s carries L_k(M)
   and column k >= s carries R_k(M)/im(q^{k-s} d_{s-1}); the differential
   leaves column s and drops the internal degree by one. */
struct PageColumn {
    int k = 0;
    std::map<int, f2::Subquotient> cells;
    amod::FModule module;
};

struct SSPage {
    int s = 0;                           // page index 2^s
    int max_total = 0;                   // chart rows exact through this
    std::vector<PageColumn> cols;
    std::map<int, f2::F2Matrix> diff;    // cell coords: col s, deg dd -> col s+1, dd-1
    BarcodeModule barcode;

    DiffBarcode diff_barcode() const;
};

SSPage build_page(const amod::FModule& m, int s, int max_total, int max_col = -1);

/* Pages 0..max_s with a verified transition after each one: the homology of
   page s must reproduce page s+1 both as ambient subquotients and through the
   Hopf-homology formula (PageMismatch otherwise). The limit report is the
   L_* barcode with its lower-operation q and its U_q series. */
struct SSRun {
    int max_s = 0;
    int max_total = 0;
    int max_col = 0;
    std::vector<SSPage> pages;
    BarcodeModule linf;
    std::vector<Bar> linf_bars;
    UqSeries einf;
    // renders of the limit classes in free-module coordinates, per (column, degree)
    std::map<std::pair<int, int>, std::vector<std::string>> linf_labels;
};

SSRun run_ss(const amod::FModule& m, int max_s, int max_total, int max_col = -1);

} // namespace destab::hss

#endif

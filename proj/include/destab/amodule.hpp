#ifndef DESTAB_AMODULE_HPP
#define DESTAB_AMODULE_HPP

#include <map>
#include <string>
#include <vector>

#include "destab/f2linalg.hpp"

namespace destab::amod {

/* A finite right module over the mod-2 Steenrod algebra: the operation Sq^i
   lowers degree by i (|x Sq^i| = |x| - i). Basis labels live per degree; the
   action is a sparse family of matrices act[(i, d)] : M_d -> M_{d-i} in the row
   convention of f2linalg. Zero blocks are simply absent.

   max_deg is the authority bound: the module is exactly as stated in degrees
   <= max_deg and makes no claim above. Below its lowest basis degree it is
   genuinely zero. Negative degrees are allowed. */
struct FModule {
    std::string name;
    int max_deg = 0;
    std::map<int, std::vector<std::string>> basis;
    std::map<std::pair<int, int>, f2::F2Matrix> act;

    int dim(int d) const;
    int min_deg() const;                       // lowest degree with a basis (0 if empty)
    int total_dim() const;
    const std::string& label(int d, int i) const;
    f2::F2Matrix sq(int i, int d) const;       // dim(d) x dim(d-i), zero if absent
    void set_sq(int i, int d, f2::F2Matrix mat);   // drops zero matrices
    f2::F2Matrix apply(int i, int d, const f2::F2Matrix& v) const;
};

/* Degree-indexed family of matrices mats[d] : source_d -> target_{d+shift}.
   Absent degrees are zero maps. */
struct GradedMap {
    int shift = 0;
    std::map<int, f2::F2Matrix> mats;
};

/* The matrix at degree d, materializing the zero map with the given shape when
   absent (shape-checked when present). */
f2::F2Matrix map_at(const GradedMap& g, int d, int rows, int cols);

/* Structural checks plus every Adem relation Sq^a Sq^b (a < 2b) on every degree
   in range. Throws ValidationError. */
void validate(const FModule& m);

bool modules_equal(const FModule& a, const FModule& b);

/* Sigma^k: degrees shift by k, matrices unchanged. */
FModule suspend(const FModule& m, int k);

/* Doubling functor: Phi(M)_{2n} = M_n with phi(x)Sq^{2i} = phi(x Sq^i), odd
   operations zero. Authority bound doubles. */
FModule phi(const FModule& m);

/* sq0 : M -> Phi(M), x |-> phi(x Sq^n) on M_{2n}, zero on odd degrees and on
   negative even degrees (no negative operations). Degree-preserving. */
GradedMap sq0(const FModule& m);

bool is_unstable(const FModule& m);            // x Sq^i = 0 whenever 2i > |x|, Sq^0 = id

/* A module carved out of a parent: new module in quotient coordinates plus the
   per-degree subquotient machinery tying it to parent coordinates. */
struct CarvedModule {
    FModule module;
    std::map<int, f2::Subquotient> cells;      // per parent degree
};

/* Induced module structure on Z/B for a graded subspace pair closed under the
   action (checked; ValidationError otherwise). Missing map entries mean the
   zero subspace for z and b. */
CarvedModule induced_subquotient(const FModule& m,
                                 const std::map<int, f2::Subspace>& z,
                                 const std::map<int, f2::Subspace>& b,
                                 const std::string& name);

/* The largest unstable submodule: start from the pointwise-unstable subspace
   per degree (zero in negative degrees) and shrink until closed under the
   action. cells give the inclusions. */
CarvedModule unstable_part(const FModule& m);

/* Loop functors on unstable modules (throw NotUnstable otherwise):
   omega  = desuspension of ker(sq0), omega1 = desuspension of coker(sq0). */
CarvedModule omega(const FModule& m);          // cells anchor in M
CarvedModule omega1(const FModule& m);         // cells anchor in Phi(M)

/* Render a coordinate row as a sum of parent basis labels ("a1+b2"). */
std::string render_vector(const FModule& m, int d, const f2::F2Matrix& v);

} // namespace destab::amod

#endif

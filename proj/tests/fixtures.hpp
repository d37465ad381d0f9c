#ifndef TESTS_FIXTURES_HPP
#define TESTS_FIXTURES_HPP

// Small hand-built modules shared across test binaries.

#include <string>

#include "destab/amodule.hpp"
#include "destab/steenrod.hpp"

namespace fixtures {

inline destab::f2::F2Matrix one1x1() {
    destab::f2::F2Matrix m(1, 1);
    m.set(0, 0, true);
    return m;
}

// truncated projective space homology: a_1..a_n, |a_m| = m, a_m Sq^i = C(m-i, i) a_{m-i}
inline destab::amod::FModule make_rp(int n) {
    destab::amod::FModule m;
    m.name = "rp" + std::to_string(n);
    m.max_deg = n;
    for (int d = 1; d <= n; ++d) m.basis[d] = {"a" + std::to_string(d)};
    for (int d = 2; d <= n; ++d)
        for (int i = 1; i < d; ++i)
            if (destab::steenrod::binom2(d - i, i)) m.set_sq(i, d, one1x1());
    return m;
}

// x in degree 1, y in degree 3, y Sq^2 = x (desuspended projective plane)
inline destab::amod::FModule make_cp2_desusp() {
    destab::amod::FModule m;
    m.name = "cp2d";
    m.max_deg = 3;
    m.basis[1] = {"x"};
    m.basis[3] = {"y"};
    m.set_sq(2, 3, one1x1());
    return m;
}

inline destab::amod::FModule make_sphere(int n) {
    destab::amod::FModule m;
    m.name = "s" + std::to_string(n);
    m.max_deg = n;
    m.basis[n] = {"x"};
    return m;
}

// a finite module is zero above its top class; restate the bound accordingly
inline destab::amod::FModule complete(destab::amod::FModule m, int bound) {
    m.max_deg = bound;
    return m;
}

} // namespace fixtures

#endif

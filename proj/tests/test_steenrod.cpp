#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>

#include "destab/steenrod.hpp"

using namespace destab::steenrod;

namespace {

/* Independent binomial-mod-2 oracle: Pascal recursion for a >= 0, and the
   reflection binom(-n, k) = (-1)^k binom(n+k-1, k) for negative upper entry. */
int binom2_oracle(long long a, long long b) {
    if (b < 0) return 0;
    if (b == 0) return 1;
    if (a < 0) return binom2_oracle(-a + b - 1, b);
    if (a == 0) return 0;
    static std::map<std::pair<long long, long long>, int> memo;
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int v = (binom2_oracle(a - 1, b - 1) + binom2_oracle(a - 1, b)) % 2;
    memo[key] = v;
    return v;
}

/* Explore EVERY rewrite order: at each state the set of applicable moves is one
   Adem rewrite per inadmissible pair; all choices must yield the same normal
   form. Returns it. */
SqSum normalize_all_orders(const SqWord& w) {
    std::vector<int> inadmissible;
    for (int k = 0; k + 1 < static_cast<int>(w.size()); ++k)
        if (w[k] < 2 * w[k + 1]) inadmissible.push_back(k);
    if (inadmissible.empty()) {
        SqSum s;
        s.toggle(w);
        return s;
    }
    bool first = true;
    SqSum result;
    for (int p : inadmissible) {
        int a = w[p], b = w[p + 1];
        SqSum branch;
        for (int j = 0; 2 * j <= a; ++j) {
            if (!binom2(b - 1 - j, a - 2 * j)) continue;
            SqWord nw(w.begin(), w.begin() + p);
            nw.push_back(a + b - j);
            if (j > 0) nw.push_back(j);
            nw.insert(nw.end(), w.begin() + p + 2, w.end());
            branch.add(normalize_all_orders(nw));
        }
        if (first) {
            result = branch;
            first = false;
        } else {
            REQUIRE(result == branch);
        }
    }
    return result;
}

int count_admissible(int deg_left, int vmin) {
    if (deg_left == 0) return 1;
    int total = 0;
    for (int v = vmin; v <= deg_left; ++v) total += count_admissible(deg_left - v, 2 * v);
    return total;
}

} // namespace

TEST_CASE("binom2: pinned values and digit-tail behaviour") {
    CHECK(binom2(4, 2) == 0);
    CHECK(binom2(5, 1) == 1);
    CHECK(binom2(0, 0) == 1);
    CHECK(binom2(3, -1) == 0);
    for (int k = 0; k <= 12; ++k) CHECK(binom2(-1, k) == 1);
    CHECK(binom2(-2, 1) == 0);  // -2 = ...11110 lacks the 1s digit
    CHECK(binom2(-2, 2) == 1);
    CHECK(binom2(-2, 3) == 0);
}

TEST_CASE("binom2 agrees with the Pascal/reflection oracle") {
    for (long long a = -20; a <= 20; ++a)
        for (long long b = -3; b <= 20; ++b)
            CHECK(binom2(a, b) == binom2_oracle(a, b));
}

TEST_CASE("adem_normalize_sq: pinned rewrites") {
    SqSum zero;
    CHECK(adem_normalize_sq({1, 1}) == zero);             // Sq^1 Sq^1 = 0

    SqSum sq31;
    sq31.toggle({3, 1});
    CHECK(adem_normalize_sq({2, 2}) == sq31);             // Sq^2 Sq^2 = Sq^3 Sq^1

    SqSum sq42;
    sq42.toggle({4, 2});
    CHECK(adem_normalize_sq({4, 2}) == sq42);             // already admissible

    SqSum unit;
    unit.toggle({});
    CHECK(adem_normalize_sq({}) == unit);
    CHECK(adem_normalize_sq({0, 0}) == unit);             // Sq^0 is the unit

    // Sq^1 Sq^2 = Sq^3, Sq^1 Sq^3 = 0, Sq^2 Sq^3 = Sq^5 + Sq^4 Sq^1
    SqSum sq3;
    sq3.toggle({3});
    CHECK(adem_normalize_sq({1, 2}) == sq3);
    CHECK(adem_normalize_sq({1, 3}) == zero);
    SqSum s23;
    s23.toggle({5});
    s23.toggle({4, 1});
    CHECK(adem_normalize_sq({2, 3}) == s23);
}

TEST_CASE("normalization is idempotent and rewrite-order independent (length <= 3, degree <= 24)") {
    for (int a = 1; a <= 24; ++a) {
        for (int b = 0; a + b <= 24; ++b) {
            for (int c = 0; a + b + c <= 24; ++c) {
                SqWord w;
                w.push_back(a);
                if (b) w.push_back(b);
                if (b && c) w.push_back(c);
                if (!b && c) continue;
                SqSum nf = adem_normalize_sq(w);
                CHECK(nf == normalize_all_orders(w));
                for (const auto& t : nf.terms) {
                    CHECK(sq_admissible(t));
                    CHECK(sq_degree(t) == sq_degree(w));
                    SqSum self;
                    self.toggle(t);
                    CHECK(adem_normalize_sq(t) == self);
                }
            }
        }
    }
}

TEST_CASE("multiply: unit and associativity on random-ish words") {
    SqSum unit;
    unit.toggle({});
    SqSum x;
    x.toggle({5, 2});
    x.toggle({3});
    CHECK(multiply(unit, x) == x);
    CHECK(multiply(x, unit) == x);

    std::vector<SqSum> elems;
    for (SqWord w : std::vector<SqWord>{{1}, {2}, {3, 1}, {4}, {2, 1}, {5, 2}}) {
        SqSum s;
        s.toggle(w);
        elems.push_back(s);
    }
    for (const auto& p : elems)
        for (const auto& q : elems)
            for (const auto& r : elems)
                CHECK(multiply(multiply(p, q), r) == multiply(p, multiply(q, r)));
}

TEST_CASE("admissible_basis: pinned degrees and counting oracle") {
    CHECK(admissible_basis(0) == std::vector<SqWord>{{}});
    CHECK(admissible_basis(3) == std::vector<SqWord>({{2, 1}, {3}}));
    CHECK(admissible_basis(7).size() == 4);  // Sq7, Sq6Sq1, Sq5Sq2, Sq4Sq2Sq1
    for (int d = 0; d <= 20; ++d) {
        auto basis = admissible_basis(d);
        CHECK(static_cast<int>(basis.size()) == count_admissible(d, 1));
        for (const auto& w : basis) {
            CHECK(sq_admissible(w));
            CHECK(sq_degree(w) == d);
        }
    }
}

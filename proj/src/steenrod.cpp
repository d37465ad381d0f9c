#include "destab/steenrod.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace destab::steenrod {

int binom2(long long a, long long b) {
    if (b < 0) return 0;
    return ((b & ~a) == 0) ? 1 : 0;
}

int sq_degree(const SqWord& w) {
    return std::accumulate(w.begin(), w.end(), 0);
}

bool sq_admissible(const SqWord& w) {
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (w[k] < 2 * w[k + 1]) return false;
    return true;
}

void SqSum::toggle(const SqWord& w) {
    auto it = terms.find(w);
    if (it == terms.end()) terms.insert(w);
    else terms.erase(it);
}

void SqSum::add(const SqSum& o) {
    for (const auto& w : o.terms) toggle(w);
}

namespace {

std::map<SqWord, SqSum> g_memo;
std::mutex g_memo_mx;

SqSum normalize_rec(const SqWord& w) {
    {
        std::lock_guard<std::mutex> lk(g_memo_mx);
        auto it = g_memo.find(w);
        if (it != g_memo.end()) return it->second;
    }
    SqSum out;
    int p = -1;
    for (int k = static_cast<int>(w.size()) - 2; k >= 0; --k)
        if (w[k] < 2 * w[k + 1]) { p = k; break; }
    if (p < 0) {
        out.toggle(w);
    } else {
        int a = w[p], b = w[p + 1];
        for (int j = 0; 2 * j <= a; ++j) {
            if (!binom2(b - 1 - j, a - 2 * j)) continue;
            SqWord nw(w.begin(), w.begin() + p);
            nw.push_back(a + b - j);
            if (j > 0) nw.push_back(j);
            nw.insert(nw.end(), w.begin() + p + 2, w.end());
            out.add(normalize_rec(nw));
        }
    }
    std::lock_guard<std::mutex> lk(g_memo_mx);
    g_memo.emplace(w, out);
    return out;
}

} // namespace

SqSum adem_normalize_sq(const SqWord& w) {
    SqWord clean;
    for (int i : w)
        if (i != 0) clean.push_back(i);
    return normalize_rec(clean);
}

SqSum multiply(const SqSum& x, const SqSum& y) {
    SqSum out;
    for (const auto& u : x.terms) {
        for (const auto& v : y.terms) {
            SqWord w = u;
            w.insert(w.end(), v.begin(), v.end());
            out.add(adem_normalize_sq(w));
        }
    }
    return out;
}

namespace {

/* Build words from the innermost entry outwards: each new outer entry must be
   at least twice its inner neighbour. */
void enum_admissible(int deg_left, int vmin, SqWord& cur, std::vector<SqWord>& out) {
    if (deg_left == 0) {
        SqWord w(cur.rbegin(), cur.rend());
        out.push_back(w);
        return;
    }
    for (int v = vmin; v <= deg_left; ++v) {
        cur.push_back(v);
        enum_admissible(deg_left - v, 2 * v, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<SqWord> admissible_basis(int degree) {
    std::vector<SqWord> out;
    if (degree < 0) return out;
    SqWord cur;
    enum_admissible(degree, 1, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace destab::steenrod

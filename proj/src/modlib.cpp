#include "destab/modlib.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "destab/errors.hpp"
#include "destab/steenrod.hpp"
#include "json.hpp"

namespace destab::modlib {

using json = nlohmann::ordered_json;
using amod::FModule;

namespace {

std::string word_label(const steenrod::SqWord& w) {
    if (w.empty()) return "1";
    std::string s;
    for (int i : w) s += "Sq" + std::to_string(i);
    return s;
}

/* Label a dual basis vector by the admissible sum it is dual against. */
std::string dual_label(const f2::F2Matrix& reps, int row,
                       const std::vector<steenrod::SqWord>& words) {
    std::vector<std::string> parts;
    for (int c = 0; c < reps.cols(); ++c)
        if (reps.get(row, c)) parts.push_back(word_label(words[c]));
    std::string body;
    for (size_t i = 0; i < parts.size(); ++i) body += (i ? "+" : "") + parts[i];
    if (parts.size() > 1) body = "(" + body + ")";
    return body + "*";
}

int parse_param(const std::string& name, const std::string& s) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos == s.size()) return v;
    } catch (...) {
    }
    throw UnknownName(name + ": \"" + s + "\" is not a number");
}

/* Reduced homology of RP^N, degrees shifted and labels prefixed so a suspended
   second copy can sit alongside the first. */
FModule truncated_projective(int n, const std::string& prefix, int shift) {
    FModule m;
    m.max_deg = n + shift;
    for (int k = 1; k <= n; ++k) m.basis[k + shift] = {prefix + std::to_string(k)};
    for (int k = 2; k <= n; ++k)
        for (int i = 1; i < k; ++i)
            if (steenrod::binom2(k - i, i)) m.set_sq(i, k + shift, f2::F2Matrix::identity(1));
    return m;
}

} // namespace

amod::FModule dual_quotient(const std::vector<int>& kill, int bound, const std::string& name) {
    if (bound < 0) throw ValidationError(name + ": negative degree bound");
    if (bound > 32)
        throw TruncationInsufficient(name + ": dual quotients are supported through degree 32, not " +
                                     std::to_string(bound));
    for (int k : kill)
        if (k < 1) throw ValidationError(name + ": ideal generator Sq" + std::to_string(k));

    // quotient of the algebra by the left ideal, degree by degree
    std::vector<std::vector<steenrod::SqWord>> words(bound + 1);
    std::vector<std::map<steenrod::SqWord, int>> index(bound + 1);
    std::vector<f2::Subquotient> cell;
    cell.reserve(bound + 1);
    for (int d = 0; d <= bound; ++d) {
        words[d] = steenrod::admissible_basis(d);
        for (size_t c = 0; c < words[d].size(); ++c) index[d][words[d][c]] = static_cast<int>(c);
        const int n = static_cast<int>(words[d].size());
        f2::F2Matrix gens(0, n);
        for (int k : kill) {
            if (d - k < 0) continue;
            for (const auto& w : steenrod::admissible_basis(d - k)) {
                steenrod::SqSum left;
                left.toggle(w);
                steenrod::SqSum right;
                right.toggle({k});
                f2::F2Matrix row(1, n);
                for (const auto& t : steenrod::multiply(left, right).terms)
                    row.set(0, index[d].at(t), true);
                gens = gens.vstack(row);
            }
        }
        cell.emplace_back(f2::Subspace::full(n), f2::Subspace::from_rows(gens));
    }

    FModule m;
    m.name = name;
    m.max_deg = bound;
    for (int d = 0; d <= bound; ++d) {
        if (cell[d].dim() == 0) continue;
        std::vector<std::string> labels;
        for (int r = 0; r < cell[d].dim(); ++r)
            labels.push_back(dual_label(cell[d].reps(), r, words[d]));
        m.basis[d] = labels;
    }

    // right action dual to left multiplication: sq(i, d) is the transpose of
    // Sq^i . (-) : Q_{d-i} -> Q_d in quotient coordinates
    for (int d = 1; d <= bound; ++d)
        for (int i = 1; i <= d; ++i) {
            const int src = cell[d - i].dim(), tgt = cell[d].dim();
            if (src == 0 || tgt == 0) continue;
            f2::F2Matrix amb(src, static_cast<int>(words[d].size()));
            for (int j = 0; j < src; ++j) {
                steenrod::SqSum x;
                for (int c = 0; c < static_cast<int>(words[d - i].size()); ++c)
                    if (cell[d - i].reps().get(j, c)) x.toggle(words[d - i][c]);
                steenrod::SqSum op;
                op.toggle({i});
                for (const auto& t : steenrod::multiply(op, x).terms)
                    amb.set(j, index[d].at(t), true);
            }
            m.set_sq(i, d, cell[d].project_rows(amb).transpose());
        }
    return m;
}

amod::FModule direct_sum(const amod::FModule& a, const amod::FModule& b, const std::string& name) {
    FModule m;
    m.name = name;
    m.max_deg = std::min(a.max_deg, b.max_deg);

    std::set<std::string> seen;
    std::set<int> degrees;
    for (const auto& [d, l] : a.basis) degrees.insert(d);
    for (const auto& [d, l] : b.basis) degrees.insert(d);
    for (int d : degrees) {
        if (d > m.max_deg) continue;
        std::vector<std::string> labels;
        for (int r = 0; r < a.dim(d); ++r) labels.push_back(a.label(d, r));
        for (int r = 0; r < b.dim(d); ++r) labels.push_back(b.label(d, r));
        for (const auto& s : labels)
            if (!seen.insert(s).second)
                throw ValidationError(name + ": label \"" + s + "\" appears in both summands");
        if (!labels.empty()) m.basis[d] = labels;
    }

    std::set<std::pair<int, int>> keys;
    for (const auto& [k, mat] : a.act) keys.insert(k);
    for (const auto& [k, mat] : b.act) keys.insert(k);
    for (const auto& [i, d] : keys) {
        if (d > m.max_deg) continue;
        const int ra = a.dim(d), rb = b.dim(d), ca = a.dim(d - i), cb = b.dim(d - i);
        f2::F2Matrix block(ra + rb, ca + cb);
        f2::F2Matrix ma = a.sq(i, d), mb = b.sq(i, d);
        for (int r = 0; r < ra; ++r)
            for (int c = 0; c < ca; ++c) block.set(r, c, ma.get(r, c));
        for (int r = 0; r < rb; ++r)
            for (int c = 0; c < cb; ++c) block.set(ra + r, ca + c, mb.get(r, c));
        m.set_sq(i, d, block);
    }
    return m;
}

amod::FModule prefix_labels(const amod::FModule& m, const std::string& prefix) {
    FModule out = m;
    for (auto& [d, labels] : out.basis)
        for (auto& s : labels) s = prefix + s;
    return out;
}

amod::FModule builtin(const std::string& name, int min_bound) {
    std::string head = name, param;
    bool has_param = false;
    if (auto pos = name.find(':'); pos != std::string::npos) {
        head = name.substr(0, pos);
        param = name.substr(pos + 1);
        has_param = true;
    }
    auto need_param = [&](int at_least) {
        if (!has_param)
            throw UnknownName(name + ": needs a parameter, e.g. " + head + ":" +
                              std::to_string(std::max(at_least, 3)));
        int v = parse_param(name, param);
        if (v < at_least)
            throw UnknownName(name + ": parameter must be at least " + std::to_string(at_least));
        return v;
    };
    auto no_param = [&] {
        if (has_param) throw UnknownName(name + ": takes no parameter");
    };

    FModule m;
    bool total = false; // exact in every degree, so the bound may be raised
    if (head == "sphere") {
        if (!has_param) throw UnknownName(name + ": needs a degree, e.g. sphere:0");
        const int n = parse_param(name, param);
        m.max_deg = n;
        m.basis[n] = {"x" + std::to_string(n)};
        total = true;
    } else if (head == "rp") {
        m = truncated_projective(need_param(1), "a", 0);
        total = true;
    } else if (head == "rp4-ext") {
        no_param();
        FModule base = truncated_projective(4, "a", 0);
        base.max_deg = 5; // zero above 4, so the suspended copy's bound is fine
        m = direct_sum(base, truncated_projective(4, "b", 1), name);
        total = true;
    } else if (head == "cp2-desusp") {
        no_param();
        m.max_deg = 3;
        m.basis[1] = {"x"};
        m.basis[3] = {"y"};
        m.set_sq(2, 3, f2::F2Matrix::identity(1));
        total = true;
    } else if (head == "dual-steenrod") {
        m = dual_quotient({}, need_param(0), name);
    } else if (head == "hz") {
        m = dual_quotient({1}, need_param(0), name);
    } else if (head == "hz-mod4") {
        const int d = need_param(1);
        m = direct_sum(dual_quotient({1}, d, name),
                       suspend(prefix_labels(dual_quotient({1}, d - 1, name), "s:"), 1), name);
    } else if (head == "hz-mod4-desusp") {
        const int d = need_param(1);
        m = suspend(builtin("hz-mod4:" + std::to_string(d)), -1);
    } else {
        throw UnknownName("no built-in module \"" + name + "\"; known: sphere:N, rp:N, rp4-ext, "
                          "cp2-desusp, dual-steenrod:D, hz:D, hz-mod4:D, hz-mod4-desusp:D");
    }
    m.name = name;
    if (total && min_bound > m.max_deg) m.max_deg = min_bound;
    return m;
}

std::vector<std::string> builtin_help() {
    return {
        "sphere:N            one class in degree N",
        "rp:N                reduced homology of RP^N",
        "rp4-ext             rp:4 plus a suspended copy (a1..a4, b1..b4)",
        "cp2-desusp          x in degree 1, y in degree 3, y Sq^2 = x",
        "dual-steenrod:D     dual Steenrod algebra through degree D",
        "hz:D                dual of A/A Sq^1 through degree D",
        "hz-mod4:D           hz:D plus a suspended copy (stands in for any Z/2^r, r >= 2)",
        "hz-mod4-desusp:D    hz-mod4:D shifted down once (bottom class in degree -1)",
    };
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& where, const std::string& msg) {
    throw ParseError(origin + (where.empty() ? "" : ": " + where) + ": " + msg);
}

int require_int(const json& j, const std::string& origin, const std::string& where) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(origin, where, "expected an integer");
    return j.get<int>();
}

std::string require_str(const json& j, const std::string& origin, const std::string& where) {
    if (!j.is_string() || j.get<std::string>().empty())
        fail(origin, where, "expected a nonempty string");
    return j.get<std::string>();
}

void check_keys(const json& j, const std::string& origin, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, val] : j.items())
        if (!allowed.count(key)) fail(origin, where, "unknown key \"" + key + "\"");
}

} // namespace

amod::FModule parse_module(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!j.is_object()) fail(origin, "", "top level must be an object");
    check_keys(j, origin, "", {"name", "max_degree", "generators", "actions"});
    for (const char* key : {"name", "max_degree", "generators"})
        if (!j.contains(key)) fail(origin, "", std::string("missing key \"") + key + "\"");

    FModule m;
    m.name = require_str(j["name"], origin, "name");
    m.max_deg = require_int(j["max_degree"], origin, "max_degree");

    if (!j["generators"].is_array()) fail(origin, "generators", "expected an array");
    std::map<std::string, std::pair<int, int>> where_is; // id -> (deg, row)
    int gi = 0;
    for (const auto& g : j["generators"]) {
        const std::string loc = "generators[" + std::to_string(gi++) + "]";
        if (!g.is_object()) fail(origin, loc, "expected an object");
        check_keys(g, origin, loc, {"id", "deg"});
        for (const char* key : {"id", "deg"})
            if (!g.contains(key)) fail(origin, loc, std::string("missing key \"") + key + "\"");
        const std::string id = require_str(g["id"], origin, loc + ".id");
        const int deg = require_int(g["deg"], origin, loc + ".deg");
        if (deg > m.max_deg) fail(origin, loc, "\"" + id + "\" sits above max_degree");
        if (where_is.count(id)) fail(origin, loc, "duplicate id \"" + id + "\"");
        where_is[id] = {deg, m.dim(deg)};
        m.basis[deg].push_back(id);
    }

    if (j.contains("actions")) {
        if (!j["actions"].is_array()) fail(origin, "actions", "expected an array");
        std::map<std::pair<int, int>, f2::F2Matrix> acc;
        std::set<std::pair<int, std::string>> stated;
        int ai = 0;
        for (const auto& a : j["actions"]) {
            const std::string loc = "actions[" + std::to_string(ai++) + "]";
            if (!a.is_object()) fail(origin, loc, "expected an object");
            check_keys(a, origin, loc, {"sq", "on", "value"});
            for (const char* key : {"sq", "on", "value"})
                if (!a.contains(key)) fail(origin, loc, std::string("missing key \"") + key + "\"");
            const int i = require_int(a["sq"], origin, loc + ".sq");
            if (i < 1) fail(origin, loc, "sq must be at least 1");
            const std::string on = require_str(a["on"], origin, loc + ".on");
            auto src = where_is.find(on);
            if (src == where_is.end()) fail(origin, loc, "unknown id \"" + on + "\"");
            if (!stated.insert({i, on}).second)
                fail(origin, loc, "second action of sq " + std::to_string(i) + " on \"" + on + "\"");
            const int d = src->second.first;
            if (!a["value"].is_array()) fail(origin, loc + ".value", "expected an array");
            auto key = std::make_pair(i, d);
            if (!acc.count(key)) acc.emplace(key, f2::F2Matrix(m.dim(d), m.dim(d - i)));
            int vi = 0;
            for (const auto& v : a["value"]) {
                const std::string vloc = loc + ".value[" + std::to_string(vi++) + "]";
                const std::string id = require_str(v, origin, vloc);
                auto tgt = where_is.find(id);
                if (tgt == where_is.end()) fail(origin, vloc, "unknown id \"" + id + "\"");
                if (tgt->second.first != d - i)
                    fail(origin, vloc,
                         "\"" + id + "\" has degree " + std::to_string(tgt->second.first) +
                             ", expected " + std::to_string(d - i));
                auto& mat = acc.at(key);
                if (mat.get(src->second.second, tgt->second.second))
                    fail(origin, vloc, "repeated term \"" + id + "\"");
                mat.set(src->second.second, tgt->second.second, true);
            }
        }
        for (const auto& [key, mat] : acc) m.set_sq(key.first, key.second, mat);
    }

    amod::validate(m);
    return m;
}

std::string serialize(const amod::FModule& m) {
    json j;
    j["name"] = m.name;
    j["max_degree"] = m.max_deg;
    auto gens = json::array();
    for (const auto& [d, labels] : m.basis)
        for (const auto& id : labels) gens.push_back(json{{"id", id}, {"deg", d}});
    j["generators"] = gens;
    auto acts = json::array();
    for (const auto& [key, mat] : m.act) {
        const auto [i, d] = key;
        for (int r = 0; r < mat.rows(); ++r) {
            auto value = json::array();
            for (int c = 0; c < mat.cols(); ++c)
                if (mat.get(r, c)) value.push_back(m.label(d - i, c));
            if (!value.empty())
                acts.push_back(json{{"sq", i}, {"on", m.label(d, r)}, {"value", value}});
        }
    }
    j["actions"] = acts;
    return j.dump(2) + "\n";
}

amod::FModule load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_module(ss.str(), path);
}

void save(const amod::FModule& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << serialize(m);
    if (!out) throw ParseError(path + ": write failed");
}

} // namespace destab::modlib

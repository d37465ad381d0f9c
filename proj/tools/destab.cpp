#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "destab/dlfree.hpp"
#include "destab/errors.hpp"
#include "destab/hopfss.hpp"
#include "destab/modlib.hpp"
#include "destab/singer.hpp"
#include "json.hpp"

using namespace destab;
using json = nlohmann::ordered_json;

namespace {

/* ---- module input ------------------------------------------------------ */

/* "builtin:NAME" or a path to a module file. min_bound lifts the stated bound
   of finite catalogue modules so a computation window fits; file modules keep
   their own bound and the computation is rejected if it cannot be honored. */
amod::FModule get_module(const std::string& arg, int min_bound = -1) {
    const std::string tag = "builtin:";
    if (arg.rfind(tag, 0) == 0) return modlib::builtin(arg.substr(tag.size()), min_bound);
    return modlib::load(arg);
}

/* ---- small output helpers ---------------------------------------------- */

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void print_module_text(const std::string& title, const amod::FModule& m) {
    std::cout << title << "\n";
    bool any = false;
    for (const auto& [d, labels] : m.basis) {
        if (labels.empty()) continue;
        any = true;
        std::cout << "  degree " << d << " (dim " << labels.size() << "): ";
        for (std::size_t i = 0; i < labels.size(); ++i)
            std::cout << (i ? " | " : "") << labels[i];
        std::cout << "\n";
    }
    if (!any) std::cout << "  (zero in the window)\n";
}

json module_json(const amod::FModule& m) {
    json j;
    j["name"] = m.name;
    j["max_degree"] = m.max_deg;
    auto degrees = json::array();
    for (const auto& [d, labels] : m.basis) {
        if (labels.empty()) continue;
        degrees.push_back(json{{"deg", d}, {"dim", labels.size()}, {"classes", labels}});
    }
    j["degrees"] = degrees;
    return j;
}

void print_module_csv(const amod::FModule& m) {
    std::cout << "deg,class\n";
    for (const auto& [d, labels] : m.basis)
        for (const auto& s : labels) std::cout << d << "," << csv_field(s) << "\n";
}

void emit_module(const std::string& format, const std::string& title, const amod::FModule& m) {
    if (format == "json")
        std::cout << module_json(m).dump(2) << "\n";
    else if (format == "csv")
        print_module_csv(m);
    else
        print_module_text(title, m);
}

/* ---- charts ------------------------------------------------------------ */

/* Bigraded table of the free algebra on the barcode: a class of weight w in
   internal degree d contributes at column -w, row w + d. Annotations name the
   powers of bars whose birth class is pinned down (its cell has dimension 1). */
struct ChartTable {
    int max_row = 0;
    std::map<std::pair<int, int>, long long> entries;
    std::map<std::pair<int, int>, std::vector<std::string>> names;
};

ChartTable make_chart(const hss::BarcodeModule& b,
                      const std::map<std::pair<int, int>, std::vector<std::string>>& labels,
                      int max_row) {
    ChartTable t;
    t.max_row = max_row;
    t.entries = hss::uq_series(b, max_row).table;
    for (const auto& bar : hss::barcode_decompose(b)) {
        if (b.dim(bar.k, bar.d) != 1) continue;
        auto it = labels.find({bar.k, bar.d});
        if (it == labels.end() || it->second.size() != 1) continue;
        const std::string& base = it->second[0];
        std::string wrapped =
            base.find_first_of("+[") == std::string::npos ? base : "(" + base + ")";
        const long long w = 1LL << bar.k;
        const long long r = w + bar.d;
        for (long long e = 1;; ++e) {
            if (!bar.open && e >= (1LL << std::min(bar.len, 40))) break;
            if (r * e > max_row) break;
            std::string nm = e == 1 ? base : wrapped + "^" + std::to_string(e);
            t.names[{static_cast<int>(-w * e), static_cast<int>(r * e)}].push_back(nm);
        }
    }
    return t;
}

/* Grid with columns -1, -2, ... across and rows descending; the weight-zero
   unit at (0, 0) is left out. Blank cells are zero. */
void print_chart_text(const ChartTable& t) {
    int min_col = 0, top = 0;
    for (const auto& [key, val] : t.entries) {
        if (key == std::make_pair(0, 0) || val == 0) continue;
        min_col = std::min(min_col, key.first);
        top = std::max(top, key.second);
    }
    int width = 4;
    for (const auto& [key, val] : t.entries)
        width = std::max(width, static_cast<int>(std::to_string(val).size()) + 2);
    auto cell = [&](const std::string& s) {
        std::cout << std::string(width - s.size(), ' ') << s;
    };
    cell("t\\s");
    for (int c = -1; c >= min_col; --c) cell(std::to_string(c));
    std::cout << "\n";
    for (int r = top; r >= 1; --r) {
        cell(std::to_string(r));
        for (int c = -1; c >= min_col; --c) {
            auto it = t.entries.find({c, r});
            cell(it == t.entries.end() || it->second == 0 ? "" : std::to_string(it->second));
        }
        std::cout << "\n";
    }
    if (!t.names.empty()) {
        std::cout << "named classes:\n";
        std::vector<std::pair<std::pair<int, int>, std::string>> rows;
        for (const auto& [key, names] : t.names)
            for (const auto& nm : names) rows.push_back({{key.second, -key.first}, nm});
        std::sort(rows.begin(), rows.end());
        for (const auto& [key, nm] : rows)
            std::cout << "  (" << -key.second << "," << key.first << ")  " << nm << "\n";
    }
}

json chart_json(const ChartTable& t) {
    json j;
    j["max_row"] = t.max_row;
    auto entries = json::array();
    for (const auto& [key, val] : t.entries) {
        if (val == 0) continue;
        json e{{"col", key.first}, {"row", key.second}, {"dim", val}};
        auto it = t.names.find(key);
        e["names"] = it == t.names.end() ? json::array() : json(it->second);
        entries.push_back(std::move(e));
    }
    j["entries"] = entries;
    return j;
}

void print_chart_csv(const ChartTable& t) {
    std::cout << "col,row,dim,names\n";
    for (const auto& [key, val] : t.entries) {
        if (val == 0) continue;
        std::string names;
        auto it = t.names.find(key);
        if (it != t.names.end())
            for (std::size_t i = 0; i < it->second.size(); ++i)
                names += (i ? ";" : "") + it->second[i];
        std::cout << key.first << "," << key.second << "," << val << "," << csv_field(names)
                  << "\n";
    }
}

void emit_chart(const std::string& format, const ChartTable& t) {
    if (format == "json")
        std::cout << chart_json(t).dump(2) << "\n";
    else if (format == "csv")
        print_chart_csv(t);
    else
        print_chart_text(t);
}

/* ---- spectral sequence views ------------------------------------------- */

std::map<std::pair<int, int>, std::vector<std::string>> page_labels(const hss::SSPage& p) {
    std::map<std::pair<int, int>, std::vector<std::string>> out;
    for (const auto& col : p.cols)
        for (const auto& [d, cell] : col.cells) {
            if (cell.dim() == 0) continue;
            std::vector<std::string> names;
            for (int j = 0; j < cell.dim(); ++j) names.push_back(col.module.label(d, j));
            out[{col.k, d}] = std::move(names);
        }
    return out;
}

void print_page_text(const hss::SSPage& p) {
    std::cout << "page " << (1 << p.s) << "\n";
    for (const auto& col : p.cols) {
        bool any = false;
        for (const auto& [d, cell] : col.cells) any |= cell.dim() > 0;
        if (!any) continue;
        std::cout << "  column " << col.k << " (weight " << (1 << col.k) << ")\n";
        for (const auto& [d, labels] : col.module.basis) {
            if (labels.empty()) continue;
            std::cout << "    degree " << d << " (dim " << labels.size() << "): ";
            for (std::size_t i = 0; i < labels.size(); ++i)
                std::cout << (i ? " | " : "") << labels[i];
            std::cout << "\n";
        }
    }
    if (p.diff.empty()) {
        std::cout << "  no differential\n";
        return;
    }
    std::cout << "  differential (column " << p.s << " -> " << p.s + 1 << ")\n";
    for (const auto& [dd, mat] : p.diff) {
        const auto& src = p.cols[p.s].module;
        const auto& tgt = p.cols[p.s + 1].module;
        for (int r = 0; r < mat.rows(); ++r) {
            std::string rhs;
            for (int c = 0; c < mat.cols(); ++c)
                if (mat.get(r, c)) rhs += (rhs.empty() ? "" : " + ") + tgt.label(dd - 1, c);
            if (!rhs.empty())
                std::cout << "    d(" << src.label(dd, r) << ") = " << rhs << "\n";
        }
    }
}

json matrix_json(const f2::F2Matrix& m) {
    auto rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        auto row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m.get(r, c) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    return rows;
}

json page_json(const hss::SSPage& p) {
    json j;
    j["page"] = 1 << p.s;
    auto cols = json::array();
    for (const auto& col : p.cols) {
        json c;
        c["column"] = col.k;
        auto cells = json::array();
        for (const auto& [d, labels] : col.module.basis) {
            if (labels.empty()) continue;
            cells.push_back(json{{"deg", d}, {"dim", labels.size()}, {"classes", labels}});
        }
        c["cells"] = cells;
        cols.push_back(std::move(c));
    }
    j["columns"] = cols;
    auto diffs = json::array();
    for (const auto& [dd, mat] : p.diff)
        diffs.push_back(json{{"deg", dd}, {"matrix", matrix_json(mat)}});
    j["diff"] = diffs;
    return j;
}

json bars_json(const std::vector<hss::Bar>& bars) {
    auto out = json::array();
    for (const auto& b : bars)
        out.push_back(json{{"column", b.k}, {"deg", b.d}, {"len", b.len}, {"open", b.open}});
    return out;
}

void print_bars_text(const std::vector<hss::Bar>& bars,
                     const std::map<std::pair<int, int>, std::vector<std::string>>& labels) {
    std::cout << "limit bars\n";
    if (bars.empty()) {
        std::cout << "  (none)\n";
        return;
    }
    for (const auto& b : bars) {
        std::cout << "  column " << b.k << ", degree " << b.d << ", length " << b.len
                  << (b.open ? " (runs off the window)" : "");
        auto it = labels.find({b.k, b.d});
        if (it != labels.end() && it->second.size() == 1) std::cout << "  [" << it->second[0] << "]";
        std::cout << "\n";
    }
}

/* ---- commands ----------------------------------------------------------- */

int page_index(int page, int max_s) {
    if (page > 0 && (page & (page - 1)) == 0) {
        int k = 0;
        while ((1 << k) < page) ++k;
        if (k <= max_s) return k;
    }
    throw ValidationError("--page must be a power of two between 1 and " +
                          std::to_string(1 << max_s));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"destabilization calculator for modules over the mod-2 Steenrod algebra"};
    app.require_subcommand(1);
    app.footer("MODULE is a module file path or builtin:NAME (see `destab builtin --list`).\n"
               "Exit codes: 0 ok, 1 bad input, 2 window exceeds the module's stated degrees.\n"
               "DESTAB_THREADS caps worker threads (0 or unset = all cores).");

    std::string module_arg, format = "text", out_path, builtin_name;
    int max_degree = 0, s_arg = 0, max_s = 0, page = 0;
    bool list_builtins = false;

    auto add_module = [&](CLI::App* cmd) {
        cmd->add_option("module", module_arg, "module file path or builtin:NAME")->required();
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "text, json or csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
    };

    CLI::App* c_validate = app.add_subcommand("validate", "parse a module and run every check");
    add_module(c_validate);
    add_format(c_validate);

    CLI::App* c_unstable = app.add_subcommand("unstable", "largest unstable submodule");
    add_module(c_unstable);
    add_format(c_unstable);

    CLI::App* c_rs = app.add_subcommand("rs", "free module of weight 2^s on the module");
    add_module(c_rs);
    add_format(c_rs);
    c_rs->add_option("--s", s_arg, "weight index")->required();
    c_rs->add_option("--max-degree", max_degree, "degree window")->required();

    CLI::App* c_derived =
        app.add_subcommand("derived", "derived functor of destabilization at one stage");
    add_module(c_derived);
    add_format(c_derived);
    c_derived->add_option("--s", s_arg, "stage")->required();
    c_derived->add_option("--max-degree", max_degree, "total-degree window")->required();

    CLI::App* c_ls = app.add_subcommand("ls", "looped derived functor at one weight");
    add_module(c_ls);
    add_format(c_ls);
    c_ls->add_option("--s", s_arg, "weight index")->required();
    c_ls->add_option("--max-degree", max_degree, "degree window")->required();

    CLI::App* c_ss = app.add_subcommand("ss", "run the spectral sequence and report pages");
    add_module(c_ss);
    add_format(c_ss);
    c_ss->add_option("--max-s", max_s, "last page transition to verify")->required();
    c_ss->add_option("--max-degree", max_degree, "total-degree window")->required();
    c_ss->add_option("--page", page, "show one page (1, 2, 4, ...) instead of the run");

    CLI::App* c_chart = app.add_subcommand("chart", "bigraded chart of the limit or one page");
    add_module(c_chart);
    add_format(c_chart);
    c_chart->add_option("--max-s", max_s, "last page transition to verify")->required();
    c_chart->add_option("--max-degree", max_degree, "total-degree window")->required();
    c_chart->add_option("--page", page, "chart one page instead of the limit");

    CLI::App* c_builtin = app.add_subcommand("builtin", "write a catalogue module as a file");
    c_builtin->add_option("name", builtin_name, "catalogue name, e.g. rp:4");
    c_builtin->add_option("--max-degree", max_degree, "lift the stated bound (finite modules)");
    c_builtin->add_option("--out", out_path, "write here instead of stdout");
    c_builtin->add_flag("--list", list_builtins, "print the catalogue");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(c_validate)) {
            auto m = get_module(module_arg);
            amod::validate(m);
            if (format == "json") {
                json j = module_json(m);
                j["ok"] = true;
                std::cout << j.dump(2) << "\n";
            } else if (format == "csv") {
                std::cout << "name,max_degree,total_dim\n"
                          << csv_field(m.name) << "," << m.max_deg << "," << m.total_dim()
                          << "\n";
            } else {
                std::cout << "ok: " << m.name << ", degrees " << m.min_deg() << ".." << m.max_deg
                          << ", " << m.total_dim() << " classes\n";
            }
        } else if (app.got_subcommand(c_unstable)) {
            auto m = get_module(module_arg);
            auto u = amod::unstable_part(m);
            emit_module(format,
                        "unstable part of " + m.name + " (" + std::to_string(u.module.total_dim()) +
                            " of " + std::to_string(m.total_dim()) + " classes)",
                        u.module);
        } else if (app.got_subcommand(c_rs)) {
            auto m = get_module(module_arg, max_degree);
            auto r = dl::build_rs(m, s_arg, max_degree);
            emit_module(format,
                        "weight-" + std::to_string(1 << s_arg) + " free module on " + m.name +
                            " through degree " + std::to_string(max_degree),
                        r.mod);
        } else if (app.got_subcommand(c_derived)) {
            auto m = get_module(module_arg, max_degree);
            auto r = singer::derived_functor(m, s_arg, max_degree);
            emit_module(format,
                        "derived destabilization, stage " + std::to_string(s_arg) + ", of " +
                            m.name + " through total degree " + std::to_string(max_degree),
                        r.module);
        } else if (app.got_subcommand(c_ls)) {
            auto m = get_module(module_arg, max_degree + s_arg);
            auto r = singer::l_functor(m, s_arg, max_degree);
            emit_module(format,
                        "L_" + std::to_string(s_arg) + " of " + m.name + " through degree " +
                            std::to_string(max_degree),
                        r.module);
        } else if (app.got_subcommand(c_ss) || app.got_subcommand(c_chart)) {
            auto m = get_module(module_arg, max_degree);
            auto run = hss::run_ss(m, max_s, max_degree);
            const bool chart_only = app.got_subcommand(c_chart);
            if (page > 0) {
                const hss::SSPage& p = run.pages[page_index(page, max_s)];
                ChartTable t = make_chart(p.barcode, page_labels(p), max_degree);
                if (chart_only) {
                    emit_chart(format, t);
                } else if (format == "json") {
                    json j = page_json(p);
                    j["chart"] = chart_json(t);
                    std::cout << j.dump(2) << "\n";
                } else if (format == "csv") {
                    print_chart_csv(t);
                } else {
                    print_page_text(p);
                    print_chart_text(t);
                }
            } else {
                ChartTable t = make_chart(run.linf, run.linf_labels, max_degree);
                if (chart_only) {
                    emit_chart(format, t);
                } else if (format == "json") {
                    json j;
                    j["module"] = m.name;
                    j["max_s"] = run.max_s;
                    j["max_total"] = run.max_total;
                    j["max_col"] = run.max_col;
                    auto pages = json::array();
                    for (const auto& p : run.pages) pages.push_back(page_json(p));
                    j["pages"] = pages;
                    j["bars"] = bars_json(run.linf_bars);
                    j["einf"] = chart_json(t);
                    std::cout << j.dump(2) << "\n";
                } else if (format == "csv") {
                    print_chart_csv(t);
                } else {
                    std::cout << "spectral sequence for " << m.name << ", total degrees <= "
                              << max_degree << ", columns 0.." << run.max_col << "\n\n";
                    for (const auto& p : run.pages) {
                        print_page_text(p);
                        std::cout << "\n";
                    }
                    print_bars_text(run.linf_bars, run.linf_labels);
                    std::cout << "\nstable chart\n";
                    print_chart_text(t);
                }
            }
        } else if (app.got_subcommand(c_builtin)) {
            if (list_builtins) {
                for (const auto& line : modlib::builtin_help()) std::cout << line << "\n";
                return 0;
            }
            if (builtin_name.empty())
                throw UnknownName("builtin: give a catalogue name or --list");
            auto m = modlib::builtin(builtin_name, max_degree > 0 ? max_degree : -1);
            if (out_path.empty())
                std::cout << modlib::serialize(m);
            else
                modlib::save(m, out_path);
        }
        return 0;
    } catch (const TruncationInsufficient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

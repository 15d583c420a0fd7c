#include "drspp/nonanticipativity.hpp"

#include "drspp/errors.hpp"

#include <algorithm>
#include <string>

namespace drspp {

DiffNodes diff_nodes(const AuxiliaryList& list, const ResponseVector& rj, const ResponseVector& rl) {
    if (rj.bits.size() != list.size() || rl.bits.size() != list.size()) {
        throw InvalidArgument("response vectors must match the auxiliary list length");
    }
    DiffNodes nd{rj.index(), rl.index(), {}};
    for (std::size_t m = 0; m < list.size(); ++m) {
        if (rj.bits[m] != rl.bits[m]) {
            nd.nodes.push_back(list[m].node);
        }
    }
    std::sort(nd.nodes.begin(), nd.nodes.end());
    nd.nodes.erase(std::unique(nd.nodes.begin(), nd.nodes.end()), nd.nodes.end());
    return nd;
}

std::vector<LinearRow> acyclic_rows(const Graph& g, const Reachability& reach, const DiffNodes& nd,
                                    const std::vector<int>& y_j, const std::vector<int>& y_l) {
    if (!g.is_acyclic()) {
        throw NotAcyclic("acyclic non-anticipativity rows need a graph without directed cycles");
    }
    const std::string tag = "na_" + std::to_string(nd.j) + "_" + std::to_string(nd.l) + "_";
    std::vector<LinearRow> rows;
    for (int i = 1; i <= g.num_nodes(); ++i) {
        if (std::binary_search(nd.nodes.begin(), nd.nodes.end(), i) || g.forward_star(i).empty()) {
            continue;
        }
        std::vector<int> unreachable;
        for (int n : nd.nodes) {
            if (!reach[i][n]) {
                unreachable.push_back(n);
            }
        }
        for (int a : g.forward_star(i)) {
            const std::string base = tag + std::to_string(i) + "_" + std::to_string(a);
            if (unreachable.empty()) {
                rows.push_back({{{y_j[a], 1.0}, {y_l[a], -1.0}}, RowSense::Equal, 0.0, base + "_eq"});
                continue;
            }
            // |y_p,a - y_q,a| <= sum over unreachable n of y_p leaving n, for both orientations.
            for (int orient = 0; orient < 2; ++orient) {
                const std::vector<int>& yp = orient == 0 ? y_j : y_l;
                const std::vector<int>& yq = orient == 0 ? y_l : y_j;
                for (int sign = 1; sign >= -1; sign -= 2) {
                    std::vector<Term> terms{{yp[a], double(sign)}, {yq[a], double(-sign)}};
                    for (int n : unreachable) {
                        for (int b : g.forward_star(n)) {
                            terms.push_back({yp[b], -1.0});
                        }
                    }
                    rows.push_back({std::move(terms), RowSense::LessEqual, 0.0,
                                    base + (orient == 0 ? "_p" : "_q") + (sign > 0 ? "u" : "l")});
                }
            }
        }
    }
    return rows;
}

GeneralRowBuilder::GeneralRowBuilder(MixedIntegerProgram& mip, const Graph& g) : mip_(mip), g_(g) {}

const std::vector<int>& GeneralRowBuilder::add_labels(int j, const std::vector<int>& y_j) {
    const double top = g_.num_nodes() - 1;
    std::vector<int> t(g_.num_nodes() + 1, -1);
    for (int i = 1; i <= g_.num_nodes(); ++i) {
        const double upper = i == g_.source() ? 0.0 : top;
        t[i] = mip_.add_continuous("t_" + std::to_string(j) + "_" + std::to_string(i), 0.0, upper);
    }
    const double big = g_.num_nodes();
    for (int a = 0; a < g_.num_arcs(); ++a) {
        const Arc& e = g_.arc(a);
        // t_tail - t_head <= -1 + |N| (1 - y)
        mip_.lp.add_row({{t[e.tail], 1.0}, {t[e.head], -1.0}, {y_j[a], big}}, RowSense::LessEqual, big - 1.0,
                        "ord_" + std::to_string(j) + "_" + std::to_string(a));
    }
    return labels_[j] = std::move(t);
}

const GeneralRowBuilder::Block& GeneralRowBuilder::block(int j, int i, int n, const std::vector<int>& y_j) {
    const auto key = std::make_tuple(j, i, n);
    const auto found = blocks_.find(key);
    if (found != blocks_.end()) {
        return found->second;
    }
    const std::vector<int>& t = labels_.at(j);
    const std::string suffix = std::to_string(j) + "_" + std::to_string(i) + "_" + std::to_string(n);
    const double m1 = g_.num_nodes() - 1;
    Block b{};
    b.v = mip_.add_continuous("v_" + suffix, 0.0, kInf);
    b.v_bin = mip_.add_binary("vb_" + suffix);
    b.w = mip_.add_continuous("w_" + suffix, 0.0, 1.0);
    auto& lp = mip_.lp;
    lp.add_row({{b.v, 1.0}, {t[i], -1.0}, {t[n], 1.0}}, RowSense::GreaterEqual, 0.0, "vmax_" + suffix);
    lp.add_row({{b.v, 1.0}, {b.v_bin, -m1}}, RowSense::LessEqual, 0.0, "vbig_" + suffix);
    lp.add_row({{b.v, 1.0}, {t[i], -1.0}, {t[n], 1.0}, {b.v_bin, m1}}, RowSense::LessEqual, m1, "vsel_" + suffix);
    // w <= v + 2 - sum_{FS_n} y - sum_{FS_i} y
    std::vector<Term> cap{{b.w, 1.0}, {b.v, -1.0}};
    for (int a : g_.forward_star(n)) {
        cap.push_back({y_j[a], 1.0});
    }
    for (int a : g_.forward_star(i)) {
        cap.push_back({y_j[a], 1.0});
    }
    lp.add_row(std::move(cap), RowSense::LessEqual, 2.0, "wmin_" + suffix);
    std::vector<Term> visit{{b.w, 1.0}};
    for (int a : g_.forward_star(n)) {
        visit.push_back({y_j[a], -1.0});
    }
    lp.add_row(std::move(visit), RowSense::LessEqual, 0.0, "wvis_" + suffix);
    return blocks_.emplace(key, b).first->second;
}

void GeneralRowBuilder::add_orientation(int j, const DiffNodes& nd, const std::vector<int>& y_j,
                                        const std::vector<int>& y_l) {
    const int other = j == nd.j ? nd.l : nd.j;
    for (int i = 1; i <= g_.num_nodes(); ++i) {
        if (std::binary_search(nd.nodes.begin(), nd.nodes.end(), i) || g_.forward_star(i).empty()) {
            continue;
        }
        std::vector<int> ws;
        for (int n : nd.nodes) {
            ws.push_back(block(j, i, n, y_j).w);
        }
        for (int a : g_.forward_star(i)) {
            const std::string name = "nag_" + std::to_string(j) + "_" + std::to_string(other) + "_" +
                                     std::to_string(i) + "_" + std::to_string(a);
            for (int sign = 1; sign >= -1; sign -= 2) {
                std::vector<Term> terms{{y_j[a], double(sign)}, {y_l[a], double(-sign)}};
                for (int w : ws) {
                    terms.push_back({w, -1.0});
                }
                mip_.lp.add_row(std::move(terms), RowSense::LessEqual, 0.0, name + (sign > 0 ? "u" : "l"));
            }
        }
    }
}

void GeneralRowBuilder::add_pair(const DiffNodes& nd, const std::vector<int>& y_j, const std::vector<int>& y_l) {
    add_orientation(nd.j, nd, y_j, y_l);
    add_orientation(nd.l, nd, y_l, y_j);
}

} // namespace drspp

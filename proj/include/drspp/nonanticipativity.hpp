#pragma once

#include "drspp/ambiguity.hpp"
#include "drspp/graph.hpp"
#include "drspp/model.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace drspp {

/// Nodes whose attached constraints answer differently under scenarios j and l.
struct DiffNodes {
    int j = 0;
    int l = 0;
    std::vector<int> nodes;
};

DiffNodes diff_nodes(const AuxiliaryList& list, const ResponseVector& rj, const ResponseVector& rl);

/// Rows of the acyclic scheme for the unordered pair (j, l). y_j and y_l map arc index to model
/// variable. Throws NotAcyclic on graphs with a directed cycle.
std::vector<LinearRow> acyclic_rows(const Graph& g, const Reachability& reach, const DiffNodes& nd,
                                    const std::vector<int>& y_j, const std::vector<int>& y_l);

/// Ordering labels and the linearized max/min blocks of the general scheme. Variables are created
/// on demand inside the model and shared across all pairs of a scenario.
class GeneralRowBuilder {
  public:
    GeneralRowBuilder(MixedIntegerProgram& mip, const Graph& g);

    /// Adds t_j with t_{j,s} = 0, 0 <= t <= |N| - 1 and the visit-order rows. Returns label vars.
    const std::vector<int>& add_labels(int j, const std::vector<int>& y_j);

    /// Non-anticipativity rows for the pair in both orientations.
    void add_pair(const DiffNodes& nd, const std::vector<int>& y_j, const std::vector<int>& y_l);

    [[nodiscard]] const std::vector<int>& labels(int j) const { return labels_.at(j); }

  private:
    struct Block {
        int v;
        int v_bin;
        int w;
    };

    const Block& block(int j, int i, int n, const std::vector<int>& y_j);
    void add_orientation(int j, const DiffNodes& nd, const std::vector<int>& y_j, const std::vector<int>& y_l);

    MixedIntegerProgram& mip_;
    const Graph& g_;
    std::map<int, std::vector<int>> labels_;
    std::map<std::tuple<int, int, int>, Block> blocks_;
};

} // namespace drspp

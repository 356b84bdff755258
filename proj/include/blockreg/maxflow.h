#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace blockreg {

// s-t capacitated graph for one binary labeling subproblem. Construction
// keeps the original capacities; solving works on a private residual copy.
class FlowGraph {
public:
    struct Edge {
        int a;
        int b;
        double cap_ab;
        double cap_ba;
    };

    FlowGraph() = default;
    explicit FlowGraph(int node_count) { reset(node_count); }

    // Reuses buffers; graphs are built per move.
    void reset(int node_count);
    void reserve_edges(std::size_t n) { _edges.reserve(n); }

    int node_count() const { return (int)_cap_source.size(); }

    // Accumulates terminal capacities for `node`.
    void add_terminal(int node, double cap_source, double cap_sink);

    // Adds a directed capacity pair between two distinct nodes.
    void add_edge(int a, int b, double cap_ab, double cap_ba);

    double cap_source(int node) const { return _cap_source[node]; }
    double cap_sink(int node) const { return _cap_sink[node]; }
    const std::vector<Edge>& edges() const { return _edges; }

private:
    std::vector<double> _cap_source;
    std::vector<double> _cap_sink;
    std::vector<Edge> _edges;
};

struct CutResult {
    double flow = 0.0;
    // 0 = source side (reachable from the source in the residual graph),
    // 1 = sink side.
    std::vector<uint8_t> side;

    // Capacity crossing the reported cut, evaluated on the original graph.
    static double cut_capacity(const FlowGraph& g, const std::vector<uint8_t>& side);
};

// Exact max-flow / min-cut. Deterministic for a fixed construction order.
CutResult solve(const FlowGraph& graph);

} // namespace blockreg

#include "blockreg/maxflow.h"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace blockreg {

void FlowGraph::reset(int node_count) {
    if (node_count < 0) throw std::invalid_argument("FlowGraph: negative node count");
    _cap_source.assign(node_count, 0.0);
    _cap_sink.assign(node_count, 0.0);
    _edges.clear();
}

void FlowGraph::add_terminal(int node, double cap_source, double cap_sink) {
    if (!(cap_source >= 0.0) || !(cap_sink >= 0.0) || !std::isfinite(cap_source) ||
        !std::isfinite(cap_sink)) {
        throw std::invalid_argument("FlowGraph: terminal capacities must be finite and >= 0");
    }
    _cap_source[node] += cap_source;
    _cap_sink[node] += cap_sink;
}

void FlowGraph::add_edge(int a, int b, double cap_ab, double cap_ba) {
    if (a == b) throw std::invalid_argument("FlowGraph: self-loops are not allowed");
    if (!(cap_ab >= 0.0) || !(cap_ba >= 0.0) || !std::isfinite(cap_ab) || !std::isfinite(cap_ba)) {
        throw std::invalid_argument("FlowGraph: edge capacities must be finite and >= 0");
    }
    _edges.push_back({a, b, cap_ab, cap_ba});
}

double CutResult::cut_capacity(const FlowGraph& g, const std::vector<uint8_t>& side) {
    double total = 0.0;
    for (int v = 0; v < g.node_count(); ++v) {
        // source->v crosses when v is sink side; v->sink crosses when source side
        if (side[v]) total += g.cap_source(v);
        else total += g.cap_sink(v);
    }
    for (const auto& e : g.edges()) {
        if (!side[e.a] && side[e.b]) total += e.cap_ab;
        if (side[e.a] && !side[e.b]) total += e.cap_ba;
    }
    return total;
}

namespace {

// Augmenting-path max-flow with search trees grown from both terminals
// (the scheme of the classic BK solver). Deterministic: arcs are scanned in
// insertion order and the active list is FIFO. Instances are reusable to
// avoid per-solve allocation in the block loop.
class BkSolver {
public:
    void init(const FlowGraph& g) {
        const int n = g.node_count();
        _first.assign(n, -1);
        _trcap.assign(n, 0.0);
        _parent.assign(n, kNone);
        _tree.assign(n, kFree);
        _ts.assign(n, 0);
        _dist.assign(n, 0);
        _in_active.assign(n, 0);
        _to.clear();
        _next.clear();
        _rcap.clear();
        _active.clear();
        _orphans.clear();
        _flow = 0.0;
        _time = 0;
        _current = -1;

        for (int v = 0; v < n; ++v) {
            double cs = g.cap_source(v);
            double ct = g.cap_sink(v);
            _flow += cs < ct ? cs : ct;
            _trcap[v] = cs - ct;
        }
        _to.reserve(g.edges().size() * 2);
        _next.reserve(g.edges().size() * 2);
        _rcap.reserve(g.edges().size() * 2);
        for (const auto& e : g.edges()) {
            push_arc(e.a, e.b, e.cap_ab);
            push_arc(e.b, e.a, e.cap_ba);
        }
    }

    double run() {
        const int n = (int)_first.size();
        for (int v = 0; v < n; ++v) {
            if (_trcap[v] > 0.0) {
                _tree[v] = kSource;
                _parent[v] = kTerminal;
                _dist[v] = 1;
                activate(v);
            } else if (_trcap[v] < 0.0) {
                _tree[v] = kSink;
                _parent[v] = kTerminal;
                _dist[v] = 1;
                activate(v);
            }
        }

        while (true) {
            int connector = grow();
            if (connector < 0) break;
            ++_time;
            augment(connector);
            adopt();
        }
        return _flow;
    }

    bool source_side(int v) const { return _tree[v] == kSource; }

private:
    static constexpr int kTerminal = -1;
    static constexpr int kNone = -2;
    static constexpr int kOrphan = -3;
    static constexpr uint8_t kFree = 0, kSource = 1, kSink = 2;

    void push_arc(int from, int to, double cap) {
        int id = (int)_to.size();
        _to.push_back(to);
        _rcap.push_back(cap);
        _next.push_back(_first[from]);
        _first[from] = id;
    }

    void activate(int v) {
        if (_in_active[v]) return;
        _in_active[v] = 1;
        _active.push_back(v);
    }

    int pop_active() {
        while (!_active.empty()) {
            int v = _active.front();
            _active.pop_front();
            _in_active[v] = 0;
            if (_tree[v] != kFree) return v;
        }
        return -1;
    }

    // Returns an arc from the source tree into the sink tree, or -1.
    int grow() {
        while (true) {
            if (_current < 0) {
                _current = pop_active();
                if (_current < 0) return -1;
            }
            int p = _current;
            uint8_t t = _tree[p];
            for (int a = _first[p]; a >= 0; a = _next[a]) {
                double res = t == kSource ? _rcap[a] : _rcap[a ^ 1];
                if (!(res > 0.0)) continue;
                int q = _to[a];
                if (_tree[q] == kFree) {
                    _tree[q] = t;
                    _parent[q] = a ^ 1; // arc q -> p
                    _ts[q] = _ts[p];
                    _dist[q] = _dist[p] + 1;
                    activate(q);
                } else if (_tree[q] != t) {
                    // Connector is always oriented source tree -> sink tree.
                    return t == kSource ? a : (a ^ 1);
                } else if (_ts[q] <= _ts[p] && _dist[q] > _dist[p] + 1) {
                    _parent[q] = a ^ 1;
                    _ts[q] = _ts[p];
                    _dist[q] = _dist[p] + 1;
                }
            }
            _current = -1;
        }
    }

    void augment(int connector) {
        double bottleneck = _rcap[connector];

        int v = _to[connector ^ 1]; // tail: source-tree endpoint
        while (_parent[v] != kTerminal) {
            int pa = _parent[v];
            double r = _rcap[pa ^ 1];
            if (r < bottleneck) bottleneck = r;
            v = _to[pa];
        }
        int source_root = v;
        if (_trcap[source_root] < bottleneck) bottleneck = _trcap[source_root];

        v = _to[connector];
        while (_parent[v] != kTerminal) {
            int pa = _parent[v];
            if (_rcap[pa] < bottleneck) bottleneck = _rcap[pa];
            v = _to[pa];
        }
        int sink_root = v;
        if (-_trcap[sink_root] < bottleneck) bottleneck = -_trcap[sink_root];

        _rcap[connector] -= bottleneck;
        _rcap[connector ^ 1] += bottleneck;

        v = _to[connector ^ 1];
        while (_parent[v] != kTerminal) {
            int pa = _parent[v];
            _rcap[pa] += bottleneck;
            _rcap[pa ^ 1] -= bottleneck;
            int next = _to[pa];
            if (!(_rcap[pa ^ 1] > 0.0)) {
                _parent[v] = kOrphan;
                _orphans.push_back(v);
            }
            v = next;
        }
        _trcap[source_root] -= bottleneck;
        if (!(_trcap[source_root] > 0.0)) {
            _parent[source_root] = kOrphan;
            _orphans.push_back(source_root);
        }

        v = _to[connector];
        while (_parent[v] != kTerminal) {
            int pa = _parent[v];
            _rcap[pa] -= bottleneck;
            _rcap[pa ^ 1] += bottleneck;
            int next = _to[pa];
            if (!(_rcap[pa] > 0.0)) {
                _parent[v] = kOrphan;
                _orphans.push_back(v);
            }
            v = next;
        }
        _trcap[sink_root] += bottleneck;
        if (!(_trcap[sink_root] < 0.0)) {
            _parent[sink_root] = kOrphan;
            _orphans.push_back(sink_root);
        }

        _flow += bottleneck;
    }

    // Distance to the terminal through valid parents; -1 if disconnected.
    int origin_distance(int q) {
        int d = 0;
        int v = q;
        while (true) {
            if (_ts[v] == _time) {
                d += _dist[v];
                break;
            }
            int pa = _parent[v];
            if (pa == kTerminal) {
                d += 1;
                break;
            }
            if (pa == kOrphan || pa == kNone) return -1;
            ++d;
            v = _to[pa];
        }
        // Stamp the walked prefix so later checks short-circuit.
        int dv = d;
        v = q;
        while (_ts[v] != _time) {
            _ts[v] = _time;
            _dist[v] = dv;
            --dv;
            int pa = _parent[v];
            if (pa == kTerminal) break;
            v = _to[pa];
        }
        return d;
    }

    void adopt() {
        while (!_orphans.empty()) {
            int v = _orphans.front();
            _orphans.pop_front();
            uint8_t t = _tree[v];

            int best_arc = -1;
            int best_dist = -1;
            for (int a = _first[v]; a >= 0; a = _next[a]) {
                double res = t == kSource ? _rcap[a ^ 1] : _rcap[a];
                if (!(res > 0.0)) continue;
                int q = _to[a];
                if (_tree[q] != t) continue;
                int d = origin_distance(q);
                if (d < 0) continue;
                if (best_dist < 0 || d < best_dist) {
                    best_dist = d;
                    best_arc = a;
                }
            }

            if (best_arc >= 0) {
                _parent[v] = best_arc;
                _ts[v] = _time;
                _dist[v] = best_dist + 1;
                continue;
            }

            // No parent: v leaves the tree; children become orphans and
            // potential re-growth points become active again.
            for (int a = _first[v]; a >= 0; a = _next[a]) {
                int q = _to[a];
                if (_tree[q] != t) continue;
                double res = t == kSource ? _rcap[a ^ 1] : _rcap[a];
                if (res > 0.0) activate(q);
                if (_parent[q] == (a ^ 1)) {
                    _parent[q] = kOrphan;
                    _orphans.push_front(q);
                }
            }
            _tree[v] = kFree;
            if (_current == v) _current = -1;
        }
    }

    std::vector<int> _first;
    std::vector<int> _to;
    std::vector<int> _next;
    std::vector<double> _rcap;
    std::vector<double> _trcap;
    std::vector<int> _parent;
    std::vector<uint8_t> _tree;
    std::vector<int> _ts;
    std::vector<int> _dist;
    std::vector<uint8_t> _in_active;
    std::deque<int> _active;
    std::deque<int> _orphans;
    double _flow = 0.0;
    int _time = 0;
    int _current = -1;
};

} // namespace

CutResult solve(const FlowGraph& graph) {
    thread_local BkSolver solver;
    solver.init(graph);
    CutResult result;
    result.flow = solver.run();
    result.side.resize(graph.node_count());
    for (int v = 0; v < graph.node_count(); ++v) {
        result.side[v] = solver.source_side(v) ? 0 : 1;
    }
    return result;
}

} // namespace blockreg

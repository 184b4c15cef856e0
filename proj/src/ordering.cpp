#include "nls2d/ordering.hpp"

#include <algorithm>
#include <stdexcept>

namespace nls2d {

namespace {

// Quotient-graph node. A live variable keeps a list of adjacent variables and
// a list of adjacent elements; an eliminated variable becomes an element whose
// vars list holds its fill clique.
struct Node {
    std::vector<int> vars;
    std::vector<int> elems;
};

// Degree buckets (doubly linked lists indexed by degree).
struct DegreeLists {
    std::vector<int> head, next, prev, deg;
    int min_deg = 0;

    explicit DegreeLists(int n) : head(n + 1, -1), next(n, -1), prev(n, -1), deg(n, 0) {}

    void insert(int i, int d) {
        deg[i] = d;
        next[i] = head[d];
        prev[i] = -1;
        if (head[d] >= 0) prev[head[d]] = i;
        head[d] = i;
        min_deg = std::min(min_deg, d);
    }
    void remove(int i) {
        const int d = deg[i];
        if (prev[i] >= 0)
            next[prev[i]] = next[i];
        else
            head[d] = next[i];
        if (next[i] >= 0) prev[next[i]] = prev[i];
    }
    int pop_min(int n) {
        while (min_deg <= n && head[min_deg] < 0) ++min_deg;
        if (min_deg > n) return -1;
        const int i = head[min_deg];
        remove(i);
        return i;
    }
};

}  // namespace

std::vector<int> amd_order(const SparseCsr& a) {
    if (a.rows != a.cols) throw std::invalid_argument("amd_order: matrix not square");
    const int n = a.rows;
    std::vector<int> order;
    order.reserve(n);
    if (n == 0) return order;

    // Pattern of A + A^T without the diagonal.
    const SparseCsr at = transpose(a);
    std::vector<Node> node(n);
    {
        std::vector<int> mark(n, -1);
        for (int r = 0; r < n; ++r) {
            auto add = [&](const SparseCsr& m) {
                for (int p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
                    const int c = m.col_idx[p];
                    if (c != r && mark[c] != r) {
                        mark[c] = r;
                        node[r].vars.push_back(c);
                    }
                }
            };
            add(a);
            add(at);
        }
    }

    enum class Kind : unsigned char { Var, Elem, Dead };
    std::vector<Kind> kind(n, Kind::Var);
    DegreeLists lists(n);
    for (int i = 0; i < n; ++i) lists.insert(i, static_cast<int>(node[i].vars.size()));

    std::vector<int> vmark(n, -1);  // variable marks (Lp membership)
    std::vector<int> emark(n, -1);  // element marks (wsize validity)
    std::vector<int> wsize(n, 0);   // |Le \ Lp| scratch per element
    int vstamp = 0, estamp = 0;

    for (int k = 0; k < n;) {
        const int p = lists.pop_min(n);
        if (p < 0) break;

        // Lp = adjacent vars of p plus vars of p's elements, deduplicated.
        ++vstamp;
        vmark[p] = vstamp;
        std::vector<int> lp;
        for (int v : node[p].vars) {
            if (kind[v] == Kind::Var && vmark[v] != vstamp) {
                vmark[v] = vstamp;
                lp.push_back(v);
            }
        }
        for (int e : node[p].elems) {
            if (kind[e] != Kind::Elem) continue;
            for (int v : node[e].vars) {
                if (kind[v] == Kind::Var && vmark[v] != vstamp) {
                    vmark[v] = vstamp;
                    lp.push_back(v);
                }
            }
            kind[e] = Kind::Dead;  // absorbed into p
            node[e].vars.clear();
            node[e].vars.shrink_to_fit();
        }

        kind[p] = Kind::Elem;
        node[p].vars = lp;
        node[p].elems.clear();
        order.push_back(p);
        ++k;

        // |Le \ Lp| for every live element touching Lp. Lp members are still
        // marked with the current vstamp.
        ++estamp;
        for (int i : lp) {
            for (int e : node[i].elems) {
                if (kind[e] != Kind::Elem) continue;
                if (emark[e] != estamp) {
                    emark[e] = estamp;
                    wsize[e] = static_cast<int>(node[e].vars.size());
                }
            }
        }
        for (int i : lp) {
            for (int e : node[i].elems) {
                if (kind[e] == Kind::Elem && emark[e] == estamp) --wsize[e];
            }
        }

        for (int i : lp) {
            // Prune i's adjacency: drop dead entries and vars covered by Lp
            // (represented by element p from now on), then attach p.
            auto& vs = node[i].vars;
            std::size_t w = 0;
            for (int v : vs) {
                if (kind[v] == Kind::Var && vmark[v] != vstamp) vs[w++] = v;
            }
            vs.resize(w);

            auto& es = node[i].elems;
            w = 0;
            long ext = 0;  // sum over live elements of |Le \ Lp|
            for (int e : es) {
                if (kind[e] != Kind::Elem) continue;
                const int outside = (emark[e] == estamp) ? wsize[e]
                                                         : static_cast<int>(node[e].vars.size());
                if (outside <= 0) {
                    // element entirely covered by Lp: absorb it
                    kind[e] = Kind::Dead;
                    node[e].vars.clear();
                    continue;
                }
                ext += outside;
                es[w++] = e;
            }
            es.resize(w);
            es.push_back(p);

            const long bound = static_cast<long>(vs.size()) +
                               static_cast<long>(lp.size()) - 1 + ext;
            const int d_new = static_cast<int>(std::min<long>(n - k, std::max<long>(0, bound)));
            lists.remove(i);
            lists.insert(i, d_new);
        }
    }

    // Isolated / remaining vertices (e.g. empty rows).
    if (static_cast<int>(order.size()) < n) {
        std::vector<char> seen(n, 0);
        for (int i : order) seen[i] = 1;
        for (int i = 0; i < n; ++i)
            if (!seen[i]) order.push_back(i);
    }
    return order;
}

}  // namespace nls2d

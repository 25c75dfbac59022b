// Primal network simplex for the balanced transportation problem.
//
// Nodes 0..m-1 are supplies, m..m+n-1 demands, m+n is an artificial root.
// Each node starts attached to the root by an artificial arc carrying its
// supply, which gives a strongly feasible initial tree. Leaving arcs are
// chosen by Cunningham's rule (last blocking arc met when traversing the
// cycle from its apex), which keeps the tree strongly feasible and rules
// out cycling on degenerate pivots. Entering arcs use block search pricing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "mfl/csv.hpp"
#include "mfl/errors.hpp"
#include "mfl/transport.hpp"

namespace mfl {

namespace {

constexpr int kUp = 1;     // tree arc points from node to parent
constexpr int kDown = -1;  // tree arc points from parent to node

class NetworkSimplex {
public:
    NetworkSimplex(std::span<const double> rows, std::span<const double> cols, const DenseMatrix& cost)
        : m_(rows.size()), n_(cols.size()), nodes_(m_ + n_), root_(m_ + n_), real_arcs_(m_ * n_), cost_(cost) {
        double max_cost = 0.0;
        for (double c : cost.data()) max_cost = std::max(max_cost, std::abs(c));
        art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);

        const std::size_t arcs = real_arcs_ + nodes_;
        flow_.assign(arcs, 0.0);
        tree_pos_.assign(arcs, kNone);
        art_source_.resize(nodes_);
        art_target_.resize(nodes_);
        tree_arcs_.resize(nodes_);
        for (std::size_t u = 0; u < nodes_; ++u) {
            const double supply = u < m_ ? rows[u] : -cols[u - m_];
            const std::size_t a = real_arcs_ + u;
            if (supply >= 0.0) {
                art_source_[u] = u;
                art_target_[u] = root_;
                flow_[a] = supply;
            } else {
                art_source_[u] = root_;
                art_target_[u] = u;
                flow_[a] = -supply;
            }
            tree_arcs_[u] = a;
            tree_pos_[a] = u;
        }
        parent_.resize(nodes_ + 1);
        pred_.resize(nodes_ + 1);
        dir_.resize(nodes_ + 1);
        depth_.resize(nodes_ + 1);
        pi_.resize(nodes_ + 1);
        block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
        rebuild_tree();
    }

    void run() {
        // Pivot count bound guards against pathological floating-point stalls.
        const std::size_t max_pivots = 50 * (real_arcs_ + nodes_) + 1000;
        for (std::size_t pivots = 0; pivots < max_pivots; ++pivots) {
            const std::size_t entering = find_entering();
            if (entering == kNone) return;
            pivot(entering);
        }
        throw NumericalError("network simplex: pivot limit reached");
    }

    double flow(std::size_t i, std::size_t j) const { return flow_[i * n_ + j]; }

    double artificial_flow() const {
        double total = 0.0;
        for (std::size_t u = 0; u < nodes_; ++u) total += flow_[real_arcs_ + u];
        return total;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    std::size_t source(std::size_t a) const { return a < real_arcs_ ? a / n_ : art_source_[a - real_arcs_]; }
    std::size_t target(std::size_t a) const { return a < real_arcs_ ? m_ + a % n_ : art_target_[a - real_arcs_]; }
    double cost(std::size_t a) const { return a < real_arcs_ ? cost_.data()[a] : art_cost_; }

    void rebuild_tree() {
        // CSR adjacency of the current spanning tree, then BFS from the root.
        const std::size_t total = nodes_ + 1;
        std::vector<std::size_t> degree(total + 1, 0);
        for (std::size_t a : tree_arcs_) {
            ++degree[source(a) + 1];
            ++degree[target(a) + 1];
        }
        std::partial_sum(degree.begin(), degree.end(), degree.begin());
        adjacency_.resize(2 * tree_arcs_.size());
        std::vector<std::size_t> fill(degree.begin(), degree.end() - 1);
        for (std::size_t a : tree_arcs_) {
            adjacency_[fill[source(a)]++] = a;
            adjacency_[fill[target(a)]++] = a;
        }

        std::vector<char> seen(total, 0);
        queue_.clear();
        queue_.push_back(root_);
        seen[root_] = 1;
        parent_[root_] = kNone;
        pred_[root_] = kNone;
        depth_[root_] = 0;
        pi_[root_] = 0.0;
        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const std::size_t u = queue_[head];
            for (std::size_t k = degree[u]; k < degree[u + 1]; ++k) {
                const std::size_t a = adjacency_[k];
                const std::size_t s = source(a);
                const std::size_t v = s == u ? target(a) : s;
                if (seen[v]) continue;
                seen[v] = 1;
                parent_[v] = u;
                pred_[v] = a;
                depth_[v] = depth_[u] + 1;
                // Reduced cost c + π_s − π_t vanishes on tree arcs.
                if (s == v) {
                    dir_[v] = kUp;
                    pi_[v] = pi_[u] - cost(a);
                } else {
                    dir_[v] = kDown;
                    pi_[v] = pi_[u] + cost(a);
                }
                queue_.push_back(v);
            }
        }
        if (queue_.size() != total) throw NumericalError("network simplex: basis is not a spanning tree");
    }

    double reduced_cost(std::size_t a, double& scale) const {
        const double c = cost(a);
        const double ps = pi_[source(a)];
        const double pt = pi_[target(a)];
        scale = std::abs(c) + std::abs(ps) + std::abs(pt);
        return c + ps - pt;
    }

    std::size_t find_entering() {
        double best = 0.0;
        std::size_t best_arc = kNone;
        std::size_t scanned_in_block = 0;
        for (std::size_t count = 0; count < real_arcs_; ++count) {
            const std::size_t a = next_arc_;
            next_arc_ = next_arc_ + 1 == real_arcs_ ? 0 : next_arc_ + 1;
            if (tree_pos_[a] == kNone) {
                double scale = 0.0;
                const double rc = reduced_cost(a, scale);
                if (rc < -1e-13 * scale - 1e-300 && rc < best) {
                    best = rc;
                    best_arc = a;
                }
            }
            if (++scanned_in_block == block_) {
                if (best_arc != kNone) return best_arc;
                scanned_in_block = 0;
            }
        }
        return best_arc;
    }

    void pivot(std::size_t in_arc) {
        const std::size_t first = source(in_arc);
        const std::size_t second = target(in_arc);

        std::size_t a = first;
        std::size_t b = second;
        while (a != b) {
            if (depth_[a] >= depth_[b]) {
                a = parent_[a];
            } else {
                b = parent_[b];
            }
        }
        const std::size_t join = a;

        // Flow is pushed first -> second -> join -> first. On the first side
        // arcs pointing up lose flow; on the second side arcs pointing down do.
        double delta = std::numeric_limits<double>::infinity();
        std::size_t u_out = kNone;
        for (std::size_t u = first; u != join; u = parent_[u]) {
            if (dir_[u] == kUp) {
                const double d = std::max(0.0, flow_[pred_[u]]);
                if (d < delta) {
                    delta = d;
                    u_out = u;
                }
            }
        }
        for (std::size_t u = second; u != join; u = parent_[u]) {
            if (dir_[u] == kDown) {
                const double d = std::max(0.0, flow_[pred_[u]]);
                if (d <= delta) {
                    delta = d;
                    u_out = u;
                }
            }
        }
        if (u_out == kNone) throw NumericalError("network simplex: unbounded cycle");

        if (delta > 0.0) {
            flow_[in_arc] += delta;
            for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] -= dir_[u] * delta;
            for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += dir_[u] * delta;
        }
        const std::size_t out_arc = pred_[u_out];
        flow_[out_arc] = 0.0;
        const std::size_t slot = tree_pos_[out_arc];
        tree_pos_[out_arc] = kNone;
        tree_arcs_[slot] = in_arc;
        tree_pos_[in_arc] = slot;
        rebuild_tree();
    }

    std::size_t m_, n_, nodes_, root_, real_arcs_;
    const DenseMatrix& cost_;
    double art_cost_ = 0.0;
    std::vector<double> flow_;
    std::vector<std::size_t> tree_pos_;
    std::vector<std::size_t> tree_arcs_;
    std::vector<std::size_t> art_source_, art_target_;
    std::vector<std::size_t> parent_, pred_, depth_;
    std::vector<int> dir_;
    std::vector<double> pi_;
    std::vector<std::size_t> adjacency_, queue_;
    std::size_t block_ = 10;
    std::size_t next_arc_ = 0;
};

}  // namespace

TransportPlan solve_transport(std::span<const double> rows, std::span<const double> cols, const DenseMatrix& cost) {
    if (rows.empty() || cols.empty()) throw ArgumentError("solve_transport: empty weight vector");
    if (cost.rows() != rows.size() || cost.cols() != cols.size()) {
        throw ArgumentError("solve_transport: cost matrix shape does not match weights");
    }
    double row_total = 0.0;
    double col_total = 0.0;
    for (double w : rows) {
        if (!(w >= 0.0)) throw ArgumentError("solve_transport: negative weight");
        row_total += w;
    }
    for (double w : cols) {
        if (!(w >= 0.0)) throw ArgumentError("solve_transport: negative weight");
        col_total += w;
    }
    if (!(row_total > 0.0) || !(col_total > 0.0)) throw ArgumentError("solve_transport: degenerate (all-zero) weights");
    if (std::abs(row_total - col_total) > 1e-10 * row_total) {
        throw ArgumentError("solve_transport: unbalanced weights");
    }

    // Rescale columns so totals match bit-for-bit.
    std::vector<double> col_scaled(cols.begin(), cols.end());
    for (double& w : col_scaled) w *= row_total / col_total;

    NetworkSimplex solver(rows, col_scaled, cost);
    solver.run();
    if (solver.artificial_flow() > 1e-9 * row_total) {
        throw NumericalError("network simplex: artificial arcs still carry flow");
    }

    TransportPlan out;
    out.row_weights.assign(rows.begin(), rows.end());
    out.col_weights.assign(cols.begin(), cols.end());
    out.plan = DenseMatrix(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double f = std::max(0.0, solver.flow(i, j));
            out.plan(i, j) = f;
            out.cost += f * cost(i, j);
        }
    }
    return out;
}

void write_plan_csv(std::ostream& os, const TransportPlan& plan, const DenseMatrix& ground_cost) {
    os << "i,j,mass,cost\n";
    for (std::size_t i = 0; i < plan.plan.rows(); ++i) {
        for (std::size_t j = 0; j < plan.plan.cols(); ++j) {
            if (plan.plan(i, j) == 0.0) continue;
            os << i << ',' << j << ',' << csv::real(plan.plan(i, j)) << ',' << csv::real(ground_cost(i, j)) << '\n';
        }
    }
}

}  // namespace mfl

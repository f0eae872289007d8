#pragma once

// Exact discrete optimal transport by the transportation simplex (the
// network-simplex specialisation to a complete bipartite graph). The basis is
// a spanning tree of the row/column graph; potentials come from the tree and
// pricing is Dantzig's rule, falling back to Bland's rule after a run of
// degenerate pivots so the method cannot cycle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "geobary/linalg.hpp"

namespace geobary {

struct TransportResult {
  double cost = 0.0;
  Matrix plan;
  Vector row_potential;
  Vector col_potential;
  /// primal cost minus dual value; nonnegative up to rounding.
  double duality_gap = 0.0;
  /// most negative reduced cost C_ij - u_i - v_j (dual feasibility slack).
  double min_reduced_cost = 0.0;
  int pivots = 0;
};

inline constexpr int kDefaultExactCap = 256;

namespace detail {

struct BasicCell {
  int row;
  int col;
  double flow;
};

class TransportSimplex {
 public:
  TransportSimplex(const Vector& a, const Vector& b, const Matrix& cost)
      : a_(a), b_(b), c_(cost), m_(static_cast<int>(a.size())), n_(static_cast<int>(b.size())) {
    eps_ = 1e-12 * std::max(1.0, c_.cwiseAbs().maxCoeff());
  }

  TransportResult run() {
    northwest_corner();
    TransportResult res;
    const long max_pivots = 200L * (m_ + n_) * (m_ + n_) + 1000;
    bool bland = false;
    int degenerate_run = 0;
    for (long it = 0;; ++it) {
      require(it < max_pivots, Errc::no_convergence, "transport simplex pivot cap reached");
      compute_potentials();
      int ei = -1, ej = -1;
      double best = -eps_;
      for (int i = 0; i < m_ && !(bland && ei >= 0); ++i)
        for (int j = 0; j < n_; ++j) {
          const double r = c_(i, j) - u_[i] - v_[j];
          if (r < best) {
            best = r;
            ei = i;
            ej = j;
            if (bland) break;
          }
        }
      if (ei < 0) break;
      const double theta = pivot(ei, ej, bland);
      ++res.pivots;
      degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
      if (degenerate_run > 2 * (m_ + n_)) bland = true;
    }

    res.plan = Matrix::Zero(m_, n_);
    for (const auto& cell : basis_) res.plan(cell.row, cell.col) += cell.flow;
    res.cost = (res.plan.array() * c_.array()).sum();
    res.row_potential = u_;
    res.col_potential = v_;
    res.duality_gap = res.cost - (a_.dot(u_) + b_.dot(v_));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) worst = std::min(worst, c_(i, j) - u_[i] - v_[j]);
    res.min_reduced_cost = worst;
    return res;
  }

 private:
  void northwest_corner() {
    int i = 0, j = 0;
    double ra = a_[0], rb = b_[0];
    for (;;) {
      const double f = std::min(ra, rb);
      basis_.push_back({i, j, std::max(f, 0.0)});
      ra -= f;
      rb -= f;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        rb = b_[++j];
      } else if (j == n_ - 1) {
        ra = a_[++i];
      } else if (ra <= rb) {
        ra = a_[++i];
      } else {
        rb = b_[++j];
      }
    }
  }

  void build_adjacency() {
    adj_.assign(static_cast<std::size_t>(m_ + n_), {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj_[static_cast<std::size_t>(basis_[k].row)].push_back(static_cast<int>(k));
      adj_[static_cast<std::size_t>(m_ + basis_[k].col)].push_back(static_cast<int>(k));
    }
  }

  int other_end(int node, const BasicCell& cell) const {
    return node < m_ ? m_ + cell.col : cell.row;
  }

  void compute_potentials() {
    build_adjacency();
    u_ = Vector::Zero(m_);
    v_ = Vector::Zero(n_);
    std::vector<char> seen(static_cast<std::size_t>(m_ + n_), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      const int node = q.front();
      q.pop();
      for (int k : adj_[static_cast<std::size_t>(node)]) {
        const BasicCell& cell = basis_[static_cast<std::size_t>(k)];
        const int next = other_end(node, cell);
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        if (next >= m_)
          v_[cell.col] = c_(cell.row, cell.col) - u_[cell.row];
        else
          u_[cell.row] = c_(cell.row, cell.col) - v_[cell.col];
        q.push(next);
      }
    }
  }

  // Adds cell (ei, ej) to the basis and removes the blocking cell of the
  // cycle it closes. Returns the step length.
  double pivot(int ei, int ej, bool bland) {
    const int start = ei, target = m_ + ej;
    std::vector<int> parent_edge(static_cast<std::size_t>(m_ + n_), -1);
    std::vector<char> seen(static_cast<std::size_t>(m_ + n_), 0);
    std::queue<int> q;
    q.push(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!q.empty() && !seen[static_cast<std::size_t>(target)]) {
      const int node = q.front();
      q.pop();
      for (int k : adj_[static_cast<std::size_t>(node)]) {
        const int next = other_end(node, basis_[static_cast<std::size_t>(k)]);
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        parent_edge[static_cast<std::size_t>(next)] = k;
        q.push(next);
      }
    }
    // Walk back from the column to the row; odd edges lose flow.
    std::vector<int> path;
    for (int node = target; node != start;) {
      const int k = parent_edge[static_cast<std::size_t>(node)];
      path.push_back(k);
      node = other_end(node, basis_[static_cast<std::size_t>(k)]);
    }
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t e = 0; e < path.size(); e += 2) {
      const BasicCell& cell = basis_[static_cast<std::size_t>(path[e])];
      const double f = cell.flow;
      const bool better = f < theta || (bland && f == theta && index_of(cell) < index_of(basis_[static_cast<std::size_t>(leave)]));
      if (better) {
        theta = f;
        leave = path[e];
      }
    }
    for (std::size_t e = 0; e < path.size(); ++e) {
      BasicCell& cell = basis_[static_cast<std::size_t>(path[e])];
      cell.flow += (e % 2 == 0) ? -theta : theta;
      if (cell.flow < 0.0) cell.flow = 0.0;
    }
    basis_[static_cast<std::size_t>(leave)] = {ei, ej, theta};
    return theta;
  }

  long index_of(const BasicCell& c) const { return static_cast<long>(c.row) * n_ + c.col; }

  const Vector& a_;
  const Vector& b_;
  const Matrix& c_;
  int m_, n_;
  double eps_;
  std::vector<BasicCell> basis_;
  std::vector<std::vector<int>> adj_;
  Vector u_, v_;
};

}  // namespace detail

/// Minimum-cost coupling of marginals a (rows) and b (columns).
inline TransportResult solve_transport(const Vector& a, const Vector& b, const Matrix& cost,
                                       int cap = kDefaultExactCap) {
  require(a.size() > 0 && b.size() > 0, Errc::invalid_inputs, "empty marginal");
  require(cost.rows() == a.size() && cost.cols() == b.size(), Errc::grid_mismatch,
          "cost matrix does not match the marginals");
  require(a.size() <= cap && b.size() <= cap, Errc::too_large_for_exact,
          "support exceeds the exact-solver cap of " + std::to_string(cap));
  detail::TransportSimplex solver(a, b, cost);
  return solver.run();
}

}  // namespace geobary

#include "acnet/acs.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <tuple>

namespace acnet {

std::string to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Core: return "core";
    case NodeRole::Periphery: return "periphery";
    case NodeRole::Outside: return "outside";
  }
  return "unknown";
}

namespace {

std::vector<std::vector<Index>> successors(const Mask& c) {
  std::vector<std::vector<Index>> succ(static_cast<std::size_t>(c.rows()));
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      if (c(i, j)) succ[i].push_back(j);
    }
  }
  return succ;
}

std::vector<char> reachable_from(const std::vector<std::vector<Index>>& succ, const std::vector<Index>& sources) {
  std::vector<char> seen(succ.size(), 0);
  std::deque<Index> queue;
  for (Index s : sources) {
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    for (Index w : succ[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

// Nodes strictly downstream of `sources` (reached by a path of length >= 1).
std::vector<char> downstream_of(const std::vector<std::vector<Index>>& succ, const std::vector<Index>& sources) {
  std::vector<Index> next;
  for (Index s : sources) next.insert(next.end(), succ[s].begin(), succ[s].end());
  return reachable_from(succ, next);
}

struct Structure {
  std::vector<std::vector<Index>> succ;
  std::vector<std::vector<Index>> comps;   // reverse topological order
  std::vector<std::size_t> comp_of;
  std::vector<char> cyclic;                // per component
  std::vector<std::vector<std::size_t>> groups;  // cyclic component ids per distinct ACS
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

Structure analyze(const Mask& c) {
  Structure s;
  s.succ = successors(c);
  s.comps = strongly_connected_components(c);
  s.comp_of.assign(static_cast<std::size_t>(c.rows()), 0);
  s.cyclic.assign(s.comps.size(), 0);
  for (std::size_t k = 0; k < s.comps.size(); ++k) {
    for (Index v : s.comps[k]) s.comp_of[v] = k;
    const auto& members = s.comps[k];
    s.cyclic[k] = members.size() >= 2 || c(members[0], members[0]) ? 1 : 0;
  }

  std::vector<std::size_t> cyc;
  for (std::size_t k = 0; k < s.comps.size(); ++k) {
    if (s.cyclic[k]) cyc.push_back(k);
  }
  std::vector<std::size_t> parent(s.comps.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t x : cyc) {
    const auto reach = reachable_from(s.succ, s.comps[x]);
    for (std::size_t y : cyc) {
      if (y != x && reach[s.comps[y][0]]) parent[find_root(parent, x)] = find_root(parent, y);
    }
  }
  std::vector<std::vector<std::size_t>> by_root(s.comps.size());
  for (std::size_t x : cyc) by_root[find_root(parent, x)].push_back(x);
  for (auto& g : by_root) {
    if (!g.empty()) s.groups.push_back(std::move(g));
  }
  auto smallest = [&](const std::vector<std::size_t>& g) {
    Index m = std::numeric_limits<Index>::max();
    for (std::size_t k : g) m = std::min(m, s.comps[k][0]);
    return m;
  };
  std::sort(s.groups.begin(), s.groups.end(),
            [&](const auto& a, const auto& b) { return smallest(a) < smallest(b); });
  return s;
}

struct BlockEigen {
  double lambda = 0.0;
  VectorXd vector;  // unit sum, over the block's members
  int iterations = 0;
};

// Collatz-Wielandt bounds: for positive v, min and max of (A v)_i / v_i
// bracket the spectral radius of an irreducible nonnegative A.
std::pair<double, double> cw_bounds(const MatrixXd& a, const VectorXd& v) {
  const VectorXd ratio = (a * v).cwiseQuotient(v);
  return {ratio.minCoeff(), ratio.maxCoeff()};
}

// Perron root of an irreducible block with at least one edge, working on
// A = C_S^T. A few power steps on A + I (primitive, so no cycling) make v
// strictly positive; shifted inverse iteration with sigma above the upper
// bound then closes the bracket. (sigma I - A) is a nonsingular M-matrix
// there, so its inverse is nonnegative and v stays positive.
BlockEigen block_perron(const Mask& c, const std::vector<Index>& members, const PfOptions& options) {
  const Index n = static_cast<Index>(members.size());
  MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(j, i) = c(members[i], members[j]);
  }

  VectorXd v = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  int it = 0;
  for (; it < n + 50; ++it) {
    v += a * v;
    v /= v.sum();
  }
  auto [lo, hi] = cw_bounds(a, v);
  auto done = [&] { return hi - lo <= options.tol * std::max(1.0, hi); };
  while (!done() && it < options.max_iter) {
    const double sigma = hi + std::max(hi - lo, 1e-3 * options.tol * std::max(1.0, hi));
    const auto lu = (sigma * MatrixXd::Identity(n, n) - a).partialPivLu();
    for (int inner = 0; inner < 8 && !done(); ++inner, ++it) {
      v = lu.solve(v).cwiseMax(0.0);
      v /= v.sum();
      if ((v.array() <= 0.0).any()) break;  // lost positivity to rounding; refactor
      std::tie(lo, hi) = cw_bounds(a, v);
    }
    if ((v.array() <= 0.0).any()) {
      for (Index k = 0; k < n; ++k) {
        v += a * v;
        v /= v.sum();
      }
      std::tie(lo, hi) = cw_bounds(a, v);
    }
  }
  if (!done()) {
    throw ConvergenceError("Perron iteration did not converge on a block of size " + std::to_string(n),
                           options.max_iter, hi - lo);
  }
  return {0.5 * (lo + hi), v, it};
}

bool same_lambda(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(a, b)); }

struct Spectral {
  PerronFrobenius pf;
  std::vector<double> comp_lambda;
  std::vector<double> group_lambda;
  std::optional<std::size_t> dominant_group;
};

Spectral spectral(const Mask& c, const Structure& s, const PfOptions& options) {
  const Index n = c.rows();
  Spectral out;
  out.pf.vector = VectorXd::Zero(n);
  out.comp_lambda.assign(s.comps.size(), 0.0);
  std::vector<VectorXd> comp_vec(s.comps.size());

  for (std::size_t k = 0; k < s.comps.size(); ++k) {
    if (!s.cyclic[k]) continue;  // a single node without a self-loop is the 1x1 block [0]
    auto be = block_perron(c, s.comps[k], options);
    out.comp_lambda[k] = be.lambda;
    comp_vec[k] = std::move(be.vector);
    out.pf.iterations = std::max(out.pf.iterations, be.iterations);
  }
  if (s.groups.empty()) return out;

  for (const auto& g : s.groups) {
    double lam = 0.0;
    for (std::size_t k : g) lam = std::max(lam, out.comp_lambda[k]);
    out.group_lambda.push_back(lam);
  }
  auto core_size = [&](std::size_t gi) {
    std::size_t sz = 0;
    for (std::size_t k : s.groups[gi]) sz += s.comps[k].size();
    return sz;
  };
  std::size_t best = 0;
  for (std::size_t gi = 1; gi < s.groups.size(); ++gi) {
    const double lb = out.group_lambda[best], lg = out.group_lambda[gi];
    if (same_lambda(lg, lb)) {
      if (core_size(gi) > core_size(best)) best = gi;  // groups are already ordered by smallest member
    } else if (lg > lb) {
      best = gi;
    }
  }
  out.dominant_group = best;
  const double lambda1 = out.group_lambda[best];
  out.pf.lambda1 = lambda1;

  // Within the dominant group pick a basic block (lambda_S = lambda1) from which
  // no other basic block is reachable; every block it reaches then has a
  // strictly smaller eigenvalue and the downstream solve below is well posed.
  std::vector<std::size_t> basic;
  for (std::size_t k : s.groups[best]) {
    if (same_lambda(out.comp_lambda[k], lambda1)) basic.push_back(k);
  }
  std::optional<std::size_t> chosen;
  for (std::size_t k : basic) {
    const auto below = downstream_of(s.succ, s.comps[k]);
    bool final_block = true;
    for (std::size_t other : basic) {
      if (other != k && below[s.comps[other][0]]) final_block = false;
    }
    if (final_block && (!chosen || s.comps[k][0] < s.comps[*chosen][0])) chosen = k;
  }
  const std::size_t root = *chosen;

  VectorXd v = VectorXd::Zero(n);
  for (std::size_t a = 0; a < s.comps[root].size(); ++a) v(s.comps[root][a]) = comp_vec[root](static_cast<Index>(a));

  const auto reach = reachable_from(s.succ, s.comps[root]);
  // Tarjan order is reverse topological, so walk it backwards.
  for (std::size_t idx = s.comps.size(); idx-- > 0;) {
    if (idx == root || !reach[s.comps[idx][0]]) continue;
    const auto& members = s.comps[idx];
    const Index m = static_cast<Index>(members.size());
    MatrixXd lhs = lambda1 * MatrixXd::Identity(m, m);
    VectorXd rhs = VectorXd::Zero(m);
    for (Index a = 0; a < m; ++a) {
      const Index j = members[a];
      for (Index i = 0; i < n; ++i) {
        if (!c(i, j)) continue;
        if (s.comp_of[i] == idx) {
          const auto pos = std::lower_bound(members.begin(), members.end(), i) - members.begin();
          lhs(a, pos) -= 1.0;
        } else {
          rhs(a) += v(i);
        }
      }
    }
    const VectorXd sol = lhs.partialPivLu().solve(rhs);
    for (Index a = 0; a < m; ++a) v(members[a]) = std::max(0.0, sol(a));
  }
  out.pf.vector = v / v.sum();
  return out;
}

std::vector<Index> sorted_true(const std::vector<char>& flags) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

}  // namespace

std::vector<std::vector<Index>> strongly_connected_components(const Mask& c) {
  const Index n = c.rows();
  if (c.cols() != n) throw ValidationError("adjacency matrix must be square");
  const auto succ = successors(c);

  std::vector<Index> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<Index> stack;
  std::vector<std::vector<Index>> comps;
  Index counter = 0;

  struct Frame {
    Index v;
    std::size_t next;
  };
  std::vector<Frame> call;

  for (Index start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    call.push_back({start, 0});
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = 1;

    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < succ[f.v].size()) {
        const Index w = succ[f.v][f.next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const Index v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<Index> comp;
        Index w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

std::vector<Index> find_core(const TechnologyNetwork& net) {
  std::vector<Index> core;
  for (const auto& comp : strongly_connected_components(net.c)) {
    if (comp.size() >= 2 || net.c(comp[0], comp[0])) core.insert(core.end(), comp.begin(), comp.end());
  }
  std::sort(core.begin(), core.end());
  return core;
}

std::vector<Index> find_periphery(const TechnologyNetwork& net, const std::vector<Index>& core) {
  auto reach = reachable_from(successors(net.c), core);
  for (Index v : core) reach[v] = 0;
  return sorted_true(reach);
}

std::vector<Acs> split_distinct_acs(const TechnologyNetwork& net, const std::vector<Index>& core,
                                    const std::vector<Index>& periphery) {
  const Structure s = analyze(net.c);
  std::vector<char> in_core(static_cast<std::size_t>(net.size()), 0), in_periphery(in_core);
  for (Index v : core) in_core[v] = 1;
  for (Index v : periphery) in_periphery[v] = 1;

  std::vector<Acs> out;
  for (const auto& g : s.groups) {
    Acs acs;
    for (std::size_t k : g) acs.core.insert(acs.core.end(), s.comps[k].begin(), s.comps[k].end());
    std::sort(acs.core.begin(), acs.core.end());
    for (Index v : acs.core) {
      if (!in_core[v]) throw ValidationError("split_distinct_acs: core set does not match the network");
    }
    const auto reach = reachable_from(s.succ, acs.core);
    for (std::size_t v = 0; v < reach.size(); ++v) {
      if (reach[v] && !in_core[v] && in_periphery[v]) acs.periphery.push_back(static_cast<Index>(v));
    }
    out.push_back(std::move(acs));
  }
  return out;
}

PerronFrobenius pf_eigen(const TechnologyNetwork& net, const PfOptions& options) {
  return spectral(net.c, analyze(net.c), options).pf;
}

AcsDecomposition decompose(const TechnologyNetwork& net, const PfOptions& options) {
  AcsDecomposition out;
  out.year = net.year;
  out.fields = net.fields;
  out.core = find_core(net);
  out.periphery = find_periphery(net, out.core);
  out.acs_list = split_distinct_acs(net, out.core, out.periphery);

  const Structure s = analyze(net.c);
  const Spectral sp = spectral(net.c, s, options);
  for (std::size_t g = 0; g < out.acs_list.size(); ++g) out.acs_list[g].lambda1 = sp.group_lambda[g];
  out.dominant = sp.dominant_group;
  out.lambda1 = sp.pf.lambda1;
  out.pf_vector = sp.pf.vector;

  const std::size_t n = static_cast<std::size_t>(net.size());
  out.roles.assign(n, NodeRole::Outside);
  for (Index v : out.core) out.roles[v] = NodeRole::Core;
  for (Index v : out.periphery) out.roles[v] = NodeRole::Periphery;
  for (std::size_t v = 0; v < n; ++v) {
    if (out.roles[v] == NodeRole::Outside) out.outside.push_back(static_cast<Index>(v));
  }

  if ((out.lambda1 > 0.0) != !out.core.empty()) {
    throw ComputeError("spectral and combinatorial cycle detection disagree");
  }
  if (out.dominant) {
    const auto& dom = out.acs_list[*out.dominant];
    std::vector<char> member(n, 0);
    for (Index v : dom.core) member[v] = 1;
    for (Index v : dom.periphery) member[v] = 1;
    const double eps = 1e-9 * out.pf_vector.maxCoeff();
    for (std::size_t v = 0; v < n; ++v) {
      if (out.pf_vector(static_cast<Index>(v)) > eps && !member[v]) {
        throw ComputeError("PF vector support leaves the dominant ACS at node " + std::to_string(v));
      }
    }
  }
  return out;
}

}  // namespace acnet

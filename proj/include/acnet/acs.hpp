#pragma once

#include "acnet/core.hpp"
#include "acnet/filter.hpp"

#include <optional>
#include <string>
#include <vector>

namespace acnet {

enum class NodeRole { Core, Periphery, Outside };

std::string to_string(NodeRole role);

// Strongly connected components in reverse topological order of the
// condensation (a component precedes every component that can reach it).
// Members of each component are sorted.
std::vector<std::vector<Index>> strongly_connected_components(const Mask& c);

// Nodes lying on at least one directed cycle: members of components with two
// or more nodes, plus nodes with a self-loop.
std::vector<Index> find_core(const TechnologyNetwork& net);

// Nodes reachable from the core by a directed path, excluding the core.
std::vector<Index> find_periphery(const TechnologyNetwork& net, const std::vector<Index>& core);

// One autocatalytic set: a group of core components connected by directed
// paths (in either direction) together with everything they reach.
struct Acs {
  std::vector<Index> core;
  std::vector<Index> periphery;
  double lambda1 = 0.0;  // largest eigenvalue of the subgraph induced by `core`

  std::size_t size() const { return core.size() + periphery.size(); }
};

// Distinct ACS, ordered by their smallest core member. lambda1 is left at 0;
// decompose() fills it in.
std::vector<Acs> split_distinct_acs(const TechnologyNetwork& net, const std::vector<Index>& core,
                                    const std::vector<Index>& periphery);

struct PfOptions {
  double tol = 1e-10;
  int max_iter = 100000;
};

struct PerronFrobenius {
  double lambda1 = 0.0;
  // Nonnegative, unit-sum eigenvector of C^T for lambda1 (the growth direction
  // of dy/dt = C^T y). All zeros when lambda1 = 0.
  VectorXd vector;
  int iterations = 0;
};

// Power iteration on (C_S + I) for every irreducible diagonal block C_S of the
// Frobenius normal form; lambda1 is the largest block eigenvalue. The vector
// is grown from the PF vector of the selected block through the blocks it
// reaches. Throws ConvergenceError when a block does not converge.
PerronFrobenius pf_eigen(const TechnologyNetwork& net, const PfOptions& options = {});

struct AcsDecomposition {
  int year = 0;
  Labels fields;
  std::vector<Index> core;
  std::vector<Index> periphery;
  std::vector<Index> outside;
  std::vector<NodeRole> roles;  // per field
  std::vector<Acs> acs_list;
  std::optional<std::size_t> dominant;  // index into acs_list
  double lambda1 = 0.0;
  VectorXd pf_vector;

  std::size_t acs_size() const { return core.size() + periphery.size(); }
};

// Combinatorial decomposition plus the spectral summary. Throws ComputeError
// when the PF vector's support leaves the dominant ACS.
AcsDecomposition decompose(const TechnologyNetwork& net, const PfOptions& options = {});

}  // namespace acnet

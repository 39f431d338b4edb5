#pragma once

#include "trigrid/octree/fe_grid.hpp"

#include <vector>

namespace trigrid {

struct Partition {
  int n_subdomains = 1;
  std::vector<int> subdomain;        // per leaf
  std::vector<int> component;        // per leaf; -1 for leaves without DOFs
  std::vector<int> component_count;  // per subdomain
  std::vector<long long> load;       // weighted load per subdomain
};

// Cuts the Z-curve into n contiguous segments of near-equal weighted length.
// A leaf goes to segment floor(n * (prefix + w/2) / W), so each segment's
// load is within one cell weight of W / n. Components of each segment's
// dual graph (face adjacency among active and cut leaves) are labelled.
Partition partition_zcurve(const FeGrid& grid, int n_subdomains, int weight_active_cut = 100,
                           int weight_inactive = 1);

// Relabels components given an explicit adjacency list over leaves; used when
// the dual graph is defined by shared degrees of freedom.
void label_components(Partition& partition, const std::vector<std::vector<int>>& adjacency,
                      const std::vector<char>& member);

}  // namespace trigrid

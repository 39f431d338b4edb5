#include "trigrid/octree/partition.hpp"

#include <numeric>
#include <string>

namespace trigrid {

void label_components(Partition& p, const std::vector<std::vector<int>>& adjacency,
                      const std::vector<char>& member) {
  const int n = static_cast<int>(p.subdomain.size());
  p.component.assign(n, -1);
  p.component_count.assign(p.n_subdomains, 0);
  std::vector<int> stack;
  for (int seed = 0; seed < n; ++seed) {
    if (!member[seed] || p.component[seed] >= 0) continue;
    const int s = p.subdomain[seed];
    const int label = p.component_count[s]++;
    p.component[seed] = label;
    stack.assign(1, seed);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j : adjacency[i]) {
        if (member[j] && p.component[j] < 0 && p.subdomain[j] == s) {
          p.component[j] = label;
          stack.push_back(j);
        }
      }
    }
  }
}

Partition partition_zcurve(const FeGrid& grid, int n_subdomains, int weight_active_cut,
                           int weight_inactive) {
  const int n = static_cast<int>(grid.size());
  if (n_subdomains < 1) throw ConfigError("number of subdomains must be at least 1");
  if (n_subdomains > n) {
    throw ConfigError("number of subdomains (" + std::to_string(n_subdomains) +
                      ") exceeds the number of leaves (" + std::to_string(n) + ")");
  }
  if (weight_active_cut < 1 || weight_inactive < 1) throw ConfigError("cell weights must be >= 1");

  Partition p;
  p.n_subdomains = n_subdomains;
  p.subdomain.resize(n);
  p.load.assign(n_subdomains, 0);
  std::vector<long long> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = grid.leaf(i).label == CellClass::Inactive ? weight_inactive : weight_active_cut;
  }
  const long long total = std::accumulate(w.begin(), w.end(), 0LL);
  long long prefix = 0;
  for (int i = 0; i < n; ++i) {
    // 2 * (prefix + w/2) keeps the midpoint rule in integers.
    const long long s = (static_cast<long long>(n_subdomains) * (2 * prefix + w[i])) / (2 * total);
    p.subdomain[i] = static_cast<int>(std::min<long long>(s, n_subdomains - 1));
    p.load[p.subdomain[i]] += w[i];
    prefix += w[i];
  }

  std::vector<char> member(n);
  std::vector<std::vector<int>> adjacency(n);
  for (int i = 0; i < n; ++i) {
    member[i] = is_discretized(grid.leaf(i).label) ? 1 : 0;
    if (member[i]) adjacency[i] = grid.face_neighbors(i);
  }
  label_components(p, adjacency, member);
  return p;
}

}  // namespace trigrid

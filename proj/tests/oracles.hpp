// Brute-force reference implementations. Deliberately naive and independent of
// the library's algorithms; only plain data crosses the boundary.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Adjacency = std::vector<std::set<int>>;

inline Adjacency random_graph(std::mt19937_64& rng, int n, double p) {
  Adjacency adj(static_cast<std::size_t>(n));
  std::bernoulli_distribution edge(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (edge(rng)) {
        adj[u].insert(v);
        adj[v].insert(u);
      }
  return adj;
}

inline std::vector<int> bfs_distances(const Adjacency& adj, int s) {
  std::vector<int> d(adj.size(), -1);
  std::queue<int> q;
  d[s] = 0;
  q.push(s);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push(v);
      }
  }
  return d;
}

// Every shortest s-t path, listed explicitly.
inline void enumerate_paths(const Adjacency& adj, const std::vector<int>& dist_to_t, int u, int t,
                            std::vector<int>& path, std::vector<std::vector<int>>& out) {
  if (u == t) {
    out.push_back(path);
    return;
  }
  for (int v : adj[u])
    if (dist_to_t[v] == dist_to_t[u] - 1) {
      path.push_back(v);
      enumerate_paths(adj, dist_to_t, v, t, path, out);
      path.pop_back();
    }
}

// Unnormalised betweenness over unordered pairs, by listing all shortest paths.
inline std::vector<double> betweenness(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<double> cb(adj.size(), 0.0);
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) {
      const auto dt = bfs_distances(adj, t);
      if (dt[s] < 0) continue;
      std::vector<std::vector<int>> paths;
      std::vector<int> path{s};
      enumerate_paths(adj, dt, s, t, path, paths);
      for (int v = 0; v < n; ++v) {
        if (v == s || v == t) continue;
        std::size_t through = 0;
        for (const auto& p : paths)
          if (std::find(p.begin(), p.end(), v) != p.end()) ++through;
        cb[v] += static_cast<double>(through) / static_cast<double>(paths.size());
      }
    }
  return cb;
}

// Newman Q straight from the adjacency matrix definition.
inline double modularity(const Adjacency& adj, const std::vector<int>& community) {
  const std::size_t n = adj.size();
  double two_m = 0.0;
  for (const auto& nb : adj) two_m += static_cast<double>(nb.size());
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (community[i] != community[j]) continue;
      const double a = adj[i].count(static_cast<int>(j)) ? 1.0 : 0.0;
      q += a - static_cast<double>(adj[i].size()) * static_cast<double>(adj[j].size()) / two_m;
    }
  return q / two_m;
}

// Best Q over every set partition (restricted growth strings). Small n only.
inline double best_modularity(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  double best = -1.0;
  while (true) {
    best = std::max(best, modularity(adj, rgs));
    int i = n - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int k = 0; k < i; ++k) mx = std::max(mx, rgs[k]);
      if (rgs[i] <= mx) {
        ++rgs[i];
        for (int k = i + 1; k < n; ++k) rgs[k] = 0;
        break;
      }
    }
    if (i == 0) break;
  }
  return best;
}

// Jobs linking a skill, one community label per job: count cross-community pairs.
inline std::uint64_t cross_pairs(const std::vector<int>& community_of_job) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < community_of_job.size(); ++i)
    for (std::size_t j = i + 1; j < community_of_job.size(); ++j)
      if (community_of_job[i] != community_of_job[j]) ++n;
  return n;
}

// A job as plain data for the transition double loop.
struct Job {
  std::string id;
  double rho = 0.0;
  std::set<std::string> activities;
};

using Pair = std::pair<std::string, std::string>;

// Exhaustive transition rule over High-risk sources; phi < 0 means the clause is off.
inline std::set<Pair> realistic_pairs(const std::vector<Job>& jobs, std::size_t tau, double phi) {
  std::set<Pair> out;
  for (const auto& s : jobs) {
    if (s.rho < 60.0 || s.activities.empty()) continue;
    for (const auto& t : jobs) {
      if (s.id == t.id) continue;
      std::size_t shared = 0;
      for (const auto& a : s.activities) shared += t.activities.count(a);
      const bool drop = t.rho < s.rho;
      const bool enough = shared >= tau;
      const bool transfer = phi < 0 || static_cast<double>(shared) >= phi * static_cast<double>(s.activities.size()) - 1e-12;
      if (drop && enough && transfer) out.insert({s.id, t.id});
    }
  }
  return out;
}

// Wilson bounds as the two roots of |p_hat - p| = z * sqrt(p (1 - p) / n), by bisection.
inline std::pair<double, double> wilson_by_root(std::size_t x, std::size_t n, double z) {
  const double ph = static_cast<double>(x) / static_cast<double>(n);
  auto f = [&](double p) { return std::fabs(ph - p) - z * std::sqrt(p * (1.0 - p) / static_cast<double>(n)); };
  auto solve = [&](double lo, double hi) {
    // f(lo) > 0 >= f(hi) or the reverse; keep the sign change bracketed.
    const bool lo_pos = f(lo) > 0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((f(mid) > 0) == lo_pos) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double lower = x == 0 ? 0.0 : solve(0.0, ph);
  const double upper = x == n ? 1.0 : solve(1.0, ph);
  return {lower, upper};
}

// Importance-weighted automatable share written task by task.
struct TaskSpec {
  char level;  // 'P', 'S', 'A'
  bool automatable;
};

inline double risk(const std::vector<TaskSpec>& tasks) {
  std::map<char, double> mass{{'P', 0.6}, {'S', 0.3}, {'A', 0.1}};
  std::map<char, int> count;
  for (const auto& t : tasks) ++count[t.level];
  double present = 0.0;
  for (const auto& [level, c] : count) present += mass[level];
  double rho = 0.0;
  for (const auto& t : tasks)
    if (t.automatable) rho += mass[t.level] / count[t.level] / present;
  return rho * 100.0;
}

// Hurwitz zeta by direct summation plus an Euler-Maclaurin tail.
inline double zeta(double s, double q) {
  const int N = 2000;
  double sum = 0.0;
  for (int k = 0; k < N; ++k) sum += std::pow(q + k, -s);
  const double a = q + N;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s) + s * std::pow(a, -s - 1.0) / 12.0;
  return sum;
}

// Inverse-CDF draw from the discrete power law P(x) = x^-gamma / zeta(gamma, xmin).
inline std::vector<std::size_t> zipf_sample(std::mt19937_64& rng, double gamma, std::size_t xmin, std::size_t n,
                                            std::size_t cap = 100000) {
  const double z = zeta(gamma, static_cast<double>(xmin));
  std::vector<double> cdf;
  double acc = 0.0;
  for (std::size_t x = xmin; x <= cap; ++x) {
    acc += std::pow(static_cast<double>(x), -gamma) / z;
    cdf.push_back(acc);
  }
  std::uniform_real_distribution<double> u(0.0, acc);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u(rng));
    out.push_back(xmin + static_cast<std::size_t>(it - cdf.begin()));
  }
  return out;
}

// Grid-search MLE over gamma in [lo, hi].
inline double power_law_mle(const std::vector<std::size_t>& xs, std::size_t xmin, double lo = 1.05, double hi = 6.0,
                            double step = 0.005) {
  double sum_log = 0.0;
  std::size_t n = 0;
  for (auto x : xs)
    if (x >= xmin) {
      sum_log += std::log(static_cast<double>(x));
      ++n;
    }
  double best_g = lo, best_ll = -1e300;
  for (double g = lo; g <= hi; g += step) {
    const double ll = -g * sum_log - static_cast<double>(n) * std::log(zeta(g, static_cast<double>(xmin)));
    if (ll > best_ll) {
      best_ll = ll;
      best_g = g;
    }
  }
  return best_g;
}

}  // namespace oracle

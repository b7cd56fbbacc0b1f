#ifndef VERTRACE_LEDGER_HPP
#define VERTRACE_LEDGER_HPP

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertrace {

/// One predicted singularity of the fibered wave-trace expansion near a
/// geodesic length: (t - L + i0)^{-gamma} log^{h(gamma)}(t - L + i0) with
/// gamma = q + mu_d - n_p/2 - v and mu_d = k - sum_i (m r_i + sum_n nu_{i,n}).
struct SingularityLedgerEntry {
  int d = 0;                                    // form degree
  std::vector<std::vector<int>> partition;      // d_i parts with their sub-partitions p_{i,n}
  int mu_d = 0;
  int p_index = 0;                              // which critical component
  int codim = 0;                                // n_p
  int v = 0;
  int gamma_times_2 = 0;                        // exact: gamma = gamma_times_2 / 2
  bool log_flag = false;                        // Heaviside convention: h(0) = 1
  bool order_violation = false;                 // mu_d > 0 (cannot occur under nu <= m)

  double gamma() const { return gamma_times_2 / 2.0; }

  std::string partition_str() const {
    if (partition.empty()) return "-";
    std::ostringstream os;
    for (size_t i = 0; i < partition.size(); ++i) {
      if (i) os << "+";
      os << "(";
      for (size_t n = 0; n < partition[i].size(); ++n) {
        if (n) os << "+";
        os << partition[i][n];
      }
      os << ")";
    }
    return os.str();
  }
};

struct LedgerParams {
  int q = 1;                    // fiber dimension
  int m = 2;                    // reference order
  std::map<int, int> nu;        // form degree p -> order nu_p of Q_[p]
  int d = 0;                    // total form degree of the summand
  std::vector<int> codims;      // n_p per critical component
  int v_max = 0;
  bool enforce_order_bound = false;  // require nu_p <= m for all provided degrees
};

namespace detail {

// partitions of n into weakly decreasing parts drawn from `allowed` (sorted descending)
inline void partitions_into(int n, int max_part, const std::vector<int>& allowed,
                            std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p : allowed) {
    if (p > max_part || p > n) continue;
    cur.push_back(p);
    partitions_into(n - p, p, allowed, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions(int n, const std::vector<int>& allowed) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions_into(n, n, allowed, cur, out);
  return out;
}

}  // namespace detail

/// Enumerate the ledger for the given parameters. For d = 0 the table
/// reduces to the single-family exponents gamma = q - v with no mu shift
/// and log present iff v >= q.
inline std::vector<SingularityLedgerEntry> singularity_ledger(const LedgerParams& params) {
  if (params.d < 0 || params.v_max < 0) throw std::invalid_argument("singularity_ledger: bad inputs");
  if (params.enforce_order_bound)
    for (const auto& [p, nu] : params.nu)
      if (nu > params.m)
        throw std::invalid_argument("singularity_ledger: order bound nu_p <= m violated at degree " +
                                    std::to_string(p));

  std::vector<SingularityLedgerEntry> out;
  if (params.d == 0) {
    for (int v = 0; v <= params.v_max; ++v) {
      SingularityLedgerEntry e;
      e.d = 0;
      e.mu_d = 0;
      e.codim = 0;
      e.v = v;
      e.gamma_times_2 = 2 * (params.q - v);
      e.log_flag = e.gamma_times_2 <= 0;
      out.push_back(e);
    }
    return out;
  }

  std::vector<int> degrees;
  for (const auto& [p, nu] : params.nu) degrees.push_back(p);
  std::sort(degrees.rbegin(), degrees.rend());

  // outer parts d_i range over 1..d; each is sub-partitioned into degrees
  // that actually carry an operator (nu defined)
  std::vector<int> all_parts;
  for (int t = params.d; t >= 1; --t) all_parts.push_back(t);
  auto outer = detail::partitions(params.d, all_parts);

  bool any = false;
  for (const auto& parts : outer) {
    // sub-partitions per part, each into degrees with nu defined
    std::vector<std::vector<std::vector<int>>> subs;
    bool valid = true;
    for (int di : parts) {
      auto s = detail::partitions(di, degrees);
      if (s.empty()) {
        valid = false;
        break;
      }
      subs.push_back(std::move(s));
    }
    if (!valid) continue;

    // cartesian product over the sub-partition choices
    std::vector<size_t> pick(parts.size(), 0);
    while (true) {
      std::vector<std::vector<int>> chosen;
      int k = int(parts.size());
      int mu = k;
      for (int i = 0; i < k; ++i) {
        const auto& sp = subs[i][pick[i]];
        chosen.push_back(sp);
        mu -= params.m * int(sp.size());
        for (int p : sp) mu -= params.nu.at(p);
      }
      any = true;
      for (size_t pi = 0; pi < std::max<size_t>(1, params.codims.size()); ++pi) {
        int np = params.codims.empty() ? 0 : params.codims[pi];
        for (int v = 0; v <= params.v_max; ++v) {
          SingularityLedgerEntry e;
          e.d = params.d;
          e.partition = chosen;
          e.mu_d = mu;
          e.p_index = int(pi);
          e.codim = np;
          e.v = v;
          e.gamma_times_2 = 2 * params.q + 2 * mu - np - 2 * v;
          e.log_flag = e.gamma_times_2 <= 0;
          e.order_violation = mu > 0;
          out.push_back(e);
        }
      }
      // advance cartesian counter
      int i = 0;
      while (i < int(parts.size())) {
        if (++pick[i] < subs[i].size()) break;
        pick[i] = 0;
        ++i;
      }
      if (i == int(parts.size())) break;
    }
  }
  if (!any)
    throw std::invalid_argument("singularity_ledger: no valid composition for d (filters excluded all)");
  return out;
}

}  // namespace vertrace

#endif

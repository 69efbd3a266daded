#include "cdv/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdv/error.hpp"

namespace cdv {

namespace {

constexpr int STATE_TREE = 0;
constexpr int STATE_LOWER = 1;
constexpr int DIR_UP = 1;
constexpr int DIR_DOWN = -1;
constexpr double INF = std::numeric_limits<double>::infinity();

}  // namespace

NetworkSimplex::NetworkSimplex(std::vector<double> supply, std::vector<double> demand,
                               std::vector<double> cost)
    : n0_(supply.size()), n1_(demand.size()) {
  if (cost.size() != n0_ * n1_) throw Error("transport", "cost array has wrong size");
  node_num_ = n0_ + n1_;
  arc_num_ = n0_ * n1_;
  all_arc_num_ = arc_num_ + node_num_;
  root_ = node_num_;

  source_.resize(all_arc_num_);
  target_.resize(all_arc_num_);
  cost_.resize(all_arc_num_);
  flow_.assign(all_arc_num_, 0.0);
  state_.assign(all_arc_num_, STATE_LOWER);
  for (std::size_t i = 0; i < n0_; ++i)
    for (std::size_t j = 0; j < n1_; ++j) {
      std::size_t e = i * n1_ + j;
      source_[e] = static_cast<int>(i);
      target_[e] = static_cast<int>(n0_ + j);
      cost_[e] = cost[e];
    }

  supply_.assign(node_num_ + 1, 0.0);
  for (std::size_t i = 0; i < n0_; ++i) supply_[i] = supply[i];
  for (std::size_t j = 0; j < n1_; ++j) supply_[n0_ + j] = -demand[j];

  double max_cost = 0.0;
  for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
  const double art_cost = (max_cost + 1.0) * static_cast<double>(node_num_);
  eps_ = 1e-12 * (1.0 + max_cost);

  parent_.assign(node_num_ + 1, -1);
  pred_.assign(node_num_ + 1, -1);
  thread_.assign(node_num_ + 1, 0);
  rev_thread_.assign(node_num_ + 1, 0);
  succ_num_.assign(node_num_ + 1, 0);
  last_succ_.assign(node_num_ + 1, 0);
  pred_dir_.assign(node_num_ + 1, 0);
  pi_.assign(node_num_ + 1, 0.0);

  const int root = static_cast<int>(root_);
  parent_[root] = -1;
  pred_[root] = -1;
  thread_[root] = 0;
  rev_thread_[0] = root;
  succ_num_[root] = static_cast<int>(node_num_) + 1;
  last_succ_[root] = root - 1;
  pi_[root] = 0.0;

  for (int u = 0, e = static_cast<int>(arc_num_); u != root; ++u, ++e) {
    parent_[u] = root;
    pred_[u] = e;
    thread_[u] = u + 1;
    rev_thread_[u + 1] = u;
    succ_num_[u] = 1;
    last_succ_[u] = u;
    state_[e] = STATE_TREE;
    if (supply_[u] >= 0.0) {
      pred_dir_[u] = DIR_UP;
      pi_[u] = 0.0;
      source_[e] = u;
      target_[e] = root;
      flow_[e] = supply_[u];
      cost_[e] = 0.0;
    } else {
      pred_dir_[u] = DIR_DOWN;
      pi_[u] = art_cost;
      source_[e] = root;
      target_[e] = u;
      flow_[e] = -supply_[u];
      cost_[e] = art_cost;
    }
  }

  block_size_ = std::max<std::size_t>(
      10, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(arc_num_)))));
}

bool NetworkSimplex::find_entering_arc() {
  double min = -eps_;
  std::size_t cnt = block_size_;
  std::size_t e;
  int found = -1;
  for (e = next_arc_; e != arc_num_; ++e) {
    double c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
    if (c < min) { min = c; found = static_cast<int>(e); }
    if (--cnt == 0) {
      if (found >= 0) goto search_end;
      cnt = block_size_;
    }
  }
  for (e = 0; e != next_arc_; ++e) {
    double c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
    if (c < min) { min = c; found = static_cast<int>(e); }
    if (--cnt == 0) {
      if (found >= 0) goto search_end;
      cnt = block_size_;
    }
  }
  if (found < 0) return false;
search_end:
  next_arc_ = e;
  in_arc_ = found;
  return true;
}

void NetworkSimplex::find_join_node() {
  int u = source_[in_arc_];
  int v = target_[in_arc_];
  while (u != v) {
    if (succ_num_[u] < succ_num_[v]) u = parent_[u];
    else v = parent_[v];
  }
  join_ = u;
}

void NetworkSimplex::find_leaving_arc() {
  // Entering arcs are always at their lower bound (no capacities).
  int first = source_[in_arc_];
  int second = target_[in_arc_];
  delta_ = INF;
  int result = 0;
  for (int u = first; u != join_; u = parent_[u]) {
    if (pred_dir_[u] == DIR_UP) {
      double d = flow_[pred_[u]];
      if (d < delta_) { delta_ = d; u_out_ = u; result = 1; }
    }
  }
  for (int u = second; u != join_; u = parent_[u]) {
    if (pred_dir_[u] == DIR_DOWN) {
      double d = flow_[pred_[u]];
      if (d <= delta_) { delta_ = d; u_out_ = u; result = 2; }
    }
  }
  if (result == 0) throw Error("transport", "unbounded transportation problem");
  if (result == 1) { u_in_ = first; v_in_ = second; }
  else { u_in_ = second; v_in_ = first; }
}

void NetworkSimplex::change_flow() {
  if (delta_ > 0.0) {
    const double val = delta_;
    flow_[in_arc_] += val;
    for (int u = source_[in_arc_]; u != join_; u = parent_[u])
      flow_[pred_[u]] -= pred_dir_[u] * val;
    for (int u = target_[in_arc_]; u != join_; u = parent_[u])
      flow_[pred_[u]] += pred_dir_[u] * val;
  }
  state_[in_arc_] = STATE_TREE;
  state_[pred_[u_out_]] = STATE_LOWER;
  flow_[pred_[u_out_]] = 0.0;
}

void NetworkSimplex::update_tree() {
  int old_rev_thread = rev_thread_[u_out_];
  int old_succ_num = succ_num_[u_out_];
  int old_last_succ = last_succ_[u_out_];
  v_out_ = parent_[u_out_];

  if (u_in_ == u_out_) {
    parent_[u_in_] = v_in_;
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? DIR_UP : DIR_DOWN;
    if (thread_[v_in_] != u_out_) {
      int after = thread_[old_last_succ];
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
      after = thread_[v_in_];
      thread_[v_in_] = u_out_;
      rev_thread_[u_out_] = v_in_;
      thread_[old_last_succ] = after;
      rev_thread_[after] = old_last_succ;
    }
  } else {
    int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

    // Re-hang the stem u_in -> ... -> u_out under v_in.
    int stem = u_in_;
    int par_stem = v_in_;
    int next_stem;
    int last = last_succ_[u_in_];
    int before, after = thread_[last];
    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      next_stem = parent_[stem];
      thread_[last] = next_stem;
      dirty_revs_.push_back(last);

      before = rev_thread_[stem];
      thread_[before] = after;
      rev_thread_[after] = before;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem]
                                                       : last_succ_[stem];
      after = thread_[last];
    }
    parent_[u_out_] = par_stem;
    thread_[last] = thread_continue;
    rev_thread_[thread_continue] = last;
    last_succ_[u_out_] = last;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
    }

    for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

    int tmp_sc = 0, tmp_ls = last_succ_[u_out_];
    for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
      pred_[u] = pred_[p];
      pred_dir_[u] = -pred_dir_[p];
      tmp_sc += succ_num_[u] - succ_num_[p];
      succ_num_[u] = tmp_sc;
      last_succ_[p] = tmp_ls;
    }
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? DIR_UP : DIR_DOWN;
    succ_num_[u_in_] = old_succ_num;
  }

  int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
  int last_succ_out = last_succ_[u_out_];
  for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u])
    last_succ_[u] = last_succ_out;

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
      last_succ_[u] = old_rev_thread;
  } else if (last_succ_out != old_last_succ) {
    for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
      last_succ_[u] = last_succ_out;
  }

  for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
  for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
}

void NetworkSimplex::update_potential() {
  double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
  int end = thread_[last_succ_[u_in_]];
  for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

NetworkSimplex::Result NetworkSimplex::run(std::size_t max_pivots) {
  if (max_pivots == 0) max_pivots = 50 * all_arc_num_ + 100000;
  Result r;
  while (find_entering_arc()) {
    find_join_node();
    find_leaving_arc();
    change_flow();
    update_tree();
    update_potential();
    if (++r.pivots > max_pivots)
      throw Error("transport", "network simplex exceeded the pivot limit");
  }
  r.flow.assign(flow_.begin(), flow_.begin() + static_cast<std::ptrdiff_t>(arc_num_));
  r.source_pi.assign(pi_.begin(), pi_.begin() + static_cast<std::ptrdiff_t>(n0_));
  r.sink_pi.assign(pi_.begin() + static_cast<std::ptrdiff_t>(n0_),
                   pi_.begin() + static_cast<std::ptrdiff_t>(node_num_));
  for (std::size_t e = 0; e < arc_num_; ++e) r.cost += flow_[e] * cost_[e];
  for (std::size_t e = arc_num_; e < all_arc_num_; ++e) r.artificial_flow += std::abs(flow_[e]);
  return r;
}

}  // namespace cdv

#pragma once

#include <cstddef>
#include <vector>

namespace cdv {

// Uncapacitated transportation problem solved by the primal network simplex
// method (spanning-tree basis, block-search pivoting). Supplies are real; the
// caller is responsible for balancing them.
class NetworkSimplex {
 public:
  struct Result {
    std::vector<double> flow;       // per arc, arc (i,j) at index i*n_sinks + j
    std::vector<double> source_pi;  // node potentials, reduced cost c + pi_s - pi_t
    std::vector<double> sink_pi;
    double cost = 0.0;
    double artificial_flow = 0.0;   // mass left on artificial arcs (should be ~0)
    std::size_t pivots = 0;
  };

  NetworkSimplex(std::vector<double> supply, std::vector<double> demand,
                 std::vector<double> cost);

  Result run(std::size_t max_pivots = 0);

 private:
  bool find_entering_arc();
  void find_join_node();
  void find_leaving_arc();
  void change_flow();
  void update_tree();
  void update_potential();

  std::size_t n0_, n1_, node_num_, arc_num_, all_arc_num_, root_;
  std::vector<int> source_, target_, state_;
  std::vector<double> cost_, flow_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<int> dirty_revs_;
  std::vector<double> supply_, pi_;
  std::size_t block_size_, next_arc_ = 0;
  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  double delta_ = 0.0, eps_ = 0.0;
};

}  // namespace cdv

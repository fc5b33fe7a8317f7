/*
 * Copyright 2026 The syncnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SYNCNET_TOPOLOGY_H_
#define SYNCNET_TOPOLOGY_H_

#include <vector>

namespace syncnet {

using AgentId = int;  // zero-based inside the library

/// Validated communication graph: unweighted, directed, acyclic, with every
/// agent reachable from the single leader. adjacency[i][j] == 1 iff j is an
/// in-neighbor of i.
class CommGraph {
 public:
  /// Throws kNonBinaryEntry, kDimensionMismatch, kSelfLoop, kCycleDetected or
  /// kUnreachable.
  static CommGraph Validate(const std::vector<std::vector<int>>& adjacency,
                            AgentId leader);

  int size() const { return static_cast<int>(adjacency_.size()); }
  AgentId leader() const { return leader_; }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
  bool HasEdge(AgentId i, AgentId j) const { return adjacency_[i][j] == 1; }

  /// Ascending in-neighbor ids; empty exactly for the leader.
  const std::vector<AgentId>& InNeighbors(AgentId i) const;

  /// Topological order starting at the leader, ties broken by ascending id.
  const std::vector<AgentId>& EvaluationOrder() const { return order_; }

  /// Number of edges on the longest leader-to-agent path (leader = 0).
  int Depth(AgentId i) const { return depth_[i]; }

 private:
  CommGraph() = default;

  std::vector<std::vector<int>> adjacency_;
  AgentId leader_ = 0;
  std::vector<std::vector<AgentId>> in_neighbors_;
  std::vector<AgentId> order_;
  std::vector<int> depth_;
};

/// Tree with `count` agents where agent k (k >= 1) listens to agent
/// (k - 1) / fanout. Leader is agent 0.
std::vector<std::vector<int>> TreeAdjacency(int count, int fanout);

/// Chain 0 -> 1 -> ... -> count - 1.
std::vector<std::vector<int>> ChainAdjacency(int count);

}  // namespace syncnet

#endif  // SYNCNET_TOPOLOGY_H_

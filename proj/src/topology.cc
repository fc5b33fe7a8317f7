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

#include "syncnet/topology.h"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "syncnet/error.h"

namespace syncnet {

CommGraph CommGraph::Validate(const std::vector<std::vector<int>>& adjacency,
                              AgentId leader) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "graph has no agents");
  }
  for (const auto& row : adjacency) {
    if (static_cast<int>(row.size()) != n) {
      throw Error(ErrorCode::kDimensionMismatch, "adjacency must be square");
    }
    for (int a : row) {
      if (a != 0 && a != 1) {
        throw Error(ErrorCode::kNonBinaryEntry,
                    "adjacency entries must be 0 or 1, got " + std::to_string(a));
      }
    }
  }
  if (leader < 0 || leader >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "leader index " + std::to_string(leader) + " out of range");
  }
  for (int i = 0; i < n; ++i) {
    if (adjacency[i][i] != 0) {
      throw Error(ErrorCode::kSelfLoop,
                  "agent " + std::to_string(i) + " lists itself as neighbor");
    }
  }

  CommGraph g;
  g.adjacency_ = adjacency;
  g.leader_ = leader;
  g.in_neighbors_.resize(n);
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<AgentId>> out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adjacency[i][j] == 1) {
        g.in_neighbors_[i].push_back(j);
        out[j].push_back(i);
        ++indegree[i];
      }
    }
  }

  // Kahn's algorithm; the min-heap makes the order deterministic.
  std::priority_queue<AgentId, std::vector<AgentId>, std::greater<>> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<int> remaining = indegree;
  std::vector<AgentId> topo;
  while (!ready.empty()) {
    const AgentId v = ready.top();
    ready.pop();
    topo.push_back(v);
    for (AgentId w : out[v]) {
      if (--remaining[w] == 0) ready.push(w);
    }
  }
  if (static_cast<int>(topo.size()) != n) {
    throw Error(ErrorCode::kCycleDetected, "communication graph has a cycle");
  }

  // Reachability from the leader.
  std::vector<bool> seen(n, false);
  std::queue<AgentId> frontier;
  frontier.push(leader);
  seen[leader] = true;
  while (!frontier.empty()) {
    const AgentId v = frontier.front();
    frontier.pop();
    for (AgentId w : out[v]) {
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kUnreachable,
                  "agent " + std::to_string(i) +
                      " is not reachable from the leader");
    }
  }

  // Every non-leader has an in-neighbor here, so the only zero in-degree node
  // is the leader and the topological order starts with it.
  g.order_ = std::move(topo);
  g.depth_.assign(n, 0);
  for (AgentId v : g.order_) {
    for (AgentId j : g.in_neighbors_[v]) {
      g.depth_[v] = std::max(g.depth_[v], g.depth_[j] + 1);
    }
  }
  return g;
}

const std::vector<AgentId>& CommGraph::InNeighbors(AgentId i) const {
  if (i < 0 || i >= size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "agent " + std::to_string(i) + " out of range");
  }
  return in_neighbors_[i];
}

std::vector<std::vector<int>> TreeAdjacency(int count, int fanout) {
  if (count < 1 || fanout < 1) {
    throw Error(ErrorCode::kInvalidArgument, "tree needs count, fanout >= 1");
  }
  std::vector<std::vector<int>> a(count, std::vector<int>(count, 0));
  for (int k = 1; k < count; ++k) a[k][(k - 1) / fanout] = 1;
  return a;
}

std::vector<std::vector<int>> ChainAdjacency(int count) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "chain needs count >= 1");
  }
  std::vector<std::vector<int>> a(count, std::vector<int>(count, 0));
  for (int k = 1; k < count; ++k) a[k][k - 1] = 1;
  return a;
}

}  // namespace syncnet

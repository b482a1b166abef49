#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fogserve/graph.hpp"

namespace fogserve {

/// part_of[v] in [0, parts).
using PartitionVector = std::vector<std::uint32_t>;

/// Largest admissible part: floor((1 + imbalance) * ceil(total / parts)).
std::uint64_t max_part_weight(std::uint64_t total, std::uint32_t parts, double imbalance);

class Partitioner {
 public:
  virtual ~Partitioner() = default;
  virtual PartitionVector partition(const Graph& g, std::uint32_t parts) const = 0;
};

struct MultilevelOptions {
  double imbalance = 0.03;
  std::uint64_t seed = 0;
  std::uint32_t initial_trials = 4;
  std::uint32_t refine_passes = 10;
};

/// Heavy-edge-matching coarsening, greedy graph-growing initial split and
/// boundary greedy (Kernighan-Lin style) refinement during uncoarsening.
/// Every part respects max_part_weight and is non-empty.
class MultilevelPartitioner final : public Partitioner {
 public:
  explicit MultilevelPartitioner(MultilevelOptions options = {}) : options_(options) {}
  PartitionVector partition(const Graph& g, std::uint32_t parts) const override;

 private:
  MultilevelOptions options_;
};

/// Imports an externally computed partition: "vertex_id part_id" per line.
class FilePartitioner final : public Partitioner {
 public:
  explicit FilePartitioner(std::filesystem::path path) : path_(std::move(path)) {}
  PartitionVector partition(const Graph& g, std::uint32_t parts) const override;

 private:
  std::filesystem::path path_;
};

/// Groups part_of into `parts` ascending vertex lists.
std::vector<std::vector<VertexId>> to_parts(const PartitionVector& part_of, std::uint32_t parts);

/// n min-cut parts of near-equal size using the built-in multilevel partitioner.
std::vector<std::vector<VertexId>> balanced_partition(const Graph& g, std::uint32_t n, double imbalance = 0.03,
                                                      std::uint64_t seed = 0);

}  // namespace fogserve

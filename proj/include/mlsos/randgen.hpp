#pragma once

#include <cstdint>
#include <vector>

#include "mlsos/mlp.hpp"

namespace mlsos::randgen {

// Deterministic uniform doubles from raw mt19937_64 bits, so that seeded
// streams do not depend on the standard library's distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64();
    double uniform(double lo, double hi);
    int uniform_int(int lo, int hi);  // inclusive bounds

  private:
    std::uint64_t state_;
};

// Random bounded polytope: the box [0,1]^d cut by `cuts` halfspaces that keep
// the box center strictly feasible.
polytope::HPolytope random_polytope(Rng& rng, int dim, int cuts);

// Random multilinear program with dense tensors on every nonempty subset.
mlp::MultilinearProgram random_program(Rng& rng, const std::vector<int>& dims, int cuts_per_block);

}  // namespace mlsos::randgen

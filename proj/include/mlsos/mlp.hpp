#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlsos/poly.hpp"
#include "mlsos/polytope.hpp"

namespace mlsos::mlp {

using linalg::Vector;
using polytope::HPolytope;
using polytope::VertexSet;

// Nonempty block subsets are encoded as bitmasks over [l] (bit i = block i).
using Subset = std::uint32_t;

// Objective sum over nonempty L of Q^(L) contracted with the blocks in L.
// Tensor entries are keyed by one 0-based coordinate per block of L, in
// ascending block order.
struct MultilinearForm {
    int l = 0;
    std::vector<int> block_dims;
    std::map<Subset, std::map<std::vector<int>, double>> tensors;

    void set(Subset L, const std::vector<int>& idx, double value);
    void add(Subset L, const std::vector<int>& idx, double value);
    bool has_top_tensor() const;  // Q^([l]) present and nonzero
    int total_vars() const;
    int var_offset(int block) const;
};

enum class Sense { Max, Min };

// Points live block-wise.
using BlockPoint = std::vector<Vector>;

struct MultilinearProgram {
    std::vector<HPolytope> blocks;
    MultilinearForm objective;
    Sense sense = Sense::Max;

    // Filled by prepare():
    bool prepared = false;
    bool negated = false;  // true when a Min program was flipped to Max internally
    std::vector<std::string> warnings;
    std::vector<VertexSet> vertex_cache;

    int l() const { return static_cast<int>(blocks.size()); }
    int total_vars() const { return objective.total_vars(); }

    // Normalize, check boundedness, strip redundant rows on every block;
    // flips Min to Max. Vertex sets are enumerated lazily by vertex_data().
    void prepare(bool strip_redundant = true);
    const VertexSet& vertex_data(int block, std::uint64_t cap = 1000000);

    // Maps an internal (Max) value back to the caller's sense.
    double to_original_sense(double internal_value) const { return negated ? -internal_value : internal_value; }
};

struct OracleResult {
    double value = 0.0;                           // internal-sense optimum over vertex tuples
    std::vector<std::vector<int>> optimal_tuples; // vertex indices per block
    std::uint64_t tuples_scanned = 0;
};

double eval(const MultilinearForm& f, const BlockPoint& x);
Vector grad_block(const MultilinearForm& f, const BlockPoint& x, int block);
poly::Poly to_poly(const MultilinearForm& f);

// Exhaustive scan over the vertex-tuple product. Throws CapExceeded when the
// product of vertex counts exceeds `cap`.
OracleResult vertex_oracle(MultilinearProgram& p, double tol = 1e-9, std::uint64_t cap = 10000000);

// Finiteness of the optimal set (two optimal tuples differing in exactly one
// block witness a positive-dimensional optimal face).
bool optima_are_finite(const OracleResult& r, const MultilinearProgram& p);

struct LocalSearchResult {
    double value = 0.0;
    BlockPoint point;
};

// Alternating block LPs from a feasible start; monotone, ends at a vertex tuple.
LocalSearchResult local_search(MultilinearProgram& p, const BlockPoint& start);

// Concatenate / split block-structured points.
Vector flatten(const MultilinearForm& f, const BlockPoint& x);
BlockPoint split(const MultilinearForm& f, const Vector& x);

}  // namespace mlsos::mlp
